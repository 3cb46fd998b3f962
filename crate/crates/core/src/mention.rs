//! Author mentions and publication records.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// One author name as printed on a record.
///
/// DBLP disambiguates homonyms by appending a space and a four digit number to
/// the name (`"Wei Li 0001"`). That suffix is split off into `gold_id`; the
/// disambiguator only ever sees `surface_name`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AuthorMention {
    pub surface_name: String,
    pub gold_id: Option<String>,
    pub raw: String,
}

impl AuthorMention {
    /// Key of the gold author this mention belongs to, e.g. `"Wei Li 0001"`.
    pub fn gold_key(&self) -> Option<String> {
        self.gold_id
            .as_deref()
            .map(|id| gold_key(&self.surface_name, id))
    }
}

/// Joins a surface name and a disambiguation suffix into a gold author key.
pub fn gold_key(surface_name: &str, gold_id: &str) -> String {
    let mut key = String::with_capacity(surface_name.len() + 1 + gold_id.len());
    key.push_str(surface_name);
    key.push(' ');
    key.push_str(gold_id);
    key
}

/// Trims and collapses runs of whitespace to a single space.
pub fn normalize_name(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for word in raw.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

fn split_suffix(name: &str) -> Option<(&str, &str)> {
    let bytes = name.as_bytes();
    if bytes.len() < 6 {
        return None;
    }
    let (head, tail) = bytes.split_at(bytes.len() - 5);
    if tail[0] == b' ' && tail[1..].iter().all(u8::is_ascii_digit) && !head.is_empty() {
        // The split points are ASCII, so both halves are valid UTF-8.
        Some((&name[..head.len()], &name[head.len() + 1..]))
    } else {
        None
    }
}

/// Parses a printed author name, splitting off a trailing `" dddd"` gold suffix.
pub fn parse_mention(raw: &str) -> Result<AuthorMention> {
    let normalized = normalize_name(raw);
    if normalized.is_empty() {
        return Err(Error::MalformedMention(raw.into()));
    }
    let (surface_name, gold_id) = match split_suffix(&normalized) {
        Some((surface, id)) => {
            if split_suffix(surface).is_some() {
                return Err(Error::MalformedMention(raw.into()));
            }
            (surface.into(), Some(id.into()))
        }
        None => (normalized, None),
    };
    Ok(AuthorMention {
        surface_name,
        gold_id,
        raw: raw.into(),
    })
}

/// Publication element type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RecordKind {
    Article,
    Inproceedings,
    Proceedings,
    Book,
    Incollection,
    Phdthesis,
    Mastersthesis,
    Www,
    Other,
}

impl RecordKind {
    pub const ALL: [RecordKind; 9] = [
        RecordKind::Article,
        RecordKind::Inproceedings,
        RecordKind::Proceedings,
        RecordKind::Book,
        RecordKind::Incollection,
        RecordKind::Phdthesis,
        RecordKind::Mastersthesis,
        RecordKind::Www,
        RecordKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Article => "article",
            RecordKind::Inproceedings => "inproceedings",
            RecordKind::Proceedings => "proceedings",
            RecordKind::Book => "book",
            RecordKind::Incollection => "incollection",
            RecordKind::Phdthesis => "phdthesis",
            RecordKind::Mastersthesis => "mastersthesis",
            RecordKind::Www => "www",
            RecordKind::Other => "other",
        }
    }

    /// Maps an element name to a kind; unknown names map to [`RecordKind::Other`].
    pub fn from_tag(tag: &str) -> RecordKind {
        RecordKind::ALL
            .into_iter()
            .find(|k| *k != RecordKind::Other && k.as_str() == tag)
            .unwrap_or(RecordKind::Other)
    }

    /// Whether records of this kind are publications that take part in the
    /// co-authorship network. DBLP `www` records are person home pages.
    pub fn is_publication(self) -> bool {
        self != RecordKind::Www
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One bibliographic record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub record_id: String,
    pub kind: RecordKind,
    pub title: String,
    pub venue: Option<String>,
    pub year: Option<i32>,
    pub mentions: Vec<AuthorMention>,
}

impl RawRecord {
    /// Records without authors, and home pages, never enter the network.
    pub fn in_network(&self) -> bool {
        !self.mentions.is_empty() && self.kind.is_publication()
    }
}
