//! Streaming reader for DBLP-style XML dumps.
//!
//! Publication elements (`article`, `inproceedings`, ...) directly below the
//! root are turned into [`RawRecord`]s one at a time; memory use is bounded by
//! the largest single record. Child elements other than `author`, `title`,
//! `year`, `journal` and `booktitle` are skipped. Top-level elements of an
//! unknown type become records of kind `other` when they carry a `key`.
//!
//! DBLP declares its entities (`&uuml;` and friends) in an external DTD; the
//! ISO-8859-1 set is resolved here, together with character references and
//! the predefined XML entities. Unknown entities are kept verbatim.

use std::io::{self, BufRead, BufReader, Read};

use namesake_core::mention::{parse_mention, RawRecord, RecordKind};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

/// Malformed input, with the byte offset at which it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("XML error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: u64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Author,
    Title,
    Year,
    Venue,
}

impl Field {
    fn from_tag(tag: &[u8]) -> Option<Field> {
        match tag {
            b"author" => Some(Field::Author),
            b"title" => Some(Field::Title),
            b"year" => Some(Field::Year),
            b"journal" | b"booktitle" => Some(Field::Venue),
            _ => None,
        }
    }
}

/// Record under construction.
#[derive(Default)]
struct Pending {
    id: String,
    kind: Option<RecordKind>,
    title: String,
    venue: Option<String>,
    year: Option<i32>,
    authors: Vec<String>,
    /// Field being read, its depth inside the record and its text so far.
    field: Option<(Field, usize, String)>,
}

/// Iterator of records over a DBLP XML stream.
pub struct DblpReader<R: BufRead> {
    xml: Reader<R>,
    buf: Vec<u8>,
    /// Element depth: 0 outside the document element.
    depth: usize,
    /// Depth at which the current record element was opened.
    record_depth: Option<usize>,
    /// Depth of an element whose subtree is being skipped.
    skip_depth: Option<usize>,
    pending: Pending,
    finished: bool,
}

impl<R: BufRead> DblpReader<R> {
    pub fn new(input: R) -> Self {
        let mut xml = Reader::from_reader(input);
        xml.config_mut().check_end_names = true;
        DblpReader {
            xml,
            buf: Vec::with_capacity(4096),
            depth: 0,
            record_depth: None,
            skip_depth: None,
            pending: Pending::default(),
            finished: false,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.xml.buffer_position(),
            message: message.into(),
        }
    }

    /// Records start at depth 1 below a wrapper root such as `<dblp>`, or at
    /// depth 0 when the document element itself is a publication.
    fn is_record_level(&self, tag: &[u8]) -> bool {
        match self.depth {
            1 => true,
            0 => tag_kind(tag) != RecordKind::Other,
            _ => false,
        }
    }

    fn open_record(&mut self, e: &BytesStart<'_>) -> Result<bool, ParseError> {
        let tag = e.name().as_ref().as_bytes().to_vec();
        let kind = tag_kind(&tag);
        let key = e
            .try_get_attribute("key")
            .map_err(|err| self.error(err.to_string()))?
            .map(|a| {
                a.normalized_value(quick_xml::XmlVersion::Implicit1_0)
                    .map(|v| v.into_owned())
            })
            .transpose()
            .map_err(|err| self.error(err.to_string()))?;
        match key {
            Some(id) => {
                self.pending = Pending {
                    id,
                    kind: Some(kind),
                    ..Pending::default()
                };
                Ok(true)
            }
            None if kind == RecordKind::Other => Ok(false),
            None => Err(self.error(format!(
                "<{}> without key attribute",
                String::from_utf8_lossy(&tag)
            ))),
        }
    }

    fn push_text(&mut self, text: &str) {
        if let Some((_, _, acc)) = &mut self.pending.field {
            acc.push_str(text);
        }
    }

    fn close_field(&mut self) -> Result<(), ParseError> {
        let Some((field, _, text)) = self.pending.field.take() else {
            return Ok(());
        };
        match field {
            Field::Author => self.pending.authors.push(text),
            Field::Title => self.pending.title = collapse(&text),
            Field::Year => self.pending.year = text.trim().parse().ok(),
            Field::Venue => {
                if self.pending.venue.is_none() {
                    self.pending.venue = Some(collapse(&text));
                }
            }
        }
        Ok(())
    }

    fn finish_record(&mut self) -> Result<RawRecord, ParseError> {
        let pending = std::mem::take(&mut self.pending);
        let mentions = pending
            .authors
            .iter()
            .map(|a| parse_mention(&collapse(a)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| self.error(format!("record {:?}: {e}", pending.id)))?;
        Ok(RawRecord {
            record_id: pending.id,
            kind: pending.kind.unwrap_or(RecordKind::Other),
            title: pending.title,
            venue: pending.venue,
            year: pending.year,
            mentions,
        })
    }

    fn step(&mut self) -> Result<Option<RawRecord>, ParseError> {
        loop {
            self.buf.clear();
            let event = match self.xml.read_event_into(&mut self.buf) {
                Ok(ev) => ev.into_owned(),
                Err(e) => {
                    return Err(ParseError {
                        offset: self.xml.error_position(),
                        message: e.to_string(),
                    })
                }
            };
            match event {
                Event::Start(e) => {
                    let tag = e.name().as_ref().as_bytes().to_vec();
                    if self.skip_depth.is_none() {
                        if self.record_depth.is_none() && self.is_record_level(&tag) {
                            if self.open_record(&e)? {
                                self.record_depth = Some(self.depth);
                            } else {
                                self.skip_depth = Some(self.depth);
                            }
                        } else if let Some(rd) = self.record_depth {
                            if self.pending.field.is_none() {
                                if let Some(f) = Field::from_tag(&tag) {
                                    self.pending.field = Some((f, self.depth, String::new()));
                                } else if self.depth == rd + 1 {
                                    self.skip_depth = Some(self.depth);
                                }
                            }
                        }
                    }
                    self.depth += 1;
                }
                Event::Empty(e) => {
                    let tag = e.name().as_ref().as_bytes().to_vec();
                    if self.skip_depth.is_none()
                        && self.record_depth.is_none()
                        && self.is_record_level(&tag)
                        && self.open_record(&e)?
                    {
                        return self.finish_record().map(Some);
                    }
                }
                Event::End(_) => {
                    if self.depth == 0 {
                        return Err(self.error("unexpected closing tag"));
                    }
                    self.depth -= 1;
                    if self.skip_depth == Some(self.depth) {
                        self.skip_depth = None;
                    } else if self.skip_depth.is_none() {
                        if self.record_depth == Some(self.depth) {
                            self.record_depth = None;
                            self.close_field()?;
                            return self.finish_record().map(Some);
                        }
                        if matches!(self.pending.field, Some((_, d, _)) if d == self.depth) {
                            self.close_field()?;
                        }
                    }
                }
                Event::Text(t) => {
                    if self.skip_depth.is_none() {
                        let text = t.xml10_content();
                        self.push_text(&text);
                    }
                }
                Event::CData(t) => {
                    if self.skip_depth.is_none() {
                        let text = t.into_inner().into_owned();
                        self.push_text(&text);
                    }
                }
                Event::GeneralRef(r) => {
                    if self.skip_depth.is_none() {
                        let resolved = if r.is_char_ref() {
                            match r.resolve_char_ref() {
                                Ok(Some(c)) => c.to_string(),
                                _ => {
                                    return Err(
                                        self.error(format!("bad character reference &{};", &*r))
                                    )
                                }
                            }
                        } else {
                            resolve_entity(&r).map_or_else(|| format!("&{};", &*r), String::from)
                        };
                        self.push_text(&resolved);
                    }
                }
                Event::Eof => {
                    if self.depth != 0 || self.record_depth.is_some() {
                        return Err(self.error("unexpected end of document"));
                    }
                    return Ok(None);
                }
                Event::Decl(_) | Event::PI(_) | Event::Comment(_) | Event::DocType(_) => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for DblpReader<R> {
    type Item = Result<RawRecord, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.step() {
            Ok(Some(record)) => Some(Ok(record)),
            Ok(None) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}

fn tag_kind(tag: &[u8]) -> RecordKind {
    std::str::from_utf8(tag).map_or(RecordKind::Other, RecordKind::from_tag)
}

fn collapse(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Predefined XML entities and the ISO-8859-1 named entities of the DBLP DTD.
pub fn resolve_entity(name: &str) -> Option<char> {
    let predefined = match name {
        "lt" => Some('<'),
        "gt" => Some('>'),
        "amp" => Some('&'),
        "apos" => Some('\''),
        "quot" => Some('"'),
        _ => None,
    };
    predefined.or_else(|| {
        LATIN1_ENTITIES
            .binary_search_by(|(n, _)| n.cmp(&name))
            .ok()
            .map(|i| LATIN1_ENTITIES[i].1)
    })
}

const LATIN1_ENTITIES: [(&str, char); 96] = [
    ("AElig", '\u{c6}'),
    ("Aacute", '\u{c1}'),
    ("Acirc", '\u{c2}'),
    ("Agrave", '\u{c0}'),
    ("Aring", '\u{c5}'),
    ("Atilde", '\u{c3}'),
    ("Auml", '\u{c4}'),
    ("Ccedil", '\u{c7}'),
    ("ETH", '\u{d0}'),
    ("Eacute", '\u{c9}'),
    ("Ecirc", '\u{ca}'),
    ("Egrave", '\u{c8}'),
    ("Euml", '\u{cb}'),
    ("Iacute", '\u{cd}'),
    ("Icirc", '\u{ce}'),
    ("Igrave", '\u{cc}'),
    ("Iuml", '\u{cf}'),
    ("Ntilde", '\u{d1}'),
    ("Oacute", '\u{d3}'),
    ("Ocirc", '\u{d4}'),
    ("Ograve", '\u{d2}'),
    ("Oslash", '\u{d8}'),
    ("Otilde", '\u{d5}'),
    ("Ouml", '\u{d6}'),
    ("THORN", '\u{de}'),
    ("Uacute", '\u{da}'),
    ("Ucirc", '\u{db}'),
    ("Ugrave", '\u{d9}'),
    ("Uuml", '\u{dc}'),
    ("Yacute", '\u{dd}'),
    ("aacute", '\u{e1}'),
    ("acirc", '\u{e2}'),
    ("acute", '\u{b4}'),
    ("aelig", '\u{e6}'),
    ("agrave", '\u{e0}'),
    ("aring", '\u{e5}'),
    ("atilde", '\u{e3}'),
    ("auml", '\u{e4}'),
    ("brvbar", '\u{a6}'),
    ("ccedil", '\u{e7}'),
    ("cedil", '\u{b8}'),
    ("cent", '\u{a2}'),
    ("copy", '\u{a9}'),
    ("curren", '\u{a4}'),
    ("deg", '\u{b0}'),
    ("divide", '\u{f7}'),
    ("eacute", '\u{e9}'),
    ("ecirc", '\u{ea}'),
    ("egrave", '\u{e8}'),
    ("eth", '\u{f0}'),
    ("euml", '\u{eb}'),
    ("frac12", '\u{bd}'),
    ("frac14", '\u{bc}'),
    ("frac34", '\u{be}'),
    ("iacute", '\u{ed}'),
    ("icirc", '\u{ee}'),
    ("iexcl", '\u{a1}'),
    ("igrave", '\u{ec}'),
    ("iquest", '\u{bf}'),
    ("iuml", '\u{ef}'),
    ("laquo", '\u{ab}'),
    ("macr", '\u{af}'),
    ("micro", '\u{b5}'),
    ("middot", '\u{b7}'),
    ("nbsp", '\u{a0}'),
    ("not", '\u{ac}'),
    ("ntilde", '\u{f1}'),
    ("oacute", '\u{f3}'),
    ("ocirc", '\u{f4}'),
    ("ograve", '\u{f2}'),
    ("ordf", '\u{aa}'),
    ("ordm", '\u{ba}'),
    ("oslash", '\u{f8}'),
    ("otilde", '\u{f5}'),
    ("ouml", '\u{f6}'),
    ("para", '\u{b6}'),
    ("plusmn", '\u{b1}'),
    ("pound", '\u{a3}'),
    ("raquo", '\u{bb}'),
    ("reg", '\u{ae}'),
    ("sect", '\u{a7}'),
    ("shy", '\u{ad}'),
    ("sup1", '\u{b9}'),
    ("sup2", '\u{b2}'),
    ("sup3", '\u{b3}'),
    ("szlig", '\u{df}'),
    ("thorn", '\u{fe}'),
    ("times", '\u{d7}'),
    ("uacute", '\u{fa}'),
    ("ucirc", '\u{fb}'),
    ("ugrave", '\u{f9}'),
    ("uml", '\u{a8}'),
    ("uuml", '\u{fc}'),
    ("yacute", '\u{fd}'),
    ("yen", '\u{a5}'),
    ("yuml", '\u{ff}'),
];

/// Opens an XML stream, undoing gzip compression (magic `1f 8b`) and
/// transcoding ISO-8859-1 documents to UTF-8.
pub fn open_xml<R: Read + 'static>(input: R) -> io::Result<DblpReader<Box<dyn BufRead>>> {
    let mut input = BufReader::new(input);
    let gz = input.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    let mut plain: Box<dyn BufRead> = if gz {
        Box::new(BufReader::new(flate2::bufread::MultiGzDecoder::new(input)))
    } else {
        Box::new(input)
    };
    let latin1 = declares_latin1(plain.fill_buf()?);
    let source: Box<dyn BufRead> = if latin1 {
        Box::new(BufReader::new(Latin1ToUtf8::new(plain)))
    } else {
        plain
    };
    Ok(DblpReader::new(source))
}

fn declares_latin1(head: &[u8]) -> bool {
    if !head.starts_with(b"<?xml") {
        return false;
    }
    let end = head.iter().position(|&b| b == b'>').unwrap_or(head.len());
    let decl = String::from_utf8_lossy(&head[..end]).to_ascii_lowercase();
    ["iso-8859-1", "iso8859-1", "latin1", "latin-1"]
        .iter()
        .any(|name| decl.contains(name))
}

/// Byte-to-char transcoder: every ISO-8859-1 byte is the code point of the
/// same value.
struct Latin1ToUtf8<R> {
    inner: R,
    pending: Vec<u8>,
}

impl<R: BufRead> Latin1ToUtf8<R> {
    fn new(inner: R) -> Self {
        Latin1ToUtf8 {
            inner,
            pending: Vec::new(),
        }
    }
}

impl<R: BufRead> Read for Latin1ToUtf8<R> {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        if self.pending.is_empty() {
            let chunk = self.inner.fill_buf()?;
            if chunk.is_empty() {
                return Ok(0);
            }
            let take = chunk.len().min(out.len().max(2) / 2 + 1);
            for &b in &chunk[..take] {
                let mut tmp = [0u8; 2];
                self.pending
                    .extend_from_slice(char::from(b).encode_utf8(&mut tmp).as_bytes());
            }
            self.inner.consume(take);
        }
        let n = self.pending.len().min(out.len());
        out[..n].copy_from_slice(&self.pending[..n]);
        self.pending.drain(..n);
        Ok(n)
    }
}
