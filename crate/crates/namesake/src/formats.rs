//! On-disk formats: canonical records (JSON lines), the gold standard (JSON),
//! cluster dumps (TSV) and the binary graph snapshot.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Read, Write};

use namesake_core::gold::GoldEntries;
use namesake_core::graph::GraphParts;
use namesake_core::mention::{gold_key, parse_mention, AuthorMention, RawRecord, RecordKind};
use namesake_core::{BipartiteGraph, Block, Clustering};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// One line of the canonical record file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalRecord {
    pub id: String,
    pub kind: String,
    pub title: String,
    pub venue: Option<String>,
    pub year: Option<i32>,
    pub authors: Vec<CanonicalAuthor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalAuthor {
    pub name: String,
    pub gold_id: Option<String>,
}

impl From<&RawRecord> for CanonicalRecord {
    fn from(r: &RawRecord) -> Self {
        CanonicalRecord {
            id: r.record_id.clone(),
            kind: r.kind.as_str().to_owned(),
            title: r.title.clone(),
            venue: r.venue.clone(),
            year: r.year,
            authors: r
                .mentions
                .iter()
                .map(|m| CanonicalAuthor {
                    name: m.surface_name.clone(),
                    gold_id: m.gold_id.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<CanonicalRecord> for RawRecord {
    type Error = String;

    fn try_from(c: CanonicalRecord) -> Result<Self, String> {
        let kind = RecordKind::from_tag(&c.kind);
        if kind.as_str() != c.kind {
            return Err(format!("unknown record kind {:?}", c.kind));
        }
        let mentions = c
            .authors
            .into_iter()
            .map(|a| {
                let raw = match &a.gold_id {
                    Some(id) => gold_key(&a.name, id),
                    None => a.name.clone(),
                };
                let mention = parse_mention(&raw).map_err(|e| e.to_string())?;
                let expected = AuthorMention {
                    surface_name: a.name,
                    gold_id: a.gold_id,
                    raw,
                };
                if mention != expected {
                    return Err(format!(
                        "author {:?} with gold id {:?} is not in canonical form",
                        expected.surface_name, expected.gold_id
                    ));
                }
                Ok(mention)
            })
            .collect::<Result<_, _>>()?;
        Ok(RawRecord {
            record_id: c.id,
            kind,
            title: c.title,
            venue: c.venue,
            year: c.year,
            mentions,
        })
    }
}

pub fn record_to_json(r: &RawRecord) -> String {
    serde_json::to_string(&CanonicalRecord::from(r)).expect("canonical records always serialize")
}

pub fn record_from_json(line: &str) -> Result<RawRecord, String> {
    let c: CanonicalRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    RawRecord::try_from(c)
}

pub fn write_record<W: Write>(out: &mut W, r: &RawRecord) -> io::Result<()> {
    out.write_all(record_to_json(r).as_bytes())?;
    out.write_all(b"\n")
}

/// Streaming reader over a canonical record file. Blank lines are ignored.
pub struct RecordLines<R> {
    input: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> RecordLines<R> {
    pub fn new(input: R) -> Self {
        RecordLines {
            input,
            line: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for RecordLines<R> {
    type Item = Result<RawRecord, FormatError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => self.line += 1,
                Err(e) => return Some(Err(e.into())),
            }
            let text = self.buf.trim();
            if text.is_empty() {
                continue;
            }
            return Some(record_from_json(text).map_err(|message| FormatError::Line {
                line: self.line,
                message,
            }));
        }
    }
}

pub fn write_gold<W: Write>(mut out: W, gold: &GoldEntries) -> Result<(), FormatError> {
    serde_json::to_writer_pretty(&mut out, gold).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_gold<R: Read>(input: R) -> Result<GoldEntries, FormatError> {
    serde_json::from_reader(input).map_err(|e| FormatError::Line {
        line: e.line(),
        message: e.to_string(),
    })
}

pub const CLUSTER_TSV_HEADER: &str = "block_key\trecord_id\tcluster_id\tgold_key";

/// Writes one row per record. Cluster ids are the lowest record id in the
/// cluster, so they do not depend on processing order.
pub fn write_clusters<'a, W, I>(mut out: W, rows: I) -> Result<(), FormatError>
where
    W: Write,
    I: IntoIterator<Item = (&'a Block, &'a Clustering)>,
{
    writeln!(out, "{CLUSTER_TSV_HEADER}")?;
    for (block, clustering) in rows {
        if block.members() != clustering.members() {
            return Err(FormatError::Invalid(format!(
                "clustering does not match block {:?}",
                block.block_key()
            )));
        }
        for ((record, cluster), gold) in
            clustering.assignment().into_iter().zip(block.gold_labels())
        {
            let fields = [block.block_key(), record, cluster, gold.as_str()];
            if let Some(bad) = fields.iter().find(|f| f.contains(['\t', '\n', '\r'])) {
                return Err(FormatError::Invalid(format!(
                    "field {bad:?} cannot be written to TSV"
                )));
            }
            writeln!(out, "{}", fields.join("\t"))?;
        }
    }
    Ok(())
}

/// `block_key -> [(record_id, cluster_id, gold_key)]`.
pub type ClusterRows = BTreeMap<String, Vec<(String, String, String)>>;

/// Reads a cluster dump back.
pub fn read_clusters<R: BufRead>(input: R) -> Result<ClusterRows, FormatError> {
    let mut out: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != CLUSTER_TSV_HEADER {
                return Err(FormatError::Line {
                    line: 1,
                    message: "missing cluster TSV header".into(),
                });
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [block, record, cluster, gold] = fields[..] else {
            return Err(FormatError::Line {
                line: i + 1,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        };
        out.entry(block.to_owned()).or_default().push((
            record.to_owned(),
            cluster.to_owned(),
            gold.to_owned(),
        ));
    }
    Ok(out)
}

/// Graph snapshot layout (all integers little-endian):
///
/// ```text
/// magic    8 bytes  "NSKGRAPH"
/// version  u32      1
/// counts   u32 publications, u32 authors, u64 edges
/// tables   publication ids, then author names; each u32 length + UTF-8
/// edges    (u32 publication index, u32 author index), grouped by publication
/// ```
///
/// The snapshot is a cache of a parsed corpus, not an interchange format.
pub const SNAPSHOT_MAGIC: &[u8; 8] = b"NSKGRAPH";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(mut out: W, graph: &BipartiteGraph) -> Result<(), FormatError> {
    let parts = graph.to_parts();
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&(parts.pubs.len() as u32).to_le_bytes())?;
    out.write_all(&(parts.authors.len() as u32).to_le_bytes())?;
    out.write_all(&(parts.edges.len() as u64).to_le_bytes())?;
    for s in parts.pubs.iter().chain(&parts.authors) {
        out.write_all(&(s.len() as u32).to_le_bytes())?;
        out.write_all(s.as_bytes())?;
    }
    for (p, a) in parts.edges {
        out.write_all(&p.to_le_bytes())?;
        out.write_all(&a.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<BipartiteGraph, FormatError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(FormatError::Invalid("not a graph snapshot".into()));
    }
    let version = read_u32(&mut input)?;
    if version != SNAPSHOT_VERSION {
        return Err(FormatError::Invalid(format!(
            "unsupported snapshot version {version}"
        )));
    }
    let n_pubs = read_u32(&mut input)? as usize;
    let n_authors = read_u32(&mut input)? as usize;
    let mut n_edges = [0u8; 8];
    input.read_exact(&mut n_edges)?;
    let n_edges = u64::from_le_bytes(n_edges) as usize;
    let pubs = read_strings(&mut input, n_pubs)?;
    let authors = read_strings(&mut input, n_authors)?;
    let mut edges = Vec::new();
    for _ in 0..n_edges {
        edges.push((read_u32(&mut input)?, read_u32(&mut input)?));
    }
    if input.read(&mut [0u8])? != 0 {
        return Err(FormatError::Invalid("trailing bytes after snapshot".into()));
    }
    BipartiteGraph::from_parts(GraphParts {
        pubs,
        authors,
        edges,
    })
    .map_err(|e| FormatError::Invalid(e.to_string()))
}

fn read_u32<R: Read>(input: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_strings<R: Read>(input: &mut R, n: usize) -> Result<Vec<String>, FormatError> {
    let mut out = Vec::new();
    for _ in 0..n {
        let len = read_u32(input)? as usize;
        let mut bytes = Vec::new();
        input.by_ref().take(len as u64).read_to_end(&mut bytes)?;
        if bytes.len() != len {
            return Err(FormatError::Io(io::ErrorKind::UnexpectedEof.into()));
        }
        out.push(
            String::from_utf8(bytes)
                .map_err(|_| FormatError::Invalid("node name is not UTF-8".into()))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use namesake_core::{build_blocks, build_gold_standard, cluster_block};

    fn rec(id: &str, authors: &[&str]) -> RawRecord {
        RawRecord {
            record_id: id.into(),
            kind: RecordKind::Article,
            title: format!("Title {id}"),
            venue: None,
            year: Some(2015),
            mentions: authors.iter().map(|a| parse_mention(a).unwrap()).collect(),
        }
    }

    #[test]
    fn canonical_line_shape() {
        let line = record_to_json(&rec("p1", &["Wei Li 0001", "Ann Bo"]));
        assert_eq!(
            line,
            r#"{"id":"p1","kind":"article","title":"Title p1","venue":null,"year":2015,"authors":[{"name":"Wei Li","gold_id":"0001"},{"name":"Ann Bo","gold_id":null}]}"#
        );
        assert_eq!(
            record_from_json(&line).unwrap(),
            rec("p1", &["Wei Li 0001", "Ann Bo"])
        );
    }

    #[test]
    fn non_canonical_authors_are_rejected() {
        let bad = r#"{"id":"p","kind":"article","title":"","venue":null,"year":null,"authors":[{"name":"Wei Li 0001","gold_id":null}]}"#;
        assert!(record_from_json(bad).unwrap_err().contains("canonical"));
        let bad = r#"{"id":"p","kind":"poem","title":"","venue":null,"year":null,"authors":[]}"#;
        assert!(record_from_json(bad).is_err());
    }

    #[test]
    fn record_lines_report_line_numbers() {
        let text = format!("{}\n\nnot json\n", record_to_json(&rec("p1", &["A"])));
        let out: Vec<_> = RecordLines::new(text.as_bytes()).collect();
        assert!(out[0].is_ok());
        match &out[1] {
            Err(FormatError::Line { line, .. }) => assert_eq!(*line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gold_json_round_trip() {
        let records = [
            rec("p1", &["Wei Li 0001"]),
            rec("p2", &["Wei Li 0002", "X"]),
        ];
        let gold = build_gold_standard(&records, 1);
        let mut buf = Vec::new();
        write_gold(&mut buf, gold.entries()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"Wei Li 0002\": [\n      \"p2\""), "{text}");
        assert_eq!(&read_gold(&buf[..]).unwrap(), gold.entries());
    }

    #[test]
    fn cluster_tsv_round_trip() {
        let records = [
            rec("p1", &["Wei Li 0001", "X"]),
            rec("p2", &["Wei Li 0001", "X"]),
            rec("p3", &["Wei Li 0002", "Y"]),
        ];
        let graph = BipartiteGraph::build(&records);
        let blocks = build_blocks(&build_gold_standard(&records, 1)).unwrap();
        let block = &blocks.blocks()[0];
        let c = cluster_block(block, &graph, 1).unwrap();
        let mut buf = Vec::new();
        write_clusters(&mut buf, [(block, &c)]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "block_key\trecord_id\tcluster_id\tgold_key\n\
             Wei Li\tp1\tp1\tWei Li 0001\n\
             Wei Li\tp2\tp1\tWei Li 0001\n\
             Wei Li\tp3\tp3\tWei Li 0002\n"
        );
        let back = read_clusters(&buf[..]).unwrap();
        assert_eq!(back["Wei Li"].len(), 3);
    }

    #[test]
    fn snapshot_round_trip_and_corruption() {
        let records = [
            rec("p1", &["A", "B"]),
            rec("p2", &["B", "C"]),
            rec("p3", &["Ü"]),
        ];
        let graph = BipartiteGraph::build(&records);
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &graph).unwrap();
        let back = read_snapshot(&buf[..]).unwrap();
        assert_eq!(back.to_parts(), graph.to_parts());

        assert!(read_snapshot(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(read_snapshot(&extra[..]).is_err());
        let mut wrong_version = buf.clone();
        wrong_version[8] = 9;
        assert!(read_snapshot(&wrong_version[..])
            .unwrap_err()
            .to_string()
            .contains("version"));
        assert!(read_snapshot(&b"garbage!"[..]).is_err());
    }
}
