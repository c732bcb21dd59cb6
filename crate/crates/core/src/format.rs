//! JSON-lines corpus format.
//!
//! One document per line:
//!
//! ```text
//! {"doc_id": "..", "domain": "MeD", "case_id": "..", "tokens": [..],
//!  "annotations": [{"annotator": null, "activity": "EE", "begin": 0, "end": 2}]}
//! ```
//!
//! Canonical serialization writes the keys in that order, followed by any
//! unknown keys the record carried, with annotations sorted by
//! `(begin, end, activity, annotator)`.

use crate::error::{Error, Result};
use crate::model::{Activity, Corpus, Document, Domain, Segment, SplitMap};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

#[derive(Deserialize)]
struct RawDocument {
    doc_id: String,
    #[serde(default)]
    domain: String,
    #[serde(default)]
    case_id: String,
    tokens: Vec<String>,
    #[serde(default)]
    annotations: Vec<RawAnnotation>,
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Deserialize, Serialize)]
struct RawAnnotation {
    #[serde(default)]
    annotator: Option<String>,
    activity: Activity,
    begin: usize,
    end: usize,
}

#[derive(Serialize)]
struct OutDocument<'a> {
    doc_id: &'a str,
    domain: &'a str,
    case_id: &'a str,
    tokens: &'a [String],
    annotations: Vec<RawAnnotation>,
    #[serde(flatten)]
    extra: &'a serde_json::Map<String, serde_json::Value>,
}

/// Parses and validates one corpus. Blank lines are skipped; line numbers in
/// errors are 1-based physical lines.
pub fn parse_corpus(text: &str) -> Result<Corpus> {
    let mut documents = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_document(line).map_err(|e| match e {
            Error::Json(j) => Error::Parse {
                line: line_no,
                message: j.to_string(),
            },
            other => Error::AtLine {
                line: line_no,
                source: Box::new(other),
            },
        })?;
        if !seen.insert(doc.doc_id.clone()) {
            return Err(Error::DuplicateDocId {
                line: line_no,
                doc_id: doc.doc_id,
            });
        }
        documents.push(doc);
    }
    Ok(Corpus::new(documents))
}

/// Parses a single JSON record into a validated document.
pub fn parse_document(line: &str) -> Result<Document> {
    let raw: RawDocument = serde_json::from_str(line)?;
    let mut segments: Vec<Segment> = raw
        .annotations
        .into_iter()
        .map(|a| Segment {
            begin: a.begin,
            end: a.end,
            activity: a.activity,
            annotator: a.annotator,
        })
        .collect();
    segments.sort();
    let doc = Document {
        doc_id: raw.doc_id,
        domain: Domain::from(raw.domain.as_str()),
        case_id: raw.case_id,
        tokens: raw.tokens,
        segments,
        extra: raw.extra,
    };
    doc.validate()?;
    Ok(doc)
}

pub fn serialize_document(doc: &Document) -> String {
    let mut segments = doc.segments.clone();
    segments.sort();
    let out = OutDocument {
        doc_id: &doc.doc_id,
        domain: doc.domain.as_str(),
        case_id: &doc.case_id,
        tokens: &doc.tokens,
        annotations: segments
            .into_iter()
            .map(|s| RawAnnotation {
                annotator: s.annotator,
                activity: s.activity,
                begin: s.begin,
                end: s.end,
            })
            .collect(),
        extra: &doc.extra,
    };
    serde_json::to_string(&out).expect("document serialization cannot fail")
}

/// Canonical serialization: one line per document, each terminated by `\n`.
pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for d in &corpus.documents {
        out.push_str(&serialize_document(d));
        out.push('\n');
    }
    out
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text)
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_corpus(corpus)).map_err(|e| Error::io(path, e))
}

pub fn read_split(path: impl AsRef<Path>) -> Result<SplitMap> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_split(path: impl AsRef<Path>, split: &SplitMap) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(split)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
