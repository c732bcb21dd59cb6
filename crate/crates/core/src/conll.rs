//! CoNLL-style tabular export.
//!
//! Each document starts with a `# doc_id = <id>` comment, followed by one
//! line per token with TAB-separated columns
//! `token HG EG EE DC concat pref`, and ends with a blank line.

use crate::encoding::{
    apply_preference, labelsets_to_segments, segments_to_labelsets, to_concat, ConcatLabel, RepairPolicy,
};
use crate::error::{Error, Result};
use crate::model::{Activity, BioTag, Corpus, Document, Label, LabelSet};
use std::fmt::Write;

pub const DOC_ID_PREFIX: &str = "# doc_id = ";

/// Renders one document. Tokens containing a tab or line break, or empty
/// tokens, cannot be represented and are rejected.
pub fn document_to_conll(doc: &Document) -> Result<String> {
    let sets = segments_to_labelsets(doc);
    let concat = to_concat(&sets);
    let pref = apply_preference(doc);
    let mut out = String::new();
    writeln!(out, "{DOC_ID_PREFIX}{}", doc.doc_id).unwrap();
    for (t, token) in doc.tokens.iter().enumerate() {
        if token.is_empty() || token.contains(['\t', '\n', '\r']) {
            return Err(Error::Conll {
                line: 0,
                message: format!("document {}: token {t} cannot be written as a column", doc.doc_id),
            });
        }
        let [hg, eg, ee, dc] = sets[t].tags();
        writeln!(out, "{token}\t{hg}\t{eg}\t{ee}\t{dc}\t{}\t{}", concat[t], pref[t]).unwrap();
    }
    out.push('\n');
    Ok(out)
}

pub fn corpus_to_conll(corpus: &Corpus) -> Result<String> {
    let mut out = String::new();
    for d in &corpus.documents {
        out.push_str(&document_to_conll(d)?);
    }
    Ok(out)
}

/// One document read back from the tabular form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConllDocument {
    pub doc_id: String,
    pub tokens: Vec<String>,
    pub labelsets: Vec<LabelSet>,
}

impl ConllDocument {
    /// A document whose gold segments are decoded from the label columns.
    pub fn into_document(self) -> Result<Document> {
        let segments = labelsets_to_segments(&self.labelsets, RepairPolicy::Strict)?;
        let doc = Document::new(self.doc_id, self.tokens).with_segments(segments);
        doc.validate()?;
        Ok(doc)
    }
}

/// Parses the tabular form. The per-activity columns are authoritative; the
/// concat column must agree with them and the preference column must be a
/// well-formed label.
pub fn parse_conll(text: &str) -> Result<Vec<ConllDocument>> {
    let mut docs = Vec::new();
    let mut current: Option<ConllDocument> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Conll { line: line_no, message };
        if let Some(id) = line.strip_prefix(DOC_ID_PREFIX) {
            if let Some(d) = current.take() {
                docs.push(d);
            }
            current = Some(ConllDocument {
                doc_id: id.to_string(),
                tokens: Vec::new(),
                labelsets: Vec::new(),
            });
            continue;
        }
        if line.is_empty() {
            if let Some(d) = current.take() {
                docs.push(d);
            }
            continue;
        }
        let doc = current
            .as_mut()
            .ok_or_else(|| err("token line before any doc_id comment".into()))?;
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 7 {
            return Err(err(format!("expected 7 columns, found {}", cols.len())));
        }
        let mut tags = [BioTag::O; 4];
        for (k, a) in Activity::ALL.iter().enumerate() {
            tags[k] = cols[1 + k].parse().map_err(|e| err(format!("{a} column: {e}")))?;
        }
        let concat: ConcatLabel = cols[5].parse().map_err(err)?;
        if concat.0 != tags {
            return Err(err(format!("concat column {concat} disagrees with activity columns")));
        }
        cols[6].parse::<Label>().map_err(err)?;
        doc.tokens.push(cols[0].to_string());
        doc.labelsets.push(LabelSet::from_tags(tags));
    }
    if let Some(d) = current.take() {
        docs.push(d);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Segment;

    fn doc() -> Document {
        Document::new("d1", ["we", "think", "so", "."])
            .with_segments([Segment::new(Activity::EE, 0, 3), Segment::new(Activity::DC, 1, 3)])
    }

    #[test]
    fn export_layout() {
        let text = document_to_conll(&doc()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# doc_id = d1");
        assert_eq!(lines[1], "we\tO\tO\tB\tO\tO-O-B-O\tO");
        assert_eq!(lines[2], "think\tO\tO\tI\tB\tO-O-I-B\tB-DC");
        assert_eq!(lines[4], ".\tO\tO\tO\tO\tO-O-O-O\tO");
        assert!(text.ends_with("\n\n"));
    }

    #[test]
    fn parse_recovers_segments() {
        let c = Corpus::new(vec![doc(), Document::new("d2", ["x"])]);
        let text = corpus_to_conll(&c).unwrap();
        let back = parse_conll(&text).unwrap();
        assert_eq!(back.len(), 2);
        let d = back[0].clone().into_document().unwrap();
        assert_eq!(d.segments, doc().segments);
        assert_eq!(d.tokens, doc().tokens);
    }

    #[test]
    fn rejects_inconsistent_columns() {
        let bad = "# doc_id = x\nw\tO\tO\tB\tO\tO-O-O-O\tO\n";
        assert!(matches!(parse_conll(bad), Err(Error::Conll { line: 2, .. })));
        let bad = "w\tO\tO\tB\tO\tO-O-B-O\tO\n";
        assert!(parse_conll(bad).is_err());
        let tab = Document::new("t", ["a\tb"]);
        assert!(document_to_conll(&tab).is_err());
    }
}
