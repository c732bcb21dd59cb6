//! Gold standard creation by exact-boundary majority voting.

use crate::error::{Error, Result};
use crate::model::{Activity, Corpus, Document, Segment};
use serde::Serialize;
use std::collections::BTreeMap;

/// A candidate segment that did not reach the voting threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UndecidedSegment {
    pub doc_id: String,
    pub activity: Activity,
    pub begin: usize,
    pub end: usize,
    /// Number of annotators who marked exactly this span and activity.
    pub support: usize,
    pub annotators: Vec<String>,
}

impl UndecidedSegment {
    pub fn segment(&self) -> Segment {
        Segment::new(self.activity, self.begin, self.end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldResult {
    pub doc_id: String,
    /// Accepted segments, annotator `None`, canonical order.
    pub gold: Vec<Segment>,
    pub undecided: Vec<UndecidedSegment>,
}

/// Votes on one document.
///
/// `annotations` maps each of the `n` annotators to their segments (an
/// annotator who marked nothing maps to an empty list). A `(begin, end,
/// activity)` triple is gold when at least `k` annotators marked it; every
/// other triple goes to the undecided list with its support.
pub fn majority_gold_document(
    doc_id: &str,
    annotations: &BTreeMap<String, Vec<Segment>>,
    k: usize,
    n: usize,
) -> Result<GoldResult> {
    if k == 0 || k > n {
        return Err(Error::InvalidThreshold { k, n });
    }
    if annotations.len() != n {
        return Err(Error::AnnotatorCount {
            doc_id: doc_id.to_string(),
            expected: n,
            found: annotations.len(),
        });
    }
    let mut votes: BTreeMap<(usize, usize, Activity), Vec<String>> = BTreeMap::new();
    for (annotator, segments) in annotations {
        for s in segments {
            let voters = votes.entry(s.span_key()).or_default();
            if !voters.contains(annotator) {
                voters.push(annotator.clone());
            }
        }
    }

    let mut gold = Vec::new();
    let mut undecided = Vec::new();
    for ((begin, end, activity), voters) in votes {
        if voters.len() >= k {
            gold.push(Segment::new(activity, begin, end));
        } else {
            undecided.push(UndecidedSegment {
                doc_id: doc_id.to_string(),
                activity,
                begin,
                end,
                support: voters.len(),
                annotators: voters,
            });
        }
    }
    gold.sort();
    for a in Activity::ALL {
        let same: Vec<&Segment> = gold.iter().filter(|s| s.activity == a).collect();
        if same.windows(2).any(|w| w[1].begin < w[0].end) {
            return Err(Error::ConflictingGold {
                doc_id: doc_id.to_string(),
                activity: a,
            });
        }
    }
    Ok(GoldResult {
        doc_id: doc_id.to_string(),
        gold,
        undecided,
    })
}

/// Gold corpus plus everything voting could not decide.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldCorpus {
    pub corpus: Corpus,
    pub undecided: Vec<UndecidedSegment>,
}

/// Votes on every document of a multi-annotator corpus.
///
/// The output documents keep tokens and metadata and carry only the
/// accepted segments.
pub fn majority_gold(corpus: &Corpus, annotators: &[String], k: usize) -> Result<GoldCorpus> {
    let n = annotators.len();
    let mut documents = Vec::new();
    let mut undecided = Vec::new();
    for doc in &corpus.documents {
        let mut per: BTreeMap<String, Vec<Segment>> = annotators.iter().map(|a| (a.clone(), Vec::new())).collect();
        for s in &doc.segments {
            if let Some(a) = &s.annotator {
                match per.get_mut(a) {
                    Some(list) => list.push(s.clone()),
                    None => {
                        let extra = doc
                            .annotators()
                            .into_iter()
                            .filter(|x| !annotators.iter().any(|a| a == x))
                            .count();
                        return Err(Error::AnnotatorCount {
                            doc_id: doc.doc_id.clone(),
                            expected: n,
                            found: n + extra,
                        });
                    }
                }
            }
        }
        let result = majority_gold_document(&doc.doc_id, &per, k, n)?;
        documents.push(Document {
            segments: result.gold,
            ..doc.clone()
        });
        undecided.extend(result.undecided);
    }
    Ok(GoldCorpus {
        corpus: Corpus::new(documents),
        undecided,
    })
}

/// Adds externally resolved segments to a gold corpus. Resolved documents
/// are matched by `doc_id`; their gold segments are merged in and the
/// result is validated.
pub fn apply_resolutions(gold: &mut Corpus, resolved: &Corpus) -> Result<()> {
    for r in &resolved.documents {
        let doc = gold
            .documents
            .iter_mut()
            .find(|d| d.doc_id == r.doc_id)
            .ok_or_else(|| Error::Misaligned(format!("resolved document {} is not in the gold corpus", r.doc_id)))?;
        for s in r.gold_segments() {
            if !doc.segments.contains(s) {
                doc.segments.push(s.clone());
            }
        }
        doc.segments.sort();
        doc.validate()?;
    }
    Ok(())
}
