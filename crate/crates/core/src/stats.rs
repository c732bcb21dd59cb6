//! Descriptive corpus statistics: segment counts, average counts and
//! lengths per activity, and overlap counts per activity pair.

use crate::error::{Error, Result};
use crate::model::{Activity, Corpus, Segment};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityStats {
    pub activity: Activity,
    pub count: usize,
    /// `count / number of documents`.
    pub avg_count: f64,
    /// Mean segment length in tokens; `None` when `count == 0`.
    pub avg_len: Option<f64>,
    pub total_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapStats {
    pub pair: (Activity, Activity),
    pub count: usize,
    /// Mean size of the token intersection; `None` when `count == 0`.
    pub avg_len: Option<f64>,
    pub total_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsTable {
    pub documents: usize,
    pub activities: Vec<ActivityStats>,
    /// One entry per unordered pair, keyed with the canonically smaller
    /// activity first.
    pub overlaps: Vec<OverlapStats>,
}

impl StatsTable {
    pub fn activity(&self, a: Activity) -> &ActivityStats {
        &self.activities[a.index()]
    }

    /// Overlap statistics for an unordered pair.
    pub fn overlap(&self, a: Activity, b: Activity) -> Option<&OverlapStats> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.overlaps.iter().find(|o| o.pair == key)
    }
}

/// Computes the statistics over the gold segments (annotator `None`) of
/// every document.
pub fn corpus_stats(corpus: &Corpus) -> Result<StatsTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts = [0usize; 4];
    let mut lens = [0usize; 4];
    let mut pairs: BTreeMap<(Activity, Activity), (usize, usize)> = BTreeMap::new();
    for (i, &a) in Activity::ALL.iter().enumerate() {
        for &b in &Activity::ALL[i + 1..] {
            pairs.insert((a, b), (0, 0));
        }
    }

    for doc in &corpus.documents {
        let gold: Vec<&Segment> = doc.gold_segments().collect();
        for s in &gold {
            counts[s.activity.index()] += 1;
            lens[s.activity.index()] += s.len();
        }
        for (i, s) in gold.iter().enumerate() {
            for t in &gold[i + 1..] {
                if s.activity == t.activity {
                    continue;
                }
                let shared = s.intersection_len(t);
                if shared > 0 {
                    let key = if s.activity < t.activity {
                        (s.activity, t.activity)
                    } else {
                        (t.activity, s.activity)
                    };
                    let e = pairs.get_mut(&key).expect("all pairs present");
                    e.0 += 1;
                    e.1 += shared;
                }
            }
        }
    }

    let n_docs = corpus.len();
    let activities = Activity::ALL
        .iter()
        .map(|&a| {
            let count = counts[a.index()];
            ActivityStats {
                activity: a,
                count,
                avg_count: count as f64 / n_docs as f64,
                avg_len: (count > 0).then(|| lens[a.index()] as f64 / count as f64),
                total_len: lens[a.index()],
            }
        })
        .collect();
    let overlaps = pairs
        .into_iter()
        .map(|(pair, (count, total_len))| OverlapStats {
            pair,
            count,
            avg_len: (count > 0).then(|| total_len as f64 / count as f64),
            total_len,
        })
        .collect();
    Ok(StatsTable {
        documents: n_docs,
        activities,
        overlaps,
    })
}
