//! Train/dev/test splitting stratified by case scenario.

use crate::error::{Error, Result};
use crate::model::{Corpus, Split, SplitMap};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Default proportions for train, dev and test.
pub const DEFAULT_RATIOS: [f64; 3] = [0.6, 0.2, 0.2];

/// Splits `n` items into parts proportional to `ratios` using
/// largest-remainder rounding. Ties between equal remainders go to the
/// earlier part.
pub fn largest_remainder(n: usize, ratios: [f64; 3]) -> [usize; 3] {
    let quotas: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    // nudge values like 5.999999999 up before flooring
    let mut counts: [usize; 3] = [0; 3];
    for (c, q) in counts.iter_mut().zip(&quotas) {
        *c = (q + 1e-9).floor() as usize;
    }
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Assigns every document to train, dev or test.
///
/// Documents are grouped by `case_id`; each group is sorted by `doc_id`,
/// shuffled with a ChaCha8 generator seeded from `seed`, and cut according
/// to [`largest_remainder`].
pub fn stratified_split(corpus: &Corpus, ratios: [f64; 3], seed: u64) -> Result<SplitMap> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if ratios.iter().any(|&r| r < 0.0 || !r.is_finite()) {
        return Err(Error::InvalidRatios(format!("{ratios:?} contains a negative value")));
    }
    let total: f64 = ratios.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidRatios(format!("{ratios:?} sums to {total}")));
    }

    let mut groups: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for d in &corpus.documents {
        if d.case_id.is_empty() {
            return Err(Error::MissingCaseId(d.doc_id.clone()));
        }
        groups.entry(&d.case_id).or_default().push(&d.doc_id);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = SplitMap::new();
    for (_, mut ids) in groups {
        ids.sort_unstable();
        ids.shuffle(&mut rng);
        let counts = largest_remainder(ids.len(), ratios);
        let mut it = ids.into_iter();
        for (part, count) in Split::ALL.into_iter().zip(counts) {
            for id in it.by_ref().take(count) {
                split.insert(id.to_string(), part);
            }
        }
    }
    Ok(split)
}
