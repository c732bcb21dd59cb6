//! Token-level evaluation: hamming loss over the nine-label universe and the
//! three challenge metrics built on macro-F1.
//!
//! * `M_S(a)`: macro-F1 over `{B, I, O}` of the projections onto activity `a`.
//! * `M_A`: macro-F1 over the 16 subsets of activities, ignoring B/I.
//! * `M_O(a)`: `M_S(a)` restricted to tokens whose gold set holds at least two
//!   typed labels.
//!
//! Macro-F1 always averages over the whole class universe; a class that
//! never occurs in gold or prediction contributes an F1 of 0.

mod confusion;
mod significance;

pub use confusion::ConfusionMatrix;
pub use significance::{mann_whitney_u, normal_approximation_p, SignificanceResult, EXACT_LIMIT};

use crate::encoding::to_separate;
use crate::error::{Error, Result};
use crate::model::{Activity, BioTag, Corpus, Label, LabelSet};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;

/// A subset of activities; the empty set stands for `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActivitySet(u8);

impl ActivitySet {
    pub const EMPTY: ActivitySet = ActivitySet(0);

    pub fn from_activities<I: IntoIterator<Item = Activity>>(activities: I) -> Self {
        ActivitySet(activities.into_iter().fold(0, |m, a| m | (1 << a.index())))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, a: Activity) -> bool {
        self.0 & (1 << a.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn members(self) -> Vec<Activity> {
        Activity::ALL.into_iter().filter(|&a| self.contains(a)).collect()
    }

    /// All 16 subsets in display order: the empty set, singletons in
    /// canonical activity order, then larger sets by size and
    /// lexicographically by their canonical member sequence.
    pub fn all() -> [ActivitySet; 16] {
        let mut sets: Vec<ActivitySet> = (0u8..16).map(ActivitySet).collect();
        sets.sort_by_key(|s| {
            let idx: Vec<usize> = s.members().iter().map(|a| a.index()).collect();
            (s.len(), idx)
        });
        sets.try_into().expect("16 subsets")
    }

    /// Position of this set within [`ActivitySet::all`].
    pub fn position(self) -> usize {
        Self::all().iter().position(|&s| s == self).expect("valid subset")
    }

    /// `O` for the empty set, otherwise member names joined by `-`.
    pub fn name(self) -> String {
        if self.is_empty() {
            return "O".to_string();
        }
        self.members().iter().map(|a| a.as_str()).collect::<Vec<_>>().join("-")
    }
}

impl From<LabelSet> for ActivitySet {
    fn from(set: LabelSet) -> Self {
        ActivitySet::from_activities(Activity::ALL.into_iter().filter(|&a| set.tag(a) != BioTag::O))
    }
}

impl fmt::Display for ActivitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn check_aligned(gold: usize, pred: usize) -> Result<()> {
    if gold != pred {
        return Err(Error::Misaligned(format!(
            "gold has {gold} tokens, prediction has {pred}"
        )));
    }
    Ok(())
}

/// Average fraction of the nine label-membership decisions that differ
/// between gold and prediction. `Outside` is one of the nine labels.
pub fn hamming_loss(gold: &[LabelSet], pred: &[LabelSet]) -> Result<f64> {
    check_aligned(gold.len(), pred.len())?;
    if gold.is_empty() {
        return Ok(0.0);
    }
    let wrong: usize = gold
        .iter()
        .zip(pred)
        .map(|(g, p)| Label::ALL.iter().filter(|&&c| g.contains(c) != p.contains(c)).count())
        .sum();
    Ok(wrong as f64 / (Label::ALL.len() * gold.len()) as f64)
}

/// F1 per class of `universe`, each in `[0, 1]`. Precision, recall and F1
/// are 0 whenever their denominator is 0.
pub fn per_class_f1<T>(universe: &[T], gold: &[T], pred: &[T]) -> Result<Vec<f64>>
where
    T: Copy + Eq + Hash + fmt::Debug,
{
    check_aligned(gold.len(), pred.len())?;
    let index: HashMap<T, usize> = universe.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let lookup = |c: &T| {
        index
            .get(c)
            .copied()
            .ok_or_else(|| Error::UnknownClass(format!("{c:?}")))
    };
    let k = universe.len();
    let (mut tp, mut n_gold, mut n_pred) = (vec![0usize; k], vec![0usize; k], vec![0usize; k]);
    for (g, p) in gold.iter().zip(pred) {
        let (gi, pi) = (lookup(g)?, lookup(p)?);
        n_gold[gi] += 1;
        n_pred[pi] += 1;
        if gi == pi {
            tp[gi] += 1;
        }
    }
    Ok((0..k)
        .map(|i| {
            let precision = if n_pred[i] == 0 {
                0.0
            } else {
                tp[i] as f64 / n_pred[i] as f64
            };
            let recall = if n_gold[i] == 0 {
                0.0
            } else {
                tp[i] as f64 / n_gold[i] as f64
            };
            if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            }
        })
        .collect())
}

/// Mean per-class F1 over the whole universe, on a 0-100 scale.
pub fn macro_f1<T>(universe: &[T], gold: &[T], pred: &[T]) -> Result<f64>
where
    T: Copy + Eq + Hash + fmt::Debug,
{
    if universe.is_empty() {
        return Err(Error::UnknownClass("empty class universe".into()));
    }
    let f1 = per_class_f1(universe, gold, pred)?;
    Ok(100.0 * f1.iter().sum::<f64>() / universe.len() as f64)
}

/// Segmentation score for one activity.
pub fn m_s(gold: &[LabelSet], pred: &[LabelSet], activity: Activity) -> Result<f64> {
    check_aligned(gold.len(), pred.len())?;
    macro_f1(&BioTag::ALL, &to_separate(gold, activity), &to_separate(pred, activity))
}

/// Activity-distinction score over the power set of activities.
pub fn m_a(gold: &[LabelSet], pred: &[LabelSet]) -> Result<f64> {
    check_aligned(gold.len(), pred.len())?;
    let g: Vec<ActivitySet> = gold.iter().map(|&s| s.into()).collect();
    let p: Vec<ActivitySet> = pred.iter().map(|&s| s.into()).collect();
    macro_f1(&ActivitySet::all(), &g, &p)
}

/// Indices of tokens whose gold set holds at least two typed labels.
pub fn overlap_tokens(gold: &[LabelSet]) -> Vec<usize> {
    gold.iter()
        .enumerate()
        .filter(|(_, s)| s.typed_count() >= 2)
        .map(|(i, _)| i)
        .collect()
}

/// Overlap score for one activity; `None` when no gold token carries two
/// or more typed labels.
pub fn m_o(gold: &[LabelSet], pred: &[LabelSet], activity: Activity) -> Result<Option<f64>> {
    check_aligned(gold.len(), pred.len())?;
    let idx = overlap_tokens(gold);
    if idx.is_empty() {
        return Ok(None);
    }
    let g: Vec<LabelSet> = idx.iter().map(|&i| gold[i]).collect();
    let p: Vec<LabelSet> = idx.iter().map(|&i| pred[i]).collect();
    m_s(&g, &p, activity).map(Some)
}

/// All metrics for one gold/prediction pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub hl: f64,
    pub m_s: BTreeMap<Activity, f64>,
    pub m_a: f64,
    pub m_o: BTreeMap<Activity, Option<f64>>,
    pub tokens: usize,
    pub overlap_tokens: usize,
    #[serde(skip)]
    pub confusion: ConfusionMatrix,
}

/// Scores aligned token sequences.
pub fn evaluate(gold: &[LabelSet], pred: &[LabelSet]) -> Result<EvalReport> {
    check_aligned(gold.len(), pred.len())?;
    let mut m_s_map = BTreeMap::new();
    let mut m_o_map = BTreeMap::new();
    for a in Activity::ALL {
        m_s_map.insert(a, m_s(gold, pred, a)?);
        m_o_map.insert(a, m_o(gold, pred, a)?);
    }
    Ok(EvalReport {
        hl: hamming_loss(gold, pred)?,
        m_s: m_s_map,
        m_a: m_a(gold, pred)?,
        m_o: m_o_map,
        tokens: gold.len(),
        overlap_tokens: overlap_tokens(gold).len(),
        confusion: ConfusionMatrix::from_labelsets(gold, pred)?,
    })
}

/// Gold and predicted label sets of two corpora concatenated in the order of
/// the gold corpus. Documents are matched by `doc_id` and must have equal
/// token counts.
pub fn align_corpora(gold: &Corpus, pred: &Corpus) -> Result<(Vec<LabelSet>, Vec<LabelSet>)> {
    if gold.len() != pred.len() {
        return Err(Error::Misaligned(format!(
            "gold has {} documents, prediction has {}",
            gold.len(),
            pred.len()
        )));
    }
    let mut g = Vec::new();
    let mut p = Vec::new();
    for gd in &gold.documents {
        let pd = pred
            .get(&gd.doc_id)
            .ok_or_else(|| Error::Misaligned(format!("prediction lacks document {}", gd.doc_id)))?;
        if pd.len() != gd.len() {
            return Err(Error::Misaligned(format!(
                "document {}: gold has {} tokens, prediction has {}",
                gd.doc_id,
                gd.len(),
                pd.len()
            )));
        }
        g.extend(crate::encoding::segments_to_labelsets(gd));
        p.extend(crate::encoding::segments_to_labelsets(pd));
    }
    Ok((g, p))
}

/// [`evaluate`] over all tokens of two aligned corpora.
pub fn evaluate_corpus(gold: &Corpus, pred: &Corpus) -> Result<EvalReport> {
    let (g, p) = align_corpora(gold, pred)?;
    evaluate(&g, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Activity::*;

    fn set(labels: &[Label]) -> LabelSet {
        LabelSet::from_labels(labels.iter().copied()).unwrap()
    }

    /// Brute-force F1 for a single class straight from the definitions.
    fn f1_of<T: PartialEq>(class: &T, gold: &[T], pred: &[T]) -> f64 {
        let tp = gold
            .iter()
            .zip(pred)
            .filter(|(g, p)| *g == class && *p == class)
            .count() as f64;
        let np = pred.iter().filter(|p| *p == class).count() as f64;
        let ng = gold.iter().filter(|g| *g == class).count() as f64;
        let p = if np > 0.0 { tp / np } else { 0.0 };
        let r = if ng > 0.0 { tp / ng } else { 0.0 };
        if p + r > 0.0 {
            2.0 * p * r / (p + r)
        } else {
            0.0
        }
    }

    #[test]
    fn hamming_loss_hand_example() {
        let gold = [set(&[Label::Begin(EE)]), set(&[Label::Inside(EE)])];
        let pred = [set(&[Label::Outside]), set(&[Label::Inside(EE)])];
        let hl = hamming_loss(&gold, &pred).unwrap();
        assert!((hl - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(hamming_loss(&gold, &gold).unwrap(), 0.0);
        assert!(hamming_loss(&gold, &pred[..1]).is_err());
    }

    #[test]
    fn macro_f1_hand_example() {
        use BioTag::*;
        let gold = [B, I, O, O];
        let pred = [B, O, O, O];
        // F1(B) = 1, F1(I) = 0, F1(O): P = 2/3, R = 1 -> 0.8
        let expected = 100.0 * (f1_of(&B, &gold, &pred) + f1_of(&I, &gold, &pred) + f1_of(&O, &gold, &pred)) / 3.0;
        assert!((expected - 60.0).abs() < 1e-12);
        assert!((macro_f1(&BioTag::ALL, &gold, &pred).unwrap() - 60.0).abs() < 1e-9);
        assert_eq!(macro_f1(&BioTag::ALL, &[B, I, O], &[B, I, O]).unwrap(), 100.0);
    }

    #[test]
    fn m_s_uses_the_activity_projection() {
        let gold = [
            set(&[Label::Begin(EE)]),
            set(&[Label::Inside(EE)]),
            set(&[Label::Outside]),
            set(&[Label::Begin(DC)]),
        ];
        let pred = [
            set(&[Label::Begin(EE)]),
            set(&[Label::Outside]),
            set(&[Label::Outside]),
            set(&[Label::Outside]),
        ];
        assert!((m_s(&gold, &pred, EE).unwrap() - 60.0).abs() < 1e-9);
    }

    #[test]
    fn m_a_hand_example() {
        let gold = [set(&[Label::Begin(EE)]), set(&[Label::Inside(EE), Label::Begin(DC)])];
        let pred = [set(&[Label::Begin(EE)]), set(&[Label::Inside(EE)])];
        let g: Vec<ActivitySet> = gold.iter().map(|&s| s.into()).collect();
        let p: Vec<ActivitySet> = pred.iter().map(|&s| s.into()).collect();
        let total: f64 = ActivitySet::all().iter().map(|c| f1_of(c, &g, &p)).sum();
        let expected = 100.0 * total / 16.0;
        assert!((f1_of(&ActivitySet::from_activities([EE]), &g, &p) - 2.0 / 3.0).abs() < 1e-12);
        assert!((m_a(&gold, &pred).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 100.0 * (2.0 / 3.0) / 16.0).abs() < 1e-12);
    }

    #[test]
    fn m_a_perfect_prediction_scales_with_distinct_sets() {
        let gold = [
            set(&[Label::Begin(EE)]),
            set(&[Label::Outside]),
            set(&[Label::Begin(HG), Label::Begin(DC)]),
        ];
        assert!((m_a(&gold, &gold).unwrap() - 100.0 * 3.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn m_o_hand_example() {
        let gold = [
            set(&[Label::Begin(EE)]),
            set(&[Label::Inside(EE), Label::Begin(DC)]),
            set(&[Label::Inside(EE), Label::Inside(DC)]),
        ];
        let pred = [
            set(&[Label::Begin(EE)]),
            set(&[Label::Inside(EE)]),
            set(&[Label::Inside(EE)]),
        ];
        assert_eq!(overlap_tokens(&gold), vec![1, 2]);
        assert_eq!(m_o(&gold, &pred, DC).unwrap(), Some(0.0));
        let plain = [set(&[Label::Begin(EE)])];
        assert_eq!(m_o(&plain, &plain, EE).unwrap(), None);
    }

    #[test]
    fn activity_set_layout() {
        let names: Vec<String> = ActivitySet::all().iter().map(|s| s.name()).collect();
        assert_eq!(
            names,
            [
                "O",
                "HG",
                "EG",
                "EE",
                "DC",
                "HG-EG",
                "HG-EE",
                "HG-DC",
                "EG-EE",
                "EG-DC",
                "EE-DC",
                "HG-EG-EE",
                "HG-EG-DC",
                "HG-EE-DC",
                "EG-EE-DC",
                "HG-EG-EE-DC"
            ]
        );
        for (i, s) in ActivitySet::all().iter().enumerate() {
            assert_eq!(s.position(), i);
        }
    }

    #[test]
    fn unknown_class_is_rejected() {
        assert!(macro_f1(&[1, 2], &[1, 3], &[1, 2]).is_err());
    }
}
