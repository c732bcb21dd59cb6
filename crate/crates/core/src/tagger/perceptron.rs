//! One sequence-labelling task: a label inventory, BIO-constrained Viterbi
//! decoding and averaged perceptron updates.
//!
//! Every inventory entry is a [`LabelSet`], so one legality rule covers all
//! strategies: an `I` in some activity slot may only follow a `B` or `I` in
//! the same slot.

use crate::model::{Activity, BioTag, LabelSet};

pub(crate) fn legal(prev: Option<LabelSet>, cur: LabelSet) -> bool {
    Activity::ALL
        .iter()
        .all(|&a| cur.tag(a) != BioTag::I || prev.is_some_and(|p| p.tag(a) != BioTag::O))
}

/// `(L + 1) x L` legality mask; row `L` is the start state.
pub(crate) fn legality_mask(labels: &[LabelSet]) -> Vec<bool> {
    let l = labels.len();
    let mut mask = Vec::with_capacity((l + 1) * l);
    for prev in labels.iter().map(|&p| Some(p)).chain([None]) {
        for &cur in labels {
            mask.push(legal(prev, cur));
        }
    }
    mask
}

/// Best label path. `emission[t * L + y]` scores label `y` at token `t`,
/// `transition(prev, y)` is `None` for forbidden moves; `prev == L` is the
/// start. Ties go to the lower label index.
pub(crate) fn viterbi(l: usize, emission: &[f64], transition: impl Fn(usize, usize) -> Option<f64>) -> Vec<usize> {
    let n = emission.len() / l;
    if n == 0 {
        return Vec::new();
    }
    let mut score = vec![f64::NEG_INFINITY; n * l];
    let mut back = vec![0usize; n * l];
    for y in 0..l {
        if let Some(tr) = transition(l, y) {
            score[y] = tr + emission[y];
        }
    }
    for t in 1..n {
        for y in 0..l {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for p in 0..l {
                let prev = score[(t - 1) * l + p];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                if let Some(tr) = transition(p, y) {
                    if prev + tr > best {
                        best = prev + tr;
                        arg = p;
                    }
                }
            }
            if best > f64::NEG_INFINITY {
                score[t * l + y] = best + emission[t * l + y];
                back[t * l + y] = arg;
            }
        }
    }
    let last = &score[(n - 1) * l..];
    let mut y = 0;
    for k in 1..l {
        if last[k] > last[y] {
            y = k;
        }
    }
    let mut path = vec![0; n];
    for t in (0..n).rev() {
        path[t] = y;
        y = back[t * l + y];
    }
    path
}

/// Trained weights of one task.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TaskModel {
    pub labels: Vec<LabelSet>,
    /// `features x L`.
    pub emissions: Vec<f64>,
    /// `(L + 1) x L`, `None` where the move is illegal.
    pub transitions: Vec<Option<f64>>,
}

impl TaskModel {
    pub fn decode(&self, features: &[Vec<u32>]) -> Vec<usize> {
        let l = self.labels.len();
        let mut emission = vec![0.0; features.len() * l];
        for (t, feats) in features.iter().enumerate() {
            let row = &mut emission[t * l..(t + 1) * l];
            for &f in feats {
                let w = &self.emissions[f as usize * l..(f as usize + 1) * l];
                for (r, x) in row.iter_mut().zip(w) {
                    *r += x;
                }
            }
        }
        viterbi(l, &emission, |p, y| self.transitions[p * l + y])
    }
}

/// Integer perceptron state with lazily accumulated averages.
#[derive(Debug, Clone)]
pub(crate) struct TaskTrainer {
    labels: Vec<LabelSet>,
    mask: Vec<bool>,
    w: Vec<i64>,
    acc: Vec<i64>,
    tw: Vec<i64>,
    tacc: Vec<i64>,
    /// Number of sequences seen plus one.
    c: i64,
}

impl TaskTrainer {
    pub fn new(labels: Vec<LabelSet>, features: usize) -> Self {
        let l = labels.len();
        TaskTrainer {
            mask: legality_mask(&labels),
            labels,
            w: vec![0; features * l],
            acc: vec![0; features * l],
            tw: vec![0; (l + 1) * l],
            tacc: vec![0; (l + 1) * l],
            c: 1,
        }
    }

    fn current(&self) -> TaskModel {
        TaskModel {
            labels: self.labels.clone(),
            emissions: self.w.iter().map(|&x| x as f64).collect(),
            transitions: self.transitions(|i| self.tw[i] as f64),
        }
    }

    fn transitions(&self, value: impl Fn(usize) -> f64) -> Vec<Option<f64>> {
        self.mask
            .iter()
            .enumerate()
            .map(|(i, &ok)| ok.then(|| value(i)))
            .collect()
    }

    /// Decodes with the current weights and updates towards `gold`.
    /// Returns the number of mislabelled tokens.
    pub fn step(&mut self, features: &[Vec<u32>], gold: &[usize]) -> usize {
        let l = self.labels.len();
        let pred = self.current_decode(features);
        let mistakes = pred.iter().zip(gold).filter(|(p, g)| p != g).count();
        if mistakes > 0 {
            let c = self.c;
            for t in 0..gold.len() {
                let (g, p) = (gold[t], pred[t]);
                if g != p {
                    for &f in &features[t] {
                        let f = f as usize;
                        self.w[f * l + g] += 1;
                        self.acc[f * l + g] += c;
                        self.w[f * l + p] -= 1;
                        self.acc[f * l + p] -= c;
                    }
                }
                let gp = if t == 0 { l } else { gold[t - 1] };
                let pp = if t == 0 { l } else { pred[t - 1] };
                if (gp, g) != (pp, p) {
                    self.tw[gp * l + g] += 1;
                    self.tacc[gp * l + g] += c;
                    self.tw[pp * l + p] -= 1;
                    self.tacc[pp * l + p] -= c;
                }
            }
        }
        self.c += 1;
        mistakes
    }

    fn current_decode(&self, features: &[Vec<u32>]) -> Vec<usize> {
        let l = self.labels.len();
        let mut emission = vec![0.0; features.len() * l];
        for (t, feats) in features.iter().enumerate() {
            for &f in feats {
                let f = f as usize;
                for y in 0..l {
                    emission[t * l + y] += self.w[f * l + y] as f64;
                }
            }
        }
        viterbi(l, &emission, |p, y| {
            self.mask[p * l + y].then(|| self.tw[p * l + y] as f64)
        })
    }

    /// Snapshot of the weights, averaged over all updates so far or raw.
    pub fn snapshot(&self, averaged: bool) -> TaskModel {
        if !averaged {
            return self.current();
        }
        let c = self.c as f64;
        let avg = |w: i64, acc: i64| w as f64 - acc as f64 / c;
        TaskModel {
            labels: self.labels.clone(),
            emissions: self.w.iter().zip(&self.acc).map(|(&w, &a)| avg(w, a)).collect(),
            transitions: self.transitions(|i| avg(self.tw[i], self.tacc[i])),
        }
    }
}
