use super::ActivitySet;
use crate::error::{Error, Result};
use crate::model::LabelSet;
use std::fmt::Write;

/// Token counts of gold activity set (rows) against predicted activity set
/// (columns), laid out in [`ActivitySet::all`] order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[u64; 16]; 16],
}

impl ConfusionMatrix {
    pub fn from_sets(gold: &[ActivitySet], pred: &[ActivitySet]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::Misaligned(format!(
                "gold has {} tokens, prediction has {}",
                gold.len(),
                pred.len()
            )));
        }
        let mut m = ConfusionMatrix::default();
        for (g, p) in gold.iter().zip(pred) {
            m.counts[g.position()][p.position()] += 1;
        }
        Ok(m)
    }

    pub fn from_labelsets(gold: &[LabelSet], pred: &[LabelSet]) -> Result<Self> {
        let g: Vec<ActivitySet> = gold.iter().map(|&s| s.into()).collect();
        let p: Vec<ActivitySet> = pred.iter().map(|&s| s.into()).collect();
        Self::from_sets(&g, &p)
    }

    pub fn count(&self, gold: ActivitySet, pred: ActivitySet) -> u64 {
        self.counts[gold.position()][pred.position()]
    }

    pub fn row_total(&self, gold: ActivitySet) -> u64 {
        self.counts[gold.position()].iter().sum()
    }

    pub fn column_total(&self, pred: ActivitySet) -> u64 {
        let j = pred.position();
        self.counts.iter().map(|row| row[j]).sum()
    }

    /// Share of the row's tokens, in percent; `None` for an empty row.
    pub fn percent(&self, gold: ActivitySet, pred: ActivitySet) -> Option<f64> {
        let total = self.row_total(gold);
        (total > 0).then(|| 100.0 * self.count(gold, pred) as f64 / total as f64)
    }

    /// Adds another matrix's counts to this one.
    pub fn add(&mut self, other: &ConfusionMatrix) {
        for (row, o) in self.counts.iter_mut().zip(&other.counts) {
            for (c, x) in row.iter_mut().zip(o) {
                *c += x;
            }
        }
    }

    /// True when a set occurs neither in gold nor in the prediction.
    pub fn is_omissible(&self, set: ActivitySet) -> bool {
        self.row_total(set) == 0 && self.column_total(set) == 0
    }

    /// Row-normalized percentages as CSV. The header row and first column
    /// carry set names (`O`, `EE`, `EE-DC`, ...). Empty rows are written as
    /// zeros. With `skip_omissible`, sets absent from both gold and
    /// prediction are left out.
    pub fn to_csv(&self, skip_omissible: bool) -> String {
        self.render(skip_omissible, |m, g, p| format!("{}", m.percent(g, p).unwrap_or(0.0)))
    }

    /// Raw counts in the same layout as [`ConfusionMatrix::to_csv`].
    pub fn counts_csv(&self, skip_omissible: bool) -> String {
        self.render(skip_omissible, |m, g, p| m.count(g, p).to_string())
    }

    fn render(&self, skip_omissible: bool, cell: impl Fn(&Self, ActivitySet, ActivitySet) -> String) -> String {
        let sets: Vec<ActivitySet> = ActivitySet::all()
            .into_iter()
            .filter(|&s| !(skip_omissible && self.is_omissible(s)))
            .collect();
        let mut out = String::from("gold\\pred");
        for s in &sets {
            write!(out, ",{s}").unwrap();
        }
        out.push('\n');
        for &g in &sets {
            out.push_str(&g.name());
            for &p in &sets {
                write!(out, ",{}", cell(self, g, p)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}
