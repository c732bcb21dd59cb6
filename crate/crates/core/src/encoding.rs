//! Conversions between segment sets and per-token labels, and the three
//! multi-label problem transformations (separate, concatenated, multi-output)
//! plus the single-label preference reduction.

use crate::error::{Error, Result};
use crate::model::{Activity, BioTag, Document, Label, LabelSet, Segment};
use std::fmt;
use std::str::FromStr;

/// Per-token BIO tags for one activity.
pub type BioSequence = Vec<BioTag>;

/// Activity preference used by the single-label reduction, most preferred
/// first.
pub const PREFERENCE_ORDER: [Activity; 4] = [Activity::DC, Activity::HG, Activity::EG, Activity::EE];

/// How [`labelsets_to_segments`] treats an `I` that does not continue a
/// segment of the same activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RepairPolicy {
    /// Reject the sequence.
    #[default]
    Strict,
    /// Treat the offending `I` as `B`.
    IobRepair,
}

/// A token's full multi-label state as one tuple of BIO tags in canonical
/// activity order. Rendered as `x-x-x-x`, e.g. `O-O-B-I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcatLabel(pub [BioTag; 4]);

impl ConcatLabel {
    pub const OUTSIDE: ConcatLabel = ConcatLabel([BioTag::O; 4]);

    pub fn tag(&self, a: Activity) -> BioTag {
        self.0[a.index()]
    }
}

impl From<LabelSet> for ConcatLabel {
    fn from(set: LabelSet) -> Self {
        ConcatLabel(set.tags())
    }
}

impl From<ConcatLabel> for LabelSet {
    fn from(c: ConcatLabel) -> Self {
        LabelSet::from_tags(c.0)
    }
}

impl fmt::Display for ConcatLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a}-{b}-{c}-{d}")
    }
}

impl FromStr for ConcatLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split('-').collect();
        if parts.len() != 4 {
            return Err(format!("concat label {s:?} needs four components"));
        }
        let mut tags = [BioTag::O; 4];
        for (t, p) in tags.iter_mut().zip(parts) {
            *t = p.parse()?;
        }
        Ok(ConcatLabel(tags))
    }
}

/// Label sets for a token sequence of length `len` covered by `segments`.
///
/// Segments of one activity must not overlap; the caller guarantees this
/// (validated documents do).
pub fn labelsets_from_segments<'a, I>(len: usize, segments: I) -> Vec<LabelSet>
where
    I: IntoIterator<Item = &'a Segment>,
{
    let mut out = vec![LabelSet::outside(); len];
    for s in segments {
        out[s.begin].set(s.activity, BioTag::B);
        for set in &mut out[s.begin + 1..s.end] {
            set.set(s.activity, BioTag::I);
        }
    }
    out
}

/// Label sets of a document's gold segments.
pub fn segments_to_labelsets(doc: &Document) -> Vec<LabelSet> {
    labelsets_from_segments(doc.len(), doc.gold_segments())
}

/// Recovers segments from label sets, one activity at a time: a `B` opens a
/// segment and consecutive `I`s extend it. The result is sorted canonically
/// and carries no annotator.
pub fn labelsets_to_segments(labelsets: &[LabelSet], policy: RepairPolicy) -> Result<Vec<Segment>> {
    let mut segments = Vec::new();
    for a in Activity::ALL {
        let mut open: Option<usize> = None;
        for (t, set) in labelsets.iter().enumerate() {
            match set.tag(a) {
                BioTag::B => {
                    if let Some(b) = open.replace(t) {
                        segments.push(Segment::new(a, b, t));
                    }
                }
                BioTag::I => {
                    if open.is_none() {
                        match policy {
                            RepairPolicy::Strict => return Err(Error::IllegalTransition { token: t, activity: a }),
                            RepairPolicy::IobRepair => open = Some(t),
                        }
                    }
                }
                BioTag::O => {
                    if let Some(b) = open.take() {
                        segments.push(Segment::new(a, b, t));
                    }
                }
            }
        }
        if let Some(b) = open {
            segments.push(Segment::new(a, b, labelsets.len()));
        }
    }
    segments.sort();
    Ok(segments)
}

/// Converts every dangling `I` into `B`. Returns the repaired sequence and
/// the number of tags changed.
pub fn repair_labelsets(labelsets: &[LabelSet]) -> (Vec<LabelSet>, usize) {
    let mut out = labelsets.to_vec();
    let mut repairs = 0;
    for a in Activity::ALL {
        let mut prev = BioTag::O;
        for set in &mut out {
            if set.tag(a) == BioTag::I && prev == BioTag::O {
                set.set(a, BioTag::B);
                repairs += 1;
            }
            prev = set.tag(a);
        }
    }
    (out, repairs)
}

/// Projection onto one activity; an absent typed label becomes `O`.
pub fn to_separate(labelsets: &[LabelSet], activity: Activity) -> BioSequence {
    labelsets.iter().map(|s| s.tag(activity)).collect()
}

/// Reassembles label sets from four per-activity sequences in canonical
/// order. All four must have equal length.
pub fn from_separate(sequences: &[BioSequence; 4]) -> Result<Vec<LabelSet>> {
    let len = sequences[0].len();
    if sequences.iter().any(|s| s.len() != len) {
        return Err(Error::Misaligned("per-activity sequences differ in length".into()));
    }
    Ok((0..len)
        .map(|t| LabelSet::from_tags([sequences[0][t], sequences[1][t], sequences[2][t], sequences[3][t]]))
        .collect())
}

pub fn to_concat(labelsets: &[LabelSet]) -> Vec<ConcatLabel> {
    labelsets.iter().map(|&s| ConcatLabel::from(s)).collect()
}

pub fn from_concat(labels: &[ConcatLabel]) -> Vec<LabelSet> {
    labels.iter().map(|&c| LabelSet::from(c)).collect()
}

/// Four aligned per-activity dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiOutput {
    pub dims: [BioSequence; 4],
}

impl MultiOutput {
    pub fn len(&self) -> usize {
        self.dims[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims[0].is_empty()
    }

    pub fn dim(&self, a: Activity) -> &BioSequence {
        &self.dims[a.index()]
    }

    /// The aligned record of token `t`.
    pub fn record(&self, t: usize) -> [BioTag; 4] {
        [self.dims[0][t], self.dims[1][t], self.dims[2][t], self.dims[3][t]]
    }
}

pub fn to_multioutput(labelsets: &[LabelSet]) -> MultiOutput {
    MultiOutput {
        dims: Activity::ALL.map(|a| to_separate(labelsets, a)),
    }
}

/// Gold segments that survive the preference reduction.
///
/// Segments are visited in preference order (ties by begin, then end) and
/// a segment is dropped whole if it shares a token with one already kept.
pub fn preferred_segments(doc: &Document) -> Vec<Segment> {
    let rank = |a: Activity| PREFERENCE_ORDER.iter().position(|&p| p == a).unwrap();
    let mut candidates: Vec<&Segment> = doc.gold_segments().collect();
    candidates.sort_by_key(|s| (rank(s.activity), s.begin, s.end));
    let mut kept: Vec<Segment> = Vec::new();
    for s in candidates {
        if kept.iter().all(|k| !k.overlaps(s)) {
            kept.push(s.clone());
        }
    }
    kept.sort();
    kept
}

/// Single-label sequence over the nine labels of the preference reduction.
pub fn apply_preference(doc: &Document) -> Vec<Label> {
    let mut out = vec![Label::Outside; doc.len()];
    for s in preferred_segments(doc) {
        out[s.begin] = Label::Begin(s.activity);
        for l in &mut out[s.begin + 1..s.end] {
            *l = Label::Inside(s.activity);
        }
    }
    out
}
