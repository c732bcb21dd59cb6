//! Domain types: activities, BIO tags, per-token label sets, segments,
//! documents and corpora.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

/// Epistemic activity. The declaration order is the canonical order
/// (HG, EG, EE, DC) used by every tuple encoding in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Activity {
    /// Hypothesis generation.
    HG,
    /// Evidence generation.
    EG,
    /// Evidence evaluation.
    EE,
    /// Drawing conclusions.
    DC,
}

impl Activity {
    pub const ALL: [Activity; 4] = [Activity::HG, Activity::EG, Activity::EE, Activity::DC];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Activity> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activity::HG => "HG",
            Activity::EG => "EG",
            Activity::EE => "EE",
            Activity::DC => "DC",
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "HG" => Ok(Activity::HG),
            "EG" => Ok(Activity::EG),
            "EE" => Ok(Activity::EE),
            "DC" => Ok(Activity::DC),
            other => Err(format!("unknown activity {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BioTag {
    B,
    I,
    O,
}

impl BioTag {
    pub const ALL: [BioTag; 3] = [BioTag::B, BioTag::I, BioTag::O];

    pub fn as_str(self) -> &'static str {
        match self {
            BioTag::B => "B",
            BioTag::I => "I",
            BioTag::O => "O",
        }
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BioTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "B" => Ok(BioTag::B),
            "I" => Ok(BioTag::I),
            "O" => Ok(BioTag::O),
            other => Err(format!("unknown BIO tag {other:?}")),
        }
    }
}

/// One element of the single-label universe `({B,I} x A) ∪ {O}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Outside,
    Begin(Activity),
    Inside(Activity),
}

impl Label {
    /// All nine labels: `O`, then `B-a`, `I-a` per activity in canonical order.
    pub const ALL: [Label; 9] = [
        Label::Outside,
        Label::Begin(Activity::HG),
        Label::Inside(Activity::HG),
        Label::Begin(Activity::EG),
        Label::Inside(Activity::EG),
        Label::Begin(Activity::EE),
        Label::Inside(Activity::EE),
        Label::Begin(Activity::DC),
        Label::Inside(Activity::DC),
    ];

    pub fn index(self) -> usize {
        match self {
            Label::Outside => 0,
            Label::Begin(a) => 1 + 2 * a.index(),
            Label::Inside(a) => 2 + 2 * a.index(),
        }
    }

    pub fn activity(self) -> Option<Activity> {
        match self {
            Label::Outside => None,
            Label::Begin(a) | Label::Inside(a) => Some(a),
        }
    }

    pub fn bio(self) -> BioTag {
        match self {
            Label::Outside => BioTag::O,
            Label::Begin(_) => BioTag::B,
            Label::Inside(_) => BioTag::I,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Outside => f.write_str("O"),
            Label::Begin(a) => write!(f, "B-{a}"),
            Label::Inside(a) => write!(f, "I-{a}"),
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "O" {
            return Ok(Label::Outside);
        }
        match s.split_once('-') {
            Some(("B", a)) => Ok(Label::Begin(a.parse()?)),
            Some(("I", a)) => Ok(Label::Inside(a.parse()?)),
            _ => Err(format!("unknown label {s:?}")),
        }
    }
}

/// The set of labels attached to one token.
///
/// Stored as one BIO tag per activity, so "at most one typed label per
/// activity" holds by construction and the set contains `Outside` exactly
/// when every slot is `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet {
    tags: [BioTag; 4],
}

impl Default for LabelSet {
    fn default() -> Self {
        LabelSet::outside()
    }
}

impl LabelSet {
    pub const fn outside() -> Self {
        LabelSet { tags: [BioTag::O; 4] }
    }

    pub const fn from_tags(tags: [BioTag; 4]) -> Self {
        LabelSet { tags }
    }

    /// Builds a set from explicit labels, rejecting combinations that violate
    /// the label-set invariants (empty set, `Outside` mixed with typed labels,
    /// two labels for one activity).
    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Result<Self> {
        let mut tags = [BioTag::O; 4];
        let mut saw_outside = false;
        let mut saw_any = false;
        for label in labels {
            saw_any = true;
            match label.activity() {
                None => saw_outside = true,
                Some(a) => {
                    if tags[a.index()] != BioTag::O && tags[a.index()] != label.bio() {
                        return Err(Error::InvalidLabelSet(format!("both B-{a} and I-{a} on one token")));
                    }
                    tags[a.index()] = label.bio();
                }
            }
        }
        if !saw_any {
            return Err(Error::InvalidLabelSet("empty label set".into()));
        }
        if saw_outside && tags.iter().any(|&t| t != BioTag::O) {
            return Err(Error::InvalidLabelSet("O together with a typed label".into()));
        }
        Ok(LabelSet { tags })
    }

    pub fn tags(&self) -> [BioTag; 4] {
        self.tags
    }

    pub fn tag(&self, activity: Activity) -> BioTag {
        self.tags[activity.index()]
    }

    pub fn set(&mut self, activity: Activity, tag: BioTag) {
        self.tags[activity.index()] = tag;
    }

    pub fn is_outside(&self) -> bool {
        self.tags.iter().all(|&t| t == BioTag::O)
    }

    /// Number of typed labels (0 for the `{O}` set).
    pub fn typed_count(&self) -> usize {
        self.tags.iter().filter(|&&t| t != BioTag::O).count()
    }

    pub fn contains(&self, label: Label) -> bool {
        match label.activity() {
            None => self.is_outside(),
            Some(a) => self.tag(a) == label.bio(),
        }
    }

    /// The labels of this set in canonical order; `[Outside]` when no
    /// activity is present.
    pub fn labels(&self) -> Vec<Label> {
        if self.is_outside() {
            return vec![Label::Outside];
        }
        Activity::ALL
            .iter()
            .filter_map(|&a| match self.tag(a) {
                BioTag::B => Some(Label::Begin(a)),
                BioTag::I => Some(Label::Inside(a)),
                BioTag::O => None,
            })
            .collect()
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", labels.join(","))
    }
}

impl From<Label> for LabelSet {
    fn from(label: Label) -> Self {
        let mut set = LabelSet::outside();
        if let Some(a) = label.activity() {
            set.set(a, label.bio());
        }
        set
    }
}

/// A typed span over token indices, `begin` inclusive and `end` exclusive.
///
/// Field order gives the canonical sort `(begin, end, activity, annotator)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub begin: usize,
    pub end: usize,
    pub activity: Activity,
    pub annotator: Option<String>,
}

impl Segment {
    pub fn new(activity: Activity, begin: usize, end: usize) -> Self {
        Segment {
            begin,
            end,
            activity,
            annotator: None,
        }
    }

    pub fn by(mut self, annotator: impl Into<String>) -> Self {
        self.annotator = Some(annotator.into());
        self
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.begin)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.begin
    }

    /// Number of token positions shared with `other`.
    pub fn intersection_len(&self, other: &Segment) -> usize {
        self.end.min(other.end).saturating_sub(self.begin.max(other.begin))
    }

    pub fn overlaps(&self, other: &Segment) -> bool {
        self.intersection_len(other) > 0
    }

    /// The `(begin, end, activity)` identity used for exact-boundary matching.
    pub fn span_key(&self) -> (usize, usize, Activity) {
        (self.begin, self.end, self.activity)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{})", self.activity, self.begin, self.end)?;
        if let Some(a) = &self.annotator {
            write!(f, "@{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Medicine,
    Teaching,
    Other(String),
}

impl Domain {
    pub fn as_str(&self) -> &str {
        match self {
            Domain::Medicine => "MeD",
            Domain::Teaching => "TeD",
            Domain::Other(s) => s,
        }
    }
}

impl From<&str> for Domain {
    fn from(s: &str) -> Self {
        match s {
            "MeD" => Domain::Medicine,
            "TeD" => Domain::Teaching,
            other => Domain::Other(other.to_string()),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub domain: Domain,
    pub case_id: String,
    pub tokens: Vec<String>,
    /// Gold segments (annotator `None`) and per-annotator segments, kept in
    /// canonical order.
    pub segments: Vec<Segment>,
    /// Unknown record fields, carried through serialization untouched.
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl Document {
    pub fn new<S: Into<String>>(doc_id: impl Into<String>, tokens: impl IntoIterator<Item = S>) -> Self {
        Document {
            doc_id: doc_id.into(),
            domain: Domain::Other(String::new()),
            case_id: String::new(),
            tokens: tokens.into_iter().map(Into::into).collect(),
            segments: Vec::new(),
            extra: serde_json::Map::new(),
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_case(mut self, case_id: impl Into<String>) -> Self {
        self.case_id = case_id.into();
        self
    }

    pub fn with_segment(mut self, segment: Segment) -> Self {
        self.segments.push(segment);
        self.segments.sort();
        self
    }

    pub fn with_segments<I: IntoIterator<Item = Segment>>(mut self, segments: I) -> Self {
        self.segments.extend(segments);
        self.segments.sort();
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Segments without an annotator id.
    pub fn gold_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.annotator.is_none())
    }

    pub fn annotators(&self) -> BTreeSet<&str> {
        self.segments.iter().filter_map(|s| s.annotator.as_deref()).collect()
    }

    pub fn segments_by(&self, annotator: &str) -> impl Iterator<Item = &Segment> + '_ {
        let annotator = annotator.to_string();
        self.segments
            .iter()
            .filter(move |s| s.annotator.as_deref() == Some(annotator.as_str()))
    }

    /// Checks range, non-emptiness and same-activity overlap per annotator.
    pub fn validate(&self) -> Result<()> {
        for s in &self.segments {
            if s.is_empty() {
                return Err(Error::EmptySegment {
                    doc_id: self.doc_id.clone(),
                    segment: s.clone(),
                });
            }
            if s.end > self.tokens.len() {
                return Err(Error::SegmentOutOfRange {
                    doc_id: self.doc_id.clone(),
                    segment: s.clone(),
                    len: self.tokens.len(),
                });
            }
        }
        let mut groups: BTreeMap<(Option<&str>, Activity), Vec<&Segment>> = BTreeMap::new();
        for s in &self.segments {
            groups.entry((s.annotator.as_deref(), s.activity)).or_default().push(s);
        }
        for ((_, activity), mut group) in groups {
            group.sort();
            for pair in group.windows(2) {
                if pair[1].begin < pair[0].end {
                    return Err(Error::SameActivityOverlap {
                        doc_id: self.doc_id.clone(),
                        activity,
                        first: pair[0].clone(),
                        second: pair[1].clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

pub type SplitMap = BTreeMap<String, Split>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub split: Option<SplitMap>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Corpus { documents, split: None }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    /// Validates every document and doc_id uniqueness.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, d) in self.documents.iter().enumerate() {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(Error::DuplicateDocId {
                    line: i + 1,
                    doc_id: d.doc_id.clone(),
                });
            }
            d.validate()?;
        }
        if let Some(split) = &self.split {
            check_split_covers(self, split)?;
        }
        Ok(())
    }

    /// Attaches a split map after checking that it covers every document
    /// exactly once.
    pub fn with_split(mut self, split: SplitMap) -> Result<Self> {
        check_split_covers(&self, &split)?;
        self.split = Some(split);
        Ok(self)
    }

    /// The documents assigned to `part`, in corpus order.
    pub fn part(&self, part: Split) -> Result<Vec<&Document>> {
        let split = self
            .split
            .as_ref()
            .ok_or_else(|| Error::MissingSplit("corpus has no split".into()))?;
        Ok(self
            .documents
            .iter()
            .filter(|d| split.get(&d.doc_id) == Some(&part))
            .collect())
    }
}

fn check_split_covers(corpus: &Corpus, split: &SplitMap) -> Result<()> {
    for d in &corpus.documents {
        if !split.contains_key(&d.doc_id) {
            return Err(Error::MissingSplit(format!("{} has no split", d.doc_id)));
        }
    }
    if split.len() != corpus.documents.len() {
        return Err(Error::MissingSplit(
            "split names documents that are not in the corpus".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_indices_cover_universe() {
        for (i, l) in Label::ALL.iter().enumerate() {
            assert_eq!(l.index(), i);
            assert_eq!(l.to_string().parse::<Label>().unwrap(), *l);
        }
    }

    #[test]
    fn label_set_rejects_invalid_combinations() {
        assert!(LabelSet::from_labels([]).is_err());
        assert!(LabelSet::from_labels([Label::Outside, Label::Begin(Activity::EE)]).is_err());
        assert!(LabelSet::from_labels([Label::Begin(Activity::EE), Label::Inside(Activity::EE)]).is_err());
        let s = LabelSet::from_labels([Label::Begin(Activity::EE), Label::Inside(Activity::DC)]).unwrap();
        assert_eq!(s.typed_count(), 2);
        assert!(!s.contains(Label::Outside));
        assert_eq!(s.to_string(), "{B-EE,I-DC}");
        assert_eq!(LabelSet::outside().labels(), vec![Label::Outside]);
    }

    #[test]
    fn segment_order_is_begin_end_activity_annotator() {
        let mut v = [
            Segment::new(Activity::DC, 0, 3).by("b"),
            Segment::new(Activity::EE, 0, 3),
            Segment::new(Activity::DC, 0, 3).by("a"),
            Segment::new(Activity::HG, 0, 2),
        ];
        v.sort();
        let shown: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, ["HG[0,2)", "EE[0,3)", "DC[0,3)@a", "DC[0,3)@b"]);
    }

    #[test]
    fn validate_catches_range_and_overlap() {
        let d = Document::new("d", ["a", "b"]).with_segment(Segment::new(Activity::EE, 0, 3));
        assert!(matches!(d.validate(), Err(Error::SegmentOutOfRange { .. })));

        let d = Document::new("d", ["a", "b", "c"])
            .with_segment(Segment::new(Activity::EE, 0, 2).by("x"))
            .with_segment(Segment::new(Activity::EE, 1, 3).by("x"));
        assert!(matches!(d.validate(), Err(Error::SameActivityOverlap { .. })));

        // different annotators or activities may overlap
        let d = Document::new("d", ["a", "b", "c"])
            .with_segment(Segment::new(Activity::EE, 0, 2).by("x"))
            .with_segment(Segment::new(Activity::EE, 1, 3).by("y"))
            .with_segment(Segment::new(Activity::DC, 1, 3).by("x"));
        assert!(d.validate().is_ok());
    }
}
