//! Inter-annotator agreement for unitizing tasks (Krippendorff's `α_U`) and
//! majority-vote gold standard creation.
//!
//! The continuum is the sequence of token positions. A study over several
//! documents treats each document as a section of one continuum: units and
//! gaps never cross a section boundary, and the continuum length `L` is the
//! total token count.
//!
//! For one category `c`, every annotator's continuum splits into units
//! (tokens covered by a `c`-segment) and gaps. The observed disagreement
//! sums, over ordered pairs of distinct annotators and all pairs of their
//! sections `g`, `h`:
//!
//! * overlapping units: `(b_g - b_h)² + (e_g - e_h)²`
//! * a unit lying entirely inside the other annotator's gap: `l²` of the unit
//! * anything else: 0
//!
//! normalized by `m (m - 1) L²`. The expected disagreement pools all units
//! and gaps of all `m` annotators:
//!
//! ```text
//! D_e = 2/L · Σ_units [ (N_c - 1)/3 · (2l³ - 3l² + l) + l² · Σ_{gaps, l_h ≥ l} (l_h - l + 1) ]
//!            / ( mL (mL - 1) - Σ_units l (l - 1) )
//! ```
//!
//! with `N_c` the pooled number of units. `α_U = 1 - ΣD_o / ΣD_e`, summing
//! over the categories in scope.

mod gold;

pub use gold::{apply_resolutions, majority_gold, majority_gold_document, GoldCorpus, GoldResult, UndecidedSegment};

use crate::error::{Error, Result};
use crate::model::{Activity, Corpus};
use serde::Serialize;
use std::collections::BTreeMap;

/// One annotated unit of a study.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub annotator: usize,
    pub section: usize,
    pub activity: Activity,
    pub begin: usize,
    pub end: usize,
}

/// Aligned multi-annotator segmentations over one sectioned continuum.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationStudy {
    section_ids: Vec<String>,
    section_lens: Vec<usize>,
    annotators: Vec<String>,
    units: Vec<Unit>,
}

/// Which categories `α_U` is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaMode {
    /// All activities jointly.
    Overall,
    /// One activity; all other units count as gaps.
    Category(Activity),
    /// Every unit relabeled to a single category.
    SegmentOnly,
    /// Two activities relabeled to one category, scored alone.
    Merged(Activity, Activity),
}

impl AnnotationStudy {
    pub fn new<S: Into<String>>(annotators: impl IntoIterator<Item = S>) -> Self {
        AnnotationStudy {
            section_ids: Vec::new(),
            section_lens: Vec::new(),
            annotators: annotators.into_iter().map(Into::into).collect(),
            units: Vec::new(),
        }
    }

    /// Appends a section (one document) and returns its index.
    pub fn add_section(&mut self, id: impl Into<String>, len: usize) -> usize {
        self.section_ids.push(id.into());
        self.section_lens.push(len);
        self.section_lens.len() - 1
    }

    /// Adds a unit by annotator name. Units of one annotator and activity
    /// must not overlap.
    pub fn add_unit(
        &mut self,
        annotator: &str,
        section: usize,
        activity: Activity,
        begin: usize,
        end: usize,
    ) -> Result<()> {
        let a = self
            .annotators
            .iter()
            .position(|x| x == annotator)
            .ok_or_else(|| Error::InvalidLabelSet(format!("unknown annotator {annotator}")))?;
        let len = *self
            .section_lens
            .get(section)
            .ok_or_else(|| Error::Misaligned(format!("no section {section}")))?;
        let seg = crate::model::Segment::new(activity, begin, end).by(annotator);
        let doc_id = self.section_ids[section].clone();
        if begin >= end {
            return Err(Error::EmptySegment { doc_id, segment: seg });
        }
        if end > len {
            return Err(Error::SegmentOutOfRange {
                doc_id,
                segment: seg,
                len,
            });
        }
        if let Some(u) = self.units.iter().find(|u| {
            u.annotator == a && u.section == section && u.activity == activity && u.begin < end && begin < u.end
        }) {
            let first = crate::model::Segment::new(activity, u.begin, u.end).by(annotator);
            return Err(Error::SameActivityOverlap {
                doc_id,
                activity,
                first,
                second: seg,
            });
        }
        self.units.push(Unit {
            annotator: a,
            section,
            activity,
            begin,
            end,
        });
        Ok(())
    }

    /// Builds a study from per-annotator segments: one section per document.
    /// `annotators` defaults to every annotator id found in the corpus;
    /// an annotator without segments in a document annotated nothing there.
    pub fn from_corpus(corpus: &Corpus, annotators: Option<&[String]>) -> Result<Self> {
        let names: Vec<String> = match annotators {
            Some(list) => list.to_vec(),
            None => {
                let mut all: Vec<String> = corpus
                    .documents
                    .iter()
                    .flat_map(|d| d.annotators().into_iter().map(str::to_string))
                    .collect();
                all.sort();
                all.dedup();
                all
            }
        };
        let mut study = AnnotationStudy::new(names);
        for doc in &corpus.documents {
            let s = study.add_section(doc.doc_id.clone(), doc.len());
            for seg in &doc.segments {
                if let Some(a) = &seg.annotator {
                    if study.annotators.iter().any(|x| x == a) {
                        study.add_unit(a, s, seg.activity, seg.begin, seg.end)?;
                    }
                }
            }
        }
        Ok(study)
    }

    pub fn annotators(&self) -> &[String] {
        &self.annotators
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    /// Total continuum length.
    pub fn len(&self) -> usize {
        self.section_lens.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The same study restricted to the given annotators.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        let mut idx = Vec::new();
        for name in keep {
            let i = self
                .annotators
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::InvalidLabelSet(format!("unknown annotator {name}")))?;
            idx.push(i);
        }
        Ok(AnnotationStudy {
            section_ids: self.section_ids.clone(),
            section_lens: self.section_lens.clone(),
            annotators: keep.iter().map(|s| s.to_string()).collect(),
            units: self
                .units
                .iter()
                .filter_map(|u| {
                    idx.iter().position(|&i| i == u.annotator).map(|new| Unit {
                        annotator: new,
                        ..u.clone()
                    })
                })
                .collect(),
        })
    }
}

/// A unit (`is_unit`) or gap on the global continuum.
#[derive(Debug, Clone, Copy)]
struct Section {
    is_unit: bool,
    begin: i64,
    len: i64,
}

/// Units and gaps of one annotator for a class of activities. Overlapping
/// units within the class are merged into their union.
fn sections(study: &AnnotationStudy, annotator: usize, class: &[Activity]) -> Vec<Section> {
    let mut out = Vec::new();
    let mut offset = 0i64;
    for (s, &len) in study.section_lens.iter().enumerate() {
        let mut spans: Vec<(usize, usize)> = study
            .units
            .iter()
            .filter(|u| u.annotator == annotator && u.section == s && class.contains(&u.activity))
            .map(|u| (u.begin, u.end))
            .collect();
        spans.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::new();
        for (b, e) in spans {
            match merged.last_mut() {
                Some(last) if b < last.1 => last.1 = last.1.max(e),
                _ => merged.push((b, e)),
            }
        }
        let mut pos = 0usize;
        for (b, e) in merged {
            if b > pos {
                out.push(Section {
                    is_unit: false,
                    begin: offset + pos as i64,
                    len: (b - pos) as i64,
                });
            }
            out.push(Section {
                is_unit: true,
                begin: offset + b as i64,
                len: (e - b) as i64,
            });
            pos = e;
        }
        if pos < len {
            out.push(Section {
                is_unit: false,
                begin: offset + pos as i64,
                len: (len - pos) as i64,
            });
        }
        offset += len as i64;
    }
    out
}

fn squared_distance(g: &Section, h: &Section) -> i128 {
    let d = (g.begin - h.begin) as i128;
    match (g.is_unit, h.is_unit) {
        (true, true) => {
            if -(g.len as i128) < d && d < h.len as i128 {
                let e = (g.begin + g.len - h.begin - h.len) as i128;
                d * d + e * e
            } else {
                0
            }
        }
        (true, false) => {
            if d >= 0 && (h.len - g.len) as i128 >= d {
                (g.len as i128).pow(2)
            } else {
                0
            }
        }
        (false, true) => {
            if -d >= 0 && (g.len - h.len) as i128 >= -d {
                (h.len as i128).pow(2)
            } else {
                0
            }
        }
        (false, false) => 0,
    }
}

/// Observed and expected disagreement for one class of activities.
fn class_disagreement(study: &AnnotationStudy, class: &[Activity]) -> (f64, f64) {
    let m = study.annotators.len() as i128;
    let l_total = study.len() as i128;
    let per_annotator: Vec<Vec<Section>> = (0..study.annotators.len()).map(|a| sections(study, a, class)).collect();

    let mut observed: i128 = 0;
    for (i, si) in per_annotator.iter().enumerate() {
        for (j, sj) in per_annotator.iter().enumerate() {
            if i == j {
                continue;
            }
            // sections are sorted by position: only pairs that touch matter
            let mut start = 0;
            for g in si {
                while start < sj.len() && sj[start].begin + sj[start].len <= g.begin {
                    start += 1;
                }
                for h in &sj[start..] {
                    if h.begin >= g.begin + g.len {
                        break;
                    }
                    observed += squared_distance(g, h);
                }
            }
        }
    }

    let pooled: Vec<&Section> = per_annotator.iter().flatten().collect();
    let n_units = pooled.iter().filter(|s| s.is_unit).count() as i128;
    let mut gap_lens: Vec<i128> = pooled.iter().filter(|s| !s.is_unit).map(|s| s.len as i128).collect();
    gap_lens.sort_unstable();
    let mut numerator: i128 = 0;
    let mut denominator: i128 = m * l_total * (m * l_total - 1);
    for u in pooled.iter().filter(|s| s.is_unit) {
        let l = u.len as i128;
        // (2l³ - 3l² + l) = l(l-1)(2l-1) is divisible by 3
        let mut term = (n_units - 1) * (l * (l - 1) * (2 * l - 1) / 3);
        let first = gap_lens.partition_point(|&g| g < l);
        let fits: i128 = gap_lens[first..].iter().map(|&g| g - l + 1).sum();
        term += l * l * fits;
        numerator += term;
        denominator -= l * (l - 1);
    }

    let d_o = observed as f64 / (m * (m - 1) * l_total * l_total) as f64;
    let d_e = if denominator > 0 {
        2.0 * numerator as f64 / (l_total as f64 * denominator as f64)
    } else {
        0.0
    };
    (d_o, d_e)
}

/// Krippendorff's `α_U` of a study in the given mode.
pub fn alpha_u(study: &AnnotationStudy, mode: AlphaMode) -> Result<f64> {
    if study.annotators.len() < 2 {
        return Err(Error::TooFewAnnotators(study.annotators.len()));
    }
    if study.is_empty() {
        return Err(Error::UndefinedAgreement);
    }
    let classes: Vec<Vec<Activity>> = match mode {
        AlphaMode::Overall => Activity::ALL.iter().map(|&a| vec![a]).collect(),
        AlphaMode::Category(a) => vec![vec![a]],
        AlphaMode::SegmentOnly => vec![Activity::ALL.to_vec()],
        AlphaMode::Merged(a, b) => vec![vec![a, b]],
    };
    let (mut d_o, mut d_e) = (0.0, 0.0);
    for class in &classes {
        let (o, e) = class_disagreement(study, class);
        d_o += o;
        d_e += e;
    }
    if d_e == 0.0 {
        return Err(Error::UndefinedAgreement);
    }
    Ok(1.0 - d_o / d_e)
}

/// `α_U` with two activities treated as one category.
pub fn merged_alpha(study: &AnnotationStudy, a: Activity, b: Activity) -> Result<f64> {
    if a == b {
        return Err(Error::InvalidLabelSet(format!("cannot merge {a} with itself")));
    }
    alpha_u(study, AlphaMode::Merged(a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub first: String,
    pub second: String,
    /// `None` when undefined for this pair.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseAlpha {
    pub pairs: Vec<PairScore>,
    pub max: Option<PairScore>,
    pub min: Option<PairScore>,
}

/// Overall `α_U` for every pair of annotators, with the highest and lowest
/// defined values.
pub fn pairwise_alpha(study: &AnnotationStudy) -> Result<PairwiseAlpha> {
    if study.annotators.len() < 2 {
        return Err(Error::TooFewAnnotators(study.annotators.len()));
    }
    let mut pairs = Vec::new();
    for (i, a) in study.annotators.iter().enumerate() {
        for b in &study.annotators[i + 1..] {
            let sub = study.restrict(&[a.as_str(), b.as_str()])?;
            let alpha = match alpha_u(&sub, AlphaMode::Overall) {
                Ok(v) => Some(v),
                Err(Error::UndefinedAgreement) => None,
                Err(e) => return Err(e),
            };
            pairs.push(PairScore {
                first: a.clone(),
                second: b.clone(),
                alpha,
            });
        }
    }
    let defined = pairs.iter().filter(|p| p.alpha.is_some());
    let max = defined
        .clone()
        .max_by(|x, y| x.alpha.partial_cmp(&y.alpha).unwrap())
        .cloned();
    let min = defined.min_by(|x, y| x.alpha.partial_cmp(&y.alpha).unwrap()).cloned();
    Ok(PairwiseAlpha { pairs, max, min })
}

/// `α_U` with two activities treated as one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergedScore {
    pub first: Activity,
    pub second: Activity,
    pub alpha: Option<f64>,
}

/// All agreement figures for a study. Undefined values are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub annotators: usize,
    pub continuum: usize,
    pub alpha_overall: Option<f64>,
    pub alpha_per_category: BTreeMap<Activity, Option<f64>>,
    pub alpha_segment: Option<f64>,
    pub pairwise: PairwiseAlpha,
    /// Every unordered pair, canonically ordered.
    pub merged: Vec<MergedScore>,
}

impl AgreementReport {
    /// Merged `α_U` of an unordered pair.
    pub fn merged(&self, a: Activity, b: Activity) -> Option<f64> {
        self.merged
            .iter()
            .find(|m| (m.first, m.second) == (a, b) || (m.first, m.second) == (b, a))
            .and_then(|m| m.alpha)
    }
}

fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedAgreement) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn agreement_report(study: &AnnotationStudy) -> Result<AgreementReport> {
    let mut per_category = BTreeMap::new();
    for a in Activity::ALL {
        per_category.insert(a, defined(alpha_u(study, AlphaMode::Category(a)))?);
    }
    let mut merged = Vec::new();
    for (i, &a) in Activity::ALL.iter().enumerate() {
        for &b in &Activity::ALL[i + 1..] {
            merged.push(MergedScore {
                first: a,
                second: b,
                alpha: defined(merged_alpha(study, a, b))?,
            });
        }
    }
    Ok(AgreementReport {
        annotators: study.annotators.len(),
        continuum: study.len(),
        alpha_overall: defined(alpha_u(study, AlphaMode::Overall))?,
        alpha_per_category: per_category,
        alpha_segment: defined(alpha_u(study, AlphaMode::SegmentOnly))?,
        pairwise: pairwise_alpha(study)?,
        merged,
    })
}
