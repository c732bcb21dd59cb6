//! Toolkit for overlapping typed-span annotation over tokenized text.
//!
//! * [`model`] and [`format`]: documents with possibly overlapping segments of
//!   four activity types, and the JSON-lines corpus format.
//! * [`encoding`]: per-token label sets and the separate / concatenated /
//!   multi-output transformations, plus the preference-order reduction to a
//!   single label per token.
//! * [`metrics`]: hamming loss, segmentation (`M_S`), activity (`M_A`) and
//!   overlap (`M_O`) scores, the power-set confusion matrix and an exact
//!   Mann-Whitney U test.
//! * [`agreement`]: unitizing `α_U` and majority-vote gold creation.
//! * [`tagger`]: structured-perceptron sequence tagger and baselines.
//! * [`split`], [`stats`]: stratified splitting and corpus statistics.

pub mod agreement;
pub mod cli;
pub mod conll;
pub mod encoding;
pub mod error;
pub mod format;
pub mod metrics;
pub mod model;
pub mod report;
pub mod split;
pub mod stats;
pub mod synthetic;
pub mod tagger;

pub use error::{Error, Result};
pub use model::{Activity, BioTag, Corpus, Document, Domain, Label, LabelSet, Segment, Split};
