use crate::model::{Activity, Segment};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("document {doc_id}: segment {segment} is out of range for {len} tokens")]
    SegmentOutOfRange {
        doc_id: String,
        segment: Segment,
        len: usize,
    },

    #[error("document {doc_id}: segment {segment} is empty")]
    EmptySegment { doc_id: String, segment: Segment },

    /// A record-level error on one line of a corpus file.
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: duplicate doc_id {doc_id}")]
    DuplicateDocId { line: usize, doc_id: String },

    #[error("document {doc_id}: overlapping {activity} segments {first} and {second} by the same annotator")]
    SameActivityOverlap {
        doc_id: String,
        activity: Activity,
        first: Segment,
        second: Segment,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),

    #[error("document {0} has no case_id")]
    MissingCaseId(String),

    #[error("split is missing or does not cover the corpus: {0}")]
    MissingSplit(String),

    #[error("misaligned inputs: {0}")]
    Misaligned(String),

    #[error("class {0} is not part of the class universe")]
    UnknownClass(String),

    #[error("invalid label set: {0}")]
    InvalidLabelSet(String),

    #[error("illegal transition at token {token}: I-{activity} does not continue a segment")]
    IllegalTransition { token: usize, activity: Activity },

    #[error("agreement needs at least two annotators, got {0}")]
    TooFewAnnotators(usize),

    #[error("agreement is undefined: expected disagreement is zero")]
    UndefinedAgreement,

    #[error("document {doc_id}: expected {expected} annotators, found {found}")]
    AnnotatorCount {
        doc_id: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid voting threshold: k = {k}, n = {n}")]
    InvalidThreshold { k: usize, n: usize },

    #[error("document {doc_id}: majority voting accepted overlapping {activity} segments")]
    ConflictingGold { doc_id: String, activity: Activity },

    #[error("training failed: {0}")]
    Training(String),

    #[error("model format {found} is not supported (expected {expected})")]
    ModelVersion { found: String, expected: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("conll line {line}: {message}")]
    Conll { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// The error without any line wrapper.
    pub fn innermost(&self) -> &Error {
        match self {
            Error::AtLine { source, .. } => source.innermost(),
            e => e,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
