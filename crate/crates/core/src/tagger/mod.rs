//! Trainable sequence tagger for overlapping activity segments.
//!
//! A structured perceptron with BIO-constrained Viterbi decoding is trained
//! under one of the multi-label transformations:
//!
//! - [`Strategy::Separate`]: one model per activity, each trained on its own
//!   schedule.
//! - [`Strategy::Concat`]: one model whose labels are the concatenated tuples
//!   seen in training, plus the all-`O` tuple.
//! - [`Strategy::MultiOutput`]: one model per activity, sharing the feature
//!   cache and updated together document by document.
//! - [`Strategy::Pref`]: one model over the nine labels of the preference
//!   reduction.
//!
//! [`Strategy::Maj`] is the untrained majority baseline ([`MajBaseline`]).

mod experiment;
mod features;
mod perceptron;

pub use experiment::{
    mean_report, run_experiment, seeds_from, ExperimentConfig, ExperimentReport, RunReport, Selection,
};
pub use features::{extract_features, token_features, FeatureVector, WINDOW};

use crate::encoding::{
    apply_preference, labelsets_to_segments, repair_labelsets, segments_to_labelsets, ConcatLabel, RepairPolicy,
};
use crate::error::{Error, Result};
use crate::model::{Activity, BioTag, Document, Label, LabelSet};
use features::Vocabulary;
use perceptron::{TaskModel, TaskTrainer};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Identifies the model file format.
pub const MODEL_FORMAT: &str = "epistact-tagger";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Separate,
    Concat,
    MultiOutput,
    Pref,
    Maj,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Separate,
        Strategy::Concat,
        Strategy::MultiOutput,
        Strategy::Pref,
        Strategy::Maj,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Separate => "separate",
            Strategy::Concat => "concat",
            Strategy::MultiOutput => "multi-output",
            Strategy::Pref => "pref",
            Strategy::Maj => "maj",
        }
    }

    pub fn is_trainable(self) -> bool {
        self != Strategy::Maj
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy {s:?}")))
    }
}

/// Decoded label sets of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub labelsets: Vec<LabelSet>,
    /// Dangling `I` tags turned into `B` while merging task outputs.
    pub repairs: usize,
}

/// Anything that assigns label sets to a token sequence.
pub trait SequenceTagger {
    fn strategy(&self) -> Strategy;

    fn tag(&self, tokens: &[String]) -> Prediction;

    /// Copy of `doc` whose segments are the predicted ones.
    fn predict_document(&self, doc: &Document) -> Document {
        let p = self.tag(&doc.tokens);
        let segments =
            labelsets_to_segments(&p.labelsets, RepairPolicy::IobRepair).expect("lenient decoding cannot fail");
        Document {
            segments,
            ..doc.clone()
        }
    }
}

/// Predicts `{I-EE}` for every token.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MajBaseline;

impl MajBaseline {
    pub const LABEL: Label = Label::Inside(Activity::EE);
}

impl SequenceTagger for MajBaseline {
    fn strategy(&self) -> Strategy {
        Strategy::Maj
    }

    fn tag(&self, tokens: &[String]) -> Prediction {
        Prediction {
            labelsets: vec![LabelSet::from(Self::LABEL); tokens.len()],
            repairs: 0,
        }
    }
}

fn single(a: Activity, tag: BioTag) -> LabelSet {
    let mut s = LabelSet::outside();
    s.set(a, tag);
    s
}

/// Label inventories per task, `O` always first so that untrained or tied
/// scores decode to `O`.
fn inventories(strategy: Strategy, gold: &[Vec<LabelSet>]) -> Vec<Vec<LabelSet>> {
    match strategy {
        Strategy::Separate | Strategy::MultiOutput => Activity::ALL
            .iter()
            .map(|&a| vec![LabelSet::outside(), single(a, BioTag::B), single(a, BioTag::I)])
            .collect(),
        Strategy::Concat => {
            let seen: BTreeSet<ConcatLabel> = gold.iter().flatten().map(|&s| s.into()).collect();
            let mut labels = vec![LabelSet::outside()];
            labels.extend(seen.into_iter().map(LabelSet::from).filter(|s| !s.is_outside()));
            vec![labels]
        }
        Strategy::Pref => vec![Label::ALL.iter().map(|&l| LabelSet::from(l)).collect()],
        Strategy::Maj => Vec::new(),
    }
}

/// Per-task target label indices of one document.
fn targets(strategy: Strategy, doc: &Document, gold: &[LabelSet], inv: &[Vec<LabelSet>]) -> Vec<Vec<usize>> {
    let position = |labels: &[LabelSet], s: LabelSet| labels.iter().position(|&x| x == s).expect("label in inventory");
    match strategy {
        Strategy::Separate | Strategy::MultiOutput => Activity::ALL
            .iter()
            .map(|&a| {
                gold.iter()
                    .map(|s| position(&inv[a.index()], single(a, s.tag(a))))
                    .collect()
            })
            .collect(),
        Strategy::Concat => vec![gold.iter().map(|&s| position(&inv[0], s)).collect()],
        Strategy::Pref => vec![apply_preference(doc).iter().map(|l| l.index()).collect()],
        Strategy::Maj => Vec::new(),
    }
}

/// Epoch-by-epoch perceptron training.
///
/// Documents are reshuffled every epoch from a ChaCha8 stream seeded with
/// `seed`. Separate models each draw from their own stream; all other
/// strategies share one schedule.
pub struct Trainer {
    strategy: Strategy,
    seed: u64,
    averaged: bool,
    vocabulary: Vocabulary,
    features: Vec<Vec<Vec<u32>>>,
    /// `[task][document][token]`.
    targets: Vec<Vec<Vec<usize>>>,
    tasks: Vec<TaskTrainer>,
    rngs: Vec<ChaCha8Rng>,
    mistakes: Vec<usize>,
}

impl Trainer {
    pub fn new(documents: &[&Document], strategy: Strategy, seed: u64) -> Result<Self> {
        if !strategy.is_trainable() {
            return Err(Error::Training("the maj baseline is not trainable".into()));
        }
        if documents.iter().all(|d| d.is_empty()) {
            return Err(Error::Training("empty training set".into()));
        }
        let gold: Vec<Vec<LabelSet>> = documents.iter().map(|d| segments_to_labelsets(d)).collect();
        let inv = inventories(strategy, &gold);
        let mut per_doc: Vec<Vec<Vec<usize>>> = documents
            .iter()
            .zip(&gold)
            .map(|(d, g)| targets(strategy, d, g, &inv))
            .collect();
        let mut targets = vec![Vec::with_capacity(documents.len()); inv.len()];
        for doc in per_doc.iter_mut() {
            for (k, t) in doc.drain(..).enumerate() {
                targets[k].push(t);
            }
        }

        let mut names = Vec::new();
        for d in documents {
            for i in 0..d.len() {
                names.extend_from_slice(extract_features(d, i).names());
            }
        }
        let vocabulary = Vocabulary::from_names(names);
        let features = documents.iter().map(|d| vocabulary.encode(&d.tokens)).collect();
        let tasks = inv
            .into_iter()
            .map(|labels| TaskTrainer::new(labels, vocabulary.len()))
            .collect::<Vec<_>>();

        let streams = if strategy == Strategy::Separate { tasks.len() } else { 1 };
        let rngs = (0..streams)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                rng
            })
            .collect();
        Ok(Trainer {
            strategy,
            seed,
            averaged: true,
            vocabulary,
            features,
            targets,
            tasks,
            rngs,
            mistakes: Vec::new(),
        })
    }

    /// Use the last weights instead of averaged ones in [`Trainer::model`].
    pub fn without_averaging(mut self) -> Self {
        self.averaged = false;
        self
    }

    /// Runs one pass over the training documents and returns the number of
    /// mislabelled tokens summed over tasks.
    pub fn epoch(&mut self) -> usize {
        let n = self.features.len();
        let mut mistakes = 0;
        if self.strategy == Strategy::Separate {
            for (k, task) in self.tasks.iter_mut().enumerate() {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut self.rngs[k]);
                for d in order {
                    mistakes += task.step(&self.features[d], &self.targets[k][d]);
                }
            }
        } else {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut self.rngs[0]);
            for d in order {
                for (k, task) in self.tasks.iter_mut().enumerate() {
                    mistakes += task.step(&self.features[d], &self.targets[k][d]);
                }
            }
        }
        self.mistakes.push(mistakes);
        mistakes
    }

    pub fn epochs_done(&self) -> usize {
        self.mistakes.len()
    }

    /// Mistakes of every finished epoch.
    pub fn mistakes(&self) -> &[usize] {
        &self.mistakes
    }

    pub fn model(&self) -> TaggerModel {
        TaggerModel {
            strategy: self.strategy,
            seed: self.seed,
            epochs: self.epochs_done(),
            averaged: self.averaged,
            vocabulary: self.vocabulary.clone(),
            tasks: self.tasks.iter().map(|t| t.snapshot(self.averaged)).collect(),
        }
    }
}

/// Trains for a fixed number of epochs.
pub fn train(documents: &[&Document], strategy: Strategy, epochs: usize, seed: u64) -> Result<TaggerModel> {
    if epochs == 0 {
        return Err(Error::Training("at least one epoch is required".into()));
    }
    let mut trainer = Trainer::new(documents, strategy, seed)?;
    for _ in 0..epochs {
        trainer.epoch();
    }
    Ok(trainer.model())
}

/// A trained perceptron tagger.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    strategy: Strategy,
    seed: u64,
    epochs: usize,
    averaged: bool,
    vocabulary: Vocabulary,
    tasks: Vec<TaskModel>,
}

impl SequenceTagger for TaggerModel {
    fn strategy(&self) -> Strategy {
        self.strategy
    }

    fn tag(&self, tokens: &[String]) -> Prediction {
        let features = self.vocabulary.encode(tokens);
        let raw: Vec<LabelSet> = match self.strategy {
            Strategy::Separate | Strategy::MultiOutput => {
                let mut out = vec![LabelSet::outside(); tokens.len()];
                for (a, task) in Activity::ALL.iter().zip(&self.tasks) {
                    for (t, y) in task.decode(&features).into_iter().enumerate() {
                        out[t].set(*a, task.labels[y].tag(*a));
                    }
                }
                out
            }
            _ => {
                let task = &self.tasks[0];
                task.decode(&features).into_iter().map(|y| task.labels[y]).collect()
            }
        };
        let (labelsets, repairs) = repair_labelsets(&raw);
        Prediction { labelsets, repairs }
    }
}

/// Wraps an untrained baseline or a trained model behind one type.
pub enum AnyTagger {
    Maj(MajBaseline),
    Model(Box<TaggerModel>),
}

impl SequenceTagger for AnyTagger {
    fn strategy(&self) -> Strategy {
        match self {
            AnyTagger::Maj(m) => m.strategy(),
            AnyTagger::Model(m) => m.strategy(),
        }
    }

    fn tag(&self, tokens: &[String]) -> Prediction {
        match self {
            AnyTagger::Maj(m) => m.tag(tokens),
            AnyTagger::Model(m) => m.tag(tokens),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct TaskFile {
    labels: Vec<String>,
    /// Row per previous label, then the start row; `null` marks forbidden
    /// moves.
    transitions: Vec<Vec<Option<f64>>>,
    /// Non-zero emission weights as `[feature, label, weight]`.
    emissions: Vec<(u32, u32, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    strategy: Strategy,
    seed: u64,
    epochs: usize,
    averaged: bool,
    features: Vec<String>,
    tasks: Vec<TaskFile>,
}

impl TaggerModel {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn is_averaged(&self) -> bool {
        self.averaged
    }

    pub fn feature_count(&self) -> usize {
        self.vocabulary.len()
    }

    /// Label inventory of each task.
    pub fn labels(&self) -> Vec<Vec<LabelSet>> {
        self.tasks.iter().map(|t| t.labels.clone()).collect()
    }

    /// Compact JSON, identical for identical models.
    pub fn to_json(&self) -> String {
        let tasks = self
            .tasks
            .iter()
            .map(|t| {
                let l = t.labels.len();
                let emissions = t
                    .emissions
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(|(i, &w)| ((i / l) as u32, (i % l) as u32, w))
                    .collect();
                TaskFile {
                    labels: t.labels.iter().map(|&s| ConcatLabel::from(s).to_string()).collect(),
                    transitions: t.transitions.chunks(l).map(|r| r.to_vec()).collect(),
                    emissions,
                }
            })
            .collect();
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            strategy: self.strategy,
            seed: self.seed,
            epochs: self.epochs,
            averaged: self.averaged,
            features: self.vocabulary.names().to_vec(),
            tasks,
        };
        serde_json::to_string(&file).expect("model serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let header: Header = serde_json::from_str(text)?;
        if header.format != MODEL_FORMAT || header.version != MODEL_VERSION {
            return Err(Error::ModelVersion {
                found: format!("{} v{}", header.format, header.version),
                expected: format!("{MODEL_FORMAT} v{MODEL_VERSION}"),
            });
        }
        let file: ModelFile = serde_json::from_str(text)?;
        let expected_tasks = match file.strategy {
            Strategy::Separate | Strategy::MultiOutput => 4,
            Strategy::Concat | Strategy::Pref => 1,
            Strategy::Maj => return Err(Error::InvalidModel("the maj baseline has no model file".into())),
        };
        if file.tasks.len() != expected_tasks {
            return Err(Error::InvalidModel(format!(
                "{} needs {expected_tasks} tasks, found {}",
                file.strategy,
                file.tasks.len()
            )));
        }
        let vocabulary = Vocabulary::from_names(file.features.clone());
        if vocabulary.len() != file.features.len() || vocabulary.names() != file.features.as_slice() {
            return Err(Error::InvalidModel("feature list must be sorted and unique".into()));
        }
        let v = vocabulary.len();
        let mut tasks = Vec::new();
        for t in file.tasks {
            let labels = t
                .labels
                .iter()
                .map(|s| {
                    s.parse::<ConcatLabel>()
                        .map(LabelSet::from)
                        .map_err(Error::InvalidModel)
                })
                .collect::<Result<Vec<_>>>()?;
            let l = labels.len();
            if l == 0 || t.transitions.len() != l + 1 || t.transitions.iter().any(|r| r.len() != l) {
                return Err(Error::InvalidModel("transition table does not match the labels".into()));
            }
            let mut emissions = vec![0.0; v * l];
            for (f, y, w) in t.emissions {
                let (f, y) = (f as usize, y as usize);
                if f >= v || y >= l {
                    return Err(Error::InvalidModel(format!("emission weight ({f}, {y}) out of range")));
                }
                emissions[f * l + y] = w;
            }
            tasks.push(TaskModel {
                labels,
                emissions,
                transitions: t.transitions.into_iter().flatten().collect(),
            });
        }
        Ok(TaggerModel {
            strategy: file.strategy,
            seed: file.seed,
            epochs: file.epochs,
            averaged: file.averaged,
            vocabulary,
            tasks,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
