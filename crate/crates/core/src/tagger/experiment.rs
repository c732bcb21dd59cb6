use super::{MajBaseline, SequenceTagger, Strategy, Trainer};
use crate::encoding::segments_to_labelsets;
use crate::error::{Error, Result};
use crate::metrics::{evaluate, ConfusionMatrix, EvalReport};
use crate::model::{Corpus, Document, LabelSet, Split};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Dev-set criterion for picking the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Lowest Hamming loss.
    #[default]
    Hl,
    /// Highest activity macro-F1.
    MA,
}

impl Selection {
    fn better(self, candidate: &EvalReport, best: &EvalReport) -> bool {
        match self {
            Selection::Hl => candidate.hl < best.hl,
            Selection::MA => candidate.m_a > best.m_a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub strategy: Strategy,
    /// One run per seed.
    pub seeds: Vec<u64>,
    pub max_epochs: usize,
    pub selection: Selection,
}

impl ExperimentConfig {
    pub fn new(strategy: Strategy, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            strategy,
            seeds,
            max_epochs: 20,
            selection: Selection::Hl,
        }
    }
}

/// `runs` consecutive seeds starting at `base`.
pub fn seeds_from(base: u64, runs: usize) -> Vec<u64> {
    (0..runs as u64).map(|i| base.wrapping_add(i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub seed: u64,
    /// Selected epoch; 0 for the untrained baseline.
    pub epoch: usize,
    pub dev: Option<EvalReport>,
    pub test: EvalReport,
    pub repairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub strategy: Strategy,
    pub selection: Selection,
    pub runs: Vec<RunReport>,
    pub mean: EvalReport,
}

impl ExperimentReport {
    /// Test scores of every run for one metric, in run order.
    pub fn scores(&self, metric: impl Fn(&EvalReport) -> f64) -> Vec<f64> {
        self.runs.iter().map(|r| metric(&r.test)).collect()
    }
}

fn score(tagger: &impl SequenceTagger, docs: &[&Document]) -> Result<(EvalReport, usize)> {
    let mut gold: Vec<LabelSet> = Vec::new();
    let mut pred = Vec::new();
    let mut repairs = 0;
    for d in docs {
        gold.extend(segments_to_labelsets(d));
        let p = tagger.tag(&d.tokens);
        repairs += p.repairs;
        pred.extend(p.labelsets);
    }
    Ok((evaluate(&gold, &pred)?, repairs))
}

fn run_once(
    train: &[&Document],
    dev: &[&Document],
    test: &[&Document],
    config: &ExperimentConfig,
    seed: u64,
) -> Result<RunReport> {
    if config.strategy == Strategy::Maj {
        let (test, repairs) = score(&MajBaseline, test)?;
        return Ok(RunReport {
            seed,
            epoch: 0,
            dev: None,
            test,
            repairs,
        });
    }
    let mut trainer = Trainer::new(train, config.strategy, seed)?;
    let mut best: Option<(usize, EvalReport, super::TaggerModel)> = None;
    for epoch in 1..=config.max_epochs {
        trainer.epoch();
        if dev.is_empty() && epoch < config.max_epochs {
            continue;
        }
        let model = trainer.model();
        let (report, _) = score(&model, dev)?;
        let improved = match &best {
            None => true,
            Some((_, b, _)) => !dev.is_empty() && config.selection.better(&report, b),
        };
        if improved {
            best = Some((epoch, report, model));
        }
    }
    let (epoch, dev_report, model) = best.ok_or_else(|| Error::Training("at least one epoch is required".into()))?;
    let (test, repairs) = score(&model, test)?;
    Ok(RunReport {
        seed,
        epoch,
        dev: (!dev.is_empty()).then_some(dev_report),
        test,
        repairs,
    })
}

/// Trains on the train part, picks the epoch on dev and scores test, once
/// per seed. Runs execute in parallel; each run is deterministic.
pub fn run_experiment(corpus: &Corpus, config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.seeds.is_empty() {
        return Err(Error::Training("at least one run is required".into()));
    }
    let train = corpus.part(Split::Train)?;
    let dev = corpus.part(Split::Dev)?;
    let test = corpus.part(Split::Test)?;
    let runs = config
        .seeds
        .par_iter()
        .map(|&seed| run_once(&train, &dev, &test, config, seed))
        .collect::<Result<Vec<_>>>()?;
    let tests: Vec<EvalReport> = runs.iter().map(|r| r.test.clone()).collect();
    Ok(ExperimentReport {
        strategy: config.strategy,
        selection: config.selection,
        mean: mean_report(&tests)?,
        runs,
    })
}

/// Per-metric mean over reports of the same test set. `M_O` stays `None`
/// when any run leaves it undefined. Confusion counts are summed.
pub fn mean_report(reports: &[EvalReport]) -> Result<EvalReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::Misaligned("no reports to average".into()))?;
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let mut m_s = BTreeMap::new();
    let mut m_o = BTreeMap::new();
    for &a in first.m_s.keys() {
        m_s.insert(a, mean(&|r| r.m_s[&a]));
        let all: Option<Vec<f64>> = reports.iter().map(|r| r.m_o[&a]).collect();
        m_o.insert(a, all.map(|v| v.iter().sum::<f64>() / n));
    }
    let mut confusion = ConfusionMatrix::default();
    for r in reports {
        confusion.add(&r.confusion);
    }
    Ok(EvalReport {
        hl: mean(&|r| r.hl),
        m_s,
        m_a: mean(&|r| r.m_a),
        m_o,
        tokens: first.tokens,
        overlap_tokens: first.overlap_tokens,
        confusion,
    })
}
