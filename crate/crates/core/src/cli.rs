//! Command-line interface. [`main_with_args`] runs one subcommand and
//! returns the process exit code: 0 on success, 1 on any error including
//! usage errors.

use crate::agreement::{agreement_report, apply_resolutions, majority_gold, AnnotationStudy};
use crate::conll::{corpus_to_conll, parse_conll};
use crate::error::Error;
use crate::format::{read_corpus, read_split, write_corpus, write_split};
use crate::metrics::{align_corpora, evaluate_corpus, mann_whitney_u, ConfusionMatrix};
use crate::model::{Corpus, Split};
use crate::report::{
    emit_agreement, emit_eval, emit_experiments, emit_significance, emit_stats, undecided_json_lines, EvalRow,
    ReportFormat,
};
use crate::split::{stratified_split, DEFAULT_RATIOS};
use crate::stats::corpus_stats;
use crate::tagger::{
    run_experiment, seeds_from, AnyTagger, ExperimentConfig, MajBaseline, Selection, SequenceTagger, Strategy,
    TaggerModel, Trainer,
};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 13;

#[derive(Debug, Parser)]
#[command(
    name = "epistact",
    version,
    about = "Annotation, agreement and tagging tools for overlapping activity segments"
)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "EPISTACT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Report format: text, csv or json-lines.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    pub format: ReportFormat,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_ratios(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("expected three comma-separated shares, got {}", p.len()))
}

fn parse_selection(s: &str) -> Result<Selection, String> {
    match s {
        "hl" => Ok(Selection::Hl),
        "m-a" => Ok(Selection::MA),
        _ => Err(format!("unknown selection metric {s:?} (expected hl or m-a)")),
    }
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus in JSON lines.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Split file; required by commands that use train/dev/test parts.
    #[arg(long)]
    pub split: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks a corpus (and optionally a split) for format and consistency errors.
    Validate(CorpusArgs),
    /// Segment counts, average counts and lengths, and overlaps.
    Stats {
        /// One table block per corpus.
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Case-stratified train/dev/test split.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Train, dev and test shares.
        #[arg(long, value_parser = parse_ratios, default_value = "0.6,0.2,0.2")]
        ratios: [f64; 3],
    },
    /// Unitizing agreement of annotator segments.
    Agreement {
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        /// Annotators to compare; all annotators in the corpus by default.
        #[arg(long, value_delimiter = ',')]
        annotators: Option<Vec<String>>,
    },
    /// Majority-vote gold standard.
    Gold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Votes needed for a segment.
        #[arg(long)]
        k: usize,
        /// Expected number of annotators; checked against the corpus.
        #[arg(long)]
        n: Option<usize>,
        /// Annotators voting; all annotators in the corpus by default.
        #[arg(long, value_delimiter = ',')]
        annotators: Option<Vec<String>>,
        /// Where to write undecided segments (JSON lines).
        #[arg(long)]
        undecided: Option<PathBuf>,
        /// Adjudicated segments to merge into the gold corpus.
        #[arg(long)]
        resolved: Option<PathBuf>,
    },
    /// Converts between the JSON-lines corpus and the CoNLL export.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Read CoNLL and write JSON lines instead.
        #[arg(long)]
        from_conll: bool,
    },
    /// Trains a tagger.
    Train {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        /// Model file to write.
        #[arg(long)]
        model: PathBuf,
        /// Keep the final rather than the averaged weights.
        #[arg(long)]
        no_average: bool,
    },
    /// Tags a corpus with a trained model or the majority baseline.
    Predict {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, conflicts_with = "maj", required_unless_present = "maj")]
        model: Option<PathBuf>,
        /// Use the majority baseline instead of a model.
        #[arg(long)]
        maj: bool,
    },
    /// Scores a prediction against gold.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Row-normalized confusion matrix over activity sets, as CSV.
    Confusion {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Raw counts instead of percentages.
        #[arg(long)]
        counts: bool,
        /// Keep sets that occur in neither gold nor prediction.
        #[arg(long)]
        all: bool,
    },
    /// Two-sided Mann-Whitney U test on two score lists (JSON arrays).
    Significance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Bonferroni divisor.
        #[arg(long, default_value_t = 1)]
        comparisons: usize,
    },
    /// Repeated train/select/test runs for one or more strategies.
    Experiment {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Strategies to run; all five by default.
        #[arg(long = "strategy", value_parser = parse_strategy)]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Maximum epochs; the best one on dev is kept.
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        /// Dev metric for epoch selection: hl or m-a.
        #[arg(long, default_value = "hl", value_parser = parse_selection)]
        select: Selection,
        /// Significance level for the outperformance marks.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

/// An error message for the user.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn at(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| match e {
        Error::Io { .. } => Failure(e.to_string()),
        e => Failure(format!("{}: {e}", path.display())),
    }
}

fn load(path: &Path) -> Result<Corpus, Failure> {
    read_corpus(path).map_err(at(path))
}

fn load_with_split(args: &CorpusArgs) -> Result<Corpus, Failure> {
    let corpus = load(&args.input)?;
    match &args.split {
        Some(p) => {
            let split = read_split(p).map_err(at(p))?;
            corpus.with_split(split).map_err(at(p))
        }
        None => Ok(corpus),
    }
}

fn name_of(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(Error::io(path, e).to_string()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(Error::io(path, e).to_string()))
}

fn read_scores(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure(format!("{}: expected a JSON array of numbers: {e}", path.display())))
}

fn annotators_of(corpus: &Corpus, given: &Option<Vec<String>>) -> Vec<String> {
    match given {
        Some(a) => a.clone(),
        None => {
            let mut all: Vec<String> = corpus
                .documents
                .iter()
                .flat_map(|d| d.annotators().into_iter().map(String::from).collect::<Vec<_>>())
                .collect();
            all.sort();
            all.dedup();
            all
        }
    }
}

fn execute(cli: Cli) -> Outcome {
    let format = cli.format;
    let seed = cli.seed;
    match cli.command {
        Command::Validate(args) => {
            let corpus = load_with_split(&args)?;
            corpus.validate().map_err(at(&args.input))?;
            let tokens: usize = corpus.documents.iter().map(|d| d.len()).sum();
            let segments: usize = corpus.documents.iter().map(|d| d.segments.len()).sum();
            Ok(format!(
                "ok: {} documents, {tokens} tokens, {segments} segments\n",
                corpus.len()
            ))
        }
        Command::Stats { inputs } => {
            let mut tables = Vec::new();
            for p in &inputs {
                let corpus = load(p)?;
                tables.push((name_of(p), corpus_stats(&corpus).map_err(at(p))?));
            }
            let rows: Vec<(String, &_)> = tables.iter().map(|(n, t)| (n.clone(), t)).collect();
            Ok(emit_stats(&rows, format)?)
        }
        Command::Split { input, out, ratios } => {
            let corpus = load(&input)?;
            let split = stratified_split(&corpus, ratios, seed).map_err(at(&input))?;
            write_split(&out, &split)?;
            let count = |s: Split| split.values().filter(|&&x| x == s).count();
            Ok(format!(
                "train {} / dev {} / test {} documents written to {}\n",
                count(Split::Train),
                count(Split::Dev),
                count(Split::Test),
                out.display()
            ))
        }
        Command::Agreement { inputs, annotators } => {
            let mut reports = Vec::new();
            for p in &inputs {
                let corpus = load(p)?;
                let names = annotators_of(&corpus, &annotators);
                let study = AnnotationStudy::from_corpus(&corpus, Some(names.as_slice())).map_err(at(p))?;
                reports.push((name_of(p), agreement_report(&study).map_err(at(p))?));
            }
            let rows: Vec<(String, &_)> = reports.iter().map(|(n, r)| (n.clone(), r)).collect();
            Ok(emit_agreement(&rows, format)?)
        }
        Command::Gold {
            input,
            out,
            k,
            n,
            annotators,
            undecided,
            resolved,
        } => {
            let corpus = load(&input)?;
            let names = annotators_of(&corpus, &annotators);
            if let Some(n) = n {
                if n != names.len() {
                    return Err(Failure(format!(
                        "{}: expected {n} annotators, found {} ({})",
                        input.display(),
                        names.len(),
                        names.join(", ")
                    )));
                }
            }
            let mut gold = majority_gold(&corpus, &names, k).map_err(at(&input))?;
            if let Some(r) = &resolved {
                apply_resolutions(&mut gold.corpus, &load(r)?).map_err(at(r))?;
            }
            write_corpus(&out, &gold.corpus)?;
            let accepted: usize = gold.corpus.documents.iter().map(|d| d.segments.len()).sum();
            if let Some(u) = &undecided {
                write_text(u, &undecided_json_lines(&gold.undecided)?)?;
            }
            Ok(format!(
                "{accepted} gold segments, {} undecided, from {} annotators with k = {k}\n",
                gold.undecided.len(),
                names.len()
            ))
        }
        Command::Transform { input, out, from_conll } => {
            if from_conll {
                let text = read_text(&input)?;
                let docs = parse_conll(&text)
                    .map_err(at(&input))?
                    .into_iter()
                    .map(|d| d.into_document())
                    .collect::<crate::Result<Vec<_>>>()
                    .map_err(at(&input))?;
                let corpus = Corpus::new(docs);
                write_corpus(&out, &corpus)?;
                Ok(format!("{} documents written to {}\n", corpus.len(), out.display()))
            } else {
                let corpus = load(&input)?;
                write_text(&out, &corpus_to_conll(&corpus).map_err(at(&input))?)?;
                Ok(format!("{} documents written to {}\n", corpus.len(), out.display()))
            }
        }
        Command::Train {
            corpus,
            strategy,
            epochs,
            model,
            no_average,
        } => {
            if epochs == 0 {
                return Err(Failure("--epochs must be at least 1".into()));
            }
            let c = load_with_split(&corpus)?;
            let docs = if c.split.is_some() {
                c.part(Split::Train)?
            } else {
                c.documents.iter().collect()
            };
            let mut trainer = Trainer::new(&docs, strategy, seed)?;
            if no_average {
                trainer = trainer.without_averaging();
            }
            for _ in 0..epochs {
                trainer.epoch();
            }
            let m = trainer.model();
            m.save(&model)?;
            let mistakes: Vec<String> = trainer.mistakes().iter().map(|m| m.to_string()).collect();
            Ok(format!(
                "{strategy} model trained on {} documents for {epochs} epochs (mistakes per epoch: {}) written to {}\n",
                docs.len(),
                mistakes.join(" "),
                model.display()
            ))
        }
        Command::Predict { input, out, model, maj } => {
            let tagger = if maj {
                AnyTagger::Maj(MajBaseline)
            } else {
                let p = model.expect("clap requires --model without --maj");
                AnyTagger::Model(Box::new(TaggerModel::load(&p).map_err(at(&p))?))
            };
            let corpus = load(&input)?;
            let mut repairs = 0;
            let docs = corpus
                .documents
                .iter()
                .map(|d| {
                    repairs += tagger.tag(&d.tokens).repairs;
                    tagger.predict_document(d)
                })
                .collect();
            let predicted = Corpus::new(docs);
            write_corpus(&out, &predicted)?;
            Ok(format!(
                "{} documents tagged with {} ({repairs} repairs) written to {}\n",
                predicted.len(),
                tagger.strategy(),
                out.display()
            ))
        }
        Command::Evaluate { gold, pred } => {
            let (g, p) = (load(&gold)?, load(&pred)?);
            let report = evaluate_corpus(&g, &p)?;
            Ok(emit_eval(&[EvalRow::new(name_of(&pred), &report)], format)?)
        }
        Command::Confusion {
            gold,
            pred,
            counts,
            all,
        } => {
            let (g, p) = align_corpora(&load(&gold)?, &load(&pred)?)?;
            let m = ConfusionMatrix::from_labelsets(&g, &p)?;
            Ok(if counts { m.counts_csv(!all) } else { m.to_csv(!all) })
        }
        Command::Significance {
            a,
            b,
            alpha,
            comparisons,
        } => {
            let r = mann_whitney_u(&read_scores(&a)?, &read_scores(&b)?, alpha, comparisons)?;
            Ok(emit_significance(&r, format)?)
        }
        Command::Experiment {
            corpus,
            strategies,
            runs,
            epochs,
            select,
            alpha,
        } => {
            if runs == 0 || epochs == 0 {
                return Err(Failure("--runs and --epochs must be at least 1".into()));
            }
            let mut c = load_with_split(&corpus)?;
            if c.split.is_none() {
                let split = stratified_split(&c, DEFAULT_RATIOS, seed).map_err(at(&corpus.input))?;
                c = c.with_split(split)?;
            }
            let strategies = if strategies.is_empty() {
                Strategy::ALL.to_vec()
            } else {
                strategies
            };
            let mut reports = Vec::new();
            for s in strategies {
                let config = ExperimentConfig {
                    strategy: s,
                    seeds: seeds_from(seed, runs),
                    max_epochs: epochs,
                    selection: select,
                };
                reports.push(run_experiment(&c, &config)?);
            }
            Ok(emit_experiments(&reports, alpha, format)?)
        }
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// report to `out` and any error to `err`.
pub fn main_with_args<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let display_only = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if display_only {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return if display_only { 0 } else { 1 };
        }
    };
    match execute(cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}
