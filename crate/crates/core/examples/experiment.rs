// Splits a corpus by case, runs every strategy several times with epoch
// selection on dev, and prints the mean table with significance marks.

use epistact::report::{emit_experiments, ReportFormat};
use epistact::split::{stratified_split, DEFAULT_RATIOS};
use epistact::synthetic::separable_corpus;
use epistact::tagger::{run_experiment, seeds_from, ExperimentConfig, Strategy};

fn main() {
    let corpus = separable_corpus(40, 5);
    let split = stratified_split(&corpus, DEFAULT_RATIOS, 13).unwrap();
    let corpus = corpus.with_split(split).unwrap();

    let reports: Vec<_> = Strategy::ALL
        .iter()
        .map(|&s| {
            let config = ExperimentConfig {
                max_epochs: 5,
                ..ExperimentConfig::new(s, seeds_from(13, 4))
            };
            run_experiment(&corpus, &config).unwrap()
        })
        .collect();
    print!("{}", emit_experiments(&reports, 0.05, ReportFormat::Text).unwrap());
}
