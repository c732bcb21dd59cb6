// Trains the perceptron tagger on a synthetic corpus under each
// transformation, saves and reloads a model, and tags a document.

use epistact::encoding::segments_to_labelsets;
use epistact::metrics::hamming_loss;
use epistact::synthetic::separable_corpus;
use epistact::tagger::{MajBaseline, SequenceTagger, Strategy, TaggerModel, Trainer};
use epistact::Document;

fn main() {
    let corpus = separable_corpus(20, 13);
    let docs: Vec<&Document> = corpus.documents.iter().collect();
    let gold: Vec<_> = docs.iter().flat_map(|d| segments_to_labelsets(d)).collect();

    for strategy in [
        Strategy::Separate,
        Strategy::Concat,
        Strategy::MultiOutput,
        Strategy::Pref,
    ] {
        let mut trainer = Trainer::new(&docs, strategy, 13).unwrap();
        for _ in 0..10 {
            trainer.epoch();
        }
        let model = trainer.model();
        let pred: Vec<_> = docs.iter().flat_map(|d| model.tag(&d.tokens).labelsets).collect();
        println!(
            "{:<13} mistakes per epoch {:?}, training HL {:.4}",
            strategy.to_string(),
            trainer.mistakes(),
            hamming_loss(&gold, &pred).unwrap()
        );
    }
    let maj: Vec<_> = docs.iter().flat_map(|d| MajBaseline.tag(&d.tokens).labelsets).collect();
    println!("{:<13} training HL {:.4}", "maj", hamming_loss(&gold, &maj).unwrap());

    let mut trainer = Trainer::new(&docs, Strategy::Concat, 13).unwrap();
    for _ in 0..10 {
        trainer.epoch();
    }
    let model = trainer.model();
    let path = std::env::temp_dir().join(format!("epistact-example-{}.json", std::process::id()));
    model.save(&path).unwrap();
    let reloaded = TaggerModel::load(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(reloaded, model);

    let doc = Document::new("new", "then perhaps virus because fever rash .".split(' '));
    let tagged = reloaded.predict_document(&doc);
    println!("\n{}", doc.tokens.join(" "));
    for s in &tagged.segments {
        println!("  {s}: {}", doc.tokens[s.begin..s.end].join(" "));
    }
}
