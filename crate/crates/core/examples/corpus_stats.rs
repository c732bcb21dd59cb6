// Corpus statistics in the usual table layout, plus a case-stratified split.

use epistact::report::{emit_stats, ReportFormat};
use epistact::split::{stratified_split, DEFAULT_RATIOS};
use epistact::stats::corpus_stats;
use epistact::synthetic::separable_corpus;
use epistact::Split;

fn main() {
    let corpus = separable_corpus(30, 2);
    let table = corpus_stats(&corpus).unwrap();
    print!(
        "{}",
        emit_stats(&[("synthetic".to_string(), &table)], ReportFormat::Text).unwrap()
    );

    let split = stratified_split(&corpus, DEFAULT_RATIOS, 13).unwrap();
    let corpus = corpus.with_split(split).unwrap();
    for part in Split::ALL {
        let docs = corpus.part(part).unwrap();
        let ids: Vec<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
        println!("{:<5} {:>2} documents: {}", part.as_str(), docs.len(), ids.join(" "));
    }
}
