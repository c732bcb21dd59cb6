// Unitizing agreement between three annotators and a majority-vote gold
// standard built from their segments.

use epistact::agreement::{agreement_report, majority_gold, AnnotationStudy};
use epistact::report::{emit_agreement, undecided_json_lines, ReportFormat};
use epistact::{Activity::*, Corpus, Document, Segment};

fn main() {
    let tokens: Vec<String> = (0..40).map(|i| format!("w{i}")).collect();
    let doc = Document::new("case-7", tokens).with_segments([
        Segment::new(EE, 2, 10).by("ann1"),
        Segment::new(EE, 2, 10).by("ann2"),
        Segment::new(EE, 3, 10).by("ann3"),
        Segment::new(DC, 12, 30).by("ann1"),
        Segment::new(DC, 12, 30).by("ann2"),
        Segment::new(HG, 12, 30).by("ann3"),
        Segment::new(EE, 20, 28).by("ann1"),
        Segment::new(EE, 20, 28).by("ann3"),
    ]);
    let corpus = Corpus::new(vec![doc]);

    let study = AnnotationStudy::from_corpus(&corpus, None).unwrap();
    let report = agreement_report(&study).unwrap();
    print!(
        "{}",
        emit_agreement(&[("example".to_string(), &report)], ReportFormat::Text).unwrap()
    );

    let annotators = ["ann1", "ann2", "ann3"].map(String::from);
    let gold = majority_gold(&corpus, &annotators, 2).unwrap();
    println!("\ngold segments:");
    for s in &gold.corpus.documents[0].segments {
        println!("  {s}");
    }
    println!("undecided:");
    print!("{}", undecided_json_lines(&gold.undecided).unwrap());
}
