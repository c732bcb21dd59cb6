// Scores a prediction with the Hamming loss and the three challenge
// metrics, then prints the confusion matrix over activity sets.

use epistact::encoding::segments_to_labelsets;
use epistact::metrics::{evaluate, hamming_loss, macro_f1, ConfusionMatrix};
use epistact::report::{emit_eval, EvalRow, ReportFormat};
use epistact::{Activity, BioTag, Document, Label, LabelSet, Segment};

fn main() {
    // two tokens, one wrong membership decision out of 2 x 9
    let gold = [LabelSet::from(Label::Begin(Activity::EE)), LabelSet::outside()];
    let pred = [
        LabelSet::from(Label::Begin(Activity::EE)),
        LabelSet::from(Label::Begin(Activity::EE)),
    ];
    println!("HL of the two-token example: {}", hamming_loss(&gold, &pred).unwrap());

    let f1 = macro_f1(
        &BioTag::ALL,
        &[BioTag::B, BioTag::I, BioTag::O, BioTag::O],
        &[BioTag::B, BioTag::O, BioTag::O, BioTag::O],
    );
    println!("macro-F1 over B, I, O: {:.2}\n", f1.unwrap());

    let tokens = "we saw fever and rash so we suspected measles".split(' ');
    let gold_doc = Document::new("d", tokens.clone()).with_segments([
        Segment::new(Activity::EG, 0, 5),
        Segment::new(Activity::EE, 2, 5),
        Segment::new(Activity::DC, 5, 9),
    ]);
    let pred_doc = Document::new("d", tokens).with_segments([
        Segment::new(Activity::EG, 0, 3),
        Segment::new(Activity::EE, 2, 5),
        Segment::new(Activity::HG, 6, 9),
    ]);
    let g = segments_to_labelsets(&gold_doc);
    let p = segments_to_labelsets(&pred_doc);
    let report = evaluate(&g, &p).unwrap();
    print!(
        "{}",
        emit_eval(&[EvalRow::new("example", &report)], ReportFormat::Text).unwrap()
    );

    println!("\nconfusion (row percentages):");
    print!("{}", ConfusionMatrix::from_labelsets(&g, &p).unwrap().to_csv(true));
}
