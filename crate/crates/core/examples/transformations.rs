// Walks one annotated sentence through every representation: label sets,
// the separate / concatenated / multi-output transformations, the
// preference reduction and the CoNLL export.

use epistact::conll::document_to_conll;
use epistact::encoding::{
    apply_preference, from_concat, from_separate, labelsets_to_segments, segments_to_labelsets, to_concat,
    to_multioutput, to_separate, RepairPolicy,
};
use epistact::{Activity, Document, Segment};

fn main() {
    let text = "In the end , I settled on ADHD since his script seems chaotic and unorganised \
                and because he seems to have some friends despite his difficult behaviour .";
    let doc = Document::new("worked-example", text.split_whitespace()).with_segments([
        Segment::new(Activity::DC, 0, 27),
        Segment::new(Activity::EE, 8, 15),
        Segment::new(Activity::EE, 16, 27),
    ]);
    doc.validate().expect("valid document");

    let sets = segments_to_labelsets(&doc);
    let concat = to_concat(&sets);
    let pref = apply_preference(&doc);
    println!("{:<12} {:<16} {:<9} pref", "token", "label set", "concat");
    for (t, tok) in doc.tokens.iter().enumerate() {
        println!(
            "{:<12} {:<16} {:<9} {}",
            tok,
            sets[t].to_string(),
            concat[t].to_string(),
            pref[t]
        );
    }

    // every transformation is invertible on well-formed input
    let separate = Activity::ALL.map(|a| to_separate(&sets, a));
    assert_eq!(from_separate(&separate).unwrap(), sets);
    assert_eq!(from_concat(&concat), sets);
    let multi = to_multioutput(&sets);
    assert_eq!(multi.record(8), concat[8].0);
    let back = labelsets_to_segments(&sets, RepairPolicy::Strict).unwrap();
    assert_eq!(back, doc.segments);

    // the preference order keeps DC and drops both overlapping EE segments
    let kept: Vec<_> = pref.iter().filter(|l| l.activity() == Some(Activity::EE)).collect();
    println!("\nEE tokens left after the preference reduction: {}", kept.len());

    println!("\n{}", document_to_conll(&doc).unwrap());
}
