mod common;

use common::arb_document;
use epistact::conll::{document_to_conll, parse_conll};
use epistact::encoding::{
    apply_preference, from_concat, from_separate, labelsets_from_segments, labelsets_to_segments, repair_labelsets,
    segments_to_labelsets, to_concat, to_multioutput, to_separate, RepairPolicy,
};
use epistact::format::{parse_document, serialize_document};
use epistact::{Activity, BioTag, LabelSet};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn segments_survive_label_sets(doc in arb_document()) {
        let sets = segments_to_labelsets(&doc);
        prop_assert_eq!(sets.len(), doc.len());
        let back = labelsets_to_segments(&sets, RepairPolicy::Strict).unwrap();
        prop_assert_eq!(back, doc.segments.clone());
    }

    #[test]
    fn transformations_invert(doc in arb_document()) {
        let sets = segments_to_labelsets(&doc);
        let separate = Activity::ALL.map(|a| to_separate(&sets, a));
        prop_assert_eq!(from_separate(&separate).unwrap(), sets.clone());
        prop_assert_eq!(from_concat(&to_concat(&sets)), sets.clone());
        let multi = to_multioutput(&sets);
        for (t, s) in sets.iter().enumerate() {
            prop_assert_eq!(multi.record(t), s.tags());
        }
    }

    #[test]
    fn json_line_round_trip(doc in arb_document()) {
        let line = serialize_document(&doc);
        let back = parse_document(&line).unwrap();
        prop_assert_eq!(serialize_document(&back), line);
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn conll_round_trip(doc in arb_document()) {
        let text = document_to_conll(&doc).unwrap();
        let parsed = parse_conll(&text).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        prop_assert_eq!(parsed[0].labelsets.clone(), segments_to_labelsets(&doc));
        prop_assert_eq!(parsed[0].tokens.clone(), doc.tokens.clone());
    }

    #[test]
    fn preference_keeps_one_label_per_token(doc in arb_document()) {
        let pref = apply_preference(&doc);
        let sets: Vec<LabelSet> = pref.iter().map(|&l| LabelSet::from(l)).collect();
        prop_assert!(sets.iter().all(|s| s.typed_count() <= 1));
        // the reduction only ever removes labels
        let full = segments_to_labelsets(&doc);
        for (p, f) in sets.iter().zip(&full) {
            for a in Activity::ALL {
                if p.tag(a) != BioTag::O {
                    prop_assert_eq!(p.tag(a), f.tag(a));
                }
            }
        }
        prop_assert!(labelsets_to_segments(&sets, RepairPolicy::Strict).is_ok());
    }

    #[test]
    fn repair_makes_any_sequence_strict(tags in prop::collection::vec(prop::array::uniform4(0usize..3), 0..30)) {
        let sets: Vec<LabelSet> = tags.iter().map(|t| LabelSet::from_tags(t.map(|i| BioTag::ALL[i]))).collect();
        let (fixed, repairs) = repair_labelsets(&sets);
        prop_assert!(labelsets_to_segments(&fixed, RepairPolicy::Strict).is_ok());
        let lenient = labelsets_to_segments(&sets, RepairPolicy::IobRepair).unwrap();
        prop_assert_eq!(labelsets_from_segments(sets.len(), lenient.iter()), fixed.clone());
        if repairs == 0 {
            prop_assert_eq!(fixed, sets);
        }
    }
}

#[test]
fn strict_policy_rejects_dangling_inside() {
    let sets = [LabelSet::from_tags([BioTag::O, BioTag::O, BioTag::I, BioTag::O])];
    assert!(labelsets_to_segments(&sets, RepairPolicy::Strict).is_err());
    let lenient = labelsets_to_segments(&sets, RepairPolicy::IobRepair).unwrap();
    assert_eq!(lenient.len(), 1);
}
