mod common;

use common::{arb_document, brute_force_p};
use epistact::encoding::segments_to_labelsets;
use epistact::metrics::{
    evaluate, hamming_loss, m_a, m_o, m_s, macro_f1, mann_whitney_u, normal_approximation_p, overlap_tokens,
    ActivitySet, ConfusionMatrix,
};
use epistact::{Activity, BioTag, Label, LabelSet};
use proptest::prelude::*;
use std::time::Instant;
use Activity::*;

fn set(labels: &[Label]) -> LabelSet {
    LabelSet::from_labels(labels.iter().copied()).unwrap()
}

fn arb_labelsets(len: usize) -> impl Strategy<Value = Vec<LabelSet>> {
    prop::collection::vec(prop::array::uniform4(0usize..3), len).prop_map(|v| {
        v.into_iter()
            .map(|t| LabelSet::from_tags(t.map(|i| BioTag::ALL[i])))
            .collect()
    })
}

fn doc_and_prediction() -> impl Strategy<Value = (Vec<LabelSet>, Vec<LabelSet>)> {
    arb_document().prop_flat_map(|d| {
        let gold = segments_to_labelsets(&d);
        let n = gold.len();
        (Just(gold), arb_labelsets(n))
    })
}

#[test]
fn hamming_hand_example() {
    let gold = [set(&[Label::Begin(EE)]), set(&[Label::Inside(EE)])];
    let pred = [LabelSet::outside(), set(&[Label::Inside(EE)])];
    // token 0 misses B-EE and wrongly claims O: 2 of 9; token 1 is right
    let expected = (2.0 / 9.0 + 0.0) / 2.0;
    assert!((hamming_loss(&gold, &pred).unwrap() - expected).abs() < 1e-12);
    assert!(hamming_loss(&gold, &pred[..1]).is_err());
}

#[test]
fn macro_f1_hand_example() {
    use BioTag::*;
    let gold = [B, I, O, O];
    let pred = [B, O, O, O];
    // F1(B) = 1, F1(I) = 0, F1(O): P = 2/3, R = 1 -> 0.8
    assert!((macro_f1(&BioTag::ALL, &gold, &pred).unwrap() - 60.0).abs() < 1e-9);
    let g: Vec<LabelSet> = gold.iter().map(|&t| LabelSet::from_tags([O, O, t, O])).collect();
    let p: Vec<LabelSet> = pred.iter().map(|&t| LabelSet::from_tags([O, O, t, O])).collect();
    assert!((m_s(&g, &p, EE).unwrap() - 60.0).abs() < 1e-9);
}

#[test]
fn activity_bound_with_ten_gold_sets() {
    let ten: Vec<ActivitySet> = ActivitySet::all().into_iter().take(10).collect();
    let mut gold = Vec::new();
    for s in &ten {
        let mut tags = [BioTag::O; 4];
        for a in s.members() {
            tags[a.index()] = BioTag::I;
        }
        gold.push(LabelSet::from_tags(tags));
    }
    let distinct: std::collections::BTreeSet<ActivitySet> = gold.iter().map(|&s| ActivitySet::from(s)).collect();
    assert_eq!(distinct.len(), 10);
    assert!((m_a(&gold, &gold).unwrap() - 62.5).abs() < 1e-9);
}

#[test]
fn activity_two_token_example() {
    let gold = [set(&[Label::Begin(EE)]), set(&[Label::Inside(EE), Label::Begin(DC)])];
    let pred = [set(&[Label::Begin(EE)]), set(&[Label::Inside(EE)])];
    // {EE}: tp 1, fp 1, fn 0 -> P 1/2, R 1, F1 2/3; every other class 0
    let expected = 100.0 * (2.0 / 3.0) / 16.0;
    assert!((m_a(&gold, &pred).unwrap() - expected).abs() < 1e-12);
    let c = ConfusionMatrix::from_labelsets(&gold, &pred).unwrap();
    assert_eq!(
        c.count(
            ActivitySet::from_activities([EE, DC]),
            ActivitySet::from_activities([EE])
        ),
        1
    );
}

#[test]
fn overlap_hand_example() {
    // EE [0,3) and DC [1,3); prediction has EE only
    let gold = [
        set(&[Label::Begin(EE)]),
        set(&[Label::Inside(EE), Label::Begin(DC)]),
        set(&[Label::Inside(EE), Label::Inside(DC)]),
    ];
    let pred = [
        set(&[Label::Begin(EE)]),
        set(&[Label::Inside(EE)]),
        set(&[Label::Inside(EE)]),
    ];
    assert_eq!(overlap_tokens(&gold), vec![1, 2]);
    assert_eq!(m_o(&gold, &pred, DC).unwrap(), Some(0.0));
    // EE on the overlap: gold [I, I], pred [I, I] -> only I scores
    assert!((m_o(&gold, &pred, EE).unwrap().unwrap() - 100.0 / 3.0).abs() < 1e-12);
    assert_eq!(m_o(&pred, &pred, EE).unwrap(), None);
}

#[test]
fn mann_whitney_small_fixture() {
    let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05, 1).unwrap();
    assert_eq!(r.u, 0.0);
    assert_eq!(r.p_value, 0.1);
    assert_eq!(r.p_value, brute_force_p(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]));
    let same = mann_whitney_u(&[5.0; 3], &[5.0; 3], 0.05, 1).unwrap();
    assert_eq!(same.p_value, 1.0);
    assert!(!same.significant);
}

#[test]
fn mann_whitney_every_size_pair_up_to_twelve() {
    for total in 2..=12usize {
        for n in 1..total {
            // interleaved distinct values so that U is not extreme
            let values: Vec<f64> = (0..total).map(|i| ((i * 7) % total) as f64 + 0.25).collect();
            let (a, b) = values.split_at(n);
            let r = mann_whitney_u(a, b, 0.05, 1).unwrap();
            assert_eq!(
                r.p_value.to_bits(),
                brute_force_p(a, b).to_bits(),
                "n={n} m={}",
                total - n
            );
            assert!(r.exact);
        }
    }
}

#[test]
fn mann_whitney_ten_runs_is_fast() {
    let a: Vec<f64> = (0..10).map(|i| 20.0 + i as f64 * 0.31).collect();
    let b: Vec<f64> = (0..10).map(|i| 21.0 + i as f64 * 0.29).collect();
    let start = Instant::now();
    let r = mann_whitney_u(&a, &b, 0.05, 3).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert!(r.exact);
    // away from the tails the normal approximation is close
    assert!((r.p_value - normal_approximation_p(&a, &b)).abs() < 0.01);
}

proptest! {
    #[test]
    fn mann_whitney_matches_brute_force(
        (n, m) in (1usize..=11).prop_flat_map(|n| (Just(n), 1usize..=(12 - n))),
        seed in any::<u64>(),
    ) {
        // distinct values in a pseudo-random order
        let total = n + m;
        let mut values: Vec<f64> = (0..total).map(|i| i as f64 * 1.5).collect();
        let mut s = seed;
        for i in (1..total).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            values.swap(i, (s >> 33) as usize % (i + 1));
        }
        let (a, b) = values.split_at(n);
        let r = mann_whitney_u(a, b, 0.05, 1).unwrap();
        prop_assert_eq!(r.p_value.to_bits(), brute_force_p(a, b).to_bits());
        prop_assert!(r.u >= 0.0 && r.u <= (n * m) as f64);
        prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn mann_whitney_with_ties_matches_brute_force(
        a in prop::collection::vec(0u8..4, 1..6),
        b in prop::collection::vec(0u8..4, 1..6),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let r = mann_whitney_u(&a, &b, 0.05, 1).unwrap();
        prop_assert_eq!(r.p_value.to_bits(), brute_force_p(&a, &b).to_bits());
    }

    #[test]
    fn hamming_properties((gold, pred) in doc_and_prediction()) {
        prop_assert_eq!(hamming_loss(&gold, &gold).unwrap(), 0.0);
        let hl = hamming_loss(&gold, &pred).unwrap();
        prop_assert_eq!(hl, hamming_loss(&pred, &gold).unwrap());
        prop_assert!((0.0..=1.0).contains(&hl));
    }

    #[test]
    fn scores_stay_in_range((gold, pred) in doc_and_prediction()) {
        let r = evaluate(&gold, &pred).unwrap();
        prop_assert!((0.0..=100.0).contains(&r.m_a));
        for a in Activity::ALL {
            prop_assert!((0.0..=100.0).contains(&r.m_s[&a]));
            if let Some(v) = r.m_o[&a] {
                prop_assert!((0.0..=100.0).contains(&v));
            }
        }
    }

    #[test]
    fn perfect_activity_score_counts_gold_sets((gold, _) in doc_and_prediction()) {
        let k = gold.iter().map(|&s| ActivitySet::from(s)).collect::<std::collections::BTreeSet<_>>().len();
        prop_assert!((m_a(&gold, &gold).unwrap() - 100.0 * k as f64 / 16.0).abs() < 1e-9);
    }

    #[test]
    fn segmentation_ignores_other_activities((gold, pred) in doc_and_prediction(), scramble in any::<u64>()) {
        // rewrite every activity except EE in the prediction
        let scrambled: Vec<LabelSet> = pred
            .iter()
            .enumerate()
            .map(|(t, s)| {
                let mut s = *s;
                for a in [HG, EG, DC] {
                    s.set(a, BioTag::ALL[((scramble >> (t % 60)) as usize + a.index()) % 3]);
                }
                s
            })
            .collect();
        prop_assert_eq!(m_s(&gold, &pred, EE).unwrap(), m_s(&gold, &scrambled, EE).unwrap());
        prop_assert_eq!(m_o(&gold, &pred, EE).unwrap(), m_o(&gold, &scrambled, EE).unwrap());
    }

    #[test]
    fn overlap_score_is_segmentation_on_overlap_tokens((gold, pred) in doc_and_prediction()) {
        let idx = overlap_tokens(&gold);
        let g: Vec<LabelSet> = idx.iter().map(|&i| gold[i]).collect();
        let p: Vec<LabelSet> = idx.iter().map(|&i| pred[i]).collect();
        for a in Activity::ALL {
            let expected = if idx.is_empty() { None } else { Some(m_s(&g, &p, a).unwrap()) };
            prop_assert_eq!(m_o(&gold, &pred, a).unwrap(), expected);
        }
    }

    #[test]
    fn confusion_rows_sum_to_hundred((gold, pred) in doc_and_prediction()) {
        let c = ConfusionMatrix::from_labelsets(&gold, &pred).unwrap();
        for g in ActivitySet::all() {
            if c.row_total(g) > 0 {
                let sum: f64 = ActivitySet::all().iter().map(|&p| c.percent(g, p).unwrap()).sum();
                prop_assert!((sum - 100.0).abs() < 1e-9);
            }
        }
    }
}
