#![allow(dead_code)]

use epistact::agreement::AnnotationStudy;
use epistact::{Activity, Document, Segment};
use proptest::prelude::*;
use serde_json::Value;

/// Studies scored with the reference unitizing-agreement implementation.
pub const ALPHA_FIXTURES: &str = include_str!("../fixtures/alpha_u.json");

const WORDS: [&str; 12] = [
    "the", "fever", "Maybe", "ADHD", ".", ",", "42", "because", "so", "test", "pupil", "reads",
];

/// Valid documents: 1 to 40 tokens, per activity a handful of
/// non-overlapping gold segments; different activities overlap freely.
pub fn arb_document() -> impl Strategy<Value = Document> {
    (1usize..40).prop_flat_map(|len| {
        let tokens = prop::collection::vec(0..WORDS.len(), len);
        let cuts = prop::collection::vec(prop::collection::vec((0..len, 1..=len), 0..5), 4);
        (tokens, cuts).prop_map(move |(tokens, cuts)| {
            let mut segments = Vec::new();
            for (a, spans) in Activity::ALL.iter().zip(cuts) {
                let mut taken: Vec<Segment> = Vec::new();
                for (b, l) in spans {
                    let s = Segment::new(*a, b, (b + l).min(len));
                    if !taken.iter().any(|t| t.overlaps(&s)) {
                        taken.push(s);
                    }
                }
                segments.extend(taken);
            }
            Document::new("gen", tokens.into_iter().map(|i| WORDS[i])).with_segments(segments)
        })
    })
}

/// Study described by a fixture record.
pub fn build_study(study: &Value) -> AnnotationStudy {
    let annotators: Vec<String> = {
        let mut v: Vec<String> = study["annotators"].as_object().unwrap().keys().cloned().collect();
        v.sort();
        v
    };
    let mut s = AnnotationStudy::new(annotators.clone());
    for (i, len) in study["sections"].as_array().unwrap().iter().enumerate() {
        s.add_section(format!("s{i}"), len.as_u64().unwrap() as usize);
    }
    for a in &annotators {
        for u in study["annotators"][a].as_array().unwrap() {
            let u = u.as_array().unwrap();
            s.add_unit(
                a,
                u[0].as_u64().unwrap() as usize,
                u[1].as_str().unwrap().parse().unwrap(),
                u[2].as_u64().unwrap() as usize,
                u[3].as_u64().unwrap() as usize,
            )
            .unwrap();
        }
    }
    s
}

/// Exact two-sided p by enumerating every choice of positions for the
/// first sample and counting `U` directly from pairwise comparisons.
pub fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (n, total) = (a.len(), pooled.len());
    let nm = (a.len() * b.len()) as i64;
    // doubled U: 2 per win, 1 per tie
    let doubled_u = |mask: u32| -> i64 {
        let mut u = 0;
        for i in (0..total).filter(|i| mask & (1 << i) != 0) {
            for j in (0..total).filter(|j| mask & (1 << j) == 0) {
                if pooled[i] > pooled[j] {
                    u += 2;
                } else if pooled[i] == pooled[j] {
                    u += 1;
                }
            }
        }
        u
    };
    let observed = (doubled_u((1u32 << n) - 1) - nm).abs();
    let (mut extreme, mut all) = (0u64, 0u64);
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        all += 1;
        if (doubled_u(mask) - nm).abs() >= observed {
            extreme += 1;
        }
    }
    extreme as f64 / all as f64
}
