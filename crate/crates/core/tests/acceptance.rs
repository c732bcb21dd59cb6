// Acceptance criteria, one PASS/FAIL line each. The published-corpus check
// runs only when EPISTACT_MED and EPISTACT_TED point at converted corpora.

mod common;

use common::{arb_document, brute_force_p, build_study, ALPHA_FIXTURES};
use epistact::agreement::{alpha_u, majority_gold_document, merged_alpha, AlphaMode, AnnotationStudy};
use epistact::encoding::{labelsets_to_segments, segments_to_labelsets, RepairPolicy};
use epistact::format::read_corpus;
use epistact::metrics::{hamming_loss, m_a, macro_f1, mann_whitney_u, ActivitySet};
use epistact::stats::corpus_stats;
use epistact::synthetic::separable_corpus;
use epistact::tagger::{MajBaseline, SequenceTagger, Strategy, Trainer};
use epistact::{Activity, BioTag, Corpus, Document, Label, LabelSet, Segment};
use proptest::test_runner::{Config, TestRunner};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;
use Activity::*;

type Criterion = (&'static str, fn() -> Outcome);

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::*;

fn check(cond: bool, pass: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Pass(pass.into())
    } else {
        Fail(fail.into())
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn round_trip() -> Outcome {
    let start = Instant::now();
    let result = runner(1000).run(&arb_document(), |doc| {
        let back = labelsets_to_segments(&segments_to_labelsets(&doc), RepairPolicy::Strict).unwrap();
        let mut expected = doc.segments.clone();
        expected.sort();
        let mut got = back;
        got.sort();
        assert_eq!(got, expected);
        Ok(())
    });
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok(()) => check(
            secs < 5.0,
            format!("1000 documents in {secs:.2}s"),
            format!("took {secs:.2}s"),
        ),
        Err(e) => Fail(e.to_string()),
    }
}

fn hamming() -> Outcome {
    let gold = [LabelSet::from(Label::Begin(EE)), LabelSet::from(Label::Inside(EE))];
    let pred = [LabelSet::outside(), LabelSet::from(Label::Inside(EE))];
    let hl = hamming_loss(&gold, &pred).unwrap();
    if (hl - 1.0 / 9.0).abs() >= 1e-12 {
        return Fail(format!("HL = {hl}"));
    }
    let result = runner(1000).run(&arb_document(), |doc| {
        let g = segments_to_labelsets(&doc);
        assert_eq!(hamming_loss(&g, &g).unwrap(), 0.0);
        Ok(())
    });
    match result {
        Ok(()) => Pass(format!("HL = {hl:.15}; HL(g, g) = 0 on 1000 documents")),
        Err(e) => Fail(e.to_string()),
    }
}

fn activity_bound() -> Outcome {
    let sets: Vec<ActivitySet> = ActivitySet::all().into_iter().take(10).collect();
    let docs = sets
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Document::new(format!("d{i}"), ["w", "w"])
                .with_segments(s.members().into_iter().map(|a| Segment::new(a, 0, 2)))
        })
        .collect();
    let corpus = Corpus::new(docs);
    let gold: Vec<LabelSet> = corpus.documents.iter().flat_map(segments_to_labelsets).collect();
    let distinct = gold
        .iter()
        .map(|&s| ActivitySet::from(s))
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    let score = m_a(&gold, &gold).unwrap();
    check(
        distinct == 10 && (score - 62.5).abs() < 1e-9,
        format!("M_A = {score} with {distinct} gold activity sets"),
        format!("M_A = {score} with {distinct} gold activity sets"),
    )
}

fn macro_fixture() -> Outcome {
    use BioTag::*;
    let f = macro_f1(&BioTag::ALL, &[B, I, O, O], &[B, O, O, O]).unwrap();
    check(
        (f - 60.0).abs() < 1e-9,
        format!("macro-F1 = {f:.2}"),
        format!("macro-F1 = {f}"),
    )
}

fn alpha() -> Outcome {
    let mut s = AnnotationStudy::new(["a", "b"]);
    s.add_section("s0", 30);
    s.add_section("s1", 20);
    let units = [
        (0, HG, 0, 6),
        (0, EE, 3, 9),
        (0, DC, 10, 18),
        (0, EG, 20, 25),
        (1, EE, 2, 7),
        (1, DC, 5, 15),
        (1, HG, 15, 19),
    ];
    for a in ["a", "b"] {
        for &(sec, act, b, e) in &units {
            s.add_unit(a, sec, act, b, e).unwrap();
        }
    }
    let mut modes = vec![AlphaMode::Overall, AlphaMode::SegmentOnly];
    modes.extend(Activity::ALL.map(AlphaMode::Category));
    for m in &modes {
        let v = alpha_u(&s, *m).unwrap();
        if v != 1.0 {
            return Fail(format!("{m:?} = {v}"));
        }
    }
    for (i, &x) in Activity::ALL.iter().enumerate() {
        for &y in &Activity::ALL[i + 1..] {
            if merged_alpha(&s, x, y).unwrap() != 1.0 {
                return Fail(format!("merged {x}&{y} below 1"));
            }
        }
    }
    let fixtures: Vec<serde_json::Value> = serde_json::from_str(ALPHA_FIXTURES).unwrap();
    let mut worst: f64 = 0.0;
    for f in &fixtures {
        let study = build_study(&f["study"]);
        let e = &f["expected"];
        let mut pairs = vec![
            (alpha_u(&study, AlphaMode::Overall), &e["overall"]),
            (alpha_u(&study, AlphaMode::SegmentOnly), &e["segment"]),
        ];
        for a in Activity::ALL {
            pairs.push((alpha_u(&study, AlphaMode::Category(a)), &e[format!("category_{a}")]));
        }
        for (got, expected) in pairs {
            match (got, expected.as_f64()) {
                (Ok(v), Some(x)) => worst = worst.max((v - x).abs()),
                (Err(_), None) => {}
                (got, x) => return Fail(format!("{}: {got:?} vs {x:?}", f["name"])),
            }
        }
    }
    check(
        fixtures.len() >= 5 && worst < 1e-6,
        format!(
            "identical studies score 1.0 in {} modes; {} fixtures within {worst:.1e}",
            modes.len() + 6,
            fixtures.len()
        ),
        format!("largest fixture deviation {worst:e}"),
    )
}

fn voting() -> Outcome {
    let ann = |entries: &[(&str, Vec<Segment>)]| -> BTreeMap<String, Vec<Segment>> {
        entries.iter().map(|(a, s)| (a.to_string(), s.clone())).collect()
    };
    let both = vec![Segment::new(EE, 0, 4), Segment::new(DC, 2, 6)];
    let r = majority_gold_document(
        "x",
        &ann(&[
            ("a", both.clone()),
            ("b", both.clone()),
            ("c", both.clone()),
            ("d", both.clone()),
            ("e", both.clone()),
        ]),
        4,
        5,
    )
    .unwrap();
    if r.gold != both || !r.undecided.is_empty() {
        return Fail(format!("unanimous: {r:?}"));
    }
    let three = vec![Segment::new(EE, 2, 7)];
    let r = majority_gold_document(
        "x",
        &ann(&[
            ("a", three.clone()),
            ("b", three.clone()),
            ("c", three.clone()),
            ("d", vec![]),
            ("e", vec![]),
        ]),
        4,
        5,
    )
    .unwrap();
    if !r.gold.is_empty()
        || r.undecided.len() != 1
        || r.undecided[0].segment() != three[0]
        || r.undecided[0].support != 3
    {
        return Fail(format!("3-of-5: {r:?}"));
    }
    let long = vec![Segment::new(EE, 0, 5)];
    let short = vec![Segment::new(EE, 0, 4)];
    let r = majority_gold_document(
        "x",
        &ann(&[
            ("a", long.clone()),
            ("b", long.clone()),
            ("c", long.clone()),
            ("d", short.clone()),
        ]),
        3,
        4,
    )
    .unwrap();
    check(
        r.gold == long && r.undecided.len() == 1 && r.undecided[0].segment() == short[0] && r.undecided[0].support == 1,
        "unanimous, 3-of-5 and boundary-mismatch partitions exact",
        format!("boundary mismatch: {r:?}"),
    )
}

fn mann_whitney() -> Outcome {
    let mut cases = 0;
    for total in 2..=12usize {
        for n in 1..total {
            for shift in 0..total {
                let values: Vec<f64> = (0..total).map(|i| ((i * 5 + shift) % total) as f64).collect();
                let (a, b) = values.split_at(n);
                let exact = mann_whitney_u(a, b, 0.05, 1).unwrap().p_value;
                if exact.to_bits() != brute_force_p(a, b).to_bits() {
                    return Fail(format!("n={n} m={} differs", total - n));
                }
                cases += 1;
            }
        }
    }
    let p = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05, 1)
        .unwrap()
        .p_value;
    let a: Vec<f64> = (0..10).map(|i| i as f64 * 1.3).collect();
    let b: Vec<f64> = (0..10).map(|i| i as f64 * 1.7 + 0.1).collect();
    let start = Instant::now();
    mann_whitney_u(&a, &b, 0.05, 1).unwrap();
    let secs = start.elapsed().as_secs_f64();
    check(
        p == 0.1 && secs < 1.0,
        format!(
            "{cases} samples bit-identical to enumeration; p = {p}; n = m = 10 in {:.1}ms",
            secs * 1e3
        ),
        format!("p = {p}, n = m = 10 took {secs:.3}s"),
    )
}

fn memorization() -> Outcome {
    let corpus = separable_corpus(20, 13);
    let docs: Vec<&Document> = corpus.documents.iter().collect();
    let start = Instant::now();
    let mut trainer = Trainer::new(&docs, Strategy::Concat, 13).unwrap();
    for _ in 0..25 {
        trainer.epoch();
    }
    let model = trainer.model();
    let secs = start.elapsed().as_secs_f64();
    let gold: Vec<LabelSet> = docs.iter().flat_map(|d| segments_to_labelsets(d)).collect();
    let pred: Vec<LabelSet> = docs.iter().flat_map(|d| model.tag(&d.tokens).labelsets).collect();
    let hl = hamming_loss(&gold, &pred).unwrap();
    let mut again = Trainer::new(&docs, Strategy::Concat, 13).unwrap();
    for _ in 0..25 {
        again.epoch();
    }
    let identical = again.model().to_json() == model.to_json();
    check(
        hl <= 0.01 && secs < 60.0 && identical,
        format!("training HL = {hl:.4} after 25 epochs in {secs:.2}s; models byte-identical"),
        format!("HL = {hl}, {secs:.2}s, identical = {identical}"),
    )
}

fn maj() -> Outcome {
    let expected = LabelSet::from(Label::Inside(EE));
    let mut tokens = 0;
    for d in &separable_corpus(30, 1).documents {
        let p = MajBaseline.tag(&d.tokens);
        if p.labelsets.len() != d.len() || p.labelsets.iter().any(|&s| s != expected) {
            return Fail(format!("document {}", d.doc_id));
        }
        tokens += d.len();
    }
    let result = runner(500).run(&arb_document(), |doc| {
        assert!(MajBaseline.tag(&doc.tokens).labelsets.iter().all(|&s| s == expected));
        Ok(())
    });
    match result {
        Ok(()) => Pass(format!(
            "{{I-EE}} on {tokens} synthetic tokens and 500 generated documents"
        )),
        Err(e) => Fail(e.to_string()),
    }
}

fn published_corpus() -> Outcome {
    let (Ok(med), Ok(ted)) = (std::env::var("EPISTACT_MED"), std::env::var("EPISTACT_TED")) else {
        return Skip("set EPISTACT_MED and EPISTACT_TED to the converted corpora".into());
    };
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (name, path, ee_count, maj_m_a) in [("MeD", med, 2124, 4.25), ("TeD", ted, 2671, 4.42)] {
        let corpus = match read_corpus(&path) {
            Ok(c) => c,
            Err(e) => return Fail(format!("{path}: {e}")),
        };
        let stats = corpus_stats(&corpus).unwrap();
        let ee = stats.activity(EE);
        if ee.count != ee_count {
            problems.push(format!("{name} EE # = {}", ee.count));
        }
        if name == "MeD" {
            if (ee.avg_count - 3.27).abs() > 0.005 {
                problems.push(format!("MeD EE av. # = {:.3}", ee.avg_count));
            }
            let dc_ee = stats.overlap(DC, EE).map_or(0, |o| o.count);
            if dc_ee != 342 {
                problems.push(format!("MeD DC/EE = {dc_ee}"));
            }
        }
        let gold: Vec<LabelSet> = corpus.documents.iter().flat_map(segments_to_labelsets).collect();
        let pred: Vec<LabelSet> = corpus
            .documents
            .iter()
            .flat_map(|d| MajBaseline.tag(&d.tokens).labelsets)
            .collect();
        let hl = hamming_loss(&gold, &pred).unwrap();
        let score = m_a(&gold, &pred).unwrap();
        if (hl - 0.11).abs() > 0.005 || (score - maj_m_a).abs() > 0.05 {
            problems.push(format!("{name} maj HL = {hl:.4}, M_A = {score:.3}"));
        }
        summary.push(format!(
            "{name} EE # = {}, maj HL = {hl:.2}, M_A = {score:.2}",
            ee.count
        ));
    }
    check(problems.is_empty(), summary.join("; "), problems.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("round trip of 1000 documents", round_trip),
        ("hamming loss fixture", hamming),
        ("activity macro-F1 bound", activity_bound),
        ("macro-F1 fixture", macro_fixture),
        ("unitizing alpha", alpha),
        ("majority voting", voting),
        ("Mann-Whitney exactness", mann_whitney),
        ("tagger memorization", memorization),
        ("majority baseline", maj),
        ("published corpus statistics", published_corpus),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Fail(format!("panicked: {msg}"))
        });
        let ms = start.elapsed().as_millis();
        let (tag, detail) = match outcome {
            Pass(d) => ("PASS", d),
            Skip(d) => ("SKIP", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} ({ms} ms): {detail}", i + 1);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
