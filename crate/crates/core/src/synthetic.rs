//! Generator for small corpora whose labels are a function of the words.
//!
//! Every word class maps to exactly one label set: each activity has its
//! own opening word and body words, evidence evaluation nested inside a
//! conclusion uses separate words again, and filler words are outside any
//! segment. A tagger that sees the current word can therefore fit the
//! corpus perfectly, which makes these corpora useful for convergence and
//! memorization checks.

use crate::model::{Activity, Corpus, Document, Domain, Segment};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FILLER: [&str; 8] = ["the", "patient", "was", "seen", "and", "then", "we", "noted"];
const CASES: usize = 4;
const NESTED_MARKER: &str = "given";
const NESTED_BODY: [&str; 3] = ["history", "symptoms", "findings"];

fn marker(a: Activity) -> &'static str {
    match a {
        Activity::HG => "perhaps",
        Activity::EG => "test",
        Activity::EE => "because",
        Activity::DC => "therefore",
    }
}

fn body(a: Activity) -> &'static [&'static str] {
    match a {
        Activity::HG => &["infection", "virus", "allergy", "anemia"],
        Activity::EG => &["blood", "scan", "result", "sample"],
        Activity::EE => &["fever", "cough", "rash", "pain"],
        Activity::DC => &["diagnosis", "settled", "final", "confirmed"],
    }
}

struct Builder<'a> {
    rng: &'a mut ChaCha8Rng,
    tokens: Vec<String>,
    segments: Vec<Segment>,
}

impl Builder<'_> {
    fn push_from(&mut self, words: &[&str], min: usize, max: usize) {
        let n = self.rng.gen_range(min..=max);
        for _ in 0..n {
            self.tokens.push(words.choose(self.rng).unwrap().to_string());
        }
    }

    fn segment(&mut self, a: Activity) {
        let begin = self.tokens.len();
        self.tokens.push(marker(a).to_string());
        self.push_from(body(a), 1, 4);
        self.segments.push(Segment::new(a, begin, self.tokens.len()));
    }

    /// A conclusion containing an evidence evaluation.
    fn nested(&mut self) {
        let begin = self.tokens.len();
        self.tokens.push(marker(Activity::DC).to_string());
        self.push_from(body(Activity::DC), 0, 2);
        let inner = self.tokens.len();
        self.tokens.push(NESTED_MARKER.to_string());
        self.push_from(&NESTED_BODY, 1, 3);
        self.segments.push(Segment::new(Activity::EE, inner, self.tokens.len()));
        self.push_from(body(Activity::DC), 0, 2);
        self.segments.push(Segment::new(Activity::DC, begin, self.tokens.len()));
    }
}

/// `documents` generated documents with ids `syn-000`, `syn-001`, ...;
/// case ids cycle over four scenarios.
pub fn separable_corpus(documents: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..documents)
        .map(|i| {
            let mut b = Builder {
                rng: &mut rng,
                tokens: Vec::new(),
                segments: Vec::new(),
            };
            let chunks = b.rng.gen_range(3..=5);
            for _ in 0..chunks {
                b.push_from(&FILLER, 1, 3);
                match b.rng.gen_range(0..5) {
                    4 => b.nested(),
                    k => b.segment(Activity::ALL[k]),
                }
            }
            b.push_from(&FILLER, 0, 2);
            b.tokens.push(".".to_string());
            let (tokens, segments) = (b.tokens, b.segments);
            Document::new(format!("syn-{i:03}"), tokens)
                .with_domain(Domain::Medicine)
                .with_case(format!("case-{}", i % CASES))
                .with_segments(segments)
        })
        .collect();
    Corpus::new(docs)
}
