// Builds a small corpus in memory, writes it as JSON lines, reads it back
// and shows how malformed input is reported.

use epistact::format::{parse_corpus, serialize_corpus};
use epistact::{Activity, Corpus, Document, Domain, Error, Segment};

fn main() {
    let corpus = Corpus::new(vec![
        Document::new("med-001", "Maybe it is an infection because of the fever .".split(' '))
            .with_domain(Domain::Medicine)
            .with_case("case-1")
            .with_segments([Segment::new(Activity::HG, 0, 5), Segment::new(Activity::EE, 5, 9)]),
        Document::new("ted-001", "The pupil should get a reading test .".split(' '))
            .with_domain(Domain::Teaching)
            .with_case("case-2")
            .with_segment(Segment::new(Activity::EG, 0, 7).by("ann1")),
    ]);
    corpus.validate().unwrap();

    let jsonl = serialize_corpus(&corpus);
    print!("{jsonl}");
    let parsed = parse_corpus(&jsonl).unwrap();
    assert_eq!(parsed, corpus);
    assert_eq!(serialize_corpus(&parsed), jsonl);

    let broken = jsonl.replace("\"end\":9", "\"end\":90");
    match parse_corpus(&broken) {
        Err(e) if matches!(e.innermost(), Error::SegmentOutOfRange { .. }) => println!("\nrejected: {e}"),
        other => panic!("expected a range error, got {other:?}"),
    }
    match parse_corpus("{\"doc_id\": 1}\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => panic!("expected a parse error"),
    }
}
