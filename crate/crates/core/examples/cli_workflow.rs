// Drives the command-line interface end to end in a scratch directory:
// validate, stats, split, transform, train, predict, evaluate, confusion.

use epistact::cli::main_with_args;
use epistact::format::write_corpus;
use epistact::synthetic::separable_corpus;

fn run(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with_args(
        std::iter::once("epistact").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{args:?}: {}", String::from_utf8_lossy(&err));
    String::from_utf8(out).unwrap()
}

fn main() {
    let dir = std::env::temp_dir().join(format!("epistact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    write_corpus(p("corpus.jsonl"), &separable_corpus(30, 9)).unwrap();

    for args in [
        vec!["validate", "--in", &p("corpus.jsonl")],
        vec!["stats", "--in", &p("corpus.jsonl")],
        vec!["split", "--in", &p("corpus.jsonl"), "--out", &p("split.json")],
        vec!["transform", "--in", &p("corpus.jsonl"), "--out", &p("corpus.conll")],
        vec![
            "train",
            "--in",
            &p("corpus.jsonl"),
            "--split",
            &p("split.json"),
            "--strategy",
            "concat",
            "--epochs",
            "5",
            "--model",
            &p("model.json"),
        ],
        vec![
            "predict",
            "--in",
            &p("corpus.jsonl"),
            "--model",
            &p("model.json"),
            "--out",
            &p("pred.jsonl"),
        ],
        vec!["evaluate", "--gold", &p("corpus.jsonl"), "--pred", &p("pred.jsonl")],
        vec!["confusion", "--gold", &p("corpus.jsonl"), "--pred", &p("pred.jsonl")],
    ] {
        println!("$ epistact {}", args[0]);
        print!("{}", run(&args));
    }
    std::fs::remove_dir_all(&dir).ok();
}
