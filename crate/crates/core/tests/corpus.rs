use std::fs;
use std::path::PathBuf;

use qdt::dsl::{parse_model, parse_query, ErrorKind};
use qdt::models;
use qdt::network::stratified_joint;

fn dir(name: &str) -> Vec<(String, String)> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name);
    let mut files: Vec<_> = fs::read_dir(path)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "qdt"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn accepted_models_round_trip() {
    let mut corpus = dir("accept");
    corpus.push(("umbrella.qdt".into(), models::UMBRELLA.into()));
    corpus.push(("switch.qdt".into(), models::SWITCH.into()));
    for (name, text) in corpus {
        let doc = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let out = doc.serialize();
        let again = parse_model(&out).unwrap();
        assert_eq!(again, doc, "{name}");
        assert_eq!(stratified_joint(&again.network), stratified_joint(&doc.network));
        assert_eq!(again.serialize(), out, "{name}");
        assert!(!out.contains('\r'));
    }
}

#[test]
fn rejected_models_carry_positions() {
    let expected = [
        ("bad_token.qdt", ErrorKind::Lexical, 3, 17, "unexpected character"),
        ("cycle.qdt", ErrorKind::Semantic, 5, 6, "cycle"),
        ("duplicate_row.qdt", ErrorKind::Semantic, 4, 1, "duplicate table row"),
        ("missing_comma.qdt", ErrorKind::Syntax, 3, 14, "unexpected `F`"),
        ("missing_row.qdt", ErrorKind::Semantic, 6, 1, "missing row `b | a=F`"),
        ("no_model.qdt", ErrorKind::Syntax, 1, 1, "missing `model`"),
        ("unknown_var.qdt", ErrorKind::Semantic, 3, 11, "unknown variable `b`"),
        ("unnormalized.qdt", ErrorKind::Semantic, 3, 1, "row not normalized"),
        ("wrong_parents.qdt", ErrorKind::Semantic, 5, 1, "graph parents"),
        ("zero_persist.qdt", ErrorKind::Semantic, 2, 7, "persistence"),
    ];
    let corpus = dir("reject");
    assert_eq!(corpus.len(), expected.len());
    for ((name, text), (want, kind, line, col, msg)) in corpus.iter().zip(expected) {
        assert_eq!(name, want);
        let e = parse_model(text).unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (kind, line, col), "{name}: {e}");
        assert!(e.message.contains(msg), "{name}: {e}");
    }
}

#[test]
fn bundled_models_have_the_expected_shape() {
    let u = models::umbrella();
    assert_eq!(u.network.num_vars(), 3);
    assert_eq!(u.network.edges(), vec![(0, 1)]);
    assert_eq!(u.utility_clauses.len(), 1);
    assert_eq!(u.utility_clauses[0].0, -1);
    let s = models::switch();
    assert!(s.network.table(2).is_functional());
    assert_eq!(s.network.parents(2), &[0, 1]);
}

#[test]
fn scripts() {
    let names = models::switch().names();
    assert_eq!(parse_query(models::DIALOGUE_SCRIPT, &names).unwrap().commands.len(), 4);
    assert!(parse_query("", &names).unwrap().commands.is_empty());
    let e = parse_query("ought (u & !u) ?", &names).unwrap_err();
    assert_eq!(e.kind, ErrorKind::Semantic);
    assert!(e.message.contains("inconsistent conjunct"));
}
