use std::path::PathBuf;

use qdt::cli::run;

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name).display().to_string()
}

fn qdt(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qdt").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qdt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn check_prints_prior() {
    let (code, out, _) = qdt(&["check", &model("switch.qdt")]);
    assert_eq!(code, 0);
    assert!(out.contains("4 finite worlds"));
    for line in ["100    1", "010    0", "001    1", "111    0"] {
        assert!(out.contains(line), "{out}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(qdt(&["check", "/nonexistent/missing.qdt"]).0, 1);
    let (code, _, err) = qdt(&["check", &model("cyclic.qdt")]);
    assert_eq!(code, 3);
    assert!(err.contains("cycle"));
    assert_eq!(qdt(&["check", &model("reject/missing_comma.qdt")]).0, 2);
    assert_eq!(qdt(&["frobnicate"]).0, 1);
    assert_eq!(qdt(&["--help"]).0, 0);
}

#[test]
fn dialogue_transcript() {
    let (code, out, _) = qdt(&["run", &model("switch.qdt"), &model("dialogue.qdq")]);
    assert_eq!(code, 0);
    let verdicts: Vec<&str> = out.lines().filter(|l| l.contains("mu(action)")).collect();
    assert_eq!(verdicts.len(), 2);
    assert!(verdicts.iter().all(|l| l.starts_with("ASSERTABLE  mu(action) = 0  mu(baseline) = -1")));
}

#[test]
fn umbrella_script() {
    let (code, out, _) = qdt(&["run", &model("umbrella.qdt"), &model("umbrella.qdq")]);
    assert_eq!(code, 0);
    assert!(out.contains("ASSERTABLE  mu(action) = 0  mu(baseline) = -1"), "{out}");
}

#[test]
fn json_trace() {
    let (code, out, _) = qdt(&["run", "--json", &model("switch.qdt"), &model("dialogue.qdq")]);
    assert_eq!(code, 0);
    let records: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 4);
    for r in &records {
        for key in ["command", "belief", "n_plus", "n_minus", "verdict", "baseline", "assertable", "argmin_prev_worlds"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
    let first = &records[1];
    assert_eq!(first["assertable"], true);
    assert_eq!(first["verdict"], 0);
    assert_eq!(first["baseline"], -1);
    let post = first["post"].as_array().unwrap();
    let finite: Vec<_> = post.iter().filter(|w| w["rank"] != "inf").collect();
    assert_eq!(finite.len(), 2);
    assert_eq!(records[0]["belief"][0]["rank"], "inf");
}

#[test]
fn show_only_script() {
    let script = temp("show.qdq", "show ranking\n");
    let (code, out, _) = qdt(&["run", &model("umbrella.qdt"), &script]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 9);
}

#[test]
fn contradictory_observation() {
    let script = temp("contra.qdq", "observe l\nobserve !l\n");
    let (code, _, err) = qdt(&["run", &model("switch.qdt"), &script]);
    assert_eq!(code, 3);
    assert!(err.contains("contradictory observation"), "{err}");
}

#[test]
fn strict_policy_rejects_ambiguity() {
    let m = temp(
        "amb.qdt",
        "model amb\nvar x\nvar y\nrank x : T=0, F=0\nrank y : T=0, F=0\nutil 1 : x\nutil -1 : !x\n",
    );
    let script = temp("amb.qdq", "ought (y) ?\n");
    assert_eq!(qdt(&["run", &m, &script]).0, 0);
    let (code, _, err) = qdt(&["run", "--policy", "strict", &m, &script]);
    assert_eq!(code, 3);
    assert!(err.contains("strict"), "{err}");
}

#[test]
fn one_shot_query() {
    let (code, out, _) = qdt(&["query", &model("switch.qdt"), "--observe", "!l", "--dmc", "(u) => l", "--ought", "(u)"]);
    assert_eq!(code, 0);
    assert!(out.contains("ASSERTABLE"));
    assert!(out.trim_end().ends_with("true"), "{out}");
    let (code, _, _) = qdt(&["query", &model("switch.qdt"), "--observe", "q"]);
    assert_eq!(code, 3);
}

#[test]
fn principles_and_oracle() {
    let (code, out, _) = qdt(&["principles", "--trials", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("0 trials"));
    let (code, out, _) = qdt(&["principles", "--trials", "50", "--seed", "3", "--json"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["trials_run"], 50);
    assert_eq!(qdt(&["principles", "--vars", "9"]).0, 1);

    let (code, out, _) = qdt(&["oracle", &model("switch.qdt")]);
    assert_eq!(code, 0);
    assert!(out.contains("\"agree\": true"));
    assert_eq!(qdt(&["oracle", &model("umbrella.qdt"), "--epsilon", "1e-4"]).0, 0);

    let mut big = String::from("model big\n");
    for i in 0..12 {
        big.push_str(&format!("var v{i}\nrank v{i} : T=0, F=0\n"));
    }
    let (code, _, err) = qdt(&["oracle", &temp("big.qdt", &big)]);
    assert_eq!(code, 3);
    assert!(err.contains("too many variables"));
}

#[test]
fn output_is_deterministic() {
    let runs = [
        vec!["run", "--json", "--strong"],
        vec!["principles", "--trials", "300", "--seed", "5", "--principle", "weak-consistency"],
        vec!["oracle", "--seed", "9"],
    ];
    for args in runs {
        let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        if args[0] == "run" {
            full.push(model("switch.qdt"));
            full.push(model("dialogue.qdq"));
        } else if args[0] == "oracle" {
            full.push(model("switch.qdt"));
        }
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        assert_eq!(qdt(&refs), qdt(&refs));
    }
}
