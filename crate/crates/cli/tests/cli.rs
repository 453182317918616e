use std::path::PathBuf;
use std::process::{Command, Output};

use boxdiag::boxtrace::{parse_events, reconstruct_success_trace, success_trace_at, Port};
use boxdiag::engine::{solve, Budget};
use boxdiag::kernel::{parse_program, parse_query};

fn dir(sub: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join(sub)
}

fn fixture(name: &str) -> String {
    dir("fixtures").join(name).display().to_string()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(dir("golden").join(name)).unwrap()
}

fn boxdiag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxdiag")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_prints_one_line_per_answer() {
    let o = boxdiag(&["solve", &fixture("app.pl"), "-q", "app(X,Y,[1,2])"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("app_solve.txt"));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn failing_and_truncated_queries() {
    let o = boxdiag(&["solve", &fixture("app.pl"), "-q", "app([1],Y,[2])"]);
    assert_eq!(stdout(&o), "no\n");
    let o = boxdiag(&["solve", &fixture("app.pl"), "-q", "app(X,Y,Z)", "--max-answers", "2"]);
    assert_eq!(stdout(&o), "app([],_G1,_G1)\napp([_G2],_G6,[_G2|_G6])\n% truncated: max_answers\n");
}

#[test]
fn trace_lines() {
    let o = boxdiag(&["trace", &fixture("even_bug.pl"), "-q", "even(s(0))"]);
    assert_eq!(
        stdout(&o),
        "1 1 Call: even(s(0))\n2 2 Call: even(0)\n2 2 Exit: even(0)\n1 1 Exit: even(s(0))\n"
    );
    assert_eq!(stdout(&o), golden("even_bug_trace.txt"));
    let o = boxdiag(&["trace", &fixture("app.pl"), "-q", "app(X,Y,[1,2])"]);
    assert_eq!(stdout(&o), golden("app_trace.txt"));
}

#[test]
fn sicstus_filter_hides_redo_of_deterministic_exits() {
    let o = boxdiag(&["trace", "--sicstus-redo", &fixture("app.pl"), "-q", "app(X,Y,[1,2])"]);
    let text = stdout(&o);
    // the second exit of invocation 2 is deterministic, so its Redo is hidden
    assert!(!text.contains("Redo: app([2],[],[2])"));
    assert!(text.contains("2 2 Redo: app([],[2],[2])"));
}

#[test]
fn trace_text_round_trip() {
    let p = parse_program(&std::fs::read_to_string(fixture("app.pl")).unwrap()).unwrap();
    let o = boxdiag(&["trace", &fixture("app.pl"), "-q", "app(X,Y,[1,2])"]);
    let text = stdout(&o);
    let run = solve(&parse_query("app(X,Y,[1,2])").unwrap(), &p, Budget::default());
    let parsed = parse_events(&text).unwrap();
    assert_eq!(parsed, run.events);
    for (i, e) in run.events.iter().enumerate() {
        if e.port == Port::Exit {
            let live = success_trace_at(&run, i).unwrap().0.answers;
            assert_eq!(reconstruct_success_trace(&text, i + 1).unwrap(), live);
        }
    }
}

#[test]
fn offline_success_trace() {
    let events = dir("golden").join("app_trace.txt").display().to_string();
    let o = boxdiag(&["success-trace", "--events", &events, "--exit-line", "12"]);
    assert_eq!(stdout(&o), "app([2],[],[2])\n");
    let o = boxdiag(&["success-trace", &fixture("app.pl"), "-q", "app(X,Y,[1,2])", "--answer", "3"]);
    assert_eq!(stdout(&o), "app(X,Y,[1,2]) -> app([1,2],[],[1,2])  [clause 2]\n  app([2],[],[2])\n");
}

#[test]
fn proof_and_search_traces() {
    let o = boxdiag(&["prooftree", &fixture("even_bug.pl"), "-q", "even(s(s(0)))"]);
    assert_eq!(stdout(&o), "even(s(s(0)))  [2]\n`-- even(s(0))  [2]\n    `-- even(0)  [1]\n");
    let o = boxdiag(&["search-trace", &fixture("even_bug.pl"), "-q", "even(s(s(0)))"]);
    assert_eq!(stdout(&o), "2 even(s(0)): {even(s(0))}\n");
}

#[test]
fn diagnose_corr_golden() {
    let o = boxdiag(&[
        "diagnose",
        "corr",
        &fixture("even_bug.pl"),
        "--spec",
        &fixture("even.spec"),
        "-q",
        "even(s(0))",
        "--answers",
        &fixture("scripted.json"),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("even_corr.txt"));
    let mut args = vec!["diagnose", "corr"];
    let (p, s) = (fixture("even_bug.pl"), fixture("even.spec"));
    args.extend([p.as_str(), "--spec", s.as_str(), "-q", "even(s(0))", "--json"]);
    let o = boxdiag(&args);
    assert_eq!(stdout(&o), golden("even_corr.json"));
    for strategy in ["alg4", "alg5"] {
        let mut a = args.clone();
        a.pop();
        a.extend(["--strategy", strategy]);
        assert_eq!(stdout(&boxdiag(&a)), golden("even_corr.txt"), "{strategy}");
    }
}

#[test]
fn diagnose_compl_golden() {
    let (p, s) = (fixture("even_fact.pl"), fixture("even.spec"));
    let o = boxdiag(&["diagnose", "compl", &p, "--spec", &s, "-q", "even(s(s(0)))"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), golden("even_compl.txt"));
    let o = boxdiag(&["diagnose", "compl", &p, "--spec", &s, "-q", "even(s(s(0)))", "--json"]);
    assert_eq!(stdout(&o), golden("even_compl.json"));
}

#[test]
fn stops_and_errors_are_single_lines() {
    let (p, s) = (fixture("even_fact.pl"), fixture("even.spec"));
    let o = boxdiag(&["diagnose", "compl", &p, "--spec", &s, "-q", "even(0)"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr(&o), "error: not-a-symptom: even(0) is not a symptom\n");

    let o = boxdiag(&["solve", &fixture("missing.pl"), "-q", "p"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: io: "));
    assert_eq!(stderr(&o).lines().count(), 1);

    let o = boxdiag(&["solve", &fixture("app.pl"), "-q", "app(X"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: parse: query: "));

    let o = boxdiag(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scripted_human_answers() {
    let tmp = std::env::temp_dir().join(format!("boxdiag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let prog = tmp.join("p.pl");
    std::fs::write(&prog, "p(X) :- q(X).\nq(Y).\n").unwrap();
    let spec = tmp.join("p.spec");
    std::fs::write(&spec, "%% corr\np(a).\nq(a).\n").unwrap();
    let (prog, spec) = (prog.display().to_string(), spec.display().to_string());

    let o = boxdiag(&["diagnose", "corr", &prog, "--spec", &spec, "-q", "p(X)"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error: undecided: no verdict for p(_G2) at answer 1"), "{}", stderr(&o));

    let answers = tmp.join("a.json");
    std::fs::write(&answers, r#"{"1": "no", "2": "yes"}"#).unwrap();
    let answers = answers.display().to_string();
    let o = boxdiag(&["diagnose", "corr", &prog, "--spec", &spec, "-q", "p(X)", "--answers", &answers]);
    assert_eq!(stdout(&o), "incorrect clause 1: p(X) :- q(X).\nerror instance: p(_G2) :- q(_G2).\nquestions: 2 (0 machine, 2 human)\n");

    let journal = tmp.join("j.json");
    std::fs::write(&journal, r#"[{"seq": 1, "verdict": "no"}, {"seq": 2, "verdict": "yes"}]"#).unwrap();
    let journal = journal.display().to_string();
    let o2 = boxdiag(&["diagnose", "corr", &prog, "--spec", &spec, "-q", "p(X)", "--answers", &journal]);
    assert_eq!(stdout(&o2), stdout(&o));
    std::fs::remove_dir_all(&tmp).ok();
}
