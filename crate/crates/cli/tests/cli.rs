use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use obdalab_core::circuit::parse_circuit;
use obdalab_core::encoder::parse_input_map;
use obdalab_core::hgp::{all_inputs, eval_hgp, parse_hgp};
use obdalab_core::logic::{parse_ontology, parse_query};
use obdalab_core::rewrite::{parse_ndl, parse_pe};
use obdalab_core::suite::bits;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obdalab")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn answers_example_one() {
    let out = stdout(&["answer", &data("example1.ontology"), &data("example1.data"), &data("example1.query")]);
    assert_eq!(out, "c\n");
}

#[test]
fn empty_data_prints_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.data", "");
    let out = stdout(&["answer", &data("example1.ontology"), &empty, &data("example1.query")]);
    assert_eq!(out, "");
}

#[test]
fn boolean_queries_print_truth_values() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(dir.path(), "yes.query", "q() :- involves(u,v), Professor(v)");
    let no = write(dir.path(), "no.query", "q() :- Professor(u), Student(u)");
    let args = |q: &str| stdout(&["answer", &data("example1.ontology"), &data("example1.data"), q]);
    assert_eq!(args(&yes), "true\n");
    assert_eq!(args(&no), "false\n");
}

#[test]
fn rewriting_outputs_parse_back() {
    // the hand-written q' has size 31; ours also keeps the subsumed disjunct Professor(x) & Student(x)
    let pe = stdout(&["rewrite", &data("example1.ontology"), &data("example1.query")]);
    assert!(pe.ends_with("# size=37 disjuncts=4\n"), "{pe}");
    parse_pe(&pe).unwrap();
    let ndl = stdout(&["rewrite", &data("example1.ontology"), &data("example1.query"), "--target", "ndl"]);
    assert!(ndl.contains("goal G/1"));
    parse_ndl(&ndl).unwrap();
}

#[test]
fn empty_ontology_echoes_the_query() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.ontology", "");
    let out = stdout(&["rewrite", &empty, &data("example1.query")]);
    assert_eq!(
        out,
        "q(x) :- (exists y,z: (worksOn(x,y) & involves(y,z) & Professor(z)))\n# size=12 disjuncts=1\n"
    );
}

#[test]
fn disjoint_edges_multiply_disjuncts() {
    // each edge contributes three choices: no witness, the A_e one, the B_e one
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    stdout(&["--out-dir", out_dir, "encode", &data("disjoint3.hgp")]);
    let t = dir.path().join("disjoint3.ontology");
    let q = dir.path().join("disjoint3.query");
    let out = stdout(&["rewrite", t.to_str().unwrap(), q.to_str().unwrap()]);
    assert!(out.ends_with("disjuncts=27\n"), "{out}");
}

#[test]
fn encode_writes_parseable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&["--out-dir", dir.path().to_str().unwrap(), "encode", &data("worked.hgp")]);
    assert_eq!(out.lines().count(), 3);
    let read = |ext: &str| fs::read_to_string(dir.path().join(format!("worked.{ext}"))).unwrap();
    let t = parse_ontology(&read("ontology")).unwrap();
    let q = parse_query(&read("query")).unwrap();
    let m = parse_input_map(&read("inputmap")).unwrap();
    assert_eq!(t.axioms().len(), 2 * 2 + 4);
    assert_eq!(q.atoms().len(), 3 + 4);
    assert_eq!(m.entries.len(), 3);
}

#[test]
fn eval_worked_example() {
    assert_eq!(stdout(&["eval", &data("worked.hgp"), "010"]), "0\n");
    assert_eq!(stdout(&["eval", &data("worked.hgp"), "111"]), "1\n");
    assert_eq!(stdout(&["eval", &data("path.nbp"), "10"]), "1\n");
    assert_eq!(stdout(&["eval", &data("path.nbp"), "11"]), "0\n");
}

#[test]
fn compile_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let hgp = stdout(&["compile", &data("identity.circuit"), "--to", "hgp3"]);
    let path = write(dir.path(), "identity.hgp", &hgp);
    assert_eq!(stdout(&["eval", &path, "1"]), "1\n");
    assert_eq!(stdout(&["eval", &path, "0"]), "0\n");
    let mono = stdout(&["compile", &data("mixed.circuit"), "--monotone"]);
    assert!(parse_hgp(&mono).unwrap().is_monotone());
}

#[test]
fn hgp_to_circuit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&["hgp2circuit", &data("worked.hgp")]);
    let c = parse_circuit(&text).unwrap();
    assert_eq!((c.num_x(), c.num_y()), (3, 2));
    let path = write(dir.path(), "worked.circuit", &text);
    let h = parse_hgp(&fs::read_to_string(data("worked.hgp")).unwrap()).unwrap();
    for x in all_inputs(3) {
        let expected = if eval_hgp(&h, &x).unwrap() { "1\n" } else { "0\n" };
        assert_eq!(stdout(&["eval", &path, &bits(&x)]), expected, "{x:?}");
    }
}

#[test]
fn circuit_eval_with_certificate_bits() {
    // x1=1, x2=0, y1=0: x1 & !y1 holds
    assert_eq!(stdout(&["eval", &data("mixed.circuit"), "100"]), "1\n");
    assert_eq!(stdout(&["eval", &data("mixed.circuit"), "101"]), "0\n");
    assert_eq!(stdout(&["eval", &data("mixed.circuit"), "10"]), "1\n");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["eval", &data("worked.hgp"), "0a1"]).status.code(), Some(1));
    assert_eq!(run(&["eval", &data("worked.hgp"), "01"]).status.code(), Some(1));
    assert_eq!(run(&["answer", "/nonexistent", "/nonexistent", "/nonexistent"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.ontology", "A(x) -> ");
    let out = run(&["answer", &bad, &data("example1.data"), &data("example1.query")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn selftest_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let go = |d: &Path| {
        stdout(&["--seed", "11", "--out-dir", d.to_str().unwrap(), "selftest", "--suite", "rewriter", "--count", "30"])
            .replace(d.to_str().unwrap(), "OUT")
    };
    assert_eq!(go(a.path()), go(b.path()));
    let csv = |d: &Path| fs::read(d.join("sizes.csv")).unwrap();
    assert_eq!(csv(a.path()), csv(b.path()));
    assert!(String::from_utf8(csv(a.path())).unwrap().starts_with("instance,pe_size,ndl_size,disjuncts\n"));
}

#[test]
fn selftest_catches_an_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&[
        "--out-dir",
        d,
        "--inject-fault",
        "drop-inclusion",
        "selftest",
        "--suite",
        "rewriter",
        "--count",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL rewriter/pe"));
    let failures: Vec<_> = fs::read_dir(dir.path().join("failures")).unwrap().collect();
    assert!(!failures.is_empty());
    let first = failures[0].as_ref().unwrap().path();
    parse_ontology(&fs::read_to_string(first.join("ontology.txt")).unwrap()).unwrap();
}

#[test]
fn zero_count_passes_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&["--out-dir", dir.path().to_str().unwrap(), "selftest", "--suite", "rewriter", "--count", "0"]);
    assert!(out.contains("warning"), "{out}");
}
