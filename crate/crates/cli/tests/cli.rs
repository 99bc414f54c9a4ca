use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use polycol::cutplanes::{cp_check, cp_proof_from_jsonl};
use polycol::io;
use polycol::nullsatz::verify_certificate;

const K4: &str = "p edge 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n";

fn polycol(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_polycol"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }
    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
    fn put(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    }
    fn s(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn encode_k4_from_stdin() {
    let o = polycol(&["encode", "--kind", "01", "-k", "3"], Some(K4));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sys = io::parse_poly_system(&stdout(&o)).unwrap();
    assert_eq!(sys.n_vars(), 12);
    // 4 vertex axioms, 4*3 uniqueness, 6*3 edge axioms, 12 Boolean axioms.
    assert_eq!(sys.axioms.len(), 4 + 12 + 18 + 12);
}

#[test]
fn nss_search_reports_infeasible_then_finds_certificate() {
    let d = Dir::new();
    let o = polycol(&["encode", "--kind", "01", "-k", "3", "--out", &d.s("k4.sys")], Some(K4));
    assert_eq!(code(&o), 0);
    let sys_path = d.s("k4.sys");

    let o = polycol(&["nss-search", &sys_path, "--degree-max", "2"], None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("infeasible at degree ≤ 2"), "{}", stderr(&o));

    let o = polycol(&["nss-search", &sys_path, "--degree-max", "4", "--out", &d.s("k4.cert")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let sys = io::parse_poly_system(&read(&sys_path)).unwrap();
    let cert = io::parse_certificate(&read(d.path("k4.cert")), &sys).unwrap();
    assert_eq!(cert.degree, 3);
    assert!(verify_certificate(&sys, &cert).unwrap());
}

#[test]
fn nss_budget_is_exit_two() {
    let d = Dir::new();
    polycol(&["encode", "--kind", "01", "-k", "3", "--out", &d.s("k4.sys")], Some(K4));
    let o = polycol(&["nss-search", &d.s("k4.sys"), "--degree-max", "4", "--budget", "10"], None);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn pc_search_check_and_tamper() {
    let d = Dir::new();
    polycol(&["encode", "--kind", "01", "-k", "3", "--out", &d.s("k4.sys")], Some(K4));
    let o = polycol(&["pc-search", &d.s("k4.sys"), "--degree-max", "4", "--out", &d.s("k4.pc")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = polycol(&["pc-check", "--system", &d.s("k4.sys"), "--proof", &d.s("k4.pc")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // Replace the polynomial of the last line with a different one.
    let text = read(d.path("k4.pc"));
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let target = lines.len() - 1;
    let mut v: serde_json::Value = serde_json::from_str(&lines[target]).unwrap();
    v["poly"] = serde_json::Value::String("x_0".into());
    lines[target] = v.to_string();
    let bad = d.put("bad.pc", &(lines.join("\n") + "\n"));
    let o = polycol(&["pc-check", "--system", &d.s("k4.sys"), "--proof", &bad], None);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains(&format!("line {target}")), "{}", stderr(&o));
}

fn fphp_4_3(d: &Dir) -> String {
    let o = polycol(&["gen-fphp", "--pigeons", "4", "--holes", "3", "-k", "3", "--seed", "1", "--out", &d.s("b.fphp")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    d.s("b.fphp")
}

#[test]
fn cp_prove_reduction_checks() {
    let d = Dir::new();
    let b = fphp_4_3(&d);
    let o = polycol(&["cp-prove", &b, "--system-out", &d.s("g.cp"), "--out", &d.s("g.jsonl")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = polycol(&["cp-check", "--system", &d.s("g.cp"), "--proof", &d.s("g.jsonl")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // Independent check through the library.
    let sys = io::parse_cp_system(&read(d.path("g.cp"))).unwrap();
    let proof = cp_proof_from_jsonl(&read(d.path("g.jsonl"))).unwrap();
    assert!(cp_check(&proof, &sys).refutation);

    // Dropping the last line leaves a valid non-refutation.
    let text = read(d.path("g.jsonl"));
    let cut: Vec<&str> = text.lines().collect();
    let bad = d.put("cut.jsonl", &(cut[..cut.len() - 1].join("\n") + "\n"));
    let o = polycol(&["cp-check", "--system", &d.s("g.cp"), "--proof", &bad], None);
    assert_eq!(code(&o), 1);
}

#[test]
fn cp_prove_php_and_satisfiable_instance() {
    let d = Dir::new();
    let b = fphp_4_3(&d);
    let o = polycol(&["cp-prove", "--php", &b, "--system-out", &d.s("p.cp"), "--out", &d.s("p.jsonl")], None);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = polycol(&["cp-check", "--system", &d.s("p.cp"), "--proof", &d.s("p.jsonl")], None);
    assert_eq!(code(&o), 0);

    let sat = d.put("sat.fphp", "fphp pigeons=3 holes=3 k=3\n0 1 2\n0 1 2\n0 1 2\n");
    let o = polycol(&["cp-prove", "--php", &sat], None);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_exit_codes() {
    let o = polycol(&["oracle", "colour", "-k", "4"], Some(K4));
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["satisfiable"], true);
    assert!(v["witness"]["colouring"].is_array());

    let o = polycol(&["oracle", "colour", "-k", "3"], Some(K4));
    assert_eq!(code(&o), 1);

    let d = Dir::new();
    let b = fphp_4_3(&d);
    let o = polycol(&["gen-colouring", &b, "--out", &d.s("g.col")], None);
    assert_eq!(code(&o), 0);
    let o = polycol(&["oracle", "colour", "-k", "3", &d.s("g.col"), "--budget", "1000"], None);
    assert_eq!(code(&o), 2);
}

#[test]
fn oracle_poly_on_roots_encoding() {
    let o = polycol(&["encode", "--kind", "roots", "-k", "3", "--field", "7"], Some(K4));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = polycol(&["oracle", "poly"], Some(&stdout(&o)));
    assert_eq!(code(&o), 1);

    let o = polycol(&["encode", "--kind", "roots", "-k", "3", "--field", "5"], Some(K4));
    assert_eq!(code(&o), 2);
}

#[test]
fn expander_check_json() {
    let d = Dir::new();
    let dense = d.put("dense.fphp", "fphp pigeons=4 holes=3 k=3\n0 1 2\n0 1 2\n0 1 2\n0 1 2\n");
    let o = polycol(&["expander-check", &dense], None);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], false);
    // Two pigeons with identical neighbourhoods have empty boundary.
    assert_eq!(v["witness_boundary"], 0);
}

#[test]
fn generation_is_reproducible_and_manifested() {
    let d = Dir::new();
    let run = |tag: &str| {
        let o = polycol(
            &["gen-fphp", "--pigeons", "6", "--holes", "5", "-k", "3", "--seed", "9", "--out", &d.s(&format!("{tag}.fphp"))],
            None,
        );
        assert_eq!(code(&o), 0);
        let o = polycol(
            &[
                "gen-colouring",
                &d.s(&format!("{tag}.fphp")),
                "--out",
                &d.s(&format!("{tag}.col")),
                "--manifest",
                &d.s(&format!("{tag}.manifest.json")),
            ],
            None,
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    };
    run("a");
    run("b");
    for ext in ["fphp", "col", "json"] {
        assert_eq!(read(d.path(&format!("a.{ext}"))), read(d.path(&format!("b.{ext}"))), "{ext}");
    }
    let m: serde_json::Value = serde_json::from_str(&read(d.path("a.manifest.json"))).unwrap();
    assert_eq!(m["exit_status"], 0);
    let hashes = m["inputs"].as_object().unwrap();
    assert_eq!(hashes.len(), 1);
    let side: serde_json::Value = serde_json::from_str(&read(d.path("a.json"))).unwrap();
    assert_eq!(side["pigeon_vertices"].as_array().unwrap().len(), 6);
    assert_eq!(side["edge_holes"].as_array().unwrap().len(), 6);
}

#[test]
fn experiment_csv_is_byte_identical() {
    let d = Dir::new();
    let run = |name: &str| {
        let o = polycol(
            &[
                "experiment-degree-growth",
                "-k",
                "3",
                "--n",
                "3",
                "--degree-max",
                "2",
                "--max-tries",
                "5",
                "--budget",
                "20000",
                "--seed",
                "1",
                "--out",
                &d.s(name),
                "--json",
                &d.s(&format!("{name}.json")),
            ],
            None,
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        read(d.path(name))
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let mut rows = csv::Reader::from_reader(a.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "nss_min_degree"));
    let recs: Vec<_> = rows.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(recs.len(), 1);
    let cp_valid = header.iter().position(|h| h == "cp_valid").unwrap();
    assert_eq!(&recs[0][cp_valid], "true");
    let table: serde_json::Value = serde_json::from_str(&read(d.path("a.csv.json"))).unwrap();
    assert_eq!(table["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_are_exit_two() {
    let o = polycol(&["encode", "--kind", "nope"], Some(K4));
    assert_eq!(code(&o), 2);
    let o = polycol(&["encode", "--kind", "01", "--field", "4"], Some(K4));
    assert_eq!(code(&o), 2);
    let o = polycol(&["encode", "--kind", "01"], Some("not dimacs\n"));
    assert_eq!(code(&o), 2);
}
