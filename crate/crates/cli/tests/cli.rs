use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad report ({e}): {}\n{}", self.stdout, self.stderr))
    }
}

fn pph(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pph"))
        .args(args)
        .env_remove("PPH_MAX_TRIPLES")
        .output()
        .expect("pph runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn status<'a>(report: &'a Value, name: &str) -> &'a str {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))["status"]
        .as_str()
        .unwrap()
}

fn unit_step(a: f64) -> Value {
    json!({ "breakpoints": [a], "values": [1.0], "base_value": 0.0 })
}

#[test]
fn exit_code_matrix() {
    let line = fixture("line3.json");
    let cases: &[(&[&str], i32)] = &[
        (&["validate", &line], 0),
        (&["validate", &fixture("asymmetric.json")], 2),
        (&["validate", &fixture("malformed.json")], 1),
        (&["validate", &fixture("missing.json")], 1),
        (&["hausdorff", &line, "-a", "0", "-b", "1,3"], 0),
        (&["hausdorff", &line, "-a", "0", "-b", "7"], 2),
        (&["hausdorff", &fixture("asymmetric.json"), "-a", "0", "-b", "1"], 2),
        (&["limit", &line, &fixture("sets-constant.json")], 0),
        (&["limit", &line, &fixture("sets-nested.json")], 0),
        (&["limit", &line, &fixture("sets-alternating.json")], 2),
        (&["limit", &line, &fixture("malformed.json")], 1),
        (&["espace", &fixture("halfsteps.csv")], 0),
        (&["espace", &fixture("mismatched.csv")], 1),
        (&["espace", &fixture("identical.csv")], 2),
        (&["axioms"], 0),
        (&["axioms", "--tau", "convmin"], 0),
        (&["axioms", "--tau", "w"], 0),
        (&["axioms", "--tau", "min"], 0),
        (&["axioms", "--probes", "2"], 1),
        (&["frobnicate"], 1),
        (&["validate", &line, "--tol", "0"], 1),
        (&["validate", &line, "--tol", "-1"], 1),
        (&["validate", &line, "--eps-grid", "0.1,0.5"], 1),
        (&["validate", &line, "--t-grid", "0.5,-0.1"], 1),
        (&["validate", &line, "--tau", "max"], 1),
        (&["--help"], 0),
    ];
    for (args, code) in cases {
        let run = pph(args);
        assert_eq!(run.code, *code, "pph {args:?}\nstdout: {}\nstderr: {}", run.stdout, run.stderr);
        if *code != 1 && args[0] != "--help" {
            assert_eq!(run.json()["exit_status"], *code);
        }
    }
}

#[test]
fn validation_witnesses() {
    let report = pph(&["validate", &fixture("asymmetric.json")]).json();
    assert_eq!(status(&report, "PM3"), "fail");
    assert_eq!(report["checks"][3]["witness"], "0, 1");
    assert_eq!(report["summary"]["failed"], 1);
}

#[test]
fn hausdorff_outputs() {
    let line = fixture("line3.json");
    let report = pph(&["hausdorff", &line, "-a", "0", "-b", "1,3"]).json();
    assert_eq!(report["artifacts"]["hausdorff"], unit_step(3.0));
    assert_eq!(report["artifacts"]["excess_ab"], unit_step(1.0));
    assert_eq!(report["artifacts"]["excess_ba"], unit_step(3.0));

    // Singletons reproduce the space's own distance function.
    let report = pph(&["hausdorff", &line, "-a", "1", "-b", "3"]).json();
    assert_eq!(report["artifacts"]["hausdorff"], unit_step(2.0));

    let report = pph(&["hausdorff", &line, "-a", "1,3", "-b", "3,1"]).json();
    assert_eq!(report["artifacts"]["hausdorff"], unit_step(0.0));
}

#[test]
fn hausdorff_plot_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.dat");
    let run = pph(&["hausdorff", &fixture("line3.json"), "-a", "0", "-b", "1,3", "--out", out.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("# x value").count(), 3);
    assert!(text.contains("# F_AB (A = {0}, B = {1, 3})\n# x value\n2 0\n3 0\n3 1\n4 1\n"), "{text}");
}

#[test]
fn limit_outputs() {
    let line = fixture("line3.json");
    let report = pph(&["limit", &line, &fixture("sets-constant.json")]).json();
    let art = &report["artifacts"];
    assert_eq!(art["limit"], json!(["3"]));
    assert_eq!(art["agree"], true);
    assert_eq!(art["series"].as_array().unwrap().last().unwrap(), 0.0);

    let report = pph(&["limit", &line, &fixture("sets-nested.json")]).json();
    assert_eq!(report["artifacts"]["limit"], json!(["0", "1"]));
    assert_eq!(status(&report, "chain"), "pass");

    let report = pph(&["limit", &line, &fixture("sets-alternating.json")]).json();
    assert_eq!(status(&report, "cauchy"), "fail");
    let witness = report["checks"][1]["witness"].as_str().unwrap();
    assert!(witness.starts_with("level t = 0.25"), "{witness}");
}

#[test]
fn espace_writes_space_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("space.json");
    let run = pph(&["espace", &fixture("halfsteps.csv"), "--out", out.to_str().unwrap()]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let space: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(space["points"], json!(["a", "b"]));
    assert_eq!(space["tau"], "convmin");
    assert_eq!(space["dist"][0][1], json!({ "breakpoints": [1.0, 3.0], "values": [0.5, 1.0], "base_value": 0.0 }));

    // The written file is itself a valid space.
    assert_eq!(pph(&["validate", out.to_str().unwrap()]).code, 0);
}

#[test]
fn axioms_expected_failures() {
    let report = pph(&["axioms", "--tau", "w"]).json();
    assert_eq!(status(&report, "w/serstnev-documented-instance"), "expected-fail");
    assert_eq!(status(&report, "w/condition-W"), "pass");
    assert_eq!(report["exit_status"], 0);

    let report = pph(&["axioms", "--tau", "convmin"]).json();
    assert_eq!(status(&report, "convmin/serstnev-unit-steps"), "pass");
    assert_eq!(status(&report, "convmin/serstnev-equality-unit-steps"), "pass");
    assert_eq!(status(&report, "convmin/convexity-eps-0.1"), "pass");
    assert_eq!(status(&report, "convmin/convexity-eps-0.3"), "pass");
    assert_eq!(status(&report, "convmin/rn-R2/RN3"), "pass");

    let report = pph(&["axioms", "--tau", "min"]).json();
    assert_eq!(status(&report, "min/rn-R2/RN3"), "expected-fail");
    assert_eq!(status(&report, "min/serstnev-documented-instance"), "pass");
}

#[test]
fn reports_are_byte_identical() {
    let line = fixture("line3.json");
    let runs: &[&[&str]] = &[
        &["validate", &line],
        &["hausdorff", &line, "-a", "0", "-b", "1,3"],
        &["limit", &line, &fixture("sets-nested.json")],
        &["espace", &fixture("halfsteps.csv")],
        &["axioms", "--seed", "7"],
    ];
    for args in runs {
        let (a, b) = (pph(args), pph(args));
        assert_eq!(a.stdout, b.stdout, "pph {args:?}");
    }
    assert_ne!(pph(&["axioms", "--seed", "7"]).stdout, pph(&["axioms", "--seed", "8"]).stdout);
}

#[test]
fn sampled_pm4_is_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_pph"))
        .args(["validate", &fixture("line3.json")])
        .env("PPH_MAX_TRIPLES", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["max_triples"], 4);
    assert_eq!(report["artifacts"]["sampled_triples"], 4);

    let bad = Command::new(env!("CARGO_BIN_EXE_pph"))
        .args(["validate", &fixture("line3.json")])
        .env("PPH_MAX_TRIPLES", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
