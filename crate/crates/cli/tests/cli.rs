use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use arithdeg_cli::report::strip_timings;
use arithdeg_cli::system::{CorrespondenceFile, SystemDescription};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_arithdeg");

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name).to_string_lossy().into_owned()
}

fn arithdeg(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("ARITHDEG_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("ARITHDEG_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    strip_timings(&mut v);
    v
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn corpus_files_are_canonical() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let canonical = if text.contains("equations") {
            CorrespondenceFile::parse(&text).unwrap().to_canonical_string()
        } else {
            SystemDescription::parse(&text).unwrap().to_canonical_string()
        };
        assert_eq!(canonical, text, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 20);
}

#[test]
fn canonical_form_is_a_fixed_point() {
    let messy = "schema = 1\nname = \"m\"\nspace = [1]\nblocks = [[\"X1_1^2 + 2*X1_0^2 \", \"  X1_1^2\"]]\n\
                 [points]\np = [[\"10\", 4]]\n";
    let once = SystemDescription::parse(messy).unwrap().to_canonical_string();
    let twice = SystemDescription::parse(&once).unwrap().to_canonical_string();
    assert_eq!(once, twice);
    assert!(once.contains("p = [[5, 2]]"), "{once}");
}

#[test]
fn cached_runs_match_cold_runs() {
    let cache = tempfile::tempdir().unwrap();
    let file = corpus("split-2-3.toml");
    let args = ["alpha", file.as_str(), "wander"];
    let cold = arithdeg(&args, None);
    assert_eq!(cold.status.code(), Some(3));
    let miss = arithdeg(&args, Some(cache.path()));
    let hit = arithdeg(&args, Some(cache.path()));
    assert_eq!(json(&cold), json(&miss));
    assert_eq!(json(&cold), json(&hit));
    let timings: Value = serde_json::from_slice(&hit.stdout).unwrap();
    assert_eq!(timings["timings"]["cache"], "hit");

    // a short cached orbit is extended to match a cold long run
    let fresh = tempfile::tempdir().unwrap();
    let short = arithdeg(&["--horizon", "5", "orbit", &file, "wander"], Some(fresh.path()));
    assert_eq!(short.status.code(), Some(0));
    let extended = arithdeg(&["--horizon", "12", "orbit", &file, "wander"], Some(fresh.path()));
    let cold = arithdeg(&["--horizon", "12", "orbit", &file, "wander"], None);
    assert_eq!(json(&extended), json(&cold));
}

#[test]
fn cache_dir_flag_overrides_environment() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let file = corpus("power-2.toml");
    let out = arithdeg(&["--cache-dir", flag.path().to_str().unwrap(), "orbit", &file, "wander"], Some(env.path()));
    assert!(out.status.success());
    assert!(fs::read_dir(flag.path()).unwrap().count() > 0);
    assert_eq!(fs::read_dir(env.path()).unwrap().count(), 0);
}

#[test]
fn reports_are_deterministic() {
    let file = corpus("swap-twist-2-3.toml");
    for cmd in ["degrees", "alpha"] {
        let mut args = vec![cmd, file.as_str()];
        if cmd == "alpha" {
            args.push("wander");
        }
        let a = arithdeg(&args, None);
        let b = arithdeg(&args, None);
        assert!(a.status.success());
        assert_eq!(json(&a), json(&b));
    }
}

#[test]
fn parse_errors_exit_1_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "schema = 1\nname = \"bad\"\nspace = [1]\nblocks = [\n  [\"X1_0^2\", \"Q_1^2\"],\n]\n");
    let out = arithdeg(&["degrees", &bad], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml:5:15:"), "{err}");

    let not_morphism = write(dir.path(), "ind.toml", "schema = 1\nname = \"ind\"\nspace = [1]\nblocks = [\n  [\"X1_0*X1_1\", \"X1_0^2\"],\n]\n");
    let out = arithdeg(&["degrees", &not_morphism], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("common zero"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(arithdeg(&["check", "everything"], None).status.code(), Some(1));
    assert_eq!(arithdeg(&["frobnicate"], None).status.code(), Some(1));
    assert_eq!(arithdeg(&["alpha", &corpus("power-2.toml"), "nowhere"], None).status.code(), Some(1));
    assert_eq!(arithdeg(&["--format", "xml", "degrees", &corpus("power-2.toml")], None).status.code(), Some(1));
}

#[test]
fn precondition_failure_exits_2() {
    let out = arithdeg(&["canonical", &corpus("identity-p1.toml"), "any"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eigenvalue"));
}

#[test]
fn budget_exhaustion_exits_3_with_partial_report() {
    let out = arithdeg(&["--digit-budget", "50", "orbit", &corpus("power-3.toml"), "wander"], None);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["results"]["orbit"]["stop"]["reason"], "budget");
    assert!(v["results"]["orbit"]["length"].as_u64().unwrap() >= 2);
}

#[test]
fn output_formats() {
    let file = corpus("power-2.toml");
    let csv = arithdeg(&["--format", "csv", "alpha", &file, "wander"], None);
    let csv = String::from_utf8(csv.stdout).unwrap();
    assert!(csv.starts_with("# estimators\nn,height,root,ratio,two_step\n"), "{csv}");
    assert!(csv.contains("\n1,1.386294361120,"));

    let text = arithdeg(&["--format", "text", "alpha", &file, "wander"], None);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("verdict: alpha_hat = 2.000000000000"), "{text}");

    let short = arithdeg(&["--precision", "3", "alpha", &file, "wander"], None);
    assert_eq!(json(&short)["results"]["estimate"]["value"].to_string(), "2.000");
}

#[test]
fn output_file_holds_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("r.json");
    let out = arithdeg(&["-o", target.to_str().unwrap(), "degrees", &corpus("split-2-3.toml")], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&fs::read(&target).unwrap()).unwrap();
    assert_eq!(v["command"], "degrees");
}

#[test]
fn documented_examples() {
    let deg = json(&arithdeg(&["degrees", &corpus("split-2-3.toml")], None));
    let exact = |v: &Value| v.as_array().unwrap().iter().map(|m| m["exact"].to_string()).collect::<Vec<_>>();
    assert_eq!(exact(&deg["results"]["dynamical_degrees"]), ["1", "3", "6"]);
    assert_eq!(exact(&deg["results"]["multipliers"]), ["3", "2"]);

    let twist = json(&arithdeg(&["degrees", &corpus("swap-twist-2-3.toml")], None));
    assert_eq!(twist["results"]["multipliers"][0]["polynomial"], "t^2 - 6");

    let dml = json(&arithdeg(
        &["dml", &corpus("power-2.toml"), &corpus("power-3.toml"), "--x", "wander", "--y", "wander", "-v", &corpus("diagonal.toml"), "--horizon", "20"],
        None,
    ));
    assert_eq!(dml["results"]["disjointness"]["disjoint"], true);
    assert_eq!(dml["results"]["return_set"]["indices"], serde_json::json!([0]));

    let same = json(&arithdeg(
        &["dml", &corpus("power-2.toml"), &corpus("power-2.toml"), "--x", "wander", "--y", "wander", "-v", &corpus("diagonal.toml")],
        None,
    ));
    assert_eq!(same["results"]["disjointness"]["disjoint"], false);
}
