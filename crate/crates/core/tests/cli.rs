use std::path::Path;
use std::process::{Command, Output};

fn mechlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mechlab"))
        .args(args)
        .env_remove("MECHLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn eval_prints_the_facility() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write(dir.path(), "p.csv", "# three agents\n0,1,-1\n-1,0,1\n1,-1,0\n");
    let o = mechlab(&["eval", "--mechanism", "median", "--profile", &profile, "--space", "3,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "[0,0,0]\n");

    let profile = write(dir.path(), "q.csv", "0,0\n1,0\n");
    let o = mechlab(&["eval", "--mechanism", "c2:1", "--profile", &profile]);
    assert_eq!(stdout(&o), "[0.5,0.5]\n");
}

#[test]
fn eval_reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = write(dir.path(), "r.csv", "1,2\n3\n");
    let o = mechlab(&["eval", "--mechanism", "median", "--profile", &ragged]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let ok = write(dir.path(), "ok.csv", "1,2\n3,4\n");
    let o = mechlab(&["eval", "--mechanism", "c9:1", "--profile", &ok]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("c9"));

    let o = mechlab(&["eval", "--mechanism", "c1:1,1", "--profile", &ok, "--space", "3,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_exit_code_follows_expectation() {
    let base = ["check", "--mechanism", "midpoint", "--property", "strategyproofness", "--trials", "50"];
    let o = mechlab(&base);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["witness"]["detail"]["kind"], "misreport");

    let o = mechlab(&[&base[..], &["--expect", "fail"]].concat());
    assert_eq!(o.status.code(), Some(0));

    let o = mechlab(&["check", "--mechanism", "median", "--property", "liveness"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("liveness"));
}

#[test]
fn seed_environment_variable_wins() {
    let args = [
        "check",
        "--mechanism",
        "dictator:0",
        "--property",
        "anonymity",
        "--trials",
        "20",
        "--expect",
        "fail",
    ];
    let run = |seed_flag: &str, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_mechlab"));
        cmd.args(args).args(["--seed", seed_flag]);
        match env {
            Some(v) => cmd.env("MECHLAB_SEED", v),
            None => cmd.env_remove("MECHLAB_SEED"),
        };
        let o = cmd.output().unwrap();
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(run("5", None), 5);
    assert_eq!(run("5", Some("77")), 77);
}

#[test]
fn fuzz_config_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let config = write(
        dir.path(),
        "campaign.toml",
        &format!(
            r#"
mechanisms = ["c1:1,1", "midpoint"]
checks = ["strategyproofness", "anonymity", "rotation_invariance"]
space = {{ m = 2, p = 2.0 }}
output_path = "{}"

[check_config]
num_profiles = 100

[[expectations]]
mechanism = "c1:1,1"
property = "rotation_invariance"
verdict = "fail"

[[expectations]]
mechanism = "midpoint"
property = "strategyproofness"
verdict = "fail"
"#,
            out.display()
        ),
    );
    let o = mechlab(&["fuzz", "--config", &config]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = std::fs::read(&out).unwrap();
    let o = mechlab(&["fuzz", "--config", &config]);
    assert!(o.status.success());
    assert_eq!(first, std::fs::read(&out).unwrap());

    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(report["reports"].as_array().unwrap().len(), 6);
    assert_eq!(report["summary"]["strategyproofness"]["fail"], 1);
    assert_eq!(report["summary"]["rotation_invariance"]["pass"], 1);
    assert!(report["tool_version"].as_str().unwrap().starts_with("mechlab "));

    // Dropping an expectation makes the midpoint failure unexpected.
    let strict = std::fs::read_to_string(&config).unwrap();
    let strict = strict.rsplit_once("[[expectations]]").unwrap().0.to_string();
    let strict = write(dir.path(), "strict.toml", &strict);
    let o = mechlab(&["fuzz", "--config", &strict, "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unexpected: midpoint strategyproofness"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("mechanism,property,verdict"));
}

#[test]
fn fuzz_catalog_in_one_dimension() {
    let o = mechlab(&["fuzz", "--space", "1,2", "--trials", "60"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["summary"]["output_at_agent_1d"]["fail"] == 1);
    assert!(report["summary"].get("rotation_invariance").is_none());
}

#[test]
fn characterize_emits_plot_ready_csv() {
    let o = mechlab(&["characterize", "--mechanism", "c2:1", "--trials", "20", "--exponents", "2,3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mechanism,p,m,a1,a2,b1,b2,w1,w2,residual_raw,residual_normalized,r_g,r_h"
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 40);
    for row in rows.iter().filter(|r| r[1] == "2") {
        let normalized: f64 = row[10].parse().unwrap();
        assert!(normalized.abs() <= 1e-9, "{row:?}");
    }

    let o = mechlab(&["characterize", "--mechanism", "median"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ratio_reports_json() {
    let o = mechlab(&["ratio", "--mechanism", "c3:1", "--trials", "300"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["ratio"].as_f64().unwrap() >= 1.99);
    assert!(v["mechanism_max_cost"].as_f64().unwrap() > 0.0);

    let o = mechlab(&["ratio", "--mechanism", "midpoint", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stability violations"));
}

#[test]
fn rejects_bad_flags() {
    for args in [
        &["check", "--mechanism", "median", "--property", "unanimity", "--box", "5,1"][..],
        &["check", "--mechanism", "median", "--property", "unanimity", "--box", "1"][..],
        &["check", "--mechanism", "median", "--property", "unanimity", "--space", "2,1"][..],
        &["check", "--mechanism", "median", "--property", "unanimity", "--grid", "4"][..],
    ] {
        let o = mechlab(args);
        assert!(!o.status.success(), "{args:?}");
    }
    let o = mechlab(&["fuzz", "--config", "/nonexistent/campaign.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/campaign.toml"));
}
