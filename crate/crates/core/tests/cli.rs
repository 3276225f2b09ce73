use std::path::Path;
use std::process::{Command, Output};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ising-sca"))
        .args(args)
        .current_dir(dir)
        .env_remove("ISING_SCA_OUT_DIR")
        .output()
        .unwrap()
}

fn generate(dir: &Path, name: &str, args: &[&str]) {
    let mut all = vec!["generate", "--output", name];
    all.extend_from_slice(args);
    let out = cli(dir, &all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_csv_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir, "g.txt", &["--family", "bernoulli", "--n", "12", "--p", "0.5", "--seed", "2"]);
    let out = cli(
        dir,
        &["run", "--instance", "g.txt", "--trials", "5", "--steps", "200", "--reference", "oracle", "--out-dir", "out"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trials = std::fs::read_to_string(dir.join("out/trials.csv")).unwrap();
    assert!(trials.starts_with("engine,trial,seed,min_energy,best_step\n"));
    assert_eq!(trials.lines().count(), 1 + 3 * 5);
    let hist = std::fs::read_to_string(dir.join("out/histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 51);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["reference"]["provenance"], "oracle");
    assert_eq!(summary["instance"]["metadata"]["family"], "bernoulli_spin_glass");
    assert_eq!(summary["engines"].as_array().unwrap().len(), 3);
}

#[test]
fn json_format_and_env_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir, "t.txt", &["--family", "tsp", "--cities", "4", "--seed", "1"]);
    let out = Command::new(env!("CARGO_BIN_EXE_ising-sca"))
        .args(["run", "--instance", "t.txt", "--engine", "esca", "--trials", "4", "--steps", "3000", "--format", "json"])
        .current_dir(dir)
        .env("ISING_SCA_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("from-env/results.json")).unwrap()).unwrap();
    assert_eq!(v["trials"].as_array().unwrap().len(), 4);
    assert_eq!(v["summary"]["reference"]["provenance"], "empirical");
    assert!(v["summary"]["engines"][0]["best_tour_length"].is_u64());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir, "g.txt", &["--family", "gaussian", "--n", "8", "--seed", "4"]);
    std::fs::write(
        dir.join("bench.conf"),
        "# benchmark settings\ninstance = g.txt\nengine = glauber\ntrials = 3\nsteps = 50\nout_dir = cfg-out\n",
    )
    .unwrap();
    let out = cli(dir, &["run", "--config", "bench.conf", "--trials", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trials = std::fs::read_to_string(dir.join("cfg-out/trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 2);
    assert!(trials.lines().skip(1).all(|l| l.starts_with("glauber,")));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir, "g.txt", &["--family", "maxcut", "--n", "6", "--p", "0.5"]);
    let code = |args: &[&str]| cli(dir, args).status.code();
    assert_eq!(code(&["run", "--instance", "g.txt", "--engine", "esca", "--epsilon", "1.5"]), Some(2));
    assert_eq!(code(&["run", "--instance", "g.txt", "--trials", "0"]), Some(2));
    assert_eq!(code(&["run", "--instance", "g.txt", "--engine", "annealer"]), Some(2));
    assert_eq!(code(&["run", "--bogus"]), Some(2));
    assert_eq!(code(&["run", "--instance", "missing.txt"]), Some(4));
    std::fs::write(dir.join("bad.txt"), "ising 2\nJ 0 5 1.0\n").unwrap();
    assert_eq!(code(&["exact", "--instance", "bad.txt"]), Some(2));
}

#[test]
fn verify_and_exact_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("tri.txt"), "ising 3\nJ 0 1 1\nJ 0 2 1\nJ 1 2 1\n").unwrap();
    let out = cli(dir, &["verify", "--instance", "tri.txt", "--epsilon", "0.5", "--beta", "0.1", "--delta", "0.01", "--out-dir", "v"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("PASS esca(eps=0.5)"), "{text}");
    assert!(text.contains("t_bound=10"));
    let reports: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("v/verify.json")).unwrap()).unwrap();
    assert_eq!(reports[0]["t_bound"], 10);
    assert_eq!(reports[0]["passed"], true);

    let out = cli(dir, &["exact", "--instance", "tri.txt"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["min_energy"], -3.0);
    assert_eq!(v["ground_state_count"], 2);
}

#[test]
fn sweep_writes_one_row_per_epsilon() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    generate(dir, "g.txt", &["--family", "bernoulli", "--n", "10", "--p", "1.0"]);
    let out = cli(
        dir,
        &["sweep", "--instance", "g.txt", "--epsilons", "0.2,0.6,1.0", "--trials", "10", "--steps", "3000",
          "--reference=-45", "--out-dir", "s"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("s/sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "epsilon,success_rate,min_energy,mean_energy");
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.split(',').nth(1) == Some("1.0")));
}
