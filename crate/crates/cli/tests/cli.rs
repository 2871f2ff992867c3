use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congest-sssp"))
        .args(args)
        .env_remove("CONGEST_SSSP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_with_forced_virtuals_prints_path_distances() {
    let o =
        cli(&["run", "--gen", "path:5", "--root", "0", "--k", "1", "--q", "forced:0,2,4", "--b", "1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let dists: Vec<&str> =
        out.lines().skip_while(|l| !l.starts_with("vertex")).skip(1).map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(dists, ["0", "1", "2", "3", "4"]);
}

#[test]
fn params_prints_regime_and_q_k() {
    let o = cli(&["params", "--n", "1000000", "--d", "100", "--s", "1", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("regime:"));
    assert!(out.contains("k = 16"), "{out}");
}

#[test]
fn stream_from_file_reports_the_pass_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "6 7\n0 1 2\n1 2 2\n2 3 1\n3 4 5\n4 5 1\n0 5 9\n1 4 3\n").unwrap();
    let json = dir.path().join("r.json");
    let o =
        cli(&["stream", "--graph", g.to_str().unwrap(), "--root", "0", "--k", "4", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    let passes = v["result"]["ledger"]["passes"].as_u64().unwrap();
    let peak = v["result"]["ledger"]["peak_words"].as_u64().unwrap();
    let out = stdout(&o);
    assert!(out.contains(&format!("passes={passes} peak_words={peak}")), "{out}");
    assert_eq!(v["result"]["rows"][0]["dist"], serde_json::json!([0, 2, 4, 5, 5, 6]));
}

#[test]
fn csv_rows_append_with_one_header_and_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let args = ["run", "--gen", "random:40:100", "--seed", "7", "--csv", csv.to_str().unwrap()];
    assert_eq!(cli(&args).status.code(), Some(0));
    assert_eq!(cli(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(
        lines[0].starts_with("n,m,D_rt,regime,q,k,s,b,seed,retries,rounds,messages,passes,peak_words,verified,wall_ms")
    );
    let strip = |l: &str| l.rsplit_once(',').unwrap().0.to_string();
    assert_eq!(strip(lines[1]), strip(lines[2]));
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_congest-sssp"))
        .args(["run", "--gen", "random:30:60", "--csv", csv.to_str().unwrap()])
        .env("CONGEST_SSSP_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[8], "42");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(cli(&["run", "--gen", "path:5", "--unknown"]).status.code(), Some(1));
    assert_eq!(cli(&["run"]).status.code(), Some(1));
    assert_eq!(cli(&["run", "--gen", "path:5", "--graph", "x.txt"]).status.code(), Some(1));
    assert_eq!(cli(&["run", "--gen", "path:5", "--root", "9"]).status.code(), Some(1));
    assert_eq!(cli(&["run", "--gen", "grid:3"]).status.code(), Some(1));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn dstream_reports_negative_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("neg3.txt");
    std::fs::write(&g, "3 3 directed\n0 1 1\n1 2 -2\n2 0 0\n").unwrap();
    let o = cli(&["dstream", "--graph", g.to_str().unwrap(), "--k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("negative cycle"));
}

#[test]
fn verify_passes_on_a_random_graph() {
    let o = cli(&["verify", "--gen", "random:50:120", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let o = cli(&["verify", "--gen", "digraph:30:90:0:20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn sweep_prints_the_fit() {
    let o = cli(&["sweep", "--sizes", "48,96", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max relative residual"));
    assert_eq!(cli(&["sweep", "--sizes", "96,48", "--trials", "3"]).status.code(), Some(1));
}

#[test]
fn verification_failure_exits_with_two() {
    // Virtuals crowded at one end leave the far half of the path out of reach.
    let forced = format!("forced:{}", (0..100).map(|v| v.to_string()).collect::<Vec<_>>().join(","));
    let o = cli(&["run", "--gen", "path:200", "--q", &forced, "--retry-cap", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("verification failed"));
}
