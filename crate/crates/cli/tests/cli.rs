use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stqp() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stqp"));
    c.env_remove("STQP_CONFIG")
        .env_remove("STQP_FORMULATION")
        .env_remove("STQP_BOUND")
        .env_remove("STQP_VI")
        .env_remove("STQP_GAP");
    c
}

fn run(c: &mut Command) -> Output {
    c.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const I3: &str = "stqp 3\n1\n0 1\n0 0 1\n";
const MIXED: &str = "stqp 3\n2\n-1 3\n0.5 0.2 1.5\n";

#[test]
fn solve_prints_documented_fields() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "i3.txt", I3);
    let out = run(stqp().arg("solve").arg(&p));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in [
        "value", "bound", "gap", "support", "x", "status", "nodes", "lp_count", "wall_s",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["value"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert_eq!(v["status"], "Optimal");
    assert_eq!(v["support"].as_array().unwrap().len(), 3);
}

#[test]
fn every_variant_flag_combination_agrees_with_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.txt", MIXED);
    let oracle = json(&run(stqp().arg("oracle").arg(&p)))["value"].as_f64().unwrap();
    for f in ["milp1", "milp2"] {
        for b in ["l1", "l2"] {
            for vi in [false, true] {
                let mut c = stqp();
                c.args(["solve", "--deterministic", "--formulation", f, "--bound", b])
                    .arg(&p);
                if vi {
                    c.arg("--vi");
                }
                let v = json(&run(&mut c));
                assert!((v["value"].as_f64().unwrap() - oracle).abs() < 1e-6, "{f} {b} {vi}");
                let label = v["variant"].as_str().unwrap();
                assert!(label.starts_with(&f.to_uppercase()));
                assert_eq!(label.ends_with("-VI"), vi);
            }
        }
    }
}

#[test]
fn bound_reports_ordered_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.txt", MIXED);
    let v = json(&run(stqp().arg("bound").arg(&p)));
    let g0 = v["gamma0"].as_f64().unwrap();
    let l1 = v["l1"].as_f64().unwrap();
    let l2 = v["l2"].as_f64().unwrap();
    assert_eq!(g0, -1.0);
    assert!(g0 <= l1 && l1 <= l2 + v["residuals"]["shift"].as_f64().unwrap());
    assert_eq!(v["big_m"].as_array().unwrap().len(), 3);
}

#[test]
fn export_lp_writes_a_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.txt", MIXED);
    let lp = dir.path().join("m.lp");
    let out = run(stqp().arg("solve").arg(&p).arg("--export-lp").arg(&lp));
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize"));
    assert!(text.contains("Binar"));
    assert!(text.trim_end().ends_with("End"));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "stqp 2\n1\n0 x\n");
    let out = run(stqp().arg("solve").arg(&bad));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let ragged = write(
        dir.path(),
        "r.json",
        r#"{"name":"a","n":2,"lower_triangle":[[1.0],[0.5]]}"#,
    );
    assert_eq!(run(stqp().arg("solve").arg(&ragged)).status.code(), Some(2));
    assert_eq!(
        run(stqp().args(["solve", "--formulation", "milp3"]).arg(&bad))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(stqp().args(["solve", "missing.txt"])).status.code(), Some(2));
    let good = write(dir.path(), "m.txt", MIXED);
    assert_eq!(
        run(stqp().args(["solve", "--gap", "0"]).arg(&good)).status.code(),
        Some(2)
    );
}

#[test]
fn time_limit_with_open_gap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(stqp()
        .args([
            "generate",
            "--family",
            "st",
            "--n",
            "40",
            "--params",
            "0.5",
            "--seed",
            "3",
            "--out-dir",
        ])
        .arg(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    let file = json(&out)["files"][0].as_str().unwrap().to_string();
    let out = run(stqp().arg("solve").arg(&file).args(["--time-limit", "1e-6"]));
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["status"], "TimeLimit");
    assert!(v["gap"].as_f64().unwrap() > 1e-6);
    assert!(v["bound"].as_f64().unwrap() <= v["value"].as_f64().unwrap());
}

#[test]
fn internal_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("stqp 22\n");
    for i in 0..22 {
        let row: Vec<&str> = (0..=i).map(|j| if i == j { "1" } else { "0" }).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    let p = write(dir.path(), "id.txt", &text);
    let out = run(stqp().arg("oracle").arg(&p));
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clique"));
}

#[test]
fn config_file_and_environment_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "m.txt", MIXED);
    let cfg = write(
        dir.path(),
        "run.conf",
        "# defaults\nformulation = milp2\nbound = l2\nvi = true\n",
    );
    let label = |c: &mut Command| json(&run(c))["variant"].as_str().unwrap().to_string();

    assert_eq!(
        label(stqp().arg("--config").arg(&cfg).arg("solve").arg(&p)),
        "MILP2-L2-VI"
    );
    assert_eq!(
        label(
            stqp()
                .arg("--config")
                .arg(&cfg)
                .env("STQP_BOUND", "l1")
                .arg("solve")
                .arg(&p)
        ),
        "MILP2-L1-VI"
    );
    assert_eq!(
        label(
            stqp()
                .arg("--config")
                .arg(&cfg)
                .env("STQP_BOUND", "l1")
                .args(["solve", "--bound", "l2", "--formulation", "milp1"])
                .arg(&p)
        ),
        "MILP1-L2-VI"
    );
    assert_eq!(
        label(stqp().env("STQP_CONFIG", &cfg).arg("solve").arg(&p)),
        "MILP2-L2-VI"
    );

    let broken = write(dir.path(), "broken.conf", "formulation milp2\n");
    assert_eq!(
        run(stqp().arg("--config").arg(&broken).arg("solve").arg(&p))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(stqp().env("STQP_BOUND", "l9").arg("solve").arg(&p)).status.code(),
        Some(2)
    );
}

#[test]
fn generate_bench_profile_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let out = run(stqp()
        .args([
            "generate",
            "--family",
            "blst",
            "--n",
            "8",
            "--seed",
            "11",
            "--count",
            "3",
            "--out-dir",
        ])
        .arg(&inst));
    assert_eq!(out.status.code(), Some(0));
    let summary = json(&out);
    assert_eq!(summary["files"].as_array().unwrap().len(), 3);
    let frac = summary["trivial_fraction"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&frac));

    let out = run(stqp()
        .args([
            "generate",
            "--family",
            "st",
            "--n",
            "7",
            "--params",
            "0.4",
            "--json",
            "--out-dir",
        ])
        .arg(&inst));
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["files"][0].as_str().unwrap().ends_with(".json"));

    let csv = dir.path().join("r.csv");
    let js = dir.path().join("r.json");
    let out = run(stqp()
        .arg("bench")
        .arg(&inst)
        .args(["--variants", "MILP1-L1,MILP2-L2-VI,ORACLE", "--deterministic", "--csv"])
        .arg(&csv)
        .arg("--json")
        .arg(&js));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MILP2-L2-VI"));
    let records = stqp::bench::read_csv(&csv).unwrap();
    assert_eq!(records.len(), 4 * 3);
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 12);
    for chunk in records.chunks(3) {
        let oracle = chunk[2].value.unwrap();
        for r in &chunk[..2] {
            assert!((r.value.unwrap() - oracle).abs() < 1e-6);
        }
    }

    let svg = dir.path().join("p.svg");
    let out = run(stqp().arg("profile").arg(&csv).arg("--svg").arg(&svg));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(text.starts_with("variant,tau,fraction"));
    assert!(text.lines().skip(1).all(|l| {
        let f: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        (0.0..=1.0).contains(&f)
    }));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn stableset_on_dimacs_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write(
        dir.path(),
        "c5.col",
        "c five-cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n",
    );
    let v = json(&run(stqp().arg("stableset").arg(&c5)));
    assert_eq!(v["ilp"]["alpha"], 2);
    assert_eq!(v["motzkin_straus"]["alpha"], 2);
    assert_eq!(v["alpha_bruteforce"], 2);
    assert_eq!(v["consistent"], true);
    assert!((v["motzkin_straus"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let v = json(&run(stqp().arg("stableset").arg("--complement").arg(&c5)));
    assert_eq!(v["ilp"]["alpha"], 2);

    let bad = write(dir.path(), "bad.col", "p edge 3 1\ne 1 4\n");
    assert_eq!(run(stqp().arg("stableset").arg(&bad)).status.code(), Some(2));
}
