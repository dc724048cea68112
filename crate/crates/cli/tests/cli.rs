use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn shotgun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shotgun")).args(args).env_remove("SHOTGUN_SEED").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Plain bisection on `e^{-λ(1-x)} - x` over `(0, 1 - 1e-9)`.
fn q_oracle(lambda: f64) -> f64 {
    let f = |x: f64| (-lambda * (1.0 - x)).exp() - x;
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-9);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[test]
fn estimate_subcritical_q_is_one() {
    let v = json_of(&shotgun(&["estimate", "--lambda", "1", "--samples", "1e4", "--seed", "7", "--r-max", "4"]));
    assert_eq!(v["result"]["q"].as_f64(), Some(1.0));
    assert_eq!(v["seed"], 7);
    assert_eq!(v["workers"], 1);
    assert_eq!(v["config"]["samples"], 10000);
}

#[test]
fn estimate_supercritical_q_matches_bisection() {
    let v = json_of(&shotgun(&["estimate", "--lambda", "2", "--samples", "2000", "--r-max", "3"]));
    let q = v["result"]["q"].as_f64().unwrap();
    assert!((q - q_oracle(2.0)).abs() < 1e-6, "{q}");
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let t = dir.path().join(format!("{name}.csv"));
        let args = ["estimate", "--lambda", "1.5", "--samples", "5000", "--seed", "11", "--workers", "2", "--r-max", "5"];
        let mut a: Vec<&str> = args.to_vec();
        let (ps, ts) = (p.to_str().unwrap().to_owned(), t.to_str().unwrap().to_owned());
        a.extend(["--out", &ps, "--table", &ts]);
        assert!(shotgun(&a).status.success());
        (std::fs::read(&p).unwrap(), std::fs::read(&t).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn seed_from_environment() {
    let env = Command::new(env!("CARGO_BIN_EXE_shotgun"))
        .args(["gen", "--n", "40", "--lambda", "1"])
        .env("SHOTGUN_SEED", "5")
        .output()
        .unwrap();
    let flag = shotgun(&["gen", "--n", "40", "--lambda", "1", "--seed", "5"]);
    assert_eq!(env.stdout, flag.stdout);
    assert_ne!(flag.stdout, shotgun(&["gen", "--n", "40", "--lambda", "1", "--seed", "6"]).stdout);
}

#[test]
fn reconstruct_beyond_diameter_always_succeeds() {
    for seed in ["1", "2", "3"] {
        let v = json_of(&shotgun(&["reconstruct", "--n", "80", "--lambda", "0.7", "--r", "80", "--seed", seed]));
        assert_eq!(v["result"]["success"], true);
        assert_eq!(v["result"]["stats"]["good"], 0);
    }
}

#[test]
fn bad_rho_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let out = shotgun(&["reconstruct", "--n", "50", "--r", "4", "--out", p.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--rho"));
    assert!(!p.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn blocking_without_trees_reports_none() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.txt");
    std::fs::write(&p, "6 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n").unwrap();
    let out = shotgun(&["blocking", "--input", p.to_str().unwrap(), "--r", "2", "-L", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("none found"));
    let v = json_of(&out);
    assert_eq!(v["result"]["found"], false);
    assert!(v["result"]["certificate"].is_null());
}

#[test]
fn blocking_certificate_is_verified() {
    let v = json_of(&shotgun(&["blocking", "--n", "2000", "--r", "2", "-L", "1", "--seed", "1"]));
    let res = &v["result"];
    assert_eq!(res["found"], true);
    assert_eq!(res["verification"]["r_profile_equal"], true);
    assert_eq!(res["verification"]["deep_profile_differs"], true);
    assert!(res["theoretical_r"].as_f64().unwrap() > 0.0);
}

#[test]
fn gen_then_profile() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["json", "csv"] {
        let g = dir.path().join(format!("g.{format}"));
        let b = dir.path().join("p.bin");
        assert!(shotgun(&["gen", "--n", "60", "--lambda", "1", "--format", format, "--out", g.to_str().unwrap()]).status.success());
        let out = shotgun(&["profile", g.to_str().unwrap(), "--r", "5", "--format", "csv", "--binary", b.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "vertex,vertices,edges,depth,degenerate,code");
        assert_eq!(rows.len(), 61);
        assert!(Path::new(&b).metadata().unwrap().len() > 0);
    }
}

#[test]
fn admissibility_report_fields() {
    let v = json_of(&shotgun(&["admissibility", "--n", "200", "--lambda", "0.8", "--r", "6", "--seed", "4"]));
    let res = &v["result"];
    assert!(res["admissible"].is_boolean());
    assert!(res["strong"]["strongly_admissible"].is_boolean());
    assert_eq!(v["config"]["L"], 3);
}

#[test]
fn sweep_emits_one_row_per_depth() {
    let out = shotgun(&["sweep", "--n", "100", "--r-min", "2", "--r-max", "7", "--trials", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "r,s,valid,trials,success_rate,admissibility_rate,errors");
    assert_eq!(rows.len(), 7);
    assert!(rows[1].starts_with("2,,false"));
    assert!(rows[4].starts_with("5,3,true,4,"));
}
