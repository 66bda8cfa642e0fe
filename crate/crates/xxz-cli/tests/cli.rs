use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn xxz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxz")).args(args).output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("decimal string").parse().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(xxz(&["solve", "--delta", "0.57", "--density", "0.7"]).status.code(), Some(2));
    assert_eq!(xxz(&["solve", "--delta", "1.5", "--density", "0.2"]).status.code(), Some(2));
    assert_eq!(xxz(&["solve", "--delta", "0.5", "--h", "1", "--density", "0.2"]).status.code(), Some(2));
    assert_eq!(xxz(&["curves", "--density", "0.2"]).status.code(), Some(2));
    assert_eq!(xxz(&["verify", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
    let out = xxz(&["solve", "--delta", "0.57", "--density", "0.7"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("density"));
}

#[test]
fn solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("obs.json");
    let out = xxz(&["solve", "--delta", "0.57", "--density", "0.21", "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let obs = read_json(&a);
    let q = num(&obs["q"]);
    assert!(q > 0.0);
    assert!((num(&obs["p_F"]) / std::f64::consts::PI - 0.21).abs() < 1e-8);

    // Re-solve from the Fermi rapidity alone.
    let b = dir.path().join("obs_q.json");
    let q_text = obs["q"].as_str().unwrap();
    let out = xxz(&["solve", "--delta", "0.57", "--q", q_text, "--out", b.to_str().unwrap()]);
    assert!(out.status.success());
    let again = read_json(&b);
    assert!((num(&again["p_F"]) / std::f64::consts::PI - 0.21).abs() < 1e-8);
    let nodes = again["grid"]["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 128);
    for n in nodes {
        let mantissa = n.as_str().unwrap().trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 17);
    }
}

#[test]
fn free_fermion_charge_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ff.json");
    let out = xxz(&["solve", "--delta", "0", "--h", "2.0", "--J", "1", "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    let obs = read_json(&p);
    let z = obs["charge"].as_array().unwrap();
    assert!(!z.is_empty());
    assert!(z.iter().all(|v| (num(v) - 1.0).abs() < 1e-10));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"delta": 0.57, "density": 0.21, "N": 64}"#).unwrap();
    let p = dir.path().join("obs.json");
    let out = xxz(&["solve", "--config", cfg.to_str().unwrap(), "--N", "96", "--out", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let obs = read_json(&p);
    assert_eq!(obs["params"]["N"], 96);
    assert_eq!(obs["grid"]["nodes"].as_array().unwrap().len(), 96);
}

#[test]
fn curves_are_deterministic_and_complete() {
    let args = ["curves", "--delta", "0.57", "--density", "0.21", "--kgrid", "16"];
    let a = xxz(&args);
    let b = xxz(&[&args[..], &["--workers", "1"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut families: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    families.dedup();
    let base: Vec<&&str> = families.iter().filter(|f| !f.ends_with("_refl")).collect();
    assert!(base.len() >= 9);
    for f in base {
        assert!(families.contains(&format!("{f}_refl").as_str()));
    }
}

#[test]
fn velocity_has_two_extrema_on_particle_range() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("obs.json");
    assert!(xxz(&["solve", "--delta", "-0.60", "--density", "0.30", "--out", p.to_str().unwrap()]).status.success());
    let p_f = num(&read_json(&p)["p_F"]);

    let out = xxz(&["velocity", "--delta", "-0.60", "--density", "0.30", "--kgrid", "400"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,v1"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 800);
    assert!((rows[0].0 + p_f).abs() < 1e-6);
    let particle: Vec<f64> = rows.iter().filter(|r| r.0 > p_f).map(|r| r.1).collect();
    let turns = particle.windows(3).filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0).count();
    assert_eq!(turns, 2);
}

#[test]
fn exponents_csv() {
    let out = xxz(&["exponents", "--delta", "0.57", "--density", "0.21", "--kgrid", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "kind,param,k,delta_plus,delta_minus,exponent");
    assert_eq!(rows.len(), 1 + 9 * 4);
    assert!(rows[1..].iter().all(|r| r.split(',').count() == 6));
}

#[test]
fn verify_identities_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    let out = xxz(&["verify", "--suite", "identities", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&p);
    assert_eq!(r["pass"], true);
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"].as_str().unwrap().starts_with("charge_phase_identity")));
    for c in checks {
        for key in ["name", "predicted", "fitted", "tolerance", "pass"] {
            assert!(c.get(key).is_some());
        }
    }
}
