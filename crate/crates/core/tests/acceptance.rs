//! Acceptance criteria, one line each. Runs as a plain binary so the
//! verdicts are always printed; exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use bsl::diagrams::DiagramId;
use bsl::geometry::{laplacian_identity_residual, warp, MetricSpec};
use bsl::lab::{fubini_check, joint_eigenfunction_check, random_invariant, transport_audit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Run {
    code: i32,
    stdout: Vec<u8>,
    elapsed: Duration,
}

fn bsl(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_bsl")).args(args).output().expect("spawn bsl");
    Run { code: out.status.code().unwrap_or(-1), stdout: out.stdout, elapsed: start.elapsed() }
}

fn json(run: &Run) -> Value {
    serde_json::from_slice(&run.stdout).expect("json output")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn zonal_oracle() -> Outcome {
    let run = bsl(&["spectrum", "--diagram", "trivial-s2", "--side", "M", "--grid", "1024", "--modes", "4"]);
    if run.code != 0 {
        return outcome(false, format!("exit {}", run.code));
    }
    let v = json(&run);
    let lambdas: Vec<f64> = v["result"]["values"].as_array().unwrap().iter().map(|e| e["lambda"].as_f64().unwrap()).collect();
    let worst = lambdas.iter().zip([2.0, 6.0, 12.0, 20.0]).map(|(l, o)| rel(*l, o)).fold(0.0, f64::max);
    let ok = lambdas.len() == 4 && worst <= 1e-6 && run.elapsed < Duration::from_secs(5);
    outcome(ok, format!("max rel err {worst:.2e}, {:.2}s", run.elapsed.as_secs_f64()))
}

fn hopf_isospectral() -> Outcome {
    let run = bsl(&["compare", "--diagram", "hopf", "--grid", "1024", "--modes", "5"]);
    if run.code != 0 {
        return outcome(false, format!("exit {}", run.code));
    }
    let r = &json(&run)["result"];
    let gap = r["max_relative_gap"].as_f64().unwrap();
    let verdict = r["isospectral"].as_bool().unwrap();
    let mut worst = 0.0f64;
    for (p, o) in r["pairs"].as_array().unwrap().iter().zip([8.0, 24.0, 48.0, 80.0, 120.0]) {
        worst = worst.max(rel(p["lambda_m"].as_f64().unwrap(), o)).max(rel(p["lambda_m_prime"].as_f64().unwrap(), o));
    }
    let ok = gap <= 1e-8 && verdict && worst <= 1e-6 && run.elapsed < Duration::from_secs(10);
    outcome(ok, format!("gap {gap:.2e}, oracle err {worst:.2e}, {:.2}s", run.elapsed.as_secs_f64()))
}

fn joint_eigenfunctions() -> Outcome {
    let mut worst = 0.0f64;
    for id in [DiagramId::Hopf, DiagramId::TrivialS2] {
        let m = MetricSpec::default_for(id).unwrap();
        for index in 1..=5 {
            let c = joint_eigenfunction_check(id, &m, index, 1024).unwrap();
            worst = worst.max(c.residual / c.native_residual);
        }
    }
    outcome(worst <= 10.0, format!("max residual ratio {worst:.2}"))
}

fn warp_breaks_isospectrality() -> Outcome {
    let run = bsl(&["warp", "--diagram", "hopf", "--scales", "0.25,0.5,1,2"]);
    if run.code != 0 {
        return outcome(false, format!("exit {}", run.code));
    }
    let reports = json(&run)["result"]["reports"].as_array().unwrap().clone();
    let f = |r: &Value, k: &str| r[k].as_f64().unwrap();
    let control = reports.iter().find(|r| f(r, "scale") == 0.0).expect("c = 0 control");
    let drift = (f(control, "lambda1_warped") - f(control, "lambda1_unwarped")).abs();
    let control_ok = drift <= f(control, "err_warped") + f(control, "err_unwarped");
    let broke: Vec<f64> = reports
        .iter()
        .filter(|r| {
            let d = (f(r, "lambda1_warped") - f(r, "lambda1_unwarped")).abs();
            d > 10.0 * (f(r, "err_warped") + f(r, "err_unwarped"))
        })
        .map(|r| f(r, "scale"))
        .collect();
    let ok = control_ok && !broke.is_empty() && run.elapsed < Duration::from_secs(30);
    outcome(ok, format!("broke at {broke:?}, control drift {drift:.1e}, {:.2}s", run.elapsed.as_secs_f64()))
}

fn laplacian_identity_convergence() -> Outcome {
    let base = MetricSpec::default_for(DiagramId::Hopf).unwrap();
    let l = base.orbit_space_length();
    let t: Vec<f64> = (0..=32).map(|i| l * i as f64 / 32.0).collect();
    let u: Vec<f64> = t.iter().map(|t| (2.0 * t).cos()).collect();
    let m = warp(&base, &t, &u, 1.0).unwrap();
    let phi = random_invariant(&m, &mut ChaCha8Rng::seed_from_u64(5));
    let residual = |n: usize| {
        let samples: Vec<f64> = (0..n).map(|i| phi(l * (i as f64 + 0.5) / n as f64)).collect();
        laplacian_identity_residual(&m, &samples, n).unwrap()
    };
    let (r512, r1024) = (residual(512), residual(1024));
    let ratio = r512 / r1024;
    outcome((3.5..=4.5).contains(&ratio), format!("{r512:.3e} -> {r1024:.3e}, ratio {ratio:.3}"))
}

fn gm_verification() -> Outcome {
    let run = bsl(&["verify", "--diagram", "gm", "--samples", "1000"]);
    let v = json(&run);
    let a = &v["result"]["actions"];
    let f = |k: &str| a[k].as_f64().unwrap();
    let commute = f("commute_residual");
    let membership = f("membership_bullet").max(f("membership_star"));
    let free = a["bullet_free"].as_bool().unwrap() && a["freeness_points"].as_u64() == Some(100);
    let ok = run.code == 0 && commute <= 1e-12 && membership <= 1e-12 && free && run.elapsed < Duration::from_secs(5);
    outcome(ok, format!("commute {commute:.1e}, membership {membership:.1e}, bullet-free {free}, {:.2}s", run.elapsed.as_secs_f64()))
}

fn fubini() -> Outcome {
    let m = MetricSpec::default_for(DiagramId::Hopf).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let f = random_invariant(&m, &mut rng);
        let c = fubini_check(&m, f, 256).unwrap();
        worst = worst.max((c.total_direct - c.fiber_volume * c.base).abs() / c.total_direct.abs());
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e} over 20 functions"))
}

fn transport() -> Outcome {
    let mut worst = 0.0f64;
    for id in DiagramId::ALL {
        let a = transport_audit(id, 1000, 8).unwrap();
        worst = worst.max(a.additive).max(a.multiplicative).max(a.involution).max(a.unit);
    }
    outcome(worst <= 1e-12, format!("max defect {worst:.1e} over 3 entries x 1000 samples"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let configs: [&[&str]; 4] = [
        &["spectrum", "--diagram", "hopf", "--side", "M'", "--grid", "256", "--modes", "3"],
        &["compare", "--diagram", "trivial-s2", "--grid", "256"],
        &["warp", "--diagram", "hopf", "--grid", "128", "--scales", "0.5,1"],
        &["verify", "--diagram", "gm", "--samples", "200", "--seed", "7"],
    ];
    let mut mismatched = Vec::new();
    for (i, args) in configs.iter().enumerate() {
        let path: PathBuf = dir.path().join(format!("run{i}.json"));
        let p = path.to_str().unwrap();
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let mut full = args.to_vec();
            full.extend(["--out", p]);
            assert_eq!(bsl(&full).code, 0);
            outputs.push(std::fs::read(&path).unwrap());
        }
        if outputs[0] != outputs[1] {
            mismatched.push(args[0]);
        }
    }
    outcome(mismatched.is_empty(), format!("{} configs, mismatched {mismatched:?}", configs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 zonal oracle", zonal_oracle),
        ("2 hopf quotients isospectral", hopf_isospectral),
        ("3 joint eigenfunctions", joint_eigenfunctions),
        ("4 warping breaks isospectrality", warp_breaks_isospectrality),
        ("5 laplacian identity convergence", laplacian_identity_convergence),
        ("6 gm action verification", gm_verification),
        ("7 fubini", fubini),
        ("8 transport homomorphism", transport),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {name:<34} {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
