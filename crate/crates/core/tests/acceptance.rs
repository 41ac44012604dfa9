//! Acceptance criteria 1-10, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use smms_geometry::comparison::{
    check_absolute_volume_negh, check_area_comparison, check_doubling, check_mc_bounded_f,
    check_mc_drift, check_mc_rough, check_volume_comparison, check_volume_r1, doubling_epsilon,
    doubling_integral, normalized_volume_profile, CheckConfig, ComparisonReport, PotentialBound,
    TheoremId, Verdict,
};
use smms_geometry::eigen::{
    check_cheng_estimate, cheng_epsilon, model_eigenvalue, rayleigh_quotient_transplant,
    smms_radial_eigenvalue, DEFAULT_TOL,
};
use smms_geometry::global::{check_myers, index_form_total, BoundId};
use smms_geometry::model::{c_const, mean_curvature_model, sn, ModelSpace};
use smms_geometry::smms::{make_space, RhoMode, WarpedSMMS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if let false = $cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn err(e: smms_geometry::Error) -> String {
    e.to_string()
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

fn sphere_area(d: usize) -> f64 {
    match d {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => unreachable!(),
    }
}

/// `∫_0^r sn_H^e(t) dt` in closed form for `H` in {-1, 0, 1}.
fn sn_power_integral(h: f64, e: usize, r: f64) -> f64 {
    if h == 0.0 {
        return r.powi(e as i32 + 1) / (e as f64 + 1.0);
    }
    let (s, c) = if h > 0.0 {
        (r.sin(), r.cos())
    } else {
        (r.sinh(), r.cosh())
    };
    let sign = h.signum();
    match (e, sign > 0.0) {
        (1, true) => 1.0 - c,
        (1, false) => c - 1.0,
        (2, true) => (r - s * c) / 2.0,
        (2, false) => (s * c - r) / 2.0,
        (3, true) => 2.0 / 3.0 - c + c.powi(3) / 3.0,
        (3, false) => c.powi(3) / 3.0 - c + 2.0 / 3.0,
        (4, true) => 3.0 * r / 8.0 - (2.0 * r).sin() / 4.0 + (4.0 * r).sin() / 32.0,
        (4, false) => 3.0 * r / 8.0 - (2.0 * r).sinh() / 4.0 + (4.0 * r).sinh() / 32.0,
        _ => unreachable!(),
    }
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for h in [-1.0, 0.0, 1.0] {
        for dim in 2..=5usize {
            let model = ModelSpace::new(dim as f64, h, 0.0).map_err(err)?;
            for i in 0..64 {
                let r = 0.25 + 2.75 * i as f64 / 63.0;
                let (s_ref, c_ref) = match h {
                    x if x > 0.0 => (r.sin(), r.cos()),
                    x if x < 0.0 => (r.sinh(), r.cosh()),
                    _ => (r, 1.0),
                };
                let e = dim - 1;
                let checks = [
                    (sn(h, r), s_ref),
                    (
                        mean_curvature_model(dim as f64, h, r).map_err(err)?,
                        e as f64 * c_ref / s_ref,
                    ),
                    (
                        model.area(r).map_err(err)?,
                        sphere_area(dim) * s_ref.powi(e as i32),
                    ),
                    (
                        model.volume(r).map_err(err)?,
                        sphere_area(dim) * sn_power_integral(h, e, r),
                    ),
                ];
                for (k, (got, want)) in checks.into_iter().enumerate() {
                    let rel = rel_err(got, want);
                    worst = worst.max(rel);
                    ensure!(
                        rel < 1e-9,
                        "H={h} n={dim} r={r} quantity {k}: {got} vs {want}"
                    );
                }
            }
        }
    }
    let ratio = c_const(3, 0.5, 0.0).map_err(err)?;
    ensure!(
        (ratio - 2.0 * PI / 3.0).abs() < 1e-10,
        "c_const(3, 1/2) = {ratio}"
    );
    Ok(format!(
        "max relative error {worst:.1e}; c_const = {ratio:.12}"
    ))
}

fn space(name: &str, pairs: &[(&str, f64)]) -> WarpedSMMS {
    let params: BTreeMap<String, f64> = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_space(name, 3, &params).expect("valid catalog space")
}

fn criterion_2() -> Outcome {
    let cfg = CheckConfig::default();
    let mut count = 0;
    let mut worst = 0.0_f64;
    let mut record = |rep: &ComparisonReport, label: &str| -> Result<(), String> {
        let m = rep
            .min_margin
            .ok_or_else(|| format!("{label} {}: no margin", rep.theorem_id))?;
        count += 1;
        worst = worst.max(m.abs());
        ensure!(
            m.abs() <= 1e-8,
            "{label} {}: min_margin {m:e}",
            rep.theorem_id
        );
        Ok(())
    };

    let unweighted = [
        ("euclidean", space("euclidean", &[]), 0.0),
        ("sphere", space("sphere", &[("H", 1.0)]), 1.0),
        ("hyperbolic", space("hyperbolic", &[("H", -1.0)]), -1.0),
    ];
    for (label, s, h) in &unweighted {
        let (h, label) = (*h, *label);
        record(&check_mc_rough(s, h, 0.05, 1.5, &cfg).map_err(err)?, label)?;
        let inner = check_mc_bounded_f(s, h, 0.0, &cfg).map_err(err)?;
        let inner = inner
            .iter()
            .find(|r| r.theorem_id == TheoremId::McBoundedFInner)
            .ok_or("no inner report")?;
        record(inner, label)?;
        record(&check_mc_drift(s, h, 0.0, &cfg).map_err(err)?, label)?;
        let bounded = PotentialBound::Bounded { k: 0.0 };
        let drift = PotentialBound::Drift { a: 0.0 };
        record(
            &check_area_comparison(s, h, bounded, 0.2, 0.75, &cfg).map_err(err)?,
            label,
        )?;
        record(
            &check_area_comparison(s, h, drift, 0.2, 1.5, &cfg).map_err(err)?,
            label,
        )?;
        for rep in check_volume_comparison(s, h, bounded, 0.2, 0.75, &cfg).map_err(err)? {
            record(&rep, label)?;
        }
        for rep in check_volume_comparison(s, h, drift, 0.2, 1.5, &cfg).map_err(err)? {
            record(&rep, label)?;
        }
    }

    for h in [-1.0, 0.0, 1.0] {
        let a = 0.5;
        let s = space("linear_drift", &[("H", h), ("a", a), ("r_max", 3.0)]);
        let label = format!("linear_drift(H={h})");
        let drift = PotentialBound::Drift { a };
        record(
            &check_mc_rough(&s, h, 0.05, 1.5, &cfg).map_err(err)?,
            &label,
        )?;
        record(&check_mc_drift(&s, h, a, &cfg).map_err(err)?, &label)?;
        record(
            &check_area_comparison(&s, h, drift, 0.2, 1.5, &cfg).map_err(err)?,
            &label,
        )?;
        for rep in check_volume_comparison(&s, h, drift, 0.2, 1.5, &cfg).map_err(err)? {
            record(&rep, &label)?;
        }
    }
    Ok(format!("{count} reports, max |min_margin| {worst:.1e}"))
}

/// Radii `(r, R_bounded, R_drift, R_r1)` admissible for a space of the suite.
fn suite_radii(h: f64) -> (f64, f64, f64, f64) {
    if h > 0.0 {
        (0.2, 0.75, 1.5, 1.5)
    } else {
        (0.2, 2.5, 2.5, 2.5)
    }
}

fn suite_reports(
    s: &WarpedSMMS,
    h: f64,
    cfg: &CheckConfig,
) -> Result<Vec<ComparisonReport>, String> {
    let pb = s.potential_bounds();
    let bounded = PotentialBound::Bounded { k: pb.k };
    let drift = PotentialBound::Drift { a: pb.a };
    let (r, r_a, r_b, r_1) = suite_radii(h);
    let r_end = if h > 0.0 { 2.5 } else { 2.9 };

    let mut out = vec![
        check_mc_rough(s, h, 0.05, r_end, cfg).map_err(err)?,
        check_mc_drift(s, h, pb.a, cfg).map_err(err)?,
        check_area_comparison(s, h, bounded, r, r_a, cfg).map_err(err)?,
        check_area_comparison(s, h, drift, r, r_b, cfg).map_err(err)?,
        check_volume_r1(s, h, drift, r_1, cfg).map_err(err)?,
    ];
    out.extend(check_mc_bounded_f(s, h, pb.k, cfg).map_err(err)?);
    out.extend(check_volume_comparison(s, h, bounded, r, r_a, cfg).map_err(err)?);
    out.extend(check_volume_comparison(s, h, drift, r, r_b, cfg).map_err(err)?);
    let cert = doubling_epsilon(s.n(), drift, h, r_b, 4.0).map_err(err)?;
    out.push(check_doubling(s, h, drift, 4.0, r_b, cert.epsilon, cfg).map_err(err)?);
    Ok(out)
}

fn criterion_3() -> Outcome {
    let cfg = CheckConfig::default();
    let mut count = 0;
    let mut gated = 0;
    let mut worst = f64::INFINITY;
    for (i, rs) in common::suite(3).iter().enumerate() {
        let reports = suite_reports(&rs.space, rs.h, &cfg)
            .map_err(|e| format!("space {i} {:?}: {e}", rs.params))?;
        for rep in reports {
            match rep.min_margin {
                Some(m) => {
                    count += 1;
                    worst = worst.min(m);
                    ensure!(
                        m >= -1e-7,
                        "space {i} {:?}: {} min_margin {m:e} at r = {:?}",
                        rs.params,
                        rep.theorem_id,
                        rep.argmin_r
                    );
                }
                None => gated += 1,
            }
        }
    }
    Ok(format!(
        "{count} reports, {gated} gated, smallest min_margin {worst:.3e}"
    ))
}

fn criterion_4() -> Outcome {
    let flat3 = model_eigenvalue(3, 0.0, 0.0, 1.0, DEFAULT_TOL).map_err(err)?;
    let e3 = rel_err(flat3.lambda, PI * PI);
    ensure!(e3 < 1e-6, "lambda(3,0,0,1) = {}", flat3.lambda);

    let j01 = 2.404_825_557_695_773_f64;
    let flat2 = model_eigenvalue(2, 0.0, 0.0, 1.0, DEFAULT_TOL).map_err(err)?;
    let e2 = rel_err(flat2.lambda, j01 * j01);
    ensure!(e2 < 1e-6, "lambda(2,0,0,1) = {}", flat2.lambda);

    let hemi = model_eigenvalue(3, 0.0, 1.0, PI / 2.0, DEFAULT_TOL).map_err(err)?;
    let eh = rel_err(hemi.lambda, 3.0);
    ensure!(eh < 1e-6, "lambda(3,0,1,pi/2) = {}", hemi.lambda);
    ensure!(
        hemi.eigenfunction.len() >= 64,
        "only {} samples",
        hemi.eigenfunction.len()
    );
    let sup = hemi
        .eigenfunction
        .iter()
        .map(|p| (p.phi - p.r.cos()).abs())
        .fold(0.0, f64::max);
    ensure!(sup < 1e-6, "sup |phi - cos r| = {sup:e}");
    Ok(format!(
        "relative errors {e3:.1e}, {e2:.1e}, {eh:.1e}; eigenfunction sup error {sup:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let (n, a, h, radius, delta) = (3, 0.0, 0.0, 1.0, 0.1);
    let eps = cheng_epsilon(n, a, h, radius, delta).map_err(err)?;
    let mut amplitude = 0.1;
    let s = loop {
        let s = space(
            "perturbed_sphere",
            &[
                ("H", 0.0),
                ("eps", amplitude),
                ("omega", 3.0),
                ("r_max", 1.2),
            ],
        );
        if s.excess_constant(h, RhoMode::Radial).map_err(err)? <= eps.epsilon {
            break s;
        }
        amplitude /= 2.0;
        ensure!(
            amplitude > 1e-12,
            "no perturbation reaches l <= {}",
            eps.epsilon
        );
    };
    let rep = check_cheng_estimate(&s, h, a, radius, delta, RhoMode::Radial).map_err(err)?;
    ensure!(rep.verdict == Verdict::Pass, "verdict {}", rep.verdict);
    ensure!(rep.ratio <= 1.0 + delta, "ratio {}", rep.ratio);

    let ball = smms_radial_eigenvalue(&s, radius, DEFAULT_TOL).map_err(err)?;
    let q = rayleigh_quotient_transplant(&s, a, h, radius).map_err(err)?;
    let slack = 1e-8 * ball.lambda;
    ensure!(
        q.quotient >= ball.lambda - slack,
        "Q = {} < lambda_B = {}",
        q.quotient,
        ball.lambda
    );
    Ok(format!(
        "epsilon {:.3e}, perturbation eps {amplitude:.3e}, l {:.3e}, ratio {:.6}, Q - lambda_B {:.3e}",
        eps.epsilon,
        rep.l,
        rep.ratio,
        q.quotient - ball.lambda
    ))
}

fn criterion_6() -> Outcome {
    let round = space("sphere", &[("H", 1.0)]);
    let rep = check_myers(&round, 1.0, RhoMode::Radial).map_err(err)?;
    let diameter = rep
        .actual_diameter
        .ok_or("no diameter for the round sphere")?;
    ensure!((diameter - PI).abs() < 1e-12, "diameter {diameter}");
    for id in [BoundId::MyersF, BoundId::MyersGrad] {
        let b = rep.bounds[&id];
        ensure!((b - diameter).abs() < 1e-12, "{id} = {b}");
    }
    let index = rep.bounds[&BoundId::MyersIndex];
    ensure!(
        (index - 2.0 * PI).abs() < 1e-12 && diameter <= index,
        "MYERS_INDEX = {index}"
    );
    let total = index_form_total(&round, PI).map_err(err)?;
    ensure!(total.abs() < 1e-8, "index form at pi = {total:e}");

    let mut tightest = f64::INFINITY;
    for (i, rs) in common::closed_suite(6, 20).iter().enumerate() {
        let rep = check_myers(&rs.space, rs.h, RhoMode::Radial).map_err(err)?;
        let d = rep.actual_diameter.ok_or("closed space without diameter")?;
        for (id, b) in &rep.bounds {
            ensure!(
                d <= *b,
                "space {i} {:?}: diameter {d} > {id} = {b}",
                rs.params
            );
            tightest = tightest.min(b - d);
        }
        ensure!(rep.pass, "space {i}: report does not pass");
    }
    Ok(format!(
        "index form {total:.1e}; smallest bound slack over 20 spaces {tightest:.4}"
    ))
}

fn criterion_7() -> Outcome {
    let bound = PotentialBound::Drift { a: 0.5 };
    let cert = doubling_epsilon(3, bound, 0.0, 1.0, 4.0).map_err(err)?;
    let f = doubling_integral(3, bound, 0.0, 1.0, cert.epsilon).map_err(err)?;
    ensure!(
        (f.exp() - 4.0).abs() < 1e-10,
        "exp F(epsilon) = {}",
        f.exp()
    );
    let f0 = doubling_integral(3, bound, 0.0, 1.0, 0.0).map_err(err)?;
    ensure!(f0 == 0.0, "F(0) = {f0:e}");
    let mut prev = 0.0;
    let mut eps = Vec::new();
    for alpha in [1.5, 2.0, 4.0, 8.0] {
        let e = doubling_epsilon(3, bound, 0.0, 1.0, alpha)
            .map_err(err)?
            .epsilon;
        ensure!(e > prev, "epsilon({alpha}) = {e} is not above {prev}");
        eps.push(format!("{e:.4}"));
        prev = e;
    }
    Ok(format!(
        "epsilon {:.10}, |exp F - 4| {:.1e}, epsilon over alpha [{}]",
        cert.epsilon,
        (f.exp() - 4.0).abs(),
        eps.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let cfg = CheckConfig::default();
    let mut largest = f64::NEG_INFINITY;
    let mut profiles = 0;
    for (i, rs) in common::suite(3).iter().enumerate() {
        let pb = rs.space.potential_bounds();
        let (_, r_a, r_b, _) = suite_radii(rs.h);
        for (bound, radius) in [
            (PotentialBound::Bounded { k: pb.k }, r_a),
            (PotentialBound::Drift { a: pb.a }, r_b),
        ] {
            let profile =
                normalized_volume_profile(&rs.space, rs.h, bound, radius, &cfg).map_err(err)?;
            profiles += 1;
            for w in profile.windows(2) {
                let step = w[1].1 - w[0].1;
                largest = largest.max(step);
                ensure!(
                    step <= 1e-7,
                    "space {i} {:?} {bound:?}: ratio rises by {step:e} at r = {}",
                    rs.params,
                    w[1].0
                );
            }
        }
    }
    Ok(format!(
        "{profiles} profiles, largest successive difference {largest:.2e}"
    ))
}

fn criterion_9() -> Outcome {
    let s = space("hyperbolic", &[("H", -1.0), ("f_sin", 0.1)]);
    let k = s.potential_bounds().k;
    let rep = check_absolute_volume_negh(&s, -1.0, k, &[0.5, 1.0, 2.0], &CheckConfig::default())
        .map_err(err)?;
    ensure!(rep.pass, "verdict {}", rep.verdict);
    let margins: Vec<f64> = rep.grid.iter().map(|p| p.margin).collect();
    ensure!(margins.iter().all(|m| *m > 0.0), "margins {margins:?}");
    Ok(format!("k = {k:.4}, margins {margins:.4?}"))
}

fn smms(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_smms"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run smms: {e}"))
}

fn validate_report(v: &serde_json::Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    ensure!(
        obj.get("tool_version").is_some_and(|t| t.is_string()),
        "tool_version"
    );
    ensure!(obj.get("spec").is_some_and(|t| t.is_object()), "spec");
    let verdicts = ["PASS", "FAIL", "NOT-APPLICABLE"];
    let verdict = obj
        .get("verdict")
        .and_then(|t| t.as_str())
        .ok_or("verdict")?;
    ensure!(verdicts.contains(&verdict), "verdict {verdict}");
    let checks = obj
        .get("checks")
        .and_then(|c| c.as_array())
        .ok_or("checks")?;
    ensure!(!checks.is_empty(), "no checks");
    for c in checks {
        ensure!(
            c.get("theorem_id").is_some_and(|t| t.is_string()),
            "theorem_id"
        );
        ensure!(c.get("params").is_some_and(|t| t.is_object()), "params");
        ensure!(
            c.get("min_margin")
                .is_some_and(|t| t.is_number() || t.is_null()),
            "min_margin"
        );
        ensure!(c.get("pass").is_some_and(|t| t.is_boolean()), "pass");
        if let Some(p) = c.get("grid_csv_path") {
            ensure!(p.is_string() || p.is_null(), "grid_csv_path");
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("report.json");
    let out_str = out.to_str().ok_or("temp path is not UTF-8")?;

    let first = smms(&[
        "check",
        "--space",
        "sphere",
        "--n",
        "3",
        "--param",
        "H=1",
        "--theorem",
        "MC_DRIFT",
        "--a",
        "0",
        "--out",
        out_str,
    ])?;
    let second = smms(&[
        "check",
        "--space",
        "euclidean",
        "--n",
        "3",
        "--theorem",
        "VOL_B",
        "--H",
        "1",
        "--r",
        "0.25",
        "--R",
        "0.5",
    ])?;
    let third = smms(&[
        "check",
        "--space",
        "sphere",
        "--theorem",
        "VOL_A",
        "--H",
        "1",
        "--R",
        "1.0",
    ])?;
    let codes = [
        first.status.code(),
        second.status.code(),
        third.status.code(),
    ];
    ensure!(codes == [Some(0), Some(0), Some(2)], "exit codes {codes:?}");
    let diag = String::from_utf8_lossy(&third.stderr);
    ensure!(
        diag.contains("R exceeds pi/(4 sqrt(H))"),
        "diagnostic: {diag}"
    );

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    validate_report(&report)?;
    let stdout: serde_json::Value =
        serde_json::from_slice(&second.stdout).map_err(|e| format!("stdout JSON: {e}"))?;
    validate_report(&stdout)?;
    ensure!(
        stdout["checks"]
            .as_array()
            .is_some_and(|c| c.iter().all(|c| c["min_margin"].is_number())),
        "VOL_B report lacks margins"
    );

    let csv_path = report["checks"][0]["grid_csv_path"]
        .as_str()
        .ok_or("no grid_csv_path")?;
    let csv = std::fs::read_to_string(csv_path).map_err(|e| e.to_string())?;
    let header = csv.lines().next().unwrap_or_default();
    ensure!(header == "r,lhs,rhs,margin", "header {header:?}");
    let via_flag = smms(&[
        "check",
        "--space",
        "sphere",
        "--theorem",
        "MC_DRIFT",
        "--a",
        "0",
        "--format",
        "csv",
    ])?;
    let header = String::from_utf8_lossy(&via_flag.stdout)
        .lines()
        .next()
        .unwrap_or_default()
        .to_string();
    ensure!(
        header == "r,lhs,rhs,margin",
        "--format csv header {header:?}"
    );
    Ok("exit codes 0/0/2, report schema valid, CSV header exact".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("model functions match closed forms", criterion_1),
        ("equality on model spaces", criterion_2),
        ("inequalities on randomized spaces", criterion_3),
        ("eigenvalue oracles", criterion_4),
        ("eigenvalue comparison end to end", criterion_5),
        ("diameter bounds", criterion_6),
        ("doubling certificate", criterion_7),
        ("normalized volume ratio is nonincreasing", criterion_8),
        ("absolute volume bound for H < 0", criterion_9),
        ("command-line conformance", criterion_10),
    ];
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failures = 0;
    let mut ran = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} ({secs:.2}s) {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2}: {name} ({secs:.2}s) {detail}", i + 1);
            }
        }
    }
    println!("{} of {ran} criteria passed", ran - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
