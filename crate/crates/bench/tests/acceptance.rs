//! Acceptance criteria 1 to 8, one PASS/FAIL line each.
//!
//! The lines go straight to stderr so they show up without `--nocapture`.
//! A criterion that evaluates but misses its tolerance is reported and does
//! not fail the test unless `KLSHELL_ACCEPTANCE_STRICT=1`; an evaluation
//! error (solver failure, bad setup) always does.

use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use klshell::constitution::Pipeline;
use klshell::verify::{global_tangent_error, run_verify, VerifyOptions};
use klshell_bench::{build, load_scenario, run_all, sweep, BenchError, Curve, Scenario, SweepAxis};

type Outcome = Result<(bool, String), BenchError>;

fn scenario(file: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(file);
    load_scenario(&path).unwrap()
}

fn with_material(sc: &Scenario, model: &str, angles: &[f64], kappa: f64, switch: bool) -> Scenario {
    let mut s = sc.clone();
    s.material.model = model.to_string();
    s.material.fiber_angles = angles.to_vec();
    s.material.kappa = kappa;
    s.material.switch = switch;
    s
}

fn with_pipeline(sc: &Scenario, p: Pipeline) -> Scenario {
    Scenario {
        pipeline: p,
        ..sc.clone()
    }
}

/// The eight materials of the membrane and bending comparisons.
fn materials() -> Vec<(String, &'static str, Vec<f64>, f64)> {
    let mut v = vec![
        ("NH".to_string(), "nh", vec![], 0.0),
        ("MR".to_string(), "mr", vec![], 0.0),
        ("Fung".to_string(), "fung", vec![], 0.0),
        ("AMR".to_string(), "amr", vec![45.0, -45.0], 0.0),
    ];
    for k in [0.0, 0.226, 1.0 / 3.0] {
        v.push((format!("GOH(k={k:.3})"), "goh", vec![30.0, -30.0], k));
    }
    v
}

fn runs(scenarios: &[Scenario]) -> Result<Vec<Curve>, BenchError> {
    run_all(scenarios)
        .into_iter()
        .map(|r| r.map(|o| o.curve))
        .collect()
}

fn criterion_1() -> Outcome {
    let base = scenario("uniaxial_nh.scn");
    let mut pass = true;
    let mut notes = vec![];
    for (label, model, angles, kappa) in materials() {
        let start = Instant::now();
        let sc = with_material(&base, model, &angles, kappa, false);
        let c = runs(&[
            with_pipeline(&sc, Pipeline::Np { n_gp: 2 }),
            with_pipeline(&sc, Pipeline::Ap),
            with_pipeline(&sc, Pipeline::Dd),
        ])?;
        let dev = c[1]
            .max_relative_deviation(&c[0])
            .max(c[2].max_relative_deviation(&c[0]));
        let secs = start.elapsed().as_secs_f64();
        pass &= dev < 1e-4 && secs < 60.0;
        notes.push(format!("{label} {dev:.1e} ({secs:.0} s)"));
    }
    Ok((
        pass,
        format!("max deviation across NP2/AP/DD: {}", notes.join(", ")),
    ))
}

fn criterion_2() -> Outcome {
    let base = scenario("cantilever_nh.scn");
    let mut pass = true;
    let mut notes = vec![];
    for (label, model, angles, kappa) in materials() {
        let sc = with_material(&base, model, &angles, kappa, false);
        let np = if model == "goh" { 3 } else { 2 };
        let c = runs(&[
            with_pipeline(&sc, Pipeline::Np { n_gp: np }),
            with_pipeline(&sc, Pipeline::Ap),
            with_pipeline(&sc, Pipeline::Dd),
        ])?;
        let (ap, dd) = (
            c[1].max_relative_deviation(&c[0]),
            c[2].max_relative_deviation(&c[0]),
        );
        pass &= ap < 0.01 && dd < 0.01;
        notes.push(format!(
            "{label} AP {:.2}% DD {:.2}% vs NP{np}",
            100.0 * ap,
            100.0 * dd
        ));
    }
    Ok((pass, notes.join(", ")))
}

fn criterion_3() -> Outcome {
    let sc = scenario("cantilever_goh_switch.scn");
    let gps = [2, 3, 5, 8];
    let mut list = vec![with_pipeline(&sc, Pipeline::Ap)];
    list.extend(
        gps.iter()
            .map(|&n| with_pipeline(&sc, Pipeline::Np { n_gp: n })),
    );
    list.push(with_pipeline(&sc, Pipeline::Dd));
    let c = runs(&list)?;
    let errs: Vec<f64> = c[1..=gps.len()]
        .iter()
        .map(|x| x.max_relative_deviation(&c[0]))
        .collect();
    let dd = c[gps.len() + 1].max_relative_deviation(&c[0]);
    let monotone = errs.windows(2).all(|w| w[1] <= w[0]);
    let last = errs[errs.len() - 1];
    let pass = monotone && last < 0.02 && dd > 0.05;
    let list: Vec<_> = gps
        .iter()
        .zip(&errs)
        .map(|(n, e)| format!("NP{n} {:.2}%", 100.0 * e))
        .collect();
    Ok((
        pass,
        format!(
            "error vs AP: {} (non-increasing: {monotone}, < 2% at 8: {}); DD vs AP {:.1}% (> 5%: {})",
            list.join(", "),
            last < 0.02,
            100.0 * dd,
            dd > 0.05
        ),
    ))
}

fn criterion_4() -> Outcome {
    let sc = scenario("cantilever_goh_switch.scn");
    let out = sweep(&sc, SweepAxis::ThicknessRatio, &[0.025, 0.05, 0.1])?;
    let pass = out.points.windows(2).all(|w| w[1].1 > w[0].1);
    let list: Vec<_> = out
        .points
        .iter()
        .map(|(r, e)| format!("T/W={r}: {:.2}%", 100.0 * e))
        .collect();
    Ok((pass, format!("AP vs NP5: {}", list.join(", "))))
}

fn first_response(sc: &Scenario) -> Result<(f64, f64), BenchError> {
    let c = runs(std::slice::from_ref(sc))?.remove(0);
    let row = c.rows.last().expect("at least one step");
    Ok((row.control, row.response))
}

fn criterion_5() -> Outcome {
    let mut a = scenario("uniaxial_nh.scn");
    a.load = klshell_bench::scenario::LoadSpec::CornerForce { force_ratio: 1e-4 };
    a.stepping.steps = 1;
    let (f, u) = first_response(&a)?;
    let stiffness = f / u;

    let mut b = scenario("cantilever_nh.scn");
    b.load = klshell_bench::scenario::LoadSpec::EndRotation { angle_deg: 5.0 };
    b.stepping.steps = 1;
    let (alpha, m) = first_response(&b)?;
    let bending = m / alpha;
    b.constraints.root = klshell_bench::scenario::RootKind::Fixed;
    let (_, m_fixed) = first_response(&b)?;

    let mut c = scenario("plate_nh.scn");
    c.geometry.nel_w = 12;
    c.geometry.nel_l = 12;
    c.load = klshell_bench::scenario::LoadSpec::Pressure { pressure: 1e-5 };
    c.stepping.steps = 1;
    c.stepping.tol_abs = 1e-14;
    let e = build(&c)?.youngs_modulus;
    let (p, w) = first_response(&c)?;
    let (t, l, nu) = (c.geometry.thickness, c.geometry.length, 0.5);
    let d = e * t.powi(3) / (12.0 * (1.0 - nu * nu));
    let coef = w.abs() * d / (p * l.powi(4));

    let pa = (stiffness - 1.0).abs() < 0.01;
    let pb = (bending - 1.0).abs() < 0.02;
    let pc = (coef / 0.00126 - 1.0).abs() < 0.05;
    Ok((
        pa && pb && pc,
        format!(
            "(a) F/(EA strain) = {stiffness:.5}; (b) ML/(EI alpha) = {bending:.4} (clamped root {:.4}); \
             (c) w D/(p L^4) = {coef:.6} vs 0.00126",
            m_fixed / alpha
        ),
    ))
}

fn criterion_6_7() -> Result<((bool, String), (bool, String)), BenchError> {
    let start = Instant::now();
    let report = run_verify(&VerifyOptions::new(1))?;
    let secs = start.elapsed().as_secs_f64();
    let (scan, tangents): (Vec<_>, Vec<_>) = report
        .checks
        .iter()
        .partition(|c| c.name.starts_with("switch"));
    let failed = tangents.iter().filter(|c| !c.passed()).count();
    let worst = tangents.iter().map(|c| c.worst).fold(0.0, f64::max);
    let six = (
        failed == 0 && secs < 300.0,
        format!("{} tangent checks, {failed} failed, worst {worst:.1e}, {secs:.0} s for the whole suite", tangents.len()),
    );
    let seven = (
        scan.iter().all(|c| c.passed()),
        scan.iter()
            .map(|c| {
                format!(
                    "{} worst {:.1e} (tol {:.0e}, n={})",
                    c.name, c.worst, c.tol, c.samples
                )
            })
            .collect::<Vec<_>>()
            .join("; "),
    );
    Ok((six, seven))
}

fn criterion_8() -> Outcome {
    let sc = scenario("indentation_goh.scn");
    let c = runs(&[
        with_pipeline(&sc, Pipeline::Np { n_gp: 5 }),
        with_pipeline(&sc, Pipeline::Ap),
    ])?;
    let dev = c[1].max_relative_deviation(&c[0]);

    // Contact tangent on a state pushed into the sphere, with a
    // deterministic ripple so the contact normals vary.
    let b = build(&sc)?;
    let sys = &b.system;
    let ind = sys.indenter.as_ref().expect("indentation has an indenter");
    let n = sys.n_dofs();
    let u: Vec<f64> = (0..n)
        .map(|j| if j % 3 == 2 { -0.5 * ind.travel } else { 0.0 } + 1e-3 * (j as f64).sin())
        .collect();
    let force = sys.contact_force(&u, 1.0)?;
    let cols: Vec<usize> = (0..36.min(n)).collect();
    let fd = global_tangent_error(sys, &u, 1.0, &cols, 1e-6, false)?;
    let pass = dev < 0.03 && fd < 1e-5 && force.z.abs() > 0.0;
    Ok((
        pass,
        format!(
            "NP5 vs AP force-depth deviation {:.2}%; contact tangent vs FD {fd:.1e} (F_z = {:.3e})",
            100.0 * dev,
            force.z
        ),
    ))
}

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

#[test]
fn acceptance() {
    let strict = std::env::var("KLSHELL_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut results: Vec<(usize, Outcome)> = vec![];
    results.push((1, criterion_1()));
    results.push((2, criterion_2()));
    results.push((3, criterion_3()));
    results.push((4, criterion_4()));
    results.push((5, criterion_5()));
    match criterion_6_7() {
        Ok((six, seven)) => {
            results.push((6, Ok(six)));
            results.push((7, Ok(seven)));
        }
        Err(e) => {
            let msg = e.to_string();
            results.push((6, Err(e)));
            results.push((7, Err(BenchError::Usage(msg))));
        }
    }
    results.push((8, criterion_8()));

    let mut errors = 0;
    let mut failures = 0;
    for (k, r) in &results {
        match r {
            Ok((true, msg)) => report(&format!("PASS criterion {k}: {msg}")),
            Ok((false, msg)) => {
                failures += 1;
                report(&format!("FAIL criterion {k}: {msg}"));
            }
            Err(e) => {
                errors += 1;
                report(&format!("FAIL criterion {k}: evaluation error: {e}"));
            }
        }
    }
    assert_eq!(errors, 0, "acceptance criteria could not be evaluated");
    if strict {
        assert_eq!(failures, 0, "acceptance criteria failed");
    }
}
