use std::path::Path;
use std::process::Command;

use klshell::constitution::Pipeline;
use klshell_bench::run::DD_SWITCH_WARNING;
use klshell_bench::{
    build, compare, load_scenario, parse_scenario, run, sweep, BenchError, Scenario, SweepAxis,
};

fn scenario(file: &str) -> Scenario {
    load_scenario(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(file),
    )
    .unwrap()
}

#[test]
fn shipped_scenarios_build() {
    for f in [
        "uniaxial_nh.scn",
        "cantilever_nh.scn",
        "cantilever_goh_switch.scn",
        "plate_nh.scn",
        "indentation_goh.scn",
    ] {
        let sc = scenario(f);
        assert_eq!(sc.name, f.trim_end_matches(".scn"));
        build(&sc).unwrap();
    }
}

#[test]
fn load_must_fit_geometry() {
    let text = "[geometry]\nkind = plate_quarter\nthickness = 0.1\nlength = 10\n\n[material]\nmodel = nh\n\n[load]\ntype = end_rotation\nangle_deg = 10\n";
    let sc = parse_scenario(text, "bad").unwrap();
    assert!(build(&sc).is_err());
}

#[test]
fn parse_errors_carry_locations() {
    let e = parse_scenario("[geometry]\nkind = strip\n[nonsense]\n", "x").unwrap_err();
    assert_eq!(e.line, 3);
    let text = "[geometry]\nkind = strip\nthickness = 0.1\nwidth = 1\nlength = 3\n\n[material]\nmodel = nh\nc1 = lots\n\n[load]\ntype = corner_force\nforce_ratio = 1\n";
    let e = parse_scenario(text, "x").unwrap_err();
    assert_eq!((e.line, e.column), (9, 6));
    let e = parse_scenario("[material]\nmodel = nh\n", "x").unwrap_err();
    assert!(e.message.contains("[geometry]"));
}

#[test]
fn dd_with_switch_warns() {
    let mut sc = scenario("cantilever_goh_switch.scn");
    sc.pipeline = Pipeline::Dd;
    sc.stepping.steps = 1;
    sc.load = klshell_bench::scenario::LoadSpec::EndRotation { angle_deg: 2.0 };
    let out = run(&sc).unwrap();
    assert_eq!(out.warnings, vec![DD_SWITCH_WARNING.to_string()]);
    assert!(out.report_text().contains(DD_SWITCH_WARNING));
    sc.pipeline = Pipeline::Ap;
    assert!(run(&sc).unwrap().warnings.is_empty());
}

#[test]
fn comparisons_need_two_entries() {
    let sc = scenario("uniaxial_nh.scn");
    assert!(matches!(
        compare(&sc, &[Pipeline::Ap]),
        Err(BenchError::Usage(_))
    ));
    assert!(matches!(
        sweep(&sc, SweepAxis::GaussPoints, &[3.0]),
        Err(BenchError::Usage(_))
    ));
    assert!(matches!(
        sweep(&sc, SweepAxis::GaussPoints, &[2.0, 2.5]),
        Err(BenchError::Usage(_))
    ));
    assert!(matches!(
        sweep(&sc, SweepAxis::ThicknessRatio, &[0.1, -0.1]),
        Err(BenchError::Usage(_))
    ));
}

#[test]
fn curve_is_normalized_and_monotone() {
    let mut sc = scenario("uniaxial_nh.scn");
    sc.stepping.steps = 4;
    let out = run(&sc).unwrap();
    let csv = out.curve.to_csv();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("# uniaxial_nh (ap); E = "));
    assert_eq!(lines.next().unwrap(), "lambda,F/(EA),u/L,iterations");
    assert_eq!(out.curve.rows.len(), 5);
    assert!(out
        .curve
        .rows
        .windows(2)
        .all(|w| w[1].response > w[0].response));
    assert!((out.curve.rows[4].control - 1.0).abs() < 1e-15);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_klshell"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_run_and_compare_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let scn = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/uniaxial_nh.scn");
    let scn = scn.to_str().unwrap();
    let r = cli(&[
        "run",
        "--scenario",
        scn,
        "--out",
        out,
        "--steps",
        "2",
        "--pipeline",
        "np",
        "--gauss-points",
        "3",
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(dir.path().join("uniaxial_nh_np3.csv").exists());
    let report = std::fs::read_to_string(dir.path().join("uniaxial_nh_np3.txt")).unwrap();
    assert!(report.contains("converged: true"));

    let r = cli(&[
        "compare",
        "--scenario",
        scn,
        "--out",
        out,
        "--steps",
        "2",
        "--pipeline",
        "ap,dd",
    ]);
    assert!(r.status.success());
    let csv = std::fs::read_to_string(dir.path().join("uniaxial_nh_compare.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3);
    assert!(String::from_utf8_lossy(&r.stdout).contains("dd vs ap"));
}

#[test]
fn cli_reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("broken.scn");
    std::fs::write(&scn, "[geometry]\nwidht = 3\n").unwrap();
    let r = cli(&[
        "run",
        "--scenario",
        scn.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("2:1"));
    let r = cli(&["run", "--scenario", scn.to_str().unwrap(), "--steps", "0"]);
    assert_eq!(r.status.code(), Some(2));
    let r = cli(&[
        "sweep",
        "--scenario",
        scn.to_str().unwrap(),
        "--axis",
        "n-gp",
    ]);
    assert!(!r.status.success());
}
