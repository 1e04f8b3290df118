use std::fmt::Write as _;
use std::path::Path;

use klshell::constitution::Pipeline;
use klshell::error::ShellError;
use klshell::solver::{newton_solve_from, NewtonReport};

use crate::scenario::{ParseError, Scenario};
use crate::setup::{build, Benchmark};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("setup failed: {0}")]
    Setup(#[from] ShellError),
    #[error("solver failed for `{name}` ({pipeline}): {error}")]
    Solver {
        name: String,
        pipeline: String,
        error: ShellError,
        report: NewtonReport,
        partial: Box<Curve>,
    },
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub const DD_SWITCH_WARNING: &str =
    "warning: the DD pipeline cannot capture the switch effect in bending; expect deviations from NP and AP";

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub lambda: f64,
    pub control: f64,
    pub response: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub name: String,
    pub pipeline: String,
    pub control_label: String,
    pub response_label: String,
    pub normalization: String,
    pub rows: Vec<CurveRow>,
}

impl Curve {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# {} ({}); {}\n",
            self.name, self.pipeline, self.normalization
        );
        let _ = writeln!(
            s,
            "lambda,{},{},iterations",
            self.control_label, self.response_label
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.12e},{:.12e},{:.12e},{}",
                r.lambda, r.control, r.response, r.iterations
            );
        }
        s
    }

    /// Largest `|y − y_ref| / |y_ref|` over the rows of equal load factor.
    pub fn max_relative_deviation(&self, reference: &Curve) -> f64 {
        self.rows
            .iter()
            .zip(&reference.rows)
            .filter(|(_, r)| r.response != 0.0)
            .map(|(a, r)| ((a.response - r.response) / r.response).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub curve: Curve,
    pub report: NewtonReport,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn report_text(&self) -> String {
        let mut s = format!(
            "scenario: {}\npipeline: {}\n",
            self.curve.name, self.curve.pipeline
        );
        for w in &self.warnings {
            let _ = writeln!(s, "{w}");
        }
        let _ = writeln!(s, "converged: {}", self.report.converged);
        let _ = writeln!(s, "total iterations: {}", self.report.total_iterations());
        for (i, st) in self.report.steps.iter().enumerate() {
            let last = st.residual_norms.last().copied().unwrap_or(f64::NAN);
            let _ = writeln!(
                s,
                "step {:3}  lambda {:.4}  iterations {:3}  bisections {}  stalled {}  final residual {:.3e}",
                i + 1,
                st.lambda,
                st.iterations,
                st.bisections,
                st.stalled,
                last
            );
        }
        s
    }
}

pub fn warnings(sc: &Scenario) -> Vec<String> {
    let mut w = vec![];
    if sc.pipeline == Pipeline::Dd && sc.material.switch && sc.material.model == "goh" {
        w.push(DD_SWITCH_WARNING.to_string());
    }
    w
}

fn empty_curve(sc: &Scenario, b: &Benchmark) -> Curve {
    Curve {
        name: sc.name.clone(),
        pipeline: sc.pipeline.label(),
        control_label: b.control_label.clone(),
        response_label: b.response_label.clone(),
        normalization: b.normalization.clone(),
        rows: vec![],
    }
}

/// Solve one scenario and sample the monitored response at every load step.
pub fn run(sc: &Scenario) -> Result<RunOutput, BenchError> {
    let b = build(sc)?;
    let mut curve = empty_curve(sc, &b);
    curve.rows.push(CurveRow {
        lambda: 0.0,
        control: 0.0,
        response: 0.0,
        iterations: 0,
    });
    let u0 = vec![0.0; b.system.n_dofs()];
    let mut rows = vec![];
    let res = newton_solve_from(&b.system, &b.options, u0, |sol| {
        rows.push((sol.lambda, b.response(sol)?));
        Ok(())
    });
    let report = match res {
        Ok((_, report)) => report,
        Err(f) => {
            let f = *f;
            attach(&mut curve, &rows, &f.report);
            return Err(BenchError::Solver {
                name: sc.name.clone(),
                pipeline: sc.pipeline.label(),
                error: f.error,
                report: f.report,
                partial: Box::new(curve),
            });
        }
    };
    attach(&mut curve, &rows, &report);
    for r in curve.rows.iter_mut() {
        r.control = r.lambda * b.control_max;
    }
    Ok(RunOutput {
        curve,
        report,
        warnings: warnings(sc),
    })
}

fn attach(curve: &mut Curve, rows: &[(f64, f64)], report: &NewtonReport) {
    for (i, &(lambda, response)) in rows.iter().enumerate() {
        let iterations = report.steps.get(i).map_or(0, |s| s.iterations);
        curve.rows.push(CurveRow {
            lambda,
            control: lambda,
            response,
            iterations,
        });
    }
}

/// Run independent scenarios on scoped threads; results keep input order.
pub fn run_all(scenarios: &[Scenario]) -> Vec<Result<RunOutput, BenchError>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|sc| s.spawn(move || run(sc)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}

#[derive(Clone, Debug)]
pub struct CompareOutput {
    pub runs: Vec<RunOutput>,
    /// Deviation of each run from the first one.
    pub deviations: Vec<(String, f64)>,
}

impl CompareOutput {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().map(|d| d.1).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let first = &self.runs[0].curve;
        let mut s = format!(
            "# {}; {}; deviations relative to {}\n",
            first.name, first.normalization, first.pipeline
        );
        s += &format!("lambda,{}", first.control_label);
        for r in &self.runs {
            s += &format!(",{} {}", first.response_label, r.curve.pipeline);
        }
        s.push('\n');
        for (i, row) in first.rows.iter().enumerate() {
            s += &format!("{:.12e},{:.12e}", row.lambda, row.control);
            for r in &self.runs {
                s += &format!(",{:.12e}", r.curve.rows[i].response);
            }
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let reference = &self.runs[0].curve.pipeline;
        for (label, d) in &self.deviations {
            let _ = writeln!(s, "max relative deviation {label} vs {reference}: {d:.3e}");
        }
        for w in self.runs.iter().flat_map(|r| &r.warnings) {
            let _ = writeln!(s, "{w}");
        }
        s
    }
}

/// One run per pipeline on the same mesh and stepping.
pub fn compare(sc: &Scenario, pipelines: &[Pipeline]) -> Result<CompareOutput, BenchError> {
    if pipelines.len() < 2 {
        return Err(BenchError::Usage(
            "compare needs at least two pipelines".into(),
        ));
    }
    let scenarios: Vec<_> = pipelines
        .iter()
        .map(|&p| Scenario {
            pipeline: p,
            ..sc.clone()
        })
        .collect();
    let runs = run_all(&scenarios)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let deviations = runs[1..]
        .iter()
        .map(|r| {
            (
                r.curve.pipeline.clone(),
                r.curve.max_relative_deviation(&runs[0].curve),
            )
        })
        .collect();
    Ok(CompareOutput { runs, deviations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    /// NP with the given number of thickness points, against AP.
    GaussPoints,
    /// AP at thickness `T = value · W`, against NP with five points.
    ThicknessRatio,
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub axis: SweepAxis,
    pub points: Vec<(f64, f64)>,
    pub runs: Vec<CompareOutput>,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        let (name, note) = match self.axis {
            SweepAxis::GaussPoints => ("n_gp", "max relative deviation of NP(n_gp) from AP"),
            SweepAxis::ThicknessRatio => ("T/W", "max relative deviation of AP from NP(5)"),
        };
        let mut s = format!("# {note}\n{name},error\n");
        for (x, e) in &self.points {
            let _ = writeln!(s, "{x},{e:.12e}");
        }
        s
    }
}

pub fn sweep(sc: &Scenario, axis: SweepAxis, values: &[f64]) -> Result<SweepOutput, BenchError> {
    if values.len() < 2 {
        return Err(BenchError::Usage(
            "a sweep needs at least two values".into(),
        ));
    }
    let mut runs = vec![];
    match axis {
        SweepAxis::GaussPoints => {
            let mut pipes = vec![Pipeline::Ap];
            for &v in values {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(BenchError::Usage(format!(
                        "invalid number of thickness points {v}"
                    )));
                }
                pipes.push(Pipeline::Np { n_gp: v as usize });
            }
            let c = compare(sc, &pipes)?;
            let points = values
                .iter()
                .zip(&c.deviations)
                .map(|(&v, d)| (v, d.1))
                .collect();
            runs.push(c);
            Ok(SweepOutput { axis, points, runs })
        }
        SweepAxis::ThicknessRatio => {
            let mut points = vec![];
            for &v in values {
                if !(v > 0.0) {
                    return Err(BenchError::Usage(format!("invalid thickness ratio {v}")));
                }
                let mut s = sc.clone();
                s.geometry.thickness = v * sc.geometry.width;
                let c = compare(&s, &[Pipeline::Np { n_gp: 5 }, Pipeline::Ap])?;
                points.push((v, c.deviations[0].1));
                runs.push(c);
            }
            Ok(SweepOutput { axis, points, runs })
        }
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}
