use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use klshell::constitution::Pipeline;
use klshell::verify::{run_verify, VerifyOptions};
use klshell_bench::run::write_file;
use klshell_bench::{compare, load_scenario, run, sweep, BenchError, Scenario, SweepAxis};

#[derive(Parser)]
#[command(
    name = "klshell",
    version,
    about = "Nonlinear isogeometric Kirchhoff-Love shell benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineArg {
    Np,
    Ap,
    Dd,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    NGp,
    ThicknessRatio,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the number of load steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Thickness points for the NP pipeline.
    #[arg(long)]
    gauss_points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and write its curve and run report.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        pipeline: Option<PipelineArg>,
    },
    /// Run a scenario under several pipelines and report deviations from the first.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "np,ap,dd")]
        pipeline: Vec<PipelineArg>,
    },
    /// Error against the reference pipeline over n_gp or T/W.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Randomized finite-difference and oracle checks.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// NP takes `--gauss-points`, else the scenario's own count, else 5 with the
/// fiber switch and 2 without.
fn pipeline(p: PipelineArg, n_gp: Option<usize>, sc: &Scenario) -> Pipeline {
    let default = match sc.pipeline {
        Pipeline::Np { n_gp } => n_gp,
        _ if sc.material.switch => 5,
        _ => 2,
    };
    match p {
        PipelineArg::Np => Pipeline::Np {
            n_gp: n_gp.unwrap_or(default),
        },
        PipelineArg::Ap => Pipeline::Ap,
        PipelineArg::Dd => Pipeline::Dd,
    }
}

fn scenario(c: &Common) -> Result<Scenario, BenchError> {
    let mut sc = load_scenario(&c.scenario)?;
    if let Some(s) = c.steps {
        if s == 0 {
            return Err(BenchError::Usage("--steps must be at least 1".into()));
        }
        sc.stepping.steps = s;
    }
    if let (Some(n), Pipeline::Np { .. }) = (c.gauss_points, sc.pipeline) {
        sc.pipeline = Pipeline::Np { n_gp: n };
    }
    Ok(sc)
}

fn execute(cli: Cli) -> Result<bool, BenchError> {
    match cli.command {
        Command::Run {
            common,
            pipeline: p,
        } => {
            let mut sc = scenario(&common)?;
            if let Some(p) = p {
                sc.pipeline = pipeline(p, common.gauss_points, &sc);
            }
            let stem = format!("{}_{}", sc.name, sc.pipeline.label());
            match run(&sc) {
                Ok(out) => {
                    for w in &out.warnings {
                        eprintln!("{w}");
                    }
                    write_file(&common.out, &format!("{stem}.csv"), &out.curve.to_csv())?;
                    write_file(&common.out, &format!("{stem}.txt"), &out.report_text())?;
                    println!("wrote {}", common.out.join(format!("{stem}.csv")).display());
                    Ok(true)
                }
                Err(BenchError::Solver {
                    name,
                    pipeline,
                    error,
                    report,
                    partial,
                }) => {
                    write_file(&common.out, &format!("{stem}.csv"), &partial.to_csv())?;
                    let text = klshell_bench::RunOutput {
                        curve: *partial.clone(),
                        report: report.clone(),
                        warnings: vec![],
                    }
                    .report_text();
                    write_file(&common.out, &format!("{stem}.txt"), &text)?;
                    Err(BenchError::Solver {
                        name,
                        pipeline,
                        error,
                        report,
                        partial,
                    })
                }
                Err(e) => Err(e),
            }
        }
        Command::Compare {
            common,
            pipeline: ps,
        } => {
            let sc = scenario(&common)?;
            let pipes: Vec<_> = ps
                .into_iter()
                .map(|p| pipeline(p, common.gauss_points, &sc))
                .collect();
            let out = compare(&sc, &pipes)?;
            write_file(
                &common.out,
                &format!("{}_compare.csv", sc.name),
                &out.to_csv(),
            )?;
            write_file(
                &common.out,
                &format!("{}_compare.txt", sc.name),
                &out.summary(),
            )?;
            print!("{}", out.summary());
            Ok(true)
        }
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let sc = scenario(&common)?;
            let axis = match axis {
                AxisArg::NGp => SweepAxis::GaussPoints,
                AxisArg::ThicknessRatio => SweepAxis::ThicknessRatio,
            };
            let out = sweep(&sc, axis, &values)?;
            let csv = out.to_csv();
            write_file(&common.out, &format!("{}_sweep.csv", sc.name), &csv)?;
            print!("{csv}");
            Ok(true)
        }
        Command::Verify { seed, out } => {
            let report = run_verify(&VerifyOptions::new(seed))?;
            let text = report.render();
            if let Some(dir) = out {
                write_file(&dir, &format!("verify_{seed}.txt"), &text)?;
            }
            print!("{text}");
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
