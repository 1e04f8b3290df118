//! Scenario-driven benchmarks for the `klshell` solver.

pub mod run;
pub mod scenario;
pub mod setup;

pub use run::{
    compare, run, run_all, sweep, BenchError, CompareOutput, Curve, CurveRow, RunOutput, SweepAxis,
    SweepOutput,
};
pub use scenario::{parse_scenario, ParseError, Scenario};
pub use setup::{build, build_material, Benchmark, Monitor};

/// Read and parse a scenario file; its stem names the scenario.
pub fn load_scenario(path: &std::path::Path) -> Result<Scenario, BenchError> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario");
    Ok(parse_scenario(&text, name)?)
}
