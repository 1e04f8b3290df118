use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::Vector3;

use super::dofs::DofMap;
use super::internal::{internal_force_and_tangent, Contribution};
use super::loads::{
    contact_force_and_tangent, external_force_and_tangent, normal_penalty, reaction_moment,
    Indenter, Load, NormalConstraint,
};
use crate::constitution::Pipeline;
use crate::error::{Result, ShellError};
use crate::iga::ShellMesh;
use crate::material::MaterialSpec;

/// Discrete shell problem: mesh, constitution, loads and constraints.
#[derive(Clone, Debug)]
pub struct ShellSystem {
    pub mesh: ShellMesh,
    pub material: MaterialSpec,
    pub pipeline: Pipeline,
    pub loads: Vec<Load>,
    pub normals: Vec<NormalConstraint>,
    pub indenter: Option<Indenter>,
    pub dofs: DofMap,
}

/// Residual `f_int − f_ext + ∂Π_penalty/∂u` and its Jacobian, in full numbering.
impl ShellSystem {
    pub fn new(mesh: ShellMesh, material: MaterialSpec, pipeline: Pipeline) -> Self {
        let dofs = DofMap::free(mesh.n_dofs());
        ShellSystem {
            mesh,
            material,
            pipeline,
            loads: vec![],
            normals: vec![],
            indenter: None,
            dofs,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    pub fn evaluate(&self, u: &[f64], lambda: f64, tangent: bool) -> Result<Contribution> {
        let mut out =
            internal_force_and_tangent(&self.mesh, u, &self.material, self.pipeline, tangent)?;
        let ext = external_force_and_tangent(&self.mesh, u, &self.loads, lambda, tangent)?;
        for (a, b) in out.residual.iter_mut().zip(&ext.residual) {
            *a -= b;
        }
        out.triplets
            .extend(ext.triplets.into_iter().map(|(i, j, v)| (i, j, -v)));
        for c in &self.normals {
            out.add(normal_penalty(&self.mesh, u, c, lambda, tangent)?);
        }
        if let Some(ind) = &self.indenter {
            out.add(contact_force_and_tangent(&self.mesh, u, ind, lambda, tangent)?.0);
        }
        Ok(out)
    }

    pub fn residual(&self, u: &[f64], lambda: f64) -> Result<Vec<f64>> {
        Ok(self.evaluate(u, lambda, false)?.residual)
    }

    /// Moment held by the `i`-th normal constraint.
    pub fn reaction_moment(&self, i: usize, u: &[f64], lambda: f64) -> Result<f64> {
        reaction_moment(&self.mesh, u, &self.normals[i], lambda)
    }

    /// Total force exerted by the indenter on the shell.
    pub fn contact_force(&self, u: &[f64], lambda: f64) -> Result<Vector3<f64>> {
        match &self.indenter {
            Some(ind) => Ok(contact_force_and_tangent(&self.mesh, u, ind, lambda, false)?.1),
            None => Ok(Vector3::zeros()),
        }
    }
}

/// Solve `K x = b` with a sparse LU factorization (no symmetry assumed).
pub fn sparse_solve(n: usize, triplets: &[(usize, usize, f64)], b: &[f64]) -> Result<Vec<f64>> {
    let trips: Vec<Triplet<usize, usize, f64>> = triplets
        .iter()
        .map(|&(i, j, v)| Triplet::new(i, j, v))
        .collect();
    let k = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
        .map_err(|e| ShellError::SingularTangent(format!("{e:?}")))?;
    let lu = k
        .sp_lu()
        .map_err(|e| ShellError::SingularTangent(format!("{e:?}")))?;
    let mut rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
    lu.solve_in_place(rhs.as_mut());
    let x: Vec<f64> = (0..n).map(|i| rhs[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(ShellError::SingularTangent("non-finite solution".into()));
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Number of uniform load steps.
    pub steps: usize,
    pub max_iterations: usize,
    /// Absolute residual tolerance [kPa·mm²].
    pub tol_abs: f64,
    /// Tolerance relative to the first residual of the step.
    pub tol_rel: f64,
    /// Maximum number of increment halvings per load step.
    pub max_bisections: usize,
    /// A stalled iteration is accepted when its best residual is below this
    /// bound. Residuals with jumps (thickness points crossing a fiber switch)
    /// may have no root closer than the jump size.
    pub tol_stall: f64,
}

impl NewtonOptions {
    /// Defaults with the absolute tolerance scaled by a force `E·T·L`.
    pub fn with_force_scale(scale: f64) -> Self {
        NewtonOptions {
            steps: 20,
            max_iterations: 30,
            tol_abs: 1e-8 * scale,
            tol_rel: 1e-10,
            max_bisections: 8,
            tol_stall: 1e-8 * scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub lambda: f64,
    /// Residual evaluations of the final (converged) attempt, summed over sub-increments.
    pub iterations: usize,
    pub residual_norms: Vec<f64>,
    pub bisections: usize,
    /// Sub-increments accepted under the stall tolerance.
    pub stalled: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NewtonReport {
    pub steps: Vec<StepRecord>,
    pub converged: bool,
}

impl NewtonReport {
    pub fn total_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.iterations).sum()
    }
}

/// Converged state at one load step.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub lambda: f64,
    pub u: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton iterations at fixed `lambda` from `u0`. Returns the converged full
/// DOF vector, whether it was accepted as stalled, and appends the residual
/// norm history (one entry per evaluation).
///
/// Steps are backtracked while `‖R‖` fails a sufficient-decrease test; the
/// evaluation at the accepted point is reused for the next tangent.
fn solve_at(
    sys: &ShellSystem,
    u0: &[f64],
    lambda: f64,
    opts: &NewtonOptions,
    norms: &mut Vec<f64>,
) -> Result<(Vec<f64>, bool)> {
    let diverged = |reason: String| ShellError::NonConvergence {
        load_factor: lambda,
        reason,
    };
    let mut u = u0.to_vec();
    let mut ev = sys.evaluate(&u, lambda, true)?;
    let mut r = sys.dofs.reduce(&ev.residual);
    let mut rn = norm(&r);
    norms.push(rn);
    let r0 = rn;
    let tol = opts.tol_abs.max(opts.tol_rel * r0);
    let mut best = (rn, u.clone());
    let mut since_improvement = 0;
    for _ in 0..opts.max_iterations {
        if !rn.is_finite() || rn > 1e8 * r0.max(opts.tol_abs) {
            break;
        }
        if rn <= tol {
            return Ok((u, false));
        }
        if rn < 0.9 * best.0 {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if rn < best.0 {
            best = (rn, u.clone());
        }
        if since_improvement >= STALL_ITERATIONS && best.0 <= opts.tol_stall {
            return Ok((best.1, true));
        }
        let k = sys.dofs.reduce_triplets(&ev.triplets);
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let du = sys
            .dofs
            .expand(&sparse_solve(sys.dofs.n_reduced(), &k, &rhs)?);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + alpha * b).collect();
            let tev = sys.evaluate(&trial, lambda, true);
            let accepted = match &tev {
                Ok(t) => {
                    let tr = sys.dofs.reduce(&t.residual);
                    let tn = norm(&tr);
                    if tn.is_finite() && tn <= (1.0 - 1e-4 * alpha) * rn {
                        norms.push(tn);
                        u = trial;
                        r = tr;
                        rn = tn;
                        true
                    } else {
                        false
                    }
                }
                Err(_) => false,
            };
            if accepted {
                ev = tev?;
                break;
            }
            if alpha < MIN_STEP {
                if best.0 <= opts.tol_stall {
                    return Ok((best.1, true));
                }
                return Err(tev.err().unwrap_or_else(|| {
                    diverged(format!("line search failed; history {norms:?}"))
                }));
            }
            alpha *= 0.5;
        }
    }
    if rn.is_finite() && rn < best.0 {
        best = (rn, u);
    }
    if best.0 <= opts.tol_stall {
        return Ok((best.1, true));
    }
    Err(diverged(format!("residual history {norms:?}")))
}

/// Iterations without a 10% gain on the best residual before a stall is declared.
const STALL_ITERATIONS: usize = 5;

/// Smallest line-search step.
const MIN_STEP: f64 = 1.0 / 64.0;

/// A failed run with everything that converged before the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct NewtonFailure {
    pub error: ShellError,
    pub solutions: Vec<Solution>,
    pub report: NewtonReport,
}

pub type NewtonResult = std::result::Result<(Vec<Solution>, NewtonReport), Box<NewtonFailure>>;

/// Incremental Newton–Raphson over `λ ∈ (0, 1]` in `opts.steps` uniform steps,
/// halving a failed increment up to `opts.max_bisections` times. Each increment
/// starts from a secant extrapolation of the last two converged states.
pub fn newton_solve(sys: &ShellSystem, opts: &NewtonOptions) -> NewtonResult {
    newton_solve_from(sys, opts, vec![0.0; sys.n_dofs()], |_| Ok(()))
}

/// As [`newton_solve`], starting from `u0` and calling `observe` after every
/// converged load step; an error from `observe` stops the run.
pub fn newton_solve_from(
    sys: &ShellSystem,
    opts: &NewtonOptions,
    u0: Vec<f64>,
    mut observe: impl FnMut(&Solution) -> Result<()>,
) -> NewtonResult {
    let fail = |error, solutions, report| {
        Err(Box::new(NewtonFailure {
            error,
            solutions,
            report,
        }))
    };
    if opts.steps == 0 {
        let e = ShellError::InvalidDimensions("at least one load step is required".into());
        return fail(e, vec![], NewtonReport::default());
    }
    let mut u = u0;
    let mut lam = 0.0;
    // Previous converged state for the secant predictor.
    let mut prev: Option<(f64, Vec<f64>)> = None;
    let mut out = vec![];
    let mut report = NewtonReport::default();
    for step in 1..=opts.steps {
        let target = step as f64 / opts.steps as f64;
        let mut rec = StepRecord {
            lambda: target,
            iterations: 0,
            residual_norms: vec![],
            bisections: 0,
            stalled: 0,
            converged: false,
        };
        let mut dl = target - lam;
        while lam < target {
            let next = if lam + dl >= target * (1.0 - 1e-14) {
                target
            } else {
                lam + dl
            };
            let mut norms = vec![];
            let start = match &prev {
                Some((lp, up)) => {
                    let s = (next - lam) / (lam - lp);
                    u.iter().zip(up).map(|(a, b)| a + s * (a - b)).collect()
                }
                None => u.clone(),
            };
            match solve_at(sys, &start, next, opts, &mut norms) {
                Ok((un, stalled)) => {
                    rec.stalled += stalled as usize;
                    rec.iterations += norms.len();
                    rec.residual_norms.extend(norms);
                    prev = Some((lam, std::mem::replace(&mut u, un)));
                    lam = next;
                }
                Err(e) => {
                    if rec.bisections >= opts.max_bisections {
                        rec.residual_norms.extend(norms);
                        report.steps.push(rec);
                        report.converged = false;
                        let e = ShellError::NonConvergence {
                            load_factor: next,
                            reason: format!(
                                "{e}; step {step} failed after {} bisections",
                                opts.max_bisections
                            ),
                        };
                        return fail(e, out, report);
                    }
                    rec.bisections += 1;
                    dl *= 0.5;
                }
            }
        }
        rec.converged = true;
        report.steps.push(rec);
        let sol = Solution {
            lambda: target,
            u: u.clone(),
        };
        if let Err(e) = observe(&sol) {
            return fail(e, out, report);
        }
        out.push(sol);
    }
    report.converged = true;
    Ok((out, report))
}
