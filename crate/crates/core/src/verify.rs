//! Randomized self-checks: finite-difference tangents, the switch interval
//! against a dense scan, and the assembled tangent against the residual.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constitution::{fiber_intervals, resultants, switch_interval, Pipeline};
use crate::error::Result;
use crate::iga::{make_plate, make_strip, Edge};
use crate::kinematics::{
    surface_from_forms, surface_point, xi_derivatives, ReferencePointState, SurfaceDerivs,
    SurfacePointState,
};
use crate::material::{fiber_from_angle, MaterialSpec};
use crate::solver::{Indenter, Load, NormalConstraint, ShellSystem};
use crate::tensor::{Sym2, T4};

/// Outcome of one named invariant over many samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub worst: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("verify seed={}\n", self.seed);
        for c in &self.checks {
            s += &format!(
                "{} {:<48} samples={:<6} worst={:.3e} tol={:.1e}\n",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.samples,
                c.worst,
                c.tol
            );
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random states per material and pipeline.
    pub states: usize,
    pub scan_triples: usize,
    pub scan_samples: usize,
    /// Global tangent columns sampled per system.
    pub columns: usize,
    /// Test hook: perturb the analytical tangents before comparing.
    pub corrupt_tangent: bool,
}

impl VerifyOptions {
    pub fn new(seed: u64) -> Self {
        VerifyOptions {
            seed,
            states: 100,
            scan_triples: 10_000,
            scan_samples: 100_000,
            columns: 12,
            corrupt_tangent: false,
        }
    }
}

/// Every material variant exercised by the checks, with two fiber families at ±`angle`.
pub fn material_catalog(thickness: f64) -> Result<Vec<(String, MaterialSpec)>> {
    let fibers = |a: f64| vec![fiber_from_angle(a), fiber_from_angle(-a)];
    let mut out = vec![];
    for name in ["nh", "mr", "fung"] {
        out.push((
            name.to_string(),
            MaterialSpec::preset(name, thickness, vec![], 0.0, false)?,
        ));
    }
    out.push((
        "amr".into(),
        MaterialSpec::preset("amr", thickness, fibers(45.0), 0.0, false)?,
    ));
    for (kappa, switch) in [
        (0.0, false),
        (0.226, false),
        (1.0 / 3.0, false),
        (0.0, true),
        (0.226, true),
    ] {
        let label = format!("goh(k={kappa:.3}{})", if switch { ",switch" } else { "" });
        out.push((
            label,
            MaterialSpec::preset("goh", thickness, fibers(30.0), kappa, switch)?,
        ));
    }
    Ok(out)
}

fn rvec(rng: &mut ChaCha8Rng, s: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-s..s),
        rng.random_range(-s..s),
        rng.random_range(-s..s),
    )
}

/// Random reference and current mid-surface states with moderate strain and
/// curvature (`|b|·T` well below one).
pub fn random_pair(
    rng: &mut ChaCha8Rng,
    thickness: f64,
    fibers: &[Vector3<f64>],
) -> Result<(SurfacePointState, ReferencePointState)> {
    let k = 0.4 / thickness.max(1e-12) * 0.25;
    let refd = SurfaceDerivs {
        x: Vector3::zeros(),
        x1: Vector3::x() + rvec(rng, 0.15),
        x2: Vector3::y() + rvec(rng, 0.15),
        x11: rvec(rng, k),
        x22: rvec(rng, k),
        x12: rvec(rng, k),
    };
    let s0 = surface_point(&refd, None)?;
    let r = ReferencePointState::new(&s0, fibers, 1.0)?;
    let f = nalgebra::Matrix3::identity()
        + nalgebra::Matrix3::from_fn(|_, _| rng.random_range(-0.12..0.12));
    let cur = SurfaceDerivs {
        x: Vector3::zeros(),
        x1: f * refd.x1,
        x2: f * refd.x2,
        x11: refd.x11 + rvec(rng, k),
        x22: refd.x22 + rvec(rng, k),
        x12: refd.x12 + rvec(rng, k),
    };
    let s = surface_point(&cur, Some(r.area_density))?;
    Ok((s, r))
}

const MULT: [f64; 3] = [1.0, 1.0, 2.0];

fn perturbed(
    s: &SurfacePointState,
    r: &ReferencePointState,
    da: Sym2,
    db: Sym2,
) -> Result<SurfacePointState> {
    surface_from_forms(&(s.a_cov + da), &(s.b_cov + db), Some(r.area_density))
}

fn unit(v: usize, h: f64) -> Sym2 {
    let mut e = Sym2::zero();
    e.0[v] = h;
    e
}

/// Finite-difference tangents `(c, d, e, f)` of a pipeline at `(s, r)`,
/// differentiating in the symmetric components of `a_αβ` and `b_αβ`.
pub fn fd_tangents(
    p: Pipeline,
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
) -> Result<[T4; 4]> {
    let s = surface_from_forms(&s.a_cov, &s.b_cov, Some(r.area_density))?;
    let ha = 1e-6 * s.a_cov.norm();
    let hb = ha / m.thickness;
    let mut out = [T4::zero(); 4];
    for w in 0..3 {
        for (is_b, h) in [(false, ha), (true, hb)] {
            let d = unit(w, h);
            let (dp, dm) = if is_b {
                (
                    perturbed(&s, r, Sym2::zero(), d)?,
                    perturbed(&s, r, Sym2::zero(), -d)?,
                )
            } else {
                (
                    perturbed(&s, r, d, Sym2::zero())?,
                    perturbed(&s, r, -d, Sym2::zero())?,
                )
            };
            let (p_res, _) = resultants(p, m, &dp, r)?;
            let (m_res, _) = resultants(p, m, &dm, r)?;
            let scale = if is_b { 1.0 } else { 2.0 } / (MULT[w] * 2.0 * h);
            let dtau = (p_res.tau - m_res.tau) * scale;
            let dm0 = (p_res.m0 - m_res.m0) * scale;
            let (ti, mi) = if is_b { (1, 3) } else { (0, 2) };
            let (k, l) = crate::tensor::VOIGT_PAIRS[w];
            for (slot, val) in [(ti, dtau), (mi, dm0)] {
                for i in 0..2 {
                    for j in 0..2 {
                        let x = val.at(i, j);
                        for (kk, ll) in [(k, l), (l, k)] {
                            out[slot].0[((i * 2 + j) * 2 + kk) * 2 + ll] = x;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Largest relative deviation between analytical and finite-difference
/// tangents. Blocks are normalized by `max(‖X‖, 1e-6·‖c‖·Tᵏ)` with `k` the
/// power of thickness carried by the block.
pub fn tangent_error(
    p: Pipeline,
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    corrupt: bool,
) -> Result<f64> {
    let s = surface_from_forms(&s.a_cov, &s.b_cov, Some(r.area_density))?;
    let (_, mut tan) = resultants(p, m, &s, r)?;
    if corrupt {
        tan.c = tan.c * 1.01;
    }
    let fd = fd_tangents(p, m, &s, r)?;
    let t = m.thickness;
    let cn = tan.c.norm().max(fd[0].norm());
    let mut worst: f64 = 0.0;
    for (an, fdv, k) in [
        (&tan.c, &fd[0], 0),
        (&tan.d, &fd[1], 1),
        (&tan.e, &fd[2], 1),
        (&tan.f, &fd[3], 2),
    ] {
        let den = an.norm().max(1e-6 * cn * t.powi(k));
        let err = (*an - *fdv).norm() / den;
        worst = if err.is_nan() {
            f64::INFINITY
        } else {
            worst.max(err)
        };
    }
    Ok(worst)
}

/// `{ξ ∈ [−T/2, T/2] : I4 + ξ Î4,3 > 1}` by scanning `n` samples; `None` if empty.
pub fn scan_interval(i4: f64, i4_3: f64, t: f64, n: usize) -> Option<(f64, f64)> {
    let h = 0.5 * t;
    let mut lo = None;
    let mut hi = None;
    for k in 0..n {
        let xi = -h + t * k as f64 / (n - 1) as f64;
        if i4 + xi * i4_3 > 1.0 {
            lo.get_or_insert(xi);
            hi = Some(xi);
        }
    }
    Some((lo?, hi?))
}

/// Worst endpoint error over random triples, relative to `T`.
pub fn switch_scan_error(rng: &mut ChaCha8Rng, triples: usize, samples: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..triples {
        let t = rng.random_range(0.05..1.0);
        let i4 = rng.random_range(0.8..1.2);
        let i4_3 = rng.random_range(-2.0..2.0) / t;
        let z = Sym2::zero();
        let iv = switch_interval(i4, i4_3, t, &z, &z);
        let err = match (scan_interval(i4, i4_3, t, samples), iv.empty) {
            (None, true) => 0.0,
            (Some((a, b)), false) => (a - iv.t1).abs().max((b - iv.t2).abs()),
            (Some((a, b)), true) => b - a,
            (None, false) => iv.t2 - iv.t1,
        };
        worst = worst.max(err / t);
    }
    worst
}

/// Worst relative deviation between the endpoint sensitivities and central
/// differences of the endpoints in `a_αβ`, `b_αβ`, over interior endpoints.
pub fn switch_sensitivity_error(
    rng: &mut ChaCha8Rng,
    states: usize,
    thickness: f64,
) -> Result<(f64, usize)> {
    let m = MaterialSpec::preset(
        "goh",
        thickness,
        vec![fiber_from_angle(30.0), fiber_from_angle(-30.0)],
        0.0,
        true,
    )?;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut tries = 0;
    while checked < states && tries < 200 * states {
        tries += 1;
        let (s0, r) = random_pair(rng, thickness, &m.fibers)?;
        let s = surface_from_forms(&s0.a_cov, &s0.b_cov, Some(r.area_density))?;
        let ivs = fiber_intervals(&m, &s, &r, &xi_derivatives(&s, &r));
        for (fam, iv) in ivs.iter().enumerate() {
            let h = 0.5 * thickness;
            let interior = |x: f64| x > -h + 1e-3 * thickness && x < h - 1e-3 * thickness;
            let which = if !iv.empty && interior(iv.t1) && iv.t2 == h {
                1
            } else if !iv.empty && interior(iv.t2) && iv.t1 == -h {
                2
            } else {
                continue;
            };
            checked += 1;
            let (u, v) = if which == 1 {
                (iv.u1, iv.v1)
            } else {
                (iv.u2, iv.v2)
            };
            let ha = 1e-6 * s.a_cov.norm();
            let hb = ha / thickness;
            let end = |st: &SurfacePointState| {
                let iv = &fiber_intervals(&m, st, &r, &xi_derivatives(st, &r))[fam];
                if which == 1 {
                    iv.t1
                } else {
                    iv.t2
                }
            };
            let mut num = 0.0;
            let mut den = 0.0;
            for w in 0..3 {
                for (is_b, hh, an) in [(false, ha, u.0[w]), (true, hb, v.0[w])] {
                    let d = unit(w, hh);
                    let (p, q) = if is_b {
                        (
                            perturbed(&s, &r, Sym2::zero(), d)?,
                            perturbed(&s, &r, Sym2::zero(), -d)?,
                        )
                    } else {
                        (
                            perturbed(&s, &r, d, Sym2::zero())?,
                            perturbed(&s, &r, -d, Sym2::zero())?,
                        )
                    };
                    let fd = (end(&p) - end(&q)) / (2.0 * hh * MULT[w]);
                    let wgt = if is_b { 1.0 / thickness } else { 1.0 };
                    num += ((fd - an) / wgt).powi(2);
                    den += (an / wgt).powi(2);
                }
            }
            worst = worst.max(num.sqrt() / den.sqrt().max(1e-12));
        }
    }
    Ok((worst, checked))
}

/// Worst relative deviation of sampled tangent columns from central
/// differences of the residual, `‖K e_j − FD_j‖ / max_j ‖K e_j‖`.
pub fn global_tangent_error(
    sys: &ShellSystem,
    u: &[f64],
    lambda: f64,
    columns: &[usize],
    h: f64,
    corrupt: bool,
) -> Result<f64> {
    let ev = sys.evaluate(u, lambda, true)?;
    let n = sys.n_dofs();
    let mut cols = vec![vec![0.0; n]; columns.len()];
    for &(i, j, v) in &ev.triplets {
        for (c, _) in columns.iter().enumerate().filter(|(_, &c)| c == j) {
            cols[c][i] += if corrupt { 1.01 * v } else { v };
        }
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut errs = vec![];
    for (c, &j) in columns.iter().enumerate() {
        let mut up = u.to_vec();
        up[j] += h;
        let rp = sys.residual(&up, lambda)?;
        up[j] -= 2.0 * h;
        let rm = sys.residual(&up, lambda)?;
        let e: f64 = (0..n)
            .map(|i| ((rp[i] - rm[i]) / (2.0 * h) - cols[c][i]).powi(2))
            .sum::<f64>()
            .sqrt();
        let k: f64 = cols[c].iter().map(|x| x * x).sum::<f64>().sqrt();
        scale = scale.max(k);
        errs.push((e, k));
    }
    for (e, k) in errs {
        let err = e / k.max(1e-3 * scale).max(1e-300);
        worst = if err.is_nan() {
            f64::INFINITY
        } else {
            worst.max(err)
        };
    }
    Ok(worst)
}

/// Small systems with random displacements exercising every residual term.
pub fn random_systems(
    rng: &mut ChaCha8Rng,
    m: &MaterialSpec,
    p: Pipeline,
) -> Result<Vec<(String, ShellSystem, Vec<f64>)>> {
    let t = m.thickness;
    let mut out = vec![];
    let mut strip = make_strip(t, 3.0, 9.0, 2, 3)?;
    strip.set_fibers(m.fibers.clone())?;
    let mut sys = ShellSystem::new(strip, m.clone(), p);
    sys.loads = vec![
        Load::Pressure { p: 0.5 },
        Load::EdgeTraction {
            edge: Edge::V1,
            t: Vector3::new(0.1, 2.0, 0.0),
        },
    ];
    let eps = 1e3 * m.youngs_modulus() * t.powi(3);
    sys.normals = vec![
        NormalConstraint::rotating(Edge::V1, eps, Vector3::x(), 0.6),
        NormalConstraint::clamp(Edge::V0, eps),
    ];
    let u: Vec<f64> = (0..sys.n_dofs())
        .map(|_| rng.random_range(-0.05..0.05))
        .collect();
    out.push(("strip+pressure+traction+normal".to_string(), sys, u));
    let mut plate = make_plate(t, 5.0, 2)?;
    plate.set_fibers(m.fibers.clone())?;
    let mut sys = ShellSystem::new(plate, m.clone(), p);
    sys.indenter = Some(Indenter {
        center: Vector3::new(2.5, 2.5, 1.5 - 0.2),
        radius: 1.5,
        direction: -Vector3::z(),
        travel: 0.0,
        penalty: 1e3 * m.youngs_modulus(),
    });
    let u: Vec<f64> = (0..sys.n_dofs())
        .map(|_| rng.random_range(-0.05..0.05))
        .collect();
    out.push(("plate+contact".to_string(), sys, u));
    Ok(out)
}

pub fn pipelines() -> [Pipeline; 4] {
    [
        Pipeline::Np { n_gp: 2 },
        Pipeline::Np { n_gp: 5 },
        Pipeline::Ap,
        Pipeline::Dd,
    ]
}

/// Run every randomized check.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = vec![];
    for (name, m) in material_catalog(0.15)? {
        for p in pipelines() {
            let mut worst: f64 = 0.0;
            for _ in 0..opts.states {
                let (s, r) = random_pair(&mut rng, m.thickness, &m.fibers)?;
                let e = tangent_error(p, &m, &s, &r, opts.corrupt_tangent).unwrap_or(f64::INFINITY);
                worst = worst.max(e);
            }
            checks.push(Check {
                name: format!("tangent {name} {}", p.label()),
                samples: opts.states,
                worst,
                tol: 1e-5,
            });
        }
    }
    checks.push(Check {
        name: "switch interval vs dense scan".into(),
        samples: opts.scan_triples,
        worst: switch_scan_error(&mut rng, opts.scan_triples, opts.scan_samples),
        tol: 1e-4,
    });
    let (worst, n) = switch_sensitivity_error(&mut rng, opts.states, 0.15)?;
    checks.push(Check {
        name: "switch endpoint sensitivities".into(),
        samples: n,
        worst,
        tol: 1e-5,
    });
    for (name, m) in material_catalog(0.15)? {
        for p in pipelines() {
            for (label, sys, u) in random_systems(&mut rng, &m, p)? {
                let n = sys.n_dofs();
                let cols: Vec<usize> = (0..opts.columns).map(|_| rng.random_range(0..n)).collect();
                let worst = global_tangent_error(&sys, &u, 1.0, &cols, 1e-6, opts.corrupt_tangent)
                    .unwrap_or(f64::INFINITY);
                checks.push(Check {
                    name: format!("global tangent {label} {name} {}", p.label()),
                    samples: cols.len(),
                    worst,
                    tol: 1e-5,
                });
            }
        }
    }
    Ok(VerifyReport {
        seed: opts.seed,
        checks,
    })
}
