//! Stress resultants and material tangents of the three shell models.
//!
//! Conventions: `Δτ = c : ½Δa + d : Δb` and `ΔM0 = e : ½Δa + f : Δb`, where
//! the contractions run over all four index pairs.

use crate::error::Result;
use crate::kinematics::{
    layer_state, surface_invariants, xi_derivatives, ReferencePointState, SurfacePointState,
    XiDerivatives,
};
use crate::material::{
    hat_kernel, hat_parts, layer_kernel, membrane_kernel, HatStress, MaterialSpec,
};
use crate::quadrature::gauss_on;
use crate::tensor::{Sym2, T4};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    /// Numerical thickness integration with `n_gp` Gauss points.
    Np { n_gp: usize },
    /// First-order analytical thickness integration.
    Ap,
    /// Membrane energy plus linear bending energy.
    Dd,
}

impl Pipeline {
    pub fn label(&self) -> String {
        match self {
            Pipeline::Np { n_gp } => format!("np{n_gp}"),
            Pipeline::Ap => "ap".into(),
            Pipeline::Dd => "dd".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StressResultants {
    pub tau: Sym2,
    pub m0: Sym2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentSet {
    pub c: T4,
    pub d: T4,
    pub e: T4,
    pub f: T4,
}

impl TangentSet {
    pub fn zero() -> Self {
        TangentSet {
            c: T4::zero(),
            d: T4::zero(),
            e: T4::zero(),
            f: T4::zero(),
        }
    }
}

pub type Constitution = (StressResultants, TangentSet);

/// Resultants for any pipeline. The analytically projected model switches to
/// the partially stressed cross-section when the fiber switch is on.
pub fn resultants(
    p: Pipeline,
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
) -> Result<Constitution> {
    match p {
        Pipeline::Np { n_gp } => np_resultants(m, s, r, n_gp),
        Pipeline::Ap => {
            let xd = xi_derivatives(s, r);
            if m.switch_enabled() {
                ap_partial_resultants(m, s, r, &xd)
            } else {
                ap_full_resultants(m, s, r, &xd)
            }
        }
        Pipeline::Dd => dd_resultants(m, s, r),
    }
}

pub fn np_resultants(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    n_gp: usize,
) -> Result<Constitution> {
    let h = 0.5 * m.thickness;
    let mut tau = Sym2::zero();
    let mut m0 = Sym2::zero();
    let mut c = T4::zero();
    let mut d = T4::zero();
    let mut f = T4::zero();
    for (xi, w) in gauss_on(n_gp, -h, h) {
        let ls = layer_state(s, r, xi)?;
        let k = layer_kernel(m, &ls)?;
        tau += k.tau_star * w;
        m0 += k.tau_star * (-w * xi);
        c += k.c_star * w;
        d += k.c_star * (-w * xi);
        f += k.c_star * (w * xi * xi);
    }
    Ok((StressResultants { tau, m0 }, TangentSet { c, d, e: d, f }))
}

fn full_section(h: &HatStress, t: f64) -> Constitution {
    let k = -t * t * t / 12.0;
    (
        StressResultants {
            tau: h.tau_hat * t,
            m0: h.tau_hat_3 * k,
        },
        TangentSet {
            c: h.c_hat * t,
            d: h.d_hat * t,
            e: h.c_hat_3 * k,
            f: h.d_hat_3 * k,
        },
    )
}

pub fn ap_full_resultants(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    xd: &XiDerivatives,
) -> Result<Constitution> {
    Ok(full_section(&hat_kernel(m, s, r, xd)?, m.thickness))
}

/// Active part `[t1, t2]` of the thickness for one fiber family, with the
/// sensitivities of the bounds to `a_αβ` (`u*`) and `b_αβ` (`v*`).
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchInterval {
    pub t1: f64,
    pub t2: f64,
    pub empty: bool,
    pub u1: Sym2,
    pub u2: Sym2,
    pub v1: Sym2,
    pub v2: Sym2,
}

impl SwitchInterval {
    fn full(h: f64) -> Self {
        SwitchInterval {
            t1: -h,
            t2: h,
            empty: false,
            u1: Sym2::zero(),
            u2: Sym2::zero(),
            v1: Sym2::zero(),
            v2: Sym2::zero(),
        }
    }

    fn none() -> Self {
        SwitchInterval {
            t1: 0.0,
            t2: 0.0,
            empty: true,
            ..SwitchInterval::full(0.0)
        }
    }
}

/// Part of `[−T/2, T/2]` where the linearized stretch `I4 + ξ Î4,3` exceeds 1.
/// `y`, `z` are `∂ξ0/∂a_αβ` and `∂ξ0/∂b_αβ` for `ξ0 = (1 − I4)/Î4,3`.
pub fn switch_interval(i4: f64, i4_3: f64, t: f64, y: &Sym2, z: &Sym2) -> SwitchInterval {
    let h = 0.5 * t;
    if i4_3 == 0.0 {
        return if i4 > 1.0 {
            SwitchInterval::full(h)
        } else {
            SwitchInterval::none()
        };
    }
    let xi0 = (1.0 - i4) / i4_3;
    if i4_3 > 0.0 {
        if xi0 < -h {
            SwitchInterval::full(h)
        } else if xi0 <= h {
            SwitchInterval {
                t1: xi0,
                u1: *y,
                v1: *z,
                ..SwitchInterval::full(h)
            }
        } else {
            SwitchInterval::none()
        }
    } else if xi0 < -h {
        SwitchInterval::none()
    } else if xi0 <= h {
        SwitchInterval {
            t2: xi0,
            u2: *y,
            v2: *z,
            ..SwitchInterval::full(h)
        }
    } else {
        SwitchInterval::full(h)
    }
}

/// `(Y, Z)` for one fiber: `Y = −Î⁻²[Î L + (1 − I4) L̂_,3]`, `Z = 2Î⁻²(1 − I4) L`.
pub fn switch_sensitivities(i4: f64, i4_3: f64, l: &Sym2, l3: &Sym2) -> (Sym2, Sym2) {
    if i4_3 == 0.0 {
        return (Sym2::zero(), Sym2::zero());
    }
    let q = 1.0 / (i4_3 * i4_3);
    let y = (*l * i4_3 + *l3 * (1.0 - i4)) * (-q);
    let z = *l * (2.0 * q * (1.0 - i4));
    (y, z)
}

/// Fiber contribution integrated over `[t1, t2]` with moving bounds.
pub fn partial_section(hs: &HatStress, iv: &SwitchInterval) -> Constitution {
    if iv.empty {
        return (
            StressResultants {
                tau: Sym2::zero(),
                m0: Sym2::zero(),
            },
            TangentSet::zero(),
        );
    }
    let (t1, t2) = (iv.t1, iv.t2);
    let k0 = t2 - t1;
    let k1 = 0.5 * (t2 * t2 - t1 * t1);
    let k2 = (t1 * t1 * t1 - t2 * t2 * t2) / 3.0;
    let tau1 = hs.tau_hat + hs.tau_hat_3 * t1;
    let tau2 = hs.tau_hat + hs.tau_hat_3 * t2;
    let tau = hs.tau_hat * k0 + hs.tau_hat_3 * k1;
    let m0 = hs.tau_hat * (-k1) + hs.tau_hat_3 * k2;
    let c = hs.c_hat * k0 + hs.c_hat_3 * k1 + T4::outer(&tau2, &iv.u2) * 2.0
        - T4::outer(&tau1, &iv.u1) * 2.0;
    let d = hs.d_hat * k0 + hs.d_hat_3 * k1 + T4::outer(&tau2, &iv.v2) - T4::outer(&tau1, &iv.v1);
    let e = hs.c_hat * (-k1) + hs.c_hat_3 * k2 + T4::outer(&tau1, &iv.u1) * (2.0 * t1)
        - T4::outer(&tau2, &iv.u2) * (2.0 * t2);
    let f = hs.d_hat * (-k1) + hs.d_hat_3 * k2 + T4::outer(&tau1, &iv.v1) * t1
        - T4::outer(&tau2, &iv.v2) * t2;
    (StressResultants { tau, m0 }, TangentSet { c, d, e, f })
}

fn accumulate(acc: &mut Constitution, add: &Constitution) {
    acc.0.tau += add.0.tau;
    acc.0.m0 += add.0.m0;
    acc.1.c += add.1.c;
    acc.1.d += add.1.d;
    acc.1.e += add.1.e;
    acc.1.f += add.1.f;
}

/// Switch intervals of every fiber family at a mid-surface state.
pub fn fiber_intervals(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    xd: &XiDerivatives,
) -> Vec<SwitchInterval> {
    let (_, i4) = surface_invariants(s, r);
    r.fibers
        .iter()
        .zip(i4)
        .zip(xd.fibers.iter())
        .map(|((f, i4), (l3, i43))| {
            let (y, z) = switch_sensitivities(i4, *i43, &f.l_outer, l3);
            switch_interval(i4, *i43, m.thickness, &y, &z)
        })
        .collect()
}

/// Analytically projected model with a partially stressed cross-section: the
/// matrix is fully stressed, each fiber family only on its switch interval.
pub fn ap_partial_resultants(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    xd: &XiDerivatives,
) -> Result<Constitution> {
    let parts = hat_parts(m, s, r, xd)?;
    let mut out = full_section(&parts.matrix, m.thickness);
    for (hs, iv) in parts.fibers.iter().zip(fiber_intervals(m, s, r, xd)) {
        accumulate(&mut out, &partial_section(hs, &iv));
    }
    Ok(out)
}

pub fn dd_resultants(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
) -> Result<Constitution> {
    let mem = membrane_kernel(m, s, r)?;
    let t2 = m.thickness * m.thickness / 12.0;
    let k = s.b_cov - r.b_cov;
    let f = mem.c0 * t2;
    let m0 = f.contract(&k);
    Ok((
        StressResultants { tau: mem.tau, m0 },
        TangentSet {
            c: mem.c,
            d: T4::zero(),
            e: T4::zero(),
            f,
        },
    ))
}
