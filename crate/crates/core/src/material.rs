//! Incompressible hyperelastic kernels with the thickness stretch condensed.
//!
//! Every model is written once, generically over [`Real`], in terms of the
//! layer quantities `g^αβ`, `G^αβ`, `J*`, `I1*` and the fiber tensors. The
//! layer kernel evaluates it with `f64`; the mid-surface ("hat") kernel
//! evaluates it with [`Jet`]s seeded by the `ξ`-derivatives at `ξ = 0`, which
//! yields `τ̂`, `τ̂_,3`, `ĉ` and `ĉ_,3` in one pass.

use nalgebra::Vector3;

use crate::error::{Result, ShellError};
use crate::kinematics::{
    area_stretch, surface_invariants, LayerState, ReferencePointState, SurfacePointState,
    XiDerivatives,
};
use crate::tensor::{Jet, Real, Sym2, T4};

/// Largest exponent accepted by the exponential models.
pub const EXP_GUARD: f64 = 700.0;

#[derive(Clone, Debug, PartialEq)]
pub enum MaterialModel {
    /// `W = c1/2 (Ĩ1 − 3)`.
    NeoHooke { c1: f64 },
    /// `W = c1/2 (Ĩ1 − 3) + c2/2 (Ĩ2 − 3)`.
    MooneyRivlin { c1: f64, c2: f64 },
    /// `W = c1/(2 c2) (exp[c2 (Ĩ1 − 3)] − 1)`, `c2` dimensionless.
    Fung { c1: f64, c2: f64 },
    /// Mooney–Rivlin matrix plus quadratic fibers, one `c3` per family.
    AnisoMooneyRivlin { c1: f64, c2: f64, c3: Vec<f64> },
    /// Neo-Hookean matrix plus two dispersed exponential fiber families.
    Goh {
        mu: f64,
        k1: Vec<f64>,
        k2: Vec<f64>,
        kappa: Vec<f64>,
        switch: bool,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaterialSpec {
    pub model: MaterialModel,
    pub thickness: f64,
    /// Ambient fiber directions, one per family.
    pub fibers: Vec<Vector3<f64>>,
}

/// Fiber direction `sin θ e1 + cos θ e2` for an angle in degrees.
pub fn fiber_from_angle(theta_deg: f64) -> Vector3<f64> {
    let t = theta_deg.to_radians();
    Vector3::new(t.sin(), t.cos(), 0.0)
}

impl MaterialSpec {
    pub fn new(model: MaterialModel, thickness: f64, fibers: Vec<Vector3<f64>>) -> Result<Self> {
        let m = MaterialSpec {
            model,
            thickness,
            fibers,
        };
        m.validate()?;
        Ok(m)
    }

    /// Default constants by name (`nh`, `mr`, `fung`, `amr`, `goh`) with
    /// `c̃1 = 10 kPa`.
    pub fn preset(
        name: &str,
        thickness: f64,
        fibers: Vec<Vector3<f64>>,
        kappa: f64,
        switch: bool,
    ) -> Result<Self> {
        let c1 = 10.0;
        let nf = fibers.len();
        let model = match name {
            "nh" => MaterialModel::NeoHooke { c1 },
            "mr" => MaterialModel::MooneyRivlin { c1, c2: 2.0 * c1 },
            "fung" => MaterialModel::Fung { c1, c2: 10.0 },
            "amr" => MaterialModel::AnisoMooneyRivlin {
                c1,
                c2: 2.0 * c1,
                c3: vec![100.0 * c1; nf],
            },
            "goh" => MaterialModel::Goh {
                mu: 10.0,
                k1: vec![100.0 * c1; nf],
                k2: vec![500.0; nf],
                kappa: vec![kappa; nf],
                switch,
            },
            _ => {
                return Err(ShellError::InvalidMaterial(format!(
                    "unknown preset `{name}`"
                )))
            }
        };
        MaterialSpec::new(model, thickness, fibers)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(ShellError::InvalidMaterial(s.to_string()));
        if !(self.thickness > 0.0) {
            return bad("thickness must be positive");
        }
        let nf = self.fibers.len();
        let pos = |v: f64| v > 0.0 && v.is_finite();
        match &self.model {
            MaterialModel::NeoHooke { c1 } => {
                if !pos(*c1) {
                    return bad("c1 must be positive");
                }
            }
            MaterialModel::MooneyRivlin { c1, c2 } | MaterialModel::Fung { c1, c2 } => {
                if !pos(*c1) || !(*c2 >= 0.0) {
                    return bad("c1 must be positive and c2 non-negative");
                }
            }
            MaterialModel::AnisoMooneyRivlin { c1, c2, c3 } => {
                if !pos(*c1) || !(*c2 >= 0.0) || c3.iter().any(|c| !(*c >= 0.0)) {
                    return bad("AMR constants must be non-negative with c1 > 0");
                }
                if c3.len() != nf {
                    return bad("AMR needs one c3 per fiber family");
                }
            }
            MaterialModel::Goh {
                mu, k1, k2, kappa, ..
            } => {
                if !pos(*mu) {
                    return bad("mu must be positive");
                }
                if nf != 2 || k1.len() != 2 || k2.len() != 2 || kappa.len() != 2 {
                    return bad("GOH needs exactly two fiber families");
                }
                if k1.iter().chain(k2.iter()).any(|k| !(*k >= 0.0)) {
                    return bad("k1, k2 must be non-negative");
                }
                if kappa.iter().any(|k| !(0.0..=1.0 / 3.0 + 1e-15).contains(k)) {
                    return bad("kappa must lie in [0, 1/3]");
                }
            }
        }
        Ok(())
    }

    pub fn switch_enabled(&self) -> bool {
        matches!(self.model, MaterialModel::Goh { switch: true, .. })
    }

    /// Small-strain Young's modulus `E = 3 c̃1` (or `3 μ̃`).
    pub fn youngs_modulus(&self) -> f64 {
        match &self.model {
            MaterialModel::NeoHooke { c1 }
            | MaterialModel::MooneyRivlin { c1, .. }
            | MaterialModel::Fung { c1, .. }
            | MaterialModel::AnisoMooneyRivlin { c1, .. } => 3.0 * c1,
            MaterialModel::Goh { mu, .. } => 3.0 * mu,
        }
    }

    /// Copy with the fiber switch turned off and the matrix kept.
    pub fn matrix_only(&self) -> MaterialSpec {
        let model = match &self.model {
            MaterialModel::Goh { mu, .. } => MaterialModel::NeoHooke { c1: *mu },
            MaterialModel::AnisoMooneyRivlin { c1, c2, .. } => {
                MaterialModel::MooneyRivlin { c1: *c1, c2: *c2 }
            }
            m => m.clone(),
        };
        MaterialSpec {
            model,
            thickness: self.thickness,
            fibers: vec![],
        }
    }
}

/// Layer kinematics seen by the constitutive law.
#[derive(Clone, Debug)]
pub struct LayerKin<S> {
    pub g_con: Sym2<S>,
    pub big_g_con: Sym2<S>,
    pub jstar: S,
    pub i1: S,
    /// `(L̄^αβ, I4*)` per fiber family.
    pub fibers: Vec<(Sym2<S>, S)>,
}

impl LayerKin<f64> {
    pub fn from_layer(ls: &LayerState) -> Self {
        LayerKin {
            g_con: ls.g_con,
            big_g_con: ls.big_g_con,
            jstar: ls.jstar,
            i1: ls.i1,
            fibers: ls.fibers.clone(),
        }
    }

    /// The mid-surface as a layer.
    pub fn from_midsurface(s: &SurfacePointState, r: &ReferencePointState) -> Self {
        let (i1, i4) = surface_invariants(s, r);
        LayerKin {
            g_con: s.a_con,
            big_g_con: r.a_con,
            jstar: area_stretch(s, r),
            i1,
            fibers: r
                .fibers
                .iter()
                .zip(i4)
                .map(|(f, i)| (f.l_outer, i))
                .collect(),
        }
    }
}

impl LayerKin<Jet> {
    /// First-order expansion in `ξ` about the mid-surface.
    pub fn expansion(s: &SurfacePointState, r: &ReferencePointState, xd: &XiDerivatives) -> Self {
        let (i1, i4) = surface_invariants(s, r);
        LayerKin {
            g_con: Sym2::jet(&s.a_con, &xd.ghat_con_3),
            big_g_con: Sym2::jet(&r.a_con, &r.b_con.scale(2.0)),
            jstar: Jet::new(area_stretch(s, r), xd.jhat_3),
            i1: Jet::new(i1, xd.i1hat_3),
            fibers: r
                .fibers
                .iter()
                .zip(i4)
                .zip(xd.fibers.iter())
                .map(|((f, i), (l3, i43))| (Sym2::jet(&f.l_outer, l3), Jet::new(i, *i43)))
                .collect(),
        }
    }
}

/// Stress and elasticity split into the matrix part and one part per fiber.
#[derive(Clone, Debug)]
pub struct Response<S> {
    pub tau: Sym2<S>,
    pub c: T4<S>,
    pub fibers: Vec<(Sym2<S>, T4<S>)>,
}

/// Normalized neo-Hookean stress `G^αβ − g^αβ / J*²`.
pub fn tau_nh<S: Real>(k: &LayerKin<S>) -> Sym2<S> {
    let ij2 = S::cst(1.0) / (k.jstar * k.jstar);
    k.big_g_con - k.g_con.scale(ij2)
}

/// Normalized neo-Hookean elasticity `(2/J*²)(g^αβ g^γδ − g^αβγδ)`.
pub fn c_nh<S: Real>(k: &LayerKin<S>) -> T4<S> {
    let ij2 = S::cst(2.0) / (k.jstar * k.jstar);
    (T4::outer(&k.g_con, &k.g_con) + T4::sym_prod(&k.g_con, &k.g_con)).scale(ij2)
}

fn guarded_exp<S: Real>(arg: S) -> Result<S> {
    if arg.val() > EXP_GUARD || !arg.val().is_finite() {
        return Err(ShellError::ConstitutiveOverflow(arg.val()));
    }
    Ok(arg.exp())
}

fn mooney_rivlin<S: Real>(k: &LayerKin<S>, c1: f64, c2: f64) -> (Sym2<S>, T4<S>) {
    let one = S::cst(1.0);
    let j2 = k.jstar * k.jstar;
    let ij2 = one / j2;
    let tn = tau_nh(k);
    let cn = c_nh(k);
    let c2s = S::cst(c2);
    let tau = tn.scale(S::cst(c1))
        + (k.big_g_con - k.g_con.scale(k.i1)).scale(c2s * ij2)
        + k.g_con.scale(c2s * j2);
    let gg = T4::outer(&k.g_con, &k.g_con);
    let g4 = -T4::sym_prod(&k.g_con, &k.g_con);
    let c = cn.scale(S::cst(c1) + c2s * k.i1)
        - (T4::outer(&k.big_g_con, &k.g_con) + T4::outer(&k.g_con, &k.big_g_con))
            .scale(S::cst(2.0 * c2) * ij2)
        + (g4 + gg).scale(S::cst(2.0 * c2) * j2);
    (tau, c)
}

/// Constitutive response at a layer (or its expansion), before any switch.
pub fn response<S: Real>(m: &MaterialSpec, k: &LayerKin<S>) -> Result<Response<S>> {
    if !(k.jstar.val() > 0.0) {
        return Err(ShellError::NonPositiveLayerJacobian(k.jstar.val()));
    }
    let one = S::cst(1.0);
    match &m.model {
        MaterialModel::NeoHooke { c1 } => Ok(Response {
            tau: tau_nh(k).scale(S::cst(*c1)),
            c: c_nh(k).scale(S::cst(*c1)),
            fibers: vec![],
        }),
        MaterialModel::MooneyRivlin { c1, c2 } => {
            let (tau, c) = mooney_rivlin(k, *c1, *c2);
            Ok(Response {
                tau,
                c,
                fibers: vec![],
            })
        }
        MaterialModel::Fung { c1, c2 } => {
            let i1t = k.i1 + one / (k.jstar * k.jstar);
            let d1 = S::cst(*c1) * guarded_exp((i1t - S::cst(3.0)).scale(*c2))?;
            let tn = tau_nh(k);
            let c = (c_nh(k) + T4::outer(&tn, &tn).scale(S::cst(2.0 * c2))).scale(d1);
            Ok(Response {
                tau: tn.scale(d1),
                c,
                fibers: vec![],
            })
        }
        MaterialModel::AnisoMooneyRivlin { c1, c2, c3 } => {
            let (tau, c) = mooney_rivlin(k, *c1, *c2);
            let fibers = k
                .fibers
                .iter()
                .zip(c3)
                .map(|((l, i4), c3)| {
                    let t = l.scale((*i4 - one).scale(2.0 * c3));
                    (t, T4::outer(l, l).scale(S::cst(4.0 * c3)))
                })
                .collect();
            Ok(Response { tau, c, fibers })
        }
        MaterialModel::Goh {
            mu, k1, k2, kappa, ..
        } => {
            let tn = tau_nh(k);
            let cn = c_nh(k);
            let i1t = k.i1 + one / (k.jstar * k.jstar);
            let mut fibers = Vec::with_capacity(2);
            for (i, (l, i4)) in k.fibers.iter().enumerate() {
                let (k1, k2, ka) = (k1[i], k2[i], kappa[i]);
                let j4 = i1t.scale(ka) + i4.scale(1.0 - 3.0 * ka);
                let e1 = j4 - one;
                let ex = guarded_exp((e1 * e1).scale(k2))?;
                let e = e1 * ex.scale(k1);
                let d = (one + (e1 * e1).scale(2.0 * k2)) * ex.scale(k1);
                let r = tn.scale(S::cst(ka)) + l.scale(S::cst(1.0 - 3.0 * ka));
                let tau = r.scale(e.scale(2.0));
                let c = cn.scale(e.scale(2.0 * ka)) + T4::outer(&r, &r).scale(d.scale(4.0));
                fibers.push((tau, c));
            }
            Ok(Response {
                tau: tn.scale(S::cst(*mu)),
                c: cn.scale(S::cst(*mu)),
                fibers,
            })
        }
    }
}

/// Layer stress `τ̃^αβ` and elasticity `c̃^αβγδ`.
#[derive(Clone, Debug)]
pub struct LayerStress {
    pub tau_star: Sym2,
    pub c_star: T4,
}

/// Layer kernel for the numerically projected model. With the GOH switch, a
/// fiber contributes only where `I4* > 1` on that layer.
pub fn layer_kernel(m: &MaterialSpec, ls: &LayerState) -> Result<LayerStress> {
    let k = LayerKin::from_layer(ls);
    let resp = response(m, &k)?;
    let switch = m.switch_enabled();
    let mut tau = resp.tau;
    let mut c = resp.c;
    for ((t, cf), (_, i4)) in resp.fibers.iter().zip(k.fibers.iter()) {
        if !switch || *i4 > 1.0 {
            tau += *t;
            c += *cf;
        }
    }
    Ok(LayerStress {
        tau_star: tau,
        c_star: c,
    })
}

/// Mid-surface values of the layer stress and their first `ξ`-derivatives.
#[derive(Clone, Debug)]
pub struct HatStress {
    pub tau_hat: Sym2,
    pub tau_hat_3: Sym2,
    pub c_hat: T4,
    pub d_hat: T4,
    pub c_hat_3: T4,
    pub d_hat_3: T4,
}

impl HatStress {
    fn from_jets(tau: &Sym2<Jet>, c: &T4<Jet>) -> Self {
        let c_hat = c.value();
        HatStress {
            tau_hat: tau.value(),
            tau_hat_3: tau.slope(),
            c_hat,
            d_hat: T4::zero(),
            c_hat_3: c.slope(),
            // τ̂_,3 depends on b only through −ĉ : b.
            d_hat_3: -c_hat,
        }
    }

    pub fn add(&self, o: &HatStress) -> HatStress {
        HatStress {
            tau_hat: self.tau_hat + o.tau_hat,
            tau_hat_3: self.tau_hat_3 + o.tau_hat_3,
            c_hat: self.c_hat + o.c_hat,
            d_hat: self.d_hat + o.d_hat,
            c_hat_3: self.c_hat_3 + o.c_hat_3,
            d_hat_3: self.d_hat_3 + o.d_hat_3,
        }
    }
}

/// Hat quantities split into matrix and per-fiber parts.
#[derive(Clone, Debug)]
pub struct HatParts {
    pub matrix: HatStress,
    pub fibers: Vec<HatStress>,
}

pub fn hat_parts(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    xd: &XiDerivatives,
) -> Result<HatParts> {
    let k = LayerKin::expansion(s, r, xd);
    let resp = response(m, &k)?;
    Ok(HatParts {
        matrix: HatStress::from_jets(&resp.tau, &resp.c),
        fibers: resp
            .fibers
            .iter()
            .map(|(t, c)| HatStress::from_jets(t, c))
            .collect(),
    })
}

/// Hat kernel for the analytically projected model, all fibers active.
pub fn hat_kernel(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
    xd: &XiDerivatives,
) -> Result<HatStress> {
    let p = hat_parts(m, s, r, xd)?;
    Ok(p.fibers.iter().fold(p.matrix.clone(), |acc, f| acc.add(f)))
}

/// Thickness-integrated membrane response of the directly decoupled model.
#[derive(Clone, Debug)]
pub struct MembraneStress {
    pub tau: Sym2,
    pub c: T4,
    pub c0: T4,
}

pub fn membrane_kernel(
    m: &MaterialSpec,
    s: &SurfacePointState,
    r: &ReferencePointState,
) -> Result<MembraneStress> {
    let t = m.thickness;
    let k = LayerKin::from_midsurface(s, r);
    let resp = response(m, &k)?;
    let switch = m.switch_enabled();
    let mut tau = resp.tau;
    let mut c = resp.c;
    for ((tf, cf), (_, i4)) in resp.fibers.iter().zip(k.fibers.iter()) {
        if !switch || *i4 > 1.0 {
            tau += *tf;
            c += *cf;
        }
    }
    Ok(MembraneStress {
        tau: tau * t,
        c: c * t,
        c0: reference_elasticity(m, r)?,
    })
}

/// `c0`: membrane elasticity of the undeformed state. With the switch the
/// fiber term is dropped, leaving the isotropic matrix.
pub fn reference_elasticity(m: &MaterialSpec, r: &ReferencePointState) -> Result<T4> {
    let k = LayerKin {
        g_con: r.a_con,
        big_g_con: r.a_con,
        jstar: 1.0,
        i1: 2.0,
        fibers: r.fibers.iter().map(|f| (f.l_outer, 1.0)).collect(),
    };
    let resp = response(m, &k)?;
    let mut c = resp.c;
    if !m.switch_enabled() {
        for (_, cf) in &resp.fibers {
            c += *cf;
        }
    }
    Ok(c * m.thickness)
}
