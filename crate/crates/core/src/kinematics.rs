//! Mid-surface and layer kinematics of a Kirchhoff–Love shell.
//!
//! Greek indices run over the two surface coordinates. Covariant metric and
//! curvature components come straight from the surface map derivatives; the
//! layer at height `ξ` uses the linearized metric `g = a − 2ξ b`.

use nalgebra::Vector3;

use crate::error::{Result, ShellError};
use crate::tensor::{Mat2, Sym2, T4};

/// First and second partial derivatives of the surface map `x(ξ¹, ξ²)`.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceDerivs {
    pub x: Vector3<f64>,
    pub x1: Vector3<f64>,
    pub x2: Vector3<f64>,
    pub x11: Vector3<f64>,
    pub x22: Vector3<f64>,
    pub x12: Vector3<f64>,
}

impl SurfaceDerivs {
    pub fn tangent(&self, a: usize) -> &Vector3<f64> {
        if a == 0 {
            &self.x1
        } else {
            &self.x2
        }
    }

    /// `x_,αβ`.
    pub fn second(&self, a: usize, b: usize) -> &Vector3<f64> {
        match (a, b) {
            (0, 0) => &self.x11,
            (1, 1) => &self.x22,
            _ => &self.x12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurfacePointState {
    pub a_cov: Sym2,
    pub a_con: Sym2,
    pub b_cov: Sym2,
    /// `b^γ_α` stored as `[γ][α]`.
    pub b_con_mixed: Mat2,
    /// `b^αβ = a^αγ b_γδ a^δβ`.
    pub b_con: Sym2,
    pub normal: Vector3<f64>,
    pub tangents: [Vector3<f64>; 2],
    /// Contravariant base vectors `a^α`.
    pub dual: [Vector3<f64>; 2],
    /// Christoffel symbols `Γ^γ_αβ = a^γ · x_,αβ`, one symmetric tensor per `γ`.
    pub christoffel: [Sym2; 2],
    /// `sqrt(det a)`.
    pub area_density: f64,
    /// `J = sqrt(det a / det A)`; 1 when no reference was supplied.
    pub j_area: f64,
    pub h_mean: f64,
    pub derivs: SurfaceDerivs,
}

/// Mid-surface kinematics from the map derivatives. `reference_area` is
/// `sqrt(det A)` of the reference surface at the same point.
pub fn surface_point(d: &SurfaceDerivs, reference_area: Option<f64>) -> Result<SurfacePointState> {
    let cross = d.x1.cross(&d.x2);
    let area = cross.norm();
    if area < 1e-14 * d.x1.norm() * d.x2.norm() || area == 0.0 {
        return Err(ShellError::DegenerateTangents(area));
    }
    let n = cross / area;
    let a_cov = Sym2::new(d.x1.dot(&d.x1), d.x2.dot(&d.x2), d.x1.dot(&d.x2));
    let a_con = a_cov.inverse();
    let b_cov = Sym2::new(n.dot(&d.x11), n.dot(&d.x22), n.dot(&d.x12));
    let mut b_mixed = [[0.0; 2]; 2];
    for (g, row) in b_mixed.iter_mut().enumerate() {
        for (al, v) in row.iter_mut().enumerate() {
            *v = (0..2).map(|be| a_con.at(g, be) * b_cov.at(be, al)).sum();
        }
    }
    let b_con = Sym2::sandwich(&a_con, &b_cov, &a_con);
    let dual = [
        d.x1 * a_con.at(0, 0) + d.x2 * a_con.at(0, 1),
        d.x1 * a_con.at(1, 0) + d.x2 * a_con.at(1, 1),
    ];
    let christoffel = [0, 1].map(|g| Sym2::from_fn(|al, be| dual[g].dot(d.second(al, be))));
    let h_mean = 0.5 * a_con.dot(&b_cov);
    let j_area = reference_area.map_or(1.0, |ra| area / ra);
    Ok(SurfacePointState {
        a_cov,
        a_con,
        b_cov,
        b_con_mixed: b_mixed,
        b_con,
        normal: n,
        tangents: [d.x1, d.x2],
        dual,
        christoffel,
        area_density: area,
        j_area,
        h_mean,
        derivs: *d,
    })
}

/// Reference data of one fiber family at a surface point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberRef {
    /// `L^α`, unit length w.r.t. `A_αβ`.
    pub l_con: [f64; 2],
    /// `L_α = A_αβ L^β`.
    pub l_cov: [f64; 2],
    /// `L^αβ = L^α L^β`.
    pub l_outer: Sym2,
    /// `L^α_,3 = B^αβ L_β`.
    pub l_con_3: [f64; 2],
    /// `L̂^αβ_,3 = L^α_,3 L^β + L^α L^β_,3`.
    pub l_outer_3: Sym2,
}

#[derive(Clone, Debug)]
pub struct ReferencePointState {
    pub a_cov: Sym2,
    pub a_con: Sym2,
    pub b_cov: Sym2,
    /// `B^αβ`.
    pub b_con: Sym2,
    /// `B^γ_α` stored as `[γ][α]`.
    pub b_con_mixed: Mat2,
    pub h0_mean: f64,
    pub area_density: f64,
    /// Quadrature weight times `area_density`; zero when not attached to a rule.
    pub d_area: f64,
    pub normal: Vector3<f64>,
    pub fibers: Vec<FiberRef>,
}

impl ReferencePointState {
    /// Reference state from an evaluated reference surface and ambient fiber
    /// directions. Fibers are projected onto the tangent plane and normalized.
    pub fn new(s: &SurfacePointState, fiber_dirs: &[Vector3<f64>], weight: f64) -> Result<Self> {
        let fibers = fiber_dirs
            .iter()
            .map(|v| fiber_ref(s, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(ReferencePointState {
            a_cov: s.a_cov,
            a_con: s.a_con,
            b_cov: s.b_cov,
            b_con: s.b_con,
            b_con_mixed: s.b_con_mixed,
            h0_mean: s.h_mean,
            area_density: s.area_density,
            d_area: weight * s.area_density,
            normal: s.normal,
            fibers,
        })
    }
}

fn fiber_ref(s: &SurfacePointState, v: &Vector3<f64>) -> Result<FiberRef> {
    let vt = v - s.normal * s.normal.dot(v);
    let mut l = [vt.dot(&s.dual[0]), vt.dot(&s.dual[1])];
    let len2: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| l[i] * l[j] * s.a_cov.at(i, j))
        .sum();
    if !(len2 > 1e-24) {
        return Err(ShellError::InvalidMaterial(
            "fiber direction is normal to the surface".into(),
        ));
    }
    let inv = 1.0 / len2.sqrt();
    l = [l[0] * inv, l[1] * inv];
    let l_cov = [0, 1].map(|a| (0..2).map(|b| s.a_cov.at(a, b) * l[b]).sum::<f64>());
    let l_con_3 = [0, 1].map(|a| (0..2).map(|b| s.b_con.at(a, b) * l_cov[b]).sum::<f64>());
    Ok(FiberRef {
        l_con: l,
        l_cov,
        l_outer: Sym2::from_fn(|i, j| l[i] * l[j]),
        l_con_3,
        l_outer_3: Sym2::from_fn(|i, j| l_con_3[i] * l[j] + l[i] * l_con_3[j]),
    })
}

/// `J = sqrt(det a / det A)`.
pub fn area_stretch(s: &SurfacePointState, r: &ReferencePointState) -> f64 {
    (s.a_cov.det() / r.a_cov.det()).sqrt()
}

/// Mid-surface invariants `I1 = A^αβ a_αβ` and `I4_i = a_αβ L_i^αβ`.
pub fn surface_invariants(s: &SurfacePointState, r: &ReferencePointState) -> (f64, Vec<f64>) {
    let i1 = r.a_con.dot(&s.a_cov);
    let i4 = r.fibers.iter().map(|f| f.l_outer.dot(&s.a_cov)).collect();
    (i1, i4)
}

/// Kinematics of the shell layer at height `ξ`.
#[derive(Clone, Debug)]
pub struct LayerState {
    pub xi: f64,
    pub g_cov: Sym2,
    pub g_con: Sym2,
    /// Reference layer metric `G = A − 2ξ B`.
    pub big_g_cov: Sym2,
    pub big_g_con: Sym2,
    pub jstar: f64,
    pub i1: f64,
    /// Per fiber family: layer structural tensor `L̄^αβ` and `I4* = g_αβ L̄^αβ`.
    pub fibers: Vec<(Sym2, f64)>,
}

pub fn layer_state(s: &SurfacePointState, r: &ReferencePointState, xi: f64) -> Result<LayerState> {
    let g_cov = s.a_cov - s.b_cov.scale(2.0 * xi);
    let big_g_cov = r.a_cov - r.b_cov.scale(2.0 * xi);
    let det = g_cov.det();
    let det_ref = big_g_cov.det();
    if !(det > 0.0) || !(det_ref > 0.0) {
        return Err(ShellError::DegenerateLayer {
            xi,
            det: det.min(det_ref),
        });
    }
    let g_con = g_cov.inverse();
    let big_g_con = big_g_cov.inverse();
    let jstar = (det / det_ref).sqrt();
    let i1 = big_g_con.dot(&g_cov);
    let fibers = r
        .fibers
        .iter()
        .map(|f| {
            let l = layer_fiber(f, r, &big_g_cov, &big_g_con, xi);
            let lo = Sym2::from_fn(|i, j| l[i] * l[j]);
            let i4 = lo.dot(&g_cov);
            (lo, i4)
        })
        .collect();
    Ok(LayerState {
        xi,
        g_cov,
        g_con,
        big_g_cov,
        big_g_con,
        jstar,
        i1,
        fibers,
    })
}

/// Fiber components `L̄^α` on the reference layer: the mid-surface fiber
/// shifted to height `ξ` and normalized w.r.t. the layer metric `G`.
fn layer_fiber(f: &FiberRef, r: &ReferencePointState, gc: &Sym2, gk: &Sym2, xi: f64) -> [f64; 2] {
    let shifted = [0, 1].map(|b| {
        f.l_cov[b]
            - xi * (0..2)
                .map(|g| r.b_con_mixed[g][b] * f.l_cov[g])
                .sum::<f64>()
    });
    let l = [0, 1].map(|a| (0..2).map(|b| gk.at(a, b) * shifted[b]).sum::<f64>());
    let n2: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| gc.at(i, j) * l[i] * l[j])
        .sum();
    let k = 1.0 / n2.sqrt();
    [l[0] * k, l[1] * k]
}

/// First derivatives in `ξ` of the layer quantities at `ξ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiDerivatives {
    pub jhat_3: f64,
    pub i1hat_3: f64,
    pub ghat_con_3: Sym2,
    /// Per fiber family: `L̂^αβ_,3` and `Î4,3`.
    pub fibers: Vec<(Sym2, f64)>,
}

pub fn xi_derivatives(s: &SurfacePointState, r: &ReferencePointState) -> XiDerivatives {
    let j = area_stretch(s, r);
    let jhat_3 = 2.0 * j * (r.h0_mean - s.h_mean);
    let i1hat_3 = 2.0 * (s.a_cov.dot(&r.b_con) - s.b_cov.dot(&r.a_con));
    let fibers = r
        .fibers
        .iter()
        .map(|f| {
            let i4 = -2.0 * s.b_cov.dot(&f.l_outer) + s.a_cov.dot(&f.l_outer_3);
            (f.l_outer_3, i4)
        })
        .collect();
    XiDerivatives {
        jhat_3,
        i1hat_3,
        ghat_con_3: s.b_con.scale(2.0),
        fibers,
    }
}

/// `a^αβγδ = −½(a^αγ a^βδ + a^αδ a^βγ)`; also `g^αβγδ` when fed a layer metric.
pub fn metric_variation(con: &Sym2) -> T4 {
    -T4::sym_prod(con, con)
}

/// `b^αβγδ = ∂b^αβ/∂a_γδ = 2H(a^αβ a^γδ + a^αβγδ) − (a^αβ b^γδ + b^αβ a^γδ)`.
pub fn curvature_variation(s: &SurfacePointState) -> T4 {
    let aa = T4::outer(&s.a_con, &s.a_con);
    let a4 = metric_variation(&s.a_con);
    (aa + a4) * (2.0 * s.h_mean) - T4::outer(&s.a_con, &s.b_con) - T4::outer(&s.b_con, &s.a_con)
}

/// Surface state with prescribed fundamental forms `a_αβ`, `b_αβ`, built from
/// a chart with `a₁, a₂` in the `e1`-`e2` plane and vanishing Christoffel symbols.
pub fn surface_from_forms(
    a_cov: &Sym2,
    b_cov: &Sym2,
    reference_area: Option<f64>,
) -> Result<SurfacePointState> {
    let [a11, a22, a12] = a_cov.0;
    if !(a11 > 0.0) || !(a22 - a12 * a12 / a11 > 0.0) {
        return Err(ShellError::DegenerateTangents(a_cov.det()));
    }
    let s11 = a11.sqrt();
    let d = SurfaceDerivs {
        x: Vector3::zeros(),
        x1: Vector3::new(s11, 0.0, 0.0),
        x2: Vector3::new(a12 / s11, (a22 - a12 * a12 / a11).sqrt(), 0.0),
        x11: Vector3::z() * b_cov.0[0],
        x22: Vector3::z() * b_cov.0[1],
        x12: Vector3::z() * b_cov.0[2],
    };
    surface_point(&d, reference_area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> SurfaceDerivs {
        SurfaceDerivs {
            x: Vector3::zeros(),
            x1: Vector3::x(),
            x2: Vector3::y(),
            x11: Vector3::zeros(),
            x22: Vector3::zeros(),
            x12: Vector3::zeros(),
        }
    }

    #[test]
    fn flat_plane_is_trivial() {
        let s = surface_point(&plane(), None).unwrap();
        assert_eq!(s.a_cov, Sym2::identity());
        assert_eq!(s.b_cov, Sym2::zero());
        assert_eq!(s.h_mean, 0.0);
    }

    #[test]
    fn identity_metric_variation() {
        let a4 = metric_variation(&Sym2::identity());
        assert_eq!(a4.at(0, 0, 0, 0), -1.0);
        assert_eq!(a4.at(0, 1, 0, 1), -0.5);
        assert_eq!(a4.at(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn collinear_tangents_rejected() {
        let mut d = plane();
        d.x2 = d.x1 * 2.0;
        assert!(matches!(
            surface_point(&d, None),
            Err(ShellError::DegenerateTangents(_))
        ));
    }

    #[test]
    fn bent_layer_metric() {
        let mut d = plane();
        d.x11 = Vector3::new(0.0, 0.0, 0.3);
        let s = surface_point(&d, Some(1.0)).unwrap();
        let r =
            ReferencePointState::new(&surface_point(&plane(), None).unwrap(), &[], 1.0).unwrap();
        let l = layer_state(&s, &r, 0.1).unwrap();
        assert!((l.g_cov.at(0, 0) - (1.0 - 2.0 * 0.1 * 0.3)).abs() < 1e-15);
    }
}
