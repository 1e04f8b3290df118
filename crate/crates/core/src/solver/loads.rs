use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};

use super::internal::{skew, Contribution};
use crate::error::Result;
use crate::iga::{Edge, EdgePoint, ShellMesh};
use crate::kinematics::surface_point;

/// External loads; magnitudes are multiplied by the load factor.
#[derive(Clone, Debug, PartialEq)]
pub enum Load {
    /// Follower pressure acting along `a1 × a2` [kPa].
    Pressure { p: f64 },
    /// Dead traction per unit reference length on an edge [kPa·mm].
    EdgeTraction { edge: Edge, t: Vector3<f64> },
    /// Dead force on one control point [kPa·mm²].
    PointForce { node: usize, f: Vector3<f64> },
}

/// Penalty `½ ε ∫ (n − n̄)ᵀ P (n − n̄) ds` on an edge. `n̄` is the reference
/// normal rotated about `axis` by `λ · angle`. `P = I`, or `I − t̄ ⊗ t̄` with
/// `t̄` the rotated edge tangent when `free_along_edge` is set, which leaves
/// the normal free to tilt along the edge (cross-sectional curling).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalConstraint {
    pub edge: Edge,
    pub penalty: f64,
    pub axis: Vector3<f64>,
    pub angle: f64,
    pub free_along_edge: bool,
}

impl NormalConstraint {
    pub fn clamp(edge: Edge, penalty: f64) -> Self {
        NormalConstraint {
            edge,
            penalty,
            axis: Vector3::x(),
            angle: 0.0,
            free_along_edge: false,
        }
    }

    /// Rotation of the edge normal about `axis` by `λ · angle`.
    pub fn rotating(edge: Edge, penalty: f64, axis: Vector3<f64>, angle: f64) -> Self {
        NormalConstraint {
            edge,
            penalty,
            axis,
            angle,
            free_along_edge: true,
        }
    }

    fn projector(&self, along: &Vector3<f64>, rot: &Rotation3<f64>) -> Matrix3<f64> {
        if self.free_along_edge {
            let t = rot * along;
            Matrix3::identity() - t * t.transpose()
        } else {
            Matrix3::identity()
        }
    }

    fn rotation(&self, lambda: f64) -> Rotation3<f64> {
        if self.angle == 0.0 {
            return Rotation3::identity();
        }
        Rotation3::from_axis_angle(&Unit::new_normalize(self.axis), lambda * self.angle)
    }
}

/// Rigid sphere moving from `center` along `direction` by `λ · travel`.
#[derive(Clone, Debug, PartialEq)]
pub struct Indenter {
    pub center: Vector3<f64>,
    pub radius: f64,
    pub direction: Vector3<f64>,
    pub travel: f64,
    pub penalty: f64,
}

impl Indenter {
    pub fn center_at(&self, lambda: f64) -> Vector3<f64> {
        self.center + self.direction.normalize() * (lambda * self.travel)
    }
}

/// External force vector (positive = applied) and its derivative
/// `∂f_ext/∂u`. Only the follower pressure has a tangent.
pub fn external_force_and_tangent(
    mesh: &ShellMesh,
    u: &[f64],
    loads: &[Load],
    lambda: f64,
    tangent: bool,
) -> Result<Contribution> {
    let pts = mesh.current(u);
    let mut out = Contribution::zeros(mesh.n_dofs());
    for load in loads {
        match load {
            Load::Pressure { p } => {
                let p = p * lambda;
                for el in &mesh.elements {
                    let nb = el.nodes.len();
                    let mut fe = vec![0.0; 3 * nb];
                    let mut ke = tangent.then(|| DMatrix::<f64>::zeros(3 * nb, 3 * nb));
                    for q in &mesh.points[el.points.clone()] {
                        let d = q.basis.map(&pts);
                        let area = d.x1.cross(&d.x2);
                        let w = p * q.weight;
                        for k in 0..nb {
                            let fk = area * (w * q.basis.r[k]);
                            for i in 0..3 {
                                fe[3 * k + i] += fk[i];
                            }
                            if let Some(ke) = ke.as_mut() {
                                for l in 0..nb {
                                    let blk = (skew(&d.x1) * q.basis.dv[l]
                                        - skew(&d.x2) * q.basis.du[l])
                                        * (w * q.basis.r[k]);
                                    for i in 0..3 {
                                        for j in 0..3 {
                                            ke[(3 * k + i, 3 * l + j)] += blk[(i, j)];
                                        }
                                    }
                                }
                            }
                        }
                    }
                    out.scatter(&el.nodes, &fe, ke.as_ref());
                }
            }
            Load::EdgeTraction { edge, t } => {
                for ep in mesh.edge_points(*edge, mesh.patch.p + 1)? {
                    let f: Vec<f64> = ep
                        .basis
                        .r
                        .iter()
                        .flat_map(|r| {
                            (t * (r * ep.ds * lambda))
                                .iter()
                                .copied()
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    out.scatter(&ep.basis.idx, &f, None);
                }
            }
            Load::PointForce { node, f } => {
                for i in 0..3 {
                    out.residual[3 * node + i] += lambda * f[i];
                }
            }
        }
    }
    Ok(out)
}

fn penalty_points(mesh: &ShellMesh, c: &NormalConstraint) -> Result<Vec<EdgePoint>> {
    mesh.edge_points(c.edge, mesh.patch.p + 1)
}

/// Gradient and Hessian of the normal penalty energy.
pub fn normal_penalty(
    mesh: &ShellMesh,
    u: &[f64],
    c: &NormalConstraint,
    lambda: f64,
    tangent: bool,
) -> Result<Contribution> {
    let pts = mesh.current(u);
    let rot = c.rotation(lambda);
    let mut out = Contribution::zeros(mesh.n_dofs());
    for ep in penalty_points(mesh, c)? {
        let s = surface_point(&ep.basis.map(&pts), None)?;
        let n = s.normal;
        let nbar = rot * ep.normal;
        let pm = c.projector(&ep.along, &rot);
        let w = pm * (n - nbar);
        let eps = c.penalty * ep.ds;
        let nb = ep.basis.idx.len();
        let dn = |k: usize| [ep.basis.du[k], ep.basis.dv[k]];
        let wa = [w.dot(&s.dual[0]), w.dot(&s.dual[1])];
        let wn = w.dot(&n);
        let mut f = vec![0.0; 3 * nb];
        for k in 0..nb {
            let d = dn(k);
            let fk = n * (-eps * (d[0] * wa[0] + d[1] * wa[1]));
            for i in 0..3 {
                f[3 * k + i] = fk[i];
            }
        }
        let ke = tangent.then(|| {
            let mut ke = DMatrix::<f64>::zeros(3 * nb, 3 * nb);
            let nn = n * n.transpose();
            for k in 0..nb {
                for l in 0..nb {
                    let (di, dj) = (dn(k), dn(l));
                    let mut blk = Matrix3::zeros();
                    for g in 0..2 {
                        for dl in 0..2 {
                            let c = di[g] * dj[dl];
                            if c == 0.0 {
                                continue;
                            }
                            let agd = s.a_con.at(g, dl);
                            let apd = s.dual[g].dot(&(pm * s.dual[dl]));
                            blk += (nn * (-apd + agd * wn)
                                - n * s.dual[g].transpose() * wa[dl]
                                - s.dual[dl] * n.transpose() * wa[g])
                                * c;
                        }
                    }
                    blk *= -eps;
                    for i in 0..3 {
                        for j in 0..3 {
                            ke[(3 * k + i, 3 * l + j)] = blk[(i, j)];
                        }
                    }
                }
            }
            ke
        });
        out.scatter(&ep.basis.idx, &f, ke.as_ref());
    }
    Ok(out)
}

/// Generalized reaction `∂Π/∂θ` of a rotating normal constraint, i.e. the
/// moment about `axis` needed to hold the prescribed rotation.
pub fn reaction_moment(
    mesh: &ShellMesh,
    u: &[f64],
    c: &NormalConstraint,
    lambda: f64,
) -> Result<f64> {
    let pts = mesh.current(u);
    let rot = c.rotation(lambda);
    let axis = c.axis.normalize();
    let mut m = 0.0;
    for ep in penalty_points(mesh, c)? {
        let s = surface_point(&ep.basis.map(&pts), None)?;
        let nbar = rot * ep.normal;
        let w = c.projector(&ep.along, &rot) * (s.normal - nbar);
        m -= c.penalty * ep.ds * w.dot(&axis.cross(&nbar));
    }
    Ok(m)
}

/// Width of the smoothing band of the contact law, relative to the sphere radius.
pub const CONTACT_SMOOTHING: f64 = 1e-6;

/// Smoothed penalty gap `s(g)` and `s'(g)`: `g − h/2` in penetration,
/// `−(h − g)² / 2h` on `0 < g < h`, zero beyond. `C¹` at both ends.
pub fn smoothed_gap(g: f64, h: f64) -> Option<(f64, f64)> {
    if g <= 0.0 {
        Some((g - 0.5 * h, 1.0))
    } else if g < h {
        Some((-(h - g).powi(2) / (2.0 * h), (h - g) / h))
    } else {
        None
    }
}

/// Penalty contact of a rigid sphere at the element quadrature points,
/// with traction `ε_c s(g)` along the sphere normal, `g = |x − c| − R` and
/// [`smoothed_gap`] over a band `h = CONTACT_SMOOTHING · R`. The smoothing
/// keeps the tangent continuous where equilibrium sits at `g → 0⁻`.
pub fn contact_force_and_tangent(
    mesh: &ShellMesh,
    u: &[f64],
    ind: &Indenter,
    lambda: f64,
    tangent: bool,
) -> Result<(Contribution, Vector3<f64>)> {
    let pts = mesh.current(u);
    let center = ind.center_at(lambda);
    let mut out = Contribution::zeros(mesh.n_dofs());
    let mut total = Vector3::zeros();
    for q in &mesh.points {
        let mut x = Vector3::zeros();
        for (k, &i) in q.basis.idx.iter().enumerate() {
            x += pts[i] * q.basis.r[k];
        }
        let d = x - center;
        let r = d.norm();
        let g = r - ind.radius;
        let Some((sg, dsg)) = smoothed_gap(g, CONTACT_SMOOTHING * ind.radius) else {
            continue;
        };
        if r == 0.0 {
            continue;
        }
        let nt = d / r;
        let da = q.reference.d_area;
        let traction = nt * (ind.penalty * sg * da);
        total -= traction;
        let nb = q.basis.idx.len();
        let mut f = vec![0.0; 3 * nb];
        for k in 0..nb {
            for i in 0..3 {
                f[3 * k + i] = traction[i] * q.basis.r[k];
            }
        }
        let ke = tangent.then(|| {
            let nn = nt * nt.transpose();
            let blk = (nn * dsg + (Matrix3::identity() - nn) * (sg / r)) * (ind.penalty * da);
            let mut ke = DMatrix::<f64>::zeros(3 * nb, 3 * nb);
            for k in 0..nb {
                for l in 0..nb {
                    let c = q.basis.r[k] * q.basis.r[l];
                    for i in 0..3 {
                        for j in 0..3 {
                            ke[(3 * k + i, 3 * l + j)] = c * blk[(i, j)];
                        }
                    }
                }
            }
            ke
        });
        out.scatter(&q.basis.idx, &f, ke.as_ref());
    }
    Ok((out, total))
}
