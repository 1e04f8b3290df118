use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3};

use crate::constitution::{resultants, Pipeline};
use crate::error::{Result, ShellError};
use crate::iga::{QuadPoint, ShellMesh};
use crate::kinematics::SurfacePointState;
use crate::material::MaterialSpec;
use crate::tensor::{T4, VOIGT_PAIRS};

/// Residual plus tangent triplets in full DOF numbering.
#[derive(Clone, Debug, Default)]
pub struct Contribution {
    pub residual: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
}

impl Contribution {
    pub fn zeros(n: usize) -> Self {
        Contribution {
            residual: vec![0.0; n],
            triplets: vec![],
        }
    }

    pub fn add(&mut self, o: Contribution) {
        for (a, b) in self.residual.iter_mut().zip(&o.residual) {
            *a += b;
        }
        self.triplets.extend(o.triplets);
    }

    /// Scatter a local force/stiffness block for the given control points.
    pub fn scatter(&mut self, nodes: &[usize], f: &[f64], k: Option<&DMatrix<f64>>) {
        for (a, &na) in nodes.iter().enumerate() {
            for i in 0..3 {
                self.residual[3 * na + i] += f[3 * a + i];
            }
        }
        if let Some(k) = k {
            for (a, &na) in nodes.iter().enumerate() {
                for (b, &nb) in nodes.iter().enumerate() {
                    for i in 0..3 {
                        for j in 0..3 {
                            let v = k[(3 * a + i, 3 * b + j)];
                            if v != 0.0 {
                                self.triplets.push((3 * na + i, 3 * nb + j, v));
                            }
                        }
                    }
                }
            }
        }
    }
}

/// `[v]×` with `[v]× x = v × x`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

const MULT: [f64; 3] = [1.0, 1.0, 2.0];

fn voigt_block(t: &T4) -> SMatrix<f64, 3, 3> {
    SMatrix::<f64, 3, 3>::from_fn(|v, w| {
        let (i, j) = VOIGT_PAIRS[v];
        let (k, l) = VOIGT_PAIRS[w];
        t.at(i, j, k, l)
    })
}

/// Internal force and tangent of one quadrature point, local to its element nodes.
pub fn point_internal(
    q: &QuadPoint,
    s: &SurfacePointState,
    m: &MaterialSpec,
    p: Pipeline,
    tangent: bool,
) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let (res, tan) = resultants(p, m, s, &q.reference)?;
    let da = q.reference.d_area;
    let nb = q.basis.idx.len();
    let n = s.normal;
    let [a1, a2] = s.tangents;
    let mut amem = vec![[Vector3::zeros(); 3]; nb];
    let mut pb = vec![[0.0; 3]; nb];
    let mut rvec = vec![Vector3::zeros(); nb];
    let mut mk = vec![0.0; nb];
    let mut f = vec![0.0; 3 * nb];
    for k in 0..nb {
        let (n1, n2) = (q.basis.du[k], q.basis.dv[k]);
        amem[k] = [a1 * n1, a2 * n2, (a2 * n1 + a1 * n2) * 0.5];
        for (v, &(al, be)) in VOIGT_PAIRS.iter().enumerate() {
            pb[k][v] =
                q.basis.d2(k, al, be) - s.christoffel[0].0[v] * n1 - s.christoffel[1].0[v] * n2;
        }
        rvec[k] = s.dual[0] * n1 + s.dual[1] * n2;
        mk[k] = (0..3).map(|v| MULT[v] * res.m0.0[v] * pb[k][v]).sum();
        let fk: Vector3<f64> = (0..3)
            .map(|v| amem[k][v] * (MULT[v] * res.tau.0[v]))
            .sum::<Vector3<f64>>()
            + n * mk[k];
        for i in 0..3 {
            f[3 * k + i] = da * fk[i];
        }
    }
    if !tangent {
        return Ok((f, None));
    }
    let mut g = DMatrix::<f64>::zeros(3 * nb, 6);
    for k in 0..nb {
        for v in 0..3 {
            for i in 0..3 {
                g[(3 * k + i, v)] = MULT[v] * amem[k][v][i];
                g[(3 * k + i, 3 + v)] = MULT[v] * pb[k][v] * n[i];
            }
        }
    }
    let mut d6 = DMatrix::<f64>::zeros(6, 6);
    for (blk, (r0, c0)) in [
        (&tan.c, (0, 0)),
        (&tan.d, (0, 3)),
        (&tan.e, (3, 0)),
        (&tan.f, (3, 3)),
    ] {
        let b = voigt_block(blk);
        for v in 0..3 {
            for w in 0..3 {
                d6[(r0 + v, c0 + w)] = b[(v, w)];
            }
        }
    }
    let mut kmat = &g * d6 * g.transpose();
    let beta = res.m0.dot(&s.b_cov);
    let nn = n * n.transpose();
    for k in 0..nb {
        for l in 0..nb {
            let dk = [q.basis.du[k], q.basis.dv[k]];
            let dl = [q.basis.du[l], q.basis.dv[l]];
            let tmem: f64 = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| res.tau.at(a, b) * dk[a] * dl[b])
                .sum();
            let geo = Matrix3::identity() * tmem
                - n * rvec[k].transpose() * mk[l]
                - rvec[l] * n.transpose() * mk[k]
                - nn * (beta * rvec[k].dot(&rvec[l]));
            for i in 0..3 {
                for j in 0..3 {
                    kmat[(3 * k + i, 3 * l + j)] += geo[(i, j)];
                }
            }
        }
    }
    kmat *= da;
    Ok((f, Some(kmat)))
}

/// Internal force vector and tangent over the whole mesh.
pub fn internal_force_and_tangent(
    mesh: &ShellMesh,
    u: &[f64],
    m: &MaterialSpec,
    p: Pipeline,
    tangent: bool,
) -> Result<Contribution> {
    let pts = mesh.current(u);
    let mut out = Contribution::zeros(mesh.n_dofs());
    for (e, el) in mesh.elements.iter().enumerate() {
        let nb = el.nodes.len();
        let mut fe = vec![0.0; 3 * nb];
        let mut ke = tangent.then(|| DMatrix::<f64>::zeros(3 * nb, 3 * nb));
        for q in &mesh.points[el.points.clone()] {
            let wrap = |err: ShellError| ShellError::DegenerateElement {
                element: e,
                source: Box::new(err),
            };
            let s = mesh.state_at(q, &pts).map_err(wrap)?;
            let (f, k) = point_internal(q, &s, m, p, tangent).map_err(wrap)?;
            for (a, b) in fe.iter_mut().zip(&f) {
                *a += b;
            }
            if let (Some(ke), Some(k)) = (ke.as_mut(), k) {
                *ke += k;
            }
        }
        out.scatter(&el.nodes, &fe, ke.as_ref());
    }
    Ok(out)
}
