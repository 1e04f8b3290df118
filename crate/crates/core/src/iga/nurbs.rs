use nalgebra::{Vector3, Vector4};

use crate::error::{Result, ShellError};
use crate::kinematics::SurfaceDerivs;

/// Tensor-product NURBS surface. Control points are stored with the `u`
/// index running fastest: `k = i + n_u * j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NurbsPatch {
    pub p: usize,
    pub q: usize,
    pub knots_u: Vec<f64>,
    pub knots_v: Vec<f64>,
    pub n_u: usize,
    pub n_v: usize,
    pub ctrl: Vec<Vector3<f64>>,
    pub weights: Vec<f64>,
}

/// Nonzero rational basis functions and their derivatives at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisEval {
    pub idx: Vec<usize>,
    pub r: Vec<f64>,
    pub du: Vec<f64>,
    pub dv: Vec<f64>,
    pub duu: Vec<f64>,
    pub duv: Vec<f64>,
    pub dvv: Vec<f64>,
}

impl BasisEval {
    /// `∂R/∂ξ^α` for `α ∈ {0, 1}`.
    #[inline]
    pub fn d1(&self, k: usize, a: usize) -> f64 {
        if a == 0 {
            self.du[k]
        } else {
            self.dv[k]
        }
    }

    /// `∂²R/∂ξ^α∂ξ^β`.
    #[inline]
    pub fn d2(&self, k: usize, a: usize, b: usize) -> f64 {
        match (a, b) {
            (0, 0) => self.duu[k],
            (1, 1) => self.dvv[k],
            _ => self.duv[k],
        }
    }

    /// Surface derivatives for the given control point positions.
    pub fn map(&self, pts: &[Vector3<f64>]) -> SurfaceDerivs {
        let mut d = SurfaceDerivs {
            x: Vector3::zeros(),
            x1: Vector3::zeros(),
            x2: Vector3::zeros(),
            x11: Vector3::zeros(),
            x22: Vector3::zeros(),
            x12: Vector3::zeros(),
        };
        for (k, &i) in self.idx.iter().enumerate() {
            let p = &pts[i];
            d.x += p * self.r[k];
            d.x1 += p * self.du[k];
            d.x2 += p * self.dv[k];
            d.x11 += p * self.duu[k];
            d.x22 += p * self.dvv[k];
            d.x12 += p * self.duv[k];
        }
        d
    }
}

/// Knot span index `s` with `U[s] ≤ u < U[s+1]`, clamped to the last
/// non-empty span at the upper end.
pub fn find_span(knots: &[f64], p: usize, n_ctrl: usize, u: f64) -> usize {
    if u >= knots[n_ctrl] {
        return n_ctrl - 1;
    }
    let (mut lo, mut hi) = (p, n_ctrl);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// B-spline basis values and derivatives up to order 2 on span `s`;
/// `out[k][j]` is the `k`-th derivative of `N_{s−p+j}`.
pub fn basis_ders(knots: &[f64], p: usize, s: usize, u: f64) -> [Vec<f64>; 3] {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = u - knots[s + 1 - j];
        right[j] = knots[s + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let nd = 2.min(p);
    let mut ders = [vec![0.0; p + 1], vec![0.0; p + 1], vec![0.0; p + 1]];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = [vec![0.0; p + 1], vec![0.0; p + 1]];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=nd {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize {
                k - 1
            } else {
                p - r
            };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut f = p as f64;
    for k in 1..=nd {
        for v in ders[k].iter_mut() {
            *v *= f;
        }
        f *= (p - k) as f64;
    }
    ders
}

impl NurbsPatch {
    pub fn new(
        p: usize,
        q: usize,
        knots_u: Vec<f64>,
        knots_v: Vec<f64>,
        ctrl: Vec<Vector3<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let n_u = knots_u.len().checked_sub(p + 1).unwrap_or(0);
        let n_v = knots_v.len().checked_sub(q + 1).unwrap_or(0);
        let patch = NurbsPatch {
            p,
            q,
            knots_u,
            knots_v,
            n_u,
            n_v,
            ctrl,
            weights,
        };
        patch.validate()?;
        Ok(patch)
    }

    fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(ShellError::InvalidPatch(s));
        if self.p < 2 || self.q < 2 {
            return bad("degrees must be at least 2".into());
        }
        if self.n_u <= self.p || self.n_v <= self.q {
            return bad("too few control points".into());
        }
        if self.ctrl.len() != self.n_u * self.n_v || self.weights.len() != self.ctrl.len() {
            return bad("control net size does not match the knot vectors".into());
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return bad("weights must be positive".into());
        }
        for (knots, p) in [(&self.knots_u, self.p), (&self.knots_v, self.q)] {
            if knots.windows(2).any(|w| w[1] < w[0]) {
                return bad("knot vector decreasing".into());
            }
            let n = knots.len();
            if knots[..=p].iter().any(|k| *k != knots[0])
                || knots[n - p - 1..].iter().any(|k| *k != knots[n - 1])
            {
                return bad("knot vector is not open".into());
            }
            let interior = &knots[p + 1..n - p - 1];
            let mut run = 1;
            for w in interior.windows(2) {
                run = if w[1] == w[0] { run + 1 } else { 1 };
                if run > p - 1 {
                    return bad("interior knot multiplicity breaks C1 continuity".into());
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.knots_u[self.p], self.knots_u[self.n_u]],
            [self.knots_v[self.q], self.knots_v[self.n_v]],
        )
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.n_u * j
    }

    pub fn basis_eval(&self, u: f64, v: f64) -> Result<BasisEval> {
        let (du, dv) = self.domain();
        let tol = 1e-12 * (1.0 + du[1].abs().max(dv[1].abs()));
        if !(u >= du[0] - tol && u <= du[1] + tol && v >= dv[0] - tol && v <= dv[1] + tol) {
            return Err(ShellError::OutOfDomain { u, v });
        }
        let u = u.clamp(du[0], du[1]);
        let v = v.clamp(dv[0], dv[1]);
        let su = find_span(&self.knots_u, self.p, self.n_u, u);
        let sv = find_span(&self.knots_v, self.q, self.n_v, v);
        Ok(self.basis_on_span(su, sv, u, v))
    }

    /// Basis on a given span pair; lets element boundaries use the element's own span.
    pub fn basis_on_span(&self, su: usize, sv: usize, u: f64, v: f64) -> BasisEval {
        let nu = basis_ders(&self.knots_u, self.p, su, u);
        let nv = basis_ders(&self.knots_v, self.q, sv, v);
        let m = (self.p + 1) * (self.q + 1);
        let mut idx = Vec::with_capacity(m);
        let mut a = [
            vec![0.0; m],
            vec![0.0; m],
            vec![0.0; m],
            vec![0.0; m],
            vec![0.0; m],
            vec![0.0; m],
        ];
        let mut w = [0.0; 6];
        for jv in 0..=self.q {
            for iu in 0..=self.p {
                let gi = self.index(su - self.p + iu, sv - self.q + jv);
                let k = idx.len();
                idx.push(gi);
                let wt = self.weights[gi];
                let vals = [
                    nu[0][iu] * nv[0][jv],
                    nu[1][iu] * nv[0][jv],
                    nu[0][iu] * nv[1][jv],
                    nu[2][iu] * nv[0][jv],
                    nu[1][iu] * nv[1][jv],
                    nu[0][iu] * nv[2][jv],
                ];
                for c in 0..6 {
                    a[c][k] = vals[c] * wt;
                    w[c] += vals[c] * wt;
                }
            }
        }
        let iw = 1.0 / w[0];
        let r: Vec<f64> = a[0].iter().map(|x| x * iw).collect();
        let ru: Vec<f64> = (0..m).map(|k| (a[1][k] - r[k] * w[1]) * iw).collect();
        let rv: Vec<f64> = (0..m).map(|k| (a[2][k] - r[k] * w[2]) * iw).collect();
        let ruu = (0..m)
            .map(|k| (a[3][k] - 2.0 * ru[k] * w[1] - r[k] * w[3]) * iw)
            .collect();
        let ruv = (0..m)
            .map(|k| (a[4][k] - ru[k] * w[2] - rv[k] * w[1] - r[k] * w[4]) * iw)
            .collect();
        let rvv = (0..m)
            .map(|k| (a[5][k] - 2.0 * rv[k] * w[2] - r[k] * w[5]) * iw)
            .collect();
        BasisEval {
            idx,
            r,
            du: ru,
            dv: rv,
            duu: ruu,
            duv: ruv,
            dvv: rvv,
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<SurfaceDerivs> {
        Ok(self.basis_eval(u, v)?.map(&self.ctrl))
    }

    fn homogeneous(&self) -> Vec<Vector4<f64>> {
        self.ctrl
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| Vector4::new(p.x * w, p.y * w, p.z * w, *w))
            .collect()
    }

    fn set_homogeneous(&mut self, pw: Vec<Vector4<f64>>) {
        self.weights = pw.iter().map(|p| p.w).collect();
        self.ctrl = pw
            .iter()
            .map(|p| Vector3::new(p.x / p.w, p.y / p.w, p.z / p.w))
            .collect();
    }

    /// Insert one knot in the `u` (`dir = 0`) or `v` (`dir = 1`) direction.
    pub fn insert_knot(&mut self, dir: usize, t: f64) {
        let pw = self.homogeneous();
        let (knots, p, n_along, n_across) = if dir == 0 {
            (&self.knots_u, self.p, self.n_u, self.n_v)
        } else {
            (&self.knots_v, self.q, self.n_v, self.n_u)
        };
        let k = find_span(knots, p, n_along, t);
        let alpha: Vec<f64> = (0..=n_along)
            .map(|i| {
                if i + p <= k {
                    1.0
                } else if i > k {
                    0.0
                } else {
                    (t - knots[i]) / (knots[i + p] - knots[i])
                }
            })
            .collect();
        let mut new_knots = knots.clone();
        new_knots.insert(k + 1, t);
        let at = |a: usize, c: usize| -> usize {
            if dir == 0 {
                a + n_along * c
            } else {
                c + n_across * a
            }
        };
        let n_new = n_along + 1;
        let mut out = vec![Vector4::zeros(); n_new * n_across];
        for c in 0..n_across {
            for i in 0..n_new {
                let q = if i + p <= k {
                    pw[at(i, c)]
                } else if i > k {
                    pw[at(i - 1, c)]
                } else {
                    pw[at(i, c)] * alpha[i] + pw[at(i - 1, c)] * (1.0 - alpha[i])
                };
                let idx = if dir == 0 {
                    i + n_new * c
                } else {
                    c + n_across * i
                };
                out[idx] = q;
            }
        }
        if dir == 0 {
            self.knots_u = new_knots;
            self.n_u = n_new;
        } else {
            self.knots_v = new_knots;
            self.n_v = n_new;
        }
        self.set_homogeneous(out);
    }

    /// Non-empty knot spans in one direction as `(span index, start, end)`.
    pub fn spans(&self, dir: usize) -> Vec<(usize, f64, f64)> {
        let (knots, p, n) = if dir == 0 {
            (&self.knots_u, self.p, self.n_u)
        } else {
            (&self.knots_v, self.q, self.n_v)
        };
        (p..n)
            .filter(|&s| knots[s + 1] > knots[s])
            .map(|s| (s, knots[s], knots[s + 1]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bilinear_square() -> NurbsPatch {
        let k = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let mut ctrl = vec![];
        for j in 0..3 {
            for i in 0..3 {
                ctrl.push(Vector3::new(i as f64 * 0.5, j as f64 * 0.5, 0.0));
            }
        }
        NurbsPatch::new(2, 2, k.clone(), k, ctrl, vec![1.0; 9]).unwrap()
    }

    #[test]
    fn corner_is_interpolatory() {
        let p = bilinear_square();
        let b = p.basis_eval(0.0, 0.0).unwrap();
        let k = b.idx.iter().position(|&i| i == 0).unwrap();
        assert!((b.r[k] - 1.0).abs() < 1e-15);
        assert!(b
            .r
            .iter()
            .enumerate()
            .all(|(j, r)| j == k || r.abs() < 1e-15));
    }

    #[test]
    fn rejects_points_outside() {
        assert!(bilinear_square().basis_eval(1.5, 0.2).is_err());
    }

    #[test]
    fn rejects_c0_knots() {
        let k = vec![0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0];
        let ku = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let r = NurbsPatch::new(2, 2, ku, k, vec![Vector3::zeros(); 15], vec![1.0; 15]);
        assert!(r.is_err());
    }
}
