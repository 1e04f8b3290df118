use std::fmt::Write as _;
use std::ops::Range;

use nalgebra::Vector3;

use super::nurbs::{BasisEval, NurbsPatch};
use crate::error::{Result, ShellError};
use crate::kinematics::{surface_point, ReferencePointState, SurfacePointState};
use crate::quadrature::gauss_on;

/// One knot span of the patch with its quadrature points.
#[derive(Clone, Debug)]
pub struct Element {
    pub span: (usize, usize),
    pub u: [f64; 2],
    pub v: [f64; 2],
    /// Global control point indices of the nonzero basis functions.
    pub nodes: Vec<usize>,
    pub points: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct QuadPoint {
    pub element: usize,
    pub u: f64,
    pub v: f64,
    /// Parametric weight; `reference.d_area` includes the area density.
    pub weight: f64,
    pub basis: BasisEval,
    pub reference: ReferencePointState,
}

/// Patch boundaries. `U0` is `u = u_min`, `V1` is `v = v_max`, and so on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Edge {
    U0,
    U1,
    V0,
    V1,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::U0, Edge::U1, Edge::V0, Edge::V1];

    pub fn parse(s: &str) -> Option<Edge> {
        match s {
            "u0" => Some(Edge::U0),
            "u1" => Some(Edge::U1),
            "v0" => Some(Edge::V0),
            "v1" => Some(Edge::V1),
            _ => None,
        }
    }
}

/// Quadrature point on a boundary edge.
#[derive(Clone, Debug)]
pub struct EdgePoint {
    pub u: f64,
    pub v: f64,
    pub basis: BasisEval,
    /// Reference line element `ds` times the quadrature weight.
    pub ds: f64,
    /// Reference unit normal.
    pub normal: Vector3<f64>,
    /// Reference unit tangent along the edge.
    pub along: Vector3<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradeEnd {
    Start,
    End,
}

/// Which parametric directions to grade and toward which end the fine elements sit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct GradeRegion {
    pub u: Option<GradeEnd>,
    pub v: Option<GradeEnd>,
}

#[derive(Clone, Debug)]
pub struct ShellMesh {
    pub patch: NurbsPatch,
    pub thickness: f64,
    pub elements: Vec<Element>,
    pub points: Vec<QuadPoint>,
    pub fibers: Vec<Vector3<f64>>,
    pub gauss: (usize, usize),
    base: NurbsPatch,
    nel: [usize; 2],
}

/// Interior knots of `n` elements on `[a, b]` with geometric widths; the
/// coarsest element is `ratio` times the finest.
pub fn graded_knots(a: f64, b: f64, n: usize, ratio: f64, toward: GradeEnd) -> Vec<f64> {
    let mut h: Vec<f64> = (0..n)
        .map(|k| {
            if n > 1 {
                ratio.powf(k as f64 / (n - 1) as f64)
            } else {
                1.0
            }
        })
        .collect();
    if toward == GradeEnd::End {
        h.reverse();
    }
    let total: f64 = h.iter().sum();
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for w in &h[..n.saturating_sub(1)] {
        acc += w;
        out.push(a + (b - a) * (acc / total));
    }
    out
}

fn refined(
    base: &NurbsPatch,
    nel: [usize; 2],
    ratio: [f64; 2],
    toward: [GradeEnd; 2],
) -> NurbsPatch {
    let mut patch = base.clone();
    let (du, dv) = base.domain();
    for (dir, dom) in [(0usize, du), (1, dv)] {
        for k in graded_knots(dom[0], dom[1], nel[dir], ratio[dir], toward[dir]) {
            patch.insert_knot(dir, k);
        }
    }
    patch
}

impl ShellMesh {
    /// Mesh with `nel` uniform elements per direction inserted into a single-element base patch.
    pub fn from_base(base: NurbsPatch, thickness: f64, nel: [usize; 2]) -> Result<Self> {
        if nel[0] == 0 || nel[1] == 0 {
            return Err(ShellError::InvalidDimensions(
                "element count must be at least 1".into(),
            ));
        }
        if !(thickness > 0.0) {
            return Err(ShellError::InvalidDimensions(
                "thickness must be positive".into(),
            ));
        }
        let patch = refined(&base, nel, [1.0, 1.0], [GradeEnd::Start, GradeEnd::Start]);
        let gauss = (base.p + 1, base.q + 1);
        let mut mesh = ShellMesh {
            patch,
            thickness,
            elements: vec![],
            points: vec![],
            fibers: vec![],
            gauss,
            base,
            nel,
        };
        mesh.rebuild()?;
        Ok(mesh)
    }

    fn rebuild(&mut self) -> Result<()> {
        let (gu, gv) = self.gauss;
        self.elements.clear();
        self.points.clear();
        let su = self.patch.spans(0);
        let sv = self.patch.spans(1);
        for &(jv, v0, v1) in &sv {
            for &(iu, u0, u1) in &su {
                let id = self.elements.len();
                let start = self.points.len();
                let mut nodes = vec![];
                for (v, wv) in gauss_on(gv, v0, v1) {
                    for (u, wu) in gauss_on(gu, u0, u1) {
                        let basis = self.patch.basis_on_span(iu, jv, u, v);
                        if nodes.is_empty() {
                            nodes = basis.idx.clone();
                        }
                        let s = surface_point(&basis.map(&self.patch.ctrl), None)?;
                        let reference = ReferencePointState::new(&s, &self.fibers, wu * wv)?;
                        self.points.push(QuadPoint {
                            element: id,
                            u,
                            v,
                            weight: wu * wv,
                            basis,
                            reference,
                        });
                    }
                }
                self.elements.push(Element {
                    span: (iu, jv),
                    u: [u0, u1],
                    v: [v0, v1],
                    nodes,
                    points: start..self.points.len(),
                });
            }
        }
        Ok(())
    }

    /// Attach fiber families given as ambient directions; the reference cache is rebuilt.
    pub fn set_fibers(&mut self, dirs: Vec<Vector3<f64>>) -> Result<()> {
        self.fibers = dirs;
        self.rebuild()
    }

    pub fn set_gauss(&mut self, gu: usize, gv: usize) -> Result<()> {
        if gu == 0 || gv == 0 {
            return Err(ShellError::InvalidDimensions(
                "Gauss rule needs at least one point".into(),
            ));
        }
        self.gauss = (gu, gv);
        self.rebuild()
    }

    pub fn n_ctrl(&self) -> usize {
        self.patch.ctrl.len()
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.n_ctrl()
    }

    pub fn nel(&self) -> [usize; 2] {
        self.nel
    }

    /// Current control point positions for a displacement vector.
    pub fn current(&self, u: &[f64]) -> Vec<Vector3<f64>> {
        self.patch
            .ctrl
            .iter()
            .enumerate()
            .map(|(k, x)| x + Vector3::new(u[3 * k], u[3 * k + 1], u[3 * k + 2]))
            .collect()
    }

    /// Current mid-surface state at a quadrature point.
    pub fn state_at(&self, q: &QuadPoint, pts: &[Vector3<f64>]) -> Result<SurfacePointState> {
        surface_point(&q.basis.map(pts), Some(q.reference.area_density))
    }

    /// Control point indices of an edge row; `layer = 1` is the next row inward.
    pub fn edge_nodes(&self, edge: Edge, layer: usize) -> Vec<usize> {
        let (nu, nv) = (self.patch.n_u, self.patch.n_v);
        match edge {
            Edge::U0 => (0..nv).map(|j| self.patch.index(layer, j)).collect(),
            Edge::U1 => (0..nv)
                .map(|j| self.patch.index(nu - 1 - layer, j))
                .collect(),
            Edge::V0 => (0..nu).map(|i| self.patch.index(i, layer)).collect(),
            Edge::V1 => (0..nu)
                .map(|i| self.patch.index(i, nv - 1 - layer))
                .collect(),
        }
    }

    /// Gauss points along an edge, `n` per element span.
    pub fn edge_points(&self, edge: Edge, n: usize) -> Result<Vec<EdgePoint>> {
        let (du, dv) = self.patch.domain();
        let (dir, fixed) = match edge {
            Edge::U0 => (1, du[0]),
            Edge::U1 => (1, du[1]),
            Edge::V0 => (0, dv[0]),
            Edge::V1 => (0, dv[1]),
        };
        let mut out = vec![];
        for (_, t0, t1) in self.patch.spans(dir) {
            for (t, w) in gauss_on(n, t0, t1) {
                let (u, v) = if dir == 0 { (t, fixed) } else { (fixed, t) };
                let basis = self.patch.basis_eval(u, v)?;
                let d = basis.map(&self.patch.ctrl);
                let s = surface_point(&d, None)?;
                let xt = if dir == 0 { d.x1 } else { d.x2 };
                out.push(EdgePoint {
                    u,
                    v,
                    basis,
                    ds: w * xt.norm(),
                    normal: s.normal,
                    along: xt.normalize(),
                });
            }
        }
        Ok(out)
    }

    /// Reference area from the element quadrature.
    pub fn area(&self) -> f64 {
        self.points.iter().map(|q| q.reference.d_area).sum()
    }

    /// Plain-text dump of the patch with optionally displaced control points.
    ///
    /// ```text
    /// klshell-mesh 1
    /// degree <p> <q>
    /// knots_u <n> <k0> <k1> ...
    /// knots_v <n> <k0> <k1> ...
    /// control <n_u> <n_v>
    /// <x> <y> <z> <w>        (n_u * n_v lines, u index fastest)
    /// ```
    pub fn dump(&self, displacement: Option<&[f64]>) -> String {
        let p = &self.patch;
        let pts = displacement.map_or_else(|| p.ctrl.clone(), |u| self.current(u));
        let mut s = String::new();
        let _ = writeln!(s, "klshell-mesh 1");
        let _ = writeln!(s, "degree {} {}", p.p, p.q);
        for (name, k) in [("knots_u", &p.knots_u), ("knots_v", &p.knots_v)] {
            let _ = write!(s, "{name} {}", k.len());
            for x in k.iter() {
                let _ = write!(s, " {x:.17e}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "control {} {}", p.n_u, p.n_v);
        for (x, w) in pts.iter().zip(&p.weights) {
            let _ = writeln!(s, "{:.17e} {:.17e} {:.17e} {:.17e}", x.x, x.y, x.z, w);
        }
        s
    }
}

/// Re-insert graded knots into the unrefined base patch. Geometry is
/// preserved exactly; fibers and the Gauss rule carry over.
pub fn graded_refinement(mesh: &ShellMesh, region: GradeRegion, ratio: f64) -> Result<ShellMesh> {
    if !(ratio >= 1.0) {
        return Err(ShellError::InvalidDimensions(
            "grading ratio must be at least 1".into(),
        ));
    }
    let pick = |g: Option<GradeEnd>| g.map_or((1.0, GradeEnd::Start), |e| (ratio, e));
    let (ru, eu) = pick(region.u);
    let (rv, ev) = pick(region.v);
    let mut out = mesh.clone();
    out.patch = refined(&mesh.base, mesh.nel, [ru, rv], [eu, ev]);
    out.rebuild()?;
    Ok(out)
}

fn check_dims(vals: &[(&str, f64)], nel: &[usize]) -> Result<()> {
    for (name, v) in vals {
        if !(*v > 0.0) || !v.is_finite() {
            return Err(ShellError::InvalidDimensions(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    if nel.iter().any(|n| *n == 0) {
        return Err(ShellError::InvalidDimensions(
            "element count must be at least 1".into(),
        ));
    }
    Ok(())
}

fn flat_base(w: f64, l: f64) -> NurbsPatch {
    let k = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let ctrl = (0..3)
        .flat_map(|j| {
            (0..3).map(move |i| Vector3::new(0.5 * w * i as f64, 0.5 * l * j as f64, 0.0))
        })
        .collect();
    NurbsPatch::new(2, 2, k.clone(), k, ctrl, vec![1.0; 9]).expect("flat base patch is valid")
}

/// Flat strip `[0, W] × [0, L]` in the `e1`-`e2` plane; the length runs along `e2`.
pub fn make_strip(t: f64, w: f64, l: f64, nel_w: usize, nel_l: usize) -> Result<ShellMesh> {
    check_dims(
        &[("thickness", t), ("width", w), ("length", l)],
        &[nel_w, nel_l],
    )?;
    ShellMesh::from_base(flat_base(w, l), t, [nel_w, nel_l])
}

/// Flat square `[0, L]²`.
pub fn make_plate(t: f64, l: f64, nel: usize) -> Result<ShellMesh> {
    check_dims(&[("thickness", t), ("side", l)], &[nel])?;
    ShellMesh::from_base(flat_base(l, l), t, [nel, nel])
}

/// Exact circular cylinder sector of radius `R` about `e3`, spanning angle
/// `sweep` (radians, below π) from the `e1` axis, and `length` along `e3`.
pub fn make_cylinder_sector(
    t: f64,
    r: f64,
    length: f64,
    sweep: f64,
    nel_c: usize,
    nel_l: usize,
) -> Result<ShellMesh> {
    check_dims(
        &[
            ("thickness", t),
            ("radius", r),
            ("length", length),
            ("sweep", sweep),
        ],
        &[nel_c, nel_l],
    )?;
    if sweep >= std::f64::consts::PI * (1.0 - 1e-9) {
        return Err(ShellError::InvalidDimensions(
            "a single quadratic arc must sweep less than 180 degrees".into(),
        ));
    }
    let h = 0.5 * sweep;
    let arc = [
        (Vector3::new(r, 0.0, 0.0), 1.0),
        (Vector3::new(r, r * h.tan(), 0.0), h.cos()),
        (Vector3::new(r * sweep.cos(), r * sweep.sin(), 0.0), 1.0),
    ];
    let mut ctrl = vec![];
    let mut weights = vec![];
    for j in 0..3 {
        for (p, w) in &arc {
            ctrl.push(p + Vector3::new(0.0, 0.0, 0.5 * length * j as f64));
            weights.push(*w);
        }
    }
    let k = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let base = NurbsPatch::new(2, 2, k.clone(), k, ctrl, weights)?;
    ShellMesh::from_base(base, t, [nel_c, nel_l])
}
