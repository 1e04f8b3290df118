//! Boundary-value problems built from a [`Scenario`].

use klshell::error::{Result, ShellError};
use klshell::iga::{graded_refinement, make_strip, Edge, GradeEnd, GradeRegion, ShellMesh};
use klshell::material::{fiber_from_angle, MaterialModel, MaterialSpec};
use klshell::solver::{
    DofMap, Indenter, Load, NewtonOptions, NormalConstraint, ShellSystem, Solution,
};
use nalgebra::Vector3;

use crate::scenario::{GeometryKind, LoadSpec, MaterialBlock, OuterEdges, RootKind, Scenario};

/// Scalar read out of a converged state.
#[derive(Clone, Debug, PartialEq)]
pub enum Monitor {
    /// `u_dof / scale`.
    Displacement { dof: usize, scale: f64 },
    /// Reaction moment of a normal constraint, divided by `scale`.
    Moment { constraint: usize, scale: f64 },
    /// `−factor · F_z / scale` of the indenter force.
    ContactForce { factor: f64, scale: f64 },
}

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub system: ShellSystem,
    pub options: NewtonOptions,
    pub monitor: Monitor,
    /// Control value at `λ = 1`; the control column is `λ · control_max`.
    pub control_max: f64,
    pub control_label: String,
    pub response_label: String,
    /// Human-readable normalization for CSV headers.
    pub normalization: String,
    pub youngs_modulus: f64,
}

impl Benchmark {
    pub fn response(&self, sol: &Solution) -> Result<f64> {
        match self.monitor {
            Monitor::Displacement { dof, scale } => Ok(sol.u[dof] / scale),
            Monitor::Moment { constraint, scale } => Ok(self
                .system
                .reaction_moment(constraint, &sol.u, sol.lambda)?
                / scale),
            Monitor::ContactForce { factor, scale } => {
                Ok(-factor * self.system.contact_force(&sol.u, sol.lambda)?.z / scale)
            }
        }
    }
}

/// Material from a scenario block: the named preset, then explicit overrides.
pub fn build_material(b: &MaterialBlock, thickness: f64) -> Result<MaterialSpec> {
    let fibers: Vec<_> = b
        .fiber_angles
        .iter()
        .map(|&a| fiber_from_angle(a))
        .collect();
    let nf = fibers.len();
    let mut m = MaterialSpec::preset(&b.model, thickness, fibers, b.kappa, b.switch)?;
    match &mut m.model {
        MaterialModel::NeoHooke { c1 } => set(c1, b.c1),
        MaterialModel::MooneyRivlin { c1, c2 } | MaterialModel::Fung { c1, c2 } => {
            set(c1, b.c1);
            set(c2, b.c2);
        }
        MaterialModel::AnisoMooneyRivlin { c1, c2, c3 } => {
            set(c1, b.c1);
            set(c2, b.c2);
            if let Some(v) = b.c3 {
                *c3 = vec![v; nf];
            }
        }
        MaterialModel::Goh { mu, k1, k2, .. } => {
            set(mu, b.mu);
            if let Some(v) = b.k1 {
                *k1 = vec![v; nf];
            }
            if let Some(v) = b.k2 {
                *k2 = vec![v; nf];
            }
        }
    }
    m.validate()?;
    Ok(m)
}

fn set(slot: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn dofs_of(nodes: &[usize], comps: &[usize]) -> Vec<usize> {
    nodes
        .iter()
        .flat_map(|&n| comps.iter().map(move |&c| 3 * n + c))
        .collect()
}

/// Mirror symmetry about the plane through `edge` with normal along `normal_comp`:
/// the normal displacement of the edge row vanishes and the other two
/// components of the first inner row follow the edge row.
fn symmetry(
    mesh: &ShellMesh,
    edge: Edge,
    normal_comp: usize,
    fixed: &mut Vec<usize>,
    ties: &mut Vec<Vec<usize>>,
) {
    let row0 = mesh.edge_nodes(edge, 0);
    let row1 = mesh.edge_nodes(edge, 1);
    fixed.extend(dofs_of(&row0, &[normal_comp]));
    for (&a, &b) in row0.iter().zip(&row1) {
        for c in (0..3).filter(|&c| c != normal_comp) {
            ties.push(vec![3 * a + c, 3 * b + c]);
        }
    }
}

/// Assemble the boundary-value problem described by a scenario.
pub fn build(sc: &Scenario) -> Result<Benchmark> {
    let g = &sc.geometry;
    let t = g.thickness;
    let material = build_material(&sc.material, t)?;
    let e = material.youngs_modulus();
    let quarter = g.kind != GeometryKind::Strip;
    let (w, l) = if quarter {
        (0.5 * g.length, 0.5 * g.length)
    } else {
        (g.width, g.length)
    };
    let mut mesh = make_strip(t, w, l, g.nel_w, g.nel_l)?;
    if g.grading > 1.0 {
        let region = GradeRegion {
            u: Some(GradeEnd::Start),
            v: Some(GradeEnd::Start),
        };
        mesh = graded_refinement(&mesh, region, g.grading)?;
    }
    mesh.set_fibers(material.fibers.clone())?;
    if let klshell::constitution::Pipeline::Np { n_gp } = sc.pipeline {
        if n_gp == 0 {
            return Err(ShellError::InvalidDimensions(
                "at least one thickness point is required".into(),
            ));
        }
    }
    let (nu, nv) = (mesh.patch.n_u, mesh.patch.n_v);
    let n = mesh.n_dofs();
    let corner = mesh.patch.index(nu - 1, nv - 1);
    let eps_r = sc.constraints.rotation_penalty * e * t.powi(3);
    let mut fixed = vec![];
    let mut ties = vec![];
    let mut loads = vec![];
    let mut normals = vec![];
    let mut indenter = None;
    let bad = |what: &str| {
        Err(ShellError::InvalidDimensions(format!(
            "load `{what}` does not fit this geometry"
        )))
    };

    let (monitor, control_max, control_label, response_label, normalization) =
        match (&g.kind, &sc.load) {
            (GeometryKind::Strip, LoadSpec::CornerForce { force_ratio }) => {
                let area = w * t;
                fixed.extend((0..mesh.n_ctrl()).map(|i| 3 * i + 2));
                fixed.extend(dofs_of(&mesh.edge_nodes(Edge::V0, 0), &[1]));
                fixed.push(0);
                ties.push(dofs_of(&mesh.edge_nodes(Edge::V1, 0), &[1]));
                loads.push(Load::PointForce {
                    node: corner,
                    f: Vector3::y() * (force_ratio * e * area),
                });
                (
                    Monitor::Displacement {
                        dof: 3 * corner + 1,
                        scale: l,
                    },
                    *force_ratio,
                    "F/(EA)".to_string(),
                    "u/L".to_string(),
                    format!("E = {e} kPa, A = W T = {area:.6} mm^2, L = {l} mm"),
                )
            }
            (GeometryKind::Strip, LoadSpec::EndRotation { angle_deg }) => {
                let inertia = w * t.powi(3) / 12.0;
                let alpha = angle_deg.to_radians();
                let root = mesh.edge_nodes(Edge::V0, 0);
                normals.push(NormalConstraint::rotating(
                    Edge::V1,
                    eps_r,
                    Vector3::x(),
                    alpha,
                ));
                match sc.constraints.root {
                    RootKind::Fixed => {
                        fixed.extend(dofs_of(&root, &[0, 1, 2]));
                        normals.push(NormalConstraint::clamp(Edge::V0, eps_r));
                    }
                    RootKind::Beam => {
                        fixed.extend(dofs_of(&root, &[1]));
                        fixed.extend([3 * root[0], 3 * root[0] + 2, 3 * root[root.len() - 1] + 2]);
                        normals.push(NormalConstraint::rotating(
                            Edge::V0,
                            eps_r,
                            Vector3::x(),
                            0.0,
                        ));
                    }
                }
                (
                    Monitor::Moment {
                        constraint: 0,
                        scale: e * inertia / l,
                    },
                    alpha,
                    "alpha [rad]".to_string(),
                    "ML/(EI)".to_string(),
                    format!("E = {e} kPa, I = W T^3/12 = {inertia:.6e} mm^4, L = {l} mm"),
                )
            }
            (GeometryKind::PlateQuarter, LoadSpec::Pressure { pressure }) => {
                for edge in [Edge::U0, Edge::V0] {
                    fixed.extend(dofs_of(&mesh.edge_nodes(edge, 0), &[0, 1, 2]));
                    normals.push(NormalConstraint::clamp(edge, eps_r));
                }
                symmetry(&mesh, Edge::U1, 0, &mut fixed, &mut ties);
                symmetry(&mesh, Edge::V1, 1, &mut fixed, &mut ties);
                loads.push(Load::Pressure { p: *pressure });
                (
                    Monitor::Displacement {
                        dof: 3 * corner + 2,
                        scale: 1.0,
                    },
                    *pressure,
                    "p [kPa]".to_string(),
                    "w [mm]".to_string(),
                    format!(
                        "E = {e} kPa, T = {t} mm, L = {} mm, w at the plate center",
                        g.length
                    ),
                )
            }
            (
                GeometryKind::SheetQuarter,
                LoadSpec::Indentation {
                    depth_ratio,
                    radius_ratio,
                    penalty_factor,
                },
            ) => {
                symmetry(&mesh, Edge::U0, 0, &mut fixed, &mut ties);
                symmetry(&mesh, Edge::V0, 1, &mut fixed, &mut ties);
                for edge in [Edge::U1, Edge::V1] {
                    fixed.extend(dofs_of(&mesh.edge_nodes(edge, 0), &[0, 1, 2]));
                    if sc.constraints.outer_edges == OuterEdges::Clamped {
                        normals.push(NormalConstraint::clamp(edge, eps_r));
                    }
                }
                let radius = radius_ratio * g.length;
                indenter = Some(Indenter {
                    center: Vector3::new(0.0, 0.0, radius),
                    radius,
                    direction: -Vector3::z(),
                    travel: depth_ratio * g.length,
                    penalty: penalty_factor * e * t,
                });
                (
                    Monitor::ContactForce {
                        factor: 4.0,
                        scale: 1.0,
                    },
                    *depth_ratio,
                    "d/L".to_string(),
                    "F [mN]".to_string(),
                    format!(
                        "E = {e} kPa, L = {} mm, R = {radius} mm, F = total vertical contact force",
                        g.length
                    ),
                )
            }
            (_, LoadSpec::CornerForce { .. }) => return bad("corner_force"),
            (_, LoadSpec::EndRotation { .. }) => return bad("end_rotation"),
            (_, LoadSpec::Pressure { .. }) => return bad("pressure"),
            (_, LoadSpec::Indentation { .. }) => return bad("indentation"),
        };

    let mut system = ShellSystem::new(mesh, material, sc.pipeline);
    system.dofs = DofMap::new(n, &fixed, &ties);
    system.loads = loads;
    system.normals = normals;
    system.indenter = indenter;
    let st = &sc.stepping;
    let options = NewtonOptions {
        steps: st.steps,
        max_iterations: st.max_iterations,
        tol_abs: st.tol_abs * e * t * g.length,
        tol_rel: st.tol_rel,
        max_bisections: st.max_bisections,
        tol_stall: st.tol_stall.max(st.tol_abs) * e * t * g.length,
    };
    Ok(Benchmark {
        system,
        options,
        monitor,
        control_max,
        control_label,
        response_label,
        normalization,
        youngs_modulus: e,
    })
}
