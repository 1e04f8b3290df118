//! NURBS patches and shell meshes.

pub mod mesh;
pub mod nurbs;

pub use mesh::{
    graded_knots, graded_refinement, make_cylinder_sector, make_plate, make_strip, Edge, EdgePoint,
    Element, GradeEnd, GradeRegion, QuadPoint, ShellMesh,
};
pub use nurbs::{BasisEval, NurbsPatch};
