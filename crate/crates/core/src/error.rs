use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShellError {
    #[error("degenerate tangents: |a1 x a2| = {0:e}")]
    DegenerateTangents(f64),
    #[error("degenerate layer at xi = {xi}: det g = {det:e}")]
    DegenerateLayer { xi: f64, det: f64 },
    #[error("non-positive layer jacobian J* = {0:e}")]
    NonPositiveLayerJacobian(f64),
    #[error("exponent {0:e} exceeds the overflow guard")]
    ConstitutiveOverflow(f64),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("parameter ({u}, {v}) outside the patch domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("degenerate element {element}: {source}")]
    DegenerateElement {
        element: usize,
        #[source]
        source: Box<ShellError>,
    },
    #[error("singular tangent: {0}")]
    SingularTangent(String),
    #[error("no convergence at load factor {load_factor}: {reason}")]
    NonConvergence { load_factor: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, ShellError>;
