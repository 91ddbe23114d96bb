//! Desk-scale numerical laboratory for the linear analysis behind calibrated
//! gluing constructions in 7 dimensions.
//!
//! The crate has three layers:
//!
//! * exact algebra of the imaginary octonions: cross product, the calibration
//!   3-form, the associator form, and calibration tests for linear subspaces
//!   (`octonion`, `calibration`);
//! * a flat-space check that the linearization of the graph-deformation map is
//!   the twisted Dirac operator (`linearization`), plus the thin-cylinder
//!   Cauchy-Riemann model with warped metric and Bloch-twisted torus cross
//!   section (`cylinder`, `spectral`);
//! * a quantitative simplified-Newton solver with explicit admissibility
//!   constants and a toy quadratic perturbation problem (`newton`).
//!
//! Everything is deterministic: no threads, seeded RNG only, fixed
//! accumulation order.

pub mod calibration;
pub mod cylinder;
pub mod linearization;
pub mod newton;
pub mod octonion;
pub mod report;
pub mod spectral;

/// Crate-wide error type. Variants carry enough context to name the violated
/// precondition or the diverging quantity in CLI output.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("frame is not orthonormal (residual {residual:.3e})")]
    NonOrthonormalFrame { residual: f64 },
    #[error("invalid frame seed: {0}")]
    InvalidSeed(String),
    #[error("normal vector is zero")]
    SingularNormal,
    #[error("invalid grid: {0}")]
    GridInvalid(String),
    #[error("operator is singular at zero twist (kernel dimension {kernel_dim})")]
    ZeroTwistSingular { kernel_dim: usize },
    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),
    #[error("admissibility violated: {name} = {value:.6} (need {need})")]
    Inadmissible {
        name: String,
        value: f64,
        need: String,
    },
    #[error("experiment under-determined: {0}")]
    Underdetermined(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
