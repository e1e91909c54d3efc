use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Evaluation hit a pole of a rational function.
    #[error("pole hit at {0}")]
    Pole(String),

    #[error("unbound indeterminate {0}")]
    Unbound(String),

    #[error("not a Mellin image of the radial span: polynomial part {0}")]
    NotMellinImage(String),

    #[error("G incompatible with shape: polynomial part {0}")]
    IncompatibleShape(String),

    #[error("equation not of telescoping form: {0}")]
    NotTelescoping(String),

    /// An a-posteriori exact identity check failed.
    #[error("solver soundness failure: {0}")]
    Unsound(String),

    /// Integrability left a constraint coupling several constants.
    #[error("unsupported constraint: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}
