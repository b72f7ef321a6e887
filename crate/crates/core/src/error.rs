use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate velocity: {0}")]
    DegenerateVelocity(String),
    #[error("zero curvature: {0}")]
    ZeroCurvature(String),
    #[error("undefined invariant: {0}")]
    UndefinedInvariant(String),
    #[error("singular reparametrization: xi' = {0}")]
    SingularReparam(f64),
    #[error("differentiation failed: {0}")]
    Differentiation(String),
    #[error("cannot resolve highest derivative: {0}")]
    Resolution(String),
    #[error("jet order too low: {0}")]
    Order(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("chart error: {0}")]
    Chart(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("step size underflow at s = {s}: h = {h:e}")]
    Stiffness { s: f64, h: f64 },
    #[error("step budget of {steps} exhausted at s = {s}")]
    StepLimit { s: f64, steps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
