use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChaosError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("point ({q}, {p}) lies outside the {chart} chart")]
    OutOfChart { q: f64, p: f64, chart: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ray tangent to the boundary at q = {q}: no transversal next bounce")]
    Tangency { q: f64 },

    #[error("ray tracing failed to find the next boundary intersection from q = {q}, p = {p}")]
    RayTrace { q: f64, p: f64 },

    #[error("step {index} failed: {source}")]
    StepFailed {
        index: usize,
        #[source]
        source: Box<ChaosError>,
    },

    #[error("integrator step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("operation requires a smooth flow, got {0}")]
    NotAFlow(&'static str),

    #[error("operation requires a discrete map, got {0}")]
    NotAMap(&'static str),

    #[error("matrix is not hyperbolic (trace {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("non-finite Jacobian at step {0}")]
    NonFiniteJacobian(usize),

    #[error("Newton iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("symbol string rejected: {0}")]
    BadSymbols(String),

    #[error("itinerary mismatch: {0}")]
    ItineraryMismatch(String),

    #[error("open circuit: gap of {gap:e} between consecutive pieces")]
    OpenCircuit { gap: f64 },

    #[error("manifold budget not reached: grew {reached} of {budget} before failure: {reason}")]
    BudgetUnreached {
        reached: f64,
        budget: f64,
        reason: String,
    },

    #[error("continuation to gamma = {gamma} failed (suspected bifurcation): {reason}")]
    SuspectedBifurcation { gamma: f64, reason: String },

    #[error("singular matrix: {0}")]
    Singular(&'static str),

    #[error("trajectory escaped (|q| > {radius:e}) at t = {t:?}")]
    Escaped { t: num_complex::Complex64, radius: f64 },

    #[error("step underflow near a branch cut at t = {t:?}")]
    BranchCut { t: num_complex::Complex64 },

    #[error("request inside the turning-point exclusion zone: q = {0}")]
    ExclusionZone(f64),

    #[error("determinant vanishes on the real time axis near t = {0}")]
    DeterminantZero(f64),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for ChaosError {
    fn from(e: std::io::Error) -> Self {
        ChaosError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ChaosError>;

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ChaosError::NonFinite(what))
    }
}
