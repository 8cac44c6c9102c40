use thiserror::Error;

/// Errors raised by quadrature generation, the solvers and the oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdoError {
    #[error("invalid quadrature order {order}: {reason}")]
    InvalidOrder { order: usize, reason: &'static str },

    #[error("unsupported quadrature order {order}: {reason}")]
    UnsupportedOrder { order: usize, reason: &'static str },

    #[error("invalid asymmetry factor g = {0}: must satisfy |g| < 1")]
    InvalidAsymmetry(f64),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("complex separation constant{}: 1/nu^2 = {re} + {im}i", region_suffix(.region))]
    ComplexSpectrum {
        re: f64,
        im: f64,
        region: Option<usize>,
    },

    #[error("supercritical spectrum{}: eigenvalue 1/nu^2 = {value} is not positive", region_suffix(.region))]
    SupercriticalSpectrum { value: f64, region: Option<usize> },

    #[error("unsupported source: {0}")]
    UnsupportedSource(String),

    #[error("near-singular linear system (condition estimate {condition:e}): {hint}")]
    NearSingular { condition: f64, hint: String },

    #[error("singular global system at region {region}, {block} block, direction {direction}")]
    SingularSystem {
        region: usize,
        block: &'static str,
        direction: usize,
    },

    #[error("{got} unknowns exceed the limit of {limit}")]
    SystemTooLarge { got: usize, limit: usize },

    #[error("coordinate {value} outside [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error("direction {0} is not a quadrature node")]
    UnsupportedDirection(f64),

    #[error("direction set lacks the sign symmetry needed for {0} ordering")]
    OrderingImpossible(&'static str),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("stalled convergence: successive differences vanish")]
    StalledConvergence,

    #[error("non-monotone refinement series: difference ratio {0} is not positive")]
    NonMonotoneSeries(f64),

    #[error("degenerate convergence order: r^p = 1")]
    DegenerateOrder,

    #[error("invalid refinement series: {0}")]
    InvalidSeries(String),

    #[error("no convergence after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },
}

fn region_suffix(region: &Option<usize>) -> String {
    match region {
        Some(r) => format!(" in region {r}"),
        None => String::new(),
    }
}

pub type Result<T, E = AdoError> = std::result::Result<T, E>;
