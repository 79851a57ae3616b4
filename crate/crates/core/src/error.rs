use thiserror::Error;

/// Failures raised by the numerical guards of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Significant amplitude would live outside the retained Fock basis.
    #[error("truncation overflow in {context}: tail mass {tail_mass:.3e} exceeds {tolerance:.0e} at n_cut = {n_cut}")]
    TruncationOverflow {
        context: String,
        n_cut: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The quadrature grid does not capture the full tomogram mass.
    #[error("grid too narrow: integrated mass {mass:.12} at theta = {theta:.6} misses 1 by more than {tolerance:.0e}")]
    GridTooNarrow {
        theta: f64,
        mass: f64,
        tolerance: f64,
    },

    #[error("moment order {order} exceeds the maximum order {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("moment table has no entry for {0}")]
    MissingOrder(String),
}

pub type Result<T> = std::result::Result<T, Error>;
