//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction parameters (rank/dimension combinations, malformed
    /// partitions, bad windows, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Two elements of different algebras were combined.
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    /// An element was singular where an inverse (or a chart) was required.
    #[error("singular element: |det x| = {abs_det:.3e} below tolerance {tol:.3e}")]
    Singular { abs_det: f64, tol: f64 },

    /// A leading minor vanished; `index` is the first failing minor.
    #[error("chart domain error: leading minor {index} vanished ({value:.3e})")]
    ChartDomain { index: usize, value: f64 },

    /// The eigen-solver could not reconstruct the element within tolerance.
    #[error("spectral decomposition failed: reconstruction residual {residual:.3e}")]
    EigenFailure { residual: f64 },

    /// A frame (or an element claimed to lie in some Peirce block) violated
    /// its defining relations.
    #[error("invariant violation: {0}")]
    InvalidFrame(String),

    /// Basis generation did not reach a stable rank within the sample budget.
    #[error("rank did not stabilize within budget: last ranks {prev} -> {last}")]
    RankBudget { prev: usize, last: usize },

    /// A linear-algebra step was too ill-conditioned to trust.
    #[error("conditioning error: condition number {cond:.3e}")]
    Conditioning { cond: f64 },

    /// Evaluation requested at (or numerically on top of) a pole.
    #[error("pole at s = {s}: factors {factors:?}")]
    PoleHit { s: String, factors: Vec<usize> },

    /// Laurent extraction geometry is invalid (another pole inside the disk).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The noise floor swamped the Laurent data.
    #[error("indeterminate pole order: {0}")]
    IndeterminateOrder(String),

    /// Odd Peirce degree with s0 outside (1/2)Z: the pole-order and
    /// support-rank predictors are only defined on half-integers there.
    #[error("unsupported point: {0}")]
    UnsupportedPoint(String),

    /// A quadrature/Monte-Carlo budget ran out before reaching the target
    /// accuracy; the partial estimate is carried along.
    #[error("budget exhausted: relative error {rel_err:.3e} above target {target:.3e}")]
    Budget { rel_err: f64, target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
