//! Feasibility modeling for boson sampling with imperfect single-photon
//! sources, plus the source-characterization fits that produce the model
//! inputs.
//!
//! The crate is organized around five subsystems:
//!
//! * [`permanent`]: exact matrix permanents (naive and Ryser engines), a
//!   closed-form normalized permanent for uniform-overlap matrices, and the
//!   classical FLOP cost model.
//! * [`distinguishability`]: photon-overlap matrices, the variational
//!   distance bound `1 - perm(S)/N!`, and the separation Δ.
//! * [`interference`]: small-scale output distributions of linear optical
//!   networks (ideal, distinguishable, and a brute-force partial
//!   distinguishability oracle), collision-free statistics, and event-count
//!   estimates.
//! * [`advantage`]: the quantum-advantage threshold engine: simulability
//!   bound, classical runtime budget, experimental sampler runtime, and the
//!   crossing that yields `(N*, eta*)`.
//! * [`charfit`]: visibility correction, beta-factor and lifetime fits,
//!   propagation-loss and efficiency-budget analysis.
//!
//! [`table`] and [`scenario`] hold the CSV/JSON interchange formats used by
//! the command-line front end.

// Negated float comparisons (`!(x > 0.0)`) are deliberate: they reject NaN
// alongside the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod advantage;
pub mod charfit;
pub mod distinguishability;
mod fitting;
pub mod interference;
pub mod matrix;
pub mod permanent;
pub mod scenario;
pub mod table;

use num_complex::Complex64;

/// Errors shared across the crate.
///
/// [`Error::is_input_error`] distinguishes malformed inputs (bad files,
/// out-of-range parameters) from domain failures (no root, no advantage,
/// no resonance), which front ends map to distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix dimension {n} exceeds the cap of {cap} for the {engine} engine")]
    DimensionCap {
        n: usize,
        cap: usize,
        engine: &'static str,
    },
    #[error("matrix must have at least one row")]
    EmptyMatrix,
    #[error("matrix is not square: {rows} rows but {cols} columns on row {row}")]
    NotSquare { rows: usize, cols: usize, row: usize },
    #[error("matrix entries must be finite")]
    NonFiniteEntries,
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("photon totals differ: input carries {input}, output carries {output}")]
    PhotonMismatch { input: u32, output: u32 },
    #[error("mode counts differ: network has {network}, configuration has {config}")]
    ModeMismatch { network: usize, config: usize },
    #[error("matrix is not unitary: max |U†U - I| = {0:.3e}")]
    NotUnitary(f64),
    #[error(
        "distinguishability matrix is not of uniform form and n = {n} exceeds the exact-engine cap of {cap}"
    )]
    NonUniformTooLarge { n: usize, cap: usize },
    #[error("the brute-force oracle requires a uniform overlap matrix")]
    OracleNeedsUniform,
    #[error("unreachable at this V: no source efficiency in (0, 1] forces k = {n} at V = {v}")]
    UnreachableAtV { n: usize, v: f64 },
    #[error("infeasible at any source efficiency: runtime at eta_S = 1 exceeds the budget (n = {0})")]
    InfeasibleExperiment(usize),
    #[error("no advantage in range [{0}, {1}]")]
    NoAdvantageInRange(usize, usize),
    #[error("fit did not converge: {0}")]
    FitDiverged(String),
    #[error("no resonance detected: dip depth {depth:.3e} is below the floor {floor:.3e}")]
    NoResonance { depth: f64, floor: f64 },
    #[error("line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("scenario file: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for malformed-input errors (CLI exit code 2); false for domain
    /// failures such as "no advantage in range" (CLI exit code 1).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyMatrix
                | Error::NotSquare { .. }
                | Error::NonFiniteEntries
                | Error::OutOfRange { .. }
                | Error::PhotonMismatch { .. }
                | Error::ModeMismatch { .. }
                | Error::NotUnitary(_)
                | Error::DimensionCap { .. }
                | Error::Csv { .. }
                | Error::InvalidInput(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// ln(n!) via the log-gamma function.
pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(value >= lo && value <= hi) {
        return Err(Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        });
    }
    Ok(value)
}

/// Maps `f` over `items`, preserving order. With the `parallel` feature the
/// map runs on the rayon pool; the output is identical either way, so results
/// never depend on thread count.
pub(crate) fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

pub(crate) fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}
