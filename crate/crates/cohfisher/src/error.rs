use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A profile failed base validation (normalization, grid uniformity,
    /// nonzero mean momentum, bad width).
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// A profile is valid but not admissible for the closed-form path
    /// (its overlap ⟨e^{isP}⟩ is not real).
    #[error("profile not admissible for closed forms: {0}")]
    RealOverlapViolation(String),

    /// A channel norm or eigenvalue vanished where a finite value is needed.
    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// An eigenvalue sits below the rank threshold while its derivative does
    /// not, so (dλ)²/λ has no finite limit.
    #[error("indeterminate divergence: eigenvalue {lambda:.3e} below rank threshold with slope {slope:.3e}")]
    IndeterminateDivergence { lambda: f64, slope: f64 },

    /// A closed-form expression was requested outside its regime.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// An operation received a descriptor from the wrong model family.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The oracle grid cannot resolve the profile or the displaced pair.
    #[error("grid does not resolve the state: {0}")]
    UnderResolvedGrid(String),

    /// Excluded spectral mass is too large for the result to be trusted.
    #[error("unreliable spectral result: excluded mass bound {excluded:.3e} exceeds {limit:.1}% of the retained sum")]
    UnreliableSpectral { excluded: f64, limit: f64 },

    /// Root-fidelity evaluation failed (non-positive matrix numerics).
    #[error("matrix square root failed: {0}")]
    MatrixSqrt(String),

    /// The scalar maximizer exhausted its iteration budget.
    #[error("optimizer did not converge within {0} iterations")]
    NonConvergence(usize),

    /// Malformed run configuration or command-line value.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Text-format parse failure (profile files, range and psf specs).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
