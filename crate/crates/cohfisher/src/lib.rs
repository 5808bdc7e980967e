//! Quantum Fisher information for partially coherent two-point superpositions.
//!
//! A pair of elementary signals (point-spread amplitudes) displaced by a
//! separation `s` can be combined into the in-phase and anti-phase
//! superpositions
//!
//! ```text
//! |Φ₁,₂⟩ = ½(|Ψ₊⟩ ± |Ψ₋⟩),   |Ψ±⟩ = exp(±iPs/2)|Ψ⟩,
//! ```
//!
//! where `P` is the transverse-momentum operator. Partially coherent rank-2
//! mixtures of Φ₁ and Φ₂ can be prepared in physically distinct ways that
//! share the same density operator but differ in their preparation rate `C`,
//! the probability of producing the state from one displaced pair. The
//! figure of merit throughout is the rate-normalized precision `C·F`, with
//! `F` the quantum Fisher information for `s`.
//!
//! The crate computes, in closed form over a small set of moment kernels:
//!
//! - the kernels `c(s) = Re⟨e^{isP}⟩`, `m(s) = Im⟨P e^{isP}⟩`,
//!   `Re⟨P² e^{isP}⟩` and `(ΔP)²` for Gaussian and sampled profiles
//!   ([`psf`]);
//! - every scalar attribute of Φ₁/Φ₂ (norms, derivatives, P-matrix elements)
//!   and the pure-channel QFIs ([`superposition`]);
//! - eigenvalues, eigenvalue derivatives and rate factors of the rank-2
//!   preparation models A, B, E, LS and TN ([`models`]);
//! - the rank-2 QFI, its eigenvalue-modulation and channel decomposition,
//!   the norm-channel Fisher information and the separation/centroid
//!   information sorting ([`fisher`]);
//! - near-optimal weights and a deterministic scalar maximizer for the
//!   rate-normalized precision ([`optimize`]).
//!
//! Everything above is cross-checked by a brute-force verification engine
//! ([`oracle`]) that assembles explicit wavefunctions and density operators
//! on a position grid and evaluates the QFI from the symmetric logarithmic
//! derivative spectrum and from Bures fidelity, with no reuse of the closed
//! forms.
//!
//! The [`sweep`] module and the `cohfisher` binary expose single-point
//! evaluation, weight and separation sweeps, the optimizer and the oracle
//! validation suite with deterministic CSV/JSON output.

pub mod config;
pub mod fisher;
pub mod models;
pub mod optimize;
pub mod oracle;
pub mod psf;
pub mod superposition;
pub mod sweep;

mod error;
mod linalg;

pub use error::{Error, Result};

/// Eigenvalues at or below this threshold are treated as a degenerate
/// (dark) channel.
pub const EPS_RANK: f64 = 1e-12;

/// Slope threshold distinguishing an analytic λ → 0 limit from a genuine
/// (dλ)²/λ divergence.
pub const EPS_SLOPE: f64 = 1e-9;
