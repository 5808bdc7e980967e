//! Fisher-information functionals of the rank-2 partially coherent states.
//!
//! The rank-2 QFI splits into an eigenvalue-modulation term and a convex
//! combination of pure-channel terms,
//!
//! ```text
//! F = Σᵢ (dλᵢ/ds)²/λᵢ + 4 Σᵢ λᵢ [‖∂Φᵢ‖²/‖Φᵢ‖² − |⟨Φᵢ|∂Φᵢ⟩|²/‖Φᵢ‖⁴],
//! ```
//!
//! and the headline comparisons always quote the rate-normalized precision
//! `C·F`. The modulation term for models B/E has the closed form
//! `F_λ = m²/(1−c²) · p(1−p)/C²`, which stays analytic in the λ → 0,
//! dλ → 0 corner where the generic quotient would be 0/0.

use crate::models::{ModelTag, RankTwoDescriptor};
use crate::superposition::{Channel, SuperpositionScalars};
use crate::{Error, Result, EPS_RANK, EPS_SLOPE};

/// QFI and its decomposition for one prepared state.
#[derive(Debug, Clone, Copy)]
pub struct FisherReport {
    pub model: ModelTag,
    /// Rank-2 quantum Fisher information in σ⁻².
    pub qfi: f64,
    /// Eigenvalue-modulation part Σ(dλᵢ)²/λᵢ in σ⁻².
    pub f_lambda: f64,
    /// Weighted pure-channel parts λᵢ·Fᵢ in σ⁻².
    pub f_channels: [f64; 2],
    /// Preparation-rate factor of the model (C, or C_E for model E).
    pub rate: f64,
    /// Rate-normalized precision C·F in σ⁻².
    pub precision: f64,
}

/// Rank-2 QFI of a prepared state, decomposed per the formula above.
///
/// Degenerate (flagged) descriptors drop the dead channel entirely; an
/// eigenvalue below the rank threshold whose derivative is not also
/// negligible is reported as an indeterminate divergence, the dark-channel
/// case in which the QFI is unbounded.
pub fn qfi_rank2(desc: &RankTwoDescriptor) -> Result<FisherReport> {
    let f_lambda = lambda_term(desc)?;
    let mut f_channels = [0.0; 2];
    for channel in Channel::BOTH {
        let lam = desc.lambda_for(channel);
        if lam <= EPS_RANK {
            continue;
        }
        f_channels[channel.index()] = lam * desc.scalars.qfi_pure(channel)?;
    }
    let qfi = f_lambda + f_channels[0] + f_channels[1];
    Ok(FisherReport {
        model: desc.model,
        qfi,
        f_lambda,
        f_channels,
        rate: desc.rate,
        precision: desc.rate * qfi,
    })
}

fn lambda_term(desc: &RankTwoDescriptor) -> Result<f64> {
    match desc.model {
        // Parameter-independent eigenvalues.
        ModelTag::A => Ok(0.0),
        // Closed form wherever both eigenvalues are alive; the flagged
        // degenerate limits have dλ = 0 and fall through to the guard.
        ModelTag::B | ModelTag::E if desc.degenerate.is_none() => fisher_lambda(desc),
        _ => {
            let mut acc = 0.0;
            for channel in Channel::BOTH {
                let lam = desc.lambda_for(channel);
                let dlam = desc.dlambda_for(channel);
                if lam > EPS_RANK {
                    acc += dlam * dlam / lam;
                } else if dlam.abs() > EPS_SLOPE {
                    return Err(Error::IndeterminateDivergence { lambda: lam, slope: dlam });
                }
            }
            Ok(acc)
        }
    }
}

/// Closed-form eigenvalue-modulation term for models B and E:
/// `F_λ = m²/(1−c²) · p(1−p)/(‖Φ₂‖² + cp)²` with `1−c² = 4‖Φ₁‖²‖Φ₂‖²`.
pub fn fisher_lambda(desc: &RankTwoDescriptor) -> Result<f64> {
    if !matches!(desc.model, ModelTag::B | ModelTag::E) {
        return Err(Error::Contract(format!(
            "fisher_lambda applies to models B and E, got {}",
            desc.model
        )));
    }
    let p = desc.weight.prior_value()?;
    let sc = &desc.scalars;
    if sc.n2 <= EPS_RANK || !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRegime(format!(
            "fisher_lambda needs s > 0 and p in (0,1); got s = {}, p = {p}",
            sc.s
        )));
    }
    let m = sc.m();
    let c_rate = p * sc.n1 + (1.0 - p) * sc.n2;
    Ok(m * m / (4.0 * sc.n1 * sc.n2) * p * (1.0 - p) / (c_rate * c_rate))
}

/// Total Fisher information carried by the unnormalized state Φᵢ,
/// `F_total = 4‖∂Φᵢ‖² + [⟨Φᵢ|∂Φᵢ⟩ − ⟨∂Φᵢ|Φᵢ⟩]²/‖Φᵢ‖²`.
///
/// Under the real-overlap convention ⟨Φᵢ|∂Φᵢ⟩ is real, the bracket
/// vanishes, and the value reduces to ⟨Φ_{3−i}|P²|Φ_{3−i}⟩. It decomposes
/// exactly as `(∂C)²/C + C·F_n` with `C = ‖Φᵢ‖²`.
pub fn fisher_total_unnormalized(scalars: &SuperpositionScalars, channel: Channel) -> Result<f64> {
    let n = scalars.norm(channel);
    if n <= EPS_RANK {
        return Err(Error::DegenerateChannel(format!(
            "{channel} channel norm vanishes at s = {}",
            scalars.s
        )));
    }
    Ok(4.0 * scalars.dphi_norm2(channel))
}

/// Norm-channel (classical) Fisher information `F_C = (d‖Φᵢ‖²/ds)²/‖Φᵢ‖²`.
pub fn fisher_norm_channel(scalars: &SuperpositionScalars, channel: Channel) -> Result<f64> {
    let n = scalars.norm(channel);
    let dn = scalars.norm_derivative(channel);
    if n <= EPS_RANK {
        if dn == 0.0 {
            // dn₁ = 0 at s = 0 gives a clean zero for the in-phase channel.
            return Ok(0.0);
        }
        return Err(Error::DegenerateChannel(format!(
            "{channel} channel norm vanishes at s = {}",
            scalars.s
        )));
    }
    Ok(dn * dn / n)
}

/// Separation-information sorting: `(F₁, F₂) = (⟨Φ₂|P²|Φ₂⟩, ⟨Φ₁|P²|Φ₁⟩)`,
/// the total separation information carried by the in-phase and anti-phase
/// channels (note the interchange of indices). They sum to `(ΔP)²`.
pub fn sorting_separation(scalars: &SuperpositionScalars) -> (f64, f64) {
    (scalars.p2_22, scalars.p2_11)
}

/// Centroid-information sorting: `(4⟨Φ₁|P²|Φ₁⟩, 4⟨Φ₂|P²|Φ₂⟩)`; the sum is
/// `4(ΔP)²` and the in-phase channel dominates at small separation.
pub fn sorting_centroid(scalars: &SuperpositionScalars) -> (f64, f64) {
    (4.0 * scalars.p2_11, 4.0 * scalars.p2_22)
}

/// Cramér-Rao variance bound `1/(n·C·F)` for `n` detected pairs.
pub fn cr_bound(report: &FisherReport, repetitions: u64) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::Config("repetition count must be at least 1".into()));
    }
    if report.precision <= 0.0 {
        return Err(Error::OutOfRegime(
            "zero rate-normalized precision: estimator variance is unbounded".into(),
        ));
    }
    Ok(1.0 / (repetitions as f64 * report.precision))
}
