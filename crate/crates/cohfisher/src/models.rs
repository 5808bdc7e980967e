//! Rank-2 descriptors for the preparation models.
//!
//! Each constructor turns the superposition scalars and a weight parameter
//! into the eigenvalues λᵢ of the prepared density operator, their
//! closed-form derivatives dλᵢ/ds, and the preparation-rate factor `C`:
//!
//! - **A** mixes normalized superpositions with fixed weights; λᵢ = pᵢ are
//!   parameter independent and `C = p₁‖Φ₁‖² + p₂‖Φ₂‖²`.
//! - **B** mixes the unnormalized projectors and renormalizes by the trace;
//!   λᵢ = pᵢ‖Φᵢ‖²/C with the same `C` as model A.
//! - **E** prepares the model-B state with separation-dependent weights,
//!   leaving the eigensystem identical to B but boosting the rate to
//!   `C_E = [p₁‖Φ₁‖⁴ + p₂‖Φ₂‖⁴]/C`.
//! - **LS** blends a coherent Φ₁ branch with the incoherent mixture.
//! - **TN** parameterizes partial coherence by a degree `|γ|`.
//!
//! Eigenvalue derivatives are closed-form quotient rules throughout; finite
//! differences are reserved for the verification oracle.

use crate::superposition::{Channel, SuperpositionScalars};
use crate::{Error, Result, EPS_RANK};

/// Preparation-model tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ModelTag {
    A,
    B,
    E,
    #[serde(rename = "LS")]
    Ls,
    #[serde(rename = "TN")]
    Tn,
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelTag::A => write!(f, "A"),
            ModelTag::B => write!(f, "B"),
            ModelTag::E => write!(f, "E"),
            ModelTag::Ls => write!(f, "LS"),
            ModelTag::Tn => write!(f, "TN"),
        }
    }
}

impl std::str::FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(ModelTag::A),
            "B" => Ok(ModelTag::B),
            "E" => Ok(ModelTag::E),
            "LS" => Ok(ModelTag::Ls),
            "TN" => Ok(ModelTag::Tn),
            other => Err(Error::Config(format!(
                "unknown model {other:?}; expected A, B, E, LS or TN"
            ))),
        }
    }
}

/// Weight parameter of a preparation: a prior weight `p` for models A, B, E
/// and LS, or a degree of coherence for model TN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Prior { p: f64 },
    Coherence { magnitude: f64, phase: f64 },
}

impl WeightSpec {
    /// Prior weight of the in-phase branch, `p ∈ [0, 1]`.
    pub fn prior(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("weight p must lie in [0,1], got {p}")));
        }
        Ok(WeightSpec::Prior { p })
    }

    /// Degree of coherence `γ = |γ|e^{−iφ}` with `|γ| ∈ [0, 1]`.
    pub fn coherence(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || !(0.0..=1.0).contains(&magnitude) {
            return Err(Error::Config(format!(
                "coherence magnitude must lie in [0,1], got {magnitude}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::Config("coherence phase must be finite".into()));
        }
        Ok(WeightSpec::Coherence { magnitude, phase })
    }

    pub fn prior_value(&self) -> Result<f64> {
        match self {
            WeightSpec::Prior { p } => Ok(*p),
            WeightSpec::Coherence { .. } => Err(Error::Contract(
                "model requires a prior weight p, got a coherence degree".into(),
            )),
        }
    }

    pub fn coherence_value(&self) -> Result<(f64, f64)> {
        match self {
            WeightSpec::Coherence { magnitude, phase } => Ok((*magnitude, *phase)),
            WeightSpec::Prior { .. } => Err(Error::Contract(
                "model TN requires a coherence degree, got a prior weight".into(),
            )),
        }
    }

    /// The scalar recorded in sweep output: `p` or `|γ|`.
    pub fn value(&self) -> f64 {
        match self {
            WeightSpec::Prior { p } => *p,
            WeightSpec::Coherence { magnitude, .. } => *magnitude,
        }
    }
}

/// Eigenvalues, eigenvalue derivatives and rate factor of a rank-2
/// partially coherent state.
#[derive(Debug, Clone)]
pub struct RankTwoDescriptor {
    pub model: ModelTag,
    /// Eigenvalues (λ₁, λ₂) of the prepared density operator; sum to one.
    pub lambda: [f64; 2],
    /// dλᵢ/ds in σ⁻¹; sum to zero.
    pub dlambda: [f64; 2],
    /// Preparation-rate factor of this model (C, or C_E for model E).
    pub rate: f64,
    /// dC/ds in σ⁻¹.
    pub drate: f64,
    /// The weight parameter the descriptor was built from.
    pub weight: WeightSpec,
    pub scalars: SuperpositionScalars,
    /// Set when an eigenvalue sits at or below the rank threshold; names the
    /// dead channel.
    pub degenerate: Option<Channel>,
}

impl RankTwoDescriptor {
    pub fn lambda_for(&self, channel: Channel) -> f64 {
        self.lambda[channel.index()]
    }

    pub fn dlambda_for(&self, channel: Channel) -> f64 {
        self.dlambda[channel.index()]
    }

    /// The rate C = p‖Φ₁‖² + (1−p)‖Φ₂‖² shared by models A, B and E, where
    /// it applies; equals `rate` except for model E.
    pub fn base_rate(&self) -> Option<f64> {
        match self.model {
            ModelTag::A | ModelTag::B => Some(self.rate),
            ModelTag::E => {
                let p = self.weight.value();
                Some(p * self.scalars.n1 + (1.0 - p) * self.scalars.n2)
            }
            ModelTag::Ls | ModelTag::Tn => None,
        }
    }

    fn detect_degeneracy(mut self) -> Self {
        self.degenerate = if self.lambda[0] <= EPS_RANK {
            Some(Channel::InPhase)
        } else if self.lambda[1] <= EPS_RANK {
            Some(Channel::AntiPhase)
        } else {
            None
        };
        self
    }
}

/// Model A: mixture of normalized coherent superpositions with fixed
/// weights; λᵢ = pᵢ, `C = p‖Φ₁‖² + (1−p)‖Φ₂‖²`.
pub fn model_a(scalars: &SuperpositionScalars, weights: &WeightSpec) -> Result<RankTwoDescriptor> {
    let p = weights.prior_value()?;
    // Interior weights need both normalized branches to exist.
    if p > 0.0 && p < 1.0 && (scalars.n1 <= EPS_RANK || scalars.n2 <= EPS_RANK) {
        return Err(Error::DegenerateChannel(format!(
            "model A with p = {p} weights a zero-norm channel at s = {}",
            scalars.s
        )));
    }
    let rate = p * scalars.n1 + (1.0 - p) * scalars.n2;
    let drate = p * scalars.dn1 + (1.0 - p) * scalars.dn2;
    Ok(RankTwoDescriptor {
        model: ModelTag::A,
        lambda: [p, 1.0 - p],
        dlambda: [0.0, 0.0],
        rate,
        drate,
        weight: *weights,
        scalars: *scalars,
        degenerate: None,
    }
    .detect_degeneracy())
}

/// Model B: trace-renormalized mixture of the unnormalized projectors;
/// λ₁ = p‖Φ₁‖²/C, λ₂ = (1−p)‖Φ₂‖²/C with the same rate C as model A.
pub fn model_b(scalars: &SuperpositionScalars, weights: &WeightSpec) -> Result<RankTwoDescriptor> {
    let p = weights.prior_value()?;
    let (lambda, dlambda, rate, drate) = b_eigensystem(scalars, p)?;
    Ok(RankTwoDescriptor {
        model: ModelTag::B,
        lambda,
        dlambda,
        rate,
        drate,
        weight: *weights,
        scalars: *scalars,
        degenerate: None,
    }
    .detect_degeneracy())
}

/// Model E: the model-B state prepared with separation-dependent weights.
/// Identical eigensystem to model B; the rate becomes
/// `C_E = [p‖Φ₁‖⁴ + (1−p)‖Φ₂‖⁴]/C`.
pub fn model_e(scalars: &SuperpositionScalars, weights: &WeightSpec) -> Result<RankTwoDescriptor> {
    let p = weights.prior_value()?;
    let (lambda, dlambda, c, dc) = b_eigensystem(scalars, p)?;
    let q = 1.0 - p;
    let numer = p * scalars.n1 * scalars.n1 + q * scalars.n2 * scalars.n2;
    let dnumer = 2.0 * (p * scalars.n1 * scalars.dn1 + q * scalars.n2 * scalars.dn2);
    let rate = numer / c;
    let drate = (dnumer * c - numer * dc) / (c * c);
    Ok(RankTwoDescriptor {
        model: ModelTag::E,
        lambda,
        dlambda,
        rate,
        drate,
        weight: *weights,
        scalars: *scalars,
        degenerate: None,
    }
    .detect_degeneracy())
}

fn b_eigensystem(
    scalars: &SuperpositionScalars,
    p: f64,
) -> Result<([f64; 2], [f64; 2], f64, f64)> {
    let q = 1.0 - p;
    let c = p * scalars.n1 + q * scalars.n2;
    if c <= EPS_RANK {
        return Err(Error::DegenerateChannel(format!(
            "model B trace vanishes at s = {} with p = {p}",
            scalars.s
        )));
    }
    let dc = p * scalars.dn1 + q * scalars.dn2;
    let lambda = [p * scalars.n1 / c, q * scalars.n2 / c];
    let dlambda = [
        p * (scalars.dn1 * c - scalars.n1 * dc) / (c * c),
        q * (scalars.dn2 * c - scalars.n2 * dc) / (c * c),
    ];
    Ok((lambda, dlambda, c, dc))
}

/// Larson-Saleh blend of a coherent Φ₁ branch (weight p) with the
/// incoherent mixture: λ₁ = p + (1−p)‖Φ₁‖², λ₂ = (1−p)‖Φ₂‖².
///
/// The coherent branch is prepared at rate ‖Φ₁‖² and the incoherent branch
/// at rate one, so `C = p‖Φ₁‖² + (1−p)`.
pub fn model_ls(scalars: &SuperpositionScalars, weights: &WeightSpec) -> Result<RankTwoDescriptor> {
    let p = weights.prior_value()?;
    if scalars.n1 <= EPS_RANK {
        return Err(Error::DegenerateChannel(format!(
            "model LS coherent branch has zero norm at s = {}",
            scalars.s
        )));
    }
    let q = 1.0 - p;
    Ok(RankTwoDescriptor {
        model: ModelTag::Ls,
        lambda: [p + q * scalars.n1, q * scalars.n2],
        dlambda: [q * scalars.dn1, q * scalars.dn2],
        rate: p * scalars.n1 + q,
        drate: p * scalars.dn1,
        weight: *weights,
        scalars: *scalars,
        degenerate: None,
    }
    .detect_degeneracy())
}

/// Tsang-Nair state with degree of coherence γ, reduced to the Φ basis:
/// unnormalized weights (2−|γ|) on Φ₁ and 2(1−|γ|) on Φ₂, normalized by the
/// trace `N₀⁻¹ = (2−|γ|)‖Φ₁‖² + 2(1−|γ|)‖Φ₂‖²` (algebraically equal to
/// 2 − |γ| − |γ|‖Φ₂‖²). The closed-form path requires the phase of γ to be
/// zero; the state carries no preparation story, so its rate is one.
pub fn model_tn(scalars: &SuperpositionScalars, weights: &WeightSpec) -> Result<RankTwoDescriptor> {
    let (magnitude, phase) = weights.coherence_value()?;
    if phase != 0.0 {
        return Err(Error::Contract(format!(
            "model TN closed form requires gamma phase 0, got {phase}; use the oracle for general phases"
        )));
    }
    let w1 = 2.0 - magnitude;
    let w2 = 2.0 * (1.0 - magnitude);
    let trace = w1 * scalars.n1 + w2 * scalars.n2;
    if trace <= EPS_RANK {
        return Err(Error::DegenerateChannel("model TN trace vanishes".into()));
    }
    let dtrace = w1 * scalars.dn1 + w2 * scalars.dn2;
    let lambda = [w1 * scalars.n1 / trace, w2 * scalars.n2 / trace];
    let dlambda = [
        w1 * (scalars.dn1 * trace - scalars.n1 * dtrace) / (trace * trace),
        w2 * (scalars.dn2 * trace - scalars.n2 * dtrace) / (trace * trace),
    ];
    Ok(RankTwoDescriptor {
        model: ModelTag::Tn,
        lambda,
        dlambda,
        rate: 1.0,
        drate: 0.0,
        weight: *weights,
        scalars: *scalars,
        degenerate: None,
    }
    .detect_degeneracy())
}

/// Dispatch on a model tag.
pub fn build_descriptor(
    model: ModelTag,
    scalars: &SuperpositionScalars,
    weights: &WeightSpec,
) -> Result<RankTwoDescriptor> {
    match model {
        ModelTag::A => model_a(scalars, weights),
        ModelTag::B => model_b(scalars, weights),
        ModelTag::E => model_e(scalars, weights),
        ModelTag::Ls => model_ls(scalars, weights),
        ModelTag::Tn => model_tn(scalars, weights),
    }
}
