//! Scalar attributes of the in-phase and anti-phase superpositions.
//!
//! With `Ψ± = exp(±iPs/2)Ψ` and `Φ₁,₂ = ½(Ψ₊ ± Ψ₋)` (the φ = 0 convention;
//! profiles with a non-real overlap are rejected upstream), every quantity
//! the models and Fisher functionals need reduces to the moment kernels:
//!
//! ```text
//! ‖Φ₁‖² = (1+c)/2      ‖Φ₂‖² = (1−c)/2
//! d‖Φ₁‖²/ds = −m/2     d‖Φ₂‖²/ds = +m/2
//! ⟨Φ₁|P²|Φ₁⟩ = ((ΔP)²+p2c)/2     ⟨Φ₂|P²|Φ₂⟩ = ((ΔP)²−p2c)/2
//! ⟨Φ₁|P|Φ₂⟩ = i·m/2    ∂Φ₁ = (iP/2)Φ₂    ∂Φ₂ = (iP/2)Φ₁
//! ```

use crate::psf::PsfModel;
use crate::{Error, Result, EPS_RANK};

/// Which superposition channel a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Channel 1, the symmetric combination Φ₁.
    InPhase,
    /// Channel 2, the antisymmetric combination Φ₂.
    AntiPhase,
}

impl Channel {
    pub const BOTH: [Channel; 2] = [Channel::InPhase, Channel::AntiPhase];

    pub fn index(self) -> usize {
        match self {
            Channel::InPhase => 0,
            Channel::AntiPhase => 1,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Channel::InPhase => write!(f, "in-phase"),
            Channel::AntiPhase => write!(f, "anti-phase"),
        }
    }
}

/// All scalar building blocks of Φ₁/Φ₂ at one separation.
#[derive(Debug, Clone, Copy)]
pub struct SuperpositionScalars {
    /// Separation in σ.
    pub s: f64,
    /// ‖Φ₁‖², ‖Φ₂‖²; they partition unity exactly.
    pub n1: f64,
    pub n2: f64,
    /// d‖Φᵢ‖²/ds in σ⁻¹.
    pub dn1: f64,
    pub dn2: f64,
    /// ⟨Φᵢ|P²|Φᵢ⟩ in σ⁻² (unnormalized kets); they sum to (ΔP)².
    pub p2_11: f64,
    pub p2_22: f64,
    /// Im⟨Φ₁|P|Φ₂⟩ = m/2 in σ⁻¹ (the element itself is purely imaginary).
    pub cross_p_im: f64,
    /// Momentum variance (ΔP)² of the underlying profile, in σ⁻².
    pub dp2: f64,
    /// Gram determinants ‖∂Φᵢ‖²‖Φᵢ‖² − |⟨Φᵢ|∂Φᵢ⟩|², precomputed by the
    /// profile layer in cancellation-free form.
    gram: [f64; 2],
}

impl SuperpositionScalars {
    /// Evaluate every scalar attribute of Φ₁/Φ₂ at separation `s`.
    pub fn build(psf: &PsfModel, s: f64) -> Result<Self> {
        let parts = psf.kernel_parts(s)?;
        let k = parts.kernels;
        let n2 = parts.anti_norm;
        let n1 = 1.0 - n2;
        let p2_22 = 0.5 * (k.dp2 - k.p2c);
        let p2_11 = k.dp2 - p2_22;
        Ok(SuperpositionScalars {
            s,
            n1,
            n2,
            dn1: -0.5 * k.m,
            dn2: 0.5 * k.m,
            p2_11,
            p2_22,
            cross_p_im: 0.5 * k.m,
            dp2: k.dp2,
            gram: [parts.gram_in, parts.gram_anti],
        })
    }

    /// Overlap kernel `c = Re⟨e^{isP}⟩` recovered from the norms.
    pub fn c(&self) -> f64 {
        self.n1 - self.n2
    }

    /// Kernel `m = Im⟨P e^{isP}⟩` recovered from the norm derivative.
    pub fn m(&self) -> f64 {
        2.0 * self.dn2
    }

    /// ‖Φᵢ‖² for the requested channel.
    pub fn norm(&self, channel: Channel) -> f64 {
        match channel {
            Channel::InPhase => self.n1,
            Channel::AntiPhase => self.n2,
        }
    }

    /// d‖Φᵢ‖²/ds for the requested channel.
    pub fn norm_derivative(&self, channel: Channel) -> f64 {
        match channel {
            Channel::InPhase => self.dn1,
            Channel::AntiPhase => self.dn2,
        }
    }

    /// ⟨Φᵢ|P²|Φᵢ⟩ for the requested channel (unnormalized kets).
    pub fn p2(&self, channel: Channel) -> f64 {
        match channel {
            Channel::InPhase => self.p2_11,
            Channel::AntiPhase => self.p2_22,
        }
    }

    /// `‖∂Φᵢ‖²` (unnormalized); ∂Φ₁ = (iP/2)Φ₂ and ∂Φ₂ = (iP/2)Φ₁.
    pub fn dphi_norm2(&self, channel: Channel) -> f64 {
        match channel {
            Channel::InPhase => 0.25 * self.p2_22,
            Channel::AntiPhase => 0.25 * self.p2_11,
        }
    }

    /// `⟨Φᵢ|∂Φᵢ⟩`; real under the φ = 0, real-overlap convention.
    pub fn phi_dphi(&self, channel: Channel) -> f64 {
        match channel {
            Channel::InPhase => -0.5 * self.cross_p_im,
            Channel::AntiPhase => 0.5 * self.cross_p_im,
        }
    }

    /// QFI of the normalized pure state Φᵢ/‖Φᵢ‖:
    /// `Fᵢ = 4[‖∂Φᵢ‖²/‖Φᵢ‖² − |⟨Φᵢ|∂Φᵢ⟩|²/‖Φᵢ‖⁴]`.
    ///
    /// Evaluated as `4·Gᵢ/‖Φᵢ‖⁴` with the precomputed Gram determinant
    /// `Gᵢ = ‖∂Φᵢ‖²‖Φᵢ‖² − |⟨Φᵢ|∂Φᵢ⟩|²`, which is the same expression
    /// without the catastrophic cancellation at small separations.
    pub fn qfi_pure(&self, channel: Channel) -> Result<f64> {
        let n = self.norm(channel);
        if n <= EPS_RANK {
            return Err(Error::DegenerateChannel(format!(
                "{channel} channel norm {n:.3e} at s = {}; no normalized state exists",
                self.s
            )));
        }
        Ok(4.0 * self.gram[channel.index()] / (n * n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss() -> PsfModel {
        PsfModel::gaussian(1.0).unwrap()
    }

    #[test]
    fn zero_separation_degenerates() {
        let sc = SuperpositionScalars::build(&gauss(), 0.0).unwrap();
        assert_eq!(sc.n1, 1.0);
        assert_eq!(sc.n2, 0.0);
        assert_eq!(sc.dn1, 0.0);
        assert_eq!(sc.dn2, 0.0);
        assert!(sc.qfi_pure(Channel::AntiPhase).is_err());
        assert_eq!(sc.qfi_pure(Channel::InPhase).unwrap(), 0.0);
    }

    #[test]
    fn partition_and_conservation_exact() {
        let psf = gauss();
        for i in 0..=400 {
            let s = i as f64 * 0.01;
            let sc = SuperpositionScalars::build(&psf, s).unwrap();
            assert_eq!(sc.n1 + sc.n2, 1.0, "partition at s={s}");
            assert_eq!(sc.p2_11 + sc.p2_22, sc.dp2, "P^2 conservation at s={s}");
            assert!(sc.n1 >= 0.0 && sc.n2 >= 0.0);
        }
    }

    #[test]
    fn norm_derivative_identity_bitwise() {
        let sc = SuperpositionScalars::build(&gauss(), 0.73).unwrap();
        assert_eq!(sc.dn1, 2.0 * sc.phi_dphi(Channel::InPhase));
        assert_eq!(sc.dn2, 2.0 * sc.phi_dphi(Channel::AntiPhase));
        assert_eq!(sc.dn1, -2.0 * (sc.m() / 4.0));
    }

    #[test]
    fn qfi_pure_quadratic_scaling_ratio() {
        // F(s)/s² must approach a constant; ratio across a decade within 2%.
        let psf = gauss();
        for channel in Channel::BOTH {
            let f = |s: f64| {
                SuperpositionScalars::build(&psf, s)
                    .unwrap()
                    .qfi_pure(channel)
                    .unwrap()
            };
            let r2 = f(1e-2) / 1e-4;
            let r3 = f(1e-3) / 1e-6;
            assert!(
                (r2 / r3 - 1.0).abs() < 0.02,
                "{channel}: F/s^2 ratio {r2} vs {r3}"
            );
        }
    }

    #[test]
    fn qfi_pure_small_s_constants() {
        // Leading-order F₁/s² → (ΔP)⁴/2 and F₂/s² → (ΔP)⁴/6.
        let sc = SuperpositionScalars::build(&gauss(), 1e-3).unwrap();
        let f1 = sc.qfi_pure(Channel::InPhase).unwrap();
        let f2 = sc.qfi_pure(Channel::AntiPhase).unwrap();
        assert_relative_eq!(f1 / 1e-6, 0.25 * 0.25 / 2.0, max_relative = 1e-4);
        assert_relative_eq!(f2 / 1e-6, 0.25 * 0.25 / 6.0, max_relative = 1e-4);
    }

    #[test]
    fn channel_accessors_are_consistent() {
        let sc = SuperpositionScalars::build(&gauss(), 0.5).unwrap();
        assert_eq!(sc.norm(Channel::InPhase), sc.n1);
        assert_eq!(sc.p2(Channel::AntiPhase), sc.p2_22);
        assert_eq!(sc.dphi_norm2(Channel::InPhase), 0.25 * sc.p2_22);
        assert_relative_eq!(sc.c(), 0.9692332344763441, max_relative = 1e-12);
    }
}
