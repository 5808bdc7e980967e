//! Elementary-signal profiles and their moment kernels.
//!
//! Every closed-form quantity downstream is built from three kernels of the
//! profile `ψ` evaluated at the separation `s`:
//!
//! ```text
//! c(s)   = Re⟨e^{isP}⟩          (dimensionless overlap)
//! m(s)   = Im⟨P e^{isP}⟩        (σ⁻¹)
//! p2c(s) = Re⟨P² e^{isP}⟩       (σ⁻²)
//! ```
//!
//! together with the momentum variance `(ΔP)² = ⟨P²⟩` (mean momentum is
//! required to vanish). The canonical Gaussian amplitude is
//! `ψ(x) = (2πσ²)^{-1/4} exp(−x²/4σ²)`, which fixes `(ΔP)² = 1/(4σ²)`;
//! sampled profiles evaluate the same kernels by quadrature over the
//! momentum density `|ψ̃(p)|²` obtained from a discrete Fourier transform.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::path::Path;

use crate::{Error, Result};

/// Tolerance for the normalization of sampled profiles, Σ|ψ|²Δx = 1.
const NORM_TOL: f64 = 1e-10;
/// Tolerance on the mean transverse momentum ⟨P⟩.
const P_MEAN_TOL: f64 = 1e-8;
/// Tolerance for the realness of ⟨e^{isP}⟩ (evenness of the momentum density).
const SYMMETRY_TOL: f64 = 1e-8;
/// Sample-count cap; keeps untrusted profile files from exhausting memory.
const MAX_SAMPLES: usize = 1 << 22;

/// The three moment kernels and the momentum variance at one separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentKernels {
    /// `Re⟨e^{isP}⟩`, dimensionless, `|c| ≤ 1`, `c(0) = 1`.
    pub c: f64,
    /// `Im⟨P e^{isP}⟩` in σ⁻¹; equals `−dc/ds`.
    pub m: f64,
    /// `Re⟨P² e^{isP}⟩` in σ⁻²; equals `−d²c/ds²`.
    pub p2c: f64,
    /// Momentum variance `(ΔP)²` in σ⁻².
    pub dp2: f64,
}

/// Kernels plus the stabilized combinations the superposition layer needs.
///
/// `anti_norm` is `(1−c)/2` evaluated without cancellation, and the two Gram
/// determinants are `‖∂Φᵢ‖²‖Φᵢ‖² − |⟨Φᵢ|∂Φᵢ⟩|²`. Computing them here, where
/// the profile representation is known, keeps the pure-channel QFI accurate
/// down to separations of 10⁻³σ where the naive difference of O(1) scalars
/// loses every significant digit.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelParts {
    pub kernels: MomentKernels,
    pub anti_norm: f64,
    pub gram_in: f64,
    pub gram_anti: f64,
}

/// An elementary signal profile: analytic Gaussian or sampled amplitude.
#[derive(Debug, Clone)]
pub enum PsfModel {
    Gaussian(GaussianPsf),
    Sampled(SampledPsf),
}

/// Analytic Gaussian profile of width `sigma`.
#[derive(Debug, Clone, Copy)]
pub struct GaussianPsf {
    sigma: f64,
}

/// Profile tabulated on a uniform position grid.
#[derive(Debug, Clone)]
pub struct SampledPsf {
    x0: f64,
    step: f64,
    amps: Vec<Complex64>,
    /// Momentum grid and density weights `|ψ̃(p_k)|²Δp` from the DFT.
    ps: Vec<f64>,
    ws: Vec<f64>,
    dp2: f64,
    /// Total odd part of the momentum density; zero for real overlaps.
    asymmetry: f64,
}

impl PsfModel {
    /// Gaussian profile of width `sigma` (position units).
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "gaussian width must be positive and finite, got {sigma}"
            )));
        }
        Ok(PsfModel::Gaussian(GaussianPsf { sigma }))
    }

    /// Sampled profile from `(position, amplitude)` pairs on a uniform grid.
    ///
    /// The amplitude must already be normalized, Σ|ψ|²Δx = 1 (trapezoidal)
    /// within 1e-10, and must have |⟨P⟩| < 1e-8.
    pub fn from_samples(samples: &[(f64, Complex64)]) -> Result<Self> {
        SampledPsf::new(samples, false).map(PsfModel::Sampled)
    }

    /// Parse a two-or-three-column profile file: position, real amplitude
    /// and optional imaginary amplitude, whitespace separated, `#` comments.
    ///
    /// The amplitude read from the file is rescaled to unit norm before
    /// validation; files therefore do not need to be pre-normalized.
    pub fn from_profile_str(text: &str) -> Result<Self> {
        let samples = parse_profile_text(text)?;
        SampledPsf::new(&samples, true).map(PsfModel::Sampled)
    }

    /// [`Self::from_profile_str`] applied to the contents of `path`.
    pub fn from_profile_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_profile_str(&text)
    }

    /// `c(s) = Re⟨e^{isP}⟩`.
    pub fn overlap(&self, s: f64) -> Result<f64> {
        Ok(self.kernels(s)?.c)
    }

    /// `m(s) = Im⟨P e^{isP}⟩` in σ⁻¹.
    pub fn momentum_im(&self, s: f64) -> Result<f64> {
        Ok(self.kernels(s)?.m)
    }

    /// `Re⟨P² e^{isP}⟩` in σ⁻².
    pub fn p2_overlap(&self, s: f64) -> Result<f64> {
        Ok(self.kernels(s)?.p2c)
    }

    /// Momentum variance `(ΔP)² = ⟨P²⟩` in σ⁻² (mean momentum is zero).
    pub fn momentum_variance(&self) -> f64 {
        match self {
            PsfModel::Gaussian(g) => 1.0 / (4.0 * g.sigma * g.sigma),
            PsfModel::Sampled(sp) => sp.dp2,
        }
    }

    /// All moment kernels at separation `s`.
    ///
    /// This is the closed-form path: it requires `s ≥ 0` and a profile with
    /// real overlap `⟨e^{isP}⟩` (an even momentum density). Profiles failing
    /// that check are rejected here but remain usable by the grid oracle.
    pub fn kernels(&self, s: f64) -> Result<MomentKernels> {
        Ok(self.kernel_parts(s)?.kernels)
    }

    pub(crate) fn kernel_parts(&self, s: f64) -> Result<KernelParts> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::OutOfRegime(format!(
                "separation must be finite and nonnegative, got {s}"
            )));
        }
        match self {
            PsfModel::Gaussian(g) => Ok(g.parts(s)),
            PsfModel::Sampled(sp) => sp.parts(s),
        }
    }

    /// Complex amplitude ψ(x); sampled profiles interpolate cubically and
    /// vanish outside their grid.
    pub fn amplitude_at(&self, x: f64) -> Complex64 {
        match self {
            PsfModel::Gaussian(g) => Complex64::new(g.amplitude(x), 0.0),
            PsfModel::Sampled(sp) => sp.interpolate(x),
        }
    }

    /// Characteristic width used by grid-resolution checks.
    pub fn width_hint(&self) -> f64 {
        match self {
            PsfModel::Gaussian(g) => g.sigma,
            PsfModel::Sampled(sp) => 0.5 / sp.dp2.sqrt(),
        }
    }

    /// Whether the closed-form path accepts this profile.
    pub fn has_real_overlap(&self) -> bool {
        match self {
            PsfModel::Gaussian(_) => true,
            PsfModel::Sampled(sp) => sp.asymmetry <= SYMMETRY_TOL,
        }
    }
}

impl GaussianPsf {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn amplitude(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 * std::f64::consts::PI * s2).powf(-0.25) * (-x * x / (4.0 * s2)).exp()
    }

    fn parts(&self, s: f64) -> KernelParts {
        let dp2 = 1.0 / (4.0 * self.sigma * self.sigma);
        let u = 0.5 * s * s * dp2;
        let c = (-u).exp();
        let kernels = MomentKernels {
            c,
            m: s * dp2 * c,
            p2c: dp2 * (1.0 - 2.0 * u) * c,
            dp2,
        };
        // (1−c)/2, (1−c²) and sinh(u)−u without subtractive cancellation.
        let anti_norm = -0.5 * f64::exp_m1(-u);
        let gram_in = dp2 * (-f64::exp_m1(-2.0 * u) + 2.0 * u * c) / 16.0;
        let gram_anti = dp2 * (2.0 * c * sinh_minus_arg(u)) / 16.0;
        KernelParts { kernels, anti_norm, gram_in, gram_anti }
    }
}

/// `sinh(u) − u`, series-evaluated for small `u` where the direct difference
/// has no accurate digits.
fn sinh_minus_arg(u: f64) -> f64 {
    if u < 0.1 {
        let u2 = u * u;
        u * u2 / 6.0 * (1.0 + u2 / 20.0 * (1.0 + u2 / 42.0 * (1.0 + u2 / 72.0)))
    } else {
        u.sinh() - u
    }
}

impl SampledPsf {
    fn new(samples: &[(f64, Complex64)], normalize: bool) -> Result<Self> {
        if samples.len() < 16 {
            return Err(Error::InvalidProfile(format!(
                "need at least 16 samples, got {}",
                samples.len()
            )));
        }
        if samples.len() > MAX_SAMPLES {
            return Err(Error::InvalidProfile(format!(
                "too many samples ({} > {MAX_SAMPLES})",
                samples.len()
            )));
        }
        let x0 = samples[0].0;
        let step = samples[1].0 - x0;
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "grid step must be positive, got {step}"
            )));
        }
        for (j, &(x, a)) in samples.iter().enumerate() {
            if !x.is_finite() || !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::InvalidProfile(format!("non-finite sample at index {j}")));
            }
            let expect = x0 + j as f64 * step;
            if (x - expect).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::InvalidProfile(format!(
                    "non-uniform grid at index {j}: position {x}, expected {expect}"
                )));
            }
        }

        let mut amps: Vec<Complex64> = samples.iter().map(|&(_, a)| a).collect();
        let trapezoid = |a: &[Complex64]| -> f64 {
            let full: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            (full - 0.5 * a[0].norm_sqr() - 0.5 * a[a.len() - 1].norm_sqr()) * step
        };
        let t = trapezoid(&amps);
        if normalize {
            if t <= 0.0 || !t.is_finite() {
                return Err(Error::InvalidProfile("profile has zero norm".into()));
            }
            let scale = 1.0 / t.sqrt();
            for a in &mut amps {
                *a *= scale;
            }
        } else if (t - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidProfile(format!(
                "profile not normalized: sum |psi|^2 dx = {t}"
            )));
        }

        let (ps, ws) = momentum_density(&amps, step);
        let n = ps.len();
        let p_mean: f64 = ps.iter().zip(&ws).map(|(p, w)| p * w).sum();
        if p_mean.abs() >= P_MEAN_TOL {
            return Err(Error::InvalidProfile(format!(
                "mean transverse momentum {p_mean:.3e} exceeds {P_MEAN_TOL:.0e}"
            )));
        }
        let dp2: f64 = ps.iter().zip(&ws).map(|(p, w)| p * p * w).sum();
        // Odd part of the momentum density; k and n−k hold opposite momenta.
        let mut asymmetry = 0.0;
        for k in 1..(n + 1) / 2 {
            asymmetry += (ws[k] - ws[n - k]).abs();
        }
        if dp2 <= 0.0 || !dp2.is_finite() {
            return Err(Error::InvalidProfile("degenerate momentum distribution".into()));
        }

        Ok(SampledPsf { x0, step, amps, ps, ws, dp2, asymmetry })
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn grid_step(&self) -> f64 {
        self.step
    }

    fn parts(&self, s: f64) -> Result<KernelParts> {
        if self.asymmetry > SYMMETRY_TOL {
            return Err(Error::RealOverlapViolation(format!(
                "momentum density odd part {:.3e} exceeds {SYMMETRY_TOL:.0e}",
                self.asymmetry
            )));
        }
        let mut c = 0.0;
        let mut m = 0.0;
        let mut p2c = 0.0;
        let mut anti = 0.0;
        // Gram accumulators: a = sin(κ)√w, b = (p/2)cos(κ)√w with κ = sp/2,
        // G_anti = ‖b‖²‖a − γb‖², γ = ⟨a,b⟩/‖b‖² (and the in-phase analogue
        // with sin and cos exchanged).
        let mut b2_anti = 0.0;
        let mut ab_anti = 0.0;
        let mut b2_in = 0.0;
        let mut ab_in = 0.0;
        for (&p, &w) in self.ps.iter().zip(&self.ws) {
            let kappa = 0.5 * s * p;
            let (sin_k, cos_k) = kappa.sin_cos();
            c += w * (2.0 * kappa).cos();
            m += w * p * (2.0 * kappa).sin();
            p2c += w * p * p * (2.0 * kappa).cos();
            anti += w * sin_k * sin_k;
            let ba = 0.5 * p * cos_k;
            b2_anti += w * ba * ba;
            ab_anti += w * sin_k * ba;
            let bi = 0.5 * p * sin_k;
            b2_in += w * bi * bi;
            ab_in += w * cos_k * bi;
        }
        let gram = |b2: f64, ab: f64, in_phase: bool| -> f64 {
            if b2 <= 0.0 {
                return 0.0;
            }
            let gamma = ab / b2;
            let mut r2 = 0.0;
            for (&p, &w) in self.ps.iter().zip(&self.ws) {
                let kappa = 0.5 * s * p;
                let (sin_k, cos_k) = kappa.sin_cos();
                let r = if in_phase {
                    cos_k - gamma * 0.5 * p * sin_k
                } else {
                    sin_k - gamma * 0.5 * p * cos_k
                };
                r2 += w * r * r;
            }
            b2 * r2
        };
        let gram_in = gram(b2_in, ab_in, true);
        let gram_anti = gram(b2_anti, ab_anti, false);
        Ok(KernelParts {
            kernels: MomentKernels { c, m, p2c, dp2: self.dp2 },
            anti_norm: anti,
            gram_in,
            gram_anti,
        })
    }

    /// Four-point Lagrange interpolation of the amplitude; zero outside.
    fn interpolate(&self, x: f64) -> Complex64 {
        let n = self.amps.len();
        let t = (x - self.x0) / self.step;
        if t < 0.0 || t > (n - 1) as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let j = (t.floor() as usize).clamp(1, n - 3);
        let u = t - j as f64;
        let wm1 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w1 = -u * (u + 1.0) * (u - 2.0) / 2.0;
        let w2 = u * (u + 1.0) * (u - 1.0) / 6.0;
        self.amps[j - 1] * wm1 + self.amps[j] * w0 + self.amps[j + 1] * w1 + self.amps[j + 2] * w2
    }
}

/// Momentum grid and density weights from the DFT of the amplitude.
///
/// Momentum spacing is 2π/(NΔx) and `w_k = |ψ̃(p_k)|²Δp = |F_k|²Δx/N`.
fn momentum_density(amps: &[Complex64], step: f64) -> (Vec<f64>, Vec<f64>) {
    let n = amps.len();
    let mut buf = amps.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dp = 2.0 * std::f64::consts::PI / (n as f64 * step);
    let scale = step / n as f64;
    let mut ps = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for (k, z) in buf.iter().enumerate() {
        let k_signed = if k <= n / 2 { k as isize } else { k as isize - n as isize };
        ps.push(k_signed as f64 * dp);
        ws.push(z.norm_sqr() * scale);
    }
    (ps, ws)
}

/// Parse the two-or-three-column profile text format.
pub fn parse_profile_text(text: &str) -> Result<Vec<(f64, Complex64)>> {
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 or 3 columns, found {}", toks.len()),
            });
        }
        let mut nums = [0.0f64; 3];
        for (slot, tok) in nums.iter_mut().zip(&toks) {
            *slot = tok.parse::<f64>().map_err(|e| Error::Parse {
                line: idx + 1,
                message: format!("bad number {tok:?}: {e}"),
            })?;
        }
        if samples.len() >= MAX_SAMPLES {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("too many samples (limit {MAX_SAMPLES})"),
            });
        }
        samples.push((nums[0], Complex64::new(nums[1], nums[2])));
    }
    Ok(samples)
}
