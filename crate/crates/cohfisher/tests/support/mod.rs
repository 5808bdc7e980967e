//! Shared brute-force reference machinery for the integration tests.
//!
//! Everything here is deliberately primitive: plain Simpson quadrature over
//! an analytic momentum density and plain rectangle sums over explicitly
//! tabulated position wavefunctions. None of it calls into the closed-form
//! code paths it is used to check.

#![allow(dead_code)]

use num_complex::Complex64;

/// Momentum density of the canonical Gaussian profile of width `sigma`,
/// `|ψ̃(p)|² = √(2σ²/π) · exp(−2σ²p²)`, normalized to ∫|ψ̃|²dp = 1.
pub fn gaussian_momentum_density(sigma: f64) -> impl Fn(f64) -> f64 {
    let a = (2.0 * sigma * sigma / std::f64::consts::PI).sqrt();
    move |p: f64| a * (-2.0 * sigma * sigma * p * p).exp()
}

/// Simpson quadrature of `f` on `[lo, hi]` with `n` panels (`n` even).
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    assert!(n % 2 == 0 && n >= 2);
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

/// Moment kernels of a Gaussian profile obtained purely by quadrature of the
/// analytic momentum density: `c`, `m`, `p2c`, `(ΔP)²`.
pub struct QuadKernels {
    pub c: f64,
    pub m: f64,
    pub p2c: f64,
    pub dp2: f64,
}

pub fn quad_kernels(sigma: f64, s: f64) -> QuadKernels {
    let w = gaussian_momentum_density(sigma);
    let half = 30.0 / (2.0 * sigma); // ±60 momentum standard deviations
    let n = 40_000;
    QuadKernels {
        c: simpson(|p| w(p) * (s * p).cos(), -half, half, n),
        m: simpson(|p| w(p) * p * (s * p).sin(), -half, half, n),
        p2c: simpson(|p| w(p) * p * p * (s * p).cos(), -half, half, n),
        dp2: simpson(|p| w(p) * p * p, -half, half, n),
    }
}

/// A uniform position grid and the two displaced Gaussian amplitudes and
/// their in-/anti-phase combinations, tabulated explicitly.
pub struct GridPhis {
    pub step: f64,
    pub xs: Vec<f64>,
    pub phi1: Vec<Complex64>,
    pub phi2: Vec<Complex64>,
    /// P|Φ₁⟩ and P|Φ₂⟩ tabulated from the analytic derivative of the
    /// displaced Gaussians (exact, no finite differencing).
    pub p_phi1: Vec<Complex64>,
    pub p_phi2: Vec<Complex64>,
}

/// Canonical Gaussian amplitude `ψ(x) = (2πσ²)^{-1/4} exp(−x²/4σ²)`.
pub fn gaussian_amplitude(sigma: f64, x: f64) -> f64 {
    (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25)
        * (-x * x / (4.0 * sigma * sigma)).exp()
}

pub fn grid_phis(sigma: f64, s: f64, extent: f64, n: usize) -> GridPhis {
    let step = 2.0 * extent / n as f64;
    let xs: Vec<f64> = (0..n).map(|j| -extent + (j as f64 + 0.5) * step).collect();
    let mut phi1 = Vec::with_capacity(n);
    let mut phi2 = Vec::with_capacity(n);
    let mut p_phi1 = Vec::with_capacity(n);
    let mut p_phi2 = Vec::with_capacity(n);
    let i = Complex64::new(0.0, 1.0);
    for &x in &xs {
        // Ψ± = exp(±iPs/2)ψ, i.e. Ψ±(x) = ψ(x ± s/2).
        let plus = gaussian_amplitude(sigma, x + s / 2.0);
        let minus = gaussian_amplitude(sigma, x - s / 2.0);
        // Pψ(x−a) = −i ψ'(x−a) = i (x−a)/(2σ²) ψ(x−a)
        let p_plus = i * ((x + s / 2.0) / (2.0 * sigma * sigma)) * plus;
        let p_minus = i * ((x - s / 2.0) / (2.0 * sigma * sigma)) * minus;
        phi1.push(Complex64::new(0.5 * (plus + minus), 0.0));
        phi2.push(Complex64::new(0.5 * (plus - minus), 0.0));
        p_phi1.push(0.5 * (p_plus + p_minus));
        p_phi2.push(0.5 * (p_plus - p_minus));
    }
    GridPhis { step, xs, phi1, phi2, p_phi1, p_phi2 }
}

impl GridPhis {
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, y) in a.iter().zip(b.iter()) {
            acc += x.conj() * y;
        }
        acc * self.step
    }

    pub fn norm2(&self, a: &[Complex64]) -> f64 {
        self.inner(a, a).re
    }

    /// Apply P = −i d/dx by central differences on the grid.
    pub fn apply_p(&self, a: &[Complex64]) -> Vec<Complex64> {
        let n = a.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let i = Complex64::new(0.0, 1.0);
        for j in 1..n - 1 {
            out[j] = -i * (a[j + 1] - a[j - 1]) / (2.0 * self.step);
        }
        out
    }

    /// ⟨a|P²|b⟩ evaluated as ⟨Pa|Pb⟩ (−d²/dx² in weak form).
    pub fn p2_element(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let pa = self.apply_p(a);
        let pb = self.apply_p(b);
        self.inner(&pa, &pb)
    }
}

/// Central first difference with step `h`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central second difference with step `h`.
pub fn central_diff2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}
