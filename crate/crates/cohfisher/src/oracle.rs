//! Brute-force verification engine.
//!
//! States are assembled as explicit wavefunctions on a uniform position
//! grid, density operators are formed literally from the preparation
//! recipes, and the QFI is evaluated from first principles:
//!
//! - **Spectral route**: eigendecompose ρ(s), take ∂ρ by central
//!   difference, and sum `2|⟨i|∂ρ|j⟩|²/(λᵢ+λⱼ)` over eigenpairs, the
//!   spectral solution of the symmetric-logarithmic-derivative equation
//!   `∂ρ = ½(ρL + Lρ)`.
//! - **Bures route**: `F ≈ 8·[1 − √Fid(ρ(s), ρ(s+ds))]/ds²`, Richardson
//!   extrapolated over ds and ds/2.
//!
//! Nothing here reuses the closed forms: norms, traces and matrix elements
//! all come from grid sums. Because every assembled ρ has rank ≤ 2, both
//! routes first project onto the exact span of the constituent vectors
//! (dimension ≤ 6 across the three stencil separations), reducing each
//! eigenproblem to a tiny dense Hermitian one; a full-grid path is retained
//! for audit purposes.

use num_complex::Complex64;

use crate::linalg::{eigen_hermitian, CMat};
use crate::models::ModelTag;
use crate::psf::PsfModel;
use crate::{Error, Result};

/// Default eigenvalue-pair threshold in the spectral sum.
pub const EPS_SPEC: f64 = 1e-12;
/// Residual-norm threshold below which a vector adds no new direction.
const ORTHO_TOL: f64 = 1e-10;
/// Fraction of the spectral sum that excluded pairs may bound before the
/// result is declared unreliable.
const EXCLUDED_MASS_LIMIT: f64 = 0.01;

/// Uniform grid configuration.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Half-width of the grid in σ.
    pub extent: f64,
    /// Number of points.
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { extent: 12.0, n: 2048 }
    }
}

impl GridSpec {
    /// Check that the grid resolves the profile and the displaced pair:
    /// step ≤ width/16 and extent ≥ 8·width + s.
    pub fn validate(&self, psf: &PsfModel, s: f64) -> Result<Grid> {
        if self.n < 32 {
            return Err(Error::UnderResolvedGrid(format!("{} points", self.n)));
        }
        let width = psf.width_hint();
        let step = 2.0 * self.extent / self.n as f64;
        if step > width / 16.0 {
            return Err(Error::UnderResolvedGrid(format!(
                "step {step:.4} exceeds width/16 = {:.4}",
                width / 16.0
            )));
        }
        if self.extent < 8.0 * width + s {
            return Err(Error::UnderResolvedGrid(format!(
                "extent {} below 8·width + s = {}",
                self.extent,
                8.0 * width + s
            )));
        }
        Ok(Grid { start: -self.extent + 0.5 * step, step, n: self.n })
    }
}

/// Realized uniform grid; positions are `start + j·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl Grid {
    pub fn position(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    /// Grid inner product ⟨a|b⟩ = Σ a*·b·Δx.
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
}

/// Preparation recipe evaluated by the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleModel {
    A { p: f64 },
    B { p: f64 },
    /// Same state family as B; kept separate for reporting.
    E { p: f64 },
    Ls { p: f64 },
    Tn { gamma: f64 },
    /// The incoherent two-source mixture ½(|Ψ₊⟩⟨Ψ₊| + |Ψ₋⟩⟨Ψ₋|).
    Incoherent,
}

impl OracleModel {
    pub fn from_tag(tag: ModelTag, weight: f64) -> Self {
        match tag {
            ModelTag::A => OracleModel::A { p: weight },
            ModelTag::B => OracleModel::B { p: weight },
            ModelTag::E => OracleModel::E { p: weight },
            ModelTag::Ls => OracleModel::Ls { p: weight },
            ModelTag::Tn => OracleModel::Tn { gamma: weight },
        }
    }
}

impl std::fmt::Display for OracleModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleModel::A { p } => write!(f, "A(p={p:.6})"),
            OracleModel::B { p } => write!(f, "B(p={p:.6})"),
            OracleModel::E { p } => write!(f, "E(p={p:.6})"),
            OracleModel::Ls { p } => write!(f, "LS(p={p:.6})"),
            OracleModel::Tn { gamma } => write!(f, "TN(gamma={gamma:.6})"),
            OracleModel::Incoherent => write!(f, "incoherent"),
        }
    }
}

/// Which constituent wavefunction a weight multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constituent {
    Phi1,
    Phi2,
    PsiPlus,
    PsiMinus,
}

/// Explicit wavefunctions and the model's projector decomposition
/// ρ = Σ wᵢ|vᵢ⟩⟨vᵢ| at one separation.
#[derive(Debug, Clone)]
pub struct GridState {
    pub grid: Grid,
    pub s: f64,
    pub phase: f64,
    pub model: OracleModel,
    pub psi_plus: Vec<Complex64>,
    pub psi_minus: Vec<Complex64>,
    pub phi1: Vec<Complex64>,
    pub phi2: Vec<Complex64>,
    /// Projector weights; the vectors are unnormalized.
    pub constituents: Vec<(f64, Constituent)>,
}

/// Build Ψ± by shifting the profile by ±s/2 (`Ψ±(x) = ψ(x ± s/2)`,
/// equivalent to exp(±iPs/2)), form Φ₁,₂ = ½(Ψ₊ ± e^{iφ}Ψ₋), and attach
/// the model's projector weights computed from grid norms.
pub fn assemble_state(
    psf: &PsfModel,
    model: OracleModel,
    s: f64,
    phase: f64,
    spec: &GridSpec,
) -> Result<GridState> {
    let grid = spec.validate(psf, s)?;
    let n = grid.n;
    let mut psi_plus = Vec::with_capacity(n);
    let mut psi_minus = Vec::with_capacity(n);
    let mut phi1 = Vec::with_capacity(n);
    let mut phi2 = Vec::with_capacity(n);
    let rot = Complex64::from_polar(1.0, phase);
    for j in 0..n {
        let x = grid.position(j);
        let plus = psf.amplitude_at(x + 0.5 * s);
        let minus = psf.amplitude_at(x - 0.5 * s);
        psi_plus.push(plus);
        psi_minus.push(minus);
        phi1.push(0.5 * (plus + rot * minus));
        phi2.push(0.5 * (plus - rot * minus));
    }
    let n1 = grid.norm2(&phi1);
    let n2 = grid.norm2(&phi2);
    let degenerate = |name: &str| Error::DegenerateChannel(format!("{name} at s = {s}"));
    let constituents = match model {
        OracleModel::A { p } => {
            if (p > 0.0 && n1 <= 1e-14) || (p < 1.0 && n2 <= 1e-14) {
                return Err(degenerate("model A branch norm vanishes"));
            }
            vec![(p / n1, Constituent::Phi1), ((1.0 - p) / n2, Constituent::Phi2)]
        }
        OracleModel::B { p } | OracleModel::E { p } => {
            let trace = p * n1 + (1.0 - p) * n2;
            if trace <= 1e-14 {
                return Err(degenerate("model B trace vanishes"));
            }
            vec![(p / trace, Constituent::Phi1), ((1.0 - p) / trace, Constituent::Phi2)]
        }
        OracleModel::Ls { p } => {
            if n1 <= 1e-14 {
                return Err(degenerate("model LS coherent branch vanishes"));
            }
            // Literal recipe: coherent Φ₁ branch plus the incoherent mixture.
            vec![
                (p / n1, Constituent::Phi1),
                (0.5 * (1.0 - p), Constituent::PsiPlus),
                (0.5 * (1.0 - p), Constituent::PsiMinus),
            ]
        }
        OracleModel::Tn { gamma } => {
            let w1 = 2.0 - gamma;
            let w2 = 2.0 * (1.0 - gamma);
            let trace = w1 * n1 + w2 * n2;
            if trace <= 1e-14 {
                return Err(degenerate("model TN trace vanishes"));
            }
            vec![(w1 / trace, Constituent::Phi1), (w2 / trace, Constituent::Phi2)]
        }
        OracleModel::Incoherent => vec![
            (0.5, Constituent::PsiPlus),
            (0.5, Constituent::PsiMinus),
        ],
    };
    Ok(GridState {
        grid,
        s,
        phase,
        model,
        psi_plus,
        psi_minus,
        phi1,
        phi2,
        constituents,
    })
}

impl GridState {
    pub fn vector(&self, c: Constituent) -> &[Complex64] {
        match c {
            Constituent::Phi1 => &self.phi1,
            Constituent::Phi2 => &self.phi2,
            Constituent::PsiPlus => &self.psi_plus,
            Constituent::PsiMinus => &self.psi_minus,
        }
    }

    /// ‖Φ₁‖² and ‖Φ₂‖² from grid sums.
    pub fn phi_norms(&self) -> (f64, f64) {
        (self.grid.norm2(&self.phi1), self.grid.norm2(&self.phi2))
    }

    /// Trace of the assembled ρ (weights times grid norms).
    pub fn trace(&self) -> f64 {
        self.constituents
            .iter()
            .map(|&(w, c)| w * self.grid.norm2(self.vector(c)))
            .sum()
    }

    /// Project ρ onto an orthonormal basis: ρₚ = Σ wᵢ aᵢaᵢᴴ with
    /// aᵢ[k] = ⟨e_k|vᵢ⟩.
    fn project(&self, basis: &[Vec<Complex64>]) -> CMat {
        let k = basis.len();
        let mut rho = CMat::zeros(k);
        for &(w, c) in &self.constituents {
            let v = self.vector(c);
            let a: Vec<Complex64> = basis.iter().map(|e| self.grid.inner(e, v)).collect();
            for i in 0..k {
                for j in 0..k {
                    rho.add(i, j, Complex64::new(w, 0.0) * a[i] * a[j].conj());
                }
            }
        }
        rho
    }

    /// Dense ρ on the grid, `ρ_jk = Σᵢ wᵢ vᵢ(x_j)vᵢ*(x_k)·Δx`.
    pub(crate) fn rho_dense(&self) -> CMat {
        let n = self.grid.n;
        let mut rho = CMat::zeros(n);
        for &(w, c) in &self.constituents {
            let v = self.vector(c);
            let scale = Complex64::new(w * self.grid.step, 0.0);
            for j in 0..n {
                let vj = v[j] * scale;
                for k in 0..n {
                    rho.add(j, k, vj * v[k].conj());
                }
            }
        }
        rho
    }

    /// Eigenvalues of ρ projected onto its own constituent span, sorted
    /// descending. For the rank-2 recipes these are (λ₁, λ₂) plus zeros.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let vectors: Vec<&[Complex64]> =
            self.constituents.iter().map(|&(_, c)| self.vector(c)).collect();
        let basis = orthonormalize(&self.grid, &vectors);
        let rho = self.project(&basis);
        eigen_hermitian(&rho).values
    }
}

/// Modified Gram-Schmidt with a re-orthogonalization pass; residuals below
/// `ORTHO_TOL` add no direction and are dropped.
fn orthonormalize(grid: &Grid, vectors: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for &v in vectors {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for e in &basis {
                let coeff = grid.inner(e, &w);
                for (wi, ei) in w.iter_mut().zip(e.iter()) {
                    *wi -= coeff * ei;
                }
            }
        }
        let norm = grid.norm2(&w).sqrt();
        if norm > ORTHO_TOL {
            let inv = Complex64::new(1.0 / norm, 0.0);
            for wi in &mut w {
                *wi *= inv;
            }
            basis.push(w);
        }
    }
    basis
}

/// How the spectral route represents ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectralMethod {
    /// Project onto the constituent span first (exact for these states).
    #[default]
    Subspace,
    /// Dense eigendecomposition on the full grid; audit path, n ≤ 512.
    FullGrid,
}

/// Options for [`qfi_spectral`].
#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Central-difference step in σ; must lie in [1e-6, 1e-3].
    pub ds: f64,
    pub method: SpectralMethod,
    /// Eigenvalue-pair cutoff.
    pub eps_spec: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { ds: 1e-4, method: SpectralMethod::Subspace, eps_spec: EPS_SPEC }
    }
}

/// Spectral-route QFI.
#[derive(Debug, Clone, Copy)]
pub struct SpectralQfi {
    /// QFI in σ⁻².
    pub value: f64,
    /// Upper bound on the contribution of excluded eigenpairs.
    pub excluded_bound: f64,
    /// Dimension of the projected eigenproblem (grid size for FullGrid).
    pub basis_dim: usize,
}

/// QFI from the spectral solution of the SLD equation, with ∂ρ by central
/// difference over `[s−ds, s+ds]`.
pub fn qfi_spectral(
    psf: &PsfModel,
    model: OracleModel,
    s: f64,
    phase: f64,
    spec: &GridSpec,
    opts: &SpectralOptions,
) -> Result<SpectralQfi> {
    if !(1e-6..=1e-3).contains(&opts.ds) {
        return Err(Error::Config(format!(
            "spectral finite-difference step must lie in [1e-6, 1e-3], got {}",
            opts.ds
        )));
    }
    if s <= opts.ds {
        return Err(Error::OutOfRegime(format!(
            "central difference needs s > ds, got s = {s}, ds = {}",
            opts.ds
        )));
    }
    let ds = opts.ds;
    // One grid for all three stencil points; validated at the largest s.
    spec.validate(psf, s + ds)?;
    let minus = assemble_state(psf, model, s - ds, phase, spec)?;
    let center = assemble_state(psf, model, s, phase, spec)?;
    let plus = assemble_state(psf, model, s + ds, phase, spec)?;

    let (rho_m, rho_0, rho_p, dim) = match opts.method {
        SpectralMethod::Subspace => {
            let mut vectors: Vec<&[Complex64]> = Vec::new();
            for st in [&minus, &center, &plus] {
                vectors.push(&st.phi1);
                vectors.push(&st.phi2);
            }
            let basis = orthonormalize(&center.grid, &vectors);
            let dim = basis.len();
            (minus.project(&basis), center.project(&basis), plus.project(&basis), dim)
        }
        SpectralMethod::FullGrid => {
            if spec.n > 512 {
                return Err(Error::Config(format!(
                    "full-grid audit path supports n ≤ 512, got {}",
                    spec.n
                )));
            }
            (minus.rho_dense(), center.rho_dense(), plus.rho_dense(), spec.n)
        }
    };

    let drho = rho_p.sub_scaled(&rho_m, 1.0 / (2.0 * ds));
    let eig = eigen_hermitian(&rho_0);
    let lambdas = &eig.values;
    // Matrix elements ⟨i|∂ρ|j⟩ in the eigenbasis.
    let b = eig.vectors.adjoint_mul(&drho.mul(&eig.vectors));

    let k = lambdas.len();
    let mut value = 0.0;
    let mut excluded_bound = 0.0;
    for i in 0..k {
        for j in 0..k {
            let denom = lambdas[i] + lambdas[j];
            let w2 = b.get(i, j).norm_sqr();
            if denom > opts.eps_spec {
                value += 2.0 * w2 / denom;
            } else {
                excluded_bound += 2.0 * w2 / opts.eps_spec;
            }
        }
    }
    if excluded_bound > EXCLUDED_MASS_LIMIT * value.max(f64::MIN_POSITIVE) {
        return Err(Error::UnreliableSpectral {
            excluded: excluded_bound,
            limit: 100.0 * EXCLUDED_MASS_LIMIT,
        });
    }
    Ok(SpectralQfi { value, excluded_bound, basis_dim: dim })
}

/// QFI from the Bures-fidelity relation, `F(h) = 8[1 − √Fid(ρ_s, ρ_{s+h})]/h²`,
/// Richardson-extrapolated over `h = ds` and `ds/2` to cancel the leading
/// drift term.
pub fn qfi_bures(
    psf: &PsfModel,
    model: OracleModel,
    s: f64,
    phase: f64,
    spec: &GridSpec,
    ds: f64,
) -> Result<f64> {
    if !(1e-6..=1e-2).contains(&ds) {
        return Err(Error::Config(format!("bures step must lie in [1e-6, 1e-2], got {ds}")));
    }
    spec.validate(psf, s + ds)?;
    let base = assemble_state(psf, model, s, phase, spec)?;
    let far = assemble_state(psf, model, s + ds, phase, spec)?;
    let near = assemble_state(psf, model, s + 0.5 * ds, phase, spec)?;

    let estimate = |other: &GridState, h: f64| -> Result<f64> {
        let rf = root_fidelity(&base, other)?;
        Ok(8.0 * (1.0 - rf) / (h * h))
    };
    let coarse = estimate(&far, ds)?;
    let fine = estimate(&near, 0.5 * ds)?;
    Ok(2.0 * fine - coarse)
}

/// Root fidelity `Tr√(√ρ σ √ρ)` of two assembled states, evaluated on the
/// support of ρ: with ρ = Σλᵢ|uᵢ⟩⟨uᵢ| (live eigenpairs only), the nonzero
/// eigenvalues of √ρσ√ρ equal those of `A_ij = √λᵢ⟨uᵢ|σ|uⱼ⟩√λⱼ`.
pub fn root_fidelity(state_a: &GridState, state_b: &GridState) -> Result<f64> {
    if state_a.grid != state_b.grid {
        return Err(Error::Contract("fidelity needs a common grid".into()));
    }
    let grid = &state_a.grid;
    let mut vectors: Vec<&[Complex64]> = Vec::new();
    for st in [state_a, state_b] {
        vectors.push(&st.phi1);
        vectors.push(&st.phi2);
    }
    let basis = orthonormalize(grid, &vectors);
    let rho = state_a.project(&basis);
    let sigma = state_b.project(&basis);

    let eig = eigen_hermitian(&rho);
    // ⟨uᵢ|σ|uⱼ⟩ for every eigenpair.
    let sig_u = eig.vectors.adjoint_mul(&sigma.mul(&eig.vectors));
    let live: Vec<usize> =
        (0..eig.values.len()).filter(|&i| eig.values[i] > 1e-13).collect();
    if live.is_empty() {
        return Err(Error::MatrixSqrt("state has no support".into()));
    }
    let r = live.len();
    let mut a = CMat::zeros(r);
    for (ii, &i) in live.iter().enumerate() {
        for (jj, &j) in live.iter().enumerate() {
            let w = (eig.values[i] * eig.values[j]).sqrt();
            a.set(ii, jj, Complex64::new(w, 0.0) * sig_u.get(i, j));
        }
    }
    // Hermitize against rounding before the final eigendecomposition.
    let mut herm = CMat::zeros(r);
    for i in 0..r {
        for j in 0..r {
            herm.set(i, j, (a.get(i, j) + a.get(j, i).conj()) * 0.5);
        }
    }
    let mu = eigen_hermitian(&herm).values;
    let mut rf = 0.0;
    for &v in mu.iter() {
        if v < -1e-10 {
            return Err(Error::MatrixSqrt(format!(
                "support matrix has negative eigenvalue {v:.3e}"
            )));
        }
        rf += v.max(0.0).sqrt();
    }
    if !(0.0..=1.0 + 1e-9).contains(&rf) {
        return Err(Error::MatrixSqrt(format!("root fidelity {rf} outside [0, 1]")));
    }
    Ok(rf.min(1.0))
}
