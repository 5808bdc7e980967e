//! Sweep engines, row schema and the oracle validation suite.
//!
//! Rows carry both the model-dependent quantities (rate, QFI, precision)
//! and the model-independent sorting decomposition so a single CSV can
//! regenerate the weight-sweep and separation-sweep figures. Output is
//! deterministic: fixed column order, 12 significant digits, ordered rows;
//! parallel evaluation never reorders the result.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OutputFormat, RangeSpec};
use crate::fisher::{
    fisher_norm_channel, qfi_rank2, sorting_centroid, sorting_separation,
};
use crate::models::{build_descriptor, ModelTag, WeightSpec};
use crate::optimize::near_optimal_weights_model_e;
use crate::oracle::{
    qfi_bures, qfi_spectral, GridSpec, OracleModel, SpectralMethod, SpectralOptions,
};
use crate::psf::PsfModel;
use crate::superposition::{Channel, SuperpositionScalars};
use crate::{Error, Result};

/// Relative tolerance for spectral oracle vs closed form in the suite.
pub const TOL_SPECTRAL: f64 = 1e-3;
/// Relative tolerance for the Bures route vs the spectral route.
pub const TOL_BURES: f64 = 5e-3;
/// Absolute tolerance on the incoherent-mixture QFI.
pub const TOL_INCOHERENT: f64 = 1e-4;
/// Default seed of the random-tuple generator.
pub const DEFAULT_SEED: u64 = 0x636f_6866_6973_6865;

/// One evaluated point of a sweep. Model-dependent fields are absent when
/// the command evaluates only the sorting decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Separation in σ.
    pub s: f64,
    /// Weight parameter p (or |γ| for model TN).
    pub p: Option<f64>,
    pub model: Option<ModelTag>,
    /// Base preparation rate C of the model.
    pub rate: Option<f64>,
    /// Enhanced rate C_E (model E rows only).
    pub rate_e: Option<f64>,
    /// Rank-2 QFI in σ⁻².
    pub qfi: Option<f64>,
    /// Eigenvalue-modulation part of the QFI.
    pub f_lambda: Option<f64>,
    /// Rate-normalized precision: the model's own rate times its QFI.
    pub precision: Option<f64>,
    /// Separation information in the in-phase channel.
    pub f1: f64,
    /// Separation information in the anti-phase channel.
    pub f2: f64,
    /// Norm-modulation part of f2.
    pub f_c: f64,
    pub f1_cent: f64,
    pub f2_cent: f64,
    /// Marks the near-optimal model-E weight rows in weight sweeps.
    pub near_optimal: bool,
}

pub const CSV_HEADER: &str =
    "s,p,model,rate,rate_e,qfi,f_lambda,precision,f1,f2,f_c,f1_cent,f2_cent,near_optimal";

/// Format with 12 significant digits (scientific, '.' radix); empty for
/// absent fields.
fn sig(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.11e}"),
        None => String::new(),
    }
}

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sig(Some(self.s)),
            sig(self.p),
            self.model.map(|m| m.to_string()).unwrap_or_default(),
            sig(self.rate),
            sig(self.rate_e),
            sig(self.qfi),
            sig(self.f_lambda),
            sig(self.precision),
            sig(Some(self.f1)),
            sig(Some(self.f2)),
            sig(Some(self.f_c)),
            sig(Some(self.f1_cent)),
            sig(Some(self.f2_cent)),
            self.near_optimal,
        )
    }

    /// Convert σ-unit columns to physical units with PSF width `sigma`:
    /// lengths scale by σ, Fisher quantities by σ⁻².
    pub fn rescaled(mut self, sigma: f64) -> Self {
        let inv2 = 1.0 / (sigma * sigma);
        self.s *= sigma;
        for v in [
            &mut self.qfi,
            &mut self.f_lambda,
            &mut self.precision,
        ] {
            if let Some(x) = v.as_mut() {
                *x *= inv2;
            }
        }
        self.f1 *= inv2;
        self.f2 *= inv2;
        self.f_c *= inv2;
        self.f1_cent *= inv2;
        self.f2_cent *= inv2;
        self
    }
}

/// Render rows in the requested format (CSV header line included).
pub fn render_rows(rows: &[SweepRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&row.to_csv());
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

/// Sorting decomposition shared by every row at one separation.
fn sorting_fields(scalars: &SuperpositionScalars) -> (f64, f64, f64, f64, f64) {
    let (f1, f2) = sorting_separation(scalars);
    let (f1c, f2c) = sorting_centroid(scalars);
    // The norm channel of the anti-phase superposition; zero at s = 0 only
    // for the in-phase channel so this is well defined for s > 0.
    let f_c = fisher_norm_channel(scalars, Channel::AntiPhase).unwrap_or(0.0);
    (f1, f2, f_c, f1c, f2c)
}

/// Evaluate one (model, s, weight) point.
pub fn point_row(
    psf: &PsfModel,
    model: ModelTag,
    s: f64,
    weights: &WeightSpec,
) -> Result<SweepRow> {
    let scalars = SuperpositionScalars::build(psf, s)?;
    build_row(&scalars, model, weights, false)
}

fn build_row(
    scalars: &SuperpositionScalars,
    model: ModelTag,
    weights: &WeightSpec,
    near_optimal: bool,
) -> Result<SweepRow> {
    let desc = build_descriptor(model, scalars, weights)?;
    let report = qfi_rank2(&desc)?;
    let (f1, f2, f_c, f1c, f2c) = sorting_fields(scalars);
    let (rate, rate_e) = match model {
        ModelTag::E => (desc.base_rate().unwrap_or(desc.rate), Some(desc.rate)),
        _ => (desc.rate, None),
    };
    debug_assert!((scalars.n1 + scalars.n2 - 1.0).abs() < 1e-12);
    debug_assert!((f1 + f2 - scalars.dp2).abs() < 1e-12);
    debug_assert!(
        (report.qfi - report.f_lambda - report.f_channels[0] - report.f_channels[1]).abs()
            < 1e-10
    );
    Ok(SweepRow {
        s: scalars.s,
        p: Some(weights.value()),
        model: Some(model),
        rate: Some(rate),
        rate_e,
        qfi: Some(report.qfi),
        f_lambda: Some(report.f_lambda),
        precision: Some(report.precision),
        f1,
        f2,
        f_c,
        f1_cent: f1c,
        f2_cent: f2c,
        near_optimal,
    })
}

/// Weight sweep: models B and E over `p_range` for each separation in
/// `s_list`, plus one flagged row per separation at the near-optimal
/// model-E weight (where C_E = 1/2).
pub fn sweep_weights(
    psf: &PsfModel,
    s_list: &[f64],
    p_range: &RangeSpec,
) -> Result<Vec<SweepRow>> {
    if s_list.is_empty() {
        return Err(Error::Config("weight sweep needs at least one separation".into()));
    }
    if p_range.lo <= 0.0 || p_range.hi >= 1.0 {
        return Err(Error::Config(format!(
            "weight range must lie strictly inside (0,1), got {}:{}",
            p_range.lo, p_range.hi
        )));
    }
    let ps = p_range.values();
    let mut tasks: Vec<(f64, f64, ModelTag, bool)> = Vec::new();
    for &s in s_list {
        for &p in &ps {
            tasks.push((s, p, ModelTag::B, false));
            tasks.push((s, p, ModelTag::E, false));
        }
        tasks.push((s, f64::NAN, ModelTag::E, true)); // near-optimal marker
    }
    tasks
        .into_par_iter()
        .map(|(s, p, model, marker)| {
            let scalars = SuperpositionScalars::build(psf, s)?;
            let weights = if marker {
                near_optimal_weights_model_e(&scalars)
            } else {
                WeightSpec::prior(p)?
            };
            build_row(&scalars, model, &weights, marker)
        })
        .collect()
}

/// Separation sweep of the sorting decomposition, with optional model
/// columns when a model and weight are supplied.
pub fn sweep_separation(
    psf: &PsfModel,
    s_range: &RangeSpec,
    model: Option<(ModelTag, WeightSpec)>,
) -> Result<Vec<SweepRow>> {
    if s_range.lo <= 0.0 {
        return Err(Error::Config(format!(
            "separation sweep needs s > 0, got lo = {}",
            s_range.lo
        )));
    }
    s_range
        .values()
        .into_par_iter()
        .map(|s| {
            let scalars = SuperpositionScalars::build(psf, s)?;
            match &model {
                Some((tag, weights)) => build_row(&scalars, *tag, weights, false),
                None => {
                    let (f1, f2, f_c, f1c, f2c) = sorting_fields(&scalars);
                    Ok(SweepRow {
                        s,
                        p: None,
                        model: None,
                        rate: None,
                        rate_e: None,
                        qfi: None,
                        f_lambda: None,
                        precision: None,
                        f1,
                        f2,
                        f_c,
                        f1_cent: f1c,
                        f2_cent: f2c,
                        near_optimal: false,
                    })
                }
            }
        })
        .collect()
}

/// Configuration of the oracle agreement suite.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    pub grid: GridSpec,
    /// Superposition phase φ; nonzero skips the closed-form comparison and
    /// checks the two oracle routes against each other.
    pub phase: f64,
    pub cases: usize,
    pub seed: u64,
    /// Use the dense full-grid audit path (reduced case set, small grid).
    pub full_grid: bool,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            grid: GridSpec::default(),
            phase: 0.0,
            cases: 25,
            seed: DEFAULT_SEED,
            full_grid: false,
        }
    }
}

/// One validation case.
#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub index: usize,
    pub model: String,
    pub s: f64,
    pub weight: f64,
    pub f_closed: Option<f64>,
    pub f_spectral: f64,
    pub f_bures: f64,
    /// |spectral − closed|/closed (φ = 0 only).
    pub rel_spectral: Option<f64>,
    /// |bures − spectral|/spectral.
    pub rel_bures: f64,
    pub pass: bool,
}

/// Full suite outcome.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub cases: Vec<CaseReport>,
    pub incoherent_qfi: f64,
    pub incoherent_pass: bool,
    pub all_pass: bool,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Run the seeded oracle agreement suite: random (model, weight, s) tuples
/// compared closed-form vs spectral vs Bures, plus the incoherent-mixture
/// reference. Deterministic for a fixed seed.
pub fn run_validation(psf: &PsfModel, cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.full_grid && cfg.grid.n > 512 {
        return Err(Error::Config(
            "full-grid validation needs --grid-n ≤ 512 (dense eigendecomposition)".into(),
        ));
    }
    if !cfg.full_grid && cfg.grid.n < 2048 {
        return Err(Error::UnderResolvedGrid(format!(
            "validation suite requires at least 2048 grid points, got {}",
            cfg.grid.n
        )));
    }
    if cfg.cases == 0 {
        return Err(Error::Config("validation needs at least one case".into()));
    }

    // Draw all tuples up front so parallel evaluation stays deterministic.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tags = [ModelTag::A, ModelTag::B, ModelTag::E, ModelTag::Ls, ModelTag::Tn];
    let (s_lo, s_hi) = if cfg.full_grid { (0.1, 0.9) } else { (0.05, 2.5) };
    let tuples: Vec<(usize, ModelTag, f64, f64)> = (0..cfg.cases)
        .map(|i| {
            let tag = tags[i % tags.len()];
            let weight = 0.05 + 0.90 * unit_f64(&mut rng);
            let s = s_lo + (s_hi - s_lo) * unit_f64(&mut rng);
            (i, tag, weight, s)
        })
        .collect();

    let method = if cfg.full_grid { SpectralMethod::FullGrid } else { SpectralMethod::Subspace };
    let opts = SpectralOptions { method, ..Default::default() };
    let closed_form_applies = cfg.phase == 0.0;

    let cases: Vec<CaseReport> = tuples
        .into_par_iter()
        .map(|(index, tag, weight, s)| -> Result<CaseReport> {
            let oracle_model = OracleModel::from_tag(tag, weight);
            let spectral = qfi_spectral(psf, oracle_model, s, cfg.phase, &cfg.grid, &opts)?;
            let bures = qfi_bures(psf, oracle_model, s, cfg.phase, &cfg.grid, 5e-4)?;
            let rel_bures = (bures - spectral.value).abs() / spectral.value;
            let (f_closed, rel_spectral) = if closed_form_applies {
                let scalars = SuperpositionScalars::build(psf, s)?;
                let weights = match tag {
                    ModelTag::Tn => WeightSpec::coherence(weight, 0.0)?,
                    _ => WeightSpec::prior(weight)?,
                };
                let report = qfi_rank2(&build_descriptor(tag, &scalars, &weights)?)?;
                let rel = (spectral.value - report.qfi).abs() / report.qfi;
                (Some(report.qfi), Some(rel))
            } else {
                (None, None)
            };
            let pass = rel_bures <= TOL_BURES
                && rel_spectral.map_or(true, |r| r <= TOL_SPECTRAL);
            Ok(CaseReport {
                index,
                model: OracleModel::from_tag(tag, weight).to_string(),
                s,
                weight,
                f_closed,
                f_spectral: spectral.value,
                f_bures: bures,
                rel_spectral,
                rel_bures,
                pass,
            })
        })
        .collect::<Result<_>>()?;

    let incoherent = qfi_spectral(psf, OracleModel::Incoherent, 0.4, cfg.phase, &cfg.grid, &opts)?;
    // With a nonzero phase the mixture is still ½(|Ψ₊⟩⟨Ψ₊|+|Ψ₋⟩⟨Ψ₋|); the
    // (ΔP)² reference applies either way.
    let incoherent_pass = (incoherent.value - psf.momentum_variance()).abs() <= TOL_INCOHERENT;
    let all_pass = incoherent_pass && cases.iter().all(|c| c.pass);
    Ok(ValidationReport { cases, incoherent_qfi: incoherent.value, incoherent_pass, all_pass })
}

/// Text rendering of the validation report: one line per case plus the
/// incoherent reference and a summary verdict.
pub fn render_validation(report: &ValidationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serialize");
            out.push('\n');
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from(
                "case,model,s,weight,f_closed,f_spectral,f_bures,rel_spectral,rel_bures,pass\n",
            );
            for c in &report.cases {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    c.index,
                    c.model,
                    sig(Some(c.s)),
                    sig(Some(c.weight)),
                    sig(c.f_closed),
                    sig(Some(c.f_spectral)),
                    sig(Some(c.f_bures)),
                    sig(c.rel_spectral),
                    sig(Some(c.rel_bures)),
                    c.pass,
                ));
            }
            out.push_str(&format!(
                "incoherent,,,,{},{},,,,{}\n",
                sig(Some(0.25)),
                sig(Some(report.incoherent_qfi)),
                report.incoherent_pass,
            ));
            out.push_str(&format!(
                "# verdict: {}\n",
                if report.all_pass { "all cases within tolerance" } else { "FAILURES present" }
            ));
            out
        }
    }
}
