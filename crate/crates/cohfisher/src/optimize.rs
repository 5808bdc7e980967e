//! Weight optimization for the rate-normalized precision.
//!
//! `maximize_precision` runs a deterministic golden-section search on
//! `p ↦ C(p)·F(p)` for models B and E, with a dense-grid fallback when the
//! coarse bracketing scan does not look unimodal. The near-optimal closed
//! forms from the small-separation analysis are exposed alongside:
//! `p ≈ √(‖Φ₂‖²/c)` with predicted rate `√(‖Φ₂‖²·c)` for model B, and the
//! norm-swapped weights `p = ‖Φ₂‖²` (rate exactly 1/2) for model E.

use serde::Serialize;

use crate::fisher::qfi_rank2;
use crate::models::{build_descriptor, ModelTag, WeightSpec};
use crate::psf::PsfModel;
use crate::superposition::SuperpositionScalars;
use crate::{Error, Result, EPS_RANK};

/// Absolute tolerance on the weight location.
const P_TOL: f64 = 1e-8;
/// Coarse bracketing scan used for unimodality detection.
const COARSE_POINTS: usize = 33;
/// Dense fallback scan when the coarse scan is not unimodal.
const FALLBACK_POINTS: usize = 1024;
const MAX_ITERATIONS: u32 = 200;

/// Result of a scalar weight optimization.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Optimum {
    /// Maximizing weight.
    pub p_star: f64,
    /// Maximized rate-normalized precision C·F in σ⁻².
    pub value: f64,
    /// Rate factor at the optimum (C_E for model E).
    pub rate_at_opt: f64,
    /// QFI at the optimum in σ⁻².
    pub qfi_at_opt: f64,
    /// Objective evaluations performed.
    pub iterations: u32,
    /// Whether the bracket shrank below tolerance.
    pub converged: bool,
    /// Whether the dense-grid fallback was used.
    pub grid_fallback: bool,
}

/// Near-optimal model-B weight `p ≈ √(‖Φ₂‖²/c)` and its predicted rate
/// `C ≈ √(‖Φ₂‖²·c)`, from the small-separation analysis of `C·F_λ`.
///
/// The approximation is meaningful where the returned weight is below one,
/// i.e. for separations where `‖Φ₂‖² < c`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NearOptimalB {
    pub p: f64,
    pub predicted_rate: f64,
}

pub fn near_optimal_p_model_b(scalars: &SuperpositionScalars) -> Result<NearOptimalB> {
    let c = scalars.c();
    if c <= 0.0 {
        return Err(Error::OutOfRegime(format!(
            "near-optimal weight needs positive overlap c, got {c} at s = {}",
            scalars.s
        )));
    }
    if scalars.n2 <= EPS_RANK {
        return Err(Error::OutOfRegime(
            "near-optimal weight needs s > 0 (anti-phase norm vanishes)".into(),
        ));
    }
    Ok(NearOptimalB {
        p: (scalars.n2 / c).sqrt(),
        predicted_rate: (scalars.n2 * c).sqrt(),
    })
}

/// Near-optimal model-E weights: the in-phase branch weighted by the
/// anti-phase norm, `p = ‖Φ₂‖²`, at which `C_E = 1/2` exactly.
pub fn near_optimal_weights_model_e(scalars: &SuperpositionScalars) -> WeightSpec {
    WeightSpec::Prior { p: scalars.n2 }
}

/// Maximize `p ↦ rate·QFI` for model B or E at fixed separation.
pub fn maximize_precision(
    psf: &PsfModel,
    s: f64,
    model: ModelTag,
    bracket: (f64, f64),
) -> Result<Optimum> {
    if !matches!(model, ModelTag::B | ModelTag::E) {
        return Err(Error::Contract(format!(
            "precision optimization applies to models B and E, got {model}"
        )));
    }
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::Config(format!(
            "bracket must satisfy 0 < lo < hi < 1, got ({lo}, {hi})"
        )));
    }
    if s <= 0.0 {
        return Err(Error::OutOfRegime("optimization needs s > 0".into()));
    }
    let scalars = SuperpositionScalars::build(psf, s)?;
    let objective = |p: f64| -> Result<f64> {
        let desc = build_descriptor(model, &scalars, &WeightSpec::prior(p)?)?;
        Ok(qfi_rank2(&desc)?.precision)
    };
    let m = maximize_scalar(objective, lo, hi, P_TOL)?;
    let desc = build_descriptor(model, &scalars, &WeightSpec::prior(m.x)?)?;
    let report = qfi_rank2(&desc)?;
    Ok(Optimum {
        p_star: m.x,
        value: m.value,
        rate_at_opt: report.rate,
        qfi_at_opt: report.qfi,
        iterations: m.iterations,
        converged: m.converged,
        grid_fallback: m.fallback,
    })
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ScalarMax {
    pub x: f64,
    pub value: f64,
    pub iterations: u32,
    pub converged: bool,
    pub fallback: bool,
}

/// Deterministic maximizer: coarse scan, unimodality check, golden-section
/// refinement; dense-grid rescan when the coarse shape is not unimodal.
pub(crate) fn maximize_scalar(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<ScalarMax> {
    let mut evals: u32 = 0;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        evals += 1;
        if v > best.1 {
            best = (x, v);
        }
        Ok(v)
    };

    let scan = |n: usize, eval: &mut dyn FnMut(f64) -> Result<f64>| -> Result<Vec<(f64, f64)>> {
        (0..n)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                Ok((x, eval(x)?))
            })
            .collect()
    };

    let coarse = scan(COARSE_POINTS, &mut eval)?;
    let peaks = count_peaks(&coarse);
    let fallback = peaks != 1;
    let window = if fallback {
        let dense = scan(FALLBACK_POINTS, &mut eval)?;
        argmax_window(&dense)
    } else {
        argmax_window(&coarse)
    };

    // Golden-section refinement inside the bracketing window.
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = window;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        if (b - a).abs() < tol {
            converged = true;
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        }
    }

    Ok(ScalarMax {
        x: best.0,
        value: best.1,
        iterations: evals,
        converged,
        fallback,
    })
}

/// Number of local maxima in a sampled curve (plateau-insensitive).
fn count_peaks(samples: &[(f64, f64)]) -> usize {
    let n = samples.len();
    let mut peaks = 0;
    for i in 0..n {
        let left_ok = i == 0 || samples[i].1 >= samples[i - 1].1;
        let right_ok = i + 1 == n || samples[i].1 >= samples[i + 1].1;
        // Skip plateau continuations so a flat top counts once.
        let plateau_continuation = i > 0 && samples[i].1 == samples[i - 1].1;
        if left_ok && right_ok && !plateau_continuation {
            peaks += 1;
        }
    }
    peaks
}

/// Window (x[j−1], x[j+1]) around the sampled argmax.
fn argmax_window(samples: &[(f64, f64)]) -> (f64, f64) {
    let j = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let left = if j == 0 { 0 } else { j - 1 };
    let right = (j + 1).min(samples.len() - 1);
    (samples[left].0, samples[right].0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalars(s: f64) -> SuperpositionScalars {
        SuperpositionScalars::build(&PsfModel::gaussian(1.0).unwrap(), s).unwrap()
    }

    const DEFAULT_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-6);

    #[test]
    fn near_optimal_b_reference_values() {
        // Quadrature oracle: p = 0.025007814535, C = 0.024976574296 at s=0.1;
        // p = 0.125982950234, C = 0.122106862344 at s=0.5.
        let no = near_optimal_p_model_b(&scalars(0.1)).unwrap();
        assert_relative_eq!(no.p, 0.025007814535, max_relative = 1e-9);
        assert_relative_eq!(no.predicted_rate, 0.024976574296, max_relative = 1e-9);
        let no = near_optimal_p_model_b(&scalars(0.5)).unwrap();
        assert_relative_eq!(no.p, 0.125982950234, max_relative = 1e-9);
        assert_relative_eq!(no.predicted_rate, 0.122106862344, max_relative = 1e-9);
    }

    #[test]
    fn near_optimal_b_small_s_scaling() {
        // p → s·ΔP/2 as s → 0.
        let no = near_optimal_p_model_b(&scalars(1e-3)).unwrap();
        assert_relative_eq!(no.p, 1e-3 * 0.5 / 2.0, max_relative = 1e-4);
    }

    #[test]
    fn near_optimal_b_out_of_regime() {
        assert!(matches!(
            near_optimal_p_model_b(&scalars(0.0)),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn near_optimal_e_rate_is_half() {
        for s in [0.05, 0.1, 0.5, 1.0, 3.0] {
            let sc = scalars(s);
            let w = near_optimal_weights_model_e(&sc);
            let e = crate::models::model_e(&sc, &w).unwrap();
            assert!((e.rate - 0.5).abs() < 1e-12, "C_E = {} at s={s}", e.rate);
        }
        // Large separation: the weight tends to 1/2 as the norms equalize.
        let sc = scalars(8.0);
        assert!((near_optimal_weights_model_e(&sc).value() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let psf = PsfModel::gaussian(1.0).unwrap();
        let a = maximize_precision(&psf, 0.5, ModelTag::E, DEFAULT_BRACKET).unwrap();
        let b = maximize_precision(&psf, 0.5, ModelTag::E, DEFAULT_BRACKET).unwrap();
        assert_eq!(a.p_star.to_bits(), b.p_star.to_bits());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn optimum_dominates_bracket_endpoints_and_heuristic() {
        let psf = PsfModel::gaussian(1.0).unwrap();
        for s in [0.1, 0.5, 1.0] {
            let sc = scalars(s);
            let opt = maximize_precision(&psf, s, ModelTag::E, DEFAULT_BRACKET).unwrap();
            assert!(opt.converged && !opt.grid_fallback);
            let at = |p: f64| {
                let d = crate::models::model_e(&sc, &WeightSpec::prior(p).unwrap()).unwrap();
                qfi_rank2(&d).unwrap().precision
            };
            assert!(opt.value >= at(1e-6));
            assert!(opt.value >= at(1.0 - 1e-6));
            assert!(opt.value >= at(near_optimal_weights_model_e(&sc).value()));
        }
    }

    #[test]
    fn model_b_optimum_stays_under_ceiling() {
        // The small-separation heuristic √(n2/c) tracks the true maximizer
        // tightly at s = 0.1 and within ~15% by s = 0.5.
        let psf = PsfModel::gaussian(1.0).unwrap();
        for (s, prox) in [(0.1, 0.05), (0.5, 0.15), (1.5, 0.35)] {
            let opt = maximize_precision(&psf, s, ModelTag::B, DEFAULT_BRACKET).unwrap();
            assert!(opt.value <= 0.25 + 1e-9, "B optimum {} at s={s}", opt.value);
            let no = near_optimal_p_model_b(&scalars(s)).unwrap();
            assert!(
                (opt.p_star - no.p).abs() / no.p < prox,
                "p* = {} vs heuristic {} at s={s}",
                opt.p_star,
                no.p
            );
        }
    }

    #[test]
    fn headline_optimum_at_tenth_sigma() {
        let psf = PsfModel::gaussian(1.0).unwrap();
        let opt = maximize_precision(&psf, 0.1, ModelTag::E, DEFAULT_BRACKET).unwrap();
        assert!((opt.value - 59.0).abs() / 59.0 < 0.10, "C_E·F = {}", opt.value);
        assert!((opt.rate_at_opt - 0.67).abs() < 0.05, "C_E = {}", opt.rate_at_opt);
        assert!((opt.qfi_at_opt - 89.0).abs() / 89.0 < 0.10, "F = {}", opt.qfi_at_opt);
        // The optimizing weight sits near twice the anti-phase norm.
        assert_relative_eq!(opt.p_star, 2.0 * scalars(0.1).n2, max_relative = 0.05);
    }

    #[test]
    fn rejects_bad_inputs() {
        let psf = PsfModel::gaussian(1.0).unwrap();
        assert!(matches!(
            maximize_precision(&psf, 0.5, ModelTag::A, DEFAULT_BRACKET),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            maximize_precision(&psf, 0.5, ModelTag::B, (0.0, 0.5)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            maximize_precision(&psf, 0.0, ModelTag::B, DEFAULT_BRACKET),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn bimodal_objective_takes_grid_fallback() {
        // Two separated peaks; the taller one hides between coarse samples.
        let f = |x: f64| {
            let peak = |c: f64, w: f64| (-(x - c) * (x - c) / (w * w)).exp();
            Ok(peak(0.30, 0.05) + 1.6 * peak(0.705, 0.004))
        };
        let m = maximize_scalar(f, 0.01, 0.99, 1e-8).unwrap();
        assert!(m.fallback, "expected dense-grid fallback");
        assert!(m.converged);
        assert_relative_eq!(m.x, 0.705, max_relative = 1e-4);
        assert!((m.value - 1.6).abs() < 1e-3);
    }

    #[test]
    fn unimodal_objective_avoids_fallback() {
        let f = |x: f64| Ok(-(x - 0.37) * (x - 0.37));
        let m = maximize_scalar(f, 0.01, 0.99, 1e-10).unwrap();
        assert!(!m.fallback);
        assert!(m.converged);
        assert_relative_eq!(m.x, 0.37, epsilon = 1e-8);
    }
}
