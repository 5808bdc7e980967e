//! Command-line interface.
//!
//! Exit codes: 0 success, 1 validation failure or unreliable oracle result,
//! 2 usage or precondition error, 3 optimizer non-convergence.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cohfisher::config::{load_psf, parse_psf_spec, parse_range, OutputFormat};
use cohfisher::models::{ModelTag, WeightSpec};
use cohfisher::optimize::maximize_precision;
use cohfisher::oracle::GridSpec;
use cohfisher::sweep::{
    point_row, render_rows, render_validation, run_validation, sweep_separation, sweep_weights,
    SweepRow, ValidationConfig, DEFAULT_SEED,
};
use cohfisher::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cohfisher",
    version,
    about = "Quantum Fisher information and rate-normalized precision for \
             partially coherent two-point superpositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one (model, separation, weight) point
    Point(PointArgs),
    /// Sweep models B and E over the weight for fixed separations
    SweepWeights(SweepWeightsArgs),
    /// Sweep the information-sorting decomposition over the separation
    SweepSeparation(SweepSeparationArgs),
    /// Maximize rate-normalized precision over the weight (models B and E)
    Optimize(OptimizeArgs),
    /// Run the oracle agreement suite (spectral and Bures vs closed forms)
    Validate(ValidateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Profile: gaussian:<sigma> or file:<path>
    #[arg(long, default_value = "gaussian:1")]
    psf: String,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Write output to this path instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Physical length per σ; outputs are rescaled at the boundary
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
}

impl CommonArgs {
    fn format(&self) -> Result<OutputFormat> {
        self.format.parse()
    }

    fn psf(&self) -> Result<cohfisher::psf::PsfModel> {
        load_psf(&parse_psf_spec(&self.psf)?)
    }

    fn check_sigma(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Config(format!("--sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                std::fs::write(path, text)?;
                Ok(())
            }
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Model: A, B, E, LS or TN
    #[arg(long)]
    model: String,
    /// Separation in σ
    #[arg(long)]
    s: f64,
    /// Prior weight p (models A, B, E, LS)
    #[arg(long)]
    p: Option<f64>,
    /// Degree of coherence |γ| (model TN)
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct SweepWeightsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Separation in σ; repeatable
    #[arg(long = "s", num_args = 1, action = clap::ArgAction::Append)]
    s: Vec<f64>,
    /// Weight range lo:hi:step, strictly inside (0,1)
    #[arg(long, default_value = "0.005:0.995:0.005")]
    p_range: String,
}

#[derive(Args)]
struct SweepSeparationArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Separation range lo:hi:step in σ, lo > 0
    #[arg(long, default_value = "0.02:4:0.02")]
    s_range: String,
    /// Optional model for the model-dependent columns
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Model: B or E
    #[arg(long)]
    model: String,
    /// Separation in σ
    #[arg(long)]
    s: f64,
    /// Search bracket lo:hi inside (0,1)
    #[arg(long, default_value = "1e-6:0.999999")]
    bracket: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid points (≥ 2048 for the standard suite)
    #[arg(long, default_value_t = 2048)]
    grid_n: usize,
    /// Grid half-width in σ
    #[arg(long, default_value_t = 12.0)]
    extent: f64,
    /// Superposition phase φ; nonzero runs the oracle-only comparison
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Number of random (model, weight, s) tuples
    #[arg(long, default_value_t = 25)]
    cases: usize,
    /// Seed of the tuple generator
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Dense full-grid audit path (small grid, reduced case set)
    #[arg(long)]
    full_grid: bool,
}

/// Weight from the mutually exclusive --p / --gamma pair.
fn weights_for(model: ModelTag, p: Option<f64>, gamma: Option<f64>) -> Result<WeightSpec> {
    match (model, p, gamma) {
        (ModelTag::Tn, None, Some(g)) => WeightSpec::coherence(g, 0.0),
        (ModelTag::Tn, _, None) => {
            Err(Error::Config("model TN takes --gamma, not --p".into()))
        }
        (_, Some(_), Some(_)) => {
            Err(Error::Config("--p and --gamma are mutually exclusive".into()))
        }
        (_, Some(p), None) => WeightSpec::prior(p),
        (_, None, Some(_)) => Err(Error::Config(format!(
            "model {model} takes --p, not --gamma"
        ))),
        (_, None, None) => Err(Error::Config("a weight (--p or --gamma) is required".into())),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Point(args) => {
            args.common.check_sigma()?;
            let format = args.common.format()?;
            let psf = args.common.psf()?;
            let model: ModelTag = args.model.parse()?;
            let weights = weights_for(model, args.p, args.gamma)?;
            let row = point_row(&psf, model, args.s, &weights)?.rescaled(args.common.sigma);
            args.common.emit(&render_rows(&[row], format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepWeights(args) => {
            args.common.check_sigma()?;
            let format = args.common.format()?;
            let psf = args.common.psf()?;
            let s_list = if args.s.is_empty() { vec![0.5, 0.7, 1.0] } else { args.s.clone() };
            let p_range = parse_range(&args.p_range)?;
            let rows: Vec<SweepRow> = sweep_weights(&psf, &s_list, &p_range)?
                .into_iter()
                .map(|r| r.rescaled(args.common.sigma))
                .collect();
            args.common.emit(&render_rows(&rows, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepSeparation(args) => {
            args.common.check_sigma()?;
            let format = args.common.format()?;
            let psf = args.common.psf()?;
            let s_range = parse_range(&args.s_range)?;
            let model = match &args.model {
                Some(m) => {
                    let tag: ModelTag = m.parse()?;
                    Some((tag, weights_for(tag, args.p, args.gamma)?))
                }
                None if args.p.is_some() || args.gamma.is_some() => {
                    return Err(Error::Config("--p/--gamma need --model".into()));
                }
                None => None,
            };
            let rows: Vec<SweepRow> = sweep_separation(&psf, &s_range, model)?
                .into_iter()
                .map(|r| r.rescaled(args.common.sigma))
                .collect();
            args.common.emit(&render_rows(&rows, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimize(args) => {
            args.common.check_sigma()?;
            let format = args.common.format()?;
            let psf = args.common.psf()?;
            let model: ModelTag = args.model.parse()?;
            let bracket = parse_bracket(&args.bracket)?;
            let mut opt = maximize_precision(&psf, args.s, model, bracket)?;
            let inv2 = 1.0 / (args.common.sigma * args.common.sigma);
            opt.value *= inv2;
            opt.qfi_at_opt *= inv2;
            let text = match format {
                OutputFormat::Json => {
                    let mut t = serde_json::to_string_pretty(&opt).expect("optimum serialize");
                    t.push('\n');
                    t
                }
                OutputFormat::Csv => format!(
                    "p_star,value,rate_at_opt,qfi_at_opt,iterations,converged,grid_fallback\n\
                     {:.11e},{:.11e},{:.11e},{:.11e},{},{},{}\n",
                    opt.p_star,
                    opt.value,
                    opt.rate_at_opt,
                    opt.qfi_at_opt,
                    opt.iterations,
                    opt.converged,
                    opt.grid_fallback,
                ),
            };
            args.common.emit(&text)?;
            if !opt.converged {
                eprintln!("optimizer failed to converge after {} evaluations", opt.iterations);
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate(args) => {
            args.common.check_sigma()?;
            let format = args.common.format()?;
            let psf = args.common.psf()?;
            let cfg = ValidationConfig {
                grid: GridSpec { extent: args.extent, n: args.grid_n },
                phase: args.phi,
                cases: args.cases,
                seed: args.seed,
                full_grid: args.full_grid,
            };
            let report = run_validation(&psf, &cfg)?;
            args.common.emit(&render_validation(&report, format))?;
            if report.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                for c in report.cases.iter().filter(|c| !c.pass) {
                    eprintln!(
                        "case {} out of tolerance: {} at s = {:.6} (rel_spectral {:?}, rel_bures {:.3e})",
                        c.index, c.model, c.s, c.rel_spectral, c.rel_bures
                    );
                }
                if !report.incoherent_pass {
                    eprintln!(
                        "incoherent-mixture QFI {:.8} deviates from (ΔP)²",
                        report.incoherent_qfi
                    );
                }
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn parse_bracket(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("bracket {text:?} must be lo:hi")))?;
    let lo: f64 = lo.parse().map_err(|e| Error::Config(format!("bad bracket lo: {e}")))?;
    let hi: f64 = hi.parse().map_err(|e| Error::Config(format!("bad bracket hi: {e}")))?;
    Ok((lo, hi))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NonConvergence(_) => 3,
        Error::UnreliableSpectral { .. }
        | Error::MatrixSqrt(_)
        | Error::IndeterminateDivergence { .. } => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    // COHFISHER_THREADS caps sweep/validation parallelism.
    if let Ok(threads) = std::env::var("COHFISHER_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: COHFISHER_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
