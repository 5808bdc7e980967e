//! Run-configuration values and their text parsers.
//!
//! These parsers sit on the untrusted-input boundary (command-line values
//! and profile files), so they validate aggressively and never panic; the
//! fuzz targets under `fuzz/` drive them directly.

use std::path::{Path, PathBuf};

use crate::psf::PsfModel;
use crate::{Error, Result};

/// Cap on the number of values a range may expand to.
const MAX_RANGE_POINTS: usize = 2_000_000;

/// Profile selector: `gaussian:<sigma>` or `file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsfSpec {
    Gaussian { sigma: f64 },
    File { path: PathBuf },
}

/// Parse a profile selector.
pub fn parse_psf_spec(text: &str) -> Result<PsfSpec> {
    let bad = Error::Config;
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| bad(format!("psf spec {text:?} must be gaussian:<sigma> or file:<path>")))?;
    match kind {
        "gaussian" => {
            let sigma: f64 = arg
                .parse()
                .map_err(|e| bad(format!("bad gaussian width {arg:?}: {e}")))?;
            if !sigma.is_finite() || sigma <= 0.0 {
                return Err(bad(format!("gaussian width must be positive, got {arg}")));
            }
            Ok(PsfSpec::Gaussian { sigma })
        }
        "file" => {
            if arg.is_empty() {
                return Err(bad("empty profile path".into()));
            }
            Ok(PsfSpec::File { path: PathBuf::from(arg) })
        }
        other => Err(bad(format!("unknown psf kind {other:?}; expected gaussian or file"))),
    }
}

/// Load the profile a spec points at.
pub fn load_psf(spec: &PsfSpec) -> Result<PsfModel> {
    match spec {
        PsfSpec::Gaussian { sigma } => PsfModel::gaussian(*sigma),
        PsfSpec::File { path } => PsfModel::from_profile_file(Path::new(path)),
    }
}

/// An inclusive numeric range `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

/// Parse `lo:hi:step`; the range must be ordered, the step positive, and
/// the expansion bounded.
pub fn parse_range(text: &str) -> Result<RangeSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("range {text:?} must have the form lo:hi:step")));
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|e| Error::Config(format!("bad range component {part:?}: {e}")))?;
        if !slot.is_finite() {
            return Err(Error::Config(format!("range component {part:?} is not finite")));
        }
    }
    let spec = RangeSpec { lo: nums[0], hi: nums[1], step: nums[2] };
    spec.check()?;
    Ok(spec)
}

impl RangeSpec {
    fn check(&self) -> Result<()> {
        if self.step <= 0.0 {
            return Err(Error::Config(format!("range step must be positive, got {}", self.step)));
        }
        if self.lo > self.hi {
            return Err(Error::Config(format!(
                "range is empty: lo {} exceeds hi {}",
                self.lo, self.hi
            )));
        }
        let count = (self.hi - self.lo) / self.step;
        if !count.is_finite() || count > MAX_RANGE_POINTS as f64 {
            return Err(Error::Config(format!(
                "range expands to more than {MAX_RANGE_POINTS} points"
            )));
        }
        Ok(())
    }

    /// Expand to `lo, lo+step, …` up to and including `hi` (with a small
    /// rounding slack so the endpoint survives accumulation error).
    pub fn values(&self) -> Vec<f64> {
        let slack = self.step * 1e-9;
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let x = self.lo + i as f64 * self.step;
            if x > self.hi + slack {
                break;
            }
            out.push(x.min(self.hi));
            i += 1;
        }
        out
    }
}

/// Output encoding for the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}
