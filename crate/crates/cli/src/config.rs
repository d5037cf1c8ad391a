use std::path::{Path, PathBuf};

use posdiff::families::FamilySpec;
use posdiff::lame::A2Interpretation;
use posdiff::num::{set_working_precision, DEFAULT_PRECISION};
use posdiff::{Scalar, Window};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const PRECISION_ENV: &str = "POSDIFF_PRECISION";

/// Settings shared by every command. Loadable from JSON with the same field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub tolerance: f64,
    pub window: [i64; 2],
    pub z_interval: [f64; 2],
    pub family: Option<FamilySpec>,
    /// Directory receiving the reports; not part of the report key.
    pub output_path: PathBuf,
    pub base_points: Vec<i64>,
    pub lame: Option<LameConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: DEFAULT_PRECISION,
            tolerance: 1e-9,
            window: [-24, 24],
            z_interval: [-4.0, 4.0],
            family: None,
            output_path: PathBuf::from("reports"),
            base_points: vec![-1, 0, 1],
            lame: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LameConfig {
    pub g: usize,
    pub g2: Scalar,
    pub g3: Scalar,
    /// Lattice steps; when absent, `0.1, 0.05` at genus one and a finer sweep otherwise.
    pub eps: Option<Vec<Scalar>>,
    pub x0: Scalar,
    pub a2_interpretation: A2Interpretation,
    pub span: i64,
}

impl Default for LameConfig {
    fn default() -> Self {
        LameConfig {
            g: 1,
            g2: Scalar::from_i64(4),
            g3: Scalar::zero(),
            eps: None,
            x0: Scalar::ratio(7, 10),
            a2_interpretation: A2Interpretation::Wrapped,
            span: posdiff::lame::DEFAULT_SPAN,
        }
    }
}

impl RunConfig {
    pub fn window(&self) -> Result<Window, Failure> {
        Window::new(self.window[0], self.window[1]).map_err(Failure::from)
    }

    pub fn z_bounds(&self) -> (Scalar, Scalar) {
        (Scalar::from_f64(self.z_interval[0]), Scalar::from_f64(self.z_interval[1]))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Failure::Usage(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.window[0] > self.window[1] {
            return Err(Failure::Usage(format!("window [{}, {}] is empty", self.window[0], self.window[1])));
        }
        let [lo, hi] = self.z_interval;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Failure::Usage(format!("z interval [{lo}, {hi}] is empty")));
        }
        if let Some(spec) = &self.family {
            spec.validate()?;
        }
        if let Some(lame) = &self.lame {
            if lame.g == 0 {
                return Err(Failure::Usage("Lame genus must be at least 1".into()));
            }
            if lame.span < 4 {
                return Err(Failure::Usage(format!("Lame span {} is too short", lame.span)));
            }
            if let Some(eps) = &lame.eps {
                if eps.iter().any(|e| *e <= 0.0) {
                    return Err(Failure::Usage("lattice steps must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Precision from the environment, if set.
pub fn env_precision() -> Result<Option<u32>, Failure> {
    match std::env::var(PRECISION_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{PRECISION_ENV}={text:?} is not a bit count"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::Usage(format!("{PRECISION_ENV}: {e}"))),
    }
}

/// Loads the base configuration and sets the working precision before any
/// decimal in the file is parsed.
///
/// Precision precedence: `flag`, then the file's `precision_bits`, then the
/// environment, then the default.
pub fn load(path: Option<&Path>, flag: Option<u32>) -> Result<RunConfig, Failure> {
    let value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
            Some(serde_json::from_str::<serde_json::Value>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let from_file = match value.as_ref().and_then(|v| v.get("precision_bits")) {
        Some(v) => Some(
            v.as_u64()
                .and_then(|b| u32::try_from(b).ok())
                .ok_or_else(|| Failure::Usage(format!("precision_bits {v} is not a bit count")))?,
        ),
        None => None,
    };
    let bits = match flag.or(from_file) {
        Some(b) => b,
        None => env_precision()?.unwrap_or(DEFAULT_PRECISION),
    };
    set_working_precision(bits)?;
    let mut config = match value {
        Some(v) => serde_json::from_value::<RunConfig>(v).map_err(|e| Failure::Usage(format!("config: {e}")))?,
        None => RunConfig::default(),
    };
    config.precision_bits = bits;
    Ok(config)
}

pub fn parse_scalar(name: &str, text: &str) -> Result<Scalar, Failure> {
    Scalar::parse(text).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

/// `lo,hi` for clap value parsers.
pub fn parse_pair<T: std::str::FromStr>(text: &str) -> Result<[T; 2], String> {
    let mut parts = parse_list::<T>(text)?.into_iter();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) => Ok([a, b]),
        _ => Err(format!("expected two comma-separated values, got {text:?}")),
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("cannot parse {p:?}")))
        .collect()
}
