//! Run configuration: a plain-text `key = value` file plus `--set`
//! overrides, resolved against documented defaults.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `function` | `const1` | catalog label of the input |
//! | `operator` | `I_lambda` | `H`, `I` or `I_lambda` (apply) |
//! | `lambda` | `100` | `λ` for `I_lambda` (apply) |
//! | `y_grid` | `0.5,1,2` | evaluation points (apply); base grid override (limit-study) |
//! | `lambdas` | `16,64,256,1024,4096` | `λ` sweep (limit-study) |
//! | `m` | class of `function` | polynomial weight exponent (limit-study) |
//! | `claim` | `all` | claim name or `all` (certify) |
//! | `seed` | `0x5EED` | seed of the randomized pair sampling |
//! | `output_dir` | unset | write artifacts here instead of stdout |
//! | `fold_radius` | `0.5` | quadrature: graded zone half-width |
//! | `truncation_radius` | `40` | quadrature: tail cut-off |
//! | `base_panels` | `8` | quadrature: initial panels |
//! | `max_refine_depth` | `50` | quadrature: bisection limit |
//! | `rel_tol` | `1e-8` | quadrature: relative tolerance |
//! | `abs_tol` | `1e-10` | quadrature: absolute tolerance |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use pvscale_core::{Claim, GridSpec, OperatorKind, PVConfig, DEFAULT_SEED};
use thiserror::Error;

/// Every accepted key, in header order.
pub const KEYS: [&str; 15] = [
    "function",
    "operator",
    "lambda",
    "y_grid",
    "lambdas",
    "m",
    "claim",
    "seed",
    "output_dir",
    "fold_radius",
    "truncation_radius",
    "base_panels",
    "max_refine_depth",
    "rel_tol",
    "abs_tol",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`, got `{text}`")]
    Syntax { path: String, line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{0}` given twice in the file")]
    Duplicate(String),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
}

/// Which claims a `certify` run covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClaimSelection {
    All,
    One(Claim),
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub function: String,
    pub operator: String,
    pub lambda: f64,
    pub y_grid: Option<GridSpec>,
    pub lambdas: GridSpec,
    pub m: Option<i32>,
    pub claim: ClaimSelection,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub pv: PVConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            function: "const1".to_string(),
            operator: "I_lambda".to_string(),
            lambda: 100.0,
            y_grid: None,
            lambdas: GridSpec::default_lambdas(),
            m: None,
            claim: ClaimSelection::All,
            seed: DEFAULT_SEED,
            output_dir: None,
            pv: PVConfig::default(),
        }
    }
}

/// Raw `key → value` pairs from a config file.
pub fn parse_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
    parse_text(&text, &path.display().to_string())
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_text(text: &str, origin: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = parse_assignment(line)
            .ok_or_else(|| ConfigError::Syntax { path: origin.to_string(), line: i + 1, text: raw.to_string() })?;
        if out.iter().any(|(key, _)| *key == k) {
            return Err(ConfigError::Duplicate(k));
        }
        out.push((k, v));
    }
    Ok(out)
}

/// Splits `key = value` (also used for `--set key=value`).
pub fn parse_assignment(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

fn value_err(key: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Value { key: key.to_string(), reason: reason.to_string() }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| value_err(key, e))
}

fn parse_seed(v: &str) -> Result<u64, ConfigError> {
    let r = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse(),
    };
    r.map_err(|e| value_err("seed", e))
}

impl RunConfig {
    /// Applies assignments in order; later ones win.
    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<(), ConfigError> {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        self.validate()
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "function" => self.function = v.to_string(),
            "operator" => {
                OperatorKind::parse(v, Some(1.0)).map_err(|e| value_err(key, e))?;
                self.operator = v.to_string();
            }
            "lambda" => self.lambda = parse_num(key, v)?,
            "y_grid" => self.y_grid = Some(v.parse().map_err(|e| value_err(key, e))?),
            "lambdas" => self.lambdas = v.parse().map_err(|e| value_err(key, e))?,
            "m" => self.m = Some(parse_num(key, v)?),
            "claim" => {
                self.claim = if v == "all" {
                    ClaimSelection::All
                } else {
                    ClaimSelection::One(v.parse().map_err(|e| value_err(key, e))?)
                }
            }
            "seed" => self.seed = parse_seed(v)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            "fold_radius" => self.pv.fold_radius = parse_num(key, v)?,
            "truncation_radius" => self.pv.truncation_radius = parse_num(key, v)?,
            "base_panels" => self.pv.base_panels = parse_num(key, v)?,
            "max_refine_depth" => self.pv.max_refine_depth = parse_num(key, v)?,
            "rel_tol" => self.pv.rel_tol = parse_num(key, v)?,
            "abs_tol" => self.pv.abs_tol = parse_num(key, v)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.pv.validate().map_err(|e| value_err("quadrature", e))?;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(value_err("lambda", "must be positive and finite"));
        }
        Ok(())
    }

    /// The resolved value of every key, for the output header.
    pub fn resolved(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        m.insert("function", self.function.clone());
        m.insert("operator", self.operator.clone());
        m.insert("lambda", format!("{:?}", self.lambda));
        m.insert("y_grid", self.y_grid.as_ref().map_or("default".to_string(), |g| g.to_string()));
        m.insert("lambdas", self.lambdas.to_string());
        m.insert("m", self.m.map_or("auto".to_string(), |m| m.to_string()));
        m.insert(
            "claim",
            match &self.claim {
                ClaimSelection::All => "all".to_string(),
                ClaimSelection::One(c) => c.name().to_string(),
            },
        );
        m.insert("seed", format!("{:#x}", self.seed));
        m.insert("output_dir", self.output_dir.as_ref().map_or("stdout".to_string(), |p| p.display().to_string()));
        m.insert("fold_radius", format!("{:?}", self.pv.fold_radius));
        m.insert("truncation_radius", format!("{:?}", self.pv.truncation_radius));
        m.insert("base_panels", self.pv.base_panels.to_string());
        m.insert("max_refine_depth", self.pv.max_refine_depth.to_string());
        m.insert("rel_tol", format!("{:?}", self.pv.rel_tol));
        m.insert("abs_tol", format!("{:?}", self.pv.abs_tol));
        m
    }

    pub fn operator_kind(&self) -> Result<OperatorKind, ConfigError> {
        OperatorKind::parse(&self.operator, Some(self.lambda)).map_err(|e| value_err("operator", e))
    }
}
