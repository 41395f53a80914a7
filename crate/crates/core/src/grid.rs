//! Sorted evaluation grids for `y` sweeps and `λ` sweeps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A finite, sorted, non-empty list of evaluation points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridSpec {
    points: Vec<f64>,
}

impl GridSpec {
    /// Builds a grid from explicit points; they must be finite and sorted.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("grid must contain at least one point"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(invalid("grid points must be finite"));
        }
        if points.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("grid points must be sorted"));
        }
        Ok(GridSpec { points })
    }

    /// `n` equally spaced points from `a` to `b` inclusive.
    pub fn linspace(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(a < b) {
            return Err(invalid(format!("linspace needs a < b and n >= 2, got ({a}, {b}, {n})")));
        }
        let step = (b - a) / (n - 1) as f64;
        let pts = (0..n).map(|i| if i == n - 1 { b } else { a + step * i as f64 }).collect();
        GridSpec::new(pts)
    }

    /// `n` logarithmically spaced points from `a` to `b` inclusive (`0 < a < b`).
    pub fn logspace(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(a > 0.0 && a < b) {
            return Err(invalid(format!("logspace needs 0 < a < b and n >= 2, got ({a}, {b}, {n})")));
        }
        let (la, lb) = (a.ln(), b.ln());
        let step = (lb - la) / (n - 1) as f64;
        let pts = (0..n)
            .map(|i| match i {
                0 => a,
                i if i == n - 1 => b,
                i => (la + step * i as f64).exp(),
            })
            .collect();
        GridSpec::new(pts)
    }

    /// Powers of two `2^lo, 2^(lo+step), …, 2^hi`.
    pub fn powers_of_two(lo: i32, hi: i32, step: i32) -> Result<Self> {
        if step <= 0 || lo > hi {
            return Err(invalid("powers_of_two needs lo <= hi and step > 0"));
        }
        GridSpec::new((lo..=hi).step_by(step as usize).map(|k| 2f64.powi(k)).collect())
    }

    /// Default `λ` sweep `{2⁴, 2⁶, 2⁸, 2¹⁰, 2¹²}`.
    pub fn default_lambdas() -> Self {
        GridSpec::powers_of_two(4, 12, 2).expect("static grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Union of two grids, sorted, exact duplicates removed.
    pub fn merged(&self, other: &GridSpec) -> GridSpec {
        let mut pts: Vec<f64> = self.points.iter().chain(other.points.iter()).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        GridSpec { points: pts }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Accepts `a,b,c`, `linspace:a:b:n` or `logspace:a:b:n`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let ranged = |rest: &str| -> Result<(f64, f64, usize)> {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(invalid(format!("expected a:b:n, got `{rest}`")));
            }
            Ok((parse_f64(parts[0])?, parse_f64(parts[1])?, parse_usize(parts[2])?))
        };
        if let Some(rest) = s.strip_prefix("linspace:") {
            let (a, b, n) = ranged(rest)?;
            return GridSpec::linspace(a, b, n);
        }
        if let Some(rest) = s.strip_prefix("logspace:") {
            let (a, b, n) = ranged(rest)?;
            return GridSpec::logspace(a, b, n);
        }
        let trimmed = s.trim_start_matches('[').trim_end_matches(']');
        let pts = trimmed.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
        GridSpec::new(pts)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|p| format!("{p:?}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: `{}`", s.trim())))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse::<usize>().map_err(|_| invalid(format!("not a count: `{}`", s.trim())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!("0.5,1,2".parse::<GridSpec>().unwrap().points(), &[0.5, 1.0, 2.0]);
        assert_eq!("[1, 2]".parse::<GridSpec>().unwrap().points(), &[1.0, 2.0]);
        let g: GridSpec = "logspace:0.01:3:24".parse().unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!(g.points()[0], 0.01);
        assert_eq!(g.points()[23], 3.0);
        let g: GridSpec = "linspace:-1:1:5".parse().unwrap();
        assert_eq!(g.points(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn rejects_unsorted_and_garbage() {
        assert!("2,1".parse::<GridSpec>().is_err());
        assert!("a,b".parse::<GridSpec>().is_err());
        assert!("logspace:0:1:3".parse::<GridSpec>().is_err());
    }

    #[test]
    fn display_round_trips() {
        let g: GridSpec = "logspace:0.01:3:7".parse().unwrap();
        let back: GridSpec = g.to_string().parse().unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn default_lambda_sweep() {
        assert_eq!(GridSpec::default_lambdas().points(), &[16.0, 64.0, 256.0, 1024.0, 4096.0]);
    }
}
