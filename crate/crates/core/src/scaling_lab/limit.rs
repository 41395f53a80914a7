//! Measurement of `E(λ) = sup_y |I_λφ(y) − ∫_0^y φ| / (1+|y|)^{m+1}` over a
//! `λ` sweep and its log-log rate fit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::TestFunction;
use crate::grid::GridSpec;
use crate::operators::apply_i_lambda;
use crate::quadrature::PVConfig;

/// Ordinary least-squares fit of `log E` against `log λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(log λ, log E)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
}

/// Fits `log e = intercept + slope · log λ` over the pairs with `e > 0`.
pub fn fit_log_log(samples: &[(f64, f64)]) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(l, e)| *l > 0.0 && *e > 0.0 && e.is_finite())
        .map(|(l, e)| (l.ln(), e.ln()))
        .collect();
    if points.len() < 2 {
        return Err(Error::DegenerateFit(points.len()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("rate fit needs at least two distinct lambda values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(RateFit { slope, intercept, r_squared, points })
}

/// `y` points of the study: a fixed base grid plus `λ`-aligned points `s/λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitGrid {
    pub base: GridSpec,
    pub aligned: Vec<f64>,
}

impl Default for LimitGrid {
    /// 24 log-spaced points in `[10⁻², 3]` plus `{10⁻³, 10⁻²}/λ`.
    fn default() -> Self {
        LimitGrid { base: GridSpec::logspace(1e-2, 3.0, 24).expect("static grid"), aligned: vec![1e-3, 1e-2] }
    }
}

impl LimitGrid {
    pub fn points_for(&self, lambda: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self.base.points().to_vec();
        pts.extend(self.aligned.iter().map(|s| s / lambda));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// One `λ` of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLimitRow {
    pub lambda: f64,
    /// `E(λ)`.
    pub e: f64,
    pub e_sqrt_lambda: f64,
    /// Largest weighted quadrature budget (estimate plus truncation) over the `y` grid.
    pub budget: f64,
    /// Where the supremum is attained.
    pub argmax_y: f64,
    /// Budget exceeds 10 % of `E(λ)`.
    pub noise_dominated: bool,
}

/// Result of a scaling-limit sweep for one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingLimitStudy {
    pub function: String,
    pub m: i32,
    pub rows: Vec<ScalingLimitRow>,
    /// `None` when fewer than two `E(λ)` are positive.
    pub fit: Option<RateFit>,
    /// `E(λ) = 0` exactly at every `λ` with zero budget.
    pub exact_zero: bool,
}

impl ScalingLimitStudy {
    pub fn noise_dominated(&self) -> bool {
        !self.exact_zero && self.rows.iter().any(|r| r.noise_dominated)
    }

    /// `max E√λ / min E√λ` over the sweep.
    pub fn uniform_ratio(&self) -> f64 {
        let v: Vec<f64> = self.rows.iter().map(|r| r.e_sqrt_lambda).collect();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            1.0
        } else {
            max / min
        }
    }

    /// `E√λ` never grows by more than `tolerance` from one `λ` to the next.
    pub fn non_increasing_within(&self, tolerance: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].e_sqrt_lambda <= (1.0 + tolerance) * w[0].e_sqrt_lambda)
    }

    /// `(λ, E)` pairs.
    pub fn table(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.lambda, r.e)).collect()
    }
}

/// Runs the sweep. `φ` needs a closed-form antiderivative.
pub fn measure_scaling_limit(
    phi: &TestFunction,
    lambdas: &GridSpec,
    grid: &LimitGrid,
    m: i32,
    cfg: &PVConfig,
) -> Result<ScalingLimitStudy> {
    cfg.validate()?;
    if !phi.has_antideriv() {
        return Err(Error::MissingAntiderivative(phi.label().to_string()));
    }
    if lambdas.points().iter().any(|&l| !(l > 0.0)) {
        return Err(invalid("lambdas must be positive"));
    }
    if grid.base.points().iter().any(|&y| !(y > 0.0)) {
        return Err(invalid("scaling-limit y grid must lie in (0, ∞)"));
    }

    let jobs: Vec<(usize, f64, f64)> = lambdas
        .points()
        .iter()
        .enumerate()
        .flat_map(|(i, &l)| grid.points_for(l).into_iter().map(move |y| (i, l, y)))
        .collect();
    let evals: Vec<(usize, f64, f64, f64)> = jobs
        .par_iter()
        .map(|&(i, l, y)| {
            let r = apply_i_lambda(phi, l, y, cfg)?;
            let w = (1.0 + y.abs()).powi(m + 1);
            Ok((i, y, (r.value - phi.antideriv(y)?).abs() / w, r.budget() / w))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<ScalingLimitRow> = lambdas
        .points()
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let mine = evals.iter().filter(|e| e.0 == i);
            let (mut e, mut argmax_y, mut budget) = (0.0f64, f64::NAN, 0.0f64);
            for &(_, y, err, b) in mine {
                if err > e || argmax_y.is_nan() {
                    e = e.max(err);
                    argmax_y = y;
                }
                budget = budget.max(b);
            }
            ScalingLimitRow {
                lambda,
                e,
                e_sqrt_lambda: e * lambda.sqrt(),
                budget,
                argmax_y,
                noise_dominated: budget > 0.1 * e,
            }
        })
        .collect();

    let exact_zero = rows.iter().all(|r| r.e == 0.0 && r.budget == 0.0);
    let table: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda, r.e)).collect();
    let fit = fit_log_log(&table).ok();
    Ok(ScalingLimitStudy { function: phi.label().to_string(), m, rows, fit, exact_zero })
}
