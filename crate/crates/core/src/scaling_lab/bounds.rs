//! Certificates for the kernel estimates, the weighted convolution bound
//! and the boundedness of `H` and `I` on weighted Schauder spaces.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::catalog::lookup;
use crate::funcspace::{weight_eval, PairLayout, PairScheme, SchauderParams, TestFunction, WeightKind, Window};
use crate::grid::GridSpec;
use crate::operators::{apply_h, apply_i, kernel_k, kernel_k_derivative, kernel_k_lambda};
use crate::quadrature::{integrate_with_breaks, truncation_bound_exp, PVConfig};
use crate::scaling_lab::certificate::{relative_growth, safe_ratio, BoundCertificate, CertificateSample};


fn ln_convolution_rhs(m: i32, kappa: f64, ax: f64) -> f64 {
    if kappa == -1.0 {
        if m >= 0 {
            -ax + f64::from(m + 1) * ax.ln_1p()
        } else {
            -ax + ax.ln_1p().ln()
        }
    } else {
        f64::from(m) * ax.ln_1p() + kappa * ax
    }
}

fn convolution_rhs_form(m: i32, kappa: f64) -> String {
    if kappa == -1.0 {
        if m >= 0 {
            format!("e^(-|x|) (1+|x|)^{}", m + 1)
        } else {
            "e^(-|x|) log(1+|x|)".to_string()
        }
    } else {
        format!("(1+|x|)^{m} e^({kappa}|x|)")
    }
}

/// `∫ e^{−|z|} (1+|x−z|)^m e^{κ|x−z|} dz` divided by the claimed majorant,
/// at `|x|` (the integral is even in `x`).
fn convolution_ratio(m: i32, kappa: f64, x: f64, cfg: &PVConfig) -> Result<(f64, f64)> {
    let ax = x.abs();
    let ln_rhs = ln_convolution_rhs(m, kappa, ax);
    let mf = f64::from(m);
    let f = |z: f64| {
        let d = (ax - z).abs();
        (-z.abs() + mf * d.ln_1p() + kappa * d - ln_rhs).exp()
    };
    let reach = cfg.truncation_radius / (1.0 - kappa);
    let (lo, hi) = (-reach, ax + reach);
    let n = cfg.base_panels;
    let mut breaks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    breaks[n] = hi;
    breaks.extend([0.0, ax]);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut r = integrate_with_breaks(f, &breaks, cfg)?;
    // Right tail: z = x + w. Left tail: z = −w, with (1+x+w)^m handled per sign of m.
    let right = (-ax - ln_rhs).exp() * truncation_bound_exp(m, kappa, reach)?;
    let left = if m >= 0 {
        (ax - ln_rhs).exp() * truncation_bound_exp(m, kappa, reach + ax)?
    } else {
        (kappa * ax - ln_rhs).exp() * truncation_bound_exp(m, kappa, reach)?
    };
    r.truncation_bound = right + left;
    Ok((r.value, ln_rhs.exp()))
}

/// Weighted convolution bound: for `|x| > 3`,
/// `∫ e^{−|z|}(1+|x−z|)^m e^{κ|x−z|} dz ≤ C (1+|x|)^m e^{κ|x|}` when
/// `−1 < κ < 1`, with the majorant `e^{−|x|}(1+|x|)^{m+1}` (`m ≥ 0`) or
/// `e^{−|x|} log(1+|x|)` (`m = −1`) at `κ = −1`.
///
/// Passes when the measured constant is finite and grows by less than 5 %
/// when the quadrature is refined.
pub fn certify_convolution_weight(m: i32, kappa: f64, x_grid: &GridSpec, cfg: &PVConfig) -> Result<BoundCertificate> {
    cfg.validate()?;
    if !(-1.0..1.0).contains(&kappa) {
        return Err(Error::GrowthOutOfRange { kappa, reason: "convolution bound needs -1 <= kappa < 1" });
    }
    if kappa == -1.0 && m < -1 {
        return Err(invalid(format!("at kappa = -1 the bound needs m >= -1, got {m}")));
    }
    if x_grid.points().iter().any(|x| x.abs() <= 3.0) {
        return Err(Error::Domain("convolution bound is stated for |x| > 3".to_string()));
    }
    let pts = x_grid.points();
    let base: Vec<(f64, f64)> =
        pts.par_iter().map(|&x| convolution_ratio(m, kappa, x, cfg)).collect::<Result<_>>()?;
    let refined_cfg = cfg.refined();
    let refined: Vec<(f64, f64)> =
        pts.par_iter().map(|&x| convolution_ratio(m, kappa, x, &refined_cfg)).collect::<Result<_>>()?;

    let mut cert = BoundCertificate::new(format!("convolution-weight.m{m}.k{kappa}"), convolution_rhs_form(m, kappa), 0)
        .with_axis("x", pts.to_vec());
    cert.absorb(
        pts.iter()
            .zip(&base)
            .map(|(&x, &(ratio, rhs))| CertificateSample::new(None, &[("x", x)], ratio * rhs, rhs))
            .collect(),
    );
    let c_ref = refined.iter().map(|r| r.0).fold(0.0, f64::max);
    let growth = relative_growth(cert.measured_constant, c_ref);
    cert.refined_constant = Some(c_ref);
    cert.growth = Some(growth);
    cert.pass = cert.measured_constant.is_finite() && growth < 0.05;
    Ok(cert)
}

/// Pointwise kernel estimates with explicit constants on a `t` grid:
/// `|K| ≤ 1/|t|` and `|K′| ≤ 1/t²` for `|t| ≤ 1`; `|K| ≤ 2e^{−|t|}` and
/// `|K′| ≤ 4e^{−|t|}` for `|t| > 1`. The measured constant is the largest
/// bound utilisation (pass iff ≤ 1).
pub fn certify_kernel_bounds(t_grid: &GridSpec) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new("kernel-bounds", "|t|^-1, 2e^-|t|; |t|^-2, 4e^-|t|", 0)
        .with_axis("t", t_grid.points().to_vec());
    let (mut near_k, mut near_d, mut far_k, mut far_d) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &t in t_grid.points() {
        if t == 0.0 {
            continue;
        }
        let (k, d) = (kernel_k(t)?.abs(), kernel_k_derivative(t)?.abs());
        let s = t.abs();
        if s <= 1.0 {
            near_k = near_k.max(k * s);
            near_d = near_d.max(d * s * s);
        } else {
            far_k = far_k.max(k * s.exp() / 2.0);
            far_d = far_d.max(d * s.exp() / 4.0);
        }
    }
    cert.diagnostic("near_kernel", near_k);
    cert.diagnostic("near_derivative", near_d);
    cert.diagnostic("far_kernel", far_k);
    cert.diagnostic("far_derivative", far_d);
    cert.measured_constant = near_k.max(near_d).max(far_k).max(far_d);
    cert.pass = cert.measured_constant <= 1.0;
    Ok(cert)
}

/// Indicator limit of `K_λ(y, ·)`: on `η ∈ [0.1y, 0.9y]`,
/// `|K_λ(y,η) − 1| ≤ 8 e^{−0.2λy}`. Ratio of the two sides; pass iff ≤ 1.
/// The right side carries a rounding allowance of `8ε` since `K_λ` is
/// evaluated in double precision.
pub fn certify_kernel_limit(lambdas: &[f64], ys: &[f64]) -> Result<BoundCertificate> {
    let mut cert = BoundCertificate::new("kernel-limit", "8 e^(-0.2 lambda y) + 8 eps", 0)
        .with_axis("lambda", lambdas.to_vec())
        .with_axis("y", ys.to_vec());
    let mut samples = Vec::new();
    for &lambda in lambdas {
        for &y in ys {
            if !(y > 0.0) {
                return Err(Error::Domain("indicator limit needs y > 0".to_string()));
            }
            let rhs = 8.0 * (-0.2 * lambda * y).exp() + 8.0 * f64::EPSILON;
            let mut worst = 0.0f64;
            for i in 0..=80 {
                let eta = y * (0.1 + 0.8 * f64::from(i) / 80.0);
                worst = worst.max((kernel_k_lambda(lambda, y, eta)? - 1.0).abs());
            }
            samples.push(CertificateSample::new(None, &[("lambda", lambda), ("y", y)], worst, rhs));
        }
    }
    cert.absorb(samples);
    cert.pass = cert.measured_constant <= 1.0;
    Ok(cert)
}

/// Which operator a window study applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundedOperator {
    H,
    I,
}

/// Paired-window comparison of `‖Op φ‖_target / ‖φ‖_source`.
///
/// Interior cases pass when the ratio of every function changes by less
/// than 10 % from the small to the large window. Endpoint cases, which
/// carry a `naive_target`, additionally require that the ratio measured in
/// the naive target grows by at least 10 %: the loss of the naive space is
/// visible while the upgraded target stays stable.
#[derive(Debug, Clone)]
pub struct WindowStudy {
    pub claim_id: String,
    pub operator: BoundedOperator,
    pub source: SchauderParams,
    pub target: SchauderParams,
    pub naive_target: Option<SchauderParams>,
    pub catalog: Vec<TestFunction>,
    pub small: Window,
    pub large: Window,
    pub scheme: PairScheme,
}

const STABLE_CHANGE: f64 = 0.10;

impl WindowStudy {
    fn new(
        claim_id: &str,
        operator: BoundedOperator,
        source: SchauderParams,
        target: SchauderParams,
        naive_target: Option<SchauderParams>,
        labels: &[&str],
    ) -> Self {
        WindowStudy {
            claim_id: claim_id.to_string(),
            operator,
            source,
            target,
            naive_target,
            catalog: labels.iter().map(|l| lookup(l).expect("catalog label")).collect(),
            small: Window::symmetric(10.0).expect("static window"),
            large: Window::symmetric(20.0).expect("static window"),
            scheme: PairScheme::default().with_spacing(0.1),
        }
    }
}

/// The standard boundedness studies: interior growth classes for `H` and
/// `I`, and the two endpoint cases of each.
pub fn standard_window_studies() -> Vec<WindowStudy> {
    let a = 0.5;
    use BoundedOperator::{H, I};
    vec![
        WindowStudy::new(
            "h-bounded.interior",
            H,
            SchauderParams::holder(0, 0.0, a),
            SchauderParams::holder(0, 0.0, a),
            None,
            &["sin", "lorentzian", "tanh"],
        ),
        WindowStudy::new(
            "h-bounded.endpoint.poly",
            H,
            SchauderParams::holder(0, -1.0, a),
            SchauderParams::holder(1, -1.0, a),
            Some(SchauderParams::holder(0, -1.0, a)),
            &["sech"],
        ),
        WindowStudy::new(
            "h-bounded.endpoint.log",
            H,
            SchauderParams::holder(-1, -1.0, a),
            SchauderParams::log_holder(-1.0, a),
            Some(SchauderParams::holder(-1, -1.0, a)),
            &["sech_inv1p"],
        ),
        WindowStudy::new(
            "i-bounded.interior",
            I,
            SchauderParams::holder(0, 1.0, a),
            SchauderParams::holder(0, 1.0, a),
            None,
            &["cosh_sin", "cosh_cos", "cosh_lorentzian"],
        ),
        WindowStudy::new(
            "i-bounded.endpoint.poly",
            I,
            SchauderParams::holder(0, 0.0, a),
            SchauderParams::holder(1, 0.0, a),
            Some(SchauderParams::holder(0, 0.0, a)),
            &["const1"],
        ),
        WindowStudy::new(
            "i-bounded.endpoint.log",
            I,
            SchauderParams::holder(-1, 0.0, a),
            SchauderParams::log_holder(0.0, a),
            Some(SchauderParams::holder(-1, 0.0, a)),
            &["inv1p"],
        ),
    ]
}

/// Per-function outcome of a window study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRatios {
    pub function: String,
    pub small: f64,
    pub large: f64,
    pub naive_small: Option<f64>,
    pub naive_large: Option<f64>,
}

/// Absolute tolerance matched to the size of the target weight at `y`.
fn weighted_cfg(cfg: &PVConfig, target: &SchauderParams, y: f64) -> PVConfig {
    let w = weight_eval(target, y).max(1e-3 * (target.kappa * y.abs()).exp());
    PVConfig { abs_tol: (cfg.abs_tol * w).max(1e-300), ..*cfg }
}

fn window_ratios(study: &WindowStudy, phi: &TestFunction, cfg: &PVConfig) -> Result<WindowRatios> {
    let large = PairLayout::new(&study.large, &study.scheme)?;
    let small = PairLayout::new(&study.small, &study.scheme)?;
    let op_values = large.try_evaluate(|y| {
        let c = weighted_cfg(cfg, &study.target, y);
        let r = match study.operator {
            BoundedOperator::H => apply_h(phi, y, &c)?,
            BoundedOperator::I => apply_i(phi, y, &c)?,
        };
        Ok(r.value)
    })?;
    let lookup_table: HashMap<u64, f64> =
        large.points().iter().zip(&op_values).map(|(x, v)| (x.to_bits(), *v)).collect();
    let small_values = small.try_evaluate(|y| match lookup_table.get(&y.to_bits()) {
        Some(v) => Ok(*v),
        None => {
            let c = weighted_cfg(cfg, &study.target, y);
            Ok(match study.operator {
                BoundedOperator::H => apply_h(phi, y, &c)?,
                BoundedOperator::I => apply_i(phi, y, &c)?,
            }
            .value)
        }
    })?;
    let src_large = large.schauder_from_values(&large.evaluate(|x| phi.eval(x)), &study.source)?;
    let src_small = small.schauder_from_values(&small.evaluate(|x| phi.eval(x)), &study.source)?;
    let ratio = |layout: &PairLayout, vals: &[f64], p: &SchauderParams, src: f64| -> Result<f64> {
        Ok(safe_ratio(layout.schauder_from_values(vals, p)?, src))
    };
    let naive = |layout: &PairLayout, vals: &[f64], src: f64| -> Result<Option<f64>> {
        study.naive_target.as_ref().map(|p| ratio(layout, vals, p, src)).transpose()
    };
    Ok(WindowRatios {
        function: phi.label().to_string(),
        small: ratio(&small, &small_values, &study.target, src_small)?,
        large: ratio(&large, &op_values, &study.target, src_large)?,
        naive_small: naive(&small, &small_values, src_small)?,
        naive_large: naive(&large, &op_values, src_large)?,
    })
}

fn certify_window_study(study: &WindowStudy, cfg: &PVConfig) -> Result<BoundCertificate> {
    cfg.validate()?;
    study.source.validate()?;
    study.target.validate()?;
    if study.catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let per_fn: Vec<WindowRatios> =
        study.catalog.iter().map(|phi| window_ratios(study, phi, cfg)).collect::<Result<_>>()?;

    let target_form = match study.target.weight {
        WeightKind::Polynomial { m } => format!("Lambda^a_(m={m}, kappa={})", study.target.kappa),
        WeightKind::Logarithmic => format!("Lambda^a_(log, kappa={})", study.target.kappa),
    };
    let mut cert = BoundCertificate::new(study.claim_id.clone(), format!("||Op phi||_{target_form} / ||phi||_source"), study.scheme.seed)
        .with_axis("window_radius", vec![study.small.hi, study.large.hi]);
    let mut samples = Vec::new();
    let mut max_change = 0.0f64;
    let mut min_naive_growth = f64::INFINITY;
    for r in &per_fn {
        samples.push(CertificateSample::new(Some(&r.function), &[("window_radius", study.large.hi)], r.large, 1.0));
        samples.push(CertificateSample::new(Some(&r.function), &[("window_radius", study.small.hi)], r.small, 1.0));
        max_change = max_change.max(relative_growth(r.small, r.large).abs());
        if let (Some(s), Some(l)) = (r.naive_small, r.naive_large) {
            min_naive_growth = min_naive_growth.min(relative_growth(s, l));
        }
    }
    cert.samples = samples;
    cert.measured_constant = per_fn.iter().map(|r| r.large).fold(0.0, f64::max);
    cert.refined_constant = Some(cert.measured_constant);
    cert.growth = Some(max_change);
    cert.diagnostic("max_window_change", max_change);
    let stable = max_change < STABLE_CHANGE && cert.measured_constant.is_finite();
    cert.pass = if study.naive_target.is_some() {
        cert.diagnostic("min_naive_growth", min_naive_growth);
        stable && min_naive_growth >= STABLE_CHANGE
    } else {
        stable
    };
    Ok(cert)
}

/// Boundedness of `H` measured by a [`WindowStudy`].
pub fn certify_h_bound(study: &WindowStudy, cfg: &PVConfig) -> Result<BoundCertificate> {
    if study.operator != BoundedOperator::H {
        return Err(invalid("study is not for H"));
    }
    if !(study.source.kappa >= -1.0 && study.source.kappa < 1.0) {
        return Err(Error::GrowthOutOfRange { kappa: study.source.kappa, reason: "H bounds need -1 <= kappa < 1" });
    }
    certify_window_study(study, cfg)
}

/// Boundedness of `I` measured by a [`WindowStudy`].
pub fn certify_i_bound(study: &WindowStudy, cfg: &PVConfig) -> Result<BoundCertificate> {
    if study.operator != BoundedOperator::I {
        return Err(invalid("study is not for I"));
    }
    if !(study.source.kappa >= 0.0 && study.source.kappa < 2.0) {
        return Err(Error::GrowthOutOfRange { kappa: study.source.kappa, reason: "I bounds need 0 <= kappa < 2" });
    }
    certify_window_study(study, cfg)
}
