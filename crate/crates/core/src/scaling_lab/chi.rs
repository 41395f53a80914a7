//! The weight
//!
//! ```text
//! χ_λ(ρ, t) = λt/(e^{λt} − e^{−λt}) · cosh(λy)/cosh(λ(y − ρt)),   0 < t < y, |ρ| ≤ 1,
//! ```
//!
//! which concentrates at `ρ = 1` as `λ → ∞`, and its `ρ`-moments.

use crate::error::{Error, Result};
use crate::operators::kernel::{ln_abs_k, ln_cosh, t_k};
use crate::quadrature::{integrate_with_breaks, PVConfig, QuadResult};

fn check_domain(lambda: f64, t: f64, y: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(t > 0.0 && t < y && y.is_finite()) {
        return Err(Error::Domain(format!("need 0 < t < y, got t = {t}, y = {y}")));
    }
    Ok(())
}

/// `χ_λ(ρ, t)` at base point `y`.
pub fn chi_eval(lambda: f64, rho: f64, t: f64, y: f64) -> Result<f64> {
    check_domain(lambda, t, y)?;
    if !(rho.abs() <= 1.0) {
        return Err(Error::Domain(format!("need |rho| <= 1, got {rho}")));
    }
    Ok(chi_unchecked(lambda, rho, t, y))
}

#[inline]
pub(crate) fn chi_unchecked(lambda: f64, rho: f64, t: f64, y: f64) -> f64 {
    ln_chi_unchecked(lambda, rho, t, y).exp()
}

#[inline]
fn ln_chi_unchecked(lambda: f64, rho: f64, t: f64, y: f64) -> f64 {
    let u = lambda * t;
    let ln_ratio = ln_cosh(lambda * y) - ln_cosh(lambda * (y - rho * t));
    if u == 0.0 {
        return ln_ratio - std::f64::consts::LN_2;
    }
    u.ln() + ln_abs_k(u) + ln_ratio
}

/// `ln χ_λ(ρ, t)`; representable where `χ` itself underflows.
pub fn ln_chi(lambda: f64, rho: f64, t: f64, y: f64) -> Result<f64> {
    chi_eval(lambda, rho, t, y)?;
    Ok(ln_chi_unchecked(lambda, rho, t, y))
}

/// `λt/(1 − e^{−2λt}) · e^{−λt(1−ρ)}`, the common factor of the two-sided
/// bounds `½·bracket < χ ≤ 2·bracket`.
pub fn chi_bracket(lambda: f64, rho: f64, t: f64) -> f64 {
    let u = lambda * t;
    u / -(-2.0 * u).exp_m1() * (-u * (1.0 - rho)).exp()
}

/// `ln` of [`chi_bracket`].
pub fn ln_chi_bracket(lambda: f64, rho: f64, t: f64) -> f64 {
    let u = lambda * t;
    u.ln() - (-(-2.0 * u).exp_m1()).ln() - u * (1.0 - rho)
}

/// `ρ` break points clustering at the concentration point `ρ = 1`.
pub(crate) fn rho_breaks(u: f64) -> Vec<f64> {
    let mut b = vec![-1.0, 1.0];
    for k in 0..=12 {
        let r = 1.0 - 2f64.powi(k) / u;
        if r > -1.0 && r < 1.0 {
            b.push(r);
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// `∫_{−1}^{1} χ_λ(ρ, t) dρ`.
pub fn chi_moment(lambda: f64, t: f64, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_domain(lambda, t, y)?;
    integrate_with_breaks(|rho| chi_unchecked(lambda, rho, t, y), &rho_breaks(lambda * t), cfg)
}

/// `e^{s} (∫_{−1}^{1} χ_λ dρ − 1)`, computed without cancellation from
///
/// ```text
/// ∫χ − 1 = λtK(λt) ∫ e^{λρt} (e^{−2λy} − e^{−2λ(y−ρt)}) / (1 + e^{−2λ(y−ρt)}) dρ,
/// ```
///
/// which uses `λtK(λt) ∫ e^{λρt} dρ = 1` exactly. The scale `e^{s}` keeps
/// exponentially small defects representable.
pub fn chi_moment_defect_scaled(lambda: f64, t: f64, y: f64, ln_scale: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_domain(lambda, t, y)?;
    let u = lambda * t;
    let ly = lambda * y;
    // The prefactor goes into the exponents; `e^{3uρ}` alone overflows.
    let ln_pre = if u == 0.0 { t_k(0.0).ln() } else { u.ln() + ln_abs_k(u) };
    let f = |rho: f64| {
        let a = (ln_pre + u * rho - 2.0 * ly + ln_scale).exp();
        let b = (ln_pre + 3.0 * u * rho - 2.0 * ly + ln_scale).exp();
        let q = (2.0 * u * rho - 2.0 * ly).exp();
        (a - b) / (1.0 + q)
    };
    integrate_with_breaks(f, &rho_breaks(u), cfg)
}

/// `∫_{−1}^{1} χ_λ dρ − 1`.
pub fn chi_moment_defect(lambda: f64, t: f64, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    chi_moment_defect_scaled(lambda, t, y, 0.0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_examples() {
        let cfg = PVConfig::default();
        let m = chi_moment(10.0, 0.5, 5.0, &cfg).unwrap().value;
        assert!((0.5..=2.0).contains(&m));
        let m = chi_moment(1e-3, 1e-3, 1.0, &cfg).unwrap().value;
        assert!((m - 1.0).abs() < 0.01, "{m}");
    }

    #[test]
    fn chi_at_rho_one_within_brackets() {
        let (l, t, y) = (20.0, 0.5, 5.0);
        let c = chi_eval(l, 1.0, t, y).unwrap();
        let u: f64 = l * t;
        let direct = u / -(-2.0 * u).exp_m1() * (l * y).cosh() / ((l * (y - t)).exp() * (1.0 + (-2.0 * l * (y - t)).exp()))
            * (-u).exp()
            * 2.0;
        assert!((c - direct).abs() < 1e-12 * c);
        let b = chi_bracket(l, 1.0, t);
        assert!(c > 0.5 * b && c <= 2.0 * b);
    }

    #[test]
    fn defect_matches_direct_difference() {
        let cfg = PVConfig::default().with_tolerances(1e-13, 1e-15);
        for &(l, t, y) in &[(1.0, 0.3, 0.5), (5.0, 0.2, 0.4), (2.0, 0.9, 1.0)] {
            let direct = chi_moment(l, t, y, &cfg).unwrap().value - 1.0;
            let defect = chi_moment_defect(l, t, y, &cfg).unwrap().value;
            assert!((direct - defect).abs() < 1e-12, "{direct} vs {defect}");
        }
    }

    #[test]
    fn domain_is_checked() {
        assert!(chi_eval(1.0, 0.0, 2.0, 1.0).is_err());
        assert!(chi_eval(1.0, 1.5, 0.5, 1.0).is_err());
        assert!(chi_eval(0.0, 0.0, 0.5, 1.0).is_err());
    }
}
