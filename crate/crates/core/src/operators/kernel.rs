//! The kernel `K(t) = 1/(e^t − e^{−t})` and its rescaled relatives, all in
//! exponent-normalised form so that no intermediate overflows for
//! arguments in the thousands.

use crate::error::{invalid, Error, Result};

/// `ln cosh x`, stable for all finite `x`.
#[inline]
pub fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

/// `cosh a / cosh b` computed as `e^{|a|−|b|} (1+e^{−2|a|}) / (1+e^{−2|b|})`.
#[inline]
pub fn cosh_ratio(a: f64, b: f64) -> f64 {
    (ln_cosh(a) - ln_cosh(b)).exp()
}

/// `ln |K(t)|` for `t ≠ 0`.
#[inline]
pub fn ln_abs_k(t: f64) -> f64 {
    let s = t.abs();
    -s - (-(-2.0 * s).exp_m1()).ln()
}

/// `K(t)` without the singularity check; callers guarantee `t ≠ 0`.
#[inline]
pub(crate) fn k_unchecked(t: f64) -> f64 {
    let s = t.abs();
    let v = (-s).exp() / -(-2.0 * s).exp_m1();
    if t < 0.0 {
        -v
    } else {
        v
    }
}

/// `t·K(t)`, continuous through `t = 0` with value 1/2.
#[inline]
pub fn t_k(t: f64) -> f64 {
    let s = t.abs();
    if s == 0.0 {
        return 0.5;
    }
    s * (-s).exp() / -(-2.0 * s).exp_m1()
}

/// `K(t) = 1/(e^t − e^{−t})`, odd; singular at 0.
pub fn kernel_k(t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Singularity("K(0)"));
    }
    if t.is_nan() {
        return Err(invalid("K evaluated at NaN"));
    }
    Ok(k_unchecked(t))
}

/// `K′(t) = −(e^t + e^{−t})/(e^t − e^{−t})²`, even; singular at 0.
pub fn kernel_k_derivative(t: f64) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Singularity("K'(0)"));
    }
    let s = t.abs();
    let q = (-2.0 * s).exp();
    let d = -(-2.0 * s).exp_m1();
    Ok(-(-s).exp() * (1.0 + q) / (d * d))
}

/// `K(t) · cosh(a)/cosh(b)`, `t ≠ 0`, as
/// `e^{|a|−|b|−|t|} (1+e^{−2|a|}) / ((1−e^{−2|t|})(1+e^{−2|b|}))`.
/// When `t = a − b` with `0 < b < a` the exponent cancels exactly.
#[inline]
pub(crate) fn weighted_k(t: f64, a: f64, b: f64) -> f64 {
    let (sa, sb, st) = (a.abs(), b.abs(), t.abs());
    let mag = ((sa - sb) - st).exp() * (1.0 + (-2.0 * sa).exp())
        / (-(-2.0 * st).exp_m1() * (1.0 + (-2.0 * sb).exp()));
    if t < 0.0 {
        -mag
    } else {
        mag
    }
}

/// `K_λ(y, η) = K(λ(y−η)) · cosh(λy)/cosh(λη)`.
pub fn kernel_k_lambda(lambda: f64, y: f64, eta: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if eta == y {
        return Err(Error::Singularity("K_lambda(y, y)"));
    }
    let (a, b) = (lambda * y, lambda * eta);
    if a == b {
        return Err(Error::Singularity("K_lambda(y, y)"));
    }
    Ok(weighted_k(a - b, a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        let k1 = kernel_k(1.0).unwrap();
        assert!((k1 - 1.0 / (1f64.exp() - (-1f64).exp())).abs() < 1e-16);
        assert!((k1 - 0.4254590).abs() < 1e-7);
        assert_eq!(kernel_k(-1.0).unwrap(), -k1);
        let k50 = kernel_k(50.0).unwrap();
        assert!((k50 / (-50f64).exp() - 1.0).abs() < 1e-15);
        assert!(kernel_k(800.0).unwrap() >= 0.0);
        assert!(matches!(kernel_k(0.0), Err(Error::Singularity(_))));
    }

    #[test]
    fn kernel_is_exactly_odd() {
        for i in 1..1000 {
            let t = 0.0137 * f64::from(i) * f64::from(i);
            assert_eq!(kernel_k(-t).unwrap(), -kernel_k(t).unwrap());
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for &t in &[0.05f64, 0.3, 1.0, 2.5, -0.7, 10.0] {
            let h = 1e-6 * t.abs();
            let fd = (kernel_k(t + h).unwrap() - kernel_k(t - h).unwrap()) / (2.0 * h);
            let d = kernel_k_derivative(t).unwrap();
            assert!((fd - d).abs() < 1e-6 * d.abs(), "t={t}: {fd} vs {d}");
        }
    }

    #[test]
    fn lambda_kernel_limits_and_composition() {
        assert!((kernel_k_lambda(50.0, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-10);
        assert!(kernel_k_lambda(50.0, 1.0, -0.5).unwrap().abs() < 1e-10);
        let composed = kernel_k(-1.0).unwrap() * 2.0 / (1f64.exp() + (-1f64).exp());
        let direct = kernel_k_lambda(1.0, 0.0, 1.0).unwrap();
        assert!((direct - composed).abs() < 1e-15);
        assert!((direct + 0.275721).abs() < 1e-6, "{direct}");
        // No overflow at λy in the thousands.
        assert!((kernel_k_lambda(4096.0, 3.0, 1.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(kernel_k_lambda(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cosh_ratio_is_stable() {
        assert!((cosh_ratio(1.0, 2.0) - 1f64.cosh() / 2f64.cosh()).abs() < 1e-15);
        assert!((cosh_ratio(1000.0, 999.0) - 1f64.exp()).abs() < 1e-12);
    }
}
