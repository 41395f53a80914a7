//! Built-in test functions addressable by label.
//!
//! | label | φ(x) | class (m, κ) |
//! |---|---|---|
//! | `zero` | 0 | (0, 0) |
//! | `const1` | 1 | (0, 0) |
//! | `poly:m` | xᵐ, m = 1..=8 | (m, 0) |
//! | `sin` | sin x | (0, 0) |
//! | `lorentzian` | 1/(1+x²) | (0, 0) |
//! | `xexp` | x e^{−\|x\|} | (0, 0) |
//! | `tanh` | tanh x | (0, 0) |
//! | `sech` | sech x | (0, −1) |
//! | `inv1p` | 1/(1+\|x\|) | (−1, 0) |
//! | `sech_inv1p` | sech x/(1+\|x\|) | (−1, −1) |
//! | `cosh_sin`, `cosh_cos` | cosh x · sin x, cosh x · cos x | (0, 1) |
//! | `cosh_lorentzian` | cosh x/(1+x²) | (0, 1) |
//! | `abs_pow:α` | \|x\|^α, 0 < α < 1 | (1, 0), Hölder α |
//!
//! `xexp` is C¹ with φ′(0) = 1 (left and right derivatives agree); its
//! second derivative jumps at 0, which is recorded as a kink. `inv1p` has a
//! derivative jump at 0; its derivative is reported as 0 there (the average
//! of the one-sided values).

use crate::error::{Error, Result};
use crate::funcspace::{SchauderParams, TestFunction};

/// Labels of the default catalog, in listing order.
pub fn catalog_labels() -> Vec<&'static str> {
    vec![
        "zero",
        "const1",
        "poly:1",
        "poly:2",
        "poly:3",
        "sin",
        "lorentzian",
        "xexp",
        "tanh",
        "sech",
        "inv1p",
        "sech_inv1p",
        "cosh_sin",
        "cosh_cos",
        "cosh_lorentzian",
        "abs_pow:0.5",
    ]
}

/// All default catalog entries.
pub fn catalog() -> Vec<TestFunction> {
    catalog_labels().into_iter().map(|l| lookup(l).expect("catalog labels resolve")).collect()
}

/// Functions in `Λ¹_{(m)}` with a closed-form antiderivative: the inputs of
/// the scaling-limit estimates.
pub fn smooth_catalog() -> Vec<TestFunction> {
    ["const1", "poly:1", "poly:2", "poly:3", "sin", "lorentzian", "xexp", "tanh"]
        .into_iter()
        .map(|l| lookup(l).expect("catalog labels resolve"))
        .collect()
}

fn ln_cosh(x: f64) -> f64 {
    let ax = x.abs();
    ax + (-2.0 * ax).exp().ln_1p() - std::f64::consts::LN_2
}

fn sech(x: f64) -> f64 {
    let ax = x.abs();
    2.0 * (-ax).exp() / (1.0 + (-2.0 * ax).exp())
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Resolves a catalog label.
pub fn lookup(label: &str) -> Result<TestFunction> {
    let unknown = || Error::UnknownFunction(label.to_string());
    if let Some(rest) = label.strip_prefix("poly:") {
        let m: i32 = rest.parse().map_err(|_| unknown())?;
        if !(1..=8).contains(&m) {
            return Err(unknown());
        }
        let mf = f64::from(m);
        return Ok(TestFunction::new(label, move |x| x.powi(m), SchauderParams::smooth(m, 1), 1.0)
            .with_deriv(move |x| mf * x.powi(m - 1))
            .with_antideriv(move |y| y.powi(m + 1) / (mf + 1.0)));
    }
    if let Some(rest) = label.strip_prefix("abs_pow:") {
        let alpha: f64 = rest.parse().map_err(|_| unknown())?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(unknown());
        }
        return Ok(TestFunction::new(label, move |x| x.abs().powf(alpha), SchauderParams::holder(1, 0.0, alpha), 1.0)
            .with_antideriv(move |y| sign(y) * y.abs().powf(1.0 + alpha) / (1.0 + alpha))
            .with_kinks([0.0]));
    }
    let f = match label {
        "zero" => TestFunction::new(label, |_| 0.0, SchauderParams::smooth(0, 1), 0.0)
            .with_deriv(|_| 0.0)
            .with_antideriv(|_| 0.0),
        "const1" => TestFunction::new(label, |_| 1.0, SchauderParams::smooth(0, 1), 1.0)
            .with_deriv(|_| 0.0)
            .with_antideriv(|y| y),
        "sin" => TestFunction::new(label, f64::sin, SchauderParams::smooth(0, 1), 1.0)
            .with_deriv(f64::cos)
            .with_antideriv(|y| 1.0 - y.cos()),
        "lorentzian" => TestFunction::new(label, |x| 1.0 / (1.0 + x * x), SchauderParams::smooth(0, 1), 1.0)
            .with_deriv(|x| -2.0 * x / (1.0 + x * x).powi(2))
            .with_antideriv(f64::atan),
        "xexp" => TestFunction::new(label, |x| x * (-x.abs()).exp(), SchauderParams::smooth(0, 1), (-1f64).exp())
            .with_deriv(|x| (1.0 - x.abs()) * (-x.abs()).exp())
            .with_antideriv(|y| 1.0 - (1.0 + y.abs()) * (-y.abs()).exp())
            .with_kinks([0.0]),
        "tanh" => TestFunction::new(label, f64::tanh, SchauderParams::smooth(0, 1), 1.0)
            .with_deriv(|x| sech(x).powi(2))
            .with_antideriv(ln_cosh),
        "sech" => TestFunction::new(label, sech, SchauderParams::growth(0, -1.0), 2.0)
            .with_deriv(|x| -x.tanh() * sech(x))
            .with_antideriv(|y| y.sinh().atan()),
        "inv1p" => TestFunction::new(label, |x| 1.0 / (1.0 + x.abs()), SchauderParams::growth(-1, 0.0), 1.0)
            .with_deriv(|x| -sign(x) / (1.0 + x.abs()).powi(2))
            .with_antideriv(|y| sign(y) * y.abs().ln_1p())
            .with_kinks([0.0]),
        "sech_inv1p" => {
            TestFunction::new(label, |x| sech(x) / (1.0 + x.abs()), SchauderParams::growth(-1, -1.0), 2.0)
                .with_deriv(|x| {
                    let ax = x.abs();
                    -sech(x) * (x.tanh() + sign(x) / (1.0 + ax)) / (1.0 + ax)
                })
                .with_kinks([0.0])
        }
        "cosh_sin" => TestFunction::new(label, |x| x.cosh() * x.sin(), SchauderParams::growth(0, 1.0), 1.0)
            .with_deriv(|x| x.sinh() * x.sin() + x.cosh() * x.cos())
            .with_antideriv(|y| 0.5 * (y.sinh() * y.sin() - y.cosh() * y.cos() + 1.0)),
        "cosh_cos" => TestFunction::new(label, |x| x.cosh() * x.cos(), SchauderParams::growth(0, 1.0), 1.0)
            .with_deriv(|x| x.sinh() * x.cos() - x.cosh() * x.sin())
            .with_antideriv(|y| 0.5 * (y.sinh() * y.cos() + y.cosh() * y.sin())),
        "cosh_lorentzian" => {
            TestFunction::new(label, |x| x.cosh() / (1.0 + x * x), SchauderParams::growth(0, 1.0), 1.0).with_deriv(
                |x| {
                    let d = 1.0 + x * x;
                    x.sinh() / d - 2.0 * x * x.cosh() / (d * d)
                },
            )
        }
        _ => return Err(unknown()),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_label_resolves() {
        for l in catalog_labels() {
            assert_eq!(lookup(l).unwrap().label(), l);
        }
        assert!(matches!(lookup("nope"), Err(Error::UnknownFunction(_))));
        assert!(lookup("poly:0").is_err());
        assert!(lookup("abs_pow:1.5").is_err());
    }

    #[test]
    fn derivatives_match_central_differences() {
        // Second-order differences: halving h cuts the error by ~4.
        for f in catalog() {
            if !f.has_deriv() {
                continue;
            }
            for &x in &[-2.3, -0.7, 0.4, 1.9, 3.1] {
                let d = f.deriv(x).unwrap();
                let fd = |h: f64| (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
                let (e1, e2) = ((fd(1e-2) - d).abs(), (fd(5e-3) - d).abs());
                assert!(e2 <= 0.3 * e1 + 1e-10, "{} at {x}: {e1} -> {e2}", f.label());
            }
        }
    }

    #[test]
    fn antiderivatives_match_values() {
        for f in catalog() {
            if !f.has_antideriv() {
                continue;
            }
            assert_eq!(f.antideriv(0.0).unwrap(), 0.0, "{}", f.label());
            for &y in &[-2.3, -0.7, 0.4, 1.9, 3.1] {
                let h = 1e-5;
                let fd = (f.antideriv(y + h).unwrap() - f.antideriv(y - h).unwrap()) / (2.0 * h);
                assert!((fd - f.eval(y)).abs() < 1e-7 * (1.0 + f.eval(y).abs()), "{} at {y}", f.label());
            }
        }
    }

    #[test]
    fn growth_bounds_hold_on_window() {
        for f in catalog() {
            for i in 0..=400 {
                let x = -20.0 + 0.1 * i as f64;
                assert!(f.eval(x).abs() <= f.growth_bound(x) * (1.0 + 1e-12), "{} at {x}", f.label());
            }
        }
    }
}
