//! Test functions, growth weights and empirical weighted Schauder norms.

pub mod catalog;
pub mod estimate;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use estimate::{
    estimate_ck_norm, estimate_holder_seminorm, estimate_schauder_norm, estimate_sup_norm, PairLayout, PairScheme,
};

/// Shape of the growth weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `(1+|x|)^m e^{κ|x|}`
    Polynomial { m: i32 },
    /// `log(1+|x|) e^{κ|x|}`
    Logarithmic,
}

/// Identifies a weighted space: Hölder `Λ^α` with weight `(m, κ)` or the
/// log variant, or a `C^k` space with polynomial weight when `alpha` is unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchauderParams {
    pub weight: WeightKind,
    pub kappa: f64,
    pub alpha: Option<f64>,
    /// Derivative order `k` for the `C^k`-type spaces.
    pub order: u32,
}

impl SchauderParams {
    /// `Λ^α_{(m,κ)}`.
    pub fn holder(m: i32, kappa: f64, alpha: f64) -> Self {
        SchauderParams { weight: WeightKind::Polynomial { m }, kappa, alpha: Some(alpha), order: 0 }
    }

    /// `Λ^α_{(log,κ)}`.
    pub fn log_holder(kappa: f64, alpha: f64) -> Self {
        SchauderParams { weight: WeightKind::Logarithmic, kappa, alpha: Some(alpha), order: 0 }
    }

    /// `Λ^k_{(m)}`: derivatives up to order `k` bounded by `C (1+|x|)^m`.
    pub fn smooth(m: i32, order: u32) -> Self {
        SchauderParams { weight: WeightKind::Polynomial { m }, kappa: 0.0, alpha: None, order }
    }

    /// Growth class `(m, κ)` only, no regularity claim.
    pub fn growth(m: i32, kappa: f64) -> Self {
        SchauderParams { weight: WeightKind::Polynomial { m }, kappa, alpha: None, order: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() {
            return Err(invalid("kappa must be finite"));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid(format!("Hölder exponent must satisfy 0 < alpha < 1, got {a}")));
            }
        }
        Ok(())
    }

    /// Polynomial exponent, with the log weight majorised by `m = 1`.
    pub fn majorant_m(&self) -> i32 {
        match self.weight {
            WeightKind::Polynomial { m } => m,
            WeightKind::Logarithmic => 1,
        }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        SchauderParams { kappa, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        SchauderParams { alpha: Some(alpha), ..self }
    }
}

impl fmt::Display for SchauderParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.weight {
            WeightKind::Polynomial { m } => write!(f, "(m={m}, kappa={})", self.kappa)?,
            WeightKind::Logarithmic => write!(f, "(log, kappa={})", self.kappa)?,
        }
        if let Some(a) = self.alpha {
            write!(f, " alpha={a}")?;
        }
        if self.order > 0 {
            write!(f, " order={}", self.order)?;
        }
        Ok(())
    }
}

/// The weight `w(x)`; exact closed form. The log weight vanishes at 0.
pub fn weight_eval(params: &SchauderParams, x: f64) -> f64 {
    let ax = x.abs();
    let growth = (params.kappa * ax).exp();
    match params.weight {
        WeightKind::Polynomial { m } => (1.0 + ax).powi(m) * growth,
        WeightKind::Logarithmic => ax.ln_1p() * growth,
    }
}

/// A weight bound to its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    pub params: SchauderParams,
}

impl WeightFunction {
    pub fn new(params: SchauderParams) -> Self {
        WeightFunction { params }
    }

    pub fn eval(&self, x: f64) -> f64 {
        weight_eval(&self.params, x)
    }
}

/// A bounded sampling window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("window needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    /// `[−r, r]`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Window::new(-r, r)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` points placed symmetrically about the window centre, so a window
    /// symmetric about 0 yields a point set that is exactly closed under `x → −x`.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let center = 0.5 * (self.lo + self.hi);
        let step = self.width() / (n - 1) as f64;
        let mid = (n - 1) as f64 / 2.0;
        (0..n).map(|i| center + (i as f64 - mid) * step).collect()
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A closed-form real function with optional derivative and antiderivative
/// `y ↦ ∫_0^y φ`, its claimed class and the constant `C` of its growth bound
/// `|φ(x)| ≤ C (1+|x|)^m e^{κ|x|}`.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    eval: RealFn,
    deriv: Option<RealFn>,
    antideriv: Option<RealFn>,
    claimed_class: SchauderParams,
    growth_constant: f64,
    kinks: Vec<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("claimed_class", &self.claimed_class)
            .field("growth_constant", &self.growth_constant)
            .field("has_deriv", &self.deriv.is_some())
            .field("has_antideriv", &self.antideriv.is_some())
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl TestFunction {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        claimed_class: SchauderParams,
        growth_constant: f64,
    ) -> Self {
        TestFunction {
            label: label.into(),
            eval: Arc::new(eval),
            deriv: None,
            antideriv: None,
            claimed_class,
            growth_constant,
            kinks: Vec::new(),
        }
    }

    pub fn with_deriv(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_antideriv(mut self, a: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.antideriv = Some(Arc::new(a));
        self
    }

    /// Points where the function or its derivative is not smooth; quadrature
    /// places break points there.
    pub fn with_kinks(mut self, kinks: impl IntoIterator<Item = f64>) -> Self {
        self.kinks = kinks.into_iter().collect();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn claimed_class(&self) -> &SchauderParams {
        &self.claimed_class
    }

    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn has_antideriv(&self) -> bool {
        self.antideriv.is_some()
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        self.deriv.as_ref().map(|d| d(x)).ok_or_else(|| Error::MissingDerivative(self.label.clone()))
    }

    pub fn antideriv(&self, y: f64) -> Result<f64> {
        self.antideriv.as_ref().map(|a| a(y)).ok_or_else(|| Error::MissingAntiderivative(self.label.clone()))
    }

    /// The derivative as a shared closure, if present.
    pub fn deriv_fn(&self) -> Option<RealFn> {
        self.deriv.clone()
    }

    pub fn eval_fn(&self) -> RealFn {
        self.eval.clone()
    }

    /// Claimed growth majorant `C (1+|x|)^m e^{κ|x|}` (log weight majorised by `m = 1`).
    pub fn growth_bound(&self, x: f64) -> f64 {
        let p = SchauderParams::growth(self.claimed_class.majorant_m(), self.claimed_class.kappa);
        self.growth_constant * weight_eval(&p, x)
    }

    /// `x ↦ −φ(x)`.
    pub fn negated(&self) -> TestFunction {
        let (e, d, a) = (self.eval.clone(), self.deriv.clone(), self.antideriv.clone());
        TestFunction {
            label: format!("neg({})", self.label),
            eval: Arc::new(move |x| -e(x)),
            deriv: d.map(|d| Arc::new(move |x| -d(x)) as RealFn),
            antideriv: a.map(|a| Arc::new(move |y| -a(y)) as RealFn),
            claimed_class: self.claimed_class,
            growth_constant: self.growth_constant,
            kinks: self.kinks.clone(),
        }
    }

    /// `x ↦ φ(−x)`.
    pub fn reflected(&self) -> TestFunction {
        let (e, d, a) = (self.eval.clone(), self.deriv.clone(), self.antideriv.clone());
        TestFunction {
            label: format!("refl({})", self.label),
            eval: Arc::new(move |x| e(-x)),
            deriv: d.map(|d| Arc::new(move |x: f64| -d(-x)) as RealFn),
            // ∫_0^y φ(−ξ) dξ = −∫_0^{−y} φ
            antideriv: a.map(|a| Arc::new(move |y: f64| -a(-y)) as RealFn),
            claimed_class: self.claimed_class,
            growth_constant: self.growth_constant,
            kinks: self.kinks.iter().map(|k| -k).collect(),
        }
    }

    /// `x ↦ φ(x/λ)`; the growth class becomes `(m, κ/λ)` with constant
    /// `C · max(1, λ^{−m})`.
    pub fn rescaled(&self, lambda: f64) -> Result<TestFunction> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("rescaling factor must be positive, got {lambda}")));
        }
        let (e, d, a) = (self.eval.clone(), self.deriv.clone(), self.antideriv.clone());
        let m = self.claimed_class.majorant_m();
        Ok(TestFunction {
            label: format!("{}(x/{lambda})", self.label),
            eval: Arc::new(move |x| e(x / lambda)),
            deriv: d.map(|d| Arc::new(move |x| d(x / lambda) / lambda) as RealFn),
            antideriv: a.map(|a| Arc::new(move |y| lambda * a(y / lambda)) as RealFn),
            claimed_class: SchauderParams {
                weight: WeightKind::Polynomial { m },
                kappa: self.claimed_class.kappa / lambda,
                ..self.claimed_class
            },
            growth_constant: self.growth_constant * lambda.powi(-m).max(1.0),
            kinks: self.kinks.iter().map(|k| k * lambda).collect(),
        })
    }

    /// `Mφ = φ / (e^x + e^{−x})`, evaluated without overflow. Maps growth
    /// class `κ` to `κ − 1`.
    pub fn multiplier_image(&self) -> TestFunction {
        let (e, d) = (self.eval.clone(), self.deriv.clone());
        let inv = |x: f64| {
            let ax = x.abs();
            (-ax).exp() / (1.0 + (-2.0 * ax).exp())
        };
        TestFunction {
            label: format!("M({})", self.label),
            eval: Arc::new(move |x| e(x) * inv(x)),
            deriv: d.map(|d| {
                let e = self.eval.clone();
                Arc::new(move |x: f64| (d(x) - x.tanh() * e(x)) * inv(x)) as RealFn
            }),
            antideriv: None,
            claimed_class: self.claimed_class.with_kappa(self.claimed_class.kappa - 1.0),
            growth_constant: self.growth_constant,
            kinks: self.kinks.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_values() {
        assert_eq!(weight_eval(&SchauderParams::growth(0, 0.0), 5.0), 1.0);
        assert_eq!(weight_eval(&SchauderParams::growth(2, 0.0), 1.0), 4.0);
        let w = weight_eval(&SchauderParams::growth(1, -1.0), 3.0);
        assert!((w - 4.0 * (-3f64).exp()).abs() < 1e-15);
        assert!((w - 0.19915).abs() < 1e-5);
        assert_eq!(weight_eval(&SchauderParams::log_holder(-1.0, 0.5), 0.0), 0.0);
    }

    #[test]
    fn weight_is_even_and_positive() {
        let params = [
            SchauderParams::growth(-1, 0.5),
            SchauderParams::growth(3, -1.0),
            SchauderParams::log_holder(0.0, 0.3),
        ];
        for p in &params {
            for i in 1..200 {
                let x = 0.173 * i as f64;
                let w = weight_eval(p, x);
                assert!(w > 0.0);
                assert_eq!(w, weight_eval(p, -x));
            }
        }
    }

    #[test]
    fn alpha_is_validated() {
        assert!(SchauderParams::holder(0, 0.0, 1.0).validate().is_err());
        assert!(SchauderParams::holder(0, 0.0, 0.0).validate().is_err());
        assert!(SchauderParams::holder(0, 0.0, 0.5).validate().is_ok());
    }

    #[test]
    fn symmetric_samples_are_mirror_exact() {
        let w = Window::symmetric(10.0).unwrap();
        for n in [2, 3, 10, 401] {
            let s = w.samples(n);
            for i in 0..n {
                assert_eq!(s[i], -s[n - 1 - i]);
            }
            assert_eq!(s[0], -10.0);
        }
    }

    #[test]
    fn transformations() {
        let f = TestFunction::new("cube", |x| x * x * x, SchauderParams::smooth(3, 1), 1.0)
            .with_deriv(|x| 3.0 * x * x)
            .with_antideriv(|y| y.powi(4) / 4.0);
        let r = f.reflected();
        assert_eq!(r.eval(2.0), -8.0);
        assert_eq!(r.deriv(2.0).unwrap(), -12.0);
        assert_eq!(r.antideriv(2.0).unwrap(), -4.0);
        let s = f.rescaled(2.0).unwrap();
        assert_eq!(s.eval(4.0), 8.0);
        assert_eq!(s.deriv(4.0).unwrap(), 6.0);
        assert_eq!(s.antideriv(4.0).unwrap(), 8.0);
        let n = f.negated();
        assert_eq!(n.eval(1.0), -1.0);
        let m = f.multiplier_image();
        assert!((m.eval(1.0) - 1.0 / (2.0 * 1f64.cosh())).abs() < 1e-15);
        assert_eq!(m.claimed_class().kappa, -1.0);
    }
}
