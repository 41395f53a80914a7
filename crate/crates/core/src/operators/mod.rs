//! The operators
//!
//! ```text
//! (Hψ)(y)   = P.V. ∫ K(y−η) ψ(η) dη
//! (Iφ)(y)   = (e^{−y}+e^{y}) · H(φ / (e^{·}+e^{−·}))(y)
//! (I_λφ)(y) = P.V. ∫ K(λ(y−η)) cosh(λy)/cosh(λη) φ(η) dη
//! ```
//!
//! with `K(t) = 1/(e^t − e^{−t})`. `I` is available through the conjugation
//! above and by direct quadrature of its kernel; `I_λ` through the split at
//! `t = |y|` of its folded integrand and through a single unsplit fold. The
//! two paths of each pair serve as mutual oracles.

pub mod kernel;
pub mod line;

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::TestFunction;
use crate::grid::GridSpec;
use crate::quadrature::{integrate_with_breaks, pv_integrate_folded, FoldLayout, PVConfig, QuadResult, TailModel};

pub use kernel::{cosh_ratio, kernel_k, kernel_k_derivative, kernel_k_lambda, ln_cosh};
pub use line::{k_line, line_jacobian, map_line_to_real, map_real_to_line};

use kernel::{k_unchecked, weighted_k};

/// Which operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    H,
    I,
    ILambda(f64),
}

impl OperatorKind {
    /// Parses `H`, `I` or `I_lambda` (the latter needs `lambda`).
    pub fn parse(name: &str, lambda: Option<f64>) -> Result<Self> {
        match name {
            "H" | "h" => Ok(OperatorKind::H),
            "I" | "i" => Ok(OperatorKind::I),
            "I_lambda" | "i_lambda" | "ILambda" => {
                let l = lambda.ok_or_else(|| invalid("operator I_lambda needs lambda"))?;
                if !(l > 0.0 && l.is_finite()) {
                    return Err(invalid(format!("lambda must be positive, got {l}")));
                }
                Ok(OperatorKind::ILambda(l))
            }
            other => Err(invalid(format!("unknown operator `{other}` (expected H, I or I_lambda)"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::H => "H",
            OperatorKind::I => "I",
            OperatorKind::ILambda(_) => "I_lambda",
        }
    }
}

/// One operator evaluation job over a grid.
#[derive(Debug, Clone)]
pub struct OperatorRequest {
    pub kind: OperatorKind,
    pub input: TestFunction,
    pub y_grid: GridSpec,
    pub cfg: PVConfig,
}

/// One output row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub y: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub truncation_bound: f64,
}

impl OperatorRequest {
    pub fn new(kind: OperatorKind, input: TestFunction, y_grid: GridSpec, cfg: PVConfig) -> Result<Self> {
        cfg.validate()?;
        if let OperatorKind::ILambda(l) = kind {
            if !(l > 0.0) {
                return Err(invalid("lambda must be positive"));
            }
        }
        Ok(OperatorRequest { kind, input, y_grid, cfg })
    }

    /// Evaluates on every grid point, in parallel; rows come back in grid order.
    pub fn evaluate(&self) -> Result<Vec<EvalRow>> {
        self.y_grid
            .points()
            .par_iter()
            .map(|&y| {
                let r = apply(self.kind, &self.input, y, &self.cfg)?;
                Ok(EvalRow { y, value: r.value, error_estimate: r.error_estimate, truncation_bound: r.truncation_bound })
            })
            .collect()
    }
}

/// Dispatches on `kind`.
pub fn apply(kind: OperatorKind, phi: &TestFunction, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    match kind {
        OperatorKind::H => apply_h(phi, y, cfg),
        OperatorKind::I => apply_i(phi, y, cfg),
        OperatorKind::ILambda(l) => apply_i_lambda(phi, l, y, cfg),
    }
}

fn check_y(y: f64) -> Result<()> {
    if y.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("evaluation point must be finite, got {y}")))
    }
}

/// Kinks `c` of the input become break points `t = |y − c|` of the fold.
fn fold_breaks(phi: &TestFunction, y: f64, scale: f64) -> Vec<f64> {
    phi.kinks().iter().map(|c| (y - c).abs()).filter(|&t| t > 0.0).map(|t| t * scale).collect()
}

fn ln_or_neg_inf(c: f64) -> f64 {
    if c > 0.0 {
        c.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Tail shift: `(1+|y±t|)^m ≤ (1+t+shift)^m` for `t ≥ |y|`.
fn shift_for(m: i32, ay: f64) -> f64 {
    if m >= 0 {
        ay
    } else {
        -ay
    }
}

/// `P.V. ∫ K(y−η) f(η) dη` for `|f(η)| ≤ c (1+|η|)^m e^{κ|η|}`, `κ < 1`.
fn h_fold<F: Fn(f64) -> f64>(
    f: F,
    m: i32,
    kappa: f64,
    c: f64,
    breaks: Vec<f64>,
    y: f64,
    cfg: &PVConfig,
) -> Result<QuadResult> {
    if !(kappa < 1.0) {
        return Err(Error::GrowthOutOfRange { kappa, reason: "H needs kappa < 1" });
    }
    let ay = y.abs();
    let t_cut = ay + cfg.truncation_radius / (1.0 - kappa).min(1.0);
    let g = |t: f64| k_unchecked(t) * (f(y - t) - f(y + t));
    let tail = TailModel {
        ln_scale: ln_or_neg_inf(2.0 * c) + kappa.abs() * ay - (-(-2.0 * t_cut).exp_m1()).ln(),
        m,
        rate: 1.0 - kappa,
        shift: shift_for(m, ay),
    };
    let layout = FoldLayout::new(cfg.fold_radius, t_cut).with_breaks(breaks);
    pv_integrate_folded(g, y, &layout, &tail, cfg)
}

/// `(Hψ)(y)` by the odd-kernel fold; the claimed class must have `κ < 1`.
pub fn apply_h(psi: &TestFunction, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_y(y)?;
    let class = psi.claimed_class();
    h_fold(
        |x| psi.eval(x),
        class.majorant_m(),
        class.kappa,
        psi.growth_constant(),
        fold_breaks(psi, y, 1.0),
        y,
        cfg,
    )
}

fn check_i_class(phi: &TestFunction) -> Result<()> {
    let kappa = phi.claimed_class().kappa;
    if !(kappa < 2.0) {
        return Err(Error::GrowthOutOfRange { kappa, reason: "I needs kappa < 2" });
    }
    Ok(())
}

/// `(Iφ)(y) = 2cosh(y) · H(Mφ)(y)` with `Mφ = φ/(e^x + e^{−x})`; `κ < 2`.
pub fn apply_i(phi: &TestFunction, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_y(y)?;
    check_i_class(phi)?;
    let ln_factor = ln_cosh(y) + LN_2;
    let inner_cfg = PVConfig { abs_tol: (cfg.abs_tol.ln() - ln_factor).exp().max(f64::MIN_POSITIVE), ..*cfg };
    let m_phi = phi.multiplier_image();
    let r = apply_h(&m_phi, y, &inner_cfg)?;
    Ok(r.scaled(ln_factor.exp()))
}

/// `(Iφ)(y)` by folding the kernel `K(y−η) cosh y / cosh η` directly.
pub fn apply_i_direct(phi: &TestFunction, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_y(y)?;
    check_i_class(phi)?;
    let class = phi.claimed_class();
    let (m, kappa) = (class.majorant_m(), class.kappa);
    let ay = y.abs();
    let rate = 2.0 - kappa;
    let t_cut = ay + cfg.truncation_radius / rate.min(1.0);
    let g = |t: f64| weighted_k(t, y, y - t) * phi.eval(y - t) - weighted_k(t, y, y + t) * phi.eval(y + t);
    let tail = TailModel {
        ln_scale: ln_or_neg_inf(4.0 * phi.growth_constant()) + ay + (kappa - 1.0).abs() * ay
            - (-(-2.0 * t_cut).exp_m1()).ln(),
        m,
        rate,
        shift: shift_for(m, ay),
    };
    let layout = FoldLayout::new(cfg.fold_radius, t_cut).with_breaks(fold_breaks(phi, y, 1.0));
    pv_integrate_folded(g, y, &layout, &tail, cfg)
}

/// Geometry of the folded `I_λ` integrand at a point `y ≥ 0`.
struct LambdaFold<'a> {
    phi: &'a TestFunction,
    lambda: f64,
    y: f64,
    t_cut: f64,
    tail: TailModel,
}

impl<'a> LambdaFold<'a> {
    fn new(phi: &'a TestFunction, lambda: f64, y: f64, cfg: &PVConfig) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive, got {lambda}")));
        }
        check_y(y)?;
        debug_assert!(y >= 0.0);
        let class = phi.claimed_class();
        let m = class.majorant_m();
        let kp = class.kappa.max(0.0);
        let rate = 2.0 * lambda - kp;
        if !(rate > 0.0) {
            return Err(Error::GrowthOutOfRange { kappa: class.kappa, reason: "I_lambda needs kappa < 2 lambda" });
        }
        // λ(T − y) ≥ truncation radius (at least 40) when κ ≤ 0.
        let t_cut = y + 2.0 * cfg.truncation_radius.max(40.0) / rate;
        let tail = TailModel {
            ln_scale: ln_or_neg_inf(4.0 * phi.growth_constant()) + (2.0 * lambda + kp) * y
                - (-(-2.0 * lambda * t_cut).exp_m1()).ln(),
            m,
            rate,
            shift: shift_for(m, y),
        };
        Ok(LambdaFold { phi, lambda, y, t_cut, tail })
    }

    /// `K(λs)[R(y,y−s)φ(y−s) − R(y,y+s)φ(y+s)]`, `R(y,η) = cosh λy / cosh λη`.
    #[inline]
    fn integrand(&self, s: f64) -> f64 {
        let (l, y) = (self.lambda, self.y);
        weighted_k(l * s, l * y, l * (y - s)) * self.phi.eval(y - s)
            - weighted_k(l * s, l * y, l * (y + s)) * self.phi.eval(y + s)
    }

    fn kink_breaks(&self) -> Vec<f64> {
        fold_breaks(self.phi, self.y, 1.0)
    }

    /// `center ± (r₀/λ) 2^k` inside `(lo, hi)`.
    fn graded(&self, center: f64, r0: f64, lo: f64, hi: f64) -> Vec<f64> {
        (-8..=6)
            .flat_map(|k| {
                let d = r0 / self.lambda * 2f64.powi(k);
                [center - d, center + d]
            })
            .filter(|&p| p > lo && p < hi)
            .collect()
    }

    /// Region `(A)`: the fold over `0 < t < y`.
    fn region_a(&self, cfg: &PVConfig) -> Result<QuadResult> {
        if self.y == 0.0 {
            return Ok(QuadResult::zero());
        }
        let near = cfg.fold_radius / self.lambda;
        let mut breaks = self.kink_breaks();
        breaks.extend(self.graded(self.y, cfg.fold_radius, 0.0, self.y));
        let layout = FoldLayout::new(near, self.y).with_breaks(breaks);
        pv_integrate_folded(|s| self.integrand(s), self.y, &layout, &TailModel::none(), cfg)
    }

    /// The folded integrand over `a < t < b`, `a > 0`; `b = None` runs to the
    /// truncation point and reports the tail bound.
    fn segment(&self, a: f64, b: Option<f64>, cfg: &PVConfig) -> Result<QuadResult> {
        let hi = b.unwrap_or(self.t_cut).min(self.t_cut);
        if !(a > 0.0) {
            return Err(invalid("segment must start at a positive t"));
        }
        if hi <= a {
            let tb = if b.is_none() { self.tail.bound(a) } else { 0.0 };
            return Ok(QuadResult { truncation_bound: tb, ..QuadResult::zero() });
        }
        let n = cfg.base_panels;
        let mut breaks: Vec<f64> = (0..=n).map(|i| a + (hi - a) * i as f64 / n as f64).collect();
        breaks[n] = hi;
        breaks.extend(self.graded(a, cfg.fold_radius, a, hi));
        breaks.extend(self.kink_breaks().into_iter().filter(|&t| t > a && t < hi));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut r = integrate_with_breaks(|s| self.integrand(s), &breaks, cfg)?;
        if b.map_or(true, |b| b >= self.t_cut) {
            r.truncation_bound = self.tail.bound(self.t_cut);
        }
        Ok(r)
    }

    /// Region `(B)`: `|t| > y`, folded onto `t > y`.
    fn region_b(&self, cfg: &PVConfig) -> Result<QuadResult> {
        if self.y == 0.0 {
            let layout = FoldLayout::new(cfg.fold_radius / self.lambda, self.t_cut).with_breaks(self.kink_breaks());
            return pv_integrate_folded(|s| self.integrand(s), 0.0, &layout, &self.tail, cfg);
        }
        self.segment(self.y, None, cfg)
    }

    fn unsplit(&self, cfg: &PVConfig) -> Result<QuadResult> {
        let layout = FoldLayout::new(cfg.fold_radius / self.lambda, self.t_cut).with_breaks(self.kink_breaks());
        pv_integrate_folded(|s| self.integrand(s), self.y, &layout, &self.tail, cfg)
    }
}

/// The two regions of `I_λφ(y)` for `y ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaRegions {
    /// `∫_0^y` of the folded integrand.
    pub a: QuadResult,
    /// `∫_{|t|>y}` of the unfolded integrand.
    pub b: QuadResult,
}

/// Regions `(A)` and `(B)` of `I_λφ(y)`, `y ≥ 0`.
pub fn i_lambda_regions(phi: &TestFunction, lambda: f64, y: f64, cfg: &PVConfig) -> Result<LambdaRegions> {
    cfg.validate()?;
    if y < 0.0 {
        return Err(Error::Domain(format!("regions are defined for y >= 0, got {y}")));
    }
    let fold = LambdaFold::new(phi, lambda, y, cfg)?;
    Ok(LambdaRegions { a: fold.region_a(cfg)?, b: fold.region_b(cfg)? })
}

/// The `(B)`-type integral restricted to `a < |t| < b` (`b = None` for ∞), `0 < y ≤ a`.
pub fn i_lambda_tail_segment(
    phi: &TestFunction,
    lambda: f64,
    y: f64,
    a: f64,
    b: Option<f64>,
    cfg: &PVConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if !(y > 0.0 && a >= y) {
        return Err(Error::Domain(format!("tail segment needs 0 < y <= a, got y = {y}, a = {a}")));
    }
    LambdaFold::new(phi, lambda, y, cfg)?.segment(a, b, cfg)
}

/// `(I_λφ)(y)` as region `(A)` plus region `(B)`. Negative `y` uses
/// `I_λφ(−y) = −I_λ(φ(−·))(y)`.
pub fn apply_i_lambda(phi: &TestFunction, lambda: f64, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_y(y)?;
    if y < 0.0 {
        return Ok(apply_i_lambda(&phi.reflected(), lambda, -y, cfg)?.scaled(-1.0));
    }
    let r = i_lambda_regions(phi, lambda, y, cfg)?;
    Ok(QuadResult::combine(&[(1.0, r.a), (1.0, r.b)]))
}

/// `(I_λφ)(y)` as one fold over `(0, T)` with no break at `t = |y|`.
pub fn apply_i_lambda_unsplit(phi: &TestFunction, lambda: f64, y: f64, cfg: &PVConfig) -> Result<QuadResult> {
    check_y(y)?;
    cfg.validate()?;
    if y < 0.0 {
        return Ok(apply_i_lambda_unsplit(&phi.reflected(), lambda, -y, cfg)?.scaled(-1.0));
    }
    LambdaFold::new(phi, lambda, y, cfg)?.unsplit(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::catalog::lookup;

    fn cfg() -> PVConfig {
        PVConfig::default()
    }

    #[test]
    fn constants_and_parity() {
        let c = lookup("const1").unwrap();
        for &y in &[-3.0, 0.0, 0.4, 7.0] {
            assert!(apply_h(&c, y, &cfg()).unwrap().value.abs() <= cfg().abs_tol);
        }
        for l in ["lorentzian", "sech", "cosh_cos"] {
            let f = lookup(l).unwrap();
            if f.claimed_class().kappa < 1.0 {
                assert!(apply_h(&f, 0.0, &cfg()).unwrap().value.abs() <= cfg().abs_tol);
            }
            assert!(apply_i(&f, 0.0, &cfg()).unwrap().value.abs() <= cfg().abs_tol, "{l}");
        }
        assert_eq!(apply_i(&lookup("zero").unwrap(), 1.3, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn growth_class_is_enforced() {
        let f = lookup("cosh_sin").unwrap();
        assert!(matches!(apply_h(&f, 0.5, &cfg()), Err(Error::GrowthOutOfRange { .. })));
        let e2 = TestFunction::new("e2", |x: f64| (2.0 * x.abs()).exp(), crate::SchauderParams::growth(0, 2.0), 1.0);
        assert!(matches!(apply_i(&e2, 0.5, &cfg()), Err(Error::GrowthOutOfRange { .. })));
    }

    #[test]
    fn closed_form_transforms() {
        let c = cfg().with_tolerances(1e-12, 1e-13);
        let k = std::f64::consts::FRAC_PI_2 * std::f64::consts::FRAC_PI_2.tanh();
        for &y in &[-2.0, 0.3, 1.7] {
            let hs = apply_h(&lookup("sin").unwrap(), y, &c).unwrap();
            assert!((hs.value + k * y.cos()).abs() < 1e-10, "H sin at {y}");
            let hsech = apply_h(&lookup("sech").unwrap(), y, &c).unwrap();
            assert!((hsech.value - y / y.cosh()).abs() < 1e-10, "H sech at {y}");
        }
    }

    #[test]
    fn i_of_one_is_identity_coordinate() {
        let one = lookup("const1").unwrap();
        for &y in &[-1.5, 0.5, 1.0, 4.0] {
            let a = apply_i(&one, y, &cfg()).unwrap().value;
            let b = apply_i_direct(&one, y, &cfg()).unwrap().value;
            assert!((a - y).abs() < 1e-8, "conjugated {a} vs {y}");
            assert!((b - y).abs() < 1e-8, "direct {b} vs {y}");
            for &l in &[0.5, 3.0, 100.0] {
                let v = apply_i_lambda(&one, l, y, &cfg()).unwrap().value;
                assert!((v - y).abs() < 1e-8, "I_{l}(1)({y}) = {v}");
            }
        }
    }

    #[test]
    fn lambda_paths_agree() {
        let c = cfg();
        for l in ["poly:1", "sin", "xexp", "tanh"] {
            let f = lookup(l).unwrap();
            for &(lam, y) in &[(10.0, 0.1), (10.0, 2.0), (300.0, 1.0), (5.0, 0.0), (7.0, -1.2)] {
                let a = apply_i_lambda(&f, lam, y, &c).unwrap();
                let b = apply_i_lambda_unsplit(&f, lam, y, &c).unwrap();
                assert!((a.value - b.value).abs() < 10.0 * c.abs_tol + 2.0 * c.rel_tol * a.value.abs(), "{l} {lam} {y}");
            }
        }
    }

    #[test]
    fn operator_kind_parsing() {
        assert_eq!(OperatorKind::parse("H", None).unwrap(), OperatorKind::H);
        assert_eq!(OperatorKind::parse("I_lambda", Some(4.0)).unwrap(), OperatorKind::ILambda(4.0));
        assert!(OperatorKind::parse("I_lambda", None).is_err());
        assert!(OperatorKind::parse("J", None).is_err());
    }
}
