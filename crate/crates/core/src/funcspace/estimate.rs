//! Sampled lower-bound estimators for weighted sup norms, Hölder seminorms
//! and `C^k` norms.
//!
//! Every estimator is a maximum over a finite, deterministic sample set, so
//! it reports a lower bound of the true norm restricted to the window.
//! Sample sets placed on a window symmetric about 0 are exactly closed under
//! `x → −x`, which makes the estimates exactly reflection invariant.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::funcspace::{weight_eval, SchauderParams, TestFunction, WeightKind, Window};

/// How Hölder pairs are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScheme {
    /// Grid spacing on the window.
    pub spacing: f64,
    /// Local offsets `h`: each grid point `x` is paired with `x ± h`.
    pub offsets: Vec<f64>,
    /// Random far partners per grid point (each also added mirrored).
    pub far_pairs: usize,
    pub seed: u64,
    /// Points with `|x|` below this are excluded for the log weight.
    pub log_exclusion: f64,
}

impl Default for PairScheme {
    fn default() -> Self {
        PairScheme {
            spacing: 0.05,
            offsets: vec![1e-3, 1e-2, 1e-1, 1.0],
            far_pairs: 32,
            seed: 0x5EED,
            log_exclusion: 1e-3,
        }
    }
}

impl PairScheme {
    pub fn with_spacing(mut self, spacing: f64) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Sample points and index pairs for one window and scheme. Functions are
/// evaluated once per point; every norm is then read off the values.
#[derive(Debug, Clone)]
pub struct PairLayout {
    points: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    log_exclusion: f64,
}

impl PairLayout {
    pub fn new(window: &Window, scheme: &PairScheme) -> Result<Self> {
        if !(scheme.spacing > 0.0) {
            return Err(invalid("pair spacing must be positive"));
        }
        let n = ((window.width() / scheme.spacing).round() as usize + 1).max(2);
        let mut points = window.samples(n);
        let mut pairs = Vec::new();

        for i in 0..n {
            let x = points[i];
            for &h in &scheme.offsets {
                for cand in [x + h, x - h] {
                    if window.contains(cand) {
                        points.push(cand);
                        pairs.push((i, points.len() - 1));
                    }
                }
            }
            // Widest separations: against both window ends.
            if i != 0 {
                pairs.push((i, 0));
            }
            if i != n - 1 {
                pairs.push((i, n - 1));
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(scheme.seed);
        for i in 0..n {
            for _ in 0..scheme.far_pairs {
                let j = rng.gen_range(0..n);
                if j != i {
                    pairs.push((i, j));
                    pairs.push((n - 1 - i, n - 1 - j));
                }
            }
        }
        Ok(PairLayout { points, pairs, log_exclusion: scheme.log_exclusion })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Evaluates `f` at every sample point, in parallel, in point order.
    pub fn evaluate<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> Vec<f64> {
        self.points.par_iter().map(|&x| f(x)).collect()
    }

    /// As [`PairLayout::evaluate`] for fallible `f`; the first error (in point order) wins.
    pub fn try_evaluate<F: Fn(f64) -> Result<f64> + Sync>(&self, f: F) -> Result<Vec<f64>> {
        self.points.par_iter().map(|&x| f(x)).collect()
    }

    fn excluded(&self, params: &SchauderParams, x: f64) -> bool {
        matches!(params.weight, WeightKind::Logarithmic) && x.abs() < self.log_exclusion
    }

    /// `max |f(x)| / w(x)` over the sample points.
    pub fn sup_from_values(&self, values: &[f64], params: &SchauderParams) -> f64 {
        self.points
            .iter()
            .zip(values)
            .filter(|(&x, _)| !self.excluded(params, x))
            .map(|(&x, v)| v.abs() / weight_eval(params, x))
            .fold(0.0, f64::max)
    }

    /// `max |f(x) − f(y)| / (|x−y|^α (w(x) + w(y)))` over the pairs.
    pub fn holder_from_values(&self, values: &[f64], params: &SchauderParams) -> Result<f64> {
        let alpha = params.alpha.ok_or_else(|| invalid("Hölder seminorm needs an exponent alpha"))?;
        Ok(self
            .pairs
            .iter()
            .filter_map(|&(i, j)| {
                let (x, y) = (self.points[i], self.points[j]);
                if x == y || self.excluded(params, x) || self.excluded(params, y) {
                    return None;
                }
                let denom = (x - y).abs().powf(alpha) * (weight_eval(params, x) + weight_eval(params, y));
                Some((values[i] - values[j]).abs() / denom)
            })
            .fold(0.0, f64::max))
    }

    /// Norm of `Λ^α`: the smallest `C` satisfying both defining inequalities.
    pub fn schauder_from_values(&self, values: &[f64], params: &SchauderParams) -> Result<f64> {
        Ok(self.sup_from_values(values, params).max(self.holder_from_values(values, params)?))
    }
}

/// `max |φ(x)| / w(x)` over `n_samples` symmetric points of the window.
pub fn estimate_sup_norm(phi: &TestFunction, params: &SchauderParams, window: &Window, n_samples: usize) -> Result<f64> {
    params.validate()?;
    if n_samples < 2 {
        return Err(invalid("need at least two samples"));
    }
    let exclusion = PairScheme::default().log_exclusion;
    let log = matches!(params.weight, WeightKind::Logarithmic);
    Ok(window
        .samples(n_samples)
        .par_iter()
        .filter(|x| !(log && x.abs() < exclusion))
        .map(|&x| phi.eval(x).abs() / weight_eval(params, x))
        .reduce(|| 0.0, f64::max))
}

/// Weighted Hölder seminorm over the pairs of `scheme`.
pub fn estimate_holder_seminorm(
    phi: &TestFunction,
    params: &SchauderParams,
    window: &Window,
    scheme: &PairScheme,
) -> Result<f64> {
    params.validate()?;
    let layout = PairLayout::new(window, scheme)?;
    let values = layout.evaluate(|x| phi.eval(x));
    layout.holder_from_values(&values, params)
}

/// `Λ^α_{(m,κ)}` (or log-weight) norm estimate on the pair layout.
pub fn estimate_schauder_norm(
    phi: &TestFunction,
    params: &SchauderParams,
    window: &Window,
    scheme: &PairScheme,
) -> Result<f64> {
    params.validate()?;
    let layout = PairLayout::new(window, scheme)?;
    let values = layout.evaluate(|x| phi.eval(x));
    layout.schauder_from_values(&values, params)
}

/// `Λ^k_{(m)}` norm estimate: `max_{l ≤ k} sup |∂^l φ| / (1+|x|)^m`, `k ≤ 1`.
pub fn estimate_ck_norm(phi: &TestFunction, m: i32, k: u32, window: &Window, n_samples: usize) -> Result<f64> {
    if k > 1 {
        return Err(invalid("only derivative orders 0 and 1 are supported"));
    }
    let params = SchauderParams::growth(m, 0.0);
    let mut norm = estimate_sup_norm(phi, &params, window, n_samples)?;
    if k == 1 {
        let d = phi.deriv_fn().ok_or_else(|| crate::Error::MissingDerivative(phi.label().to_string()))?;
        let dn = window
            .samples(n_samples)
            .par_iter()
            .map(|&x| d(x).abs() / weight_eval(&params, x))
            .reduce(|| 0.0, f64::max);
        norm = norm.max(dn);
    }
    Ok(norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::catalog::lookup;

    fn w(r: f64) -> Window {
        Window::symmetric(r).unwrap()
    }

    #[test]
    fn sup_norm_examples() {
        let three = TestFunction::new("three", |_| 3.0, SchauderParams::growth(0, 0.0), 3.0);
        assert_eq!(estimate_sup_norm(&three, &SchauderParams::growth(0, 0.0), &w(10.0), 101).unwrap(), 3.0);
        let id = lookup("poly:1").unwrap();
        let s = estimate_sup_norm(&id, &SchauderParams::growth(1, 0.0), &w(10.0), 201).unwrap();
        assert!((s - 10.0 / 11.0).abs() < 1e-15);
        let exp = TestFunction::new("exp", f64::exp, SchauderParams::growth(0, 1.0), 1.0);
        let s = estimate_sup_norm(&exp, &SchauderParams::growth(0, 1.0), &Window::new(0.0, 20.0).unwrap(), 101).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holder_examples() {
        let scheme = PairScheme::default().with_spacing(0.01);
        let c = lookup("const1").unwrap();
        assert_eq!(estimate_holder_seminorm(&c, &SchauderParams::holder(0, 0.0, 0.5), &w(1.0), &scheme).unwrap(), 0.0);
        let a = lookup("abs_pow:0.5").unwrap();
        let v = estimate_holder_seminorm(&a, &SchauderParams::holder(0, 0.0, 0.5), &w(1.0), &scheme).unwrap();
        assert!((0.5..=1.0).contains(&v), "{v}");
        assert!((v - 0.5).abs() < 1e-12, "{v}");
        let id = lookup("poly:1").unwrap();
        let v = estimate_holder_seminorm(&id, &SchauderParams::holder(0, 0.0, 0.5), &w(1.0), &scheme).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn sup_norm_monotone_under_nested_refinement() {
        let p = SchauderParams::growth(0, 0.0);
        for f in crate::funcspace::catalog::catalog() {
            let mut prev = 0.0;
            let mut n = 11;
            for _ in 0..6 {
                let v = estimate_sup_norm(&f, &p, &w(5.0), n).unwrap();
                assert!(v >= prev, "{}", f.label());
                prev = v;
                n = 2 * n - 1;
            }
        }
    }

    #[test]
    fn estimators_are_reflection_and_negation_invariant() {
        let scheme = PairScheme::default().with_spacing(0.1);
        let params = [SchauderParams::holder(1, 0.0, 0.5), SchauderParams::log_holder(-1.0, 0.3)];
        for f in crate::funcspace::catalog::catalog() {
            for p in &params {
                let base = estimate_schauder_norm(&f, p, &w(8.0), &scheme).unwrap();
                assert_eq!(base, estimate_schauder_norm(&f.negated(), p, &w(8.0), &scheme).unwrap());
                assert_eq!(base, estimate_schauder_norm(&f.reflected(), p, &w(8.0), &scheme).unwrap(), "{}", f.label());
            }
        }
    }

    #[test]
    fn ck_norm_of_monomial() {
        let f = lookup("poly:2").unwrap();
        // |x²| ≤ (1+|x|)² and |2x| ≤ (1+|x|)²: both ratios stay below 1; the
        // derivative ratio peaks at x = 1 with value 1/2.
        let v = estimate_ck_norm(&f, 2, 1, &w(10.0), 2001).unwrap();
        assert!((v - 100.0 / 121.0).abs() < 1e-12, "{v}");
        let no_d = lookup("abs_pow:0.5").unwrap();
        assert!(estimate_ck_norm(&no_d, 1, 1, &w(1.0), 11).is_err());
    }
}
