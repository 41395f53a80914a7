//! Operator values against closed forms and against independent evaluation
//! paths.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use pvscale_core::catalog::{catalog, lookup};
use pvscale_core::operators::{
    apply_h, apply_i, apply_i_direct, apply_i_lambda, apply_i_lambda_unsplit, k_line, kernel_k, kernel_k_derivative,
    kernel_k_lambda, map_real_to_line,
};
use pvscale_core::scaling_lab::chi_moment;
use pvscale_core::PVConfig;

fn cfg() -> PVConfig {
    PVConfig::default().with_tolerances(1e-12, 1e-12)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

// ∫_0^∞ t K(t) dt = π²/8 and ∫_0^∞ t³ K(t) dt = π⁴/16.
const T1: f64 = PI * PI / 8.0;
const T3: f64 = PI * PI * PI * PI / 16.0;
// ∫_0^∞ sin(t) K(t) dt = (π/4) tanh(π/2).
fn sin_moment() -> f64 {
    0.5 * FRAC_PI_2 * FRAC_PI_2.tanh()
}

#[test]
fn h_of_monomials() {
    for y in [-2.2, -0.4, 0.0, 0.9, 3.1] {
        let h1 = apply_h(&lookup("poly:1").unwrap(), y, &cfg()).unwrap().value;
        let h2 = apply_h(&lookup("poly:2").unwrap(), y, &cfg()).unwrap().value;
        let h3 = apply_h(&lookup("poly:3").unwrap(), y, &cfg()).unwrap().value;
        assert!(close(h1, -2.0 * T1, 1e-10), "y={y}: {h1}");
        assert!(close(h2, -4.0 * y * T1, 1e-10), "y={y}: {h2}");
        assert!(close(h3, -6.0 * y * y * T1 - 2.0 * T3, 1e-10), "y={y}: {h3}");
    }
}

#[test]
fn h_and_i_of_trigonometric_inputs() {
    let s = sin_moment();
    for y in [-1.7, 0.3, 2.0, 6.5] {
        let hs = apply_h(&lookup("sin").unwrap(), y, &cfg()).unwrap().value;
        assert!(close(hs, -2.0 * s * y.cos(), 1e-10), "H sin at {y}");
        // I(cosh·f) = cosh · H f.
        let is = apply_i(&lookup("cosh_sin").unwrap(), y, &cfg()).unwrap().value;
        assert!(close(is, -2.0 * s * y.cos() * y.cosh(), 1e-9), "I cosh_sin at {y}");
        let ic = apply_i(&lookup("cosh_cos").unwrap(), y, &cfg()).unwrap().value;
        assert!(close(ic, 2.0 * s * y.sin() * y.cosh(), 1e-9), "I cosh_cos at {y}");
    }
}

#[test]
fn rescaled_operator_reproduces_constants() {
    for lambda in [1.0, 7.0, 100.0] {
        for y in [-1.5, 0.01, 0.5, 4.0] {
            let v = apply_i_lambda(&lookup("const1").unwrap(), lambda, y, &cfg()).unwrap().value;
            assert!(close(v, y, 1e-10), "lambda={lambda} y={y}: {v}");
        }
    }
}

#[test]
fn rescaled_operator_on_identity_at_origin() {
    // I_λ(x)(0) = −∫ η / sinh(2λη) dη = −π²/(8λ²).
    for lambda in [2.0, 16.0, 300.0] {
        let v = apply_i_lambda(&lookup("poly:1").unwrap(), lambda, 0.0, &cfg()).unwrap().value;
        let exact = -PI * PI / (8.0 * lambda * lambda);
        assert!(close(v, exact, 1e-9), "lambda={lambda}: {v} vs {exact}");
    }
}

#[test]
fn scaling_identity() {
    // I_λφ(y) = (1/λ) · I[φ(·/λ)](λy).
    for label in ["sin", "poly:1", "tanh", "lorentzian"] {
        let phi = lookup(label).unwrap();
        for lambda in [0.5, 3.0, 12.0] {
            let scaled = phi.rescaled(lambda).unwrap();
            for y in [0.2, 1.3] {
                let direct = apply_i_lambda(&phi, lambda, y, &cfg()).unwrap().value;
                let via_i = apply_i(&scaled, lambda * y, &cfg()).unwrap().value / lambda;
                assert!(close(direct, via_i, 1e-9), "{label} lambda={lambda} y={y}: {direct} vs {via_i}");
            }
        }
    }
}

#[test]
fn conjugation_matches_direct_kernel() {
    for phi in catalog() {
        for y in [-2.5, -0.3, 0.8, 3.0] {
            let conj = apply_i(&phi, y, &cfg()).unwrap().value;
            let direct = apply_i_direct(&phi, y, &cfg()).unwrap().value;
            assert!(close(conj, direct, 1e-9), "{} at {y}: {conj} vs {direct}", phi.label());
        }
    }
}

#[test]
fn split_and_unsplit_rescaled_operator_agree() {
    for phi in catalog() {
        for lambda in [1.0, 40.0] {
            for y in [-0.7, 0.05, 2.0] {
                let split = apply_i_lambda(&phi, lambda, y, &cfg()).unwrap().value;
                let whole = apply_i_lambda_unsplit(&phi, lambda, y, &cfg()).unwrap().value;
                assert!(close(split, whole, 1e-9), "{} lambda={lambda} y={y}: {split} vs {whole}", phi.label());
            }
        }
    }
}

#[test]
fn kernel_derivative_matches_difference_quotient() {
    for t in [-3.0f64, -0.2, 0.05, 0.7, 9.0] {
        let h = 1e-5 * t.abs();
        let fd = (kernel_k(t + h).unwrap() - kernel_k(t - h).unwrap()) / (2.0 * h);
        let d = kernel_k_derivative(t).unwrap();
        assert!(close(d, fd, 1e-7), "t={t}: {d} vs {fd}");
    }
}

#[test]
fn rescaled_kernel_matches_naive_formula() {
    for (lambda, y, eta) in [(1.0f64, 0.5f64, 0.2f64), (3.0, 1.0, -0.4), (5.0, -2.0, 1.5), (10.0, 2.0, 2.3)] {
        let naive = 1.0 / (2.0 * (lambda * (y - eta)).sinh()) * (lambda * y).cosh() / (lambda * eta).cosh();
        let k = kernel_k_lambda(lambda, y, eta).unwrap();
        assert!(close(k, naive, 1e-12), "{k} vs {naive}");
    }
    assert!(kernel_k_lambda(4.0, 1.0, 1.0).is_err());
}

#[test]
fn line_kernel_is_the_weighted_real_kernel() {
    let a = 0.25;
    for (y, eta) in [(0.3f64, -1.1f64), (2.0, 0.5), (-1.4, 0.9)] {
        let k = k_line(map_real_to_line(y, a), map_real_to_line(eta, a), a);
        let real = kernel_k(y - eta).unwrap() * y.cosh() / eta.cosh();
        assert!((k - Complex64::new(real, 0.0)).norm() < 1e-12 * (1.0 + real.abs()), "{k} vs {real}");
    }
}

#[test]
fn concentration_moment_tends_to_one() {
    let c = PVConfig::default();
    let far = chi_moment(1e3, 0.5, 1.0, &c).unwrap().value;
    assert!((far - 1.0).abs() < 1e-3, "{far}");
    let near = chi_moment(1.0, 0.5, 1.0, &c).unwrap().value;
    assert!((near - 1.0).abs() > (far - 1.0).abs());
}
