//! The vertical-line picture: functions on `Re z = a` and the complex kernel
//! `k(z, ξ)`, related to the real line by `πz = πa + iy`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

const ON_LINE_TOL: f64 = 1e-12;

/// `y = π Im z` for `z` on the line `Re z = a`.
pub fn map_line_to_real(z: Complex64, a: f64) -> Result<f64> {
    if (z.re - a).abs() > ON_LINE_TOL {
        return Err(invalid(format!("point {z} is not on the line Re z = {a}")));
    }
    Ok(PI * z.im)
}

/// Inverse of [`map_line_to_real`]: `z = a + i y/π`.
pub fn map_real_to_line(y: f64, a: f64) -> Complex64 {
    Complex64::new(a, y / PI)
}

/// `dξ/dη = i/π` under `πξ = πa + iη`.
pub fn line_jacobian() -> Complex64 {
    Complex64::new(0.0, 1.0 / PI)
}

/// The line kernel
/// `(e^{iπ(z−a)} + e^{−iπ(z−a)}) / ((e^{iπ(ξ−a)} + e^{−iπ(ξ−a)}) (e^{iπ(ξ−z)} − e^{−iπ(ξ−z)}))`.
///
/// With `πz = πa + iy` and `πξ = πa + iη` the last factor is
/// `e^{y−η} − e^{η−y}`, so on the line this equals the real kernel
/// `K(y−η) cosh y / cosh η` of `I` exactly.
pub fn k_line(z: Complex64, xi: Complex64, a: f64) -> Complex64 {
    let i_pi = Complex64::new(0.0, PI);
    let num = (i_pi * (z - a)).exp() + (-i_pi * (z - a)).exp();
    let d1 = (i_pi * (xi - a)).exp() + (-i_pi * (xi - a)).exp();
    let d2 = (i_pi * (xi - z)).exp() - (-i_pi * (xi - z)).exp();
    num / (d1 * d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::kernel::kernel_k_lambda;

    #[test]
    fn map_examples() {
        let a = 0.37;
        assert_eq!(map_line_to_real(Complex64::new(a, 0.0), a).unwrap(), 0.0);
        assert!((map_line_to_real(Complex64::new(a, 1.0), a).unwrap() - PI).abs() < 1e-15);
        assert!(map_line_to_real(Complex64::new(a + 1e-9, 1.0), a).is_err());
        let y = 1.234;
        assert!((map_line_to_real(map_real_to_line(y, a), a).unwrap() - y).abs() < 1e-15);
    }

    #[test]
    fn line_kernel_equals_real_kernel() {
        let a = -0.25;
        for &(s, t) in &[(0.3, 0.7), (-0.4, 0.9), (1.1, -0.6), (0.05, 0.06)] {
            let (z, xi) = (Complex64::new(a, s), Complex64::new(a, t));
            let k = k_line(z, xi, a);
            let (y, eta) = (map_line_to_real(z, a).unwrap(), map_line_to_real(xi, a).unwrap());
            let real = kernel_k_lambda(1.0, y, eta).unwrap();
            assert!((k.re - real).abs() < 1e-12 * real.abs().max(1.0), "{k} vs {real}");
            assert!(k.im.abs() < 1e-12);
        }
    }
}
