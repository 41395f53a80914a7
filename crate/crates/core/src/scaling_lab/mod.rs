//! Numerical certification of the kernel, operator and scaling-limit
//! estimates, and measurement of the `I_λ → ∫_0^y` convergence rate.

pub mod bounds;
pub mod certificate;
pub mod chi;
pub mod decomposition;
pub mod limit;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::catalog::smooth_catalog;
use crate::grid::GridSpec;
use crate::quadrature::PVConfig;

pub use bounds::{
    certify_convolution_weight, certify_h_bound, certify_i_bound, certify_kernel_bounds, certify_kernel_limit,
    standard_window_studies, BoundedOperator, WindowRatios, WindowStudy,
};
pub use certificate::{BoundCertificate, CertificateSample, GridAxis};
pub use chi::{chi_bracket, chi_eval, chi_moment, chi_moment_defect};
pub use decomposition::{
    certify_chi_brackets, certify_derivative_term, certify_dirac_defects, certify_inner_region, certify_outer_tail,
    certify_small_y_tail, concentration_term, decompose_a_b, default_delta, derivative_term, dirac_defect_ratios,
    Decomposition, DefectRatios, FunctionNorms, RegionSweep,
};
pub use limit::{fit_log_log, measure_scaling_limit, LimitGrid, RateFit, ScalingLimitRow, ScalingLimitStudy};

/// Default seed; only the window studies sample randomly.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// `(m, κ)` pairs of the default convolution-weight certificates.
pub const CONVOLUTION_CASES: [(i32, f64); 6] = [(0, 0.0), (1, 0.5), (-1, -0.5), (0, -1.0), (1, -1.0), (-1, -1.0)];

/// Certifiable claims, addressed on the command line by [`Claim::name`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Claim {
    /// Weighted convolution bound with the kernel majorant `e^{−|z|}`.
    ConvolutionWeight,
    /// `H` bounded on weighted Hölder spaces (interior and endpoint cases).
    HBounded,
    /// `I` bounded on weighted Hölder spaces (interior and endpoint cases).
    IBounded,
    /// Pointwise bounds on `K` and `K′`.
    KernelBounds,
    /// `K_λ(y, ·)` tends to the indicator of `(0, y)`.
    KernelLimit,
    /// Two-sided brackets on `χ_λ` and its `ρ`-moment.
    ChiBrackets,
    /// `A₁ = O(1/λ)`.
    DerivativeTerm,
    /// The three concentration defects of `χ_λ`.
    DiracDefects,
    /// `A₀ − ∫_0^y φ` after the `t` integration.
    InnerRegion,
    /// Region `|t| > y` for `λy ≥ 1`.
    OuterTail,
    /// Region `|t| > y` for `λy < 1`.
    SmallYTail,
}

impl Claim {
    pub const ALL: [Claim; 11] = [
        Claim::ConvolutionWeight,
        Claim::HBounded,
        Claim::IBounded,
        Claim::KernelBounds,
        Claim::KernelLimit,
        Claim::ChiBrackets,
        Claim::DerivativeTerm,
        Claim::DiracDefects,
        Claim::InnerRegion,
        Claim::OuterTail,
        Claim::SmallYTail,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Claim::ConvolutionWeight => "convolution-weight",
            Claim::HBounded => "h-bounded",
            Claim::IBounded => "i-bounded",
            Claim::KernelBounds => "kernel-bounds",
            Claim::KernelLimit => "kernel-limit",
            Claim::ChiBrackets => "chi-brackets",
            Claim::DerivativeTerm => "derivative-term",
            Claim::DiracDefects => "dirac-defects",
            Claim::InnerRegion => "inner-region",
            Claim::OuterTail => "outer-tail",
            Claim::SmallYTail => "small-y-tail",
        }
    }

    /// Runs the claim on its default grids; `seed` drives the random far
    /// pairs of the window studies.
    pub fn certify(&self, cfg: &PVConfig, seed: u64) -> Result<Vec<BoundCertificate>> {
        let ys = vec![0.1, 1.0, 3.0];
        match self {
            Claim::ConvolutionWeight => {
                let xs = GridSpec::new(vec![-20.0, -10.0, -5.0, -3.5, 3.5, 5.0, 10.0, 20.0])?;
                CONVOLUTION_CASES.iter().map(|&(m, k)| certify_convolution_weight(m, k, &xs, cfg)).collect()
            }
            Claim::HBounded | Claim::IBounded => {
                let op = if *self == Claim::HBounded { BoundedOperator::H } else { BoundedOperator::I };
                standard_window_studies()
                    .into_iter()
                    .filter(|s| s.operator == op)
                    .map(|mut s| {
                        s.scheme = s.scheme.with_seed(seed);
                        match op {
                            BoundedOperator::H => certify_h_bound(&s, cfg),
                            BoundedOperator::I => certify_i_bound(&s, cfg),
                        }
                    })
                    .collect()
            }
            Claim::KernelBounds => Ok(vec![certify_kernel_bounds(&kernel_bound_grid())?]),
            Claim::KernelLimit => Ok(vec![certify_kernel_limit(&[10.0, 100.0, 1000.0], &[0.5, 1.0, 2.0])?]),
            Claim::ChiBrackets => certify_chi_brackets(10, cfg),
            Claim::DerivativeTerm => Ok(vec![certify_derivative_term(
                &RegionSweep::new(smooth_catalog(), RegionSweep::doubling_lambdas(11), ys),
                cfg,
            )?]),
            Claim::DiracDefects => certify_dirac_defects(
                &RegionSweep::new(smooth_catalog(), vec![50.0, 100.0, 200.0, 400.0], vec![0.5, 1.0, 2.0]),
                &[0.1, 0.5, 0.9, 0.99],
                cfg,
            ),
            Claim::InnerRegion => Ok(vec![certify_inner_region(
                &RegionSweep::new(smooth_catalog(), RegionSweep::doubling_lambdas(8), ys),
                cfg,
            )?]),
            Claim::OuterTail => Ok(vec![certify_outer_tail(
                &RegionSweep::new(smooth_catalog(), RegionSweep::doubling_lambdas(8), ys),
                cfg,
            )?]),
            Claim::SmallYTail => {
                certify_small_y_tail(&smooth_catalog(), &RegionSweep::doubling_lambdas(8), &[1e-3, 1e-2, 0.1, 0.5], cfg)
            }
        }
    }
}

/// `±` 200 log-spaced points in `[10⁻⁴, 30]`.
pub fn kernel_bound_grid() -> GridSpec {
    let pos = GridSpec::logspace(1e-4, 30.0, 200).expect("static grid");
    let neg = GridSpec::new(pos.points().iter().rev().map(|t| -t).collect()).expect("static grid");
    neg.merged(&pos)
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown claim '{s}'")))
    }
}
