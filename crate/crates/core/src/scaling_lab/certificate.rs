//! Serializable records of a measured bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One named sampling axis of a certificate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(name: impl Into<String>, values: impl Into<Vec<f64>>) -> Self {
        GridAxis { name: name.into(), values: values.into() }
    }
}

/// One sampled `lhs / rhs` ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSample {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    pub point: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl CertificateSample {
    pub fn new(function: Option<&str>, point: &[(&str, f64)], lhs: f64, rhs: f64) -> Self {
        CertificateSample {
            function: function.map(str::to_string),
            point: point.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
        }
    }
}

/// `lhs / rhs`, with `0/0 = 0`.
pub fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Outcome of one numerical bound check.
///
/// `measured_constant` is the largest sampled `lhs / rhs`. When a refined
/// measurement exists (finer quadrature, larger window, doubled `λ`),
/// `growth` is the relative change of the constant under that refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub claim_id: String,
    pub rhs_form: String,
    pub grid: Vec<GridAxis>,
    pub seed: u64,
    pub measured_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
    pub samples: Vec<CertificateSample>,
}

impl BoundCertificate {
    pub fn new(claim_id: impl Into<String>, rhs_form: impl Into<String>, seed: u64) -> Self {
        BoundCertificate {
            claim_id: claim_id.into(),
            rhs_form: rhs_form.into(),
            grid: Vec::new(),
            seed,
            measured_constant: 0.0,
            refined_constant: None,
            growth: None,
            pass: false,
            diagnostics: BTreeMap::new(),
            samples: Vec::new(),
        }
    }

    pub fn with_axis(mut self, name: &str, values: impl Into<Vec<f64>>) -> Self {
        self.grid.push(GridAxis::new(name, values));
        self
    }

    pub fn diagnostic(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.to_string(), value);
    }

    /// Sets `measured_constant` to the largest sample ratio.
    pub fn absorb(&mut self, samples: Vec<CertificateSample>) {
        self.measured_constant = samples.iter().map(|s| s.ratio).fold(self.measured_constant, f64::max);
        self.samples.extend(samples);
    }
}

/// Relative change `refined / base − 1`, with `0 → 0` counted as no change.
pub fn relative_growth(base: f64, refined: f64) -> f64 {
    if base == 0.0 && refined == 0.0 {
        0.0
    } else {
        refined / base - 1.0
    }
}

/// Largest relative growth along a sequence of measured constants.
pub fn max_step_growth(constants: &[f64]) -> f64 {
    constants.windows(2).map(|w| relative_growth(w[0], w[1])).fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_helpers() {
        assert_eq!(relative_growth(0.0, 0.0), 0.0);
        assert!((relative_growth(2.0, 2.1) - 0.05).abs() < 1e-12);
        assert!((max_step_growth(&[1.0, 1.02, 0.9, 0.99]) - 0.1).abs() < 1e-12);
        assert_eq!(safe_ratio(0.0, 0.0), 0.0);
    }

    #[test]
    fn certificate_json_round_trip() {
        let mut c = BoundCertificate::new("demo", "1", 7).with_axis("x", vec![1.0, 2.0]);
        c.absorb(vec![CertificateSample::new(Some("sin"), &[("x", 1.0)], 1.0, 2.0)]);
        c.diagnostic("violations", 0.0);
        let s = serde_json::to_string(&c).unwrap();
        let back: BoundCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.measured_constant, 0.5);
    }
}
