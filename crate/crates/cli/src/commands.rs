//! The four subcommands. Each returns its artifacts and a status; writing
//! and exit codes are handled by the caller.

use serde::Serialize;

use pvscale_core::catalog::{catalog_labels, lookup};
use pvscale_core::scaling_lab::{measure_scaling_limit, LimitGrid, RateFit, ScalingLimitStudy};
use pvscale_core::{BoundCertificate, Claim, OperatorRequest, WeightKind};

use crate::config::{ClaimSelection, RunConfig};
use crate::output::{csv_header, json_document, Table};
use crate::{Artifact, CliError};

pub enum Status {
    Ok,
    CertificatesFailed(usize),
    NoiseDominated(String),
}

pub struct Outcome {
    /// The first artifact is the one printed when no `output_dir` is set.
    pub artifacts: Vec<Artifact>,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
    pub status: Status,
}

fn json_err(e: serde_json::Error) -> CliError {
    CliError::Numerical(format!("serialization failed: {e}"))
}

pub fn apply(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let phi = lookup(&cfg.function)?;
    let grid = cfg.y_grid.clone().unwrap_or_else(|| "0.5,1,2".parse().expect("static grid"));
    let request = OperatorRequest::new(cfg.operator_kind()?, phi, grid, cfg.pv)?;
    let mut table = Table::new(&["y", "value", "error_estimate", "truncation_bound"]);
    for r in request.evaluate()? {
        table.push(&[r.y, r.value, r.error_estimate, r.truncation_bound]);
    }
    Ok(Outcome {
        artifacts: vec![Artifact { name: "apply.csv", body: table.render(&cfg.resolved()) }],
        summary: Vec::new(),
        status: Status::Ok,
    })
}

pub fn certify(cfg: &RunConfig, all: bool) -> Result<Outcome, CliError> {
    let claims: Vec<Claim> = match &cfg.claim {
        ClaimSelection::One(c) if !all => vec![*c],
        _ => Claim::ALL.to_vec(),
    };
    let mut certs: Vec<BoundCertificate> = Vec::new();
    for c in claims {
        certs.extend(c.certify(&cfg.pv, cfg.seed)?);
    }
    let summary: Vec<String> = certs
        .iter()
        .map(|c| {
            format!(
                "{} {} measured_constant={:?} growth={}",
                if c.pass { "PASS" } else { "FAIL" },
                c.claim_id,
                c.measured_constant,
                c.growth.map_or("-".to_string(), |g| format!("{g:?}"))
            )
        })
        .collect();
    let failed = certs.iter().filter(|c| !c.pass).count();
    let body = json_document(&cfg.resolved(), &certs).map_err(json_err)?;
    Ok(Outcome {
        artifacts: vec![Artifact { name: "certify.json", body }],
        summary,
        status: if failed == 0 { Status::Ok } else { Status::CertificatesFailed(failed) },
    })
}

/// JSON body of a limit study: the raw `(λ, E)` table and the fit.
#[derive(Serialize)]
struct LimitReport<'a> {
    study: &'a ScalingLimitStudy,
    fit: Option<&'a RateFit>,
    uniform_ratio: f64,
    noise_dominated: bool,
}

pub fn limit_study(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let phi = lookup(&cfg.function)?;
    let mut grid = LimitGrid::default();
    if let Some(base) = &cfg.y_grid {
        grid.base = base.clone();
    }
    let m = cfg.m.unwrap_or_else(|| phi.claimed_class().majorant_m());
    let study = measure_scaling_limit(&phi, &cfg.lambdas, &grid, m, &cfg.pv)?;

    let mut table = Table::new(&["lambda", "E", "E_sqrt_lambda", "budget", "argmax_y"]);
    for r in &study.rows {
        table.push(&[r.lambda, r.e, r.e_sqrt_lambda, r.budget, r.argmax_y]);
    }
    let report = LimitReport {
        study: &study,
        fit: study.fit.as_ref(),
        uniform_ratio: study.uniform_ratio(),
        noise_dominated: study.noise_dominated(),
    };
    let json = json_document(&cfg.resolved(), &report).map_err(json_err)?;
    let mut summary = vec![match &study.fit {
        Some(f) => format!("slope={:?} r_squared={:?} uniform_ratio={:?}", f.slope, f.r_squared, study.uniform_ratio()),
        None if study.exact_zero => "E = 0 at every lambda (exact-zero case)".to_string(),
        None => "fit degenerate".to_string(),
    }];
    let status = if study.noise_dominated() {
        let msg = "quadrature budget exceeds 10% of E(lambda): measurement is noise-dominated".to_string();
        summary.push(msg.clone());
        Status::NoiseDominated(msg)
    } else {
        Status::Ok
    };
    Ok(Outcome {
        artifacts: vec![
            Artifact { name: "limit_study.csv", body: table.render(&cfg.resolved()) },
            Artifact { name: "limit_study.json", body: json },
        ],
        summary,
        status,
    })
}

pub fn catalog(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut body = csv_header(&cfg.resolved());
    body.push_str("label,weight,kappa,derivative,antiderivative\n");
    for label in catalog_labels() {
        let f = lookup(label)?;
        let class = f.claimed_class();
        let weight = match class.weight {
            WeightKind::Polynomial { m } => format!("m={m}"),
            WeightKind::Logarithmic => "log".to_string(),
        };
        body.push_str(&format!("{label},{weight},{:?},{},{}\n", class.kappa, f.has_deriv(), f.has_antideriv()));
    }
    Ok(Outcome { artifacts: vec![Artifact { name: "catalog.csv", body }], summary: Vec::new(), status: Status::Ok })
}
