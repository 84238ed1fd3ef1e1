//! Temporal convergence study against a self-computed reference.

use std::io::Write;

use super::config::{ConvergenceConfig, ErrorNorm, ExperimentConfig, Scheme, TimeConfig};
use super::evolution::simulate;
use super::initial::build_initial;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::model::Problem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub scheme: Scheme,
    pub nt: usize,
    pub error: f64,
    /// `log₂(e_{N/2} / e_N)` against the previous row of the same scheme.
    pub rate: Option<f64>,
}

pub fn error_norm(diff: &SpectralField, norm: ErrorNorm) -> f64 {
    match norm {
        ErrorNorm::ApL2 => diff.norm(),
        ErrorNorm::DftL2 => diff.norm() * diff.grid().total() as f64,
    }
}

/// Field at `T` for one scheme and `N_T`.
pub fn endpoint(problem: &Problem, phi0: &SpectralField, time: &TimeConfig, scheme: Scheme, nt: usize) -> Result<SpectralField> {
    let time = TimeConfig {
        scheme,
        ..time.clone()
    };
    Ok(simulate(problem, phi0.clone(), &time, nt, &[])?.phi)
}

/// For every scheme, the reference is the same scheme at `reference` steps.
pub fn convergence_table(
    problem: &Problem,
    phi0: &SpectralField,
    time: &TimeConfig,
    conv: &ConvergenceConfig,
) -> Result<Vec<RateRow>> {
    if let Some(&bad) = conv.steps.iter().find(|&&n| n >= conv.reference) {
        return Err(Error::Config(format!(
            "reference N_T = {} must exceed every tested N_T (got {bad})",
            conv.reference
        )));
    }
    let mut rows = Vec::new();
    for &scheme in &conv.schemes {
        let reference = endpoint(problem, phi0, time, scheme, conv.reference)?;
        let mut prev: Option<f64> = None;
        for &nt in &conv.steps {
            let phi = endpoint(problem, phi0, time, scheme, nt)?;
            let error = error_norm(&phi.sub(&reference)?, conv.norm);
            let rate = prev.map(|p| (p / error).log2());
            rows.push(RateRow { scheme, nt, error, rate });
            prev = Some(error);
        }
    }
    Ok(rows)
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<RateRow>> {
    let conv = cfg
        .convergence
        .as_ref()
        .ok_or_else(|| Error::Config("missing [convergence] section".into()))?;
    let problem = cfg.problem()?;
    let phi0 = build_initial(&cfg.initial, &problem)?;
    convergence_table(&problem, &phi0, &cfg.time, conv)
}

/// CSV with header `scheme,NT,error,rate`; the first rate of each scheme is
/// empty.
pub fn write_rates_csv<W: Write>(rows: &[RateRow], mut out: W) -> Result<()> {
    writeln!(out, "scheme,NT,error,rate")?;
    for r in rows {
        let rate = r.rate.map(|x| format!("{x:e}")).unwrap_or_default();
        writeln!(out, "{},{},{:e},{rate}", r.scheme.name(), r.nt, r.error)?;
    }
    out.flush()?;
    Ok(())
}
