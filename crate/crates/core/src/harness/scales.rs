//! Length-scale study: `q_j = s^{j-1}` for several `m`.

use std::io::Write;

use super::config::{ExperimentConfig, ScalesConfig};
use super::evolution::{run_evolution_with, tagged};
use super::initial::build_initial;
use super::spectrum::{spectrum_report, SpectrumReport};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Problem};

/// `[1, s, s², …]` with `m` entries.
pub fn geometric_scales(m: usize, s: f64) -> Vec<f64> {
    (0..m).map(|j| s.powi(j as i32)).collect()
}

#[derive(Debug, Clone)]
pub struct ScalesRow {
    pub m: usize,
    pub q: Vec<f64>,
    pub spectrum: SpectrumReport,
    pub final_energy: f64,
}

/// The configuration with `model.q` replaced by `m` geometric scales.
pub fn config_for(cfg: &ExperimentConfig, m: usize, s: f64) -> Result<ExperimentConfig> {
    let mut out = cfg.clone();
    let p = &cfg.model;
    out.model = ModelParams::new(geometric_scales(m, s), p.eps, p.alpha, p.c1)?;
    Ok(out)
}

pub fn run_scales(cfg: &ExperimentConfig) -> Result<Vec<ScalesRow>> {
    let ScalesConfig { m: ms, s } = cfg
        .scales
        .clone()
        .ok_or_else(|| Error::Config("missing [scales] section".into()))?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir)?;
    let mut rows = Vec::new();
    for m in ms {
        let sub = config_for(cfg, m, s)?;
        let problem: Problem = sub.problem()?;
        let phi0 = build_initial(&sub.initial, &problem)?;
        let tag = format!("_m{m}");
        let out = run_evolution_with(&sub, &problem, phi0, dir, &tag)?;
        let spectrum = spectrum_report(&out.trajectory.phi, problem.spec(), sub.spectrum.threshold)?;
        let file = std::fs::File::create(dir.join(tagged("spectrum.csv", &tag)))?;
        spectrum.write_csv(std::io::BufWriter::new(file))?;
        let final_energy = out.trajectory.reports.last().map_or(f64::NAN, |r| r.original_energy);
        rows.push(ScalesRow {
            m,
            q: sub.model.q.clone(),
            spectrum,
            final_energy,
        });
    }
    let file = std::fs::File::create(dir.join("scales.csv"))?;
    write_summary_csv(&rows, std::io::BufWriter::new(file))?;
    Ok(rows)
}

/// CSV with header `m,verdict,peaks,final_energy`.
pub fn write_summary_csv<W: Write>(rows: &[ScalesRow], mut out: W) -> Result<()> {
    writeln!(out, "m,verdict,peaks,final_energy")?;
    for r in rows {
        writeln!(out, "{},{},{},{:e}", r.m, r.spectrum.symmetry, r.spectrum.peaks.len(), r.final_energy)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{presets, default_ratio};

    #[test]
    fn ratio_gives_dodecagonal_pair() {
        let q = geometric_scales(5, default_ratio());
        assert_eq!(q[0], 1.0);
        assert!((q[1] - 2.0 * (std::f64::consts::PI / 12.0).cos()).abs() < 1e-15);
        assert!((q[4] - q[1].powi(4)).abs() < 1e-12);
    }

    #[test]
    fn short_study_writes_summary() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::parse(presets::SCALES).unwrap();
        cfg.grid.sizes = vec![6; 4];
        cfg.time.t_end = 0.1;
        cfg.time.steps = 2;
        cfg.output.dir = dir.path().to_path_buf();
        cfg.scales.as_mut().unwrap().m = vec![2];
        let rows = run_scales(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].spectrum.symmetry.0, 12);
        let text = std::fs::read_to_string(dir.path().join("scales.csv")).unwrap();
        assert!(text.starts_with("m,verdict,peaks,final_energy\n2,12-fold,24,"));
        assert!(dir.path().join("energy_m2.csv").exists());
        assert!(dir.path().join("spectrum_m2.csv").exists());
    }
}
