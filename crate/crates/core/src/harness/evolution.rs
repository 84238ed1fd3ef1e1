//! Time-evolution driver and the energy log format.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, NodeKind, Scheme, TimeConfig};
use super::initial::build_initial;
use super::render::render_to_file;
use crate::error::Result;
use crate::field::{FieldDump, SpectralField};
use crate::model::Problem;
use crate::sav_cn::{self, StepReport};
use crate::sdc::{self, cheb_nodes};

pub const ENERGY_HEADER: &str = "step,t,tau,original_energy,modified_energy,R,w_norm_sq";

pub fn write_energy_csv<W: Write>(reports: &[StepReport], mut out: W) -> Result<()> {
    writeln!(out, "{ENERGY_HEADER}")?;
    for r in reports {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.step, r.t, r.tau, r.original_energy, r.modified_energy, r.r_value, r.w_norm_sq
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Time nodes of a plain SAV/CN run.
pub fn time_nodes(time: &TimeConfig, kind: NodeKind, steps: usize) -> Result<Vec<f64>> {
    match kind {
        NodeKind::Uniform => Ok(sav_cn::uniform_nodes(time.t_end, steps)),
        NodeKind::Chebyshev => Ok(cheb_nodes(time.t_end, steps)?.nodes),
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Energy log including the initial row.
    pub reports: Vec<StepReport>,
    pub phi: SpectralField,
    /// `(requested time, field at the first node at or after it)`.
    pub snapshots: Vec<(f64, SpectralField)>,
}

/// Integrates from `phi0` with the scheme in `time`, using `steps` intervals.
///
/// SDC runs only know the corrected field at the end of each block, so
/// snapshots are taken for plain SAV/CN runs only.
pub fn simulate(
    problem: &Problem,
    phi0: SpectralField,
    time: &TimeConfig,
    steps: usize,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    let state = sav_cn::init(phi0, problem)?;
    let first = sav_cn::initial_report(&state, problem);
    match time.scheme {
        Scheme::SavCn => {
            let nodes = time_nodes(time, time.nodes, steps)?;
            let mut pending: Vec<f64> = snapshot_times.to_vec();
            pending.sort_by(f64::total_cmp);
            let mut snapshots = Vec::new();
            let slack = 1e-9 * time.t_end;
            let mut take = |t: f64, phi: &SpectralField| {
                while let Some(&ts) = pending.first() {
                    if t + slack < ts {
                        break;
                    }
                    snapshots.push((ts, phi.clone()));
                    pending.remove(0);
                }
            };
            take(state.t, &state.phi);
            let (end, mut reports) = sav_cn::evolve(state, &nodes, problem, |s, _| {
                take(s.t, &s.phi);
                Ok(())
            })?;
            reports.insert(0, first);
            Ok(Trajectory {
                reports,
                phi: end.phi,
                snapshots,
            })
        }
        Scheme::SavCnSdc => {
            let phi = state.phi;
            let out = sdc::sdc_solve(phi, time.t_end, steps, problem, time.sweeps, time.block)?;
            let mut reports = out.reports;
            reports.insert(0, first);
            Ok(Trajectory {
                reports,
                phi: out.phi,
                snapshots: Vec::new(),
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionSummary {
    pub trajectory: Trajectory,
    pub energy_csv: PathBuf,
    pub dumps: Vec<PathBuf>,
}

pub(crate) fn snapshot_name(prefix: &str, t: f64) -> String {
    format!("{prefix}_t{t}.txt")
}

/// Writes a dump and, if requested, its rendering; returns the dump path.
pub(crate) fn save_field(cfg: &ExperimentConfig, problem: &Problem, phi: &SpectralField, path: PathBuf) -> Result<PathBuf> {
    FieldDump::from_field(phi).write_file(&path)?;
    if cfg.output.render_snapshots && problem.spec().physical_dim() <= 2 {
        render_to_file(phi, problem.spec(), &cfg.render, &path.with_extension("pgm"))?;
    }
    Ok(path)
}

/// Runs the configured evolution and writes the energy log, snapshot dumps
/// and a final dump under `output.dir`.
pub fn run_evolution(cfg: &ExperimentConfig) -> Result<EvolutionSummary> {
    let problem = cfg.problem()?;
    let phi0 = build_initial(&cfg.initial, &problem)?;
    run_evolution_with(cfg, &problem, phi0, &cfg.output.dir, "")
}

pub(crate) fn run_evolution_with(
    cfg: &ExperimentConfig,
    problem: &Problem,
    phi0: SpectralField,
    dir: &Path,
    tag: &str,
) -> Result<EvolutionSummary> {
    std::fs::create_dir_all(dir)?;
    let traj = simulate(problem, phi0, &cfg.time, cfg.time.steps, &cfg.output.snapshots)?;
    let energy_csv = dir.join(tagged(&cfg.output.energy_csv, tag));
    write_energy_csv(&traj.reports, std::io::BufWriter::new(std::fs::File::create(&energy_csv)?))?;
    let prefix = format!("{}{tag}", cfg.output.dump_prefix);
    let mut dumps = Vec::new();
    for (t, phi) in &traj.snapshots {
        dumps.push(save_field(cfg, problem, phi, dir.join(snapshot_name(&prefix, *t)))?);
    }
    dumps.push(save_field(cfg, problem, &traj.phi, dir.join(format!("{prefix}_final.txt")))?);
    Ok(EvolutionSummary {
        trajectory: traj,
        energy_csv,
        dumps,
    })
}

/// Inserts `tag` before the extension: `energy.csv` → `energy_m3.csv`.
pub(crate) fn tagged(name: &str, tag: &str) -> String {
    if tag.is_empty() {
        return name.to_string();
    }
    match name.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}{tag}.{ext}"),
        None => format!("{name}{tag}"),
    }
}
