use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ipfc_core::harness::config::ExperimentConfig;
use ipfc_core::harness::convergence::{run_convergence, write_rates_csv};
use ipfc_core::harness::evolution::run_evolution;
use ipfc_core::harness::render::render_to_file;
use ipfc_core::harness::scales::run_scales;
use ipfc_core::harness::spectrum::spectrum_report;
use ipfc_core::{Error, FieldDump, Result};

/// SAV/CN and SDC solvers for the multi-length-scale phase-field crystal model.
#[derive(Parser)]
#[command(name = "ipfc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the configured problem, writing the energy log and dumps.
    Evolve { config: PathBuf },
    /// Temporal convergence table against a self-computed reference.
    Converge { config: PathBuf },
    /// Length-scale study over the `[scales]` m values.
    Scales { config: PathBuf },
    /// Render a field dump to a P5 graymap in the output directory.
    Render { config: PathBuf, dump: PathBuf },
    /// Peak list and symmetry verdict of a field dump.
    Spectrum { config: PathBuf, dump: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ipfc: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn output_path(cfg: &ExperimentConfig, dump: &Path, suffix: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output.dir)?;
    let stem = dump
        .file_stem()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no file name", dump.display())))?;
    Ok(cfg.output.dir.join(format!("{}{suffix}", stem.to_string_lossy())))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Evolve { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let out = run_evolution(&cfg)?;
            let last = out.trajectory.reports.last().expect("initial row is always present");
            println!(
                "{} steps to t = {}: E = {:e}, modified E = {:e}",
                last.step, last.t, last.original_energy, last.modified_energy
            );
            println!("energy log: {}", out.energy_csv.display());
            for d in &out.dumps {
                println!("dump: {}", d.display());
            }
        }
        Command::Converge { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let rows = run_convergence(&cfg)?;
            write_rates_csv(&rows, std::io::stdout().lock())?;
            let csv = cfg.convergence.as_ref().map(|c| c.csv.clone()).unwrap_or_default();
            std::fs::create_dir_all(&cfg.output.dir)?;
            let path = cfg.output.dir.join(csv);
            write_rates_csv(&rows, std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            println!("table: {}", path.display());
        }
        Command::Scales { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            for row in run_scales(&cfg)? {
                println!(
                    "m = {}: {} ({} peaks), final E = {:e}",
                    row.m,
                    row.spectrum.symmetry,
                    row.spectrum.peaks.len(),
                    row.final_energy
                );
            }
        }
        Command::Render { config, dump } => {
            let cfg = ExperimentConfig::load(&config)?;
            let problem = cfg.problem()?;
            let phi = FieldDump::read_file(&dump)?.into_field(problem.space())?;
            let path = output_path(&cfg, &dump, ".pgm")?;
            render_to_file(&phi, problem.spec(), &cfg.render, &path)?;
            println!("{}", path.display());
        }
        Command::Spectrum { config, dump } => {
            let cfg = ExperimentConfig::load(&config)?;
            let problem = cfg.problem()?;
            let phi = FieldDump::read_file(&dump)?.into_field(problem.space())?;
            let report = spectrum_report(&phi, problem.spec(), cfg.spectrum.threshold)?;
            let path = output_path(&cfg, &dump, "_spectrum.csv")?;
            report.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            println!("{} ({} peaks): {}", report.symmetry, report.peaks.len(), path.display());
        }
    }
    Ok(())
}
