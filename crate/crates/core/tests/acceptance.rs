//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs with `harness = false` so the verdict lines are always printed.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ipfc_core::harness::config::{presets, ExperimentConfig, Scheme};
use ipfc_core::harness::convergence::{run_convergence, write_rates_csv, RateRow};
use ipfc_core::harness::evolution::{simulate, write_energy_csv};
use ipfc_core::harness::initial::build_initial;
use ipfc_core::harness::scales::run_scales;
use ipfc_core::sav_cn::{self, SavScalar, StepperState};
use ipfc_core::sdc::{cheb_nodes, IntegrationMatrix};
use ipfc_core::{SpectralField, StepReport};

use common::*;

/// Reference benchmark errors for `N_T = 64, 128, 256, 512`.
const BENCH_SAV_CN: [f64; 4] = [4.75e-3, 1.17e-3, 2.91e-4, 7.17e-5];
const BENCH_SDC: [f64; 4] = [1.16e-5, 6.78e-7, 4.04e-8, 2.46e-9];

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Outputs reused by later criteria.
#[derive(Default)]
struct Shared {
    bench_csv: Vec<u8>,
    bench_rows: Vec<RateRow>,
    ddqc_csv: Vec<Vec<u8>>,
    /// `(run name, per-step |φ̂(0)| before re-projection)`.
    mean_drift: Vec<(String, f64)>,
}

fn rates_csv(rows: &[RateRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rates_csv(rows, &mut buf).unwrap();
    buf
}

fn energy_csv(reports: &[StepReport]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_energy_csv(reports, &mut buf).unwrap();
    buf
}

fn record_drift(shared: &mut Shared, name: &str, reports: &[StepReport]) {
    let worst = reports.iter().map(|r| r.mean_drift).fold(0.0, f64::max);
    shared.mean_drift.push((name.to_string(), worst));
}

fn bench1d() -> (Vec<RateRow>, Duration) {
    let cfg = ExperimentConfig::parse(presets::BENCH1D).unwrap();
    let start = Instant::now();
    let rows = run_convergence(&cfg).unwrap();
    (rows, start.elapsed())
}

fn criterion1(shared: &mut Shared) -> Verdict {
    let (rows, elapsed) = bench1d();
    let mut pass = elapsed <= Duration::from_secs(120);
    let mut parts = Vec::new();
    for (scheme, bench, band) in [
        (Scheme::SavCn, BENCH_SAV_CN, (1.85, 2.15)),
        (Scheme::SavCnSdc, BENCH_SDC, (3.7, 4.3)),
    ] {
        let mine: Vec<&RateRow> = rows.iter().filter(|r| r.scheme == scheme).collect();
        let rates: Vec<f64> = mine.iter().filter_map(|r| r.rate).collect();
        let ratios: Vec<f64> = mine.iter().zip(bench).map(|(r, p)| r.error / p).collect();
        pass &= rates.len() == 3 && rates.iter().all(|&x| x >= band.0 && x <= band.1);
        pass &= ratios.len() == 4 && ratios.iter().all(|&x| (1.0 / 3.0..=3.0).contains(&x));
        parts.push(format!(
            "{} rates {} error/bench {}",
            scheme.name(),
            fmt_list(&rates, 3),
            fmt_list(&ratios, 2)
        ));
    }
    shared.bench_csv = rates_csv(&rows);
    shared.bench_rows = rows;
    Verdict::new(pass, format!("{}; {:.1} s", parts.join("; "), elapsed.as_secs_f64()))
}

fn fmt_list(v: &[f64], digits: usize) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("[{}]", items.join(", "))
}

fn ddqc_run(preset: &str) -> (Vec<StepReport>, Duration) {
    let cfg = ExperimentConfig::parse(preset).unwrap();
    let problem = cfg.problem().unwrap();
    let phi0 = build_initial(&cfg.initial, &problem).unwrap();
    let start = Instant::now();
    let traj = simulate(&problem, phi0, &cfg.time, cfg.time.steps, &[]).unwrap();
    (traj.reports, start.elapsed())
}

/// Largest `(Eⁿ⁺¹ − Eⁿ)/max(|Eⁿ|, |Eⁿ⁺¹|)` of the modified energy.
fn worst_increase(reports: &[StepReport]) -> f64 {
    reports
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].modified_energy, w[1].modified_energy);
            let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            (b - a) / scale
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn criterion2(shared: &mut Shared) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, preset) in [("ddqc", presets::DDQC), ("ddqc_coarse", presets::DDQC_COARSE)] {
        let (reports, elapsed) = ddqc_run(preset);
        let worst = worst_increase(&reports);
        let original_monotone = reports.windows(2).all(|w| w[1].original_energy <= w[0].original_energy);
        pass &= worst <= 1e-10;
        if name == "ddqc" {
            pass &= elapsed <= Duration::from_secs(15 * 60);
        }
        parts.push(format!(
            "{name}: {} steps, worst relative increase {worst:.2e}, original energy monotone {original_monotone}, {:.1} s",
            reports.len() - 1,
            elapsed.as_secs_f64()
        ));
        record_drift(shared, name, &reports);
        shared.ddqc_csv.push(energy_csv(&reports));
    }
    Verdict::new(pass, parts.join("; "))
}

fn criterion3(shared: &mut Shared) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let problems = [
        ("1d C1=1e2", problem_1d(64, 1e2, true)),
        ("1d C1=1e16", problem_1d(64, 1e16, true)),
        ("ddqc 6^4", problem_ddqc(6, false)),
    ];
    let mut worst: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for i in 0..50 {
        let (_, p) = &problems[i % problems.len()];
        let phi = smooth_field(p.space(), &mut rng, 0.5, 2);
        let prev = smooth_field(p.space(), &mut rng, 0.5, 2);
        let c1 = p.params().c1;
        let r = SavScalar::from_bulk_mean(c1, p.bulk_mean(&phi)).shifted(rng.random_range(-0.5..0.5));
        let tau = 10f64.powf(rng.random_range(-3.0..0.0));
        let state = StepperState {
            phi,
            phi_prev: Some(prev),
            r,
            t: 0.0,
            step: 1,
        };
        let before = sav_cn::modified_energy(&state, p);
        let (next, report) = sav_cn::cn_step(&state, tau, p).unwrap();
        let dissipation = tau * report.w_norm_sq;
        let scale = p.gradient_energy(&state.phi)
            + p.gradient_energy(&next.phi)
            + state.r.square_minus_c1().abs()
            + next.r.square_minus_c1().abs()
            + dissipation;
        let residual = (report.modified_energy - before + dissipation).abs() / scale;
        worst = worst.max(residual);
        drift = drift.max(report.mean_drift);
    }
    shared.mean_drift.push(("random steps".into(), drift));
    let names: Vec<&str> = problems.iter().map(|(n, _)| *n).collect();
    Verdict::new(
        worst <= 1e-9,
        format!("worst relative residual {worst:.2e} over 50 steps ({})", names.join(", ")),
    )
}

fn criterion4(shared: &mut Shared) -> Verdict {
    // Plain evolutions of the benchmark problem in both schemes.
    let cfg = ExperimentConfig::parse(presets::BENCH1D).unwrap();
    let problem = cfg.problem().unwrap();
    let phi0 = build_initial(&cfg.initial, &problem).unwrap();
    for scheme in [Scheme::SavCn, Scheme::SavCnSdc] {
        let mut time = cfg.time.clone();
        time.scheme = scheme;
        let traj = simulate(&problem, phi0.clone(), &time, time.steps, &[]).unwrap();
        record_drift(shared, &format!("bench1d {}", scheme.name()), &traj.reports);
        shared.mean_drift.push((format!("bench1d {} final", scheme.name()), traj.phi.mean().norm()));
    }
    let worst = shared.mean_drift.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let names: Vec<&str> = shared.mean_drift.iter().map(|(n, _)| n.as_str()).collect();
    Verdict::new(worst <= 1e-13, format!("max |phi(0)| {worst:.2e} over runs: {}", names.join(", ")))
}

fn criterion5(_: &mut Shared) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for sizes in [vec![8], vec![6, 6]] {
        let p = ipfc_core::Problem::new(
            ipfc_core::ProjectionSpec::periodic(sizes.len()).unwrap(),
            &sizes,
            bench1d_params(1.0),
            true,
        )
        .unwrap();
        for _ in 0..5 {
            let f = random_field(p.space(), &mut rng);
            let fast = f.pointwise_poly(&[(3, 1.0)], true).unwrap();
            let slow = brute_force_power(&f, 3);
            worst = worst.max(paired_max_diff(&fast, &slow));
        }
    }
    Verdict::new(worst <= 1e-12, format!("max |pseudospectral - convolution| over paired modes {worst:.2e} (8 and 6x6 grids)"))
}

fn criterion6(_: &mut Shared) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let problems = [problem_1d(32, 1e2, true), problem_ddqc(6, false)];
    let s = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let p = &problems[i % 2];
        let phi = smooth_field(p.space(), &mut rng, 0.5, 1);
        let delta = smooth_field(p.space(), &mut rng, 0.5, 1);
        let w = p.variational_derivative(&phi).unwrap();
        let analytic = w.inner_ap(&delta).unwrap();
        let plus = p.energy(&SpectralField::lincomb(1.0, &phi, s, &delta).unwrap());
        let minus = p.energy(&SpectralField::lincomb(1.0, &phi, -s, &delta).unwrap());
        let fd = (plus - minus) / (2.0 * s);
        worst = worst.max((fd - analytic).abs() / analytic.abs());
    }
    Verdict::new(worst <= 1e-6, format!("worst relative error {worst:.2e} over 20 pairs at s = 1e-5"))
}


fn criterion7(_: &mut Shared) -> Verdict {
    // Error relative to τ_n·max_{[0,T]}|t^k|, the natural scale of the
    // subinterval integral; the pointwise ratio to the exact integral is
    // reported too since it degenerates near t = 0 for large k.
    let mut worst_scaled: f64 = 0.0;
    let mut worst_pointwise: f64 = 0.0;
    for t_end in [1.0, 0.2] {
        for n in 2..=32 {
            let grid = cheb_nodes(t_end, n).unwrap();
            let quad = IntegrationMatrix::new(&grid).unwrap();
            for k in 0..=n as i32 {
                let values: Vec<f64> = grid.nodes.iter().map(|t| t.powi(k)).collect();
                let got = quad.integrate_scalar(&values);
                for (i, g) in got.iter().enumerate() {
                    let (a, b) = (grid.nodes[i], grid.nodes[i + 1]);
                    let exact = (b.powi(k + 1) - a.powi(k + 1)) / (k + 1) as f64;
                    let err = (g - exact).abs();
                    worst_scaled = worst_scaled.max(err / ((b - a) * t_end.powi(k)));
                    worst_pointwise = worst_pointwise.max(err / exact.abs());
                }
            }
        }
    }
    Verdict::new(
        worst_scaled <= 1e-12,
        format!(
            "N_T <= 32, k <= N_T, T in {{1, 0.2}}: worst |err|/(tau_n T^k) {worst_scaled:.2e}, worst |err|/|exact| {worst_pointwise:.2e}"
        ),
    )
}

fn criterion8(shared: &mut Shared) -> Verdict {
    let sdc: Vec<&RateRow> = shared.bench_rows.iter().filter(|r| r.scheme == Scheme::SavCnSdc).collect();
    let e = |nt| sdc.iter().find(|r| r.nt == nt).map(|r| r.error);
    match (e(128), e(512)) {
        (Some(a), Some(b)) => {
            let order = (a / b).log2() / 2.0;
            Verdict::new(order >= 3.8, format!("one-sweep order between N_T = 128 and 512: {order:.3}"))
        }
        _ => Verdict::new(false, "benchmark rows for N_T = 128 and 512 missing"),
    }
}

fn criterion9(_: &mut Shared) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::parse(presets::SCALES).unwrap();
    cfg.output.dir = dir.path().to_path_buf();
    let start = Instant::now();
    let rows = run_scales(&cfg).unwrap();
    let elapsed = start.elapsed();
    let verdict = |m| rows.iter().find(|r| r.m == m).map(|r| r.spectrum.symmetry.0);
    let pass = verdict(5) == Some(12) && verdict(3) == Some(6) && elapsed <= Duration::from_secs(30 * 60);
    let parts: Vec<String> = rows
        .iter()
        .map(|r| format!("m = {}: {} ({} peaks, E = {:.6})", r.m, r.spectrum.symmetry, r.spectrum.peaks.len(), r.final_energy))
        .collect();
    Verdict::new(
        pass,
        format!(
            "{}; {} modes, T = {}, {:.1} s",
            parts.join(", "),
            cfg.grid.sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("x"),
            cfg.time.t_end,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion10(shared: &mut Shared) -> Verdict {
    let (rows, _) = bench1d();
    let same_table = rates_csv(&rows) == shared.bench_csv;
    let again: Vec<Vec<u8>> = [presets::DDQC, presets::DDQC_COARSE]
        .iter()
        .map(|p| energy_csv(&ddqc_run(p).0))
        .collect();
    let same_energy = again == shared.ddqc_csv && !again.is_empty();
    Verdict::new(
        same_table && same_energy,
        format!("convergence CSV identical {same_table}, DDQC energy CSVs identical {same_energy}"),
    )
}

fn main() {
    let criteria: [(&str, fn(&mut Shared) -> Verdict); 10] = [
        ("benchmark reproduction", criterion1),
        ("modified-energy decay", criterion2),
        ("per-step energy identity", criterion3),
        ("mean conservation", criterion4),
        ("pseudospectral cubic", criterion5),
        ("variational derivative", criterion6),
        ("quadrature exactness", criterion7),
        ("SDC order lift", criterion8),
        ("length-scale study", criterion9),
        ("determinism", criterion10),
    ];
    let mut shared = Shared::default();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run(&mut shared);
        failures += usize::from(!v.pass);
        println!(
            "criterion {:>2} [{name}]: {}: {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
