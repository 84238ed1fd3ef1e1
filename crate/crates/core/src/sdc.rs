//! Spectral deferred correction on Chebyshev nodes.
//!
//! A SAV/CN predictor `φ₀` is run over the nodes. The residual of its integral
//! form is integrated with global interpolatory quadrature and one linear
//! Crank–Nicolson-type sweep solves for the error `ε`, giving `φ₁ = φ₀ + ε`.
//! The SAV coefficient `κⁿ` and extrapolant `φ̄ⁿ` stay frozen at their
//! predictor values; only the argument of `N'` sees the correction.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::model::Problem;
use crate::sav_cn::{self, SavScalar, StepReport, StepperState};

/// Largest node count accepted for one global interpolation.
pub const MAX_NODES: usize = 4096;

/// Chebyshev–Lobatto time nodes `tⁿ = T/2 − (T/2)·cos(nπ/N_T)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    pub t_end: f64,
    pub nodes: Vec<f64>,
    pub taus: Vec<f64>,
}

impl ChebGrid {
    pub fn intervals(&self) -> usize {
        self.taus.len()
    }

    /// The same grid translated to start at `t0`.
    pub fn shifted(&self, t0: f64) -> Vec<f64> {
        self.nodes.iter().map(|t| t0 + t).collect()
    }
}

pub fn cheb_nodes(t_end: f64, intervals: usize) -> Result<ChebGrid> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("final time must be positive (got {t_end})")));
    }
    if intervals < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least 2 Chebyshev intervals are required (got {intervals})"
        )));
    }
    let n = intervals;
    let mut nodes = vec![0.0; n + 1];
    // T/2·(1 − cos 2a) = T·sin²a; build the lower half and mirror it so the
    // grid is symmetric about T/2 and hits both endpoints exactly.
    for i in 0..=n / 2 {
        let s = (i as f64 * std::f64::consts::PI / (2 * n) as f64).sin();
        nodes[i] = if 2 * i == n { 0.5 * t_end } else { t_end * s * s };
    }
    for i in n / 2 + 1..=n {
        nodes[i] = t_end - nodes[n - i];
    }
    nodes[0] = 0.0;
    nodes[n] = t_end;
    let taus = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(ChebGrid { t_end, nodes, taus })
}

/// Integration weights `S[n][j] = ∫_{tⁿ}^{tⁿ⁺¹} ℓ_j(t) dt` kept in factored
/// form `S = D·A`.
///
/// `A` maps node values to Chebyshev coefficients of the interpolant (a
/// discrete cosine transform) and `D` integrates each `T_k` over every
/// subinterval. Both factors are well conditioned for any node count, and
/// applying them costs `O(N²)` per mode without forming `S`.
#[derive(Debug, Clone)]
pub struct IntegrationMatrix {
    n: usize,
    /// `(N+1)×(N+1)`, row `k` gives coefficient `a_k`.
    a: Vec<f64>,
    /// `N×(N+1)`.
    d: Vec<f64>,
}

impl IntegrationMatrix {
    pub fn new(grid: &ChebGrid) -> Result<Self> {
        let n = grid.intervals();
        if n + 1 > MAX_NODES {
            return Err(Error::InvalidArgument(format!(
                "{} nodes exceed the global quadrature limit of {MAX_NODES}",
                n + 1
            )));
        }
        // cos(iπ/N) for i in 0..2N, so every cos(kθ_j) is an exact table
        // lookup after integer reduction.
        let cos_tab: Vec<f64> = (0..2 * n)
            .map(|i| (i as f64 * std::f64::consts::PI / n as f64).cos())
            .collect();
        // θ_j = π − jπ/N, so kθ_j = k(N − j)π/N.
        let cos_k_theta = |k: usize, j: usize| cos_tab[(k * (n - j)) % (2 * n)];

        let mut a = vec![0.0; (n + 1) * (n + 1)];
        for k in 0..=n {
            for j in 0..=n {
                let mut w = 2.0 / n as f64 * cos_k_theta(k, j);
                if j == 0 || j == n {
                    w *= 0.5;
                }
                if k == 0 || k == n {
                    w *= 0.5;
                }
                a[k * (n + 1) + j] = w;
            }
        }

        // Antiderivatives of T_k in x = cos θ, evaluated at node j.
        let anti = |k: usize, j: usize| -> f64 {
            match k {
                0 => cos_k_theta(1, j),
                1 => 0.25 * cos_k_theta(2, j),
                _ => {
                    cos_k_theta(k + 1, j) / (2 * (k + 1)) as f64
                        - cos_k_theta(k - 1, j) / (2 * (k - 1)) as f64
                }
            }
        };
        let half = 0.5 * grid.t_end;
        let mut d = vec![0.0; n * (n + 1)];
        for i in 0..n {
            for k in 0..=n {
                d[i * (n + 1) + k] = half * (anti(k, i + 1) - anti(k, i));
            }
        }
        Ok(Self { n, a, d })
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    /// The dense `N×(N+1)` matrix `S`, row-major.
    pub fn weights(&self) -> Vec<f64> {
        let m = self.n + 1;
        let mut s = vec![0.0; self.n * m];
        for i in 0..self.n {
            for k in 0..m {
                let dk = self.d[i * m + k];
                for j in 0..m {
                    s[i * m + j] += dk * self.a[k * m + j];
                }
            }
        }
        s
    }

    /// `Σ_j S[n][j]·f_j` for real samples.
    pub fn integrate_scalar(&self, values: &[f64]) -> Vec<f64> {
        let m = self.n + 1;
        assert_eq!(values.len(), m, "one sample per node is required");
        let coef: Vec<f64> = (0..m)
            .map(|k| (0..m).map(|j| self.a[k * m + j] * values[j]).sum())
            .collect();
        (0..self.n)
            .map(|i| (0..m).map(|k| self.d[i * m + k] * coef[k]).sum())
            .collect()
    }

    /// `Qⁿ = Σ_j S[n][j]·f_j` for fields given at every node.
    pub fn integrate(&self, values: &[SpectralField]) -> Result<Vec<SpectralField>> {
        let m = self.n + 1;
        if values.len() != m {
            return Err(Error::InvalidArgument(format!(
                "expected {m} node values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.same_grid(&values[0])) {
            return Err(Error::GridMismatch);
        }
        let modes = values[0].coeffs().len();
        let mut out: Vec<SpectralField> = (0..self.n).map(|_| SpectralField::zeros(values[0].space())).collect();
        let mut samples = vec![num_complex::Complex64::ZERO; m];
        let mut coef = vec![num_complex::Complex64::ZERO; m];
        for mode in 0..modes {
            for (s, v) in samples.iter_mut().zip(values) {
                *s = v.coeffs()[mode];
            }
            for (k, c) in coef.iter_mut().enumerate() {
                let row = &self.a[k * m..(k + 1) * m];
                *c = row.iter().zip(&samples).map(|(w, s)| s * w).sum();
            }
            for (i, q) in out.iter_mut().enumerate() {
                let row = &self.d[i * m..(i + 1) * m];
                q.coeffs_mut()[mode] = row.iter().zip(&coef).map(|(w, c)| c * w).sum();
            }
        }
        Ok(out)
    }
}

/// Predictor data at every node (and per interval for `kappa`, `phi_bar`).
#[derive(Debug, Clone)]
pub struct SdcTrajectory {
    pub nodes: Vec<f64>,
    pub phi: Vec<SpectralField>,
    pub r: Vec<SavScalar>,
    /// Mean-free `W(φ₀ⁿ)`.
    pub w: Vec<SpectralField>,
    pub kappa: Vec<f64>,
    pub phi_bar: Vec<SpectralField>,
    /// SAV/CN energy log of the predictor.
    pub reports: Vec<StepReport>,
}

fn node_derivative(problem: &Problem, phi: &SpectralField) -> Result<SpectralField> {
    let mut w = problem.variational_derivative(phi)?;
    w.remove_mean();
    Ok(w)
}

/// Runs SAV/CN from `state` over `nodes`, capturing everything the
/// correction needs.
pub fn predict(state: StepperState, nodes: &[f64], problem: &Problem) -> Result<SdcTrajectory> {
    sav_cn::check_nodes(nodes, state.t)?;
    let steps = nodes.len().saturating_sub(1);
    let mut traj = SdcTrajectory {
        nodes: nodes.to_vec(),
        phi: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
        w: Vec::with_capacity(steps + 1),
        kappa: Vec::with_capacity(steps),
        phi_bar: Vec::with_capacity(steps),
        reports: Vec::with_capacity(steps),
    };
    traj.w.push(node_derivative(problem, &state.phi)?);
    traj.phi.push(state.phi.clone());
    traj.r.push(state.r);
    let mut state = state;
    for w in nodes.windows(2) {
        let (mut next, mut report, detail) = sav_cn::cn_step_detailed(&state, w[1] - w[0], problem)?;
        next.t = w[1];
        report.t = w[1];
        traj.w.push(node_derivative(problem, &next.phi)?);
        traj.phi.push(next.phi.clone());
        traj.r.push(next.r);
        traj.kappa.push(detail.kappa);
        traj.phi_bar.push(detail.phi_bar);
        traj.reports.push(report);
        state = next;
    }
    Ok(traj)
}

/// One correction sweep; returns `φ₁ⁿ = φ₀ⁿ + εⁿ` at every node.
pub fn correct(
    traj: &SdcTrajectory,
    quad: &IntegrationMatrix,
    problem: &Problem,
) -> Result<Vec<SpectralField>> {
    let steps = traj.nodes.len() - 1;
    if quad.intervals() != steps {
        return Err(Error::InvalidArgument(format!(
            "quadrature has {} intervals, trajectory has {steps}",
            quad.intervals()
        )));
    }
    let sym = problem.symbol();
    let q = quad.integrate(&traj.w)?;
    let mut eps: Vec<SpectralField> = Vec::with_capacity(steps + 1);
    eps.push(problem.zeros());
    for n in 0..steps {
        let tau = traj.nodes[n + 1] - traj.nodes[n];
        let e = &eps[n];
        let ebar = if n == 0 {
            e.clone()
        } else {
            SpectralField::lincomb(1.5, e, -0.5, &eps[n - 1])?
        };
        let bar = &traj.phi_bar[n];
        let mut dn = problem.nprime(&bar.add(&ebar)?);
        dn.axpy(-1.0, &problem.nprime(bar))?;

        let mut rhs = e.apply_symbol(sym, 2)?;
        rhs.scale_in_place(-0.5 * tau);
        rhs.axpy(1.0, e)?;
        rhs.axpy(-1.0, &q[n])?;
        rhs.axpy(-1.0, &traj.phi[n + 1])?;
        rhs.axpy(1.0, &traj.phi[n])?;
        rhs.axpy(-tau * traj.kappa[n], &dn)?;
        let mut next = rhs.resolvent_apply(sym, tau)?;
        next.remove_mean();
        next.enforce_hermitian();
        if !next.is_finite() {
            return Err(Error::NonFinite("SDC correction"));
        }
        eps.push(next);
    }
    traj.phi
        .iter()
        .zip(&eps)
        .map(|(p, e)| p.add(e))
        .collect()
}

/// Rebuilds the frozen SAV data along a given trajectory by re-running the
/// `R` update: `Rⁿ⁺¹ = Rⁿ + ½⟨uⁿ, φⁿ⁺¹ − φⁿ⟩` with `uⁿ` taken at the
/// extrapolant of the trajectory itself.
pub fn refreeze(
    nodes: &[f64],
    phi: Vec<SpectralField>,
    r0: SavScalar,
    problem: &Problem,
) -> Result<SdcTrajectory> {
    let steps = nodes.len() - 1;
    let c1 = problem.params().c1;
    let mut r = Vec::with_capacity(steps + 1);
    let mut kappa = Vec::with_capacity(steps);
    let mut phi_bar = Vec::with_capacity(steps);
    let mut reports = Vec::with_capacity(steps);
    let mut w = Vec::with_capacity(steps + 1);
    r.push(r0);
    for f in &phi {
        w.push(node_derivative(problem, f)?);
    }
    for n in 0..steps {
        let bar = if n == 0 {
            phi[0].clone()
        } else {
            SpectralField::lincomb(1.5, &phi[n], -0.5, &phi[n - 1])?
        };
        let ratio = problem.sav_ratio_u(&bar)?;
        let mut u = ratio.u.clone();
        u.remove_mean();
        let next = r[n].shifted(0.5 * u.inner_ap(&phi[n + 1].sub(&phi[n])?)?);
        let half = r[n].midpoint(&next);
        kappa.push(1.0 + (half.offset() - ratio.sqrt_f1_excess(c1)) / ratio.sqrt_f1);
        phi_bar.push(bar);
        r.push(next);
        reports.push(node_report(problem, n + 1, nodes, &phi[n + 1], next, &w[n + 1]));
    }
    Ok(SdcTrajectory {
        nodes: nodes.to_vec(),
        phi,
        r,
        w,
        kappa,
        phi_bar,
        reports,
    })
}

fn node_report(
    problem: &Problem,
    n: usize,
    nodes: &[f64],
    phi: &SpectralField,
    r: SavScalar,
    w: &SpectralField,
) -> StepReport {
    StepReport {
        step: n,
        t: nodes[n],
        tau: nodes[n] - nodes[n - 1],
        original_energy: problem.energy(phi),
        modified_energy: problem.gradient_energy(phi) + r.square_minus_c1(),
        r_value: r.value(),
        w_norm_sq: w.norm_sq(),
        mean_drift: phi.mean().norm(),
    }
}

/// Result of [`sdc_solve`].
#[derive(Debug, Clone)]
pub struct SdcOutcome {
    pub phi: SpectralField,
    pub r: SavScalar,
    /// One row per node after the initial one. For corrected trajectories the
    /// `R` column comes from re-running the `R` update along them and
    /// `w_norm_sq` is `‖W(φⁿ)‖²` at the node.
    pub reports: Vec<StepReport>,
    pub nodes: Vec<f64>,
}

/// SAV/CN predictor plus `sweeps` corrections on `N_T` Chebyshev intervals
/// over `[0, T]`.
///
/// With `block = 0` the whole horizon is one global Chebyshev grid. Otherwise
/// it is split into `N_T / block` equal blocks with `block` intervals each;
/// every block restarts the stepper from the previous block's endpoint,
/// including the one-sided first step and `R = √F₁`.
pub fn sdc_solve(
    phi0: SpectralField,
    t_end: f64,
    intervals: usize,
    problem: &Problem,
    sweeps: usize,
    block: usize,
) -> Result<SdcOutcome> {
    let (blocks, per_block) = if block == 0 || block >= intervals {
        (1, intervals)
    } else {
        if intervals % block != 0 {
            return Err(Error::InvalidArgument(format!(
                "block size {block} does not divide {intervals} intervals"
            )));
        }
        (intervals / block, block)
    };
    let grid = cheb_nodes(t_end / blocks as f64, per_block)?;
    let quad = IntegrationMatrix::new(&grid)?;

    let mut phi = phi0;
    let mut r = None;
    let mut reports = Vec::with_capacity(intervals);
    let mut all_nodes = vec![0.0];
    for b in 0..blocks {
        let t0 = t_end * b as f64 / blocks as f64;
        let mut nodes = grid.shifted(t0);
        if b + 1 == blocks {
            *nodes.last_mut().expect("grid has nodes") = t_end;
        }
        let mut state = sav_cn::init(phi, problem)?;
        state.t = t0;
        let r0 = state.r;
        let mut traj = predict(state, &nodes, problem)?;
        for _ in 0..sweeps {
            let corrected = correct(&traj, &quad, problem)?;
            traj = refreeze(&nodes, corrected, r0, problem)?;
        }
        reports.extend(traj.reports.iter().copied().map(|mut rep| {
            rep.step += b * per_block;
            rep
        }));
        all_nodes.extend_from_slice(&nodes[1..]);
        r = traj.r.last().copied();
        phi = traj.phi.pop().expect("trajectory has nodes");
    }
    Ok(SdcOutcome {
        phi,
        r: r.expect("at least one block"),
        reports,
        nodes: all_nodes,
    })
}
