//! Second-order SAV/Crank–Nicolson stepper.
//!
//! One step solves
//!
//! ```text
//! (φⁿ⁺¹ − φⁿ)/τ = −W,   W = G²(φⁿ⁺¹ + φⁿ)/2 + R^{n+½}·u,
//! Rⁿ⁺¹ − Rⁿ = ½⟨u, φⁿ⁺¹ − φⁿ⟩,   u = N'(φ̄)/√F₁(φ̄),
//! ```
//!
//! with `φ̄ = (3φⁿ − φⁿ⁻¹)/2`, directly: the only coupling between modes is the
//! rank-one term in `u`, which reduces to one scalar equation.
//!
//! The mean-zero constraint is imposed by removing the zero mode of `u`, which
//! is the Lagrange-multiplier form of the constrained flow. The solve then
//! never creates a mean, and the final re-projection only clears round-off.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::model::Problem;

/// Tolerance on the zero mode of an initial field.
pub const MEAN_TOL: f64 = 1e-13;

/// Auxiliary scalar `R`, stored as `√C₁ + offset`.
///
/// With a large shift (`C₁ = 10¹⁶` gives `R ≈ 10⁸`) the increments of `R` are
/// far below its ulp and `R² − C₁` would cancel to nothing. Keeping the offset
/// separately preserves both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SavScalar {
    sqrt_c1: f64,
    offset: f64,
}

impl SavScalar {
    /// `R = √(C₁ + e)` for a bulk mean `e`.
    pub fn from_bulk_mean(c1: f64, bulk_mean: f64) -> Self {
        let sqrt_c1 = c1.sqrt();
        Self {
            sqrt_c1,
            offset: bulk_mean / ((c1 + bulk_mean).sqrt() + sqrt_c1),
        }
    }

    pub fn value(&self) -> f64 {
        self.sqrt_c1 + self.offset
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `R² − C₁`.
    pub fn square_minus_c1(&self) -> f64 {
        self.offset * (2.0 * self.sqrt_c1 + self.offset)
    }

    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            sqrt_c1: self.sqrt_c1,
            offset: self.offset + delta,
        }
    }

    /// `(R + other)/2`.
    pub fn midpoint(&self, other: &Self) -> Self {
        self.shifted(0.5 * (other.offset - self.offset))
    }
}

#[derive(Debug, Clone)]
pub struct StepperState {
    pub phi: SpectralField,
    /// Absent before the first step.
    pub phi_prev: Option<SpectralField>,
    pub r: SavScalar,
    pub t: f64,
    pub step: usize,
}

/// One row of the energy log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub step: usize,
    pub t: f64,
    pub tau: f64,
    pub original_energy: f64,
    pub modified_energy: f64,
    pub r_value: f64,
    /// `‖W^{n+½}‖²`; zero for the initial row.
    pub w_norm_sq: f64,
    /// `|φ̂ⁿ⁺¹(0)|` before the final re-projection.
    pub mean_drift: f64,
}

/// Intermediate quantities of one step.
#[derive(Debug, Clone)]
pub struct StepDetail {
    pub phi_bar: SpectralField,
    /// Mean-free `u`.
    pub u: SpectralField,
    /// `R^{n+½}/√F₁(φ̄)`.
    pub kappa: f64,
    /// `⟨u, φⁿ⁺¹⟩` from the scalar solve.
    pub s: f64,
    pub r_half: SavScalar,
    /// `W^{n+½}` assembled from its definition.
    pub w_half: SpectralField,
}

/// `R⁰ = √F₁(φ⁰)`; `phi0` must have zero mean.
pub fn init(phi0: SpectralField, problem: &Problem) -> Result<StepperState> {
    let mean = phi0.mean().norm();
    if !(mean <= MEAN_TOL) {
        return Err(Error::NonZeroMean(mean));
    }
    if !phi0.is_finite() {
        return Err(Error::NonFinite("initial field"));
    }
    let mut phi = phi0;
    phi.enforce_hermitian();
    phi.remove_mean();
    problem.f1(&phi)?;
    let r = SavScalar::from_bulk_mean(problem.params().c1, problem.bulk_mean(&phi));
    Ok(StepperState {
        phi,
        phi_prev: None,
        r,
        t: 0.0,
        step: 0,
    })
}

/// `½‖Gφⁿ‖² + (Rⁿ)² − C₁`.
pub fn modified_energy(state: &StepperState, problem: &Problem) -> f64 {
    problem.gradient_energy(&state.phi) + state.r.square_minus_c1()
}

/// Energy-log row describing `state` without a step.
pub fn initial_report(state: &StepperState, problem: &Problem) -> StepReport {
    StepReport {
        step: state.step,
        t: state.t,
        tau: 0.0,
        original_energy: problem.energy(&state.phi),
        modified_energy: modified_energy(state, problem),
        r_value: state.r.value(),
        w_norm_sq: 0.0,
        mean_drift: state.phi.mean().norm(),
    }
}

pub fn cn_step(state: &StepperState, tau: f64, problem: &Problem) -> Result<(StepperState, StepReport)> {
    let (next, report, _) = cn_step_detailed(state, tau, problem)?;
    Ok((next, report))
}

pub fn cn_step_detailed(
    state: &StepperState,
    tau: f64,
    problem: &Problem,
) -> Result<(StepperState, StepReport, StepDetail)> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive (got {tau})")));
    }
    let sym = problem.symbol();
    let phi = &state.phi;

    let phi_bar = match &state.phi_prev {
        Some(prev) => SpectralField::lincomb(1.5, phi, -0.5, prev)?,
        None => phi.clone(),
    };
    let ratio = problem.sav_ratio_u(&phi_bar)?;
    let excess = ratio.sqrt_f1_excess(problem.params().c1);
    let sqrt_f1 = ratio.sqrt_f1;
    let mut u = ratio.u;
    u.remove_mean();

    // Eliminate the scalar first: with A = (I + τ/2·G²)⁻¹(I − τ/2·G²)φⁿ and
    // v = (I + τ/2·G²)⁻¹u, φⁿ⁺¹ = A − τ·R^{n+½}·v and R^{n+½} solves a scalar
    // linear equation. Solving for R^{n+½} directly avoids cancelling two
    // O(τ·√C₁·‖u‖) vectors when C₁ is large.
    let u_phi = u.inner_ap(phi)?;
    let mut a = phi.apply_symbol(sym, 2)?;
    a.scale_in_place(-0.5 * tau);
    a.axpy(1.0, phi)?;
    let a = a.resolvent_apply(sym, tau)?;
    let v = u.resolvent_apply(sym, tau)?;
    let gamma = u.inner_ap(&v)?;
    let b = 0.25 * (u.inner_ap(&a)? - u_phi);
    // R^{n+½} − Rⁿ = (b − τγ/4·Rⁿ) / (1 + τγ/4)
    let half_shift = (b - 0.25 * tau * gamma * state.r.value()) / (1.0 + 0.25 * tau * gamma);
    let r_half = state.r.shifted(half_shift);
    let r_next = state.r.shifted(2.0 * half_shift);
    let s = u_phi + 4.0 * half_shift;

    let mut next = a;
    next.axpy(-tau * r_half.value(), &v)?;

    let mean_drift = next.mean().norm();
    next.remove_mean();
    next.enforce_hermitian();
    if !next.is_finite() || !r_next.value().is_finite() {
        return Err(Error::NonFinite("SAV/CN step"));
    }

    let kappa = 1.0 + (r_half.offset() - excess) / sqrt_f1;

    let mut w_half = SpectralField::lincomb(0.5, &next, 0.5, phi)?.apply_symbol(sym, 2)?;
    w_half.axpy(r_half.value(), &u)?;

    let state_next = StepperState {
        phi: next,
        phi_prev: Some(phi.clone()),
        r: r_next,
        t: state.t + tau,
        step: state.step + 1,
    };
    let report = StepReport {
        step: state_next.step,
        t: state_next.t,
        tau,
        original_energy: problem.energy(&state_next.phi),
        modified_energy: modified_energy(&state_next, problem),
        r_value: r_next.value(),
        w_norm_sq: w_half.norm_sq(),
        mean_drift,
    };
    let detail = StepDetail {
        phi_bar,
        u,
        kappa,
        s,
        r_half,
        w_half,
    };
    Ok((state_next, report, detail))
}

/// Checks that `nodes` is a strictly increasing time grid starting at `t0`.
pub(crate) fn check_nodes(nodes: &[f64], t0: f64) -> Result<()> {
    if let Some(&first) = nodes.first() {
        if (first - t0).abs() > 1e-12 * (1.0 + t0.abs()) {
            return Err(Error::InvalidArgument(format!(
                "time grid starts at {first}, state is at {t0}"
            )));
        }
    }
    if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Steps through `nodes` (including the starting time), calling `sink` after
/// every step. The state's time is set to each node exactly.
pub fn evolve(
    mut state: StepperState,
    nodes: &[f64],
    problem: &Problem,
    mut sink: impl FnMut(&StepperState, &StepReport) -> Result<()>,
) -> Result<(StepperState, Vec<StepReport>)> {
    check_nodes(nodes, state.t)?;
    let mut reports = Vec::with_capacity(nodes.len().saturating_sub(1));
    for w in nodes.windows(2) {
        let (mut next, mut report) = cn_step(&state, w[1] - w[0], problem)?;
        next.t = w[1];
        report.t = w[1];
        sink(&next, &report)?;
        reports.push(report);
        state = next;
    }
    Ok((state, reports))
}

/// `N_T + 1` equally spaced nodes on `[0, T]`.
pub fn uniform_nodes(t_end: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| if i == steps { t_end } else { t_end * i as f64 / steps as f64 })
        .collect()
}
