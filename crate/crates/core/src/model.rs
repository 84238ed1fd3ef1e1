//! Rescaled multi-length-scale energy
//! `F[φ] = ½‖Gφ‖² + ⟨N(φ), 1⟩` with `N(φ) = ε̃/2·φ² − α̃/3·φ³ + ¼·φ⁴` and its
//! Allen–Cahn variational derivative `W = G²φ + N'(φ)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PhysicalField, SpectralField, SpectralSpace};
use crate::lattice::{build_grid, build_symbol, IndexGrid, OperatorSymbol, ProjectionSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Length scales `q_1..q_m`.
    pub q: Vec<f64>,
    pub eps: f64,
    pub alpha: f64,
    /// SAV shift keeping `F_1 = ⟨N(φ), 1⟩ + C_1` positive.
    pub c1: f64,
}

impl ModelParams {
    pub fn new(q: Vec<f64>, eps: f64, alpha: f64, c1: f64) -> Result<Self> {
        let p = Self { q, eps, alpha, c1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.is_empty() {
            return Err(Error::InvalidArgument("at least one length scale is required".into()));
        }
        if let Some(bad) = self.q.iter().find(|&&q| !(q > 0.0 && q.is_finite())) {
            return Err(Error::InvalidArgument(format!("length scales must be positive (got {bad})")));
        }
        if !(self.eps.is_finite() && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument("eps and alpha must be finite".into()));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(Error::InvalidArgument(format!("c1 must be positive (got {})", self.c1)));
        }
        Ok(())
    }
}

/// Which bulk polynomial is active. `Quadratic` drops the cubic and quartic
/// terms, leaving a linear flow that has a closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bulk {
    Full,
    #[cfg_attr(not(test), allow(dead_code))]
    Quadratic,
}

fn density(v: f64, p: &ModelParams, bulk: Bulk) -> f64 {
    let v2 = v * v;
    match bulk {
        Bulk::Full => v2 * (0.5 * p.eps - v * p.alpha / 3.0 + 0.25 * v2),
        Bulk::Quadratic => 0.5 * p.eps * v2,
    }
}

fn derivative(v: f64, p: &ModelParams, bulk: Bulk) -> f64 {
    match bulk {
        Bulk::Full => v * (p.eps - p.alpha * v + v * v),
        Bulk::Quadratic => p.eps * v,
    }
}

/// Pointwise `N(v)`.
pub fn bulk_density(p: &PhysicalField, params: &ModelParams) -> PhysicalField {
    p.map(|v| density(v, params, Bulk::Full))
}

/// Spectral coefficients of `N'(φ) = ε̃φ − α̃φ² + φ³`.
pub fn nprime(f: &SpectralField, params: &ModelParams, dealias: bool) -> SpectralField {
    f.pointwise_map(dealias, |v| derivative(v, params, Bulk::Full))
}

/// `u = N'(φ̄)/√F_1(φ̄)` together with the pieces of `F_1` the stepper needs.
#[derive(Debug, Clone)]
pub struct SavRatio {
    pub u: SpectralField,
    /// `⟨N(φ̄), 1⟩`.
    pub bulk_mean: f64,
    pub sqrt_f1: f64,
}

impl SavRatio {
    /// `√F_1 − √C_1`, computed without cancellation.
    pub fn sqrt_f1_excess(&self, c1: f64) -> f64 {
        self.bulk_mean / (self.sqrt_f1 + c1.sqrt())
    }
}

/// A fully assembled model: lattice, grid, operator symbol and parameters.
#[derive(Debug, Clone)]
pub struct Problem {
    spec: ProjectionSpec,
    space: Arc<SpectralSpace>,
    symbol: OperatorSymbol,
    params: ModelParams,
    /// Pseudospectral products on a padded grid.
    pub dealias: bool,
    bulk: Bulk,
}

impl Problem {
    pub fn new(spec: ProjectionSpec, sizes: &[usize], params: ModelParams, dealias: bool) -> Result<Self> {
        params.validate()?;
        let grid = build_grid(&spec, sizes)?;
        let symbol = build_symbol(&spec, &grid, &params.q)?;
        Ok(Self {
            spec,
            space: SpectralSpace::new(grid),
            symbol,
            params,
            dealias,
            bulk: Bulk::Full,
        })
    }

    /// Replaces the bulk by `ε̃/2·φ²`, making the flow linear.
    #[cfg(test)]
    pub(crate) fn linearized(mut self) -> Self {
        self.bulk = Bulk::Quadratic;
        self
    }

    pub fn spec(&self) -> &ProjectionSpec {
        &self.spec
    }

    pub fn space(&self) -> &Arc<SpectralSpace> {
        &self.space
    }

    pub fn grid(&self) -> &IndexGrid {
        self.space.grid()
    }

    pub fn symbol(&self) -> &OperatorSymbol {
        &self.symbol
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn zeros(&self) -> SpectralField {
        SpectralField::zeros(&self.space)
    }

    /// `N'(φ)` with this problem's bulk and dealiasing setting.
    pub fn nprime(&self, f: &SpectralField) -> SpectralField {
        let (p, bulk) = (&self.params, self.bulk);
        f.pointwise_map(self.dealias, |v| derivative(v, p, bulk))
    }

    /// `⟨N(φ), 1⟩`, the zero mode of the bulk density.
    pub fn bulk_mean(&self, f: &SpectralField) -> f64 {
        let (p, bulk) = (&self.params, self.bulk);
        f.pointwise_mean(self.dealias, |v| density(v, p, bulk))
    }

    /// `F_1(φ) = ⟨N(φ), 1⟩ + C_1`; an error unless strictly positive.
    pub fn f1(&self, f: &SpectralField) -> Result<f64> {
        check_f1(self.bulk_mean(f) + self.params.c1)
    }

    /// `½‖Gφ‖²`.
    pub fn gradient_energy(&self, f: &SpectralField) -> f64 {
        0.5 * f
            .coeffs()
            .iter()
            .zip(self.symbol.g2())
            .map(|(c, g2)| g2 * c.norm_sqr())
            .sum::<f64>()
    }

    /// Original energy `½‖Gφ‖² + ⟨N(φ), 1⟩`.
    pub fn energy(&self, f: &SpectralField) -> f64 {
        self.gradient_energy(f) + self.bulk_mean(f)
    }

    /// `W(φ) = G²φ + N'(φ)`.
    pub fn variational_derivative(&self, f: &SpectralField) -> Result<SpectralField> {
        let mut w = f.apply_symbol(&self.symbol, 2)?;
        w.axpy(1.0, &self.nprime(f))?;
        Ok(w)
    }

    pub fn sav_ratio_u(&self, fbar: &SpectralField) -> Result<SavRatio> {
        let (p, bulk) = (&self.params, self.bulk);
        let (np, bulk_mean) = fbar.pointwise_map_with_mean(
            self.dealias,
            |v| derivative(v, p, bulk),
            |v| density(v, p, bulk),
        );
        let sqrt_f1 = check_f1(bulk_mean + p.c1)?.sqrt();
        Ok(SavRatio {
            u: np.scale(1.0 / sqrt_f1),
            bulk_mean,
            sqrt_f1,
        })
    }
}

fn check_f1(f1: f64) -> Result<f64> {
    if !f1.is_finite() {
        Err(Error::NonFinite("F1"))
    } else if f1 > 0.0 {
        Ok(f1)
    } else {
        Err(Error::NonPositiveF1(f1))
    }
}
