//! wasm-bindgen bindings for the static demo page in `www/`.

use wasm_bindgen::prelude::*;

use ipfc_core::harness::config::{ConvergenceConfig, ErrorNorm, InitialCondition, RenderConfig, Scheme, TimeConfig};
use ipfc_core::harness::convergence::{convergence_table, write_rates_csv};
use ipfc_core::harness::initial::build_initial;
use ipfc_core::harness::render::{rasterize, to_gray};
use ipfc_core::harness::spectrum::spectrum_report;
use ipfc_core::sav_cn::{self, StepperState};
use ipfc_core::{ModelParams, Problem, ProjectionSpec};

fn js(e: ipfc_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A dodecagonal run that the page advances a few steps at a time.
#[wasm_bindgen]
pub struct Stepper {
    problem: Problem,
    state: StepperState,
    tau: f64,
}

#[wasm_bindgen]
impl Stepper {
    /// Seeds the two-ring dodecagonal star on `n⁴` modes.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, length_scales: usize, amplitude: f64, tau: f64) -> Result<Stepper, JsError> {
        let s = 2.0 * (std::f64::consts::PI / 12.0).cos();
        let q = (0..length_scales.max(1)).map(|j| s.powi(j as i32)).collect();
        let params = ModelParams::new(q, -2.0, 2.0, 1e16).map_err(js)?;
        let problem = Problem::new(ProjectionSpec::dodecagonal(), &[n; 4], params, false).map_err(js)?;
        let ic = InitialCondition::Rings {
            radii: None,
            amplitude,
            perturbation: 0.0,
        };
        let phi0 = build_initial(&ic, &problem).map_err(js)?;
        let state = sav_cn::init(phi0, &problem).map_err(js)?;
        Ok(Stepper { problem, state, tau })
    }

    /// Advances `count` SAV/CN steps.
    pub fn step(&mut self, count: usize) -> Result<(), JsError> {
        for _ in 0..count {
            self.state = sav_cn::cn_step(&self.state, self.tau, &self.problem).map_err(js)?.0;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn energy(&self) -> f64 {
        self.problem.energy(&self.state.phi)
    }

    pub fn modified_energy(&self) -> f64 {
        sav_cn::modified_energy(&self.state, &self.problem)
    }

    /// Rotational symmetry of the current spectrum, e.g. `"12-fold"`.
    pub fn symmetry(&self) -> String {
        spectrum_report(&self.state.phi, self.problem.spec(), 0.1)
            .map(|r| r.symmetry.to_string())
            .unwrap_or_else(|e| e.to_string())
    }

    /// RGBA pixels of the morphology on `[0, extent]²`, first row at the top.
    pub fn render(&self, width: usize, height: usize, extent: f64) -> Result<Vec<u8>, JsError> {
        let cfg = RenderConfig {
            lo: Some(vec![0.0, 0.0]),
            hi: Some(vec![extent, extent]),
            resolution: Some(vec![width, height]),
            floor: 1e-6,
        };
        let gray = to_gray(&rasterize(&self.state.phi, self.problem.spec(), &cfg).map_err(js)?);
        Ok(rgba_top_down(&gray, width))
    }
}

fn rgba_top_down(gray: &[u8], width: usize) -> Vec<u8> {
    gray.chunks(width)
        .rev()
        .flat_map(|row| row.iter().flat_map(|&g| [g, g, g, 255]))
        .collect()
}

/// Temporal convergence table of the `sin x` benchmark on `modes` Fourier
/// modes, as CSV.
#[wasm_bindgen]
pub fn convergence_csv(modes: usize, t_end: f64, steps: Vec<usize>, reference: usize) -> Result<String, JsError> {
    let params = ModelParams::new(vec![2f64.sqrt(), 3f64.sqrt()], 10.0, 4.0, 1e16).map_err(js)?;
    let problem = Problem::new(ProjectionSpec::periodic(1).map_err(js)?, &[modes], params, false).map_err(js)?;
    let phi0 = build_initial(&InitialCondition::Sine { axis: 0, amplitude: 1.0 }, &problem).map_err(js)?;
    let time = TimeConfig {
        t_end,
        steps: reference,
        scheme: Scheme::SavCn,
        nodes: Default::default(),
        sweeps: 1,
        block: 0,
    };
    let conv = ConvergenceConfig {
        steps,
        reference,
        schemes: vec![Scheme::SavCn, Scheme::SavCnSdc],
        norm: ErrorNorm::DftL2,
        csv: String::new(),
    };
    let rows = convergence_table(&problem, &phi0, &time, &conv).map_err(js)?;
    let mut buf = Vec::new();
    write_rates_csv(&rows, &mut buf).map_err(js)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepper_starts_twelve_fold_and_dissipates() {
        let mut s = Stepper::new(6, 2, 0.3, 0.01).unwrap();
        assert_eq!(s.symmetry(), "12-fold");
        let e0 = s.modified_energy();
        s.step(3).unwrap();
        assert!(s.modified_energy() <= e0);
        let px = s.render(4, 3, 10.0).unwrap();
        assert_eq!(px.len(), 48);
        assert!(px.chunks(4).all(|p| p[3] == 255));
    }

    #[test]
    fn rows_are_flipped() {
        assert_eq!(rgba_top_down(&[1, 2], 1), vec![2, 2, 2, 255, 1, 1, 1, 255]);
    }

    #[test]
    fn convergence_table_has_both_schemes() {
        let csv = convergence_csv(16, 0.1, vec![8, 16], 64).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.contains("sav_cn_sdc,16,"));
    }
}
