//! Construction of initial fields.

use num_complex::Complex64;

use super::config::{InitialCondition, ModeSpec};
use crate::error::{Error, Result};
use crate::field::{FieldDump, SpectralField};
use crate::model::Problem;

/// Radius tolerance when collecting modes on a circle.
pub const RING_TOL: f64 = 1e-8;

/// Builds the initial field; the result is always Hermitian with zero mean.
pub fn build_initial(ic: &InitialCondition, problem: &Problem) -> Result<SpectralField> {
    let mut f = match ic {
        InitialCondition::Zero => problem.zeros(),
        InitialCondition::Sine { axis, amplitude } => {
            let n = problem.grid().ndim();
            if *axis >= n {
                return Err(Error::Config(format!("initial.axis = {axis} but the lattice has {n} axes")));
            }
            let mut h = vec![0; n];
            h[*axis] = 1;
            mode_field(problem, &[ModeSpec {
                h,
                amplitude: *amplitude,
                phase: -std::f64::consts::FRAC_PI_2,
            }])?
        }
        InitialCondition::Modes { modes } => mode_field(problem, modes)?,
        InitialCondition::Rings {
            radii,
            amplitude,
            perturbation,
        } => {
            let radii = radii.as_deref().unwrap_or(&problem.params().q);
            ring_field(problem, radii, *amplitude, *perturbation)?
        }
        InitialCondition::File { path } => FieldDump::read_file(path)?.into_field(problem.space())?,
    };
    f.enforce_hermitian();
    f.remove_mean();
    Ok(f)
}

/// `Σ amplitude · cos(k_h·r + phase)`.
pub fn mode_field(problem: &Problem, modes: &[ModeSpec]) -> Result<SpectralField> {
    let grid = problem.grid();
    let mut f = problem.zeros();
    for m in modes {
        let neg: Vec<i64> = m.h.iter().map(|x| -x).collect();
        let (Some(a), Some(b)) = (grid.flat_index(&m.h), grid.flat_index(&neg)) else {
            return Err(Error::Config(format!("mode {:?} is outside the grid or has no partner", m.h)));
        };
        let c = Complex64::from_polar(0.5 * m.amplitude, m.phase);
        if a == b {
            f.coeffs_mut()[a] += Complex64::new(2.0 * c.re, 0.0);
        } else {
            f.coeffs_mut()[a] += c;
            f.coeffs_mut()[b] += c.conj();
        }
    }
    Ok(f)
}

/// Paired modes whose projected wavevector has length `radius`.
pub fn ring_modes(problem: &Problem, radius: f64) -> Vec<usize> {
    let grid = problem.grid();
    let spec = problem.spec();
    let mut h = vec![0; grid.ndim()];
    let mut k = vec![0.0; spec.physical_dim()];
    (0..grid.total())
        .filter(|&flat| {
            if !grid.is_paired(flat) {
                return false;
            }
            grid.multi_index_into(flat, &mut h);
            spec.wavevector_into(&h, &mut k);
            let r = k.iter().map(|x| x * x).sum::<f64>().sqrt();
            (r - radius).abs() <= RING_TOL * radius.max(1.0)
        })
        .collect()
}

fn ring_field(problem: &Problem, radii: &[f64], amplitude: f64, perturbation: f64) -> Result<SpectralField> {
    let mut f = problem.zeros();
    let spec = problem.spec();
    let grid = problem.grid();
    for (j, &radius) in radii.iter().enumerate() {
        if !(radius > 0.0) {
            return Err(Error::Config(format!("ring radius must be positive (got {radius})")));
        }
        for flat in ring_modes(problem, radius) {
            let mut a = amplitude;
            if j == 0 && perturbation != 0.0 && spec.physical_dim() == 2 {
                let k = spec.wavevector(&grid.multi_index(flat));
                let sector = k[1].atan2(k[0]) / (std::f64::consts::PI / 3.0);
                if (sector - sector.round()).abs() < 1e-6 {
                    a *= 1.0 + perturbation;
                }
            }
            f.coeffs_mut()[flat] = Complex64::new(a, 0.0);
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ProjectionSpec;
    use crate::model::ModelParams;

    fn ddqc(n: usize) -> Problem {
        let params = ModelParams::new(vec![1.0, 2.0 * (std::f64::consts::PI / 12.0).cos()], -2.0, 2.0, 1e16).unwrap();
        Problem::new(ProjectionSpec::dodecagonal(), &[n; 4], params, false).unwrap()
    }

    #[test]
    fn dodecagonal_star_has_24_modes() {
        let p = ddqc(8);
        assert_eq!(ring_modes(&p, 1.0).len(), 12);
        assert_eq!(ring_modes(&p, p.params().q[1]).len(), 12);
        let f = build_initial(
            &InitialCondition::Rings {
                radii: None,
                amplitude: 0.3,
                perturbation: 0.0,
            },
            &p,
        )
        .unwrap();
        assert_eq!(f.coeffs().iter().filter(|c| c.norm() > 0.0).count(), 24);
        assert!(f.hermitian_violation() == 0.0);
    }

    #[test]
    fn sine_is_odd_mode() {
        let params = ModelParams::new(vec![1.0], 1.0, 0.0, 1.0).unwrap();
        let p = Problem::new(ProjectionSpec::periodic(1).unwrap(), &[8], params, false).unwrap();
        let f = build_initial(&InitialCondition::Sine { axis: 0, amplitude: 1.0 }, &p).unwrap();
        let phys = f.to_physical();
        for (j, v) in phys.values.iter().enumerate() {
            let x = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
            assert!((v - x.sin()).abs() < 1e-15);
        }
        assert!(build_initial(&InitialCondition::Sine { axis: 1, amplitude: 1.0 }, &p).is_err());
    }

    #[test]
    fn modes_are_symmetrized_and_mean_free() {
        let params = ModelParams::new(vec![1.0], 1.0, 0.0, 1.0).unwrap();
        let p = Problem::new(ProjectionSpec::periodic(2).unwrap(), &[8, 8], params, false).unwrap();
        let ic = InitialCondition::Modes {
            modes: vec![
                ModeSpec { h: vec![1, 2], amplitude: 0.4, phase: 0.3 },
                ModeSpec { h: vec![0, 0], amplitude: 1.0, phase: 0.0 },
            ],
        };
        let f = build_initial(&ic, &p).unwrap();
        assert_eq!(f.mean(), Complex64::ZERO);
        assert!(f.hermitian_violation() < 1e-16);
        let a = f.coeffs()[p.grid().flat_index(&[1, 2]).unwrap()];
        assert!((a - Complex64::from_polar(0.2, 0.3)).norm() < 1e-16);
    }
}
