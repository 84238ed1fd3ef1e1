#![allow(dead_code)]

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use ipfc_core::{ModelParams, Problem, ProjectionSpec, SpectralField, SpectralSpace};

pub fn bench1d_params(c1: f64) -> ModelParams {
    ModelParams::new(vec![2f64.sqrt(), 3f64.sqrt()], 10.0, 4.0, c1).unwrap()
}

pub fn ddqc_params() -> ModelParams {
    ModelParams::new(vec![1.0, 2.0 * (std::f64::consts::PI / 12.0).cos()], -2.0, 2.0, 1e16).unwrap()
}

pub fn problem_1d(n: usize, c1: f64, dealias: bool) -> Problem {
    Problem::new(ProjectionSpec::periodic(1).unwrap(), &[n], bench1d_params(c1), dealias).unwrap()
}

pub fn problem_ddqc(n: usize, dealias: bool) -> Problem {
    Problem::new(ProjectionSpec::dodecagonal(), &[n; 4], ddqc_params(), dealias).unwrap()
}

/// Hermitian, mean-free field with every paired coefficient uniform in the
/// unit box; unpaired Nyquist modes are left at zero.
pub fn random_field(space: &Arc<SpectralSpace>, rng: &mut impl Rng) -> SpectralField {
    random_field_scaled(space, rng, |_| 1.0)
}

/// As [`random_field`], with coefficient `h` scaled by `weight(h)`.
pub fn random_field_scaled(
    space: &Arc<SpectralSpace>,
    rng: &mut impl Rng,
    weight: impl Fn(&[i64]) -> f64,
) -> SpectralField {
    let grid = space.grid();
    let coeffs = (0..grid.total())
        .map(|f| {
            if !grid.is_paired(f) {
                return Complex64::ZERO;
            }
            let w = weight(&grid.multi_index(f));
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * w
        })
        .collect();
    let mut f = SpectralField::from_coeffs(space, coeffs).unwrap();
    f.enforce_hermitian();
    f.remove_mean();
    f
}

/// Smooth random field: coefficients decay like `(1 + |h|²)^(-power)`.
pub fn smooth_field(space: &Arc<SpectralSpace>, rng: &mut impl Rng, amplitude: f64, power: i32) -> SpectralField {
    random_field_scaled(space, rng, |h| {
        let r2: f64 = h.iter().map(|&x| (x * x) as f64).sum();
        amplitude * (1.0 + r2).powi(-power)
    })
}

/// `Σ_{h₁+…+h_p = h} Π f̂(h_i)` with every `h_i` and `h` inside the grid.
pub fn brute_force_power(f: &SpectralField, p: u32) -> SpectralField {
    let grid = f.grid();
    let modes: Vec<Vec<i64>> = (0..grid.total()).map(|i| grid.multi_index(i)).collect();
    let mut out = SpectralField::zeros(f.space());
    for (t, h) in modes.iter().enumerate() {
        out.coeffs_mut()[t] = partial(f, &modes, h, p, Complex64::new(1.0, 0.0));
    }
    out
}

/// Sum over `p` grid modes adding up to `rest`, weighted by `prod`.
fn partial(f: &SpectralField, modes: &[Vec<i64>], rest: &[i64], p: u32, prod: Complex64) -> Complex64 {
    let grid = f.grid();
    if p == 1 {
        return grid.flat_index(rest).map_or(Complex64::ZERO, |i| prod * f.coeffs()[i]);
    }
    let mut sum = Complex64::ZERO;
    let mut r = vec![0; rest.len()];
    for (i, h) in modes.iter().enumerate() {
        let c = f.coeffs()[i];
        if c == Complex64::ZERO {
            continue;
        }
        for ((o, a), b) in r.iter_mut().zip(rest).zip(h) {
            *o = a - b;
        }
        sum += partial(f, modes, &r, p - 1, prod * c);
    }
    sum
}

/// Largest coefficient difference over paired modes. An unpaired Nyquist
/// output mode has no real-valued counterpart in the truncated convolution.
pub fn paired_max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let grid = a.grid();
    (0..grid.total())
        .filter(|&f| grid.is_paired(f))
        .map(|f| (a.coeffs()[f] - b.coeffs()[f]).norm())
        .fold(0.0, f64::max)
}
