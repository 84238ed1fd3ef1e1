//! Spectral peak extraction and rotational symmetry classification.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::ProjectionSpec;

/// Rotation orders tested, largest first.
pub const ORDERS: [u32; 4] = [12, 6, 4, 2];
/// Positional tolerance (relative to `1 + |k|`) for matching rotated peaks.
pub const POSITION_TOL: f64 = 1e-6;
/// Relative amplitude tolerance for matching rotated peaks.
pub const AMPLITUDE_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Peak {
    pub h: Vec<i64>,
    pub k: Vec<f64>,
    pub amplitude: f64,
}

/// Largest tested rotation order leaving the peak set invariant; `1` if none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symmetry(pub u32);

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-fold", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Sorted by decreasing amplitude.
    pub peaks: Vec<Peak>,
    pub symmetry: Symmetry,
}

impl SpectrumReport {
    /// CSV with header `kx,ky,amplitude`; `ky` is 0 for one-dimensional
    /// fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "kx,ky,amplitude")?;
        for p in &self.peaks {
            let ky = p.k.get(1).copied().unwrap_or(0.0);
            writeln!(out, "{:e},{:e},{:e}", p.k[0], ky, p.amplitude)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Distinct peak radii, grouped to within `tol`.
    pub fn radii(&self, tol: f64) -> Vec<f64> {
        let mut r: Vec<f64> = self.peaks.iter().map(|p| norm(&p.k)).collect();
        r.sort_by(f64::total_cmp);
        r.dedup_by(|a, b| (*a - *b).abs() <= tol);
        r
    }
}

fn norm(k: &[f64]) -> f64 {
    k.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Collects paired modes with `|φ̂| > threshold · max|φ̂|` and classifies the
/// rotational symmetry of their projected wavevectors.
pub fn spectrum_report(field: &SpectralField, spec: &ProjectionSpec, threshold: f64) -> Result<SpectrumReport> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive (got {threshold})")));
    }
    let grid = field.grid();
    let max = (0..grid.total())
        .filter(|&f| grid.is_paired(f) && f != 0)
        .map(|f| field.coeffs()[f].norm())
        .fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::EmptySpectrum);
    }
    let cut = threshold * max;
    let mut peaks: Vec<Peak> = (0..grid.total())
        .filter(|&f| f != 0 && grid.is_paired(f) && field.coeffs()[f].norm() > cut)
        .map(|f| {
            let h = grid.multi_index(f);
            let k = spec.wavevector(&h);
            Peak {
                h,
                k,
                amplitude: field.coeffs()[f].norm(),
            }
        })
        .collect();
    peaks.sort_by(|a, b| {
        b.amplitude
            .total_cmp(&a.amplitude)
            .then_with(|| crate::lattice::angle_cmp(&pad2(&a.k), &pad2(&b.k)))
    });
    let symmetry = classify(&peaks, spec.physical_dim());
    Ok(SpectrumReport { peaks, symmetry })
}

fn pad2(k: &[f64]) -> [f64; 2] {
    [k[0], k.get(1).copied().unwrap_or(0.0)]
}

/// Largest order in [`ORDERS`] under which the peak set is invariant.
pub fn classify(peaks: &[Peak], d: usize) -> Symmetry {
    if d != 2 {
        // Only inversion is meaningful off the plane; Hermitian spectra
        // always have it.
        return if invariant(peaks, |k| k.iter().map(|x| -x).collect()) {
            Symmetry(2)
        } else {
            Symmetry(1)
        };
    }
    for s in ORDERS {
        let (sin, cos) = (2.0 * std::f64::consts::PI / s as f64).sin_cos();
        if invariant(peaks, |k| vec![cos * k[0] - sin * k[1], sin * k[0] + cos * k[1]]) {
            return Symmetry(s);
        }
    }
    Symmetry(1)
}

fn invariant(peaks: &[Peak], rotate: impl Fn(&[f64]) -> Vec<f64>) -> bool {
    peaks.iter().all(|p| {
        let r = rotate(&p.k);
        let tol = POSITION_TOL * (1.0 + norm(&r));
        peaks.iter().any(|q| {
            let dist = r.iter().zip(&q.k).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            dist <= tol && (q.amplitude - p.amplitude).abs() <= AMPLITUDE_TOL * p.amplitude.max(q.amplitude)
        })
    })
}
