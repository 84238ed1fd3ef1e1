//! Projection-method lattice.
//!
//! A `d`-dimensional quasiperiodic field is represented by Fourier
//! coefficients on an `n`-dimensional integer lattice. Mode `h` carries the
//! physical wavevector `k_h = P·B·h`, where `P` is a `d×n` projection and `B`
//! an invertible `n×n` reciprocal-lattice matrix. With `d = n` and
//! `P = B = I` everything reduces to an ordinary periodic spectral grid.
//!
//! Modes are stored in FFT order: along axis `j` the storage position `i`
//! holds `h_j = i` for `i < N_j/2` and `h_j = i - N_j` otherwise, so the zero
//! multi-index always lives at flat index 0.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;

/// Two projected wavevectors closer than this are treated as a collision.
pub const INJECTIVITY_TOL: f64 = 1e-10;

const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSpec {
    d: usize,
    n: usize,
    /// `d×n`, row-major.
    p: Vec<f64>,
    /// `n×n`, row-major.
    b: Vec<f64>,
    /// `P·B`, `d×n`, row-major.
    pb: Vec<f64>,
}

impl ProjectionSpec {
    pub fn new(d: usize, n: usize, p: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidProjection(format!(
                "physical dimension must be 1, 2 or 3 (got {d})"
            )));
        }
        if n < d {
            return Err(Error::InvalidProjection(format!(
                "lattice dimension {n} is smaller than physical dimension {d}"
            )));
        }
        if p.len() != d * n {
            return Err(Error::InvalidProjection(format!(
                "projection matrix has {} entries, expected {}",
                p.len(),
                d * n
            )));
        }
        if b.len() != n * n {
            return Err(Error::InvalidProjection(format!(
                "lattice matrix has {} entries, expected {}",
                b.len(),
                n * n
            )));
        }
        if p.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidProjection("matrix entries must be finite".into()));
        }
        let det = determinant(&b, n);
        if det.abs() <= SINGULAR_TOL {
            return Err(Error::InvalidProjection(format!(
                "lattice matrix is singular (det = {det:e})"
            )));
        }
        let mut pb = vec![0.0; d * n];
        for i in 0..d {
            for j in 0..n {
                pb[i * n + j] = (0..n).map(|l| p[i * n + l] * b[l * n + j]).sum();
            }
        }
        Ok(Self { d, n, p, b, pb })
    }

    /// Periodic crystal in `d` dimensions: `P = B = I`.
    pub fn periodic(d: usize) -> Result<Self> {
        Self::new(d, d, identity(d), identity(d))
    }

    /// Periodic `d = n = 1` lattice with reciprocal spacing `b`.
    pub fn periodic_1d(b: f64) -> Result<Self> {
        Self::new(1, 1, vec![1.0], vec![b])
    }

    /// Two-dimensional dodecagonal embedding in four lattice dimensions,
    /// columns of `P` at 0°, 30°, 60° and 90°; `B = I₄`.
    pub fn dodecagonal() -> Self {
        use std::f64::consts::PI;
        let p = vec![
            1.0,
            (PI / 6.0).cos(),
            (PI / 3.0).cos(),
            0.0,
            0.0,
            (PI / 6.0).sin(),
            (PI / 3.0).sin(),
            1.0,
        ];
        Self::new(2, 4, p, identity(4)).expect("dodecagonal projection is valid")
    }

    pub fn physical_dim(&self) -> usize {
        self.d
    }

    pub fn lattice_dim(&self) -> usize {
        self.n
    }

    pub fn projection(&self) -> &[f64] {
        &self.p
    }

    pub fn lattice(&self) -> &[f64] {
        &self.b
    }

    /// `k_h = P·B·h`.
    pub fn wavevector(&self, h: &[i64]) -> Vec<f64> {
        let mut k = vec![0.0; self.d];
        self.wavevector_into(h, &mut k);
        k
    }

    pub fn wavevector_into(&self, h: &[i64], k: &mut [f64]) {
        debug_assert_eq!(h.len(), self.n);
        for (i, ki) in k.iter_mut().enumerate().take(self.d) {
            let row = &self.pb[i * self.n..(i + 1) * self.n];
            *ki = row.iter().zip(h).map(|(a, &hj)| a * hj as f64).sum();
        }
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn determinant(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&x, &y| a[x * n + c].abs().total_cmp(&a[y * n + c].abs()))
            .unwrap();
        if a[pivot * n + c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            for j in 0..n {
                a.swap(c * n + j, pivot * n + j);
            }
            det = -det;
        }
        let diag = a[c * n + c];
        det *= diag;
        for r in c + 1..n {
            let f = a[r * n + c] / diag;
            for j in c..n {
                a[r * n + j] -= f * a[c * n + j];
            }
        }
    }
    det
}

/// Truncated `n`-dimensional mode set with FFT-ordered row-major storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexGrid {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl IndexGrid {
    /// Raw grid without any projection check; sizes must be even and ≥ 2.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidGrid("no axes".into()));
        }
        if let Some(&bad) = sizes.iter().find(|&&s| s < 2 || s % 2 != 0) {
            return Err(Error::InvalidGrid(format!(
                "mode counts must be even and at least 2 (got {bad})"
            )));
        }
        let mut strides = vec![1; sizes.len()];
        for a in (0..sizes.len() - 1).rev() {
            strides[a] = strides[a + 1] * sizes[a + 1];
        }
        let total = sizes.iter().product();
        Ok(Self {
            sizes: sizes.to_vec(),
            strides,
            total,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn ndim(&self) -> usize {
        self.sizes.len()
    }

    /// Flat index of the zero multi-index.
    pub const fn zero_index(&self) -> usize {
        0
    }

    pub fn flat_index(&self, h: &[i64]) -> Option<usize> {
        if h.len() != self.sizes.len() {
            return None;
        }
        let mut flat = 0;
        for ((&hj, &nj), &sj) in h.iter().zip(&self.sizes).zip(&self.strides) {
            let half = (nj / 2) as i64;
            if hj < -half || hj >= half {
                return None;
            }
            let pos = hj.rem_euclid(nj as i64) as usize;
            flat += pos * sj;
        }
        Some(flat)
    }

    pub fn multi_index_into(&self, flat: usize, h: &mut [i64]) {
        let mut rest = flat;
        for ((hj, &nj), &sj) in h.iter_mut().zip(&self.sizes).zip(&self.strides) {
            let pos = rest / sj;
            rest %= sj;
            *hj = if pos < nj / 2 {
                pos as i64
            } else {
                pos as i64 - nj as i64
            };
        }
    }

    pub fn multi_index(&self, flat: usize) -> Vec<i64> {
        let mut h = vec![0; self.sizes.len()];
        self.multi_index_into(flat, &mut h);
        h
    }

    /// Storage position of `-h` modulo the grid. For a mode with an extreme
    /// component `-N_j/2` this is not the flat index of `-h` itself.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let mut rest = flat;
        let mut out = 0;
        for (&nj, &sj) in self.sizes.iter().zip(&self.strides) {
            let pos = rest / sj;
            rest %= sj;
            out += ((nj - pos) % nj) * sj;
        }
        out
    }

    /// True when `-h` is also a grid mode, i.e. no component sits on `-N_j/2`.
    pub fn is_paired(&self, flat: usize) -> bool {
        let mut rest = flat;
        for (&nj, &sj) in self.sizes.iter().zip(&self.strides) {
            let pos = rest / sj;
            rest %= sj;
            if pos == nj / 2 {
                return false;
            }
        }
        true
    }
}

/// Builds the mode grid and checks that `h ↦ P·B·h` separates every mode.
pub fn build_grid(spec: &ProjectionSpec, sizes: &[usize]) -> Result<IndexGrid> {
    if sizes.len() != spec.lattice_dim() {
        return Err(Error::InvalidGrid(format!(
            "{} mode counts given for a {}-dimensional lattice",
            sizes.len(),
            spec.lattice_dim()
        )));
    }
    let grid = IndexGrid::new(sizes)?;
    check_injective(spec, &grid)?;
    Ok(grid)
}

fn check_injective(spec: &ProjectionSpec, grid: &IndexGrid) -> Result<()> {
    let d = spec.physical_dim();
    let total = grid.total();
    let mut ks = vec![0.0; total * d];
    let mut h = vec![0; grid.ndim()];
    for flat in 0..total {
        grid.multi_index_into(flat, &mut h);
        spec.wavevector_into(&h, &mut ks[flat * d..(flat + 1) * d]);
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_unstable_by(|&a, &b| ks[a * d].total_cmp(&ks[b * d]));
    for (pos, &a) in order.iter().enumerate() {
        let ka = &ks[a * d..(a + 1) * d];
        for &b in &order[pos + 1..] {
            let kb = &ks[b * d..(b + 1) * d];
            if kb[0] - ka[0] > INJECTIVITY_TOL {
                break;
            }
            let dist2: f64 = ka.iter().zip(kb).map(|(x, y)| (x - y) * (x - y)).sum();
            if dist2 <= INJECTIVITY_TOL * INJECTIVITY_TOL {
                let (first, second) = if a < b { (a, b) } else { (b, a) };
                return Err(Error::NonInjective {
                    first: grid.multi_index(first),
                    second: grid.multi_index(second),
                });
            }
        }
    }
    Ok(())
}

/// Diagonal symbol of `G = ∏_j (Δ + q_j²)`: `g_h = ∏_j (q_j² − |k_h|²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSymbol {
    g: Vec<f64>,
    g2: Vec<f64>,
}

impl OperatorSymbol {
    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn g2(&self) -> &[f64] {
        &self.g2
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
}

pub fn build_symbol(spec: &ProjectionSpec, grid: &IndexGrid, q: &[f64]) -> Result<OperatorSymbol> {
    if q.is_empty() {
        return Err(Error::InvalidArgument("length-scale list is empty".into()));
    }
    if let Some(bad) = q.iter().find(|&&qj| !(qj > 0.0 && qj.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "length scales must be positive (got {bad})"
        )));
    }
    let total = grid.total();
    let mut raw = vec![0.0; total];
    let mut h = vec![0; grid.ndim()];
    let mut k = vec![0.0; spec.physical_dim()];
    for (flat, g) in raw.iter_mut().enumerate() {
        grid.multi_index_into(flat, &mut h);
        spec.wavevector_into(&h, &mut k);
        let k2: f64 = k.iter().map(|x| x * x).sum();
        *g = q.iter().map(|qj| qj * qj - k2).product();
    }
    // Modes on an extreme index have no exact partner; average with the
    // storage conjugate so the symbol stays even. Paired modes are unchanged.
    let g: Vec<f64> = (0..total)
        .map(|flat| 0.5 * (raw[flat] + raw[grid.conjugate_index(flat)]))
        .collect();
    let g2 = g.iter().map(|x| x * x).collect();
    Ok(OperatorSymbol { g, g2 })
}

/// Axis-aligned sampling box in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Real-space samples; axis 0 varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub resolution: Vec<usize>,
    pub values: Vec<f64>,
}

impl Raster {
    pub fn min_max(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }
}

/// Direct Bohr–Fourier summation `Re Σ φ̂(h) e^{i k_h·r}` over all modes with
/// `|φ̂(h)| > amplitude_floor`, at points `lo + (hi − lo)·i/res` per axis.
///
/// Projected wavevectors are incommensurate with any `d`-dimensional
/// lattice, so this cannot be replaced by an inverse FFT.
pub fn sample_real_space(
    spec: &ProjectionSpec,
    grid: &IndexGrid,
    field: &SpectralField,
    window: &Window,
    resolution: &[usize],
    amplitude_floor: f64,
) -> Result<Raster> {
    let d = spec.physical_dim();
    if field.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if window.lo.len() != d || window.hi.len() != d || resolution.len() != d {
        return Err(Error::InvalidArgument(format!(
            "window and resolution must have {d} axes"
        )));
    }
    if resolution.contains(&0) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    if !(amplitude_floor >= 0.0) {
        return Err(Error::InvalidArgument("amplitude floor must be non-negative".into()));
    }
    let count: usize = resolution.iter().product();
    let mut values = vec![0.0; count];
    let steps: Vec<f64> = (0..d)
        .map(|a| (window.hi[a] - window.lo[a]) / resolution[a] as f64)
        .collect();

    let mut h = vec![0; grid.ndim()];
    let mut k = vec![0.0; d];
    let mut tables: Vec<Vec<Complex64>> = resolution.iter().map(|&r| vec![Complex64::ZERO; r]).collect();
    let mut partial = vec![Complex64::ZERO; count];
    for (flat, &c) in field.coeffs().iter().enumerate() {
        if c.norm() <= amplitude_floor {
            continue;
        }
        grid.multi_index_into(flat, &mut h);
        spec.wavevector_into(&h, &mut k);
        for a in 0..d {
            let step = Complex64::from_polar(1.0, k[a] * steps[a]);
            let mut cur = Complex64::from_polar(1.0, k[a] * window.lo[a]);
            for (i, slot) in tables[a].iter_mut().enumerate() {
                // Recompute periodically so the recurrence does not drift.
                if i % 64 == 0 {
                    cur = Complex64::from_polar(1.0, k[a] * (window.lo[a] + steps[a] * i as f64));
                }
                *slot = cur;
                cur *= step;
            }
        }
        // Outer product of the per-axis phase tables, axis 0 fastest.
        let r0 = resolution[0];
        for (i, p) in partial[..r0].iter_mut().enumerate() {
            *p = c * tables[0][i];
        }
        let mut filled = r0;
        for a in 1..d {
            let (head, tail) = partial.split_at_mut(filled);
            for (j, &phase) in tables[a].iter().enumerate().skip(1) {
                for (dst, src) in tail[(j - 1) * filled..j * filled].iter_mut().zip(head.iter()) {
                    *dst = src * phase;
                }
            }
            for v in head.iter_mut() {
                *v *= tables[a][0];
            }
            filled *= resolution[a];
        }
        for (v, p) in values.iter_mut().zip(&partial) {
            *v += p.re;
        }
    }
    Ok(Raster {
        resolution: resolution.to_vec(),
        values,
    })
}

/// Sorts wavevectors by angle; used by the spectrum tools.
pub(crate) fn angle_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0]))
}
