//! Spectral-field algebra on an [`IndexGrid`].
//!
//! Coefficients are Bohr–Fourier amplitudes: the physical field is
//! `Σ φ̂(h) e^{i k_h·r}`, so the inverse transform is an unnormalized inverse
//! DFT and the forward transform divides by the mode count. With that
//! normalization [`SpectralField::inner_ap`] is the almost-periodic mean of
//! `f·ḡ` with no extra factors.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{IndexGrid, OperatorSymbol};

/// Zero-padding factor used when dealiasing is requested.
pub const DEALIAS_FACTOR: usize = 2;

/// Separable n-dimensional complex FFT over row-major storage.
pub struct NdFft {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl NdFft {
    pub fn new(grid: &IndexGrid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = grid.sizes().iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = grid.sizes().iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self {
            sizes: grid.sizes().to_vec(),
            strides: grid.strides().to_vec(),
            forward,
            inverse,
        }
    }

    /// Unnormalized `Σ_x v(x) e^{-i 2π h·x/N}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized `Σ_h c(h) e^{+i 2π h·x/N}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        let mut buf = Vec::new();
        for (axis, plan) in plans.iter().enumerate() {
            let n = self.sizes[axis];
            let stride = self.strides[axis];
            let mut scratch = vec![Complex64::ZERO; plan.get_inplace_scratch_len()];
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * stride;
            buf.resize(block, Complex64::ZERO);
            for chunk in data.chunks_exact_mut(block) {
                for j in 0..n {
                    for s in 0..stride {
                        buf[s * n + j] = chunk[j * stride + s];
                    }
                }
                plan.process_with_scratch(&mut buf, &mut scratch);
                for j in 0..n {
                    for s in 0..stride {
                        chunk[j * stride + s] = buf[s * n + j];
                    }
                }
            }
        }
    }
}

impl fmt::Debug for NdFft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NdFft").field("sizes", &self.sizes).finish()
    }
}

/// A zero-padded copy of a grid used for alias-free products.
#[derive(Debug)]
struct Padded {
    grid: IndexGrid,
    fft: NdFft,
    /// Padded storage position of every original mode.
    embed: Vec<usize>,
}

impl Padded {
    fn new(grid: &IndexGrid, factor: usize) -> Self {
        let sizes: Vec<usize> = grid.sizes().iter().map(|&n| n * factor).collect();
        let padded = IndexGrid::new(&sizes).expect("padded sizes are even");
        let mut h = vec![0; grid.ndim()];
        let embed = (0..grid.total())
            .map(|flat| {
                grid.multi_index_into(flat, &mut h);
                padded.flat_index(&h).expect("original mode fits in padded grid")
            })
            .collect();
        let fft = NdFft::new(&padded);
        Self {
            grid: padded,
            fft,
            embed,
        }
    }
}

/// Grid plus the transform plans that act on it. Shared by every field on
/// the grid.
#[derive(Debug)]
pub struct SpectralSpace {
    grid: IndexGrid,
    fft: NdFft,
    conj: Vec<usize>,
    padded: OnceLock<Padded>,
}

impl SpectralSpace {
    pub fn new(grid: IndexGrid) -> Arc<Self> {
        let fft = NdFft::new(&grid);
        let conj = (0..grid.total()).map(|f| grid.conjugate_index(f)).collect();
        Arc::new(Self {
            grid,
            fft,
            conj,
            padded: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &IndexGrid {
        &self.grid
    }

    pub fn total(&self) -> usize {
        self.grid.total()
    }

    fn padded(&self) -> &Padded {
        self.padded.get_or_init(|| Padded::new(&self.grid, DEALIAS_FACTOR))
    }
}

/// Fourier coefficients of a real field, one per grid mode.
#[derive(Clone)]
pub struct SpectralField {
    space: Arc<SpectralSpace>,
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralField")
            .field("sizes", &self.space.grid.sizes())
            .field("nonzero", &self.coeffs.iter().filter(|c| c.norm() > 0.0).count())
            .finish()
    }
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other) && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(space: &Arc<SpectralSpace>) -> Self {
        Self {
            space: Arc::clone(space),
            coeffs: vec![Complex64::ZERO; space.total()],
        }
    }

    /// Wraps raw coefficients as they are; call [`Self::enforce_hermitian`]
    /// if they do not already describe a real field.
    pub fn from_coeffs(space: &Arc<SpectralSpace>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != space.total() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            space: Arc::clone(space),
            coeffs,
        })
    }

    pub fn space(&self) -> &Arc<SpectralSpace> {
        &self.space
    }

    pub fn grid(&self) -> &IndexGrid {
        &self.space.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || self.space.grid == other.space.grid
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// The zero mode, i.e. the spatial mean.
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn remove_mean(&mut self) {
        self.coeffs[0] = Complex64::ZERO;
    }

    /// Projects onto real fields: `φ̂(h) ← (φ̂(h) + conj φ̂(−h))/2`.
    pub fn enforce_hermitian(&mut self) {
        let conj = &self.space.conj;
        for flat in 0..self.coeffs.len() {
            let c = conj[flat];
            if c < flat {
                continue;
            }
            if c == flat {
                self.coeffs[flat].im = 0.0;
            } else {
                let avg = 0.5 * (self.coeffs[flat] + self.coeffs[c].conj());
                self.coeffs[flat] = avg;
                self.coeffs[c] = avg.conj();
            }
        }
    }

    pub fn hermitian_violation(&self) -> f64 {
        let conj = &self.space.conj;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| (c - self.coeffs[conj[flat]].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `Σ_h f̂(h)·conj ĝ(h)`, real for Hermitian inputs.
    pub fn inner_ap(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// Complex residue of the inner product, discarded by [`Self::inner_ap`].
    pub fn inner_ap_imag(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.im * b.re - a.re * b.im)
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|c| c * a)
    }

    pub fn scale_in_place(&mut self, a: f64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    /// `self ← self + a·x`.
    pub fn axpy(&mut self, a: f64, x: &Self) -> Result<()> {
        self.check(x)?;
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += v * a;
        }
        Ok(())
    }

    /// `a·f + b·g`.
    pub fn lincomb(a: f64, f: &Self, b: f64, g: &Self) -> Result<Self> {
        f.check(g)?;
        let coeffs = f.coeffs.iter().zip(&g.coeffs).map(|(x, y)| x * a + y * b).collect();
        Ok(Self {
            space: Arc::clone(&f.space),
            coeffs,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::lincomb(1.0, self, 1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::lincomb(1.0, self, -1.0, other)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    fn check_symbol(&self, s: &OperatorSymbol) -> Result<()> {
        if s.len() == self.coeffs.len() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Multiplies by `g_h` (`power = 1`) or `g_h²` (`power = 2`).
    pub fn apply_symbol(&self, s: &OperatorSymbol, power: u8) -> Result<Self> {
        self.check_symbol(s)?;
        let weights = match power {
            1 => s.g(),
            2 => s.g2(),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "symbol power must be 1 or 2 (got {power})"
                )))
            }
        };
        Ok(Self {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().zip(weights).map(|(c, w)| c * w).collect(),
        })
    }

    /// `(I + τ/2·G²)⁻¹ f`.
    pub fn resolvent_apply(&self, s: &OperatorSymbol, tau: f64) -> Result<Self> {
        self.check_symbol(s)?;
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive (got {tau})")));
        }
        let half = 0.5 * tau;
        Ok(Self {
            space: Arc::clone(&self.space),
            coeffs: self
                .coeffs
                .iter()
                .zip(s.g2())
                .map(|(c, g2)| c / (1.0 + half * g2))
                .collect(),
        })
    }

    pub fn to_physical(&self) -> PhysicalField {
        let mut data = self.coeffs.clone();
        self.space.fft.inverse(&mut data);
        debug_assert!({
            let scale: f64 = self.coeffs.iter().map(|c| c.norm()).sum::<f64>().max(1.0);
            data.iter().all(|v| v.im.abs() <= 1e-12 * scale)
        });
        PhysicalField {
            space: Arc::clone(&self.space),
            values: data.into_iter().map(|v| v.re).collect(),
        }
    }

    /// Pseudospectral evaluation of `Σ c_e·φ^e` with exponents in `1..=4`.
    ///
    /// With `dealias` the product is formed on a grid padded by
    /// [`DEALIAS_FACTOR`] per axis, which makes terms up to cubic order equal
    /// to the exact truncated convolution.
    pub fn pointwise_poly(&self, terms: &[(u32, f64)], dealias: bool) -> Result<Self> {
        check_terms(terms)?;
        Ok(self.pointwise_map(dealias, |v| eval_poly(v, terms)))
    }

    /// Like [`Self::pointwise_poly`] with an explicit integer padding factor.
    /// Quartic terms need a factor of at least 5/2 to be alias-free.
    pub fn pointwise_poly_padded(&self, terms: &[(u32, f64)], factor: usize) -> Result<Self> {
        check_terms(terms)?;
        let f = |v| eval_poly(v, terms);
        match factor {
            0 => Err(Error::InvalidArgument("padding factor must be positive".into())),
            1 => Ok(self.map_on(None, f, |_| 0.0).0),
            DEALIAS_FACTOR => Ok(self.map_on(Some(self.space.padded()), f, |_| 0.0).0),
            _ => Ok(self.map_on(Some(&Padded::new(&self.space.grid, factor)), f, |_| 0.0).0),
        }
    }

    /// Applies `f` at every collocation point and transforms back.
    pub fn pointwise_map(&self, dealias: bool, f: impl Fn(f64) -> f64) -> Self {
        self.map_on(self.padding(dealias), f, |_| 0.0).0
    }

    /// Mean of `f(φ)` over the collocation points, i.e. the zero mode of its
    /// transform.
    pub fn pointwise_mean(&self, dealias: bool, f: impl Fn(f64) -> f64) -> f64 {
        let values = self.physical_values(self.padding(dealias));
        values.iter().map(|&v| f(v)).sum::<f64>() / values.len() as f64
    }

    /// [`Self::pointwise_map`] of `f` and [`Self::pointwise_mean`] of `g`
    /// sharing one inverse transform.
    pub fn pointwise_map_with_mean(
        &self,
        dealias: bool,
        f: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
    ) -> (Self, f64) {
        self.map_on(self.padding(dealias), f, g)
    }

    fn padding(&self, dealias: bool) -> Option<&Padded> {
        dealias.then(|| self.space.padded())
    }

    fn physical_values(&self, padded: Option<&Padded>) -> Vec<f64> {
        match padded {
            None => self.to_physical().values,
            Some(p) => {
                let mut data = vec![Complex64::ZERO; p.grid.total()];
                for (c, &pos) in self.coeffs.iter().zip(&p.embed) {
                    data[pos] = *c;
                }
                p.fft.inverse(&mut data);
                data.into_iter().map(|v| v.re).collect()
            }
        }
    }

    fn map_on(
        &self,
        padded: Option<&Padded>,
        f: impl Fn(f64) -> f64,
        g: impl Fn(f64) -> f64,
    ) -> (Self, f64) {
        let values = self.physical_values(padded);
        let count = values.len() as f64;
        let mean = values.iter().map(|&v| g(v)).sum::<f64>() / count;
        let mut data: Vec<Complex64> = values.into_iter().map(|v| Complex64::new(f(v), 0.0)).collect();
        let coeffs = match padded {
            None => {
                self.space.fft.forward(&mut data);
                data.into_iter().map(|v| v / count).collect()
            }
            Some(p) => {
                p.fft.forward(&mut data);
                p.embed.iter().map(|&pos| data[pos] / count).collect()
            }
        };
        let mut out = Self {
            space: Arc::clone(&self.space),
            coeffs,
        };
        out.enforce_hermitian();
        (out, mean)
    }
}

fn check_terms(terms: &[(u32, f64)]) -> Result<()> {
    match terms.iter().find(|(e, _)| !(1..=4).contains(e)) {
        Some((e, _)) => Err(Error::InvalidArgument(format!(
            "polynomial exponents must lie in 1..=4 (got {e})"
        ))),
        None => Ok(()),
    }
}

fn eval_poly(v: f64, terms: &[(u32, f64)]) -> f64 {
    let v2 = v * v;
    terms
        .iter()
        .map(|&(e, c)| {
            c * match e {
                1 => v,
                2 => v2,
                3 => v2 * v,
                _ => v2 * v2,
            }
        })
        .sum()
}

/// Real values on the collocation grid matching an [`IndexGrid`].
#[derive(Clone)]
pub struct PhysicalField {
    space: Arc<SpectralSpace>,
    pub values: Vec<f64>,
}

impl fmt::Debug for PhysicalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhysicalField")
            .field("sizes", &self.space.grid.sizes())
            .finish()
    }
}

impl PhysicalField {
    pub fn new(space: &Arc<SpectralSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.total() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn space(&self) -> &Arc<SpectralSpace> {
        &self.space
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut data: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.space.fft.forward(&mut data);
        let inv = 1.0 / self.space.total() as f64;
        for v in &mut data {
            *v *= inv;
        }
        let mut f = SpectralField {
            space: Arc::clone(&self.space),
            coeffs: data,
        };
        f.enforce_hermitian();
        f
    }
}

/// Coefficients below this magnitude are omitted from dumps.
pub const DUMP_THRESHOLD: f64 = 1e-14;

const DUMP_MAGIC: &str = "ipfc-field v1";

/// Text dump of a spectral field: a header line
/// `ipfc-field v1 n=<n> sizes=<N1,..,Nn>` and one `h1 .. hn re im` line per
/// retained coefficient. Values use 17 significant digits, so reading a dump
/// reproduces the written coefficients bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub sizes: Vec<usize>,
    pub entries: Vec<(Vec<i64>, Complex64)>,
}

impl FieldDump {
    pub fn from_field(field: &SpectralField) -> Self {
        let grid = field.grid();
        let entries = field
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > DUMP_THRESHOLD)
            .map(|(flat, &c)| (grid.multi_index(flat), c))
            .collect();
        Self {
            sizes: grid.sizes().to_vec(),
            entries,
        }
    }

    /// Places the entries on `space`, which must have the dumped sizes.
    pub fn into_field(self, space: &Arc<SpectralSpace>) -> Result<SpectralField> {
        if self.sizes != space.grid().sizes() {
            return Err(Error::GridMismatch);
        }
        let mut field = SpectralField::zeros(space);
        for (h, c) in self.entries {
            let flat = space.grid().flat_index(&h).ok_or_else(|| {
                Error::InvalidArgument(format!("mode {h:?} lies outside the grid"))
            })?;
            field.coeffs[flat] = c;
        }
        Ok(field)
    }

    pub fn write<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        writeln!(out, "{DUMP_MAGIC} n={} sizes={}", self.sizes.len(), sizes.join(","))?;
        for (h, c) in &self.entries {
            for hj in h {
                write!(out, "{hj} ")?;
            }
            writeln!(out, "{:.16e} {:.16e}", c.re, c.im)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses a dump; `path` is only used in error messages.
    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let rest = header
            .strip_prefix(DUMP_MAGIC)
            .ok_or_else(|| err(1, format!("expected header starting with '{DUMP_MAGIC}'")))?;
        let mut n = None;
        let mut sizes = None;
        for tok in rest.split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = Some(v.parse::<usize>().map_err(|e| err(1, format!("bad n: {e}")))?);
            } else if let Some(v) = tok.strip_prefix("sizes=") {
                let parsed: std::result::Result<Vec<usize>, _> = v.split(',').map(str::parse).collect();
                sizes = Some(parsed.map_err(|e| err(1, format!("bad sizes: {e}")))?);
            } else {
                return Err(err(1, format!("unexpected header token '{tok}'")));
            }
        }
        let n = n.ok_or_else(|| err(1, "missing n=".into()))?;
        let sizes = sizes.ok_or_else(|| err(1, "missing sizes=".into()))?;
        if sizes.len() != n {
            return Err(err(1, format!("n={n} but {} sizes given", sizes.len())));
        }
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != n + 2 {
                return Err(err(line_no, format!("expected {} fields, found {}", n + 2, toks.len())));
            }
            let h: std::result::Result<Vec<i64>, _> = toks[..n].iter().map(|t| t.parse()).collect();
            let h = h.map_err(|e| err(line_no, format!("bad index: {e}")))?;
            let re: f64 = toks[n].parse().map_err(|e| err(line_no, format!("bad real part: {e}")))?;
            let im: f64 = toks[n + 1]
                .parse()
                .map_err(|e| err(line_no, format!("bad imaginary part: {e}")))?;
            entries.push((h, Complex64::new(re, im)));
        }
        Ok(Self { sizes, entries })
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write(std::io::BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_symbol, ProjectionSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn space_1d(n: usize) -> Arc<SpectralSpace> {
        SpectralSpace::new(IndexGrid::new(&[n]).unwrap())
    }

    fn cos_mode(space: &Arc<SpectralSpace>, h: i64) -> SpectralField {
        let mut f = SpectralField::zeros(space);
        let g = space.grid();
        f.coeffs_mut()[g.flat_index(&[h]).unwrap()] = Complex64::new(0.5, 0.0);
        f.coeffs_mut()[g.flat_index(&[-h]).unwrap()] = Complex64::new(0.5, 0.0);
        f
    }

    pub(crate) fn random_field(space: &Arc<SpectralSpace>, rng: &mut impl Rng) -> SpectralField {
        let coeffs = (0..space.total())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut f = SpectralField::from_coeffs(space, coeffs).unwrap();
        f.enforce_hermitian();
        f
    }

    #[test]
    fn cosine_inner_product() {
        let s = space_1d(8);
        let f = cos_mode(&s, 1);
        assert!((f.inner_ap(&f).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(SpectralField::zeros(&s).inner_ap(&f).unwrap(), 0.0);
    }

    #[test]
    fn parseval_against_direct_dft() {
        let s = space_1d(16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_field(&s, &mut rng);
        // Direct synthesis at x_j = 2πj/N, independent of the FFT path.
        let n = 16;
        let mut mean_sq = 0.0;
        for j in 0..n {
            let x = 2.0 * PI * j as f64 / n as f64;
            let mut v = Complex64::ZERO;
            for flat in 0..n {
                let h = s.grid().multi_index(flat)[0] as f64;
                v += f.coeffs()[flat] * Complex64::from_polar(1.0, h * x);
            }
            mean_sq += v.norm_sqr();
        }
        mean_sq /= n as f64;
        assert!((f.inner_ap(&f).unwrap() - mean_sq).abs() < 1e-12);
    }

    #[test]
    fn transform_normalization() {
        let s = space_1d(8);
        let mut f = SpectralField::zeros(&s);
        f.coeffs_mut()[0] = Complex64::new(1.0, 0.0);
        assert!(f.to_physical().values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let p = cos_mode(&s, 1).to_physical();
        for (j, v) in p.values.iter().enumerate() {
            assert!((v - (2.0 * PI * j as f64 / 8.0).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn round_trip_multidimensional() {
        let s = SpectralSpace::new(IndexGrid::new(&[4, 6, 8]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(&s, &mut rng);
        let back = f.to_physical().to_spectral();
        let err = back.sub(&f).unwrap().max_abs();
        assert!(err <= 1e-13 * f.max_abs(), "{err}");
    }

    #[test]
    fn hermitian_fields_are_real_in_physical_space() {
        let s = SpectralSpace::new(IndexGrid::new(&[6, 6]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_field(&s, &mut rng);
        let mut data = f.coeffs().to_vec();
        s.fft.inverse(&mut data);
        let max_im = data.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(max_im <= 1e-12 * f.max_abs());
    }

    #[test]
    fn square_of_cosine() {
        let s = space_1d(8);
        let f = cos_mode(&s, 1);
        let sq = f.pointwise_poly(&[(2, 1.0)], true).unwrap();
        let g = s.grid();
        assert!((sq.coeffs()[0].re - 0.5).abs() < 1e-15);
        assert!((sq.coeffs()[g.flat_index(&[2]).unwrap()].re - 0.25).abs() < 1e-15);
        assert!((sq.coeffs()[g.flat_index(&[-2]).unwrap()].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn linear_term_is_exact_scaling() {
        let s = space_1d(8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_field(&s, &mut rng);
        let out = f.pointwise_poly(&[(1, 2.5)], false).unwrap();
        let err = out.sub(&f.scale(2.5)).unwrap().max_abs();
        assert!(err < 1e-14);
    }

    #[test]
    fn rejects_bad_exponent() {
        let s = space_1d(4);
        let f = SpectralField::zeros(&s);
        assert!(f.pointwise_poly(&[(5, 1.0)], false).is_err());
        assert!(f.pointwise_poly(&[(0, 1.0)], true).is_err());
    }

    #[test]
    fn linear_combinations() {
        let s = space_1d(8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut f = random_field(&s, &mut rng);
        let g = random_field(&s, &mut rng);
        assert_eq!(SpectralField::lincomb(1.0, &f, 0.0, &g).unwrap(), f);
        assert_eq!(f.sub(&f).unwrap().max_abs(), 0.0);
        let h = SpectralField::lincomb(1.5, &f, -0.5, &g).unwrap();
        for i in 0..8 {
            let want = (f.coeffs()[i] * 3.0 - g.coeffs()[i]) / 2.0;
            assert!((h.coeffs()[i] - want).norm() < 1e-15);
        }
        assert!(h.hermitian_violation() < 1e-15);
        let other = space_1d(4);
        assert!(matches!(f.axpy(1.0, &SpectralField::zeros(&other)), Err(Error::GridMismatch)));
    }

    #[test]
    fn symbol_application() {
        let spec = ProjectionSpec::periodic(1).unwrap();
        let grid = IndexGrid::new(&[8]).unwrap();
        let sym = build_symbol(&spec, &grid, &[2f64.sqrt(), 3f64.sqrt()]).unwrap();
        let s = SpectralSpace::new(grid);
        let f = cos_mode(&s, 1);
        let out = f.apply_symbol(&sym, 2).unwrap();
        assert!(out.sub(&f.scale(4.0)).unwrap().max_abs() < 1e-14);
        assert!(f.apply_symbol(&sym, 3).is_err());

        let spec = ProjectionSpec::periodic_1d(2f64.sqrt()).unwrap();
        let grid = IndexGrid::new(&[8]).unwrap();
        let sym = build_symbol(&spec, &grid, &[2f64.sqrt(), 3f64.sqrt()]).unwrap();
        let s = SpectralSpace::new(grid);
        let root = cos_mode(&s, 1).apply_symbol(&sym, 1).unwrap();
        assert!(root.max_abs() < 1e-15);
    }

    #[test]
    fn resolvent() {
        let spec = ProjectionSpec::periodic(1).unwrap();
        let grid = IndexGrid::new(&[16]).unwrap();
        let sym = build_symbol(&spec, &grid, &[1.0, 2.0]).unwrap();
        let s = SpectralSpace::new(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_field(&s, &mut rng);

        let g = s.grid();
        let root = g.flat_index(&[1]).unwrap();
        let r = f.resolvent_apply(&sym, 0.3).unwrap();
        assert_eq!(r.coeffs()[root], f.coeffs()[root]);

        let tau = 0.7;
        let r = f.resolvent_apply(&sym, tau).unwrap();
        let back = SpectralField::lincomb(1.0, &r, 0.5 * tau, &r.apply_symbol(&sym, 2).unwrap()).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() <= 1e-13);
        assert!(f.resolvent_apply(&sym, 0.0).is_err());

        let grid = IndexGrid::new(&[4]).unwrap();
        let sym = build_symbol(&spec, &grid, &[1.0, 2.0]).unwrap();
        let s = SpectralSpace::new(grid);
        let f = random_field(&s, &mut rng);
        let tiny = f.resolvent_apply(&sym, 1e-14).unwrap();
        assert!(tiny.sub(&f).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn diagonal_operators_commute_and_are_symmetric() {
        let spec = ProjectionSpec::dodecagonal();
        let grid = crate::lattice::build_grid(&spec, &[4, 4, 4, 4]).unwrap();
        let sym = build_symbol(&spec, &grid, &[1.0, 2.0 * (PI / 12.0).cos()]).unwrap();
        let s = SpectralSpace::new(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_field(&s, &mut rng);
        let g = random_field(&s, &mut rng);
        let ab = f.apply_symbol(&sym, 1).unwrap().resolvent_apply(&sym, 0.4).unwrap();
        let ba = f.resolvent_apply(&sym, 0.4).unwrap().apply_symbol(&sym, 1).unwrap();
        assert!(ab.sub(&ba).unwrap().max_abs() <= 1e-13 * ab.max_abs());
        let lhs = f.apply_symbol(&sym, 2).unwrap().inner_ap(&g).unwrap();
        let rhs = f.inner_ap(&g.apply_symbol(&sym, 2).unwrap()).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        assert!(f.apply_symbol(&sym, 2).unwrap().hermitian_violation() <= 1e-12);
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let s = SpectralSpace::new(IndexGrid::new(&[4, 6]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut f = random_field(&s, &mut rng);
        f.coeffs_mut()[3] = Complex64::new(1e-300, 0.0);
        f.enforce_hermitian();
        let mut buf = Vec::new();
        FieldDump::from_field(&f).write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ipfc-field v1 n=2 sizes=4,6\n"));
        let back = FieldDump::parse(&text, "mem").unwrap().into_field(&s).unwrap();
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            if a.norm() > DUMP_THRESHOLD {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            } else {
                assert_eq!(*b, Complex64::ZERO);
            }
        }
    }

    #[test]
    fn dump_parse_errors_carry_line_numbers() {
        let bad = "ipfc-field v1 n=1 sizes=4\n0 1.0 0.0\n1 x 0.0\n";
        match FieldDump::parse(bad, "f.txt") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(FieldDump::parse("garbage", "f").is_err());
        let s = space_1d(8);
        let d = FieldDump::parse("ipfc-field v1 n=1 sizes=4\n", "f").unwrap();
        assert!(matches!(d.into_field(&s), Err(Error::GridMismatch)));
    }
}
