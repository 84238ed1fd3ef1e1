//! Grayscale rendering of real-space morphologies.

use std::io::Write;
use std::path::Path;

use super::config::RenderConfig;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::{sample_real_space, ProjectionSpec, Raster, Window};

const DEFAULT_EXTENT: f64 = 40.0;
const DEFAULT_RESOLUTION: usize = 256;

/// Byte value used when the raster is constant.
pub const DEGENERATE_GRAY: u8 = 128;

pub fn window_for(cfg: &RenderConfig, d: usize) -> Result<(Window, Vec<usize>)> {
    let lo = cfg.lo.clone().unwrap_or_else(|| vec![0.0; d]);
    let hi = cfg.hi.clone().unwrap_or_else(|| vec![DEFAULT_EXTENT; d]);
    let res = cfg.resolution.clone().unwrap_or_else(|| vec![DEFAULT_RESOLUTION; d]);
    if lo.len() != d || hi.len() != d || res.len() != d {
        return Err(Error::Config(format!("render window and resolution need {d} entries")));
    }
    Ok((Window { lo, hi }, res))
}

pub fn rasterize(field: &SpectralField, spec: &ProjectionSpec, cfg: &RenderConfig) -> Result<Raster> {
    let d = spec.physical_dim();
    if d > 2 {
        return Err(Error::InvalidArgument("only 1D and 2D fields can be rendered".into()));
    }
    let (window, res) = window_for(cfg, d)?;
    sample_real_space(spec, field.grid(), field, &window, &res, cfg.floor * field.max_abs())
}

/// Linear map of `[min, max]` to `0..=255`.
pub fn to_gray(raster: &Raster) -> Vec<u8> {
    let Some((lo, hi)) = raster.min_max() else {
        return Vec::new();
    };
    if !(hi > lo) {
        return vec![DEGENERATE_GRAY; raster.values.len()];
    }
    let scale = 255.0 / (hi - lo);
    raster
        .values
        .iter()
        .map(|v| ((v - lo) * scale).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Binary P5 graymap; the first image row is the lowest `y`.
pub fn write_pgm<W: Write>(raster: &Raster, mut out: W) -> Result<()> {
    let width = raster.resolution[0];
    let height = raster.resolution.get(1).copied().unwrap_or(1);
    write!(out, "P5\n{width} {height}\n255\n")?;
    out.write_all(&to_gray(raster))?;
    out.flush()?;
    Ok(())
}

pub fn render_to_file(field: &SpectralField, spec: &ProjectionSpec, cfg: &RenderConfig, path: &Path) -> Result<()> {
    let raster = rasterize(field, spec, cfg)?;
    write_pgm(&raster, std::io::BufWriter::new(std::fs::File::create(path)?))
}
