//! Hierarchical appearance features: multi-scale oriented texture responses
//! pooled into the real part of each channel, color-name probabilities
//! pooled into the imaginary part.

pub mod binning;
pub mod color;
pub mod gabor;
pub mod pooling;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::grid::{ComplexMap, Grid, RealMap};
use crate::spectral::{self, Spectrum};
use binning::{bin_s1_even, bin_s1_odd, EVEN_ORIENTATIONS, ODD_ORIENTATIONS};
use color::{color_names, ColorNameTable, COLOR_CHANNELS};
use gabor::{fga_gradients, orientation_magnitude, SCALES};
use num_complex::Complex64;
use pooling::{c1_avg_pool, c1_std_pool, CELL_SIZE};
use rayon::prelude::*;

/// Orientation channels per scale: 8 contrast-sensitive + 4 insensitive.
pub const ORIENTATIONS_PER_SCALE: usize = ODD_ORIENTATIONS + EVEN_ORIENTATIONS;
/// Total complex channels: 5 scales x 12 orientations.
pub const FEATURE_CHANNELS: usize = SCALES.len() * ORIENTATIONS_PER_SCALE;

/// Pooled complex feature maps: texture in the real part, color in the
/// imaginary part, on a grid downsampled by the pooling cell size.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStack {
    pub channels: Vec<ComplexMap>,
    pub cell_size: usize,
}

impl FeatureStack {
    pub fn grid_dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    /// Forward transform of every channel.
    pub fn to_spectra(&self, parallel: bool) -> Vec<Spectrum> {
        if parallel {
            self.channels.par_iter().map(spectral::forward).collect()
        } else {
            self.channels.iter().map(spectral::forward).collect()
        }
    }

    /// `rho * other + (1 - rho) * self`, elementwise over all channels.
    pub fn lerp_toward(&mut self, other: &FeatureStack, rho: f64) {
        debug_assert_eq!(self.channels.len(), other.channels.len());
        for (a, b) in self.channels.iter_mut().zip(&other.channels) {
            for (x, y) in a.as_mut_slice().iter_mut().zip(b.as_slice()) {
                *x = rho * y + (1.0 - rho) * *x;
            }
        }
    }

    /// Circularly shifts every channel by `(dr, dc)` cells.
    pub fn circular_shift(&self, dr: i64, dc: i64) -> FeatureStack {
        FeatureStack {
            channels: self.channels.iter().map(|c| c.circular_shift(dr, dc)).collect(),
            cell_size: self.cell_size,
        }
    }
}

/// Converts frame patches into feature stacks. Cheap to share immutably;
/// all extraction state is per call.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    table: ColorNameTable,
    taper_enabled: bool,
    parallel: bool,
}

impl FeatureExtractor {
    pub fn new(table: ColorNameTable, taper_enabled: bool) -> Self {
        FeatureExtractor {
            table,
            taper_enabled,
            parallel: false,
        }
    }

    /// Enables per-scale parallelism; callers control the thread pool by
    /// installing one around `extract`.
    pub fn with_parallelism(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn table(&self) -> &ColorNameTable {
        &self.table
    }

    /// Full pipeline for one patch: per-scale oriented texture responses
    /// STD-pooled into channel real parts, the 12 color maps AVG-pooled and
    /// replicated across scales as imaginary parts, then an optional
    /// raised-cosine taper per channel.
    pub fn extract(&self, patch: &Frame) -> Result<FeatureStack> {
        let (rows, cols) = patch.dims();
        if rows < CELL_SIZE || cols < CELL_SIZE {
            return Err(Error::Input(format!(
                "patch {rows}x{cols} is smaller than one pooling cell"
            )));
        }

        let texture: Vec<Vec<RealMap>> = if self.parallel {
            SCALES
                .par_iter()
                .map(|&params| scale_texture_channels(&patch.gray, params))
                .collect::<Result<_>>()?
        } else {
            SCALES
                .iter()
                .map(|&params| scale_texture_channels(&patch.gray, params))
                .collect::<Result<_>>()?
        };

        let color_pooled: Vec<RealMap> = color_names(patch, &self.table)
            .iter()
            .map(c1_avg_pool)
            .collect::<Result<_>>()?;

        let taper = self
            .taper_enabled
            .then(|| spectral::hann_window(rows / CELL_SIZE, cols / CELL_SIZE));

        let mut channels = Vec::with_capacity(FEATURE_CHANNELS);
        for per_scale in &texture {
            for (o, tex) in per_scale.iter().enumerate() {
                let col = &color_pooled[o];
                let mut channel = Grid::from_fn(tex.rows(), tex.cols(), |r, c| {
                    Complex64::new(tex.at(r, c), col.at(r, c))
                });
                if let Some(w) = &taper {
                    for (v, &t) in channel.as_mut_slice().iter_mut().zip(w.as_slice()) {
                        *v *= t;
                    }
                }
                channels.push(channel);
            }
        }
        Ok(FeatureStack {
            channels,
            cell_size: CELL_SIZE,
        })
    }
}

/// The 12 pooled texture maps for one scale, odd bins first.
fn scale_texture_channels(gray: &RealMap, params: gabor::GaborScaleParams) -> Result<Vec<RealMap>> {
    let gradients = fga_gradients(gray, params)?;
    let field = orientation_magnitude(&gradients)?;
    let mut pooled = Vec::with_capacity(ORIENTATIONS_PER_SCALE);
    for map in bin_s1_odd(&field) {
        pooled.push(c1_std_pool(&map)?);
    }
    for map in bin_s1_even(&field) {
        pooled.push(c1_std_pool(&map)?);
    }
    Ok(pooled)
}

// COLOR_CHANNELS rows pair one-to-one with the 12 orientations of a scale.
const _: () = assert!(COLOR_CHANNELS == ORIENTATIONS_PER_SCALE);
