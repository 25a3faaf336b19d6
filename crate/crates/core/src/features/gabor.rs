//! Multi-scale 1-D Gabor kernels and the gradient-pair approximation of the
//! oriented filter bank: two orthogonal 1-D convolutions per scale replace
//! the full 2-D multi-orientation bank.

use crate::error::{Error, Result};
use crate::grid::{Grid, RealMap};

/// One scale of the simple-cell filter pyramid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaborScaleParams {
    /// 1-based scale index.
    pub scale_index: usize,
    /// Odd kernel support in pixels.
    pub receptive_field: usize,
    /// Gaussian envelope width.
    pub sigma: f64,
    /// Sinusoid wavelength.
    pub lambda: f64,
    /// Envelope aspect ratio; only the 2-D test oracle uses it.
    pub gamma: f64,
}

/// The five-scale pyramid, 7x7 through 15x15 in steps of two pixels.
pub const SCALES: [GaborScaleParams; 5] = [
    GaborScaleParams { scale_index: 1, receptive_field: 7, sigma: 2.8, lambda: 3.5, gamma: 0.3 },
    GaborScaleParams { scale_index: 2, receptive_field: 9, sigma: 3.6, lambda: 4.6, gamma: 0.3 },
    GaborScaleParams { scale_index: 3, receptive_field: 11, sigma: 4.5, lambda: 5.6, gamma: 0.3 },
    GaborScaleParams { scale_index: 4, receptive_field: 13, sigma: 5.4, lambda: 6.8, gamma: 0.3 },
    GaborScaleParams { scale_index: 5, receptive_field: 15, sigma: 6.3, lambda: 7.9, gamma: 0.3 },
];

pub fn scale_params(scale_index: usize) -> Result<GaborScaleParams> {
    SCALES
        .iter()
        .copied()
        .find(|s| s.scale_index == scale_index)
        .ok_or_else(|| Error::Parameter(format!("unknown Gabor scale index {scale_index}")))
}

/// Gabor response maps along the two image axes at one scale.
#[derive(Debug, Clone)]
pub struct GradientPair {
    pub dx: RealMap,
    pub dy: RealMap,
}

/// Samples the odd 1-D Gabor `exp(-x^2/2s^2) * sin(2*pi*x/l)` on integer taps
/// centered at zero, then removes the residual mean so constant inputs map
/// to zero. Returns the x and y kernels (identical samples, orthogonal axes).
pub fn gabor_1d_pair(params: GaborScaleParams) -> Result<(Vec<f64>, Vec<f64>)> {
    scale_params(params.scale_index)?;
    if params.receptive_field % 2 == 0 || params.receptive_field == 0 {
        return Err(Error::Parameter(format!(
            "receptive field must be odd and positive, got {}",
            params.receptive_field
        )));
    }
    let half = (params.receptive_field / 2) as i64;
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|x| {
            let x = x as f64;
            (-x * x / (2.0 * params.sigma * params.sigma)).exp()
                * (2.0 * std::f64::consts::PI * x / params.lambda).sin()
        })
        .collect();
    let mean = kernel.iter().sum::<f64>() / kernel.len() as f64;
    for v in &mut kernel {
        *v -= mean;
    }
    Ok((kernel.clone(), kernel))
}

/// Convolves the image with the scale's kernel pair: `dx` along rows, `dy`
/// along columns. Sliding dot product with symmetric border extension;
/// output dimensions equal the input.
pub fn fga_gradients(gray: &RealMap, params: GaborScaleParams) -> Result<GradientPair> {
    if gray.is_empty() {
        return Err(Error::Input("empty image".into()));
    }
    let (kernel_x, kernel_y) = gabor_1d_pair(params)?;
    Ok(GradientPair {
        dx: convolve_rows(gray, &kernel_x),
        dy: convolve_cols(gray, &kernel_y),
    })
}

fn convolve_rows(map: &RealMap, kernel: &[f64]) -> RealMap {
    let (rows, cols) = map.dims();
    let half = (kernel.len() / 2) as i64;
    let mut out = RealMap::zeros(rows, cols);
    for r in 0..rows {
        let src = map.row(r);
        let interior = cols as i64 - half;
        for c in 0..cols {
            let c_i = c as i64;
            let mut acc = 0.0;
            if c_i >= half && c_i < interior {
                // Interior fast path, no index folding.
                let base = (c_i - half) as usize;
                for (t, &k) in kernel.iter().enumerate() {
                    acc += src[base + t] * k;
                }
            } else {
                for (t, &k) in kernel.iter().enumerate() {
                    let idx = crate::grid::reflect_index(c_i + t as i64 - half, cols);
                    acc += src[idx] * k;
                }
            }
            out.set(r, c, acc);
        }
    }
    out
}

fn convolve_cols(map: &RealMap, kernel: &[f64]) -> RealMap {
    let (rows, cols) = map.dims();
    let half = (kernel.len() / 2) as i64;
    let mut out = RealMap::zeros(rows, cols);
    let src = map.as_slice();
    let dst = out.as_mut_slice();
    let interior = rows as i64 - half;
    for r in 0..rows {
        let r_i = r as i64;
        if r_i >= half && r_i < interior {
            let base = (r_i - half) as usize;
            for (t, &k) in kernel.iter().enumerate() {
                let row = &src[(base + t) * cols..(base + t + 1) * cols];
                let drow = &mut dst[r * cols..(r + 1) * cols];
                for c in 0..cols {
                    drow[c] += row[c] * k;
                }
            }
        } else {
            for (t, &k) in kernel.iter().enumerate() {
                let rr = crate::grid::reflect_index(r_i + t as i64 - half, rows);
                let row = &src[rr * cols..(rr + 1) * cols];
                let drow = &mut dst[r * cols..(r + 1) * cols];
                for c in 0..cols {
                    drow[c] += row[c] * k;
                }
            }
        }
    }
    out
}

/// Per-pixel orientation (two-argument arctangent, range `(-pi, pi]`) and
/// gradient magnitude.
#[derive(Debug, Clone)]
pub struct OrientationField {
    pub theta: RealMap,
    pub magnitude: RealMap,
}

pub fn orientation_magnitude(g: &GradientPair) -> Result<OrientationField> {
    if g.dx.dims() != g.dy.dims() {
        return Err(Error::Input(format!(
            "gradient pair dimension mismatch: {:?} vs {:?}",
            g.dx.dims(),
            g.dy.dims()
        )));
    }
    let (rows, cols) = g.dx.dims();
    let mut theta = RealMap::zeros(rows, cols);
    let mut magnitude = RealMap::zeros(rows, cols);
    let dx = g.dx.as_slice();
    let dy = g.dy.as_slice();
    for i in 0..dx.len() {
        theta.as_mut_slice()[i] = dy[i].atan2(dx[i]);
        magnitude.as_mut_slice()[i] = (dx[i] * dx[i] + dy[i] * dy[i]).sqrt();
    }
    Ok(OrientationField { theta, magnitude })
}
