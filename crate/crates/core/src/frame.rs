//! Frame storage and search-window patch extraction.

use crate::error::{Error, Result};
use crate::grid::{Grid, RealMap};
use image::DynamicImage;

/// One video frame: luminance in `[0, 1]` plus the 8-bit RGB planes when the
/// source had color. Grayscale sources carry no RGB planes, which downstream
/// zeroes the color feature channels.
#[derive(Debug, Clone)]
pub struct Frame {
    pub gray: RealMap,
    pub rgb: Option<RgbPlanes>,
}

#[derive(Debug, Clone)]
pub struct RgbPlanes {
    pub r: Grid<u8>,
    pub g: Grid<u8>,
    pub b: Grid<u8>,
}

impl Frame {
    pub fn from_gray(gray: RealMap) -> Self {
        Frame { gray, rgb: None }
    }

    pub fn from_dynamic_image(img: &DynamicImage) -> Self {
        let has_color = img.color().has_color();
        if has_color {
            let rgb = img.to_rgb8();
            let (w, h) = rgb.dimensions();
            let (w, h) = (w as usize, h as usize);
            let mut rp = Grid::filled(h, w, 0u8);
            let mut gp = Grid::filled(h, w, 0u8);
            let mut bp = Grid::filled(h, w, 0u8);
            let mut gray = RealMap::zeros(h, w);
            for (y, row) in rgb.rows().enumerate() {
                for (x, px) in row.enumerate() {
                    let [r, g, b] = px.0;
                    rp.set(y, x, r);
                    gp.set(y, x, g);
                    bp.set(y, x, b);
                    gray.set(y, x, luminance(r, g, b));
                }
            }
            Frame {
                gray,
                rgb: Some(RgbPlanes { r: rp, g: gp, b: bp }),
            }
        } else {
            let luma = img.to_luma8();
            let (w, h) = luma.dimensions();
            let gray = Grid::from_fn(h as usize, w as usize, |r, c| {
                luma.get_pixel(c as u32, r as u32).0[0] as f64 / 255.0
            });
            Frame::from_gray(gray)
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.gray.dims()
    }

    /// Cuts a `height x width` patch centered on `(cx, cy)` (pixel
    /// coordinates, x along columns). Samples outside the frame are filled
    /// by symmetric reflection so patch dimensions never shrink at borders.
    pub fn cut_patch(&self, cx: f64, cy: f64, width: usize, height: usize) -> Result<Frame> {
        if width == 0 || height == 0 {
            return Err(Error::Input("patch dimensions must be positive".into()));
        }
        if self.gray.is_empty() {
            return Err(Error::Input("cannot cut a patch from an empty frame".into()));
        }
        let x0 = (cx - width as f64 / 2.0).round() as i64;
        let y0 = (cy - height as f64 / 2.0).round() as i64;

        let gray = Grid::from_fn(height, width, |r, c| {
            self.gray.at_reflect(y0 + r as i64, x0 + c as i64)
        });
        let rgb = self.rgb.as_ref().map(|p| RgbPlanes {
            r: Grid::from_fn(height, width, |r, c| p.r.at_reflect(y0 + r as i64, x0 + c as i64)),
            g: Grid::from_fn(height, width, |r, c| p.g.at_reflect(y0 + r as i64, x0 + c as i64)),
            b: Grid::from_fn(height, width, |r, c| p.b.at_reflect(y0 + r as i64, x0 + c as i64)),
        });
        Ok(Frame { gray, rgb })
    }
}

/// BT.601 luma, normalized to `[0, 1]`.
#[inline]
pub fn luminance(r: u8, g: u8, b: u8) -> f64 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) / 255.0
}
