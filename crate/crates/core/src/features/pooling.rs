//! Complex-cell pooling over non-overlapping 4x4 cells: a shift-normalized
//! STD summation for texture maps and a plain mean for color maps.

use crate::error::{Error, Result};
use crate::grid::{reflect_index, RealMap};

/// Cell side in pixels; pooled grids are downsampled by this factor.
pub const CELL_SIZE: usize = 4;

const SHIFTS: [(i64, i64); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Normalized summation pooling. For every pixel of a 4x4 cell and each of
/// the four diagonal shift combinations, accumulates `s / N` where
/// `N = sqrt(s^2 + s(dx,dy)^2 + s(dx,0)^2 + s(0,dy)^2)` over reflected
/// neighbors. A zero `N` contributes zero, so flat zero regions stay zero.
pub fn c1_std_pool(s1: &RealMap) -> Result<RealMap> {
    let (rows, cols) = pooled_dims(s1)?;
    let mut out = RealMap::zeros(rows, cols);
    for cr in 0..rows {
        for cc in 0..cols {
            let mut acc = 0.0;
            for pr in cr * CELL_SIZE..(cr + 1) * CELL_SIZE {
                for pc in cc * CELL_SIZE..(cc + 1) * CELL_SIZE {
                    let s = s1.at(pr, pc);
                    if s == 0.0 {
                        continue;
                    }
                    let s2 = s * s;
                    for (dr, dc) in SHIFTS {
                        let nr = reflect_index(pr as i64 + dr, s1.rows());
                        let nc = reflect_index(pc as i64 + dc, s1.cols());
                        let a = s1.at(nr, nc);
                        let b = s1.at(nr, pc);
                        let c = s1.at(pr, nc);
                        let n = (s2 + a * a + b * b + c * c).sqrt();
                        // n >= |s| > 0 here; the zero-N case is the skipped
                        // s == 0 branch.
                        acc += s / n;
                    }
                }
            }
            out.set(cr, cc, acc);
        }
    }
    Ok(out)
}

/// Mean over each non-overlapping 4x4 cell.
pub fn c1_avg_pool(s1: &RealMap) -> Result<RealMap> {
    let (rows, cols) = pooled_dims(s1)?;
    let inv = 1.0 / (CELL_SIZE * CELL_SIZE) as f64;
    let mut out = RealMap::zeros(rows, cols);
    for cr in 0..rows {
        for cc in 0..cols {
            let mut acc = 0.0;
            for pr in cr * CELL_SIZE..(cr + 1) * CELL_SIZE {
                for pc in cc * CELL_SIZE..(cc + 1) * CELL_SIZE {
                    acc += s1.at(pr, pc);
                }
            }
            out.set(cr, cc, acc * inv);
        }
    }
    Ok(out)
}

fn pooled_dims(s1: &RealMap) -> Result<(usize, usize)> {
    if s1.rows() < CELL_SIZE || s1.cols() < CELL_SIZE {
        return Err(Error::Input(format!(
            "map {}x{} is smaller than one {CELL_SIZE}x{CELL_SIZE} pooling cell",
            s1.rows(),
            s1.cols()
        )));
    }
    Ok((s1.rows() / CELL_SIZE, s1.cols() / CELL_SIZE))
}
