//! Dense row-major 2-D buffers used for images, feature maps, and spectra.

use num_complex::Complex64;

/// Row-major 2-D array. `(row, col)` indexing, contiguous storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RealMap = Grid<f64>;
pub type ComplexMap = Grid<Complex64>;

impl<T: Copy> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Grid {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Wraps an existing buffer; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "grid buffer size mismatch");
        Grid { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Grid { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    /// Reads with symmetric (reflect) extension for out-of-range indices.
    /// The edge sample is repeated: index -1 maps to 0, index n maps to n-1.
    #[inline]
    pub fn at_reflect(&self, r: i64, c: i64) -> T {
        let r = reflect_index(r, self.rows);
        let c = reflect_index(c, self.cols);
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    /// Circularly shifts the grid by `(dr, dc)`; entry `(r, c)` moves to
    /// `((r + dr) mod rows, (c + dc) mod cols)`.
    pub fn circular_shift(&self, dr: i64, dc: i64) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            let nr = (r as i64 + dr).rem_euclid(self.rows as i64) as usize;
            for c in 0..self.cols {
                let nc = (c as i64 + dc).rem_euclid(self.cols as i64) as usize;
                out.data[nr * self.cols + nc] = self.data[r * self.cols + c];
            }
        }
        out
    }
}

impl RealMap {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Grid::filled(rows, cols, 0.0)
    }

    pub fn to_complex(&self) -> ComplexMap {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

impl ComplexMap {
    pub fn zeros_complex(rows: usize, cols: usize) -> Self {
        Grid::filled(rows, cols, Complex64::new(0.0, 0.0))
    }

    pub fn real(&self) -> RealMap {
        self.map(|v| v.re)
    }
}

/// Symmetric reflection of an arbitrary signed index into `[0, n)`.
/// Period is `2n`; the edge sample repeats (`-1 -> 0`, `n -> n-1`).
#[inline]
pub fn reflect_index(i: i64, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as i64;
    let m = i.rem_euclid(2 * n);
    if m < n {
        m as usize
    } else {
        (2 * n - 1 - m) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_repeats_edges() {
        // n = 4: ... 1 0 | 0 1 2 3 | 3 2 ...
        assert_eq!(reflect_index(-1, 4), 0);
        assert_eq!(reflect_index(-2, 4), 1);
        assert_eq!(reflect_index(0, 4), 0);
        assert_eq!(reflect_index(3, 4), 3);
        assert_eq!(reflect_index(4, 4), 3);
        assert_eq!(reflect_index(5, 4), 2);
        // Full period and beyond.
        assert_eq!(reflect_index(8, 4), 0);
        assert_eq!(reflect_index(-8, 4), 0);
        assert_eq!(reflect_index(100, 1), 0);
        assert_eq!(reflect_index(-100, 1), 0);
    }

    #[test]
    fn circular_shift_wraps() {
        let g = Grid::from_fn(2, 3, |r, c| (r * 3 + c) as f64);
        let s = g.circular_shift(1, 2);
        // (0,0) -> (1,2)
        assert_eq!(s.at(1, 2), 0.0);
        // (1,2) -> (0,1)
        assert_eq!(s.at(0, 1), 5.0);
    }
}
