//! Frequency-domain toolkit: 2-D transforms and elementwise spectrum algebra.
//!
//! The forward transform is unnormalized; the inverse carries the `1/(H*W)`
//! factor so that `inverse(forward(x)) == x`. An elementwise spectral product
//! corresponds to circular convolution in the spatial domain; the conjugated
//! product corresponds to circular cross-correlation.

use crate::error::{Error, Result};
use crate::grid::{ComplexMap, Grid};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

/// 2-D discrete spectrum of a complex map, same dimensions as the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    data: ComplexMap,
}

impl Spectrum {
    pub fn dims(&self) -> (usize, usize) {
        self.data.dims()
    }

    pub fn rows(&self) -> usize {
        self.data.rows()
    }

    pub fn cols(&self) -> usize {
        self.data.cols()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.data.as_slice()
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        self.data.as_mut_slice()
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data.at(r, c)
    }

    /// Wraps raw bins; intended for tests and synthetic spectra.
    pub fn from_map(data: ComplexMap) -> Self {
        Spectrum { data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Spectrum {
            data: ComplexMap::zeros_complex(rows, cols),
        }
    }

    /// `self + scale * other`, elementwise.
    pub fn add_scaled(&mut self, other: &Spectrum, scale: f64) {
        debug_assert_eq!(self.dims(), other.dims());
        for (a, b) in self.data.as_mut_slice().iter_mut().zip(other.as_slice()) {
            *a += b * scale;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in self.data.as_mut_slice() {
            *v *= s;
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward 2-D transform.
pub fn forward(map: &ComplexMap) -> Spectrum {
    let mut data = map.clone();
    transform_2d(&mut data, rustfft::FftDirection::Forward);
    Spectrum { data }
}

/// Inverse 2-D transform with `1/(H*W)` normalization.
pub fn inverse(spec: &Spectrum) -> ComplexMap {
    let mut data = spec.data.clone();
    transform_2d(&mut data, rustfft::FftDirection::Inverse);
    let norm = 1.0 / data.len() as f64;
    for v in data.as_mut_slice() {
        *v *= norm;
    }
    data
}

fn transform_2d(map: &mut ComplexMap, direction: rustfft::FftDirection) {
    let (rows, cols) = map.dims();
    if rows == 0 || cols == 0 {
        return;
    }
    PLANNER.with(|planner| {
        let row_fft = planner.borrow_mut().plan_fft(cols, direction);
        for row in map.as_mut_slice().chunks_exact_mut(cols) {
            row_fft.process(row);
        }
        let col_fft = planner.borrow_mut().plan_fft(rows, direction);
        let mut column = vec![Complex64::new(0.0, 0.0); rows];
        let data = map.as_mut_slice();
        for c in 0..cols {
            for r in 0..rows {
                column[r] = data[r * cols + c];
            }
            col_fft.process(&mut column);
            for r in 0..rows {
                data[r * cols + c] = column[r];
            }
        }
    });
}

/// Elementwise product `a ⊙ b` (spatial circular convolution).
pub fn multiply(a: &Spectrum, b: &Spectrum) -> Result<Spectrum> {
    check_dims(a, b)?;
    let mut out = a.clone();
    for (x, y) in out.data.as_mut_slice().iter_mut().zip(b.as_slice()) {
        *x *= y;
    }
    Ok(out)
}

/// Conjugated product `a ⊙ conj(b)` (spatial circular cross-correlation
/// against `b`).
pub fn multiply_conj(a: &Spectrum, b: &Spectrum) -> Result<Spectrum> {
    check_dims(a, b)?;
    let mut out = a.clone();
    for (x, y) in out.data.as_mut_slice().iter_mut().zip(b.as_slice()) {
        *x *= y.conj();
    }
    Ok(out)
}

/// Regularized elementwise division `num * conj(den) / (|den|^2 + lambda)`.
///
/// With `lambda = 0` this is exact division and fails if any denominator bin
/// is zero.
pub fn divide_regularized(num: &Spectrum, den: &Spectrum, lambda: f64) -> Result<Spectrum> {
    check_dims(num, den)?;
    if lambda < 0.0 {
        return Err(Error::Parameter(format!(
            "regularization must be non-negative, got {lambda}"
        )));
    }
    if lambda == 0.0 && den.as_slice().iter().any(|v| v.norm_sqr() == 0.0) {
        return Err(Error::Numerical(
            "spectral division by a zero bin with no regularization".into(),
        ));
    }
    let mut out = num.clone();
    for (x, d) in out.data.as_mut_slice().iter_mut().zip(den.as_slice()) {
        *x = *x * d.conj() / (d.norm_sqr() + lambda);
    }
    Ok(out)
}

fn check_dims(a: &Spectrum, b: &Spectrum) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::Input(format!(
            "spectrum dimension mismatch: {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

/// 2-D raised-cosine (Hann) taper with value 1 on degenerate axes.
pub fn hann_window(rows: usize, cols: usize) -> Grid<f64> {
    let axis = |i: usize, n: usize| -> f64 {
        if n <= 1 {
            1.0
        } else {
            0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        }
    };
    Grid::from_fn(rows, cols, |r, c| axis(r, rows) * axis(c, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RealMap;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_map(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMap {
        Grid::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    /// Direct O(n^4) circular convolution; the independent oracle for the
    /// convolution-theorem tests.
    fn circular_convolve(a: &ComplexMap, b: &ComplexMap) -> ComplexMap {
        let (rows, cols) = a.dims();
        Grid::from_fn(rows, cols, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..rows {
                for j in 0..cols {
                    let br = (r + rows - i) % rows;
                    let bc = (c + cols - j) % cols;
                    acc += a.at(i, j) * b.at(br, bc);
                }
            }
            acc
        })
    }

    /// Direct O(n^4) circular cross-correlation of `a` against `b`.
    fn circular_correlate(a: &ComplexMap, b: &ComplexMap) -> ComplexMap {
        let (rows, cols) = a.dims();
        Grid::from_fn(rows, cols, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..rows {
                for j in 0..cols {
                    let ar = (i + r) % rows;
                    let ac = (j + c) % cols;
                    acc += a.at(ar, ac) * b.at(i, j).conj();
                }
            }
            acc
        })
    }

    fn max_abs_diff(a: &ComplexMap, b: &ComplexMap) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let mut map = ComplexMap::zeros_complex(4, 5);
        map.set(0, 0, Complex64::new(1.0, 0.0));
        let spec = forward(&map);
        for v in spec.as_slice() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_map_is_dc_only() {
        let map = ComplexMap::filled(3, 4, Complex64::new(2.5, 0.0));
        let spec = forward(&map);
        assert!((spec.at(0, 0) - Complex64::new(2.5 * 12.0, 0.0)).norm() < 1e-12);
        for r in 0..3 {
            for c in 0..4 {
                if (r, c) != (0, 0) {
                    assert!(spec.at(r, c).norm() < 1e-12, "bin ({r},{c}) not zero");
                }
            }
        }
    }

    #[test]
    fn dc_only_spectrum_inverts_to_constant_one() {
        let (h, w) = (3, 5);
        let mut spec = Spectrum::zeros(h, w);
        spec.as_mut_slice()[0] = Complex64::new((h * w) as f64, 0.0);
        let map = inverse(&spec);
        for v in map.as_slice() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_identity() {
        let mut rng = StdRng::seed_from_u64(11);
        for &(h, w) in &[(1, 1), (2, 3), (8, 8), (9, 16), (5, 7)] {
            let map = random_map(&mut rng, h, w);
            let back = inverse(&forward(&map));
            assert!(max_abs_diff(&map, &back) < 1e-10, "{h}x{w} round trip");
        }
    }

    #[test]
    fn conjugate_symmetric_spectrum_inverts_to_real() {
        let mut rng = StdRng::seed_from_u64(7);
        let real: RealMap = Grid::from_fn(6, 9, |_, _| rng.gen_range(-1.0..1.0));
        let spec = forward(&real.to_complex());
        let back = inverse(&spec);
        let max_imag = back.as_slice().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(max_imag < 1e-10);
    }

    #[test]
    fn multiply_matches_circular_convolution() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_map(&mut rng, 8, 8);
        let b = random_map(&mut rng, 8, 8);
        let via_fft = inverse(&multiply(&forward(&a), &forward(&b)).unwrap());
        let direct = circular_convolve(&a, &b);
        assert!(max_abs_diff(&via_fft, &direct) < 1e-8);
    }

    #[test]
    fn multiply_conj_matches_circular_correlation() {
        let mut rng = StdRng::seed_from_u64(4);
        let a = random_map(&mut rng, 8, 8);
        let b = random_map(&mut rng, 8, 8);
        let via_fft = inverse(&multiply_conj(&forward(&a), &forward(&b)).unwrap());
        let direct = circular_correlate(&a, &b);
        assert!(max_abs_diff(&via_fft, &direct) < 1e-8);
    }

    #[test]
    fn multiply_identity_and_commutativity() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = forward(&random_map(&mut rng, 4, 6));
        let ones = Spectrum::from_map(ComplexMap::filled(4, 6, Complex64::new(1.0, 0.0)));
        assert_eq!(multiply(&a, &ones).unwrap(), a);
        let b = forward(&random_map(&mut rng, 4, 6));
        assert_eq!(multiply(&a, &b).unwrap(), multiply(&b, &a).unwrap());
    }

    #[test]
    fn multiply_rejects_dimension_mismatch() {
        let a = Spectrum::zeros(2, 3);
        let b = Spectrum::zeros(3, 2);
        assert!(matches!(multiply(&a, &b), Err(Error::Input(_))));
    }

    #[test]
    fn division_round_trip() {
        let mut rng = StdRng::seed_from_u64(6);
        // Bins bounded away from zero so exact division is well posed.
        let den = Spectrum::from_map(Grid::from_fn(5, 5, |_, _| {
            Complex64::new(
                rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                rng.gen_range(0.5..1.5),
            )
        }));
        let num = Spectrum::from_map(random_map(&mut rng, 5, 5));
        let w = divide_regularized(&num, &den, 0.0).unwrap();
        let back = multiply(&w, &den).unwrap();
        let err = num
            .as_slice()
            .iter()
            .zip(back.as_slice())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn division_of_equal_spectra_is_ones() {
        let den = Spectrum::from_map(ComplexMap::filled(3, 3, Complex64::new(0.7, -0.2)));
        let out = divide_regularized(&den, &den, 0.0).unwrap();
        for v in out.as_slice() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_bin_without_regularization_fails() {
        let mut den = Spectrum::from_map(ComplexMap::filled(2, 2, Complex64::new(1.0, 0.0)));
        den.as_mut_slice()[3] = Complex64::new(0.0, 0.0);
        let num = Spectrum::from_map(ComplexMap::filled(2, 2, Complex64::new(1.0, 0.0)));
        assert!(matches!(
            divide_regularized(&num, &den, 0.0),
            Err(Error::Numerical(_))
        ));
        // With regularization the zero bin stays finite; 0/(0 + lambda) = 0
        // when the numerator bin is also 0.
        let mut num0 = num.clone();
        num0.as_mut_slice()[3] = Complex64::new(0.0, 0.0);
        let out = divide_regularized(&num0, &den, 1e-4).unwrap();
        assert!(out.as_slice().iter().all(|v| v.is_finite()));
        assert_eq!(out.as_slice()[3], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hann_window_bounds() {
        let w = hann_window(8, 8);
        assert!(w.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(hann_window(1, 1).at(0, 0), 1.0);
    }

    proptest::proptest! {
        #[test]
        fn prop_linearity(seed in 0u64..500) {
            let mut rng = StdRng::seed_from_u64(seed);
            let x = random_map(&mut rng, 6, 7);
            let y = random_map(&mut rng, 6, 7);
            let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let combined = Grid::from_fn(6, 7, |r, c| alpha * x.at(r, c) + beta * y.at(r, c));
            let lhs = forward(&combined);
            let fx = forward(&x);
            let fy = forward(&y);
            for i in 0..lhs.as_slice().len() {
                let rhs = alpha * fx.as_slice()[i] + beta * fy.as_slice()[i];
                proptest::prop_assert!((lhs.as_slice()[i] - rhs).norm() < 1e-10);
            }
        }

        #[test]
        fn prop_parseval(seed in 0u64..500) {
            let mut rng = StdRng::seed_from_u64(seed);
            let x = random_map(&mut rng, 8, 5);
            let spatial: f64 = x.as_slice().iter().map(|v| v.norm_sqr()).sum();
            let spec = forward(&x);
            let spectral: f64 =
                spec.as_slice().iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
            proptest::prop_assert!((spatial - spectral).abs() <= 1e-8 * spatial.max(1.0));
        }
    }
}
