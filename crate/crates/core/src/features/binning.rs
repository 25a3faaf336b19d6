//! Orientation binning of the gradient field into sparse simple-cell
//! response maps: 8 contrast-sensitive bins plus 4 contrast-insensitive
//! bins that merge opposite directions.

use super::gabor::OrientationField;
use crate::grid::RealMap;

pub const ODD_ORIENTATIONS: usize = 8;
pub const EVEN_ORIENTATIONS: usize = 4;

/// Contrast-sensitive bin for an angle in `(-pi, pi]`. Bin `j` is centered
/// at `j * pi/4` (wrapped), covering `[center - pi/8, center + pi/8)` with
/// the left edge inclusive.
#[inline]
pub fn odd_bin(theta: f64) -> usize {
    let k = (theta / std::f64::consts::FRAC_PI_4 + 0.5).floor() as i64;
    k.rem_euclid(ODD_ORIENTATIONS as i64) as usize
}

/// Contrast-insensitive bin: the odd bin folded modulo pi.
#[inline]
pub fn even_bin(theta: f64) -> usize {
    odd_bin(theta) % EVEN_ORIENTATIONS
}

/// Bin center angle for contrast-sensitive bin `j`, in `(-pi, pi]`.
pub fn odd_bin_center(j: usize) -> f64 {
    let angle = j as f64 * std::f64::consts::FRAC_PI_4;
    if angle > std::f64::consts::PI {
        angle - 2.0 * std::f64::consts::PI
    } else {
        angle
    }
}

/// Scatters each pixel's magnitude into exactly one of 8 orientation maps.
pub fn bin_s1_odd(field: &OrientationField) -> Vec<RealMap> {
    let (rows, cols) = field.theta.dims();
    let mut maps = vec![RealMap::zeros(rows, cols); ODD_ORIENTATIONS];
    let theta = field.theta.as_slice();
    let magnitude = field.magnitude.as_slice();
    for i in 0..theta.len() {
        maps[odd_bin(theta[i])].as_mut_slice()[i] = magnitude[i];
    }
    maps
}

/// Scatters each pixel's magnitude into exactly one of 4 orientation maps,
/// merging each direction with its opposite.
pub fn bin_s1_even(field: &OrientationField) -> Vec<RealMap> {
    let (rows, cols) = field.theta.dims();
    let mut maps = vec![RealMap::zeros(rows, cols); EVEN_ORIENTATIONS];
    let theta = field.theta.as_slice();
    let magnitude = field.magnitude.as_slice();
    for i in 0..theta.len() {
        maps[even_bin(theta[i])].as_mut_slice()[i] = magnitude[i];
    }
    maps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    fn field(theta: Vec<f64>, magnitude: Vec<f64>) -> OrientationField {
        let n = theta.len();
        OrientationField {
            theta: Grid::from_vec(1, n, theta),
            magnitude: Grid::from_vec(1, n, magnitude),
        }
    }

    #[test]
    fn bin_centers_collect_their_magnitude() {
        let f = field(vec![0.0], vec![2.5]);
        let maps = bin_s1_odd(&f);
        assert_eq!(maps[0].at(0, 0), 2.5);
        for m in &maps[1..] {
            assert_eq!(m.at(0, 0), 0.0);
        }
    }

    #[test]
    fn half_open_boundary_goes_to_upper_bin() {
        // pi/8 is the shared edge between bin 0 and bin pi/4; left-inclusive
        // intervals assign it to pi/4.
        assert_eq!(odd_bin(FRAC_PI_8), 1);
        // Just below the edge stays in bin 0.
        assert_eq!(odd_bin(FRAC_PI_8 - 1e-12), 0);
    }

    #[test]
    fn pi_and_near_minus_pi_share_a_bin() {
        assert_eq!(odd_bin(PI), 4);
        assert_eq!(odd_bin(-PI + 1e-9), 4);
        assert_eq!(odd_bin(-7.0 * FRAC_PI_8), 4);
    }

    #[test]
    fn even_bins_merge_opposites() {
        // theta = pi folds onto the 0 bin; theta = pi/2 keeps its own bin.
        let f = field(vec![PI, FRAC_PI_2, -FRAC_PI_2], vec![1.0, 2.0, 3.0]);
        let maps = bin_s1_even(&f);
        assert_eq!(maps[0].at(0, 0), 1.0);
        assert_eq!(maps[2].at(0, 1), 2.0);
        assert_eq!(maps[2].at(0, 2), 3.0);
    }

    #[test]
    fn odd_bin_centers_cover_principal_range() {
        let centers: Vec<f64> = (0..8).map(odd_bin_center).collect();
        for (j, &c) in centers.iter().enumerate() {
            assert!(c > -PI && c <= PI);
            assert_eq!(odd_bin(c), j, "center {c} of bin {j}");
        }
        assert_eq!(centers[0], 0.0);
        assert_eq!(centers[4], PI);
        assert_eq!(centers[5], -3.0 * FRAC_PI_4);
    }

    #[test]
    fn random_field_partitions_magnitude() {
        let mut rng = StdRng::seed_from_u64(33);
        let n = 500;
        let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..=PI)).collect();
        let magnitude: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
        let f = field(theta, magnitude.clone());
        let odd = bin_s1_odd(&f);
        let even = bin_s1_even(&f);
        for i in 0..n {
            let odd_sum: f64 = odd.iter().map(|m| m.as_slice()[i]).sum();
            let even_sum: f64 = even.iter().map(|m| m.as_slice()[i]).sum();
            assert_eq!(odd_sum, magnitude[i], "odd partition at {i}");
            assert_eq!(even_sum, magnitude[i], "even partition at {i}");
        }
    }

    proptest::proptest! {
        /// Pixelwise, each even map equals the sum of the two odd maps at
        /// its orientation and the opposite direction.
        #[test]
        fn prop_even_is_odd_plus_opposite(seed in 0u64..200) {
            let mut rng = StdRng::seed_from_u64(seed);
            let n = 64;
            let theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..=PI)).collect();
            let magnitude: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let f = field(theta, magnitude);
            let odd = bin_s1_odd(&f);
            let even = bin_s1_even(&f);
            for j in 0..EVEN_ORIENTATIONS {
                for i in 0..n {
                    let merged = odd[j].as_slice()[i] + odd[j + 4].as_slice()[i];
                    proptest::prop_assert_eq!(even[j].as_slice()[i], merged);
                }
            }
        }
    }
}
