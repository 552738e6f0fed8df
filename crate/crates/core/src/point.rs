//! Points of C^n and the two pairings everything else is built from.
//!
//! `phi` is the bilinear squared distance `sum (x_i - y_i)^2` — complex
//! squares, no conjugation, so the value is a complex number and can be
//! negative or non-real. `psi` pairs the imaginary parts and controls
//! when label propagation along a chain is licensed.

use num_complex::Complex64;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of C^n. Coordinates are plain `Complex64` values; the ambient
/// dimension is the length of the coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Point { coords }
    }

    /// Real point from real coordinates (imaginary parts exactly zero).
    pub fn from_real(re: &[f64]) -> Self {
        Point {
            coords: re.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        }
    }

    /// Point from separate real and imaginary parts.
    pub fn from_re_im(re: &[f64], im: &[f64]) -> Self {
        assert_eq!(re.len(), im.len());
        Point {
            coords: re
                .iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Point {
            coords: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// The k-th standard basis point `e_k` (real).
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n);
        let mut coords = vec![Complex64::new(0.0, 0.0); n];
        coords[k] = Complex64::new(1.0, 0.0);
        Point { coords }
    }

    /// The anchor point `(i, ..., i)`.
    pub fn all_i(n: usize) -> Self {
        Point {
            coords: vec![Complex64::new(0.0, 1.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.coords.iter().map(|z| z.im).collect()
    }

    /// True iff every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.coords.iter().all(|z| z.im == 0.0)
    }

    pub fn max_imag_abs(&self) -> f64 {
        self.coords.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Point {
        Point {
            coords: self.coords.iter().map(|z| c * z).collect(),
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        assert_eq!(self.dim(), other.dim());
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Max coordinatewise modulus of the difference.
    pub fn dist_inf(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Euclidean norm of a real point; meaningful only when `is_real`.
    pub fn real_norm(&self) -> f64 {
        self.coords.iter().map(|z| z.re * z.re).sum::<f64>().sqrt()
    }

    fn check_same_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// The bilinear squared distance `sum_i (x_i - y_i)^2`.
///
/// Symmetric in its arguments and translation invariant. This is not the
/// Hermitian norm: no conjugation is applied, so isotropic pairs
/// (`phi = 0` with `X != Y`) exist.
pub fn phi(x: &Point, y: &Point) -> Result<Complex64> {
    x.check_same_dim(y)?;
    Ok(x.coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum())
}

/// The imaginary pairing `sum_k Im(x_k) * Im(y_k)`.
///
/// Real-valued, symmetric, and zero whenever either argument is real.
pub fn psi(x: &Point, y: &Point) -> Result<f64> {
    x.check_same_dim(y)?;
    Ok(x.coords()
        .iter()
        .zip(y.coords())
        .map(|(a, b)| a.im * b.im)
        .sum())
}

/// Componentwise complex conjugation. An involution that fixes exactly
/// the real points.
pub fn conjugate_point(x: &Point) -> Point {
    Point::new(x.coords().iter().map(|z| z.conj()).collect())
}

/// The defect `phi(X, Y) - phi(conj X, Y)` in closed form.
///
/// With `X = a + b i` and `Y = ã + b̃ i` the value is
/// `4 sum b_k b̃_k + 4 i sum b_k (a_k - ã_k)`; in particular the real
/// part divided by 4 equals `psi(X, Y)`.
pub fn conjugation_defect(x: &Point, y: &Point) -> Result<Complex64> {
    x.check_same_dim(y)?;
    let mut re = 0.0;
    let mut im = 0.0;
    for (zx, zy) in x.coords().iter().zip(y.coords()) {
        re += zx.im * zy.im;
        im += zx.im * (zx.re - zy.re);
    }
    Ok(Complex64::new(4.0 * re, 4.0 * im))
}

// JSON form: a point is an array of [re, im] pairs.

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coords.len()))?;
        for z in &self.coords {
            seq.serialize_element(&(z.re, z.im))?;
        }
        seq.end()
    }
}

struct PointVisitor;

impl<'de> Visitor<'de> for PointVisitor {
    type Value = Point;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an array of [re, im] pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Point, A::Error> {
        let mut coords = Vec::new();
        while let Some((re, im)) = seq.next_element::<(f64, f64)>()? {
            coords.push(Complex64::new(re, im));
        }
        Ok(Point::new(coords))
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Point, D::Error> {
        deserializer.deserialize_seq(PointVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(coords: &[(f64, f64)]) -> Point {
        Point::new(coords.iter().map(|&(re, im)| c(re, im)).collect())
    }

    #[test]
    fn phi_unit_vector() {
        let x = pt(&[(0.0, 0.0), (0.0, 0.0)]);
        let y = pt(&[(1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(phi(&x, &y).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn phi_imaginary_square_is_negative() {
        let x = pt(&[(0.0, 1.0), (0.0, 0.0)]);
        let y = pt(&[(0.0, 0.0), (0.0, 0.0)]);
        assert_eq!(phi(&x, &y).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn phi_mixed_example() {
        let x = pt(&[(1.0, 1.0), (1.0, -1.0)]);
        let y = pt(&[(1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(phi(&x, &y).unwrap(), c(-2.0, 0.0));
    }

    #[test]
    fn phi_dimension_mismatch() {
        let x = pt(&[(0.0, 0.0)]);
        let y = pt(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(
            phi(&x, &y),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn phi_symmetry_and_translation_invariance() {
        let x = pt(&[(0.3, -1.2), (2.0, 0.7)]);
        let y = pt(&[(-0.5, 0.4), (1.1, -0.9)]);
        let z = pt(&[(5.0, 2.0), (-3.0, 1.0)]);
        let pxy = phi(&x, &y).unwrap();
        assert_eq!(pxy, phi(&y, &x).unwrap());
        let shifted = phi(&x.add(&z), &y.add(&z)).unwrap();
        assert_abs_diff_eq!(shifted.re, pxy.re, epsilon = 1e-12);
        assert_abs_diff_eq!(shifted.im, pxy.im, epsilon = 1e-12);
    }

    #[test]
    fn phi_scaling_law() {
        let x = pt(&[(0.7, -0.2), (1.5, 0.3)]);
        let y = pt(&[(-1.0, 0.9), (0.2, -0.4)]);
        let s = c(1.3, -0.8);
        let scaled = phi(&x.scale(s), &y.scale(s)).unwrap();
        let expected = s * s * phi(&x, &y).unwrap();
        assert_abs_diff_eq!(scaled.re, expected.re, epsilon = 1e-12);
        assert_abs_diff_eq!(scaled.im, expected.im, epsilon = 1e-12);
    }

    #[test]
    fn psi_real_argument_gives_zero() {
        let x = pt(&[(3.0, 0.0), (4.0, 0.0)]);
        let y = pt(&[(0.0, 1.0), (0.0, 2.0)]);
        assert_eq!(psi(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn psi_examples() {
        let x = pt(&[(0.0, 1.0), (0.0, 2.0)]);
        let y = pt(&[(0.0, 3.0), (4.0, 0.0)]);
        assert_eq!(psi(&x, &y).unwrap(), 3.0);
        let z = pt(&[(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(psi(&z, &z).unwrap(), 2.0);
    }

    #[test]
    fn conjugation_fixes_real_points() {
        let x = pt(&[(1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(conjugate_point(&x), x);
        let y = pt(&[(0.0, 1.0), (0.0, 0.0)]);
        assert_eq!(conjugate_point(&y), pt(&[(0.0, -1.0), (0.0, 0.0)]));
        let z = pt(&[(1.0, 2.0), (3.0, -1.0)]);
        assert_eq!(conjugate_point(&z), pt(&[(1.0, -2.0), (3.0, 1.0)]));
        assert_eq!(conjugate_point(&conjugate_point(&z)), z);
    }

    #[test]
    fn defect_single_imaginary_coordinate() {
        // X = Y = (i): phi = 0, phi(conj X, Y) = (-2i)^2 = -4, defect 4.
        let x = pt(&[(0.0, 1.0)]);
        let d = conjugation_defect(&x, &x).unwrap();
        assert_eq!(d, c(4.0, 0.0));
        let direct = phi(&x, &x).unwrap() - phi(&conjugate_point(&x), &x).unwrap();
        assert_eq!(direct, d);
    }

    #[test]
    fn defect_vanishes_for_real_first_argument() {
        let x = pt(&[(2.0, 0.0), (-1.0, 0.0)]);
        let y = pt(&[(0.5, 1.5), (0.0, -2.0)]);
        assert_eq!(conjugation_defect(&x, &y).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn defect_matches_direct_difference() {
        let x = pt(&[(1.0, 1.0), (0.0, 0.0)]);
        let y = pt(&[(2.0, 1.0), (0.0, 0.0)]);
        let d = conjugation_defect(&x, &y).unwrap();
        assert_eq!(d, c(4.0, -4.0));
        let direct = phi(&x, &y).unwrap() - phi(&conjugate_point(&x), &y).unwrap();
        assert_abs_diff_eq!(direct.re, d.re, epsilon = 1e-12);
        assert_abs_diff_eq!(direct.im, d.im, epsilon = 1e-12);
    }

    #[test]
    fn point_json_roundtrip() {
        let x = pt(&[(1.5, -2.25), (0.0, 1.0)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "[[1.5,-2.25],[0.0,1.0]]");
        let back: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
