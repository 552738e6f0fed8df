//! Dense square complex matrices, the plain-transpose orthogonality
//! check, and a seeded generator of complex orthogonal matrices.
//!
//! Orthogonality here means `Q^T Q = Id` with the bilinear transpose and
//! no conjugation. That group (not the unitary group) is the isometry
//! group of the bilinear squared distance.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::point::Point;

/// Square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::NonSquareMatrix {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Ok(CMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(cols: Vec<Vec<Complex64>>) -> Result<Self> {
        let m = CMatrix::from_rows(cols)?;
        Ok(m.transpose())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.n + c] = v;
    }

    pub fn transpose(&self) -> CMatrix {
        let mut t = CMatrix::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn mul_point(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: x.dim(),
            });
        }
        let coords = (0..self.n)
            .map(|r| {
                x.coords()
                    .iter()
                    .enumerate()
                    .map(|(c, v)| self.get(r, c) * v)
                    .sum()
            })
            .collect();
        Ok(Point::new(coords))
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| s * z).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Max modulus over all entries.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c).norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.n).map(|r| self.get(r, c)).collect()
    }

    pub fn negate_column(&mut self, c: usize) {
        for r in 0..self.n {
            let v = self.get(r, c);
            self.set(r, c, -v);
        }
    }
}

/// Residual `max |Q^T Q - Id|` under the plain (bilinear) transpose.
pub fn orthogonality_residual(q: &CMatrix) -> f64 {
    let g = q.transpose().mul(q);
    let mut res: f64 = 0.0;
    for r in 0..q.dim() {
        for c in 0..q.dim() {
            let expect = if r == c { 1.0 } else { 0.0 };
            res = res.max((g.get(r, c) - Complex64::new(expect, 0.0)).norm());
        }
    }
    res
}

/// Checks `Q^T Q = Id` within `tol`, reporting the max residual either way.
pub fn is_complex_orthogonal(q: &CMatrix, tol: f64) -> (bool, f64) {
    let res = orthogonality_residual(q);
    (res <= tol, res)
}

/// Draws a complex antisymmetric matrix (`A^T = -A`) with entry moduli
/// below `scale`.
pub(crate) fn random_antisymmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> CMatrix {
    let mut a = CMatrix::zeros(n);
    for r in 0..n {
        for c in (r + 1)..n {
            let modulus = scale * rng.random::<f64>();
            let phase = std::f64::consts::TAU * rng.random::<f64>();
            let v = Complex64::from_polar(modulus, phase);
            a.set(r, c, v);
            a.set(c, r, -v);
        }
    }
    a
}

/// Matrix exponential by scaling-and-squaring with a fixed 12-term
/// Taylor series. Adequate for the small, mildly scaled matrices used
/// here; not a general-purpose expm.
pub(crate) fn matrix_exp(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let norm = a.norm_inf();
    let mut squarings = 0u32;
    let mut shrink = 1.0;
    while norm * shrink > 0.25 {
        squarings += 1;
        shrink *= 0.5;
    }
    let b = a.scale(Complex64::new(shrink, 0.0));

    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=12 {
        term = term.mul(&b).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = result.add(&term);
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    result
}

/// Seeded complex orthogonal matrix: `exp(A)` for a random complex
/// antisymmetric `A`. Deterministic per seed. `exp` maps antisymmetric
/// to orthogonal because `exp(A)^T exp(A) = exp(-A) exp(A) = Id`.
///
/// Note this only reaches the identity component (determinant +1);
/// negate a column afterwards for a reflection.
pub fn random_complex_orthogonal(n: usize, seed: u64, scale: f64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_antisymmetric(&mut rng, n, scale);
    matrix_exp(&a)
}

// JSON form: a matrix is a row-major array of rows, each row an array of
// [re, im] pairs.

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.n))?;
        for r in 0..self.n {
            let row: Vec<(f64, f64)> = (0..self.n)
                .map(|c| {
                    let z = self.get(r, c);
                    (z.re, z.im)
                })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

struct CMatrixVisitor;

impl<'de> Visitor<'de> for CMatrixVisitor {
    type Value = CMatrix;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a square row-major array of [re, im] pairs")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<CMatrix, A::Error> {
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        while let Some(row) = seq.next_element::<Vec<(f64, f64)>>()? {
            rows.push(
                row.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            );
        }
        CMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<CMatrix, D::Error> {
        deserializer.deserialize_seq(CMatrixVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_is_orthogonal_with_zero_residual() {
        let (ok, res) = is_complex_orthogonal(&CMatrix::identity(3), 1e-12);
        assert!(ok);
        assert_eq!(res, 0.0);
    }

    #[test]
    fn signed_permutation_is_orthogonal() {
        let q = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let (ok, res) = is_complex_orthogonal(&q, 1e-12);
        assert!(ok, "residual {res}");
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn complex_boost_is_orthogonal() {
        // [[sqrt2, i], [-i, sqrt2]]: by direct multiplication
        // (Q^T Q)_00 = 2 + (-i)(-i) = 1, off-diagonals cancel.
        let s = 2.0_f64.sqrt();
        let q = CMatrix::from_rows(vec![
            vec![c(s, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(s, 0.0)],
        ])
        .unwrap();
        // brute-force product as an independent check
        let mut g = [[c(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for cc in 0..2 {
                for k in 0..2 {
                    g[r][cc] += q.get(k, r) * q.get(k, cc);
                }
            }
        }
        assert!((g[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g[1][1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(g[0][1].norm() < 1e-15);
        assert!(g[1][0].norm() < 1e-15);
        let (ok, res) = is_complex_orthogonal(&q, 1e-12);
        assert!(ok, "residual {res}");
    }

    #[test]
    fn non_square_rows_rejected() {
        let err = CMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(err, Err(Error::NonSquareMatrix { .. })));
    }

    #[test]
    fn random_orthogonal_dim_one_is_unit() {
        let q = random_complex_orthogonal(1, 42, 1.0);
        assert!((q.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_orthogonal_zero_scale_is_identity() {
        let q = random_complex_orthogonal(4, 7, 0.0);
        let mut diff: f64 = 0.0;
        for r in 0..4 {
            for cc in 0..4 {
                let expect = if r == cc { 1.0 } else { 0.0 };
                diff = diff.max((q.get(r, cc) - c(expect, 0.0)).norm());
            }
        }
        assert_eq!(diff, 0.0);
    }

    #[test]
    fn random_orthogonal_passes_residual_check_across_seeds() {
        for n in 1..=6 {
            for seed in 0..20 {
                let q = random_complex_orthogonal(n, seed, 1.0);
                let (ok, res) = is_complex_orthogonal(&q, 1e-10);
                assert!(ok, "n={n} seed={seed} residual={res:.3e}");
            }
        }
    }

    #[test]
    fn random_orthogonal_is_deterministic_per_seed() {
        let a = random_complex_orthogonal(3, 99, 0.8);
        let b = random_complex_orthogonal(3, 99, 0.8);
        assert_eq!(a, b);
        let other = random_complex_orthogonal(3, 100, 0.8);
        assert_ne!(a, other);
    }

    #[test]
    fn matrix_json_roundtrip() {
        let q = random_complex_orthogonal(3, 5, 1.0);
        let s = serde_json::to_string(&q).unwrap();
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(q, back);
    }
}
