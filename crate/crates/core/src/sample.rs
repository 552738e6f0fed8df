//! Seeded samplers shared by the classifier, the probe, and the test
//! suites. All functions are deterministic given the RNG state.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::point::{phi, Point};

/// Modulus floor below which a direction counts as (numerically)
/// isotropic and is rejected before rescaling.
pub const ISOTROPY_REJECT: f64 = 1e-6;

fn uniform<R: Rng>(rng: &mut R, half_width: f64) -> f64 {
    (2.0 * rng.random::<f64>() - 1.0) * half_width
}

/// Point with all real and imaginary parts uniform in `(-half_width, half_width)`.
pub fn point<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Point {
    Point::new(
        (0..n)
            .map(|_| Complex64::new(uniform(rng, half_width), uniform(rng, half_width)))
            .collect(),
    )
}

/// Real point with coordinates uniform in `(-half_width, half_width)`.
pub fn real_point<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Point {
    Point::from_real(&(0..n).map(|_| uniform(rng, half_width)).collect::<Vec<_>>())
}

/// Non-real point: resamples until some coordinate has `|Im| >= min_imag`.
pub fn nonreal_point<R: Rng>(rng: &mut R, n: usize, half_width: f64, min_imag: f64) -> Point {
    loop {
        let p = point(rng, n, half_width);
        if p.max_imag_abs() >= min_imag {
            return p;
        }
    }
}

/// Direction `v` with `phi(v, 0)` equal to `target`, built by drawing a
/// random complex vector and rescaling by `sqrt(target / phi(v, 0))`.
/// Draws with `|phi|` below [`ISOTROPY_REJECT`] are rejected.
pub fn direction_with_phi<R: Rng>(rng: &mut R, n: usize, target: Complex64) -> Result<Point> {
    if target.norm() == 0.0 {
        return Err(Error::ZeroDistance);
    }
    let origin = Point::zero(n);
    for _ in 0..1000 {
        let v = point(rng, n, 1.0);
        let p = phi(&v, &origin).expect("same dimension");
        if p.norm() < ISOTROPY_REJECT {
            continue;
        }
        return Ok(v.scale((target / p).sqrt()));
    }
    Err(Error::IsotropicSampling)
}

/// Pair `(X, Y)` with `phi(X, Y)` equal to `target`.
pub fn pair_with_phi<R: Rng>(
    rng: &mut R,
    n: usize,
    target: Complex64,
    half_width: f64,
) -> Result<(Point, Point)> {
    let x = point(rng, n, half_width);
    let v = direction_with_phi(rng, n, target)?;
    let y = x.add(&v);
    Ok((x, y))
}

/// Pair at unit distance (`phi = 1`).
pub fn unit_pair<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Result<(Point, Point)> {
    pair_with_phi(rng, n, Complex64::new(1.0, 0.0), half_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pairs_hit_the_requested_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            for _ in 0..50 {
                let target = Complex64::new(uniform(&mut rng, 2.0), uniform(&mut rng, 2.0));
                if target.norm() < 0.1 {
                    continue;
                }
                let (x, y) = pair_with_phi(&mut rng, n, target, 2.0).unwrap();
                let got = phi(&x, &y).unwrap();
                assert_abs_diff_eq!(got.re, target.re, epsilon = 1e-10);
                assert_abs_diff_eq!(got.im, target.im, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn nonreal_points_respect_the_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let p = nonreal_point(&mut rng, 3, 2.0, 0.1);
            assert!(p.max_imag_abs() >= 0.1);
        }
    }

    #[test]
    fn zero_target_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(matches!(
            direction_with_phi(&mut rng, 2, Complex64::new(0.0, 0.0)),
            Err(Error::ZeroDistance)
        ));
    }
}
