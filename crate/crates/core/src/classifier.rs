//! Decides whether a map description is (numerically) a distance
//! preserver and decomposes it into the canonical semi-affine form, or
//! produces a concrete falsifying pair.
//!
//! The standing hypothesis is full preservation of positive distances:
//! continuity of an arbitrary map description is not decidable
//! numerically, so the classifier checks the consequences of the
//! hypothesis instead — an affine-orthogonal real restriction, the
//! two-valued dichotomy at the anchor `(i, ..., i)`, and the phi law on
//! sampled validation pairs.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::maps::{apply_map, AffineOrthogonalMap, MapSpec, RhoTag};
use crate::matrix::{orthogonality_residual, CMatrix};
use crate::point::{conjugate_point, phi, Point};
use crate::sample;
use crate::witness::probe_family;

/// Tolerance for matching a probed image against its two candidate
/// positions. Deliberately far looser than the distance tolerance: for a
/// genuine semi-affine map the match error is rounding-level, and for
/// anything else it is macroscopic.
const RHO_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Distance tolerance: `|phi - expected|` on validation pairs.
    pub tol: f64,
    /// Orthogonality tolerance for the fitted linear part.
    pub ortho_tol: f64,
    /// Number of validation points and pairs to sample.
    pub validation_count: usize,
    /// Seed for the validation sampler.
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            tol: crate::DEFAULT_DISTANCE_TOL,
            ortho_tol: crate::DEFAULT_ORTHO_TOL,
            validation_count: 256,
            seed: 0,
        }
    }
}

/// A concrete pair falsifying distance preservation: `phi(x, y)` is the
/// preserved quantity (`expected`), the image pair produced `observed`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub x: Point,
    pub y: Point,
    pub expected_phi: Complex64,
    pub observed_phi: Complex64,
}

impl Witness {
    pub fn mismatch(&self) -> f64 {
        (self.observed_phi - self.expected_phi).norm()
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Witness", 4)?;
        st.serialize_field("x", &self.x)?;
        st.serialize_field("y", &self.y)?;
        st.serialize_field(
            "expected_phi",
            &(self.expected_phi.re, self.expected_phi.im),
        )?;
        st.serialize_field(
            "observed_phi",
            &(self.observed_phi.re, self.observed_phi.im),
        )?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub ortho_residual: f64,
    pub fit_residual: f64,
    pub probe_residual: f64,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Rigid {
        rho: RhoTag,
        outer: AffineOrthogonalMap,
    },
    NotRigid {
        witness: Witness,
    },
}

impl Verdict {
    pub fn is_rigid(&self) -> bool {
        matches!(self, Verdict::Rigid { .. })
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub residuals: Residuals,
    /// Number of probe evaluations behind the verdict: the anchor probe
    /// plus every validation point and pair.
    pub probes_used: usize,
}

impl Serialize for ClassificationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ClassificationReport", 6)?;
        st.serialize_field("kind", "classification")?;
        match &self.verdict {
            Verdict::Rigid { rho, outer } => {
                st.serialize_field("verdict", "rigid")?;
                st.serialize_field("rho", rho)?;
                st.serialize_field("q", outer.q())?;
                st.serialize_field("b", outer.b())?;
            }
            Verdict::NotRigid { witness } => {
                st.serialize_field("verdict", "not_rigid")?;
                st.serialize_field("witness", witness)?;
            }
        }
        st.serialize_field("residuals", &self.residuals)?;
        st.serialize_field("probes_used", &self.probes_used)?;
        st.end()
    }
}

/// Map evaluation access for the classifier: either a spec directly, or
/// a spec conjugated by the scaling `X -> f(dX)/d` that turns a
/// d-distance preserver into a unit-distance preserver.
enum Evaluator<'a> {
    Spec(&'a MapSpec),
    Scaled { spec: &'a MapSpec, d: Complex64 },
}

impl Evaluator<'_> {
    fn eval(&self, x: &Point) -> Result<Point> {
        match self {
            Evaluator::Spec(spec) => apply_map(spec, x),
            Evaluator::Scaled { spec, d } => {
                let inv = Complex64::new(1.0, 0.0) / d;
                Ok(apply_map(spec, &x.scale(*d))?.scale(inv))
            }
        }
    }
}

/// Fits the affine-orthogonal map agreeing with `f` on the real points
/// `0, e_1, ..., e_n`: the translation is `f(0)` and the k-th column of
/// the linear part is `f(e_k) - f(0)`.
pub struct RealRestrictionFit {
    pub map: AffineOrthogonalMap,
    pub ortho_residual: f64,
    /// Largest deviation of `f(e_j + e_k)` from the affine prediction.
    pub affinity_residual: f64,
}

/// Public fitting operation. Fails when the fitted linear part is not
/// complex orthogonal within `ortho_tol`, or when the affinity
/// spot-check `f(e_j + e_k) = f(0) + q e_j + q e_k` fails.
pub fn fit_real_restriction(f: &MapSpec, n: usize, ortho_tol: f64) -> Result<RealRestrictionFit> {
    fit_restriction(&Evaluator::Spec(f), n, ortho_tol)
}

fn fit_restriction(eval: &Evaluator, n: usize, ortho_tol: f64) -> Result<RealRestrictionFit> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, required: 1 });
    }
    let b = eval.eval(&Point::zero(n))?;
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.dim(),
        });
    }
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let fe = eval.eval(&Point::basis(n, k))?;
        columns.push(fe.sub(&b).coords().to_vec());
    }
    let q = CMatrix::from_columns(columns)?;
    let ortho_residual = orthogonality_residual(&q);
    if ortho_residual > ortho_tol {
        return Err(Error::RealRestrictionNotOrthogonal {
            residual: ortho_residual,
        });
    }

    let map = AffineOrthogonalMap::new_unchecked(q, b);
    let mut affinity_residual: f64 = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            let p = Point::basis(n, j).add(&Point::basis(n, k));
            let predicted = map.apply(&p)?;
            let actual = eval.eval(&p)?;
            let deviation = predicted.dist_inf(&actual);
            affinity_residual = affinity_residual.max(deviation);
            if deviation > ortho_tol {
                return Err(Error::NotAffineOnReals { j, k, deviation });
            }
        }
    }
    Ok(RealRestrictionFit {
        map,
        ortho_residual,
        affinity_residual,
    })
}

/// Candidate falsifying pairs for a map under the positive-distance
/// hypothesis; every pair carries a real positive `phi`. Returns the pair
/// with the worst mismatch and the mismatch value.
fn witness_battery(
    eval: &Evaluator,
    n: usize,
    focus: Option<&Point>,
    rng: &mut ChaCha8Rng,
    unit_pairs: usize,
) -> Result<(Witness, f64)> {
    let mut pairs: Vec<(Point, Point)> = Vec::new();
    let zero = Point::zero(n);
    for k in 0..n {
        pairs.push((zero.clone(), Point::basis(n, k)));
    }
    for j in 0..n {
        for k in (j + 1)..n {
            pairs.push((Point::basis(n, j), Point::basis(n, k)));
        }
    }
    if let Some(x) = focus {
        if !x.is_real() && n >= 2 {
            let family = probe_family(x)?;
            for k in family.probe_indices() {
                for dt in [1.0, 2.0] {
                    pairs.push((x.clone(), family.probe(k, family.t0() + dt)?));
                }
            }
        }
    }
    for _ in 0..unit_pairs {
        pairs.push(sample::unit_pair(rng, n, 2.0)?);
    }

    let mut best: Option<Witness> = None;
    for (x, y) in pairs {
        let expected = phi(&x, &y)?;
        let observed = phi(&eval.eval(&x)?, &eval.eval(&y)?)?;
        let w = Witness {
            x,
            y,
            expected_phi: expected,
            observed_phi: observed,
        };
        if best.as_ref().is_none_or(|b| w.mismatch() > b.mismatch()) {
            best = Some(w);
        }
    }
    let best = best.expect("battery is never empty");
    let mismatch = best.mismatch();
    Ok((best, mismatch))
}

fn not_rigid(
    witness: Witness,
    ortho_residual: f64,
    fit_residual: f64,
    probes_used: usize,
) -> ClassificationReport {
    let probe_residual = witness.mismatch();
    ClassificationReport {
        verdict: Verdict::NotRigid { witness },
        residuals: Residuals {
            ortho_residual,
            fit_residual,
            probe_residual,
        },
        probes_used,
    }
}

/// Classifies a unit-distance preserving map of C^n, `n >= 2`.
///
/// Fits the real restriction `I`, probes `g = I^{-1} . f` at the anchor
/// `(i, ..., i)` — `g` must send it to itself or to `(-i, ..., -i)`,
/// which selects the componentwise factor — then validates the choice on
/// random points and random unit-distance pairs.
pub fn classify_unit(
    f: &MapSpec,
    n: usize,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    if n == 1 {
        return Err(Error::UseDim1Classifier);
    }
    let report = classify_core(&Evaluator::Spec(f), n, opts)?;
    Ok(report)
}

fn classify_core(
    eval: &Evaluator,
    n: usize,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, required: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut probes_used = 1usize;

    let fit = match fit_restriction(eval, n, opts.ortho_tol) {
        Ok(fit) => fit,
        Err(Error::RealRestrictionNotOrthogonal { residual }) => {
            let (witness, _) = witness_battery(eval, n, None, &mut rng, opts.validation_count)?;
            return Ok(not_rigid(witness, residual, 0.0, probes_used));
        }
        Err(Error::NotAffineOnReals { deviation, .. }) => {
            let (witness, _) = witness_battery(eval, n, None, &mut rng, opts.validation_count)?;
            return Ok(not_rigid(witness, 0.0, deviation, probes_used));
        }
        Err(e) => return Err(e),
    };

    // anchor probe: the image of (i, ..., i) under g = I^{-1} . f decides rho
    let anchor = Point::all_i(n);
    let g_anchor = fit.map.apply_inverse(&eval.eval(&anchor)?)?;
    let mut probe_residual;
    let rho = if g_anchor.dist_inf(&anchor) <= RHO_MATCH_TOL {
        probe_residual = g_anchor.dist_inf(&anchor);
        RhoTag::Identity
    } else if g_anchor.dist_inf(&conjugate_point(&anchor)) <= RHO_MATCH_TOL {
        probe_residual = g_anchor.dist_inf(&conjugate_point(&anchor));
        RhoTag::Conjugation
    } else {
        let (witness, _) =
            witness_battery(eval, n, Some(&anchor), &mut rng, opts.validation_count)?;
        return Ok(not_rigid(
            witness,
            fit.ortho_residual,
            fit.affinity_residual,
            probes_used,
        ));
    };

    // validation: random points must follow the chosen rho ...
    for _ in 0..opts.validation_count {
        probes_used += 1;
        let x = sample::point(&mut rng, n, 2.0);
        let gx = fit.map.apply_inverse(&eval.eval(&x)?)?;
        let mismatch = gx.dist_inf(&rho.apply(&x));
        probe_residual = probe_residual.max(mismatch);
        if mismatch > RHO_MATCH_TOL {
            let (witness, _) = witness_battery(eval, n, Some(&x), &mut rng, 64)?;
            return Ok(not_rigid(
                witness,
                fit.ortho_residual,
                fit.affinity_residual,
                probes_used,
            ));
        }
    }
    // ... and random unit pairs must keep phi = 1
    for _ in 0..opts.validation_count {
        probes_used += 1;
        let (x, y) = sample::unit_pair(&mut rng, n, 2.0)?;
        let observed = phi(&eval.eval(&x)?, &eval.eval(&y)?)?;
        let deviation = (observed - Complex64::new(1.0, 0.0)).norm();
        probe_residual = probe_residual.max(deviation);
        if deviation > opts.tol {
            let witness = Witness {
                x,
                y,
                expected_phi: Complex64::new(1.0, 0.0),
                observed_phi: observed,
            };
            return Ok(not_rigid(
                witness,
                fit.ortho_residual,
                fit.affinity_residual,
                probes_used,
            ));
        }
    }

    Ok(ClassificationReport {
        verdict: Verdict::Rigid {
            rho,
            outer: fit.map,
        },
        residuals: Residuals {
            ortho_residual: fit.ortho_residual,
            fit_residual: fit.affinity_residual,
            probe_residual,
        },
        probes_used,
    })
}

/// Classifies a map preserving one nonzero complex distance `d`.
///
/// The rescaled map `h(X) = f(dX)/d` preserves unit distance (the form
/// is quadratic under scaling), so it is classified by the unit-distance
/// route and the result is mapped back: identity stays identity, while
/// conjugation becomes the scaled conjugation with parameter `d`, and
/// the translation rescales by `d`. A falsifying pair rescales by `d` in
/// position, with its phi values recomputed against `f` directly so that
/// re-evaluating the witness reproduces the report bit for bit.
pub fn classify_distance_d(
    f: &MapSpec,
    n: usize,
    d: Complex64,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    if d.norm() == 0.0 {
        return Err(Error::ZeroDistance);
    }
    if n == 1 {
        return Err(Error::UseDim1Classifier);
    }
    let eval = Evaluator::Scaled { spec: f, d };
    let mut report = classify_core(&eval, n, opts)?;

    report = match report.verdict {
        Verdict::Rigid { rho, outer } => {
            let rho = match rho {
                RhoTag::Identity => RhoTag::Identity,
                RhoTag::Conjugation => RhoTag::ScaledConjugation(d),
                scaled @ RhoTag::ScaledConjugation(_) => scaled,
            };
            let outer = AffineOrthogonalMap::new_unchecked(outer.q().clone(), outer.b().scale(d));
            ClassificationReport {
                verdict: Verdict::Rigid { rho, outer },
                ..report
            }
        }
        Verdict::NotRigid { witness } => {
            let x = witness.x.scale(d);
            let y = witness.y.scale(d);
            let expected_phi = phi(&x, &y)?;
            let observed_phi = phi(&apply_map(f, &x)?, &apply_map(f, &y)?)?;
            let witness = Witness {
                x,
                y,
                expected_phi,
                observed_phi,
            };
            let mut residuals = report.residuals.clone();
            residuals.probe_residual = residuals.probe_residual.max(witness.mismatch());
            ClassificationReport {
                verdict: Verdict::NotRigid { witness },
                residuals,
                ..report
            }
        }
    };

    // extra validation on pairs at the preserved distance itself
    if let Verdict::Rigid { .. } = report.verdict {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
        let d2 = d * d;
        let pair_tol = opts.tol * d2.norm().max(1.0);
        for _ in 0..opts.validation_count {
            report.probes_used += 1;
            let (x, y) = sample::pair_with_phi(&mut rng, n, d2, 2.0)?;
            let observed = phi(&apply_map(f, &x)?, &apply_map(f, &y)?)?;
            let deviation = (observed - d2).norm();
            report.residuals.probe_residual = report.residuals.probe_residual.max(deviation);
            if deviation > pair_tol {
                let witness = Witness {
                    x,
                    y,
                    expected_phi: d2,
                    observed_phi: observed,
                };
                let residuals = report.residuals.clone();
                return Ok(ClassificationReport {
                    verdict: Verdict::NotRigid { witness },
                    residuals,
                    probes_used: report.probes_used,
                });
            }
        }
    }
    Ok(report)
}

/// Whether the scaled conjugation with parameter `d1` preserves the
/// distance `d2`: exactly when `d1^2 / d2^2` is real (within 1e-12).
pub fn tau_d_preserves(d1: Complex64, d2: Complex64) -> Result<bool> {
    if d1.norm() == 0.0 || d2.norm() == 0.0 {
        return Err(Error::ZeroDistance);
    }
    let ratio = (d1 * d1) / (d2 * d2);
    Ok(ratio.im.abs() <= 1e-12)
}

/// One-dimensional classification, where the hypothesis is preservation
/// of every *real* squared distance (positive and negative): fits
/// `q = f(1) - f(0)` with `q^2 = 1`, probes at `i` for the componentwise
/// factor, and validates on pairs with real and purely imaginary
/// differences.
pub fn classify_dim1(f: &MapSpec, opts: &ClassifyOptions) -> Result<ClassificationReport> {
    if let Some(dim) = f.dim() {
        if dim != 1 {
            return Err(Error::DimensionMismatch {
                left: 1,
                right: dim,
            });
        }
    }
    let eval = Evaluator::Spec(f);
    let one = Complex64::new(1.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut probes_used = 2usize;

    let b = eval.eval(&Point::zero(1))?.coords()[0];
    let q = eval.eval(&Point::basis(1, 0))?.coords()[0] - b;
    let ortho_residual = (q * q - one).norm();
    if ortho_residual > opts.ortho_tol {
        let witness = Witness {
            x: Point::basis(1, 0),
            y: Point::zero(1),
            expected_phi: one,
            observed_phi: q * q,
        };
        return Ok(not_rigid(witness, ortho_residual, 0.0, probes_used));
    }
    let outer = AffineOrthogonalMap::new_unchecked(
        CMatrix::from_rows(vec![vec![q]]).expect("1x1"),
        Point::new(vec![b]),
    );

    // affinity spot-check on the real axis: f(2) against b + 2q
    let predicted_two = b + q + q;
    let fit_residual = (eval.eval(&Point::from_real(&[2.0]))?.coords()[0] - predicted_two).norm();
    if fit_residual > opts.ortho_tol {
        let (witness, _) = dim1_battery(&eval, &mut rng, opts.validation_count)?;
        return Ok(not_rigid(
            witness,
            ortho_residual,
            fit_residual,
            probes_used,
        ));
    }

    let anchor = Point::all_i(1);
    let g_anchor = (eval.eval(&anchor)?.coords()[0] - b) / q;
    let i = Complex64::new(0.0, 1.0);
    let mut probe_residual;
    let rho = if (g_anchor - i).norm() <= RHO_MATCH_TOL {
        probe_residual = (g_anchor - i).norm();
        RhoTag::Identity
    } else if (g_anchor + i).norm() <= RHO_MATCH_TOL {
        probe_residual = (g_anchor + i).norm();
        RhoTag::Conjugation
    } else {
        let (witness, _) = dim1_battery(&eval, &mut rng, opts.validation_count)?;
        return Ok(not_rigid(
            witness,
            ortho_residual,
            fit_residual,
            probes_used,
        ));
    };

    // validation on real-phi pairs: real offsets (phi > 0), purely
    // imaginary offsets (phi < 0), and real base points with real offsets
    for _ in 0..opts.validation_count {
        probes_used += 3;
        let x = sample::point(&mut rng, 1, 2.0);
        let r = 0.2 + 1.8 * rng.random::<f64>();
        let s = 0.2 + 1.8 * rng.random::<f64>();
        let xr = sample::real_point(&mut rng, 1, 2.0);
        let cases = [
            (x.clone(), x.sub(&Point::from_real(&[r]))),
            (x.clone(), x.sub(&Point::new(vec![Complex64::new(0.0, s)]))),
            (xr.clone(), xr.sub(&Point::from_real(&[r]))),
        ];
        for (px, py) in cases {
            let expected = phi(&px, &py)?;
            let observed = phi(&eval.eval(&px)?, &eval.eval(&py)?)?;
            let deviation = (observed - expected).norm();
            probe_residual = probe_residual.max(deviation);
            if deviation > opts.tol * expected.norm().max(1.0) {
                let witness = Witness {
                    x: px,
                    y: py,
                    expected_phi: expected,
                    observed_phi: observed,
                };
                return Ok(not_rigid(
                    witness,
                    ortho_residual,
                    fit_residual,
                    probes_used,
                ));
            }
        }
        // the pointwise law g(x) = rho(x)
        let gx = (eval.eval(&x)?.coords()[0] - b) / q;
        let target = rho.apply_scalar(x.coords()[0]);
        let mismatch = (gx - target).norm();
        probe_residual = probe_residual.max(mismatch);
        if mismatch > RHO_MATCH_TOL {
            let (witness, _) = dim1_battery(&eval, &mut rng, opts.validation_count)?;
            return Ok(not_rigid(
                witness,
                ortho_residual,
                fit_residual,
                probes_used,
            ));
        }
    }

    Ok(ClassificationReport {
        verdict: Verdict::Rigid { rho, outer },
        residuals: Residuals {
            ortho_residual,
            fit_residual,
            probe_residual,
        },
        probes_used,
    })
}

/// Candidate falsifying pairs in dimension one. All pairs have real phi:
/// real differences give positive values, purely imaginary differences
/// give negative ones — the latter are exactly the pairs that defeat the
/// shift-by-imaginary-part counterexample.
fn dim1_battery(eval: &Evaluator, rng: &mut ChaCha8Rng, count: usize) -> Result<(Witness, f64)> {
    let mut pairs: Vec<(Point, Point)> = vec![
        (Point::all_i(1), Point::zero(1)),
        (Point::basis(1, 0), Point::zero(1)),
        (Point::from_real(&[2.0]), Point::zero(1)),
        (Point::from_real(&[2.0]), Point::basis(1, 0)),
    ];
    for _ in 0..count {
        let x = sample::point(rng, 1, 2.0);
        let r = 0.2 + 1.8 * rng.random::<f64>();
        if rng.random::<bool>() {
            pairs.push((x.clone(), x.sub(&Point::from_real(&[r]))));
        } else {
            pairs.push((x.clone(), x.sub(&Point::new(vec![Complex64::new(0.0, r)]))));
        }
    }
    let mut best: Option<Witness> = None;
    for (x, y) in pairs {
        let expected = phi(&x, &y)?;
        let observed = phi(&eval.eval(&x)?, &eval.eval(&y)?)?;
        let w = Witness {
            x,
            y,
            expected_phi: expected,
            observed_phi: observed,
        };
        if best.as_ref().is_none_or(|b| w.mismatch() > b.mismatch()) {
            best = Some(w);
        }
    }
    let best = best.expect("battery is never empty");
    let mismatch = best.mismatch();
    Ok((best, mismatch))
}
