//! The forcing system that pins the image of a non-real point, and label
//! transport along certified chains.
//!
//! For a map fixing R^n pointwise and preserving the distances realized
//! by the probe family of a non-real `X`, the probe constraints
//! `phi(Y, S_k(t)) = phi(X, S_k(t))` admit exactly two solutions: `X`
//! itself and its componentwise conjugate. [`theorem1_candidates`]
//! reproduces that derivation numerically: evaluating each constraint at
//! two `t` values isolates a linear bracket per coordinate, the
//! `t`-independent part yields one quadratic in the pivot coordinate, and
//! back-substitution produces both solutions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::{phi, Point};
use crate::witness::{probe_family, ChainKind, WitnessChain};
use crate::PSI_LICENSE_THRESHOLD;

/// How far a reconstructed candidate may sit from the input point before
/// the solve is declared failed.
const CANDIDATE_MATCH_TOL: f64 = 1e-6;

/// The two admissible images of a non-real point.
#[derive(Debug, Clone, Serialize)]
pub struct CandidatePair {
    /// Candidate matching the input point.
    pub original: Point,
    /// Candidate matching the componentwise conjugate.
    pub conjugated: Point,
    /// The two pivot-coordinate solutions `y_j`, ordered to match
    /// (`original`, `conjugated`).
    #[serde(serialize_with = "serialize_root_pair")]
    pub pivot_roots: [Complex64; 2],
}

fn serialize_root_pair<S: serde::Serializer>(
    roots: &[Complex64; 2],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for r in roots {
        seq.serialize_element(&(r.re, r.im))?;
    }
    seq.end()
}

/// Solves the probe constraints for the image of `x` using the default
/// evaluation offsets `t0 + 1` and `t0 + 2`.
pub fn theorem1_candidates(x: &Point) -> Result<CandidatePair> {
    theorem1_candidates_with_offsets(x, (1.0, 2.0))
}

/// Same solve with caller-chosen offsets above the threshold `t0`; the
/// result must not depend on them (any two distinct values above `t0`
/// determine the same system).
pub fn theorem1_candidates_with_offsets(x: &Point, offsets: (f64, f64)) -> Result<CandidatePair> {
    if x.is_real() {
        return Err(Error::UnderdeterminedRealPoint);
    }
    let family = probe_family(x)?;
    let j = family.pivot();
    let a = x.real_part();
    let b = x.imag_part();
    let bj = b[j];
    let sum_b2: f64 = b.iter().map(|v| v * v).sum();

    let t1 = family.t0() + offsets.0;
    let t2 = family.t0() + offsets.1;
    if t1 == t2 || offsets.0 <= 0.0 || offsets.1 <= 0.0 {
        return Err(Error::InvalidInput(
            "probe offsets must be distinct and positive".into(),
        ));
    }

    let n = x.dim();
    // Per non-pivot coordinate: the constraint at t reads
    //   sum_i (y_i - a_i)^2 - 2 t [b_k (y_j - a_j) - b_j (y_k - a_k)] = F_k(t)
    // with F_k(t) = phi(x, S_k(t)) - t^2 (b_j^2 + b_k^2). Two t values
    // give the bracket and the t-independent sum of squares.
    let mut brackets = vec![Complex64::new(0.0, 0.0); n];
    let mut square_sum = Complex64::new(0.0, 0.0);
    let mut count = 0.0;
    for k in family.probe_indices() {
        let coeff = bj * bj + b[k] * b[k];
        let f1 = phi(x, &family.probe(k, t1)?)? - Complex64::new(t1 * t1 * coeff, 0.0);
        let f2 = phi(x, &family.probe(k, t2)?)? - Complex64::new(t2 * t2 * coeff, 0.0);
        let bracket = (f1 - f2) / Complex64::new(2.0 * (t2 - t1), 0.0);
        brackets[k] = bracket;
        square_sum += f1 + Complex64::new(2.0 * t1, 0.0) * bracket;
        count += 1.0;
    }
    square_sum /= count;

    // (y_j - a_j)^2 * (sum b^2) / b_j^2 = square_sum, up to the vanishing
    // brackets; the exact value of square_sum is -sum b^2.
    let w_squared = square_sum * Complex64::new(bj * bj / sum_b2, 0.0);
    let w = w_squared.sqrt();

    let build = |root: Complex64| {
        let coords = (0..n)
            .map(|k| {
                if k == j {
                    Complex64::new(a[k], 0.0) + root
                } else {
                    Complex64::new(a[k], 0.0)
                        + (Complex64::new(b[k], 0.0) * root - brackets[k]) / Complex64::new(bj, 0.0)
                }
            })
            .collect();
        Point::new(coords)
    };

    let plus = build(w);
    let minus = build(-w);
    let (original, conjugated, roots) = if plus.dist_inf(x) <= CANDIDATE_MATCH_TOL {
        (plus, minus, [w, -w])
    } else if minus.dist_inf(x) <= CANDIDATE_MATCH_TOL {
        (minus, plus, [-w, w])
    } else {
        return Err(Error::CandidateMismatch);
    };
    let aj = Complex64::new(a[j], 0.0);
    Ok(CandidatePair {
        original,
        conjugated,
        pivot_roots: [aj + roots[0], aj + roots[1]],
    })
}

/// Worst violation of the probe constraints by a proposed image `y`:
/// `max |phi(y, S_k(t)) - phi(x, S_k(t))|` over all probe coordinates and
/// the given `t` values. Vanishes exactly when `y` is `x` or its
/// conjugate.
pub fn forcing_residual(x: &Point, y: &Point, t_values: &[f64]) -> Result<f64> {
    if y.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let family = probe_family(x)?;
    let mut worst: f64 = 0.0;
    for k in family.probe_indices() {
        for &t in t_values {
            let s = family.probe(k, t)?;
            let r = (phi(y, &s)? - phi(x, &s)?).norm();
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Membership label transported along chains: a point is either fixed by
/// the map or sent to its componentwise conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "fixed")]
    Fixed,
    #[serde(rename = "conjugated")]
    Conjugated,
}

/// Per-edge record of the certificate that licensed a transport step.
#[derive(Debug, Clone, Serialize)]
pub struct PropagationStep {
    pub edge: usize,
    #[serde(serialize_with = "serialize_cpx")]
    pub phi: Complex64,
    pub psi: f64,
}

fn serialize_cpx<S: serde::Serializer>(
    z: &Complex64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    (z.re, z.im).serialize(s)
}

/// Result of transporting a label along a whole chain.
#[derive(Debug, Clone, Serialize)]
pub struct Propagation {
    /// Label for the chain head, equal to the label given for the tail.
    pub label: Label,
    pub steps: Vec<PropagationStep>,
}

/// Transports a membership label from the chain tail to the chain head.
///
/// Each edge must carry `phi = 1` and a nonzero imaginary pairing; both
/// conditions are recomputed here and an edge that fails the `psi`
/// condition aborts with a "propagation not licensed" error naming it.
/// The certificates are symmetric in the edge endpoints, so one licensed
/// edge transports the label in either direction; the returned label is
/// therefore always the input label, with the per-edge certificates as
/// the evidence.
pub fn propagate_label(chain: &WitnessChain, end_label: Label) -> Result<Propagation> {
    propagate_label_with_tol(chain, end_label, crate::DEFAULT_DISTANCE_TOL)
}

pub fn propagate_label_with_tol(
    chain: &WitnessChain,
    end_label: Label,
    tol: f64,
) -> Result<Propagation> {
    if chain.kind != ChainKind::Lemma4Chain {
        return Err(Error::WrongChainKind {
            expected: ChainKind::Lemma4Chain,
            found: chain.kind,
        });
    }
    let mut steps = Vec::with_capacity(chain.points.len().saturating_sub(1));
    for (edge, pair) in chain.points.windows(2).enumerate() {
        let phi_v = phi(&pair[0], &pair[1])?;
        let psi_v = crate::point::psi(&pair[0], &pair[1])?;
        let residual = (phi_v - Complex64::new(1.0, 0.0)).norm();
        if residual > tol {
            return Err(Error::InvalidInput(format!(
                "edge {edge} has |phi - 1| = {residual:.3e}, not a unit edge"
            )));
        }
        if psi_v.abs() <= PSI_LICENSE_THRESHOLD {
            return Err(Error::PropagationNotLicensed {
                edge,
                psi: psi_v.abs(),
            });
        }
        steps.push(PropagationStep {
            edge,
            phi: phi_v,
            psi: psi_v,
        });
    }
    Ok(Propagation {
        label: end_label,
        steps,
    })
}
