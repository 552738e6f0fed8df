//! Explicit point configurations with checkable certificates.
//!
//! Three kinds of chains are constructed here:
//!
//! - real unit chains: finite sequences of real points with consecutive
//!   Euclidean distance exactly 1, joining any two real endpoints;
//! - lifted complex chains: unit-phi chains from an arbitrary non-real
//!   point to the anchor `(i, ..., i)` whose every edge also has a
//!   nonzero imaginary pairing, so each edge licenses label transport;
//! - real-avoiding paths: polylines from the anchor to an arbitrary
//!   non-real point that stay inside `C^n \ R^n`.
//!
//! Every constructor records per-edge `(phi, psi)` certificates, and
//! [`verify_chain`] recomputes everything from the points alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{phi, psi, Point};

/// Number of interior samples per segment when certifying that a path
/// avoids R^n. The sample grid has an even denominator so that rational
/// crossings like the segment midpoint are actually probed.
const SEGMENT_SAMPLES: usize = 129;
const SEGMENT_DENOMINATOR: usize = SEGMENT_SAMPLES + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainKind {
    #[serde(rename = "real_unit_chain")]
    RealUnitChain,
    #[serde(rename = "lemma4_chain")]
    Lemma4Chain,
    #[serde(rename = "lemma5_path")]
    Lemma5Path,
}

impl std::fmt::Display for ChainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        let s = match self {
            ChainKind::RealUnitChain => "real_unit_chain",
            ChainKind::Lemma4Chain => "lemma4_chain",
            ChainKind::Lemma5Path => "lemma5_path",
        };
        f.write_str(s)
    }
}

/// Certificate for one consecutive pair of chain points.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCertificate {
    pub phi: Complex64,
    pub psi: f64,
}

impl Serialize for EdgeCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EdgeCertificate", 2)?;
        st.serialize_field("phi", &(self.phi.re, self.phi.im))?;
        st.serialize_field("psi", &self.psi)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for EdgeCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<EdgeCertificate, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            phi: (f64, f64),
            psi: f64,
        }
        let r = Repr::deserialize(d)?;
        Ok(EdgeCertificate {
            phi: Complex64::new(r.phi.0, r.phi.1),
            psi: r.psi,
        })
    }
}

/// An ordered list of points with per-edge certificates and a kind tag
/// that selects which invariants [`verify_chain`] enforces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessChain {
    pub kind: ChainKind,
    pub points: Vec<Point>,
    pub certificates: Vec<EdgeCertificate>,
}

impl WitnessChain {
    /// Assembles a chain, computing the edge certificates from the
    /// points.
    pub fn assemble(kind: ChainKind, points: Vec<Point>) -> Result<WitnessChain> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(
                "a chain needs at least two points".into(),
            ));
        }
        let mut certificates = Vec::with_capacity(points.len() - 1);
        for pair in points.windows(2) {
            certificates.push(EdgeCertificate {
                phi: phi(&pair[0], &pair[1])?,
                psi: psi(&pair[0], &pair[1])?,
            });
        }
        Ok(WitnessChain {
            kind,
            points,
            certificates,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Interior point count for a real unit chain `S, P_1..P_m, T`.
    pub fn interior_len(&self) -> usize {
        self.points.len().saturating_sub(2)
    }
}

/// Index of the imaginary pivot: the coordinate with the largest `|Im|`,
/// ties resolved to the smallest index. Errors when the point is real.
pub fn imaginary_pivot(x: &Point) -> Result<usize> {
    let im = x.imag_part();
    let mut best = 0usize;
    let mut best_abs = 0.0f64;
    for (k, b) in im.iter().enumerate() {
        if b.abs() > best_abs {
            best_abs = b.abs();
            best = k;
        }
    }
    if best_abs == 0.0 {
        return Err(Error::NoImaginaryPivot);
    }
    Ok(best)
}

/// The family of real probe points attached to a non-real base point.
///
/// For a base `X = a + b i` with pivot `j`, the probe `S_k(t)` (for
/// `k != j`, real `t`) is the real point with coordinates
///
/// ```text
/// s_j = a_j + t b_k,   s_k = a_k - t b_j,   s_i = a_i otherwise,
/// ```
///
/// which satisfies `phi(X, S_k(t)) = t^2 (b_j^2 + b_k^2) - sum_i b_i^2`;
/// the value is nonnegative from the threshold `t0 = sqrt(sum b_i^2 / b_j^2)`
/// on. Because the pivot maximizes `|b_i|`, `t0 <= sqrt(n)` always.
#[derive(Debug, Clone)]
pub struct ProbeFamily {
    base: Point,
    pivot: usize,
    t0: f64,
}

impl ProbeFamily {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Probe indices: every coordinate except the pivot.
    pub fn probe_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let pivot = self.pivot;
        (0..self.base.dim()).filter(move |&k| k != pivot)
    }

    /// The real probe point `S_k(t)`.
    pub fn probe(&self, k: usize, t: f64) -> Result<Point> {
        let n = self.base.dim();
        if k >= n || k == self.pivot {
            return Err(Error::InvalidInput(format!(
                "probe index {k} invalid for pivot {} in dimension {n}",
                self.pivot
            )));
        }
        let a = self.base.real_part();
        let b = self.base.imag_part();
        let mut s = a.clone();
        s[self.pivot] = a[self.pivot] + t * b[k];
        s[k] = a[k] - t * b[self.pivot];
        Ok(Point::from_real(&s))
    }
}

/// Builds the probe family of a non-real point (`n >= 2`).
pub fn probe_family(x: &Point) -> Result<ProbeFamily> {
    if x.dim() < 2 {
        return Err(Error::DimensionTooSmall {
            n: x.dim(),
            required: 2,
        });
    }
    let pivot = imaginary_pivot(x)?;
    let b = x.imag_part();
    let sum_b2: f64 = b.iter().map(|v| v * v).sum();
    let t0 = (sum_b2 / (b[pivot] * b[pivot])).sqrt();
    Ok(ProbeFamily {
        base: x.clone(),
        pivot,
        t0,
    })
}

/// Chains two real points through real points at consecutive unit
/// distance: returns `S, P_1, ..., P_m, T` with every consecutive
/// Euclidean distance 1 and `m >= 1`, even when `S = T`.
///
/// Waypoints are placed along the segment at spacing at most 2 and each
/// waypoint pair is bridged through an apex at unit distance from both.
pub fn unit_chain(s: &Point, t: &Point) -> Result<WitnessChain> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: t.dim(),
        });
    }
    let n = s.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, required: 2 });
    }
    if !s.is_real() || !t.is_real() {
        return Err(Error::InvalidInput(
            "unit chain endpoints must be real".into(),
        ));
    }

    let sv = s.real_part();
    let tv = t.real_part();
    let diff: Vec<f64> = tv.iter().zip(&sv).map(|(a, b)| a - b).collect();
    let length = diff.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut points: Vec<Vec<f64>> = vec![sv.clone()];
    if length == 0.0 {
        // out and back through a single apex
        let mut apex = sv.clone();
        apex[0] += 1.0;
        points.push(apex);
        points.push(tv);
    } else {
        let unit: Vec<f64> = diff.iter().map(|v| v / length).collect();
        let segments = (length / 2.0).ceil() as usize;
        let mut waypoints: Vec<Vec<f64>> = Vec::with_capacity(segments + 1);
        for i in 0..=segments {
            let along = (2.0 * i as f64).min(length);
            waypoints.push(sv.iter().zip(&unit).map(|(p, u)| p + along * u).collect());
        }
        *waypoints.last_mut().unwrap() = tv;
        for w in waypoints.windows(2) {
            points.push(apex_between(&w[0], &w[1]));
            points.push(w[1].clone());
        }
    }

    WitnessChain::assemble(
        ChainKind::RealUnitChain,
        points.into_iter().map(|p| Point::from_real(&p)).collect(),
    )
}

/// Apex at unit distance from both `p` and `q`, which must be at most 2
/// apart: the midpoint offset by `sqrt(1 - r^2/4)` along a deterministic
/// unit direction orthogonal to `q - p`.
fn apex_between(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len();
    let diff: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let r = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    debug_assert!(r <= 2.0 + 1e-9);
    let height = (1.0 - r * r / 4.0).max(0.0).sqrt();
    let dir = orthogonal_direction(&diff, r);
    (0..n)
        .map(|i| (p[i] + q[i]) / 2.0 + height * dir[i])
        .collect()
}

/// First standard basis vector not (nearly) parallel to `v`, made exactly
/// orthogonal by one Gram-Schmidt step. For `v = 0` returns `e_0`.
fn orthogonal_direction(v: &[f64], norm: f64) -> Vec<f64> {
    let n = v.len();
    if norm == 0.0 {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        return e;
    }
    let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
    // at most one coordinate of a unit vector can have square > 3/4
    let idx = (0..n)
        .find(|&i| unit[i] * unit[i] <= 0.75)
        .expect("n >= 2 guarantees a non-parallel basis vector");
    let proj = unit[idx];
    let mut dir: Vec<f64> = unit.iter().map(|u| -proj * u).collect();
    dir[idx] += 1.0;
    let dn = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|x| *x /= dn);
    dir
}

/// The lifted chain from a non-real point `X` to the anchor `(i, ..., i)`.
///
/// With `X = a + b i` and pivot `j`, the chain is
///
/// ```text
/// X_1 = X,
/// X_2 = a + (shift + b_j i) e_j          with shift = sqrt(1 + sum_{k != j} b_k^2),
/// X_3 = S + i e_j, ..., X_{m+4} = T + i e_j   (a real unit chain from S to T, lifted),
/// X_{m+5} = (i, ..., i),
/// ```
///
/// where `S` places `a_j + shift` at the pivot and `a_k + sqrt((1 + (b_j - 1)^2)/(n - 1))`
/// elsewhere, and `T = sqrt(n) e_j`. Every consecutive `phi` equals 1 and
/// the consecutive `psi` values are `b_j^2, b_j, 1, ..., 1` — all nonzero,
/// so every edge licenses label transport.
pub fn lemma4_chain(x: &Point) -> Result<WitnessChain> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, required: 2 });
    }
    let j = imaginary_pivot(x)?;
    let a = x.real_part();
    let b = x.imag_part();
    let bj = b[j];

    let sum_b2_off_pivot: f64 = b
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != j)
        .map(|(_, v)| v * v)
        .sum();
    let shift = (1.0 + sum_b2_off_pivot).sqrt();
    let side = ((1.0 + (bj - 1.0) * (bj - 1.0)) / (n as f64 - 1.0)).sqrt();

    let mut s_coords = vec![0.0; n];
    let mut t_coords = vec![0.0; n];
    for k in 0..n {
        if k == j {
            s_coords[k] = a[k] + shift;
            t_coords[k] = (n as f64).sqrt();
        } else {
            s_coords[k] = a[k] + side;
        }
    }
    let s = Point::from_real(&s_coords);
    let t = Point::from_real(&t_coords);

    let mut x2 = Point::from_real(&a).coords().to_vec();
    x2[j] = Complex64::new(a[j] + shift, bj);

    let lift = |p: &Point| {
        let mut coords = p.coords().to_vec();
        coords[j] += Complex64::new(0.0, 1.0);
        Point::new(coords)
    };

    let real_chain = unit_chain(&s, &t)?;
    let mut points = Vec::with_capacity(real_chain.len() + 3);
    points.push(x.clone());
    points.push(Point::new(x2));
    points.extend(real_chain.points.iter().map(lift));
    points.push(Point::all_i(n));

    WitnessChain::assemble(ChainKind::Lemma4Chain, points)
}

/// Polyline from the anchor `(i, ..., i)` to a non-real `X` that avoids
/// R^n: the waypoint is `sign(b_j) i e_j` for the pivot `j` of `X`.
pub fn lemma5_path(x: &Point) -> Result<WitnessChain> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, required: 2 });
    }
    let j = imaginary_pivot(x)?;
    let sign = x.coords()[j].im.signum();
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    y[j] = Complex64::new(0.0, sign);
    WitnessChain::assemble(
        ChainKind::Lemma5Path,
        vec![Point::all_i(n), Point::new(y), x.clone()],
    )
}

/// Per-edge verification record. `phi` and `psi` are recomputed from the
/// points, never read from the stored certificates.
#[derive(Debug, Clone, Serialize)]
pub struct EdgeReport {
    pub index: usize,
    #[serde(with = "cpx_pair")]
    pub phi: Complex64,
    pub psi: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

mod cpx_pair {
    use num_complex::Complex64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        (z.re, z.im).serialize(s)
    }
}

/// Segment record for real-avoiding paths: the smallest over all samples
/// of the largest coordinate `|Im|`.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub index: usize,
    pub min_max_imag: f64,
    pub samples: usize,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ChainVerification {
    pub kind: ChainKind,
    pub pass: bool,
    pub edges: Vec<EdgeReport>,
    pub segments: Vec<SegmentReport>,
    pub messages: Vec<String>,
}

impl Serialize for ChainVerification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ChainVerification", 6)?;
        st.serialize_field("kind", "chain_verification")?;
        st.serialize_field("chain_kind", &self.kind)?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("edges", &self.edges)?;
        if self.segments.is_empty() {
            st.skip_field("segments")?;
        } else {
            st.serialize_field("segments", &self.segments)?;
        }
        if self.messages.is_empty() {
            st.skip_field("messages")?;
        } else {
            st.serialize_field("messages", &self.messages)?;
        }
        st.end()
    }
}

/// Recomputes every certificate from the points and checks the
/// kind-specific invariants. Failures are report content, not errors.
pub fn verify_chain(chain: &WitnessChain, tol: f64) -> ChainVerification {
    let mut report = ChainVerification {
        kind: chain.kind,
        pass: true,
        edges: Vec::new(),
        segments: Vec::new(),
        messages: Vec::new(),
    };
    if chain.points.len() < 2 {
        report.pass = false;
        report
            .messages
            .push("chain has fewer than two points".into());
        return report;
    }
    if let Some(bad) = chain
        .points
        .iter()
        .position(|p| p.dim() != chain.points[0].dim())
    {
        report.pass = false;
        report
            .messages
            .push(format!("point {bad} has a mismatched dimension"));
        return report;
    }

    let unit = Complex64::new(1.0, 0.0);
    for (index, pair) in chain.points.windows(2).enumerate() {
        let phi_v = phi(&pair[0], &pair[1]).expect("dimensions checked");
        let psi_v = psi(&pair[0], &pair[1]).expect("dimensions checked");
        let mut pass = true;
        let mut note = None;
        match chain.kind {
            ChainKind::RealUnitChain | ChainKind::Lemma4Chain => {
                let residual = (phi_v - unit).norm();
                if residual > tol {
                    pass = false;
                    note = Some(format!("|phi - 1| = {residual:.3e} exceeds {tol:.1e}"));
                }
                if chain.kind == ChainKind::Lemma4Chain
                    && psi_v.abs() <= crate::PSI_LICENSE_THRESHOLD
                {
                    pass = false;
                    note = Some(format!(
                        "|psi| = {:.3e} does not license transport",
                        psi_v.abs()
                    ));
                }
            }
            ChainKind::Lemma5Path => {}
        }
        if !pass {
            report.pass = false;
        }
        report.edges.push(EdgeReport {
            index,
            phi: phi_v,
            psi: psi_v,
            pass,
            note,
        });
    }

    match chain.kind {
        ChainKind::RealUnitChain => {
            for (i, p) in chain.points.iter().enumerate() {
                if !p.is_real() {
                    report.pass = false;
                    report.messages.push(format!("point {i} is not real"));
                }
            }
        }
        ChainKind::Lemma5Path => {
            for (index, pair) in chain.points.windows(2).enumerate() {
                let mut min_max_imag = f64::INFINITY;
                // endpoints plus interior samples
                for step in 0..=SEGMENT_DENOMINATOR {
                    let t = step as f64 / SEGMENT_DENOMINATOR as f64;
                    let sample = Point::new(
                        pair[0]
                            .coords()
                            .iter()
                            .zip(pair[1].coords())
                            .map(|(a, b)| a * (1.0 - t) + b * t)
                            .collect(),
                    );
                    min_max_imag = min_max_imag.min(sample.max_imag_abs());
                }
                let pass = min_max_imag > 0.0;
                if !pass {
                    report.pass = false;
                    report.messages.push(format!("segment {index} touches R^n"));
                }
                report.segments.push(SegmentReport {
                    index,
                    min_max_imag,
                    samples: SEGMENT_DENOMINATOR + 1,
                    pass,
                });
            }
        }
        ChainKind::Lemma4Chain => {}
    }

    report
}
