//! Registry of builtin example and counterexample maps, and a sampling
//! probe for distance preservation.
//!
//! The gallery exists so that tests and the CLI can name interesting
//! maps instead of spelling them out: the genuine distance preservers
//! (identity, conjugation, scaled conjugation, seeded random semi-affine
//! maps) and the negative controls built from `z -> z + Im(z)`. The
//! one-dimensional shift is a genuine boundary case — it preserves every
//! positive real distance yet fails classification because pairs with
//! purely imaginary difference defeat it. Its componentwise extension to
//! `n >= 2` is a plain negative control for the unit-distance route.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::classifier::Witness;
use crate::error::{Error, Result};
use crate::maps::{apply_map, AffineOrthogonalMap, BuiltinParams, MapSpec, RhoTag, SemiAffineMap};
use crate::matrix::{matrix_exp, random_antisymmetric};
use crate::point::{conjugate_point, phi, Point};
use crate::sample;

/// Dimensions an entry supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dims {
    Any,
    Exactly(usize),
    AtLeast(usize),
}

impl Dims {
    pub fn accepts(&self, n: usize) -> bool {
        match *self {
            Dims::Any => n >= 1,
            Dims::Exactly(m) => n == m,
            Dims::AtLeast(m) => n >= m,
        }
    }
}

impl std::fmt::Display for Dims {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        match *self {
            Dims::Any => f.write_str("any"),
            Dims::Exactly(m) => write!(f, "{m}"),
            Dims::AtLeast(m) => write!(f, ">={m}"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub dims: Dims,
    pub params: &'static [&'static str],
    /// Verdict the classifier is expected to reach on this entry.
    pub expected: &'static str,
    pub summary: &'static str,
}

const ENTRIES: &[GalleryEntry] = &[
    GalleryEntry {
        name: "identity",
        dims: Dims::Any,
        params: &[],
        expected: "rigid: rho = id, I = id",
        summary: "the identity map",
    },
    GalleryEntry {
        name: "conjugation",
        dims: Dims::Any,
        params: &[],
        expected: "rigid: rho = conj, I = id",
        summary: "componentwise complex conjugation",
    },
    GalleryEntry {
        name: "tau_d",
        dims: Dims::Any,
        params: &["d"],
        expected: "rigid under classify-d at its own d (n >= 2)",
        summary: "componentwise x -> (d / conj d) * conj x, the conjugation twisted to preserve distance d",
    },
    GalleryEntry {
        name: "im_shift_1d",
        dims: Dims::Exactly(1),
        params: &[],
        expected: "not_rigid under dim-1 classification, despite preserving all positive real distances",
        summary: "z -> z + Im(z) on C",
    },
    GalleryEntry {
        name: "im_shift_nd",
        dims: Dims::AtLeast(2),
        params: &[],
        expected: "not_rigid with a unit-distance witness pair",
        summary: "componentwise z -> z + Im(z); negative control, not a distance preserver",
    },
    GalleryEntry {
        name: "random_semi_affine",
        dims: Dims::Any,
        params: &["seed"],
        expected: "rigid: rho and (q, b) determined by the seed",
        summary: "seeded random semi-affine map with complex orthogonal linear part",
    },
];

pub fn entries() -> &'static [GalleryEntry] {
    ENTRIES
}

pub fn entry(name: &str) -> Option<&'static GalleryEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Validation used at spec parse time: known name, compatible dimension,
/// required parameters present and sane.
pub(crate) fn validate_builtin(name: &str, n: usize, params: &BuiltinParams) -> Result<()> {
    let entry = entry(name).ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    if !entry.dims.accepts(n) {
        return Err(Error::InvalidInput(format!(
            "builtin '{name}' supports dimension {} but n = {n} was requested",
            entry.dims
        )));
    }
    if name == "tau_d" {
        match params.d {
            None => {
                return Err(Error::InvalidInput(
                    "builtin 'tau_d' needs the parameter d".into(),
                ))
            }
            Some(d) if d.norm() == 0.0 => return Err(Error::ZeroDistance),
            Some(_) => {}
        }
    }
    Ok(())
}

/// Constructs a builtin map description by name.
pub fn builtin(name: &str, n: usize, params: &BuiltinParams) -> Result<MapSpec> {
    validate_builtin(name, n, params)?;
    Ok(MapSpec::Builtin {
        name: name.to_string(),
        n,
        params: params.clone(),
    })
}

/// Evaluates a registered builtin at a point.
pub(crate) fn eval_builtin(
    name: &str,
    n: usize,
    params: &BuiltinParams,
    x: &Point,
) -> Result<Point> {
    validate_builtin(name, n, params)?;
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: x.dim(),
        });
    }
    match name {
        "identity" => Ok(x.clone()),
        "conjugation" => Ok(conjugate_point(x)),
        "tau_d" => {
            let d = params.d.expect("validated");
            let rho = RhoTag::ScaledConjugation(d);
            Ok(rho.apply(x))
        }
        "im_shift_1d" | "im_shift_nd" => Ok(Point::new(
            x.coords()
                .iter()
                .map(|z| z + Complex64::new(z.im, 0.0))
                .collect(),
        )),
        "random_semi_affine" => {
            let seed = params.seed.unwrap_or(0);
            random_semi_affine(n, seed).apply(x)
        }
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// Seeded random semi-affine map covering both componentwise factors and
/// both components of the complex orthogonal group (the linear part is
/// `exp(antisymmetric)` with an optional column reflection).
pub fn random_semi_affine(n: usize, seed: u64) -> SemiAffineMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = if rng.random::<bool>() {
        RhoTag::Conjugation
    } else {
        RhoTag::Identity
    };
    let mut q = matrix_exp(&random_antisymmetric(&mut rng, n, 1.0));
    if rng.random::<bool>() {
        q.negate_column(0);
    }
    let b = Point::new(
        (0..n)
            .map(|_| {
                Complex64::new(
                    2.0 * rng.random::<f64>() - 1.0,
                    2.0 * rng.random::<f64>() - 1.0,
                )
            })
            .collect(),
    );
    SemiAffineMap::new(rho, AffineOrthogonalMap::new_unchecked(q, b))
}

/// Outcome of probing one distance.
#[derive(Debug, Clone)]
pub struct DistanceProbe {
    pub d: Complex64,
    pub max_residual: f64,
    pub pass: bool,
    pub worst: Option<Witness>,
}

impl Serialize for DistanceProbe {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DistanceProbe", 4)?;
        st.serialize_field("d", &(self.d.re, self.d.im))?;
        st.serialize_field("max_residual", &self.max_residual)?;
        st.serialize_field("pass", &self.pass)?;
        match &self.worst {
            Some(w) if !self.pass => st.serialize_field("worst", w)?,
            _ => st.skip_field("worst")?,
        }
        st.end()
    }
}

/// Report of a distance-preservation probe across one or many distances.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub pass: bool,
    pub pairs_per_distance: usize,
    pub distances: Vec<DistanceProbe>,
}

impl Serialize for ProbeReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProbeReport", 4)?;
        st.serialize_field("kind", "probe_report")?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("pairs_per_distance", &self.pairs_per_distance)?;
        st.serialize_field("distances", &self.distances)?;
        st.end()
    }
}

/// Number of grid distances probed when no explicit distance is given.
pub const PROBE_GRID_SIZE: usize = 50;

/// Samples random pairs at one distance (or at a grid of positive real
/// distances when `d` is `None`) and measures the worst deviation of
/// `phi` under the map. A distance passes when the worst deviation stays
/// within `tol * max(1, |d|^2)`.
///
/// This is a finite stand-in for the density argument that upgrades
/// unit-distance preservation to all positive distances: it can falsify
/// preservation with a concrete pair, never prove it.
pub fn probe_preserves(
    f: &MapSpec,
    n: usize,
    d: Option<Complex64>,
    pair_count: usize,
    seed: u64,
    tol: f64,
) -> Result<ProbeReport> {
    let distances: Vec<Complex64> = match d {
        Some(d) if d.norm() == 0.0 => return Err(Error::ZeroDistance),
        Some(d) => vec![d],
        None => (1..=PROBE_GRID_SIZE)
            .map(|m| Complex64::new(0.2 * m as f64, 0.0))
            .collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        pass: true,
        pairs_per_distance: pair_count,
        distances: Vec::with_capacity(distances.len()),
    };
    for d in distances {
        let d2 = d * d;
        let mut max_residual: f64 = 0.0;
        let mut worst: Option<Witness> = None;
        for _ in 0..pair_count {
            let (x, y) = sample::pair_with_phi(&mut rng, n, d2, 2.0)?;
            let observed = phi(&apply_map(f, &x)?, &apply_map(f, &y)?)?;
            let residual = (observed - d2).norm();
            if residual >= max_residual {
                max_residual = residual;
                worst = Some(Witness {
                    x,
                    y,
                    expected_phi: d2,
                    observed_phi: observed,
                });
            }
        }
        let pass = max_residual <= tol * d2.norm().max(1.0);
        if !pass {
            report.pass = false;
        }
        report.distances.push(DistanceProbe {
            d,
            max_residual,
            pass,
            worst,
        });
    }
    Ok(report)
}
