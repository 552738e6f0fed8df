//! Map algebra: affine maps with complex orthogonal linear part, the
//! componentwise factors `rho`, their composition into semi-affine maps,
//! and the serializable [`MapSpec`] that the classifier and CLI consume.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{orthogonality_residual, CMatrix};
use crate::point::Point;

/// Componentwise scalar factor of a semi-affine map.
///
/// `ScaledConjugation(d)` sends `x` to `(d / conj d) * conj x`; it is the
/// conjugation twisted to preserve the distance `d`. Plain conjugation is
/// kept as its own tag (it equals `ScaledConjugation(1)` semantically).
#[derive(Debug, Clone, PartialEq)]
pub enum RhoTag {
    Identity,
    Conjugation,
    ScaledConjugation(Complex64),
}

impl RhoTag {
    /// Scaled conjugation for a nonzero `d`.
    pub fn scaled(d: Complex64) -> Result<RhoTag> {
        if d.norm() == 0.0 {
            return Err(Error::ZeroDistance);
        }
        Ok(RhoTag::ScaledConjugation(d))
    }

    pub fn apply_scalar(&self, z: Complex64) -> Complex64 {
        match self {
            RhoTag::Identity => z,
            RhoTag::Conjugation => z.conj(),
            RhoTag::ScaledConjugation(d) => (d / d.conj()) * z.conj(),
        }
    }

    pub fn apply(&self, x: &Point) -> Point {
        Point::new(x.coords().iter().map(|&z| self.apply_scalar(z)).collect())
    }
}

/// `X -> Q X + b` with `Q` complex orthogonal under the plain transpose.
/// Preserves the bilinear squared distance exactly in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineOrthogonalMap {
    q: CMatrix,
    b: Point,
}

impl AffineOrthogonalMap {
    /// Builds the map, enforcing `max |Q^T Q - Id| <= ortho_tol` and that
    /// the translation matches the matrix dimension.
    pub fn new(q: CMatrix, b: Point, ortho_tol: f64) -> Result<Self> {
        if q.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: b.dim(),
            });
        }
        let residual = orthogonality_residual(&q);
        if residual > ortho_tol {
            return Err(Error::RealRestrictionNotOrthogonal { residual });
        }
        Ok(AffineOrthogonalMap { q, b })
    }

    /// Skips the orthogonality check; for callers that have already
    /// validated `q`.
    pub fn new_unchecked(q: CMatrix, b: Point) -> Self {
        assert_eq!(q.dim(), b.dim());
        AffineOrthogonalMap { q, b }
    }

    pub fn identity(n: usize) -> Self {
        AffineOrthogonalMap {
            q: CMatrix::identity(n),
            b: Point::zero(n),
        }
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    pub fn b(&self) -> &Point {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        Ok(self.q.mul_point(x)?.add(&self.b))
    }

    /// Inverse application `Q^T (X - b)`, using that `Q^T = Q^{-1}` for
    /// complex orthogonal `Q`.
    pub fn apply_inverse(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: x.dim(),
            });
        }
        self.q.transpose().mul_point(&x.sub(&self.b))
    }
}

/// `I . (rho, ..., rho)`: apply `rho` componentwise, then the affine
/// orthogonal `I`. The canonical form of distance-preserving maps.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiAffineMap {
    pub rho: RhoTag,
    pub outer: AffineOrthogonalMap,
}

impl SemiAffineMap {
    pub fn new(rho: RhoTag, outer: AffineOrthogonalMap) -> Self {
        SemiAffineMap { rho, outer }
    }

    pub fn dim(&self) -> usize {
        self.outer.dim()
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        self.outer.apply(&self.rho.apply(x))
    }
}

/// Optional parameters of a builtin map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BuiltinParams {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_cpx")]
    pub d: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

mod opt_cpx {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Complex64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(z) => (z.re, z.im).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Complex64>, D::Error> {
        let pair = Option::<(f64, f64)>::deserialize(d)?;
        Ok(pair.map(|(re, im)| Complex64::new(re, im)))
    }
}

/// Serializable description of a map C^n -> C^n.
///
/// `SemiAffine` is evaluated directly; `Builtin` dispatches into the
/// gallery registry by name; `Tabulated` can only be probed at its
/// listed inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    SemiAffine(SemiAffineMap),
    Builtin {
        name: String,
        n: usize,
        params: BuiltinParams,
    },
    Tabulated {
        samples: Vec<(Point, Point)>,
    },
}

impl MapSpec {
    pub fn semi_affine(rho: RhoTag, outer: AffineOrthogonalMap) -> Self {
        MapSpec::SemiAffine(SemiAffineMap::new(rho, outer))
    }

    /// Ambient dimension, when the spec pins one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            MapSpec::SemiAffine(m) => Some(m.dim()),
            MapSpec::Builtin { n, .. } => Some(*n),
            MapSpec::Tabulated { samples } => samples.first().map(|(x, _)| x.dim()),
        }
    }

    /// Structural validation: known builtin names with compatible
    /// dimensions and parameters, square `q` matching `b`, consistent
    /// tabulated sample dimensions, nonzero `tau_d` scale.
    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::SemiAffine(m) => {
                if m.dim() == 0 {
                    return Err(Error::InvalidInput("empty translation vector".into()));
                }
                if let RhoTag::ScaledConjugation(d) = m.rho {
                    if d.norm() == 0.0 {
                        return Err(Error::ZeroDistance);
                    }
                }
                Ok(())
            }
            MapSpec::Builtin { name, n, params } => {
                crate::gallery::validate_builtin(name, *n, params)
            }
            MapSpec::Tabulated { samples } => {
                let n = match samples.first() {
                    Some((x, _)) => x.dim(),
                    None => {
                        return Err(Error::InvalidInput("tabulated map with no samples".into()))
                    }
                };
                for (x, y) in samples {
                    if x.dim() != n || y.dim() != n {
                        return Err(Error::DimensionMismatch {
                            left: n,
                            right: x.dim().max(y.dim()),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Parses and validates a spec from JSON text. Unknown builtin names
    /// are rejected here, at parse time.
    pub fn from_json(text: &str) -> Result<MapSpec> {
        let spec: MapSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Evaluates a map description at a point.
pub fn apply_map(spec: &MapSpec, x: &Point) -> Result<Point> {
    if let Some(n) = spec.dim() {
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: x.dim(),
            });
        }
    }
    match spec {
        MapSpec::SemiAffine(m) => m.apply(x),
        MapSpec::Builtin { name, n, params } => crate::gallery::eval_builtin(name, *n, params, x),
        MapSpec::Tabulated { samples } => samples
            .iter()
            .find(|(input, _)| input == x)
            .map(|(_, output)| output.clone())
            .ok_or(Error::UnsampledPoint),
    }
}

// JSON forms.
//
// rho:      "id" | "conj" | {"tau_d": [re, im]}
// map spec: {"kind": "semi_affine", "rho": ..., "q": ..., "b": ...}
//           {"kind": "builtin", "name": ..., "n": ..., "params": {...}}
//           {"kind": "tabulated", "samples": [[X, Y], ...]}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RhoRepr {
    Tag(String),
    TauD { tau_d: (f64, f64) },
}

impl Serialize for RhoTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            RhoTag::Identity => RhoRepr::Tag("id".into()),
            RhoTag::Conjugation => RhoRepr::Tag("conj".into()),
            RhoTag::ScaledConjugation(d) => RhoRepr::TauD {
                tau_d: (d.re, d.im),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RhoTag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<RhoTag, D::Error> {
        match RhoRepr::deserialize(d)? {
            RhoRepr::Tag(t) if t == "id" => Ok(RhoTag::Identity),
            RhoRepr::Tag(t) if t == "conj" => Ok(RhoTag::Conjugation),
            RhoRepr::Tag(t) => Err(serde::de::Error::custom(format!("unknown rho tag '{t}'"))),
            RhoRepr::TauD { tau_d: (re, im) } => {
                Ok(RhoTag::ScaledConjugation(Complex64::new(re, im)))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MapSpecRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<RhoTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<CMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<BuiltinParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<(Point, Point)>>,
}

impl Serialize for MapSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            MapSpec::SemiAffine(m) => MapSpecRepr {
                kind: "semi_affine".into(),
                rho: Some(m.rho.clone()),
                q: Some(m.outer.q().clone()),
                b: Some(m.outer.b().clone()),
                name: None,
                n: None,
                params: None,
                samples: None,
            },
            MapSpec::Builtin { name, n, params } => MapSpecRepr {
                kind: "builtin".into(),
                rho: None,
                q: None,
                b: None,
                name: Some(name.clone()),
                n: Some(*n),
                params: Some(params.clone()),
                samples: None,
            },
            MapSpec::Tabulated { samples } => MapSpecRepr {
                kind: "tabulated".into(),
                rho: None,
                q: None,
                b: None,
                name: None,
                n: None,
                params: None,
                samples: Some(samples.clone()),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<MapSpec, D::Error> {
        use serde::de::Error as DeError;
        let repr = MapSpecRepr::deserialize(d)?;
        match repr.kind.as_str() {
            "semi_affine" => {
                let rho = repr.rho.ok_or_else(|| DeError::missing_field("rho"))?;
                let q = repr.q.ok_or_else(|| DeError::missing_field("q"))?;
                let b = repr.b.ok_or_else(|| DeError::missing_field("b"))?;
                if q.dim() != b.dim() {
                    return Err(DeError::custom(format!(
                        "q is {}x{} but b has length {}",
                        q.dim(),
                        q.dim(),
                        b.dim()
                    )));
                }
                Ok(MapSpec::SemiAffine(SemiAffineMap::new(
                    rho,
                    AffineOrthogonalMap::new_unchecked(q, b),
                )))
            }
            "builtin" => {
                let name = repr.name.ok_or_else(|| DeError::missing_field("name"))?;
                let n = repr.n.ok_or_else(|| DeError::missing_field("n"))?;
                Ok(MapSpec::Builtin {
                    name,
                    n,
                    params: repr.params.unwrap_or_default(),
                })
            }
            "tabulated" => {
                let samples = repr
                    .samples
                    .ok_or_else(|| DeError::missing_field("samples"))?;
                Ok(MapSpec::Tabulated { samples })
            }
            other => Err(DeError::custom(format!("unknown map kind '{other}'"))),
        }
    }
}
