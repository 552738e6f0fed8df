//! Geometry of the complex bilinear squared distance on C^n.
//!
//! The central object is the form `phi(X, Y) = sum_i (x_i - y_i)^2` with
//! complex squares and no conjugation. Its isometry group is the complex
//! orthogonal group (plain transpose, `Q^T Q = Id`), and the maps of C^n
//! that preserve a single nonzero distance turn out to be exactly the
//! semi-affine maps `I . (rho, ..., rho)` with `I` affine-orthogonal and
//! `rho` the identity, conjugation, or a scaled conjugation.
//!
//! The crate provides:
//!
//! - [`point`]: points of C^n, the forms [`phi`] and [`psi`], conjugation
//!   and the conjugation defect identity;
//! - [`matrix`]: dense complex matrices, the orthogonality check and a
//!   seeded generator of complex orthogonal matrices;
//! - [`maps`]: affine-orthogonal and semi-affine maps plus the
//!   serializable [`MapSpec`] description;
//! - [`witness`]: explicit point configurations (probe families, real
//!   unit chains, lifted complex chains, real-avoiding paths) with
//!   independently checkable certificates;
//! - [`solver`]: the forcing system that pins the image of a non-real
//!   point to the point itself or its conjugate, and label propagation
//!   along certified chains;
//! - [`classifier`]: decides whether a map is (numerically) a distance
//!   preserver and decomposes it into canonical form;
//! - [`gallery`]: builtin example and counterexample maps, plus a
//!   sampling probe for distance preservation.

pub mod classifier;
pub mod error;
pub mod gallery;
pub mod maps;
pub mod matrix;
pub mod point;
pub mod sample;
pub mod solver;
pub mod witness;

pub use num_complex::Complex64;

pub use classifier::{
    classify_dim1, classify_distance_d, classify_unit, fit_real_restriction, tau_d_preserves,
    ClassificationReport, ClassifyOptions, RealRestrictionFit, Residuals, Verdict, Witness,
};
pub use error::Error;
pub use gallery::{builtin, probe_preserves, random_semi_affine, GalleryEntry, ProbeReport};
pub use maps::{apply_map, AffineOrthogonalMap, BuiltinParams, MapSpec, RhoTag, SemiAffineMap};
pub use matrix::{is_complex_orthogonal, random_complex_orthogonal, CMatrix};
pub use point::{conjugate_point, conjugation_defect, phi, psi, Point};
pub use solver::{
    forcing_residual, propagate_label, theorem1_candidates, CandidatePair, Label, Propagation,
};
pub use witness::{
    lemma4_chain, lemma5_path, probe_family, unit_chain, verify_chain, ChainKind,
    ChainVerification, EdgeCertificate, ProbeFamily, WitnessChain,
};

/// Default tolerance for distance comparisons (`|phi - expected|`).
pub const DEFAULT_DISTANCE_TOL: f64 = 1e-9;

/// Default tolerance for the orthogonality residual `max |Q^T Q - Id|`.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-8;

/// Edges with `|psi|` at or below this threshold do not license label
/// propagation.
pub const PSI_LICENSE_THRESHOLD: f64 = 1e-12;
