//! Randomized checks of the classifier contracts: round-trips, verdict
//! soundness, witness validity, and consistency between the unit and
//! fixed-distance routes.

use cbq_core::gallery::{self, random_semi_affine};
use cbq_core::{
    apply_map, classify_dim1, classify_distance_d, classify_unit, phi, probe_preserves, sample,
    tau_d_preserves, BuiltinParams, ClassifyOptions, Complex64, MapSpec, RhoTag, Verdict,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn opts(seed: u64) -> ClassifyOptions {
    ClassifyOptions {
        validation_count: 64,
        seed,
        ..ClassifyOptions::default()
    }
}

fn builtin(name: &str, n: usize) -> MapSpec {
    gallery::builtin(name, n, &BuiltinParams::default()).unwrap()
}

fn classify_any(spec: &MapSpec, n: usize, o: &ClassifyOptions) -> cbq_core::ClassificationReport {
    if n == 1 {
        classify_dim1(spec, o).unwrap()
    } else {
        classify_unit(spec, n, o).unwrap()
    }
}

#[test]
fn roundtrip_recovers_rho_and_the_affine_part() {
    for n in 1..=4 {
        for seed in 0..25 {
            let map = random_semi_affine(n, 1000 * n as u64 + seed);
            let spec = MapSpec::SemiAffine(map.clone());
            let report = classify_any(&spec, n, &opts(seed));
            match report.verdict {
                Verdict::Rigid { rho, outer } => {
                    assert_eq!(rho, map.rho, "n={n} seed={seed}");
                    assert!(outer.b().dist_inf(map.outer.b()) <= 1e-8);
                    for r in 0..n {
                        for c in 0..n {
                            assert!((outer.q().get(r, c) - map.outer.q().get(r, c)).norm() <= 1e-8);
                        }
                    }
                }
                Verdict::NotRigid { witness } => panic!(
                    "n={n} seed={seed}: semi-affine map misclassified, mismatch {:.3e}",
                    witness.mismatch()
                ),
            }
        }
    }
}

#[test]
fn rigid_verdicts_are_sound_on_fresh_pairs() {
    let tol = ClassifyOptions::default().tol;
    for (name, n) in [("identity", 2), ("conjugation", 3)] {
        let spec = builtin(name, n);
        let report = classify_unit(&spec, n, &opts(5)).unwrap();
        let Verdict::Rigid { .. } = report.verdict else {
            panic!("{name} must be rigid")
        };
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let (x, y) = sample::unit_pair(&mut rng, n, 2.0).unwrap();
            let observed = phi(
                &apply_map(&spec, &x).unwrap(),
                &apply_map(&spec, &y).unwrap(),
            )
            .unwrap();
            assert!((observed - Complex64::new(1.0, 0.0)).norm() <= 10.0 * tol);
        }
    }
}

#[test]
fn not_rigid_witnesses_reproduce_under_reevaluation() {
    for seed in 0..20 {
        let spec = builtin("im_shift_nd", 2);
        let report = classify_unit(&spec, 2, &opts(seed)).unwrap();
        let Verdict::NotRigid { witness } = report.verdict else {
            panic!("imaginary shift must not be rigid")
        };
        let expected = phi(&witness.x, &witness.y).unwrap();
        let observed = phi(
            &apply_map(&spec, &witness.x).unwrap(),
            &apply_map(&spec, &witness.y).unwrap(),
        )
        .unwrap();
        assert!((expected - witness.expected_phi).norm() <= 1e-12);
        assert!((observed - witness.observed_phi).norm() <= 1e-12);
        assert!(witness.mismatch() > 1e-6);
    }
}

/// The preservation criterion for the scaled conjugation must agree with
/// a direct numeric check in every sampled case.
#[test]
fn tau_d_criterion_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<(Complex64, Complex64)> = Vec::new();
    for _ in 0..50 {
        let draw = |rng: &mut ChaCha8Rng| {
            Complex64::from_polar(
                0.5 + 1.5 * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            )
        };
        cases.push((draw(&mut rng), draw(&mut rng)));
    }
    for k in 0..25 {
        // d2 a real multiple of d1: the squared ratio is exactly real
        let d1 = Complex64::from_polar(1.0 + 0.02 * k as f64, 0.1 * k as f64);
        cases.push((d1, d1.scale(1.0 + 0.5 * k as f64)));
        // d2 = i * c * d1: ratio -1/c^2, also real
        let c = 0.5 + 0.1 * k as f64;
        cases.push((d1, d1 * Complex64::new(0.0, c)));
    }

    for (d1, d2) in cases {
        let predicted = tau_d_preserves(d1, d2).unwrap();
        let map = MapSpec::semi_affine(
            RhoTag::scaled(d1).unwrap(),
            cbq_core::AffineOrthogonalMap::identity(2),
        );
        let d2_sq = d2 * d2;
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let (x, y) = sample::pair_with_phi(&mut rng, 2, d2_sq, 2.0).unwrap();
            let observed =
                phi(&apply_map(&map, &x).unwrap(), &apply_map(&map, &y).unwrap()).unwrap();
            worst = worst.max((observed - d2_sq).norm());
        }
        let direct = worst <= 1e-9 * d2_sq.norm().max(1.0);
        assert_eq!(
            predicted, direct,
            "d1={d1}, d2={d2}: criterion {predicted}, direct worst {worst:.3e}"
        );
    }
}

#[test]
fn classify_distance_d_matches_the_corollary() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..100 {
        let d1 = Complex64::from_polar(
            0.5 + 1.5 * rng.random::<f64>(),
            std::f64::consts::TAU * rng.random::<f64>(),
        );
        let (d2, should_preserve) = if trial % 2 == 0 {
            // real multiple: preserved
            (d1.scale(0.5 + rng.random::<f64>()), true)
        } else {
            let d2 = Complex64::from_polar(
                0.5 + 1.5 * rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            );
            (d2, tau_d_preserves(d1, d2).unwrap())
        };
        let map = MapSpec::semi_affine(
            RhoTag::scaled(d1).unwrap(),
            cbq_core::AffineOrthogonalMap::identity(2),
        );
        let report = classify_distance_d(&map, 2, d2, &opts(trial)).unwrap();
        assert_eq!(
            report.verdict.is_rigid(),
            should_preserve,
            "trial {trial}: d1={d1} d2={d2}"
        );
    }
}

#[test]
fn rescaled_witnesses_reproduce_under_reevaluation() {
    let d = Complex64::new(1.5, -0.5);
    let spec = builtin("im_shift_nd", 2);
    for seed in 0..10 {
        let report = classify_distance_d(&spec, 2, d, &opts(seed)).unwrap();
        let Verdict::NotRigid { witness } = report.verdict else {
            panic!("imaginary shift must not preserve distance {d}")
        };
        let expected = phi(&witness.x, &witness.y).unwrap();
        let observed = phi(
            &apply_map(&spec, &witness.x).unwrap(),
            &apply_map(&spec, &witness.y).unwrap(),
        )
        .unwrap();
        assert!((expected - witness.expected_phi).norm() <= 1e-12);
        assert!((observed - witness.observed_phi).norm() <= 1e-12);
        assert!(witness.mismatch() > 1e-6);
    }
}

#[test]
fn unit_and_distance_one_routes_agree_on_the_gallery() {
    let one = Complex64::new(1.0, 0.0);
    for n in 2..=3 {
        for entry in gallery::entries() {
            if !entry.dims.accepts(n) {
                continue;
            }
            let params = BuiltinParams {
                d: (entry.name == "tau_d").then_some(Complex64::new(1.0, 1.0)),
                seed: (entry.name == "random_semi_affine").then_some(17),
            };
            let spec = gallery::builtin(entry.name, n, &params).unwrap();
            let unit = classify_unit(&spec, n, &opts(23)).unwrap();
            let scaled = classify_distance_d(&spec, n, one, &opts(23)).unwrap();
            assert_eq!(
                unit.verdict.is_rigid(),
                scaled.verdict.is_rigid(),
                "{} at n={n}",
                entry.name
            );
        }
    }
}

#[test]
fn gallery_expected_verdicts_hold() {
    for n in 1..=4usize {
        for entry in gallery::entries() {
            if !entry.dims.accepts(n) {
                continue;
            }
            let params = BuiltinParams {
                d: (entry.name == "tau_d").then_some(Complex64::new(1.0, 1.0)),
                seed: (entry.name == "random_semi_affine").then_some(5),
            };
            let spec = gallery::builtin(entry.name, n, &params).unwrap();
            let report = match entry.name {
                // the scaled conjugation is rigid under its own distance
                "tau_d" => {
                    if n == 1 {
                        continue;
                    }
                    classify_distance_d(&spec, n, Complex64::new(1.0, 1.0), &opts(31)).unwrap()
                }
                _ => classify_any(&spec, n, &opts(31)),
            };
            let expect_rigid = !entry.name.starts_with("im_shift");
            assert_eq!(
                report.verdict.is_rigid(),
                expect_rigid,
                "{} at n={n}: expected '{}'",
                entry.name,
                entry.expected
            );
        }
    }
}

/// The one-dimensional shift passes every positive real distance probe
/// yet fails classification: only pairs with purely imaginary difference
/// expose it, and those have negative real phi.
#[test]
fn one_dimensional_shift_is_the_boundary_case() {
    let spec = builtin("im_shift_1d", 1);
    let probe = probe_preserves(&spec, 1, None, 64, 3, 1e-9).unwrap();
    assert!(probe.pass, "positive real distances are all preserved");
    assert_eq!(probe.distances.len(), gallery::PROBE_GRID_SIZE);

    let report = classify_dim1(&spec, &opts(3)).unwrap();
    let Verdict::NotRigid { witness } = report.verdict else {
        panic!("the shift is not semi-affine")
    };
    assert!(witness.expected_phi.im.abs() <= 1e-12);
    assert!(witness.expected_phi.re < 0.0);

    // its componentwise extension already fails at unit distance
    let nd = builtin("im_shift_nd", 2);
    let probe = probe_preserves(&nd, 2, Some(Complex64::new(1.0, 0.0)), 64, 3, 1e-9).unwrap();
    assert!(!probe.pass);
}
