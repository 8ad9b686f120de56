//! Property tests of the metric module: bilinearity, symmetry, adapted
//! basis invariants, decomposition completeness, and rescaling invariance
//! of the first component.

use approx::assert_relative_eq;
use proptest::prelude::*;

use relkin::geometry::TangentVector;
use relkin::metric::{adapted_basis, epsilon, first_component, BundleMetric};

fn vec4(comps: [f64; 4]) -> TangentVector<f64> {
    TangentVector::new(vec![0.0; 4], comps.to_vec()).unwrap()
}

fn metrics() -> Vec<BundleMetric<f64>> {
    vec![BundleMetric::euclidean(4), BundleMetric::minkowski(4)]
}

proptest! {
    #[test]
    fn scalar_product_is_symmetric(
        u in proptest::array::uniform4(-10.0f64..10.0),
        v in proptest::array::uniform4(-10.0f64..10.0),
    ) {
        for g in metrics() {
            let a = vec4(u);
            let b = vec4(v);
            let uv = g.product(&a, &b).unwrap();
            let vu = g.product(&b, &a).unwrap();
            prop_assert!((uv - vu).abs() <= 1e-14 * uv.abs().max(1.0));
        }
    }

    #[test]
    fn scalar_product_is_bilinear(
        u in proptest::array::uniform4(-5.0f64..5.0),
        w in proptest::array::uniform4(-5.0f64..5.0),
        v in proptest::array::uniform4(-5.0f64..5.0),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        for g in metrics() {
            let combo: Vec<f64> = u.iter().zip(&w).map(|(&a, &b)| alpha * a + beta * b).collect();
            let lhs = g
                .product(&TangentVector::new(vec![0.0; 4], combo).unwrap(), &vec4(v))
                .unwrap();
            let rhs = alpha * g.product(&vec4(u), &vec4(v)).unwrap()
                + beta * g.product(&vec4(w), &vec4(v)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    // Adapted bases built from clearly non-null directions satisfy their
    // two defining invariants.
    #[test]
    fn adapted_basis_invariants_hold(
        raw in proptest::array::uniform4(-3.0f64..3.0),
    ) {
        for g in metrics() {
            let v1 = vec4(raw);
            let sq = g.square(&v1).unwrap();
            // Skip directions close to the light cone (or to zero): basis
            // conditioning degrades like the reciprocal of the scalar
            // square there, and truly null directions are rejected by
            // construction and tested separately.
            let scale = v1.max_abs_comp();
            prop_assume!(sq.abs() > 1e-2 * scale * scale);
            let basis = adapted_basis(&g, &v1).unwrap();
            let lam1 = basis.first();
            // Orthogonality of the first vector to all others.
            for other in &basis.vectors()[1..] {
                let dot = g.product(lam1, other).unwrap();
                prop_assert!(dot.abs() < 1e-10, "lam1 not orthogonal: {dot}");
            }
            // Scalar square of the first vector equals the sign of the
            // squared direction.
            let sq1 = g.square(lam1).unwrap();
            prop_assert!((sq1 - epsilon(sq)).abs() < 1e-10);
        }
    }

    // Reconstructing a vector from its components in the adapted basis
    // reproduces the vector.
    #[test]
    fn decomposition_is_complete(
        raw in proptest::array::uniform4(-3.0f64..3.0),
        target in proptest::array::uniform4(-3.0f64..3.0),
    ) {
        for g in metrics() {
            let v1 = vec4(raw);
            let sq = g.square(&v1).unwrap();
            let scale = v1.max_abs_comp();
            prop_assume!(sq.abs() > 1e-2 * scale * scale);
            let basis = adapted_basis(&g, &v1).unwrap();
            let a = vec4(target);
            let back = basis.reconstruct(&g, &a).unwrap();
            for i in 0..4 {
                prop_assert!((back.comp(i) - a.comp(i)).abs() < 1e-10);
            }
        }
    }

    // The first component depends only on the direction and sign of the
    // velocity, not its length.
    #[test]
    fn first_component_ignores_positive_rescaling(
        raw in proptest::array::uniform4(-3.0f64..3.0),
        target in proptest::array::uniform4(-3.0f64..3.0),
        scale in 0.1f64..10.0,
    ) {
        for g in metrics() {
            let v1 = vec4(raw);
            let sq = g.square(&v1).unwrap();
            let norm = v1.max_abs_comp();
            prop_assume!(sq.abs() > 1e-2 * norm * norm);
            let a = vec4(target);
            let c1 = first_component(&g, &a, &adapted_basis(&g, &v1).unwrap()).unwrap();
            let c2 =
                first_component(&g, &a, &adapted_basis(&g, &v1.scaled(scale)).unwrap()).unwrap();
            prop_assert!((c1 - c2).abs() <= 1e-12 * c1.abs().max(1.0));
        }
    }
}

#[test]
fn hundred_random_bases_per_metric() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x6261736573);
    for g in metrics() {
        let mut accepted = 0;
        while accepted < 100 {
            let raw: [f64; 4] = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let v1 = vec4(raw);
            let scale = v1.max_abs_comp();
            if g.square(&v1).unwrap().abs() < 1e-2 * scale * scale {
                continue;
            }
            let basis = adapted_basis(&g, &v1).unwrap();
            for other in &basis.vectors()[1..] {
                assert!(g.product(basis.first(), other).unwrap().abs() < 1e-10);
            }
            accepted += 1;
        }
    }
}

#[test]
fn position_dependent_metric_products() {
    // The polar-plane metric weights the angular component by r^2.
    let g = relkin::oracle::polar::metric::<f64>();
    let v = TangentVector::new(vec![2.0, 0.0], vec![0.0, 1.0]).unwrap();
    assert_relative_eq!(g.square(&v).unwrap(), 4.0, epsilon = 1e-15);
}
