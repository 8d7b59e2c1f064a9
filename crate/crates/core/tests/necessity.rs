use chanid::necessity::composition::{CompositionSetup, DEFAULT_SIDES, INSTABILITY_FLOOR};
use chanid::necessity::*;

#[test]
fn appendix_construction_for_several_slants() {
    for (lambda, k1) in [(2.0f64, 1), (2.0, 2), (3.0, 1), (1.5, 1)] {
        let spec = SlantedMatrixSpec::new(lambda, 1, k1);
        let sec = build_slanted(&spec).unwrap();
        assert!(sec.matrix.nrows() < sec.matrix.ncols());
        let r = kernel_vector(&spec).unwrap();
        assert!((r.x.norm() - 1.0).abs() < 1e-12);
        assert!(
            r.inner_residual < 1e-10,
            "lambda={lambda} K1={k1}: {}",
            r.inner_residual
        );
        assert!(r.norm_mx * r.norm_mx <= r.appendix_bound);
        assert!(r.norm_mx * r.norm_mx <= r.shell_bound);
    }
}

#[test]
fn norm_mx_decreases_in_k1() {
    let norms: Vec<f64> = (1..=4)
        .map(|k1| kernel_vector(&SlantedMatrixSpec::new(2.0, 1, k1)).unwrap().norm_mx)
        .collect();
    assert!(norms.windows(2).all(|w| w[1] < w[0]), "{norms:?}");
}

#[test]
fn riesz_family_fixture() {
    let p = build_prototype(64, 2, 4, 1.2f64).unwrap();
    let sizes = [4, 9, 16, 25];
    let reports: Vec<_> = sizes.iter().map(|&s| riesz_gram_check(&p, s)).collect();
    let r9 = reports[1];
    assert!((r9.lambda_min - 576.0).abs() < 1e-9, "{}", r9.lambda_min);
    assert!((r9.lambda_max - 2037.752926080626).abs() < 1e-8, "{}", r9.lambda_max);
    for r in &reports {
        assert!(r.lambda_min >= 576.0 - 1e-9);
    }
}

#[test]
fn gaussian_frame_fixture_and_sweep() {
    let spec = GaborFrameSpec::new(60, 4, 12).unwrap();
    let (a, b) = gaussian_frame_bounds::<f64>(&spec);
    assert!((a / b - 0.046_080_401).abs() < 1e-6, "{}", a / b);
    let mut prev = f64::INFINITY;
    for d in [0.6, 0.8, 1.0, 1.25] {
        let (sa, sb) = balanced_steps(60, d).unwrap();
        let (lo, hi) = gaussian_frame_bounds::<f64>(&GaborFrameSpec::new(60, sa, sb).unwrap());
        assert!(lo <= prev + 1e-12 * hi, "density {d}");
        if d < 1.0 {
            assert!(lo > 1e-3 * hi);
        }
        prev = lo;
    }
}

#[test]
fn composition_overspread_and_control() {
    let over = CompositionSetup::<f64>::standard(4, 1).unwrap();
    let curve = composition_instability(&over, &DEFAULT_SIDES).unwrap();
    assert_eq!(
        curve.points.iter().map(|p| p.members).collect::<Vec<_>>(),
        vec![4, 36, 100]
    );
    assert!(curve.is_unstable(INSTABILITY_FLOOR), "{curve:?}");
    let control = CompositionSetup::<f64>::standard(3, 1).unwrap();
    let curve = composition_sections(&control, &DEFAULT_SIDES).unwrap();
    assert!(curve.stays_above(INSTABILITY_FLOOR), "{curve:?}");
    let gram = over.synthesis_gram(5).unwrap();
    assert!(gram.lambda_min > 0.0);
}

#[test]
fn composition_rejects_bad_slant() {
    // λ⁴ must stay below J/L = 4/3.
    let mut setup = CompositionSetup::<f64>::standard(4, 1).unwrap();
    setup.proto.lambda = 1.2;
    assert!(matches!(
        composition_instability(&setup, &[1]),
        Err(NecessityError::InvalidSpec(_))
    ));
}
