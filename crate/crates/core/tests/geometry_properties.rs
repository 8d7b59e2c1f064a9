use chanid::geometry::*;
use proptest::prelude::*;

fn rect_strategy() -> impl Strategy<Value = Rect<f64>> {
    (-1.0f64..2.0, 0.01f64..0.8, -1.0f64..4.0, 0.01f64..1.5)
        .prop_map(|(t, dt, nu, dnu)| Rect::new(t, t + dt, nu, nu + dnu))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_points_lie_in_covered_cells(
        rects in prop::collection::vec(rect_strategy(), 1..4),
        k in 1usize..8,
        l in 1usize..40,
        seed in 0u64..10_000,
    ) {
        use rand::Rng;
        let s = RectUnion::new(rects).unwrap();
        let cover = outer_cover(&s, k, l).unwrap();
        let mut rng = chanid::rng::stream(seed, 0);
        let kf = k as f64;
        let lf = l as f64;
        for _ in 0..1000 {
            let r = s.rects()[rng.random_range(0..s.rects().len())];
            let t = rng.random_range(r.t0..r.t1);
            let nu = rng.random_range(r.nu0..r.nu1);
            let m = ((t * kf).floor() as i64).rem_euclid(k as i64) as usize;
            let n = ((nu * lf / kf).floor() as i64).rem_euclid(l as i64) as usize;
            prop_assert!(cover.contains((m, n)), "point ({t}, {nu}) in cell ({m}, {n})");
        }
    }

    #[test]
    fn cover_measure_dominates_area(rect in rect_strategy(), k in 1usize..6, l in 1usize..60) {
        let s = RectUnion::new(vec![rect]).unwrap();
        let cover = outer_cover(&s, k, l).unwrap();
        // Wrapping can fold a rectangle longer than the torus onto itself.
        let torus = k as f64;
        prop_assert!(cover.measure::<f64>() + 1e-12 >= s.area().min(torus));
    }

    #[test]
    fn measure_is_additive(cells in prop::collection::btree_set((0usize..4, 0usize..9), 0..36), split in 0usize..36) {
        let all: Vec<_> = cells.into_iter().collect();
        let cut = split.min(all.len());
        let a = GridSupport::new(4, 9, all[..cut].iter().copied()).unwrap();
        let b = GridSupport::new(4, 9, all[cut..].iter().copied()).unwrap();
        prop_assert!(a.is_disjoint(&b).unwrap());
        let u = a.union(&b).unwrap();
        prop_assert!((u.measure::<f64>() - a.measure::<f64>() - b.measure::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn packed_rows_are_disjoint(
        rows in prop::collection::vec(prop::collection::vec(prop::collection::btree_set((0usize..2, 0usize..3), 0..3), 2), 1..3),
    ) {
        let supports: Vec<Vec<GridSupport>> = rows
            .into_iter()
            .map(|row| row.into_iter().map(|c| GridSupport::new(2, 11, c).unwrap()).collect())
            .collect();
        if let Ok(plan) = pack_offsets(supports) {
            prop_assert_eq!(plan.offsets()[0], 0);
            for m in 0..plan.rows() {
                let total: usize = (0..plan.inputs()).map(|n| plan.support(m, n).len()).sum();
                prop_assert_eq!(plan.merged(m).len(), total);
            }
        }
    }
}

#[test]
fn refinement_converges_toward_area() {
    let s = RectUnion::new(vec![Rect::new(0.0, 0.3, 0.0, 0.3)]).unwrap();
    let mut prev = f64::INFINITY;
    for (k, l) in [(10, 11), (30, 97), (100, 997)] {
        let m = outer_cover(&s, k, l).unwrap().measure::<f64>();
        assert!(m >= 0.09 && m <= prev, "K={k} L={l}: {m}");
        prev = m;
    }
    assert!((prev - 0.09) / 0.09 < 0.15);
}

#[test]
fn aligned_small_support_grid() {
    // Area 0.2 = two cells of the K=2, L=5 grid.
    let s = RectUnion::new(vec![Rect::new(0.0, 0.5, 0.0, 0.8)]).unwrap();
    let cover = outer_cover(&s, 2, 5).unwrap();
    assert_eq!(cover.len(), 2);
    assert!((cover.measure::<f64>() - 0.4).abs() < 1e-15);
}

#[test]
fn mimo_toy_cover_under_31() {
    let sq = |t: f64, nu: f64, side: f64| RectUnion::new(vec![Rect::new(t, t + side, nu, nu + side)]).unwrap();
    // Two supports of area 0.25 per row.
    let side = 0.5;
    let rows = vec![
        vec![sq(0.0, 0.0, side), sq(0.2, 0.1, side)],
        vec![sq(0.1, 0.0, side), sq(0.0, 0.3, side)],
    ];
    let choice = best_cover(&rows, 8, 31).unwrap();
    for total in choice.row_measures::<f64>() {
        assert!(total < 1.0);
    }
    let plan = pack_offsets(choice.covers).unwrap();
    assert!(plan.is_identifiable_regime());
}
