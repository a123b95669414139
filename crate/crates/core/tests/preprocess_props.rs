use proptest::prelude::*;
use wez_core::preprocess::{encode, split, ScalerParams, SplitSpec, N_FEATURES};
use wez_core::sim::Scenario;

fn arb_scenario() -> impl Strategy<Value = Scenario> {
    (
        1e3..45e3f64,
        400.0..600.0f64,
        -45.0..45.0f64,
        1e3..45e3f64,
        400.0..600.0f64,
        -180.0..=180.0f64,
        -60.0..=60.0f64,
    )
        .prop_map(|(a, b, c, d, e, f, g)| Scenario::from_array([a, b, c, d, e, f, g]))
}

#[test]
fn heading_wraps_continuously() {
    let a = encode(&Scenario::from_array([1e4, 450.0, 0.0, 1e4, 450.0, 180.0, 0.0])).unwrap();
    let b = encode(&Scenario::from_array([1e4, 450.0, 0.0, 1e4, 450.0, -180.0, 0.0])).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn non_finite_inputs_are_rejected() {
    assert!(encode(&Scenario::from_array([f64::NAN, 450.0, 0.0, 1e4, 450.0, 180.0, 0.0])).is_err());
}

proptest! {
    #[test]
    fn angle_pairs_lie_on_the_unit_circle(s in arb_scenario()) {
        let f = encode(&s).unwrap();
        prop_assert!((f[5] * f[5] + f[6] * f[6] - 1.0).abs() < 1e-12);
        prop_assert!((f[7] * f[7] + f[8] * f[8] - 1.0).abs() < 1e-12);
        prop_assert!(f[6].atan2(f[5]).is_finite());
    }

    #[test]
    fn scaled_training_rows_stay_in_the_unit_box(
        rows in prop::collection::vec(arb_scenario(), 2..60),
        ys in prop::collection::vec(0.0..60.0f64, 60),
    ) {
        let x: Vec<_> = rows.iter().map(|s| encode(s).unwrap()).collect();
        let y = &ys[..x.len()];
        let sc = ScalerParams::fit(&x, y).unwrap();
        for row in &x {
            let t = sc.transform(row);
            prop_assert_eq!(t.len(), N_FEATURES);
            prop_assert!(t.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        for &v in y {
            let back = sc.inverse_target(sc.transform_target(v));
            prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn split_partitions_every_row_once(n in 6usize..500, seed in any::<u64>(), k in 2usize..6) {
        let spec = SplitSpec { test_fraction: 0.2, k, seed };
        let Ok(sp) = split(n, &spec) else { return Ok(()); };
        prop_assert_eq!(sp.test.len(), (0.2 * n as f64).round() as usize);
        prop_assert_eq!(sp.folds.len(), k);
        let sizes: Vec<usize> = sp.folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1));
        let mut all: Vec<usize> = sp.test.iter().chain(sp.folds.iter().flatten()).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        for i in 0..k {
            let (tr, va) = sp.fold_pair(i);
            prop_assert_eq!(tr.len() + va.len(), n - sp.test.len());
            prop_assert!(va.iter().all(|r| !tr.contains(r)));
        }
        prop_assert_eq!(split(n, &spec).unwrap(), sp);
    }
}
