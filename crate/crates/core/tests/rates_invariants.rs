use macbound_core::comparators::{binary_kl, UnitInterval};
use macbound_core::gaussian::{example_gen_bound, GaussianScenario};
use macbound_core::rates::{empirical_rate_fit, gen_rate_exponent, lemma3_upper, optimal_alpha};
use proptest::prelude::*;

#[test]
fn optimal_column() {
    for i in 0..=300 {
        let gamma = i as f64 / 100.0;
        let r = gen_rate_exponent(gamma, optimal_alpha(gamma)).unwrap();
        assert_eq!(r.exponent, ((gamma - 1.0).min(0.0) - 1.0) / 2.0);
    }
}

#[test]
fn monotone_in_alpha() {
    for gamma in [0.0, 0.4, 0.99, 1.0, 1.5, 3.0] {
        let exps: Vec<f64> = (0..=20)
            .map(|i| gen_rate_exponent(gamma, i as f64 / 20.0).unwrap().exponent)
            .collect();
        for w in exps.windows(2) {
            if gamma < 1.0 {
                assert!(w[1] < w[0]);
            } else {
                assert!(w[1] >= w[0]);
            }
        }
    }
}

#[test]
fn gaussian_bound_slope_matches_gamma_one() {
    let predicted = gen_rate_exponent(1.0, 0.0).unwrap().exponent;
    let pts: Vec<(u64, f64)> = (6..=12)
        .map(|k| {
            let n = 1usize << k;
            (
                n as u64,
                example_gen_bound(&GaussianScenario::new(0.5, n, 1).unwrap()),
            )
        })
        .collect();
    let fit = empirical_rate_fit(&pts).unwrap();
    assert!((fit.slope - predicted).abs() <= 0.05, "slope {}", fit.slope);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn mean_converter_dominates(r in 0.0f64..=0.5, t in 0.0f64..1.0) {
        let s = r + t * (1.0 - r);
        prop_assume!(s < 1.0);
        let x = binary_kl(UnitInterval::new(r).unwrap(), UnitInterval::new(s).unwrap());
        prop_assert!(s <= lemma3_upper(r, x).unwrap());
    }
}
