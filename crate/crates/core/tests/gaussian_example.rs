use macbound_core::bounds::gen_bound_catoni;
use macbound_core::gaussian::{
    example_gen_bound, expected_block_divergence, mc_block_divergence, mc_gen_error,
    population_loss, truncated_loss, GaussianScenario,
};

/// Adaptive Simpson on `[a, b]`.
fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64 + Copy>(
        f: F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    step(
        f,
        a,
        b,
        fa,
        fm,
        fb,
        (b - a) / 6.0 * (fa + 4.0 * fm + fb),
        tol,
        60,
    )
}

fn loss_by_quadrature(w: f64, mu: f64) -> f64 {
    let density = |z: f64| (-(z - mu) * (z - mu) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let integrand = move |z: f64| truncated_loss(w, z) * density(z);
    // split at the kinks w ± 1; tails beyond 14 sd are below 1e-40
    let pts = [mu - 14.0, w - 1.0, w, w + 1.0, mu + 14.0];
    let mut pts = pts.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .map(|p| simpson(integrand, p[0], p[1], 1e-14))
        .sum()
}

#[test]
fn population_loss_matches_quadrature() {
    for i in 0..=200 {
        let delta = -5.0 + i as f64 * 0.05;
        for mu in [0.1, 0.5, 0.9] {
            let q = loss_by_quadrature(mu + delta, mu);
            let c = population_loss(mu + delta, mu);
            assert!((q - c).abs() < 1e-10, "δ={delta} μ={mu}: {c} vs {q}");
        }
    }
}

#[test]
fn mc_divergence_matches_closed_form() {
    for n in [10usize, 100, 1000] {
        for m in [1, n / 10, n / 2] {
            let sc = GaussianScenario::new(0.5, n, m).unwrap();
            let est = mc_block_divergence(&sc, 100_000, 11).unwrap();
            let exact = expected_block_divergence(&sc);
            assert!(est.within(exact, 4.0), "n={n} m={m}: {est:?} vs {exact}");
        }
    }
}

#[test]
fn closed_forms_do_not_depend_on_mu() {
    for (n, m) in [(10, 1), (100, 10), (250, 50), (7, 7)] {
        let base = GaussianScenario::new(0.1, n, m).unwrap();
        for mu in [0.5, 0.9] {
            let other = GaussianScenario::new(mu, n, m).unwrap();
            assert_eq!(
                expected_block_divergence(&base).to_bits(),
                expected_block_divergence(&other).to_bits()
            );
            assert_eq!(
                example_gen_bound(&base).to_bits(),
                example_gen_bound(&other).to_bits()
            );
        }
    }
}

#[test]
fn bound_monotone_in_m_and_n() {
    for n in [12usize, 60, 240] {
        let divisors: Vec<usize> = (1..=n).filter(|m| n % m == 0).collect();
        for w in divisors.windows(2) {
            let a = example_gen_bound(&GaussianScenario::new(0.5, n, w[0]).unwrap());
            let b = example_gen_bound(&GaussianScenario::new(0.5, n, w[1]).unwrap());
            assert!(a <= b);
        }
    }
    for m in [1usize, 2, 5] {
        let mut prev = f64::INFINITY;
        for j in 2..200 {
            let v = example_gen_bound(&GaussianScenario::new(0.5, m * j, m).unwrap());
            assert!(v < prev);
            prev = v;
        }
    }
}

#[test]
fn example_bound_equals_generic_catoni_bound() {
    for n in 2..=300usize {
        for m in (1..n).filter(|m| n % m == 0) {
            let sc = GaussianScenario::new(0.5, n, m).unwrap();
            let generic = gen_bound_catoni(sc.partition(), &sc.divergence_profile()).unwrap();
            let closed = example_gen_bound(&sc);
            assert!((generic - closed).abs() <= 1e-14, "n={n} m={m}");
        }
    }
}

#[test]
fn true_gen_sits_below_bound() {
    for n in [10usize, 50] {
        let sc = GaussianScenario::new(0.5, n, 1).unwrap();
        let est = mc_gen_error(&sc, 100_000, 3).unwrap();
        assert!(est.estimate >= -4.0 * est.std_error);
        assert!(est.estimate <= example_gen_bound(&sc) + 4.0 * est.std_error);
    }
}
