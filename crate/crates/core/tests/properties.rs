mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use uncertain_reach::bounds::{self, BloatBound, BoundMethod, NormKind};
use uncertain_reach::interval::{Interval, IntervalMatrix, DEFAULT_EXP_ORDER};
use uncertain_reach::linalg::{self, Vector};
use uncertain_reach::reach::{self, DiscreteSystem, ReductionMethod, ReductionPolicy};
use uncertain_reach::robustness::{self, BudgetScheme};
use uncertain_reach::sensitivity;
use uncertain_reach::star;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn interval_ops_contain_point_results(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let l1 = random_interval_matrix(&mut r, n, 2.0, 0.5);
        let l2 = random_interval_matrix(&mut r, n, 2.0, 0.5);
        let sum = l1.add(&l2).unwrap();
        let prod = l1.mul(&l2).unwrap();
        let xs: Vec<Interval> = (0..n).map(|_| Interval::centered(r.random_range(-1.0..1.0), 0.3).unwrap()).collect();
        let image = l1.mul_intervals(&xs).unwrap();
        for _ in 0..16 {
            let e1 = sample_matrix(&mut r, &l1);
            let e2 = sample_matrix(&mut r, &l2);
            prop_assert!(sum.contains_matrix(&(&e1 + &e2), 1e-12));
            prop_assert!(prod.contains_matrix(&(&e1 * &e2), 1e-12));
            let x = Vector::from_iterator(n, xs.iter().map(|iv| iv.sample(&mut r)));
            let y = &e1 * x;
            for i in 0..n {
                prop_assert!(image[i].contains_with_tol(y[i], 1e-12));
            }
        }
    }

    #[test]
    fn two_norm_sup_is_attained_and_dominates(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let l = random_interval_matrix(&mut r, n, 1.5, 0.7);
        let (vertex, sup) = l.max_sv_candidate().unwrap();
        prop_assert!(l.contains_matrix(&vertex, 1e-12));
        prop_assert!((power_sigma(&vertex) - sup).abs() <= 1e-9 * sup.max(1.0));
        prop_assert!(sup <= l.frobenius_sup() + 1e-12);
        for _ in 0..50 {
            let e = sample_matrix(&mut r, &l);
            prop_assert!(linalg::spectral_norm(&e) <= sup + 1e-12);
        }
    }

    #[test]
    fn interval_exp_contains_sampled_exponentials(seed in any::<u64>(), n in 1usize..=3, t in 0.05f64..1.0) {
        let mut r = rng(seed);
        let l = random_interval_matrix(&mut r, n, 1.0, 0.2);
        let enclosure = l.exp(t, DEFAULT_EXP_ORDER).unwrap();
        for _ in 0..30 {
            let e = sample_matrix(&mut r, &l);
            prop_assert!(enclosure.contains_matrix(&taylor_expm(&(e * t)), 1e-12));
        }
    }

    #[test]
    fn frobenius_variants_dominate_and_bounds_are_monotone(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 1.0);
        let lambda = random_deviation(&mut r, n, 0.1);
        let two = NormKind::Two.of(&lambda).unwrap();
        let frob = NormKind::Frobenius.of(&lambda).unwrap();
        prop_assert!(two <= frob * (1.0 + 1e-12));
        for method in BoundMethod::ALL {
            let bound = BloatBound::new(&a, method);
            if bound.check().is_err() {
                continue;
            }
            let mut prev = 0.0;
            for k in 0..=20 {
                let t = 0.1 * k as f64;
                let phi_two = bound.eval(two, t).unwrap();
                let phi_frob = bound.eval(frob, t).unwrap();
                // equal norms (a single uncertain entry) differ only by rounding
                prop_assert!(phi_frob >= phi_two * (1.0 - 1e-12));
                prop_assert!(phi_two >= prev);
                prop_assert!(bound.eval(two * 1.5, t).unwrap() >= phi_two);
                prev = phi_two;
            }
        }
    }

    #[test]
    fn symbolic_steps_contain_perturbed_points(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 1.0);
        let lambda = random_deviation(&mut r, n, 0.1);
        let theta = random_box(&mut r, n);
        let times = [0.0, 0.25, 0.5, 1.0];
        let steps = bounds::symbolic_reach(&a, &lambda, &theta, &times, BoundMethod::Loan, NormKind::Two).unwrap();
        for _ in 0..10 {
            let e = sample_matrix(&mut r, &lambda);
            let x = sample_point(&mut r, &theta);
            for s in &steps {
                let nominal = linalg::expm(&a, s.t) * &x;
                let perturbed = linalg::expm(&(&a + &e), s.t) * &x;
                prop_assert!((perturbed - nominal).norm() <= s.radius + 1e-9);
            }
        }
    }

    #[test]
    fn interval_image_box_contains_sampled_images(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=5) {
        let mut r = rng(seed);
        let l = random_interval_matrix(&mut r, n, 1.0, 0.5);
        let s = random_star(&mut r, n, m);
        let image = s.interval_image_box(&l).unwrap().bounding_box();
        for _ in 0..50 {
            let e = sample_matrix(&mut r, &l);
            let x = sample_star_point(&mut r, &s);
            prop_assert!(image.contains(&(e * x), 1e-9));
        }
    }

    #[test]
    fn reductions_enclose_the_original(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=8) {
        let mut r = rng(seed);
        let s = random_star(&mut r, n, m);
        let by_interval = s.interval_reduce();
        let by_zonotope = s.zonotope_reduce(n + (m / 2)).unwrap();
        for dir in star::sample_directions(n, 50, seed) {
            let rho = s.support(&dir).unwrap();
            prop_assert!(by_interval.support(&dir).unwrap() >= rho - 1e-9);
            prop_assert!(by_zonotope.support(&dir).unwrap() >= rho - 1e-9);
        }
    }

    #[test]
    fn support_is_linear_and_additive(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=5) {
        let mut r = rng(seed);
        let s1 = random_star(&mut r, n, m);
        let s2 = random_star(&mut r, n, m + 1);
        let a = random_matrix(&mut r, n, 1.0);
        let mapped = s1.linear_map(&a).unwrap();
        let sum = s1.minkowski_sum(&s2).unwrap();
        for dir in star::sample_directions(n, 20, seed ^ 1) {
            let lhs = mapped.support(&dir).unwrap();
            let rhs = s1.support(&(a.transpose() * &dir)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            let add = s1.support(&dir).unwrap() + s2.support(&dir).unwrap();
            prop_assert!((sum.support(&dir).unwrap() - add).abs() <= 1e-12 * (1.0 + add.abs()));
        }
    }
}

fn random_system(r: &mut impl Rng, n: usize) -> DiscreteSystem {
    // spectral radius around one so sets neither explode nor collapse
    let a = random_matrix(r, n, 1.0);
    let a = &a / linalg::spectral_norm(&a).max(1e-9) * r.random_range(0.8..1.05);
    DiscreteSystem::new(a, random_deviation(r, n, 0.05)).unwrap()
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn trajectories_stay_inside_reach_sets(seed in any::<u64>(), n in 1usize..=4, horizon in 1usize..=30) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n);
        let theta = random_box(&mut r, n);
        let res = reach::ors_reach(&sys, &theta, horizon, &ReductionPolicy::NONE).unwrap();
        let dirs = star::sample_directions(n, 20, seed);
        for _ in 0..5 {
            let step = &sys.a + sample_matrix(&mut r, &sys.lambda);
            let mut x = sample_point(&mut r, &theta);
            for s in &res.stars {
                prop_assert!(s.passes_support_membership(&x, &dirs, 1e-9).unwrap());
                x = &step * x;
            }
        }
    }

    #[test]
    fn zero_uncertainty_matches_nominal(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n);
        let theta = random_box(&mut r, n);
        let zero = DiscreteSystem::new(sys.a.clone(), IntervalMatrix::zeros(n, n)).unwrap();
        let ors = reach::ors_reach(&zero, &theta, 40, &ReductionPolicy::NONE).unwrap();
        let nominal = reach::nominal_reach(&sys.a, &theta, 40).unwrap();
        for (b1, b2) in ors.boxes().iter().zip(nominal.boxes()) {
            prop_assert!(b1.encloses(&b2, 1e-9) && b2.encloses(b1, 1e-9));
        }
    }

    #[test]
    fn reduced_reach_encloses_unreduced(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n);
        let theta = random_box(&mut r, n);
        let full = reach::ors_reach(&sys, &theta, 30, &ReductionPolicy::NONE).unwrap();
        let dirs = star::sample_directions(n, 30, seed);
        for method in [ReductionMethod::Interval, ReductionMethod::Zonotope] {
            let reduced = reach::ors_reach(&sys, &theta, 30, &ReductionPolicy::every(method, 7)).unwrap();
            for (sr, sf) in reduced.stars.iter().zip(&full.stars) {
                for d in &dirs {
                    prop_assert!(sr.support(d).unwrap() >= sf.support(d).unwrap() - 1e-9);
                }
            }
        }
    }

    #[test]
    fn enlarging_uncertainty_never_restores_safety(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let sys = random_system(&mut r, n);
        let bigger = DiscreteSystem::new(sys.a.clone(), sys.lambda.inflate(0.02)).unwrap();
        let theta = random_box(&mut r, n);
        let unsafe_set = [reach::HalfSpace::new(random_unit(&mut r, n), r.random_range(0.5..2.0)).unwrap()];
        let small = reach::ors_reach(&sys, &theta, 20, &ReductionPolicy::NONE).unwrap();
        let large = reach::ors_reach(&bigger, &theta, 20, &ReductionPolicy::NONE).unwrap();
        let v_small = reach::safety_check(&small, &unsafe_set).unwrap();
        let v_large = reach::safety_check(&large, &unsafe_set).unwrap();
        prop_assert!(v_small.is_safe() || !v_large.is_safe());
    }

    #[test]
    fn sv_change_is_first_order(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 1.0);
        prop_assume!(sv_gap(&a) > 0.1);
        let b = random_matrix(&mut r, n, 1.0);
        let k = sensitivity::sv_change(&a, &b).unwrap();
        let s0 = linalg::spectral_norm(&a);
        // signed derivative: the orientation of (u1, v1) is arbitrary, so
        // compare magnitudes of the first-order change
        let residual = |eps: f64| ((linalg::spectral_norm(&(&a + &b * eps)) - s0).abs() - eps * k).abs();
        let coarse = residual(1e-4);
        let fine = residual(1e-5);
        prop_assert!(fine <= coarse / 30.0 + 1e-13, "coarse {coarse:e}, fine {fine:e}");
    }

    #[test]
    fn ranking_is_scale_invariant(seed in any::<u64>(), n in 2usize..=5, c in 0.01f64..100.0) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 1.0);
        prop_assume!(sv_gap(&a) > 1e-3);
        let ord = sensitivity::order_cells(&a).unwrap();
        let scaled = sensitivity::order_cells(&(&a * c)).unwrap();
        // equal up to rounding: compare the score vectors before the permutation
        for (&(i, j), &(p, q)) in ord.ranking.iter().zip(&scaled.ranking) {
            prop_assert!((ord.score(i, j) - ord.score(p, q)).abs() <= 1e-12 * ord.score(i, j).max(1e-300) + 1e-15);
        }
        prop_assert_eq!(ord.ranking[0], scaled.ranking[0]);
    }

    #[test]
    fn matrix_maps_unit_ball_into_sigma_ball(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 2.0);
        let s = linalg::spectral_norm(&a);
        for _ in 0..200 {
            let x = random_unit(&mut r, n);
            prop_assert!((&a * x).norm() <= s + 1e-12);
        }
    }

    #[test]
    fn budget_distribution_is_consistent(seed in any::<u64>(), n in 2usize..=4, p in 0.0f64..0.5) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, 1.0);
        prop_assume!(sv_gap(&a) > 1e-3);
        let ord = sensitivity::order_cells(&a).unwrap();
        let cells: Vec<(usize, usize)> = ord.ranking.iter().copied().step_by(2).collect();
        for scheme in BudgetScheme::ALL {
            let w = robustness::weights(&cells, Some(&ord), scheme).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            if scheme == BudgetScheme::Equal {
                prop_assert!(w.iter().all(|x| *x == w[0]));
            }
            let l1 = robustness::distribute(&a, &cells, Some(&ord), p, scheme).unwrap();
            let l2 = robustness::distribute(&a, &cells, Some(&ord), p + 0.05, scheme).unwrap();
            prop_assert!(l2.encloses(&l1));
            prop_assert!(l2.frobenius_sup() >= l1.frobenius_sup());
        }
    }
}

#[test]
fn threshold_reports_are_deterministic_and_nested() {
    use uncertain_reach::model::load_model;
    use uncertain_reach::robustness::{robustness_threshold, ThresholdConfig, ThresholdStatus};

    let model = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/models/example_one.toml")).unwrap();
    let cells = [(0, 0), (0, 1), (1, 1)];
    for scheme in [BudgetScheme::Equal, BudgetScheme::Harmonic, BudgetScheme::Proportional] {
        let mut cfg = ThresholdConfig::new(scheme, 0.05);
        cfg.cap = 100;
        let first = robustness_threshold(&model, &cells, &cfg).unwrap();
        let second = robustness_threshold(&model, &cells, &cfg).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.status, ThresholdStatus::Found, "{scheme}");
        // the returned deviation is safe and sits inside the first unsafe one
        let ord = sensitivity::order_cells(&model.a).unwrap();
        let unsafe_budget = first.trace.last().unwrap().budget;
        let next = robustness::distribute(&model.a, &cells, Some(&ord), unsafe_budget, scheme).unwrap();
        assert!(next.encloses(&first.safe_uncertainty));
        let r = model.numeric_reach_with(&first.safe_uncertainty).unwrap();
        assert!(reach::safety_check(&r, &model.unsafe_set).unwrap().is_safe());
        let norms: Vec<f64> = first.trace.iter().map(|e| e.norm).collect();
        assert!(norms.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn symbolic_engine_is_no_less_conservative() {
    use uncertain_reach::model::load_model;
    use uncertain_reach::robustness::{robustness_threshold, SafetyEngine, ThresholdConfig};

    let model = load_model(concat!(env!("CARGO_MANIFEST_DIR"), "/models/example_one.toml")).unwrap();
    let mut cfg = ThresholdConfig::new(BudgetScheme::Equal, 0.02);
    cfg.cap = 60;
    let numeric = robustness_threshold(&model, &[(0, 1)], &cfg).unwrap();
    cfg.engine = SafetyEngine::Symbolic { method: BoundMethod::Loan, norm: NormKind::Two };
    let symbolic = robustness_threshold(&model, &[(0, 1)], &cfg).unwrap();
    assert!(symbolic.norm <= numeric.norm, "{} > {}", symbolic.norm, numeric.norm);
}
