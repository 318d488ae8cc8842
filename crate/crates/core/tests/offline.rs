mod common;

use proptest::prelude::*;
use rightsize_core::generate::{random_instance, random_integral_instance};
use rightsize_core::model::eval_cost;
use rightsize_core::offline::{
    dp_full, dp_optimal, fractional_optimum, refine_grid, restrict_phi, round_fractional,
    scale_psi, solve_poly, ColumnCandidates,
};
use rightsize_core::{AllowedStates, Convention, CostFunction, Error, ProblemInstance, Schedule};

use common::{brute_force, rel_close, rng};

#[test]
fn three_slot_example_costs_four() {
    let p = ProblemInstance::new(
        2,
        1.0,
        vec![
            common::table(&[3.0, 1.0, 0.0]),
            common::table(&[0.0, 1.0, 3.0]),
            common::table(&[3.0, 1.0, 0.0]),
        ],
    );
    assert_eq!(dp_full(&p).unwrap().cost, 4.0);
    assert_eq!(solve_poly(&p).unwrap().cost, 4.0);
    assert_eq!(brute_force(&p).0, 4.0);
}

#[test]
fn dp_returns_lexicographically_smallest_optimum() {
    let mut r = rng(11);
    for _ in 0..300 {
        let t = 1 + (rand::Rng::gen_range(&mut r, 0..4));
        let m = 1 + (rand::Rng::gen_range(&mut r, 0..3));
        let inst = random_integral_instance(&mut r, t, m, 1.0, 2);
        let (cost, sched) = brute_force(&inst);
        let dp = dp_full(&inst).unwrap();
        assert_eq!(dp.cost, cost);
        assert_eq!(dp.schedule, sched);
    }
}

#[test]
fn restricted_candidates_are_respected() {
    let p = ProblemInstance::new(4, 1.0, vec![common::table(&[4.0, 3.0, 2.0, 1.0, 0.0]); 2]);
    let cols = ColumnCandidates::new(vec![vec![0, 2], vec![2]]).unwrap();
    let r = dp_optimal(&p, &cols).unwrap();
    assert_eq!(r.schedule, Schedule(vec![2, 2]));
    let bad = ColumnCandidates::new(vec![vec![5], vec![0]]).unwrap();
    assert!(matches!(dp_optimal(&p, &bad), Err(Error::Domain(_))));
    let short = ColumnCandidates::new(vec![vec![0]]).unwrap();
    assert!(matches!(dp_optimal(&p, &short), Err(Error::Shape(_))));
}

#[test]
fn infeasible_columns_are_reported() {
    let p = ProblemInstance::new(
        1,
        1.0,
        vec![CostFunction::restricted(rightsize_core::UnitLoad { eps: 1.0, slope_k: 1.0 }, 2.0)],
    );
    assert!(matches!(dp_full(&p), Err(Error::Infeasible { t: 1, .. })));
}

#[test]
fn phi_psi_commute() {
    let mut r = rng(12);
    let p = random_instance(&mut r, 6, 32, 1.3, 3.0);
    for k in 0..=4u32 {
        for l in 0..=k {
            let lhs = restrict_phi(&scale_psi(&restrict_phi(&p, l), l).unwrap(), k - l);
            let rhs = scale_psi(&restrict_phi(&p, k), l).unwrap();
            assert_eq!(lhs.m, rhs.m);
            assert_eq!(lhs.beta, rhs.beta);
            assert_eq!(lhs.allowed, rhs.allowed);
            for (f, g) in lhs.functions.iter().zip(&rhs.functions) {
                for x in 0..=lhs.m {
                    assert_eq!(f.at(x), g.at(x));
                }
            }
        }
    }
}

#[test]
fn psi_rejects_misaligned_m() {
    let p = restrict_phi(&ProblemInstance::new(6, 1.0, vec![common::table(&[0.0; 7])]), 2);
    assert!(matches!(scale_psi(&p, 2), Err(Error::Alignment(_))));
}

#[test]
fn symmetric_instances_have_the_same_optimum() {
    let mut r = rng(13);
    for _ in 0..30 {
        let p = random_instance(&mut r, 12, 20, 2.5, 3.0);
        let q = p.clone().with_convention(Convention::Symmetric);
        let (a, b) = (dp_full(&p).unwrap(), dp_full(&q).unwrap());
        assert!(rel_close(a.cost, b.cost, 1e-12));
        assert!(rel_close(solve_poly(&q).unwrap().cost, b.cost, 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_equals_dp(seed in any::<u64>(), t in 1usize..30, m in 1u64..200, beta in 0.01f64..5.0) {
        let p = random_instance(&mut rng(seed), t, m, beta, 4.0);
        let fast = solve_poly(&p).unwrap();
        let exact = dp_full(&p).unwrap();
        prop_assert!(rel_close(fast.cost, exact.cost, 1e-9), "{} vs {}", fast.cost, exact.cost);
        prop_assert!(fast.schedule.states().iter().all(|&x| x <= m));
        prop_assert!(fast.padded_m.is_power_of_two() && fast.padded_m >= m);
        prop_assert!(fast.states_probed <= 5 * t * fast.iterations || fast.iterations == 1);
    }

    #[test]
    fn iterations_never_get_worse(seed in any::<u64>(), t in 1usize..20, log_m in 3u32..9) {
        let p = random_instance(&mut rng(seed), t, 1 << log_m, 1.0, 3.0);
        let res = solve_poly(&p).unwrap();
        prop_assert_eq!(res.iterations as u32, log_m - 1);
        for w in res.iteration_costs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0));
        }
    }

    #[test]
    fn coarser_grids_cost_more(seed in any::<u64>(), t in 1usize..15, k in 1u32..4) {
        let p = random_instance(&mut rng(seed), t, 16, 0.8, 3.0);
        let fine = dp_full(&p).unwrap().cost;
        let coarse = dp_full(&restrict_phi(&p, k)).unwrap().cost;
        prop_assert!(coarse >= fine - 1e-12);
        prop_assert_eq!(restrict_phi(&p, k).allowed, AllowedStates::MultiplesOf { log2_step: k });
    }

    #[test]
    fn psi_is_a_cost_isometry(seed in any::<u64>(), t in 1usize..15, l in 0u32..4) {
        let mut r = rng(seed);
        let p = restrict_phi(&random_instance(&mut r, t, 32, 1.7, 3.0), l);
        let q = scale_psi(&p, l).unwrap();
        let s = common::random_schedule(&mut r, t, 32, 1 << l);
        let scaled = Schedule(s.0.iter().map(|x| x >> l).collect());
        prop_assert_eq!(eval_cost(&p, &s).unwrap().total, eval_cost(&q, &scaled).unwrap().total);
        prop_assert_eq!(dp_full(&p).unwrap().cost, dp_full(&q).unwrap().cost);
    }

    #[test]
    fn rounded_fractional_optimum_stays_optimal(seed in any::<u64>(), t in 1usize..12, m in 1u64..10, grid in prop::sample::select(vec![2u64, 4])) {
        let p = random_instance(&mut rng(seed), t, m, 1.1, 3.0);
        let integral = dp_full(&p).unwrap().cost;
        let frac = fractional_optimum(&p, grid).unwrap();
        let frac_cost = dp_full(&refine_grid(&p, grid).unwrap()).unwrap().cost;
        prop_assert!(rel_close(frac_cost, integral, 1e-9), "{} vs {}", frac_cost, integral);
        let (lo, hi) = round_fractional(&frac);
        prop_assert!(rel_close(eval_cost(&p, &lo).unwrap().total, integral, 1e-9));
        prop_assert!(rel_close(eval_cost(&p, &hi).unwrap().total, integral, 1e-9));
    }
}
