mod common;

use proptest::prelude::*;
use rightsize_core::generate::random_instance;
use rightsize_core::lcp::{backward_optimal, lcp_run, LcpState};
use rightsize_core::model::eval_cost;
use rightsize_core::offline::dp_full;
use rightsize_core::{CostFunction, ProblemInstance, Schedule};

use common::{rel_close, rng, upper_cost_recurrence};

fn up_switching(s: &Schedule, beta: f64) -> f64 {
    let mut prev = 0;
    let mut total = 0.0;
    for &x in s.states() {
        total += beta * x.saturating_sub(prev) as f64;
        prev = x;
    }
    total
}

#[test]
fn backward_optimal_matches_dp() {
    let mut r = rng(21);
    for _ in 0..100 {
        let t = rand::Rng::gen_range(&mut r, 1..=30);
        let m = rand::Rng::gen_range(&mut r, 1..=16);
        let beta = rand::Rng::gen_range(&mut r, 0.1..4.0);
        let p = random_instance(&mut r, t, m, beta, 3.0);
        let tr = lcp_run(&p).unwrap();
        let x = backward_optimal(&tr.decisions, t).unwrap();
        let c = eval_cost(&p, &x).unwrap().total;
        let opt = dp_full(&p).unwrap().cost;
        assert!(rel_close(c, opt, 1e-9), "{c} vs {opt}");
    }
}

#[test]
fn fixed_minimizer_is_reached() {
    let f = common::table(&[4.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
    let p = ProblemInstance::new(5, 1.0, vec![f; 20]);
    let tr = lcp_run(&p).unwrap();
    assert_eq!(*tr.schedule.states().last().unwrap(), 3);
    assert!(tr.cost.total <= 3.0 * dp_full(&p).unwrap().cost + 1e-9);
}

#[test]
fn infeasible_step_is_reported() {
    let mut s = LcpState::new(1, 1.0).unwrap();
    let f = CostFunction::restricted(rightsize_core::UnitLoad { eps: 1.0, slope_k: 1.0 }, 3.0);
    assert!(matches!(s.step(&f), Err(rightsize_core::Error::Infeasible { t: 1, .. })));
}

#[test]
fn state_limit_is_configurable() {
    assert!(LcpState::with_max_m(9, 1.0, 8).is_err());
    assert!(LcpState::with_max_m(8, 1.0, 8).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn upper_cost_identity(seed in any::<u64>(), t in 1usize..20, m in 1u64..12, beta in 0.1f64..4.0) {
        let p = random_instance(&mut rng(seed), t, m, beta, 3.0);
        let upper = upper_cost_recurrence(&p);
        let mut s = LcpState::new(m, beta).unwrap();
        for (tau, f) in p.functions.iter().enumerate() {
            s.step(f).unwrap();
            let lower = s.lower_cost();
            for x in 0..=m as usize {
                let want = upper[tau][x] + beta * x as f64;
                prop_assert!((lower[x] - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "τ={} x={}: {} vs {}", tau + 1, x, lower[x], want);
            }
        }
    }

    #[test]
    fn sandwich_and_band(seed in any::<u64>(), t in 1usize..25, m in 1u64..16, beta in 0.1f64..4.0) {
        let p = random_instance(&mut rng(seed), t, m, beta, 3.0);
        let tr = lcp_run(&p).unwrap();
        let opt = backward_optimal(&tr.decisions, t).unwrap();
        for (d, &x) in tr.decisions.iter().zip(opt.states()) {
            prop_assert!(d.x_l <= x && x <= d.x_u);
            prop_assert!(d.x_l <= d.x_lcp && d.x_lcp <= d.x_u);
        }
    }

    #[test]
    fn three_competitive(seed in any::<u64>(), t in 1usize..30, m in 1u64..24, beta in 0.05f64..6.0) {
        let p = random_instance(&mut rng(seed), t, m, beta, 5.0);
        let alg = lcp_run(&p).unwrap().cost.total;
        let opt = dp_full(&p).unwrap().cost;
        prop_assert!(alg <= 3.0 * opt + 1e-9, "{} vs {}", alg, opt);
    }

    #[test]
    fn switching_dominance(seed in any::<u64>(), t in 1usize..25, m in 1u64..16, beta in 0.1f64..4.0) {
        let p = random_instance(&mut rng(seed), t, m, beta, 3.0);
        let tr = lcp_run(&p).unwrap();
        let opt = backward_optimal(&tr.decisions, t).unwrap();
        prop_assert!(up_switching(&tr.schedule, beta) <= up_switching(&opt, beta) + 1e-9);
    }

    #[test]
    fn monotone_segments(seed in any::<u64>(), t in 1usize..25, m in 1u64..16, beta in 0.1f64..4.0) {
        let p = random_instance(&mut rng(seed), t, m, beta, 3.0);
        let tr = lcp_run(&p).unwrap();
        let opt = backward_optimal(&tr.decisions, t).unwrap();
        // x_0 = 0 and x_{T+1} = 0 bound the outer segments
        let mut lcp = vec![0i64];
        lcp.extend(tr.schedule.states().iter().map(|&x| x as i64));
        lcp.push(0);
        let mut star = vec![0i64];
        star.extend(opt.states().iter().map(|&x| x as i64));
        star.push(0);
        let meets: Vec<usize> = (0..lcp.len()).filter(|&i| lcp[i] == star[i]).collect();
        for w in meets.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b == a + 1 {
                continue;
            }
            let seg = |v: &[i64]| {
                let d: Vec<i64> = v[a..=b].windows(2).map(|p| p[1] - p[0]).collect();
                (d.iter().all(|&x| x >= 0), d.iter().all(|&x| x <= 0))
            };
            let (lu, ld) = seg(&lcp);
            let (su, sd) = seg(&star);
            prop_assert!((lu && su) || (ld && sd), "segment {}..{} not co-monotone", a, b);
        }
    }
}
