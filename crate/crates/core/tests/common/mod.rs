//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rightsize_core::model::eval_cost;
use rightsize_core::{CostFunction, ProblemInstance, Schedule};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Minimum cost over every schedule in `{allowed}^T`, and the first
/// schedule (in lexicographic order) attaining it.
pub fn brute_force(instance: &ProblemInstance) -> (f64, Schedule) {
    let states = instance.allowed.enumerate(instance.m);
    let t = instance.horizon();
    let mut idx = vec![0usize; t];
    let mut best = (f64::INFINITY, Schedule::zeros(t));
    loop {
        let s = Schedule(idx.iter().map(|&i| states[i]).collect());
        if let Ok(c) = eval_cost(instance, &s) {
            if c.total < best.0 {
                best = (c.total, s);
            }
        }
        let mut pos = t;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < states.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `Ĉ^U_τ` by its own recurrence: switching charged on decreases only,
/// starting from state 0.
pub fn upper_cost_recurrence(instance: &ProblemInstance) -> Vec<Vec<f64>> {
    let n = instance.m as usize + 1;
    let beta = instance.beta;
    let mut prev: Vec<f64> = (0..n).map(|x| if x == 0 { 0.0 } else { f64::INFINITY }).collect();
    let mut out = Vec::new();
    for f in &instance.functions {
        let cur: Vec<f64> = (0..n)
            .map(|x| {
                let reach = (0..n)
                    .map(|xp| prev[xp] + beta * (xp as f64 - x as f64).max(0.0))
                    .fold(f64::INFINITY, f64::min);
                reach + f.at(x as u64)
            })
            .collect();
        out.push(cur.clone());
        prev = cur;
    }
    out
}

/// Non-integral fractional schedule in `(0, m)` from a clamped random walk.
pub fn random_walk(rng: &mut ChaCha8Rng, t: usize, m: f64, step: f64) -> Vec<f64> {
    let mut x: f64 = rng.gen_range(0.1..m - 0.1);
    (0..t)
        .map(|_| {
            x = (x + rng.gen_range(-step..=step)).clamp(0.05, m - 0.05);
            if (x - x.round()).abs() < 1e-3 {
                x += 0.01;
            }
            x
        })
        .collect()
}

pub fn random_schedule(rng: &mut ChaCha8Rng, t: usize, m: u64, step: u64) -> Schedule {
    Schedule((0..t).map(|_| rng.gen_range(0..=m / step) * step).collect())
}

pub fn table(values: &[f64]) -> CostFunction {
    CostFunction::table(values.to_vec())
}

pub fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    a == b || (a - b).abs() <= rtol * a.abs().max(b.abs())
}
