//! Exact offline optimization.
//!
//! The problem is a shortest path in a layered graph with one column per time
//! slot and one vertex per allowed state. [`dp_optimal`] solves it over an
//! arbitrary subset of rows; [`solve_poly`] repeatedly solves it over at most
//! five rows per column, halving the row spacing each iteration, for a total
//! of `O(T log m)` work.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    eval_cost, AllowedStates, CostBreakdown, CostFunction, FractionalSchedule, Horizon,
    ProblemInstance, Schedule, SwitchRates,
};

/// Padding slope increment used by [`solve_poly`].
pub const DEFAULT_PAD_EPS: f64 = 1.0;

/// Sorted candidate states for every column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnCandidates(Vec<Vec<u64>>);

impl ColumnCandidates {
    /// Sorts and deduplicates every column; rejects empty columns.
    pub fn new(mut columns: Vec<Vec<u64>>) -> Result<Self> {
        for (t, col) in columns.iter_mut().enumerate() {
            if col.is_empty() {
                return Err(Error::Shape(format!("candidate set for t={} is empty", t + 1)));
            }
            col.sort_unstable();
            col.dedup();
        }
        Ok(ColumnCandidates(columns))
    }

    /// Every allowed state in every column.
    pub fn full(instance: &ProblemInstance) -> Self {
        let col = instance.allowed.enumerate(instance.m);
        ColumnCandidates(vec![col; instance.horizon()])
    }

    pub fn columns(&self) -> &[Vec<u64>] {
        &self.0
    }

    pub fn horizon(&self) -> usize {
        self.0.len()
    }

    pub fn total_states(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    pub schedule: Schedule,
    /// Re-evaluated total cost of `schedule` on the input instance.
    pub cost: f64,
    pub breakdown: CostBreakdown,
    pub iterations: usize,
    pub states_probed: usize,
    /// `m` after padding to a power of two (equal to `m` if no padding).
    pub padded_m: u64,
    /// Optimum of each iteration, on the padded instance.
    pub iteration_costs: Vec<f64>,
}

/// For every state `s` in `sources`, `min_d rates.cost(s, d) + value[d]` over
/// `d ∈ dests`. Both slices ascending; linear time.
fn transition_min(sources: &[u64], dests: &[u64], value: &[f64], rates: SwitchRates) -> Vec<f64> {
    // suffix[j] = min_{j' >= j} value[j'] + up·d_j'
    let mut suffix = vec![f64::INFINITY; dests.len() + 1];
    for j in (0..dests.len()).rev() {
        suffix[j] = suffix[j + 1].min(value[j] + rates.up * dests[j] as f64);
    }
    let mut out = Vec::with_capacity(sources.len());
    let mut j = 0;
    // running min over dests <= s of value[d] − down·d
    let mut prefix = f64::INFINITY;
    for &s in sources {
        while j < dests.len() && dests[j] <= s {
            prefix = prefix.min(value[j] - rates.down * dests[j] as f64);
            j += 1;
        }
        let sf = s as f64;
        let below = prefix + rates.down * sf;
        let above = suffix[j] - rates.up * sf;
        out.push(below.min(above));
    }
    out
}

#[inline]
fn tie_tol(v: f64) -> f64 {
    1e-12 * v.abs().max(1.0)
}

/// Core shortest-path routine returning the lexicographically smallest
/// optimal schedule and its cost on the given candidates.
fn layered_shortest_path(
    functions: &[CostFunction],
    columns: &ColumnCandidates,
    rates: SwitchRates,
    horizon: Horizon,
) -> Result<(Schedule, f64)> {
    let cols = columns.columns();
    let t_len = cols.len();
    if t_len != functions.len() {
        return Err(Error::Shape(format!(
            "{} candidate columns for {} time slots",
            t_len,
            functions.len()
        )));
    }
    // cost_to_go[t][i]: cheapest cost of slots t.. (incl. f_t and the
    // terminal return) given x_t = cols[t][i].
    let mut cost_to_go: Vec<Vec<f64>> = vec![Vec::new(); t_len];
    cost_to_go[t_len - 1] = cols[t_len - 1]
        .iter()
        .map(|&x| functions[t_len - 1].at(x) + rates.terminal(x as f64, horizon))
        .collect();
    for t in (0..t_len - 1).rev() {
        let next = transition_min(&cols[t], &cols[t + 1], &cost_to_go[t + 1], rates);
        cost_to_go[t] = cols[t]
            .iter()
            .zip(next)
            .map(|(&x, g)| functions[t].at(x) + g)
            .collect();
    }
    let mut states = Vec::with_capacity(t_len);
    let mut prev = 0.0;
    let mut optimum = f64::NAN;
    for t in 0..t_len {
        let scores: Vec<f64> = cols[t]
            .iter()
            .zip(&cost_to_go[t])
            .map(|(&x, &g)| rates.cost(prev, x as f64) + g)
            .collect();
        let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            return Err(Error::Infeasible {
                t: t + 1,
                reason: "no candidate state has finite cost".into(),
            });
        }
        if t == 0 {
            optimum = best;
        }
        let tol = tie_tol(best);
        let i = scores.iter().position(|&s| s <= best + tol).expect("finite minimum exists");
        let x = cols[t][i];
        states.push(x);
        prev = x as f64;
    }
    Ok((Schedule(states), optimum))
}

fn check_columns(instance: &ProblemInstance, columns: &ColumnCandidates) -> Result<()> {
    for (t, col) in columns.columns().iter().enumerate() {
        if col.is_empty() {
            return Err(Error::Shape(format!("candidate set for t={} is empty", t + 1)));
        }
        for &x in col {
            if x > instance.m || !instance.allowed.contains(x) {
                return Err(Error::Domain(format!(
                    "candidate {} for t={} is not an allowed state",
                    x,
                    t + 1
                )));
            }
        }
    }
    Ok(())
}

/// Minimum-cost schedule restricted to `columns`.
///
/// Among equal-cost optima the lexicographically smallest one is returned.
pub fn dp_optimal(instance: &ProblemInstance, columns: &ColumnCandidates) -> Result<SolveResult> {
    dp_optimal_with(instance, columns, Horizon::Closed)
}

/// [`dp_optimal`] with an explicit horizon; `SolveResult::cost` is the
/// optimum under that horizon.
pub fn dp_optimal_with(
    instance: &ProblemInstance,
    columns: &ColumnCandidates,
    horizon: Horizon,
) -> Result<SolveResult> {
    instance.check_basic()?;
    check_columns(instance, columns)?;
    let (schedule, _) =
        layered_shortest_path(&instance.functions, columns, instance.rates(), horizon)?;
    let breakdown = crate::model::eval_cost_with(instance, &schedule, horizon)?;
    Ok(SolveResult {
        schedule,
        cost: breakdown.total,
        breakdown,
        iterations: 1,
        states_probed: columns.total_states(),
        padded_m: instance.m,
        iteration_costs: vec![breakdown.total],
    })
}

/// Full-column dynamic program over every allowed state. `O(T·m)` time and
/// memory; used as the ground-truth oracle.
pub fn dp_full(instance: &ProblemInstance) -> Result<SolveResult> {
    dp_optimal(instance, &ColumnCandidates::full(instance))
}

/// Extends `m` to the next power of two; states beyond the old `m` cost
/// `x·(f_t(m) + eps_pad)` and are never optimal.
pub fn pad_to_power_of_two(instance: &ProblemInstance, eps_pad: f64) -> ProblemInstance {
    let m = instance.m;
    let padded = m.next_power_of_two();
    if padded == m {
        return instance.clone();
    }
    let functions = instance
        .functions
        .iter()
        .map(|f| CostFunction::Padded {
            slope: f.at(m) + eps_pad,
            inner: Arc::new(f.clone()),
            m,
        })
        .collect();
    ProblemInstance { m: padded, functions, ..instance.clone() }
}

/// Candidate columns `{x̂_t + ξ·2^(k−1) : ξ ∈ −2..=2} ∩ [0, m]`.
pub fn refine_candidates(xhat: &Schedule, k: u32, m: u64) -> Result<ColumnCandidates> {
    if k == 0 {
        return Err(Error::Alignment("refinement level k must be at least 1".into()));
    }
    let step = 1u64 << k;
    let half = step / 2;
    let mut cols = Vec::with_capacity(xhat.len());
    for (t, &x) in xhat.states().iter().enumerate() {
        if x % step != 0 {
            return Err(Error::Alignment(format!(
                "x̂_{} = {} is not a multiple of 2^{}",
                t + 1,
                x,
                k
            )));
        }
        let col: Vec<u64> = (-2i64..=2)
            .map(|xi| x as i64 + xi * half as i64)
            .filter(|&s| s >= 0 && s as u64 <= m)
            .map(|s| s as u64)
            .collect();
        cols.push(col);
    }
    ColumnCandidates::new(cols)
}

/// Optimal schedule in `O(T log m)` via iterative five-row refinement.
pub fn solve_poly(instance: &ProblemInstance) -> Result<SolveResult> {
    instance.check_basic()?;
    let padded = pad_to_power_of_two(instance, DEFAULT_PAD_EPS);
    let big_m = padded.m;
    let log_m = big_m.trailing_zeros();
    let finest = instance.allowed.log2_step();
    if big_m < 4 || finest + 2 >= log_m {
        // at most five allowed rows anyway
        let mut res = dp_full(instance)?;
        res.padded_m = big_m;
        return Ok(res);
    }
    let top = log_m - 2;
    let rates = padded.rates();
    let first: Vec<u64> = (0..=4).map(|xi| xi * (big_m / 4)).collect();
    let mut columns = ColumnCandidates(vec![first; padded.horizon()]);
    let mut states_probed = columns.total_states();
    let (mut xhat, cost) =
        layered_shortest_path(&padded.functions, &columns, rates, Horizon::Closed)?;
    let mut iteration_costs = vec![cost];
    for k in (finest + 1..=top).rev() {
        columns = refine_candidates(&xhat, k, big_m)?;
        states_probed += columns.total_states();
        let (next, cost) =
            layered_shortest_path(&padded.functions, &columns, rates, Horizon::Closed)?;
        xhat = next;
        iteration_costs.push(cost);
    }
    if let Some((t, &x)) = xhat.states().iter().enumerate().find(|(_, &x)| x > instance.m) {
        return Err(Error::Contract(format!(
            "padded state {} selected at t={} (m = {})",
            x,
            t + 1,
            instance.m
        )));
    }
    let breakdown = eval_cost(instance, &xhat)?;
    Ok(SolveResult {
        schedule: xhat,
        cost: breakdown.total,
        breakdown,
        iterations: iteration_costs.len(),
        states_probed,
        padded_m: big_m,
        iteration_costs,
    })
}

/// `Φ_k`: restrict the allowed states to multiples of `2^k`.
pub fn restrict_phi(instance: &ProblemInstance, k: u32) -> ProblemInstance {
    let log2_step = instance.allowed.log2_step().max(k);
    ProblemInstance { allowed: AllowedStates::from_log2_step(log2_step), ..instance.clone() }
}

/// `Ψ_l`: divide every state by `2^l`, multiply `β` by `2^l` and evaluate
/// `f'_t(x) = f_t(x·2^l)`. Costs of corresponding schedules are identical.
pub fn scale_psi(instance: &ProblemInstance, l: u32) -> Result<ProblemInstance> {
    let factor = 1u64 << l;
    if !instance.m.is_multiple_of(factor) {
        return Err(Error::Alignment(format!("m = {} is not divisible by 2^{}", instance.m, l)));
    }
    let step_log2 = instance.allowed.log2_step();
    if step_log2 < l {
        return Err(Error::Alignment(format!(
            "allowed states are multiples of 2^{step_log2}, not of 2^{l}"
        )));
    }
    if l == 0 {
        return Ok(instance.clone());
    }
    let functions = instance
        .functions
        .iter()
        .map(|f| CostFunction::Scaled { inner: Arc::new(f.clone()), factor: factor as f64 })
        .collect();
    Ok(ProblemInstance {
        m: instance.m / factor,
        beta: instance.beta * factor as f64,
        functions,
        allowed: AllowedStates::from_log2_step(step_log2 - l),
        convention: instance.convention,
    })
}

/// Image of a schedule under `Ψ_l`.
pub fn scale_schedule(schedule: &Schedule, l: u32) -> Result<Schedule> {
    let factor = 1u64 << l;
    schedule
        .states()
        .iter()
        .enumerate()
        .map(|(t, &x)| {
            if x % factor == 0 {
                Ok(x / factor)
            } else {
                Err(Error::Alignment(format!("x_{} = {} is not a multiple of 2^{}", t + 1, x, l)))
            }
        })
        .collect::<Result<Vec<_>>>()
        .map(Schedule)
}

/// Refines the state grid to multiples of `1/factor`: the returned instance
/// has `m·factor` integer states, `β/factor`, and `f'_t(y) = f_t(y/factor)`
/// using each function's real extension (tables interpolate linearly).
/// Dividing its schedules by `factor` gives fractional schedules of the
/// original instance at the same cost.
pub fn refine_grid(instance: &ProblemInstance, factor: u64) -> Result<ProblemInstance> {
    if factor == 0 {
        return Err(Error::Config("grid refinement factor must be positive".into()));
    }
    if instance.allowed != AllowedStates::All {
        return Err(Error::Config("grid refinement needs an unrestricted state set".into()));
    }
    let functions = instance
        .functions
        .iter()
        .map(|f| CostFunction::Scaled { inner: Arc::new(f.clone()), factor: 1.0 / factor as f64 })
        .collect();
    Ok(ProblemInstance {
        m: instance.m * factor,
        beta: instance.beta / factor as f64,
        functions,
        allowed: AllowedStates::All,
        convention: instance.convention,
    })
}

/// Optimal fractional schedule on the grid of multiples of `1/factor`.
pub fn fractional_optimum(instance: &ProblemInstance, factor: u64) -> Result<FractionalSchedule> {
    let refined = refine_grid(instance, factor)?;
    let res = dp_full(&refined)?;
    Ok(FractionalSchedule(
        res.schedule.states().iter().map(|&y| y as f64 / factor as f64).collect(),
    ))
}

/// Componentwise floor and ceiling. Values within `1e-9` of an integer are
/// snapped to it first.
pub fn round_fractional(xbar: &FractionalSchedule) -> (Schedule, Schedule) {
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() <= 1e-9 {
            r
        } else {
            x
        }
    };
    let floor = xbar.0.iter().map(|&x| snap(x).floor().max(0.0) as u64).collect();
    let ceil = xbar.0.iter().map(|&x| snap(x).ceil().max(0.0) as u64).collect();
    (Schedule(floor), Schedule(ceil))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(m: u64, beta: f64, tabs: &[&[f64]]) -> ProblemInstance {
        ProblemInstance::new(m, beta, tabs.iter().map(|v| CostFunction::table(v.to_vec())).collect())
    }

    #[test]
    fn transition_min_matches_brute_force() {
        let rates = SwitchRates { up: 1.5, down: 0.25 };
        let src = [0u64, 2, 3, 7];
        let dst = [1u64, 3, 4, 6];
        let val = [3.0, 0.5, 2.0, -1.0];
        let got = transition_min(&src, &dst, &val, rates);
        for (i, &s) in src.iter().enumerate() {
            let want = dst
                .iter()
                .zip(&val)
                .map(|(&d, &v)| rates.cost(s as f64, d as f64) + v)
                .fold(f64::INFINITY, f64::min);
            assert!((got[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dp_small_examples() {
        let p = tables(2, 1.0, &[&[3.0, 1.0, 0.0], &[0.0, 1.0, 3.0], &[3.0, 1.0, 0.0]]);
        assert_eq!(dp_full(&p).unwrap().cost, 4.0);

        let p = tables(3, 2.0, &[&[0.0; 4][..]; 4]);
        let r = dp_full(&p).unwrap();
        assert_eq!(r.schedule, Schedule::zeros(4));
        assert_eq!(r.cost, 0.0);

        let p = tables(1, 1.0, &[&[5.0, 0.0]]);
        let r = dp_full(&p).unwrap();
        assert_eq!(r.schedule, Schedule(vec![1]));
        assert_eq!(r.cost, 1.0);
    }

    #[test]
    fn dp_rejects_empty_column() {
        assert!(matches!(ColumnCandidates::new(vec![vec![0], vec![]]), Err(Error::Shape(_))));
    }

    #[test]
    fn dp_prefers_lexicographically_smallest() {
        // staying at 0 or moving to 1 both cost 1
        let p = tables(1, 1.0, &[&[1.0, 0.0]]);
        assert_eq!(dp_full(&p).unwrap().schedule, Schedule(vec![0]));
    }

    #[test]
    fn padding() {
        let f: Vec<f64> = vec![4.0, 2.0, 1.0, 0.5, 0.25, 0.0];
        let p = ProblemInstance::new(5, 1.0, vec![CostFunction::table(f.clone())]);
        let q = pad_to_power_of_two(&p, 1.0);
        assert_eq!(q.m, 8);
        for x in 0..=5 {
            assert_eq!(q.functions[0].at(x), f[x as usize]);
        }
        assert_eq!(q.functions[0].at(6), 6.0 * (0.0 + 1.0));
        assert_eq!(q.functions[0].at(8), 8.0);
        let r = tables(8, 1.0, &[&[0.0; 9]]);
        assert_eq!(pad_to_power_of_two(&r, 1.0), r);
    }

    #[test]
    fn refine_examples() {
        let c = refine_candidates(&Schedule(vec![4]), 2, 8).unwrap();
        assert_eq!(c.columns()[0], vec![0, 2, 4, 6, 8]);
        let c = refine_candidates(&Schedule(vec![0]), 1, 8).unwrap();
        assert_eq!(c.columns()[0], vec![0, 1, 2]);
        let c = refine_candidates(&Schedule(vec![8]), 1, 8).unwrap();
        assert_eq!(c.columns()[0], vec![6, 7, 8]);
        assert!(matches!(
            refine_candidates(&Schedule(vec![2]), 2, 8),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn poly_matches_dp_on_quadratics() {
        let f1: Vec<f64> = (0..=8).map(|x| ((x - 3) * (x - 3)) as f64).collect();
        let f2: Vec<f64> = (0..=8).map(|x| ((x - 5) * (x - 5)) as f64).collect();
        let p = tables(8, 1.0, &[&f1, &f2]);
        assert_eq!(solve_poly(&p).unwrap().cost, dp_full(&p).unwrap().cost);
    }

    #[test]
    fn poly_single_iteration_at_m4() {
        let p = tables(4, 1.0, &[&[4.0, 1.0, 0.0, 1.0, 4.0], &[0.0, 1.0, 2.0, 3.0, 4.0]]);
        let r = solve_poly(&p).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.schedule, dp_full(&p).unwrap().schedule);
    }

    #[test]
    fn poly_zero_functions() {
        let p = ProblemInstance::new(1 << 20, 3.0, vec![CostFunction::affine_abs(0.0, 0.0); 10]);
        let r = solve_poly(&p).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.schedule, Schedule::zeros(10));
    }

    #[test]
    fn poly_never_returns_padded_states() {
        let f: Vec<f64> = vec![10.0, 8.0, 6.0, 4.0, 2.0, 0.0];
        let p = tables(5, 0.5, &[&f, &f, &f]);
        let r = solve_poly(&p).unwrap();
        assert_eq!(r.padded_m, 8);
        assert!(r.schedule.states().iter().all(|&x| x <= 5));
        assert_eq!(r.cost, dp_full(&p).unwrap().cost);
    }

    #[test]
    fn psi_example() {
        let f: Vec<f64> = (0..=8).map(|x| x as f64 * 0.5).collect();
        let p = restrict_phi(&tables(8, 1.0, &[&f]), 1);
        let q = scale_psi(&p, 1).unwrap();
        assert_eq!((q.m, q.beta), (4, 2.0));
        assert_eq!(q.allowed, AllowedStates::All);
        for x in 0..=4 {
            assert_eq!(q.functions[0].at(x), f[2 * x as usize]);
        }
        let all = tables(8, 1.0, &[&f]);
        assert!(matches!(scale_psi(&all, 1), Err(Error::Alignment(_))));
        assert_eq!(restrict_phi(&all, 0), all);
    }

    #[test]
    fn rounding_examples() {
        let (lo, hi) = round_fractional(&FractionalSchedule(vec![1.5, 1.5]));
        assert_eq!((lo.0, hi.0), (vec![1, 1], vec![2, 2]));
        let (lo, hi) = round_fractional(&FractionalSchedule(vec![0.0, 3.0, 2.0]));
        assert_eq!(lo, hi);
        assert_eq!(lo.0, vec![0, 3, 2]);
    }
}
