//! Randomized rounding of fractional online schedules.
//!
//! A fractional policy emits `x̄_t ∈ [0, m]`; [`round_step`] turns it into an
//! integral state with `Pr[x_t = ⌈x̄_t⌉] = frac(x̄_t)` while moving as little
//! as possible, so expected operating and switching costs equal those of the
//! fractional schedule under the continuous extension.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::Label;
use crate::error::{Error, Result};
use crate::model::{
    eval_cost, extend_continuous, CostBreakdown, CostFunction, FractionalSchedule,
    ProblemInstance, Schedule,
};

const PROB_TOL: f64 = 1e-9;
const SNAP_TOL: f64 = 1e-9;

/// Independent generator for run `stream` of experiment `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Online fractional decision rule.
pub trait FractionalPolicy: Send {
    fn name(&self) -> &'static str;
    /// Consumes `f_t` and returns `x̄_t`.
    fn step(&mut self, f: &CostFunction) -> Result<f64>;
}

/// Algorithm B on two-level `φ` workloads: `b` moves by `ε/2` towards the
/// minimizer of the current function.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmBState {
    eps: f64,
    level: u64,
    levels: u64,
}

impl AlgorithmBState {
    pub fn new(eps: f64) -> Result<Self> {
        Ok(AlgorithmBState { eps, level: 0, levels: 2 * inverse_eps(eps)? })
    }

    pub fn b(&self) -> f64 {
        self.level as f64 / self.levels as f64
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `b` in units of `ε/2`.
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn levels(&self) -> u64 {
        self.levels
    }
}

/// `1/ε` as an integer, or a configuration error.
pub fn inverse_eps(eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!("ε must lie in (0, 1], got {eps}")));
    }
    let inv = 1.0 / eps;
    let n = inv.round();
    if (inv - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::Config(format!("1/ε must be an integer, got ε = {eps}")));
    }
    Ok(n as u64)
}

/// `b' = max(b − ε/2, 0)` on `φ0`, `min(b + ε/2, 1)` on `φ1`.
pub fn algorithm_b_step(state: &mut AlgorithmBState, label: Label) -> f64 {
    state.level = match label {
        Label::Phi0 => state.level.saturating_sub(1),
        Label::Phi1 => (state.level + 1).min(state.levels),
    };
    state.b()
}

/// Which `φ` a two-level function is, judged by `f(0)` against `f(1)`.
pub fn classify(f: &CostFunction) -> Result<Label> {
    let (f0, f1) = (f.eval(0.0), f.eval(1.0));
    if f0 < f1 {
        Ok(Label::Phi0)
    } else if f1 < f0 {
        Ok(Label::Phi1)
    } else {
        Err(Error::Contract(format!("f(0) = f(1) = {f0}; not a φ function")))
    }
}

impl FractionalPolicy for AlgorithmBState {
    fn name(&self) -> &'static str {
        "algorithm-b"
    }

    fn step(&mut self, f: &CostFunction) -> Result<f64> {
        let label = classify(f)?;
        Ok(algorithm_b_step(self, label))
    }
}

/// Replays a fixed fractional schedule, ignoring the functions.
#[derive(Debug, Clone)]
pub struct Precomputed {
    name: &'static str,
    schedule: FractionalSchedule,
    t: usize,
}

impl Precomputed {
    pub fn new(schedule: FractionalSchedule) -> Self {
        Precomputed { name: "precomputed", schedule, t: 0 }
    }

    /// Optimal fractional schedule on the grid of multiples of `1/grid`.
    pub fn hindsight(instance: &ProblemInstance, grid: u64) -> Result<Self> {
        let schedule = crate::offline::fractional_optimum(instance, grid)?;
        Ok(Precomputed { name: "hindsight", schedule, t: 0 })
    }

    pub fn schedule(&self) -> &FractionalSchedule {
        &self.schedule
    }
}

impl FractionalPolicy for Precomputed {
    fn name(&self) -> &'static str {
        self.name
    }

    fn step(&mut self, _f: &CostFunction) -> Result<f64> {
        let x = *self.schedule.0.get(self.t).ok_or_else(|| {
            Error::Shape(format!("precomputed schedule has only {} slots", self.schedule.len()))
        })?;
        self.t += 1;
        Ok(x)
    }
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SNAP_TOL {
        r
    } else {
        x
    }
}

fn check_prob(p: f64, what: &str) -> Result<f64> {
    if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p) || p.is_nan() {
        return Err(Error::NumericalContract(format!("{what} = {p} is not a probability")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// One rounding step from `x_prev` (a rounding of `x̄_prev`) to a rounding of
/// `x̄_t`.
pub fn round_step<R: Rng + ?Sized>(
    x_prev: u64,
    xbar_prev: f64,
    xbar_t: f64,
    rng: &mut R,
) -> Result<u64> {
    if !(xbar_t >= 0.0 && xbar_t.is_finite()) {
        return Err(Error::Contract(format!("fractional state {xbar_t} is invalid")));
    }
    let xbar_t = snap(xbar_t);
    let xbar_prev = snap(xbar_prev);
    let lo = xbar_t.floor();
    let hi = xbar_t.ceil();
    if lo == hi {
        return Ok(lo as u64);
    }
    let proj = xbar_prev.clamp(lo, hi);
    let xp = x_prev as f64;
    if xbar_prev <= xbar_t {
        if xp == hi {
            return Ok(hi as u64);
        }
        let p_up = check_prob((xbar_t - proj) / (1.0 - (proj - lo)), "p↑")?;
        Ok(if rng.gen::<f64>() < p_up { hi as u64 } else { lo as u64 })
    } else {
        if xp == lo {
            return Ok(lo as u64);
        }
        let denom = if proj == hi { 1.0 } else { proj - lo };
        let p_down = check_prob((proj - xbar_t) / denom, "p↓")?;
        Ok(if rng.gen::<f64>() < p_down { lo as u64 } else { hi as u64 })
    }
}

/// `Pr[x_t = ⌈x̄_t⌉] = frac(x̄_t)`.
pub fn marginal_upper(xbar: f64) -> f64 {
    let x = snap(xbar);
    x - x.floor()
}

/// Current integral state plus the fractional state it rounds.
#[derive(Debug, Clone)]
pub struct RoundingState {
    pub x: u64,
    pub xbar: f64,
    pub rng: ChaCha8Rng,
}

impl RoundingState {
    pub fn new(seed: u64, stream: u64) -> Self {
        RoundingState { x: 0, xbar: 0.0, rng: rng_for(seed, stream) }
    }

    pub fn advance(&mut self, xbar_t: f64) -> Result<u64> {
        self.x = round_step(self.x, self.xbar, xbar_t, &mut self.rng)?;
        self.xbar = xbar_t;
        Ok(self.x)
    }
}

/// Rounds a whole fractional schedule.
pub fn round_schedule<R: Rng + ?Sized>(xbar: &FractionalSchedule, rng: &mut R) -> Result<Schedule> {
    let mut out = Vec::with_capacity(xbar.len());
    let (mut x, mut prev) = (0u64, 0.0);
    for &xb in &xbar.0 {
        x = round_step(x, prev, xb, rng)?;
        prev = xb;
        out.push(x);
    }
    Ok(Schedule(out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingOutcome {
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    pub fractional: FractionalSchedule,
    pub fractional_cost: CostBreakdown,
}

/// Runs `policy` over the instance, rounding each fractional decision online.
pub fn rounding_run(
    policy: &mut dyn FractionalPolicy,
    instance: &ProblemInstance,
    seed: u64,
) -> Result<RoundingOutcome> {
    rounding_run_stream(policy, instance, seed, 0)
}

pub fn rounding_run_stream(
    policy: &mut dyn FractionalPolicy,
    instance: &ProblemInstance,
    seed: u64,
    stream: u64,
) -> Result<RoundingOutcome> {
    instance.check_basic()?;
    let m = instance.m as f64;
    let mut state = RoundingState::new(seed, stream);
    let mut xs = Vec::with_capacity(instance.horizon());
    let mut xbars = Vec::with_capacity(instance.horizon());
    for (t, f) in instance.functions.iter().enumerate() {
        let xb = policy.step(f)?;
        if !(0.0..=m).contains(&xb) {
            return Err(Error::Contract(format!(
                "{} emitted x̄_{} = {} outside [0, {}]",
                policy.name(),
                t + 1,
                xb,
                m
            )));
        }
        xs.push(state.advance(xb)?);
        xbars.push(xb);
    }
    let schedule = Schedule(xs);
    let fractional = FractionalSchedule(xbars);
    let cost = eval_cost(instance, &schedule)?;
    let fractional_cost = extend_continuous(instance).cost(&fractional)?;
    Ok(RoundingOutcome { schedule, cost, fractional, fractional_cost })
}

/// Mean, standard error and count of a Monte-Carlo sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, std_err: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Estimate { mean, std_err: (var / n as f64).sqrt(), n }
    }
}

/// Runs `f(stream_rng, run)` for `runs` independent streams in parallel.
/// Results are in run order and independent of the thread count.
pub fn monte_carlo<T, F>(runs: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            f(&mut rng, i)
        })
        .collect()
}

/// Monte-Carlo estimate of the expected total cost of rounding `xbar`.
pub fn expected_rounded_cost(
    instance: &ProblemInstance,
    xbar: &FractionalSchedule,
    runs: usize,
    seed: u64,
) -> Result<Estimate> {
    let costs = monte_carlo(runs, seed, |rng, _| {
        let s = round_schedule(xbar, rng)?;
        eval_cost(instance, &s).map(|c| c.total)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&costs))
}
