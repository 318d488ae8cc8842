//! Lazy Capacity Provisioning.
//!
//! The online algorithm keeps `Ĉ^L_τ(x)`, the cheapest cost of serving the
//! first `τ` slots and ending in state `x`, where only powering up is charged.
//! The lower bound `x^L_τ` is its smallest minimizer; the upper bound `x^U_τ`
//! is the largest minimizer of `Ĉ^L_τ(x) − βx`. LCP stays where it is unless
//! that leaves the band `[x^L_τ, x^U_τ]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{eval_cost, AllowedStates, CostBreakdown, CostFunction, ProblemInstance, Schedule};

/// Largest `m` accepted by default; the state array is dense.
pub const DEFAULT_MAX_M: u64 = 1 << 20;

const ARGMIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LcpDecision {
    pub x_l: u64,
    pub x_u: u64,
    pub x_lcp: u64,
}

#[derive(Debug, Clone)]
pub struct LcpState {
    m: u64,
    beta: f64,
    tau: usize,
    /// `Ĉ^L_τ` minus `offset`; the minimum is kept at zero.
    cl: Vec<f64>,
    offset: f64,
    x_lcp: u64,
    history: Vec<LcpDecision>,
}

impl LcpState {
    /// `lcp_init`: `Ĉ^L_0(x) = βx`, i.e. the cost of reaching `x` from zero.
    pub fn new(m: u64, beta: f64) -> Result<Self> {
        Self::with_max_m(m, beta, DEFAULT_MAX_M)
    }

    pub fn with_max_m(m: u64, beta: f64, max_m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("m must be positive".into()));
        }
        if m > max_m {
            return Err(Error::Config(format!("m = {m} exceeds the LCP limit {max_m}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        Ok(LcpState {
            m,
            beta,
            tau: 0,
            cl: (0..=m).map(|x| beta * x as f64).collect(),
            offset: 0.0,
            x_lcp: 0,
            history: Vec::new(),
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn x_lcp(&self) -> u64 {
        self.x_lcp
    }

    pub fn history(&self) -> &[LcpDecision] {
        &self.history
    }

    /// `Ĉ^L_τ(x)` for all `x`.
    pub fn lower_cost(&self) -> Vec<f64> {
        self.cl.iter().map(|&c| c + self.offset).collect()
    }

    /// `Ĉ^L_τ` shifted so that its minimum is zero.
    pub fn lower_cost_normalized(&self) -> &[f64] {
        &self.cl
    }

    /// `lcp_step`: consumes `f_τ` and returns the new bounds and LCP state.
    pub fn step(&mut self, f: &CostFunction) -> Result<LcpDecision> {
        let n = self.cl.len();
        let beta = self.beta;
        let mut next = vec![0.0; n];
        // stay-or-descend: min over x' >= x of CL(x')
        let mut suffix = f64::INFINITY;
        for x in (0..n).rev() {
            suffix = suffix.min(self.cl[x]);
            next[x] = suffix;
        }
        // ascend: min over x' <= x of CL(x') − βx', plus βx
        let mut prefix = f64::INFINITY;
        for (x, (slot, &cl)) in next.iter_mut().zip(&self.cl).enumerate() {
            let xf = x as f64;
            prefix = prefix.min(cl - beta * xf);
            let fx = f.at(x as u64);
            if fx.is_nan() {
                return Err(Error::Domain(format!("f_{}({}) is NaN", self.tau + 1, x)));
            }
            *slot = slot.min(prefix + beta * xf) + fx;
        }
        let min = next.iter().copied().fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(Error::Infeasible {
                t: self.tau + 1,
                reason: "every state has infinite cost".into(),
            });
        }
        let mut x_l = 0;
        let mut best_l = f64::INFINITY;
        let mut x_u = 0;
        let mut best_u = f64::INFINITY;
        for (x, c) in next.iter_mut().enumerate() {
            *c -= min;
            if *c < best_l - ARGMIN_TOL {
                best_l = *c;
                x_l = x as u64;
            }
            let u = *c - beta * x as f64;
            if u <= best_u + ARGMIN_TOL {
                best_u = best_u.min(u);
                x_u = x as u64;
            }
        }
        if x_l > x_u {
            return Err(Error::NumericalContract(format!(
                "x^L = {x_l} exceeds x^U = {x_u} at τ = {}",
                self.tau + 1
            )));
        }
        self.cl = next;
        self.offset += min;
        self.tau += 1;
        self.x_lcp = self.x_lcp.clamp(x_l, x_u);
        let d = LcpDecision { x_l, x_u, x_lcp: self.x_lcp };
        self.history.push(d);
        Ok(d)
    }
}

/// Optimal offline schedule from the full history of bounds:
/// `x̂_{T+1} = 0`, `x̂_t = clamp(x̂_{t+1}, [x^L_t, x^U_t])`.
pub fn backward_optimal(history: &[LcpDecision], horizon: usize) -> Result<Schedule> {
    if history.len() != horizon {
        return Err(Error::Shape(format!(
            "history covers {} of {} slots",
            history.len(),
            horizon
        )));
    }
    let mut out = vec![0u64; horizon];
    let mut next = 0u64;
    for (t, d) in history.iter().enumerate().rev() {
        next = next.clamp(d.x_l, d.x_u);
        out[t] = next;
    }
    Ok(Schedule(out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LcpTrace {
    pub decisions: Vec<LcpDecision>,
    pub schedule: Schedule,
    pub cost: CostBreakdown,
}

/// Runs LCP over the whole instance. Under the symmetric convention LCP is
/// run with the up-only equivalent `β`, which charges a closed schedule the
/// same amount.
pub fn lcp_run(instance: &ProblemInstance) -> Result<LcpTrace> {
    instance.check_basic()?;
    if instance.allowed != AllowedStates::All {
        return Err(Error::Config("LCP runs on the unrestricted state set".into()));
    }
    let mut state = LcpState::new(instance.m, instance.beta)?;
    for f in &instance.functions {
        state.step(f)?;
    }
    let schedule = Schedule(state.history.iter().map(|d| d.x_lcp).collect());
    let cost = eval_cost(instance, &schedule)?;
    Ok(LcpTrace { decisions: state.history, schedule, cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs1() -> CostFunction {
        CostFunction::table(vec![1.0, 0.0])
    }

    #[test]
    fn init_ramp() {
        let s = LcpState::new(3, 2.0).unwrap();
        assert_eq!(s.lower_cost(), vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(s.x_lcp(), 0);
        assert_eq!(LcpState::new(1, 1.0).unwrap().lower_cost(), vec![0.0, 1.0]);
    }

    #[test]
    fn two_state_example() {
        let mut s = LcpState::new(1, 1.0).unwrap();
        let d1 = s.step(&abs1()).unwrap();
        assert_eq!(s.lower_cost(), vec![1.0, 1.0]);
        assert_eq!(d1, LcpDecision { x_l: 0, x_u: 1, x_lcp: 0 });
        let d2 = s.step(&abs1()).unwrap();
        assert_eq!(s.lower_cost(), vec![2.0, 1.0]);
        assert_eq!(d2, LcpDecision { x_l: 1, x_u: 1, x_lcp: 1 });
        let opt = backward_optimal(s.history(), 2).unwrap();
        assert_eq!(opt, Schedule(vec![1, 1]));
    }

    #[test]
    fn run_example() {
        let p = ProblemInstance::new(1, 1.0, vec![abs1(), abs1()]);
        let tr = lcp_run(&p).unwrap();
        assert_eq!(tr.schedule, Schedule(vec![0, 1]));
        assert_eq!(tr.cost.total, 2.0);
    }

    #[test]
    fn zero_functions_stay_idle() {
        let p = ProblemInstance::new(4, 1.0, vec![CostFunction::affine_abs(0.0, 0.0); 5]);
        let tr = lcp_run(&p).unwrap();
        assert!(tr.decisions.iter().all(|d| d.x_l == 0 && d.x_lcp == 0));
        assert_eq!(tr.cost.total, 0.0);
        assert_eq!(backward_optimal(&tr.decisions, 5).unwrap(), Schedule::zeros(5));
    }

    #[test]
    fn incomplete_history() {
        assert!(matches!(backward_optimal(&[], 1), Err(Error::Shape(_))));
    }
}
