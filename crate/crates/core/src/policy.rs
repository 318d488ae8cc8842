//! Online policies behind a common interface.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lcp::LcpState;
use crate::model::CostFunction;
use crate::randomized::{AlgorithmBState, FractionalPolicy, RoundingState};

/// An online policy that commits to a state after seeing each function.
pub trait OnlinePolicy: Send {
    fn name(&self) -> &'static str;
    fn step(&mut self, f: &CostFunction) -> Result<f64>;
    /// Whether every emitted state is an integer.
    fn is_integral(&self) -> bool;
    /// `E[x_t]` over the policy's internal randomness, when known in closed
    /// form. Black-box policies return `None`.
    fn expected_state(&self) -> Option<f64>;
}

pub struct LcpPolicy {
    state: LcpState,
}

impl LcpPolicy {
    pub fn new(m: u64, beta: f64) -> Result<Self> {
        Ok(LcpPolicy { state: LcpState::new(m, beta)? })
    }

    pub fn state(&self) -> &LcpState {
        &self.state
    }
}

impl OnlinePolicy for LcpPolicy {
    fn name(&self) -> &'static str {
        "lcp"
    }

    fn step(&mut self, f: &CostFunction) -> Result<f64> {
        Ok(self.state.step(f)?.x_lcp as f64)
    }

    fn is_integral(&self) -> bool {
        true
    }

    fn expected_state(&self) -> Option<f64> {
        Some(self.state.x_lcp() as f64)
    }
}

pub struct AlgorithmBPolicy {
    state: AlgorithmBState,
}

impl AlgorithmBPolicy {
    pub fn new(eps: f64) -> Result<Self> {
        Ok(AlgorithmBPolicy { state: AlgorithmBState::new(eps)? })
    }
}

impl OnlinePolicy for AlgorithmBPolicy {
    fn name(&self) -> &'static str {
        "algorithm-b"
    }

    fn step(&mut self, f: &CostFunction) -> Result<f64> {
        FractionalPolicy::step(&mut self.state, f)
    }

    fn is_integral(&self) -> bool {
        false
    }

    fn expected_state(&self) -> Option<f64> {
        Some(self.state.b())
    }
}

/// Online randomized rounding of a fractional policy.
pub struct RoundingPolicy<P> {
    inner: P,
    rounding: RoundingState,
}

impl<P: FractionalPolicy> RoundingPolicy<P> {
    pub fn new(inner: P, seed: u64, stream: u64) -> Self {
        RoundingPolicy { inner, rounding: RoundingState::new(seed, stream) }
    }

    pub fn fractional_state(&self) -> f64 {
        self.rounding.xbar
    }
}

impl<P: FractionalPolicy> OnlinePolicy for RoundingPolicy<P> {
    fn name(&self) -> &'static str {
        "random-round"
    }

    fn step(&mut self, f: &CostFunction) -> Result<f64> {
        let xbar = self.inner.step(f)?;
        Ok(self.rounding.advance(xbar)? as f64)
    }

    fn is_integral(&self) -> bool {
        true
    }

    fn expected_state(&self) -> Option<f64> {
        // each marginal is exact, so E[x_t] = x̄_t
        Some(self.rounding.xbar)
    }
}

/// Hides the expected state of the wrapped policy.
pub struct Opaque(pub Box<dyn OnlinePolicy>);

impl OnlinePolicy for Opaque {
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn step(&mut self, f: &CostFunction) -> Result<f64> {
        self.0.step(f)
    }

    fn is_integral(&self) -> bool {
        self.0.is_integral()
    }

    fn expected_state(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Lcp,
    AlgorithmB,
    RandomRound,
}

/// Everything needed to instantiate a policy for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyContext {
    pub m: u64,
    /// Up-only switching price.
    pub beta: f64,
    pub eps: f64,
    pub seed: u64,
    pub stream: u64,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Lcp, PolicyKind::AlgorithmB, PolicyKind::RandomRound];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Lcp => "lcp",
            PolicyKind::AlgorithmB => "algorithm-b",
            PolicyKind::RandomRound => "random-round",
        }
    }

    pub fn is_randomized(self) -> bool {
        self == PolicyKind::RandomRound
    }

    /// Builds a policy. Randomized rounding wraps algorithm B.
    pub fn build(self, ctx: &PolicyContext) -> Result<Box<dyn OnlinePolicy>> {
        Ok(match self {
            PolicyKind::Lcp => Box::new(LcpPolicy::new(ctx.m, ctx.beta)?),
            PolicyKind::AlgorithmB => Box::new(AlgorithmBPolicy::new(ctx.eps)?),
            PolicyKind::RandomRound => Box::new(RoundingPolicy::new(
                AlgorithmBState::new(ctx.eps)?,
                ctx.seed,
                ctx.stream,
            )),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in PolicyKind::ALL {
            assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
        }
        assert!("offline".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn rounding_policy_expectation_tracks_fractional_state() {
        let ctx = PolicyContext { m: 1, beta: 2.0, eps: 0.5, seed: 1, stream: 0 };
        let mut p = PolicyKind::RandomRound.build(&ctx).unwrap();
        let phi1 = CostFunction::affine_abs(0.5, 1.0);
        let x = p.step(&phi1).unwrap();
        assert!(x == 0.0 || x == 1.0);
        assert_eq!(p.expected_state(), Some(0.25));
        assert_eq!(Opaque(p).expected_state(), None);
    }
}
