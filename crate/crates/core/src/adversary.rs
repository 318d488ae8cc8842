//! Lower-bound adversaries and duels.
//!
//! All duels use `β = 2` with switching charged `β/2` per unit in each
//! direction, and the two-level functions `φ0(x) = ε|x|`, `φ1(x) = ε|x − 1|`
//! on `m = 1`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    eval_real, AllowedStates, Convention, CostFunction, FractionalSchedule, Horizon,
    ProblemInstance, RestrictedInstance, UnitLoad,
};
use crate::offline::{dp_optimal_with, refine_grid, ColumnCandidates};
use crate::policy::{OnlinePolicy, PolicyContext, PolicyKind};
use crate::randomized::{algorithm_b_step, inverse_eps, AlgorithmBState, Estimate};
use rayon::prelude::*;

/// Switching price used by every duel.
pub const DUEL_BETA: f64 = 2.0;
/// Default slope of the continuous restricted embedding.
pub const DEFAULT_K: f64 = (1u64 << 30) as f64;
pub const DEFAULT_REPLICAS: usize = 100_000;

const STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "phi0")]
    Phi0,
    #[serde(rename = "phi1")]
    Phi1,
}

impl Label {
    /// The minimizer of `φ_label`.
    pub fn center(self) -> f64 {
        match self {
            Label::Phi0 => 0.0,
            Label::Phi1 => 1.0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Label::Phi0 => '0',
            Label::Phi1 => '1',
        }
    }
}

pub fn phi(label: Label, eps: f64) -> CostFunction {
    CostFunction::affine_abs(eps, label.center())
}

/// Hex SHA-256 of the label sequence written as a string of `0`/`1`.
pub fn label_digest(labels: &[Label]) -> String {
    let s: String = labels.iter().map(|l| l.as_char()).collect();
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// The deterministic adversary: `φ1` against state 0, `φ0` against state 1.
pub fn discrete_label(state: f64) -> Result<Label> {
    if state == 0.0 {
        Ok(Label::Phi1)
    } else if state == 1.0 {
        Ok(Label::Phi0)
    } else {
        Err(Error::Contract(format!("state {state} is not binary")))
    }
}

pub fn adv_discrete_step(state: u64, eps: f64) -> Result<CostFunction> {
    Ok(phi(discrete_label(state as f64)?, eps))
}

/// Boundary rule first (`a ≤ 0 → φ1`, `a ≥ 1 → φ0`), then `φ1` while
/// `a ≤ b`, otherwise `φ0`.
pub fn continuous_label(a: f64, b: f64) -> Label {
    if a <= 0.0 {
        Label::Phi1
    } else if a >= 1.0 || a > b {
        Label::Phi0
    } else {
        Label::Phi1
    }
}

pub fn adv_continuous_step(a: f64, b: f64, eps: f64) -> CostFunction {
    phi(continuous_label(a, b), eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Discrete,
    Continuous,
    Randomized,
    Restricted,
}

impl Variant {
    pub const ALL: [Variant; 4] =
        [Variant::Discrete, Variant::Continuous, Variant::Randomized, Variant::Restricted];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Discrete => "discrete",
            Variant::Continuous => "continuous",
            Variant::Randomized => "randomized",
            Variant::Restricted => "restricted",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant '{s}'")))
    }
}

/// Which general-model duel a restricted instance embeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Embedding {
    /// `m = 2`, `f(z) = ε|1 − 2z|`, loads `1/2` and `1`; states shifted by one.
    Discrete,
    /// `m = 1`, `f(z) = ε|1 − kz|`, loads `0` and `1/k`.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The state returned to 0 after leaving it.
    Case1,
    /// The state reached 1.
    Case2,
    /// The configured horizon ran out.
    Horizon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryConfig {
    pub eps: f64,
    /// Defaults to `⌈1/ε²⌉`.
    pub horizon: Option<usize>,
    pub variant: Variant,
    pub seed: u64,
    /// Monte-Carlo replicas for randomized policies in the randomized variant.
    pub replicas: usize,
    /// Slope of the continuous restricted embedding.
    pub k: f64,
    /// Continuous and randomized variants end the episode when the tracked
    /// state first reaches 1 or returns to 0, and then charge no final
    /// power-down.
    pub stop_at_boundary: bool,
}

impl AdversaryConfig {
    pub fn new(variant: Variant, eps: f64) -> Self {
        AdversaryConfig {
            eps,
            horizon: None,
            variant,
            seed: 0,
            replicas: DEFAULT_REPLICAS,
            k: DEFAULT_K,
            stop_at_boundary: true,
        }
    }

    pub fn horizon(&self) -> Result<usize> {
        let n = inverse_eps(self.eps)? as usize;
        let t = self.horizon.unwrap_or(n * n);
        if t == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        Ok(t)
    }

    /// The restricted embedding used with `policy`, if the combination is
    /// valid for this variant.
    pub fn check_policy(&self, policy: PolicyKind) -> Result<Option<Embedding>> {
        use PolicyKind::*;
        let ok = match (self.variant, policy) {
            (Variant::Discrete, Lcp | RandomRound) => None,
            (Variant::Continuous, AlgorithmB) => None,
            (Variant::Randomized, RandomRound | Lcp) => None,
            (Variant::Restricted, Lcp) => Some(Embedding::Discrete),
            (Variant::Restricted, AlgorithmB) => Some(Embedding::Continuous),
            (v, p) => {
                return Err(Error::Config(format!(
                    "policy '{p}' cannot play the {v} adversary"
                )))
            }
        };
        Ok(ok)
    }
}

/// The general-model instance for a label sequence.
pub fn phi_instance(labels: &[Label], eps: f64) -> ProblemInstance {
    ProblemInstance::new(1, DUEL_BETA, labels.iter().map(|&l| phi(l, eps)).collect())
        .with_convention(Convention::Symmetric)
}

/// Restricted-model instance whose shifted states pay exactly the `φ` costs.
pub fn build_restricted(
    labels: &[Label],
    embedding: Embedding,
    eps: f64,
    k: f64,
) -> Result<RestrictedInstance> {
    if labels.is_empty() {
        return Err(Error::Shape("label sequence is empty".into()));
    }
    let (m, unit, load): (u64, UnitLoad, fn(Label, f64) -> f64) = match embedding {
        Embedding::Discrete => (2, UnitLoad { eps, slope_k: 2.0 }, |l, _| match l {
            Label::Phi0 => 0.5,
            Label::Phi1 => 1.0,
        }),
        Embedding::Continuous => {
            if !(k >= 1.0 && k.is_finite()) {
                return Err(Error::Config(format!("k must be at least 1, got {k}")));
            }
            (1, UnitLoad { eps, slope_k: k }, |l, k| match l {
                Label::Phi0 => 0.0,
                Label::Phi1 => 1.0 / k,
            })
        }
    };
    Ok(RestrictedInstance {
        m,
        beta: DUEL_BETA,
        unit,
        loads: labels.iter().map(|&l| load(l, k)).collect(),
        convention: Convention::Symmetric,
    })
}

/// State shift between an embedding and the general model.
pub fn embedding_shift(embedding: Embedding) -> u64 {
    match embedding {
        Embedding::Discrete => 1,
        Embedding::Continuous => 0,
    }
}

/// Replaces every `f_t` by `w·m_factor` copies of `f_t/(w·m_factor)`.
pub fn stretch_prediction(
    instance: &ProblemInstance,
    w: u64,
    m_factor: u64,
) -> Result<ProblemInstance> {
    if w == 0 || m_factor == 0 {
        return Err(Error::Config("window and stretch factor must be at least 1".into()));
    }
    let copies = w * m_factor;
    let functions = instance
        .functions
        .iter()
        .flat_map(|f| {
            let inner = Arc::new(f.clone());
            (0..copies).map(move |_| CostFunction::StretchedCopy {
                inner: inner.clone(),
                divisor: copies,
            })
        })
        .collect();
    Ok(ProblemInstance { functions, ..instance.clone() })
}

/// Algorithm B's cost on one episode of labels, truncated where its state
/// first reaches 1 or returns to 0, against the offline optimum of the same
/// prefix. No final power-down is charged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Episode {
    pub rounds: usize,
    pub termination: Termination,
    pub b_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
}

pub fn algorithm_b_episode(labels: &[Label], eps: f64) -> Result<Episode> {
    let mut b = AlgorithmBState::new(eps)?;
    let mut traj = Vec::new();
    let mut termination = Termination::Horizon;
    for &l in labels {
        let x = algorithm_b_step(&mut b, l);
        traj.push(x);
        if let Some(t) = boundary(&traj) {
            termination = t;
            break;
        }
    }
    if traj.is_empty() {
        return Err(Error::Shape("label sequence is empty".into()));
    }
    let inst = phi_instance(&labels[..traj.len()], eps);
    let b_cost = eval_real(&inst, &FractionalSchedule(traj.clone()), Horizon::Open)?.total;
    let opt_cost = dp_optimal_with(&inst, &ColumnCandidates::full(&inst), Horizon::Open)?.cost;
    Ok(Episode { rounds: traj.len(), termination, b_cost, opt_cost, ratio: b_cost / opt_cost })
}

/// Termination of a trajectory ending at its last entry.
fn boundary(traj: &[f64]) -> Option<Termination> {
    let last = *traj.last()?;
    if last >= 1.0 - STATE_TOL {
        Some(Termination::Case2)
    } else if last <= STATE_TOL && traj.iter().any(|&x| x > STATE_TOL) {
        Some(Termination::Case1)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DuelReport {
    pub variant: Variant,
    pub policy: String,
    pub embedding: Option<Embedding>,
    pub eps: f64,
    pub horizon: usize,
    pub rounds: usize,
    pub beta: f64,
    pub convention: Convention,
    pub accounting: Horizon,
    pub termination: Termination,
    /// Mean over replicas for randomized policies.
    pub policy_cost: f64,
    pub policy_cost_std_err: Option<f64>,
    /// The same trajectory charged `β` per unit powered up, with a closed horizon.
    pub policy_cost_up_only: f64,
    pub opt_cost: f64,
    /// `min(Tε/2 + 2, S + 2)`.
    pub analytic_bound: f64,
    pub ratio: f64,
    /// Mean number of slots in which the policy changed state.
    pub switches: f64,
    /// Algorithm B's cost on the realized labels.
    pub reference_b_cost: Option<f64>,
    /// Cost the state shift adds to every closed restricted schedule.
    pub embedding_offset: Option<f64>,
    pub offset_corrected_ratio: Option<f64>,
    /// Ratio of the same policy in the general-model duel.
    pub general_ratio: Option<f64>,
    /// Largest per-slot gap between the restricted and `φ` operating costs
    /// along the policy trajectory.
    pub embedding_gap: Option<f64>,
    pub seed: u64,
    pub replicas: usize,
    pub phi1_count: usize,
    pub label_digest: String,
}

/// Builds a fresh policy for replica `stream`.
pub type PolicyFactory<'a> = dyn Fn(u64) -> Result<Box<dyn OnlinePolicy>> + Sync + 'a;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rule {
    /// Reacts to the realized state of replica 0.
    Discrete,
    /// Compares the expected state with algorithm B's.
    Threshold,
}

/// Per-replica running totals.
#[derive(Debug, Clone, Default)]
struct Tally {
    operating: f64,
    up: f64,
    down: f64,
    last: f64,
    switches: usize,
}

impl Tally {
    fn push(&mut self, x: f64, op: f64) {
        self.operating += op;
        if x >= self.last {
            self.up += x - self.last;
        } else {
            self.down += self.last - x;
        }
        if x != self.last {
            self.switches += 1;
        }
        self.last = x;
    }

    /// Symmetric `β/2` per unit under `horizon`.
    fn symmetric(&self, horizon: Horizon) -> f64 {
        let end = if horizon == Horizon::Closed { self.last } else { 0.0 };
        self.operating + DUEL_BETA / 2.0 * (self.up + self.down + end)
    }

    fn up_only(&self) -> f64 {
        self.operating + DUEL_BETA * self.up
    }
}

struct Played {
    labels: Vec<Label>,
    /// Policy-model costs, one per replica.
    tallies: Vec<Tally>,
    /// General-model trajectory of replica 0.
    first: Vec<f64>,
    b_traj: Vec<f64>,
    termination: Termination,
}

fn play(
    cfg: &AdversaryConfig,
    rule: Rule,
    stop: bool,
    mut replicas: Vec<Box<dyn OnlinePolicy>>,
    shift: f64,
    embed: &(dyn Fn(Label) -> CostFunction + Sync),
) -> Result<Played> {
    let horizon = cfg.horizon()?;
    let n = replicas.len();
    let mut labels = Vec::with_capacity(horizon);
    let mut tallies = vec![Tally::default(); n];
    let mut first = Vec::with_capacity(horizon);
    let mut states = vec![0.0; n];
    let mut b = AlgorithmBState::new(cfg.eps)?;
    let mut b_traj = Vec::with_capacity(horizon);
    let mut a = 0.0;
    let mut a_traj = Vec::with_capacity(horizon);
    let mut termination = Termination::Horizon;
    for t in 0..horizon {
        let label = match rule {
            Rule::Discrete => discrete_label(first.last().copied().unwrap_or(0.0))?,
            Rule::Threshold => continuous_label(a, b.b()),
        };
        let f = embed(label);
        replicas
            .par_iter_mut()
            .zip(tallies.par_iter_mut())
            .zip(states.par_iter_mut())
            .try_for_each(|((p, tally), state)| -> Result<()> {
                let raw = p.step(&f)?;
                let x = raw - shift;
                if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&x) {
                    return Err(Error::Contract(format!(
                        "{} moved to {} at t={}, outside [0, 1]",
                        p.name(),
                        raw,
                        t + 1
                    )));
                }
                let op = f.eval(raw);
                if !op.is_finite() {
                    return Err(Error::Infeasible {
                        t: t + 1,
                        reason: format!("{} chose infeasible state {raw}", p.name()),
                    });
                }
                tally.push(raw, op);
                *state = x.clamp(0.0, 1.0);
                Ok(())
            })?;
        first.push(states[0]);
        b_traj.push(algorithm_b_step(&mut b, label));
        labels.push(label);
        a = match replicas[0].expected_state() {
            Some(e) => (e - shift).clamp(0.0, 1.0),
            None => states.iter().sum::<f64>() / n as f64,
        };
        a_traj.push(a);
        if stop && rule == Rule::Threshold {
            if let Some(term) = boundary(&a_traj) {
                termination = term;
                break;
            }
        }
    }
    Ok(Played { labels, tallies, first, b_traj, termination })
}

/// Runs `policy` against the adversary selected by `cfg`.
pub fn run_duel(policy: PolicyKind, cfg: &AdversaryConfig) -> Result<DuelReport> {
    let embedding = cfg.check_policy(policy)?;
    let m = match embedding {
        Some(Embedding::Discrete) => 2,
        _ => 1,
    };
    let seed = cfg.seed;
    let eps = cfg.eps;
    let factory = move |stream: u64| {
        policy.build(&PolicyContext { m, beta: DUEL_BETA, eps, seed, stream })
    };
    let replicas = if cfg.variant == Variant::Randomized && policy.is_randomized() {
        cfg.replicas.max(1)
    } else {
        1
    };
    let mut report = run_duel_with(cfg, embedding, replicas, &factory)?;
    if let Some(e) = embedding {
        let general = AdversaryConfig {
            variant: match e {
                Embedding::Discrete => Variant::Discrete,
                Embedding::Continuous => Variant::Continuous,
            },
            ..cfg.clone()
        };
        report.general_ratio = Some(run_duel(policy, &general)?.ratio);
    }
    Ok(report)
}

/// Runs a duel with policies from `factory`. `embedding` selects the
/// restricted model (the variant must then be [`Variant::Restricted`]).
pub fn run_duel_with(
    cfg: &AdversaryConfig,
    embedding: Option<Embedding>,
    replicas: usize,
    factory: &PolicyFactory<'_>,
) -> Result<DuelReport> {
    let eps = cfg.eps;
    inverse_eps(eps)?;
    if replicas == 0 {
        return Err(Error::Config("at least one replica is required".into()));
    }
    if (cfg.variant == Variant::Restricted) != embedding.is_some() {
        return Err(Error::Config("restricted duels need an embedding".into()));
    }
    if embedding == Some(Embedding::Continuous) && cfg.k < 2.0 / eps {
        return Err(Error::Config(format!("k = {} is below 2/ε = {}", cfg.k, 2.0 / eps)));
    }
    let horizon = cfg.horizon()?;
    let rule = match (cfg.variant, embedding) {
        (Variant::Discrete, _) | (_, Some(Embedding::Discrete)) => Rule::Discrete,
        _ => Rule::Threshold,
    };
    let stop = rule == Rule::Threshold && cfg.stop_at_boundary;
    let accounting = if stop { Horizon::Open } else { Horizon::Closed };
    let shift = embedding.map_or(0, embedding_shift) as f64;
    let policies = (0..replicas as u64).map(factory).collect::<Result<Vec<_>>>()?;
    let name = policies[0].name().to_string();
    if rule == Rule::Discrete && !policies[0].is_integral() {
        return Err(Error::Config(format!("policy '{name}' is not integral")));
    }
    let k = cfg.k;
    let embed = move |l: Label| match embedding {
        None => phi(l, eps),
        Some(e) => {
            let r = build_restricted(&[l], e, eps, k).expect("one label");
            CostFunction::restricted(r.unit, r.loads[0])
        }
    };
    let played = play(cfg, rule, stop, policies, shift, &embed)?;

    let general = phi_instance(&played.labels, eps);
    let model = match embedding {
        Some(e) => build_restricted(&played.labels, e, eps, cfg.k)?.to_general(),
        None => general.clone(),
    };

    let costs: Vec<f64> = played.tallies.iter().map(|t| t.symmetric(accounting)).collect();
    let est = Estimate::from_samples(&costs);
    let policy_cost = est.mean;
    let policy_cost_up_only =
        played.tallies.iter().map(Tally::up_only).sum::<f64>() / replicas as f64;
    let switches =
        played.tallies.iter().map(|t| t.switches as f64).sum::<f64>() / replicas as f64;

    let opt_cost = match embedding {
        None | Some(Embedding::Discrete) => {
            dp_optimal_with(&model, &ColumnCandidates::full(&model), accounting)?.cost
        }
        Some(Embedding::Continuous) => continuous_restricted_opt(&model, cfg.k, accounting)?,
    };
    let rounds = played.labels.len();
    let analytic_bound = (rounds as f64 * eps / 2.0 + 2.0).min(switches + 2.0);
    let ratio = policy_cost / opt_cost;

    let (embedding_offset, offset_corrected_ratio, embedding_gap) = match embedding {
        None => (None, None, None),
        Some(_) => {
            let rates = model.rates();
            let offset = if accounting == Horizon::Closed {
                rates.up * shift + rates.down * shift
            } else {
                rates.up * shift
            };
            let gap = played
                .first
                .iter()
                .enumerate()
                .map(|(t, &x)| {
                    (model.functions[t].eval(x + shift) - general.functions[t].eval(x)).abs()
                })
                .fold(0.0, f64::max);
            let corrected = (policy_cost - offset) / (opt_cost - offset);
            (Some(offset), Some(corrected), Some(gap))
        }
    };
    let reference_b_cost = match rule {
        Rule::Threshold => {
            Some(eval_real(&general, &FractionalSchedule(played.b_traj.clone()), accounting)?.total)
        }
        Rule::Discrete => None,
    };

    Ok(DuelReport {
        variant: cfg.variant,
        policy: name,
        embedding,
        eps,
        horizon,
        rounds,
        beta: DUEL_BETA,
        convention: Convention::Symmetric,
        accounting,
        termination: played.termination,
        policy_cost,
        policy_cost_std_err: (replicas > 1).then_some(est.std_err),
        policy_cost_up_only,
        opt_cost,
        analytic_bound,
        ratio,
        switches,
        reference_b_cost,
        embedding_offset,
        offset_corrected_ratio,
        general_ratio: None,
        embedding_gap,
        seed: cfg.seed,
        replicas,
        phi1_count: played.labels.iter().filter(|&&l| l == Label::Phi1).count(),
        label_digest: label_digest(&played.labels),
    })
}

/// Optimum of the continuous restricted model. The cost functions are
/// piecewise linear with breakpoints `0`, `1/k` and `1`, so an optimum exists
/// on those states; the problem is solved on the grid refined by `k`.
fn continuous_restricted_opt(model: &ProblemInstance, k: f64, accounting: Horizon) -> Result<f64> {
    if k.fract() != 0.0 {
        return Err(Error::Config(format!("k must be an integer, got {k}")));
    }
    let ku = k as u64;
    debug_assert_eq!(model.allowed, AllowedStates::All);
    let refined = refine_grid(model, ku)?;
    let columns = model
        .functions
        .iter()
        .map(|f| match f {
            CostFunction::RestrictedLoad { load, .. } if *load > 0.0 => vec![1, ku],
            _ => vec![0, 1, ku],
        })
        .collect();
    Ok(dp_optimal_with(&refined, &ColumnCandidates::new(columns)?, accounting)?.cost)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_rule() {
        assert_eq!(discrete_label(0.0).unwrap(), Label::Phi1);
        assert_eq!(discrete_label(1.0).unwrap(), Label::Phi0);
        let seq: Vec<Label> = [0.0, 0.0, 1.0].iter().map(|&s| discrete_label(s).unwrap()).collect();
        assert_eq!(seq, vec![Label::Phi1, Label::Phi1, Label::Phi0]);
        assert_eq!(adv_discrete_step(0, 0.1).unwrap(), CostFunction::affine_abs(0.1, 1.0));
    }

    #[test]
    fn continuous_rule() {
        assert_eq!(continuous_label(0.3, 0.5), Label::Phi1);
        assert_eq!(continuous_label(1.0, 0.2), Label::Phi0);
        assert_eq!(continuous_label(1.0, 1.0), Label::Phi0);
        assert_eq!(continuous_label(0.6, 0.5), Label::Phi0);
        assert_eq!(continuous_label(0.5, 0.5), Label::Phi1);
        assert_eq!(continuous_label(0.0, 0.0), Label::Phi1);
    }

    #[test]
    fn restricted_identities() {
        let eps = 0.1;
        let r = build_restricted(&[Label::Phi0, Label::Phi1], Embedding::Discrete, eps, 0.0).unwrap();
        let g = r.to_general();
        assert!((g.functions[0].eval(2.0) - eps).abs() < 1e-15);
        assert_eq!(g.functions[1].eval(2.0), 0.0);
        let r = build_restricted(&[Label::Phi1], Embedding::Continuous, eps, 100.0).unwrap();
        assert_eq!(r.to_general().functions[0].eval(1.0), 0.0);
        assert!(build_restricted(&[], Embedding::Discrete, eps, 1.0).is_err());
    }

    #[test]
    fn stretch_shapes() {
        let p = ProblemInstance::new(2, 1.0, vec![CostFunction::table(vec![2.0, 1.0, 0.0])]);
        let s = stretch_prediction(&p, 1, 2).unwrap();
        assert_eq!(s.horizon(), 2);
        assert_eq!(s.functions[0].eval(0.0), 1.0);
        let id = stretch_prediction(&p, 1, 1).unwrap();
        assert_eq!(id.functions[0].eval(1.0), 1.0);
    }

    #[test]
    fn invalid_combinations() {
        let cfg = AdversaryConfig::new(Variant::Continuous, 0.1);
        assert!(matches!(run_duel(PolicyKind::Lcp, &cfg), Err(Error::Config(_))));
        let cfg = AdversaryConfig::new(Variant::Discrete, 0.1);
        assert!(matches!(run_duel(PolicyKind::AlgorithmB, &cfg), Err(Error::Config(_))));
        let cfg = AdversaryConfig::new(Variant::Restricted, 0.1);
        assert!(matches!(run_duel(PolicyKind::RandomRound, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn continuous_b_duel() {
        let cfg = AdversaryConfig::new(Variant::Continuous, 0.1);
        let r = run_duel(PolicyKind::AlgorithmB, &cfg).unwrap();
        assert_eq!(r.termination, Termination::Case2);
        assert!((r.ratio - 1.95).abs() < 1e-9, "{}", r.ratio);
    }
}
