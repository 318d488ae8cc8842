//! Problem instances, schedules and cost evaluation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of points probed when checking convexity of closed-form
/// cost functions.
pub const DEFAULT_CONVEXITY_BUDGET: u64 = 1 << 16;

/// Relative tolerance used for cost equality throughout the crate.
pub const COST_RTOL: f64 = 1e-9;

/// Returns true if `a` and `b` agree within `rtol` relative to their magnitude.
pub fn approx_eq(a: f64, b: f64, rtol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(1.0)
}

/// Operating cost of a single server as a function of its load `z`:
/// `z ↦ eps·|1 − slope_k·z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitLoad {
    pub eps: f64,
    pub slope_k: f64,
}

impl UnitLoad {
    pub fn eval(&self, z: f64) -> f64 {
        self.eps * (1.0 - self.slope_k * z).abs()
    }
}

/// A convex, non-negative operating-cost function on server counts.
///
/// Functions are evaluable objects rather than materialized tables so that
/// instances with very large `m` stay cheap. [`CostFunction::eval`] accepts
/// real arguments: tables interpolate linearly between knots, closed forms
/// are evaluated directly. States outside the function's feasible region
/// evaluate to `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum CostFunction {
    /// Explicit values at `0..=m`.
    Table(Arc<[f64]>),
    /// `x ↦ eps·|x − center|`.
    AffineAbs { eps: f64, center: f64 },
    /// `x ↦ x·f(load/x)`, infeasible below `load`.
    RestrictedLoad { unit: UnitLoad, load: f64 },
    /// `x ↦ inner(x·factor)`.
    Scaled { inner: Arc<CostFunction>, factor: f64 },
    /// `x ↦ inner(x) / divisor`.
    StretchedCopy { inner: Arc<CostFunction>, divisor: u64 },
    /// `inner` on `[0, m]`, extended linearly by `x·slope` beyond `m`.
    Padded { inner: Arc<CostFunction>, m: u64, slope: f64 },
}

impl CostFunction {
    pub fn table(values: impl Into<Vec<f64>>) -> Self {
        CostFunction::Table(values.into().into())
    }

    pub fn affine_abs(eps: f64, center: f64) -> Self {
        CostFunction::AffineAbs { eps, center }
    }

    pub fn restricted(unit: UnitLoad, load: f64) -> Self {
        CostFunction::RestrictedLoad { unit, load }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CostFunction::Table(values) => interpolate_table(values, x),
            CostFunction::AffineAbs { eps, center } => eps * (x - center).abs(),
            CostFunction::RestrictedLoad { unit, load } => {
                if x + 1e-12 < *load {
                    f64::INFINITY
                } else if x <= 0.0 {
                    0.0
                } else {
                    x * unit.eval(load / x)
                }
            }
            CostFunction::Scaled { inner, factor } => inner.eval(x * factor),
            CostFunction::StretchedCopy { inner, divisor } => inner.eval(x) / *divisor as f64,
            CostFunction::Padded { inner, m, slope } => {
                let m = *m as f64;
                if x <= m {
                    inner.eval(x)
                } else if x >= m + 1.0 {
                    x * slope
                } else {
                    let w = x - m;
                    (1.0 - w) * inner.eval(m) + w * (m + 1.0) * slope
                }
            }
        }
    }

    /// Value at an integer state.
    #[inline]
    pub fn at(&self, x: u64) -> f64 {
        self.eval(x as f64)
    }

    fn is_table(&self) -> bool {
        match self {
            CostFunction::Table(_) => true,
            CostFunction::Scaled { inner, .. }
            | CostFunction::StretchedCopy { inner, .. }
            | CostFunction::Padded { inner, .. } => inner.is_table(),
            _ => false,
        }
    }
}

fn interpolate_table(values: &[f64], x: f64) -> f64 {
    let last = (values.len() - 1) as f64;
    if !(0.0..=last).contains(&x) {
        return f64::INFINITY;
    }
    let lo = x.floor();
    let i = lo as usize;
    if x == lo {
        return values[i];
    }
    let w = x - lo;
    (1.0 - w) * values[i] + w * values[i + 1]
}

/// How switching is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `beta` per server powered up.
    #[default]
    UpOnly,
    /// `beta/2` per server changing state in either direction.
    Symmetric,
}

/// Whether the schedule must return to zero after the last slot.
///
/// Under [`Convention::UpOnly`] the two horizons cost the same. Under
/// [`Convention::Symmetric`] a closed horizon charges the final power-down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    #[default]
    Closed,
    Open,
}

/// Per-unit prices of moving up and down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchRates {
    pub up: f64,
    pub down: f64,
}

impl SwitchRates {
    pub fn new(convention: Convention, beta: f64) -> Self {
        match convention {
            Convention::UpOnly => SwitchRates { up: beta, down: 0.0 },
            Convention::Symmetric => SwitchRates { up: beta / 2.0, down: beta / 2.0 },
        }
    }

    #[inline]
    pub fn cost(&self, from: f64, to: f64) -> f64 {
        if to >= from {
            self.up * (to - from)
        } else {
            self.down * (from - to)
        }
    }

    /// Cost of returning from `x` to zero after the horizon.
    #[inline]
    pub fn terminal(&self, x: f64, horizon: Horizon) -> f64 {
        match horizon {
            Horizon::Closed => self.down * x,
            Horizon::Open => 0.0,
        }
    }
}

/// States a schedule may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AllowedStates {
    #[default]
    All,
    /// Multiples of `2^log2_step`.
    MultiplesOf { log2_step: u32 },
}

impl AllowedStates {
    pub fn log2_step(&self) -> u32 {
        match self {
            AllowedStates::All => 0,
            AllowedStates::MultiplesOf { log2_step } => *log2_step,
        }
    }

    pub fn step(&self) -> u64 {
        1u64 << self.log2_step()
    }

    pub fn from_log2_step(log2_step: u32) -> Self {
        if log2_step == 0 {
            AllowedStates::All
        } else {
            AllowedStates::MultiplesOf { log2_step }
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        x.is_multiple_of(self.step())
    }

    /// All allowed states in `[0, m]`, ascending.
    pub fn enumerate(&self, m: u64) -> Vec<u64> {
        (0..=m).step_by(self.step() as usize).collect()
    }
}

/// The tuple `(T, m, β, F, M)` plus the switching convention.
///
/// Fields are public and construction is unchecked; use [`validate`] to
/// obtain a list of violations.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub m: u64,
    pub beta: f64,
    pub functions: Vec<CostFunction>,
    pub allowed: AllowedStates,
    pub convention: Convention,
}

impl ProblemInstance {
    pub fn new(m: u64, beta: f64, functions: Vec<CostFunction>) -> Self {
        ProblemInstance {
            m,
            beta,
            functions,
            allowed: AllowedStates::All,
            convention: Convention::UpOnly,
        }
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn horizon(&self) -> usize {
        self.functions.len()
    }

    pub fn rates(&self) -> SwitchRates {
        SwitchRates::new(self.convention, self.beta)
    }

    /// Cheap structural checks done by every solver.
    pub(crate) fn check_basic(&self) -> Result<()> {
        if self.functions.is_empty() {
            return Err(Error::Shape("instance has no time slots".into()));
        }
        if self.m == 0 {
            return Err(Error::Domain("m must be positive".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive, got {}", self.beta)));
        }
        Ok(())
    }

    pub(crate) fn check_schedule(&self, schedule: &Schedule) -> Result<()> {
        if schedule.len() != self.horizon() {
            return Err(Error::Shape(format!(
                "schedule has {} slots, instance has {}",
                schedule.len(),
                self.horizon()
            )));
        }
        for (t, &x) in schedule.0.iter().enumerate() {
            if x > self.m {
                return Err(Error::Domain(format!("x_{} = {} exceeds m = {}", t + 1, x, self.m)));
            }
            if !self.allowed.contains(x) {
                return Err(Error::Domain(format!(
                    "x_{} = {} is not a multiple of {}",
                    t + 1,
                    x,
                    self.allowed.step()
                )));
            }
        }
        Ok(())
    }
}

/// Single unit-load function `f`, loads `λ_t` and the constraint `x_t ≥ λ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedInstance {
    pub m: u64,
    pub beta: f64,
    pub unit: UnitLoad,
    pub loads: Vec<f64>,
    pub convention: Convention,
}

impl RestrictedInstance {
    pub fn horizon(&self) -> usize {
        self.loads.len()
    }

    /// The same problem in the general model, one `x·f(λ_t/x)` per slot.
    pub fn to_general(&self) -> ProblemInstance {
        ProblemInstance {
            m: self.m,
            beta: self.beta,
            functions: self
                .loads
                .iter()
                .map(|&load| CostFunction::restricted(self.unit, load))
                .collect(),
            allowed: AllowedStates::All,
            convention: self.convention,
        }
    }
}

/// Integer server counts `x_1..x_T`; `x_0 = x_{T+1} = 0` implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule(pub Vec<u64>);

impl Schedule {
    pub fn zeros(horizon: usize) -> Self {
        Schedule(vec![0; horizon])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.0
    }

    pub fn to_fractional(&self) -> FractionalSchedule {
        FractionalSchedule(self.0.iter().map(|&x| x as f64).collect())
    }
}

impl From<Vec<u64>> for Schedule {
    fn from(v: Vec<u64>) -> Self {
        Schedule(v)
    }
}

/// Real server counts in `[0, m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalSchedule(pub Vec<f64>);

impl FractionalSchedule {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub operating: f64,
    pub switching: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(operating: f64, switching: f64) -> Self {
        CostBreakdown { operating, switching, total: operating + switching }
    }
}

/// Sums operating and switching cost of a real-valued trajectory; the
/// per-slot operating cost comes from `op`.
fn accumulate(
    states: impl Iterator<Item = f64>,
    rates: SwitchRates,
    horizon: Horizon,
    mut op: impl FnMut(usize, f64) -> Result<f64>,
) -> Result<CostBreakdown> {
    let mut operating = 0.0;
    let mut up = 0.0;
    let mut down = 0.0;
    let mut prev = 0.0;
    for (t, x) in states.enumerate() {
        let c = op(t, x)?;
        if !c.is_finite() {
            return Err(Error::Infeasible {
                t: t + 1,
                reason: format!("operating cost at x = {x} is not finite"),
            });
        }
        operating += c;
        if x >= prev {
            up += x - prev;
        } else {
            down += prev - x;
        }
        prev = x;
    }
    if horizon == Horizon::Closed {
        down += prev;
    }
    // priced once so that integral schedules cost exactly the same under
    // both conventions
    let switching = rates.up * up + rates.down * down;
    Ok(CostBreakdown::new(operating, switching))
}

/// Total cost of an integral schedule with a closed horizon.
pub fn eval_cost(instance: &ProblemInstance, schedule: &Schedule) -> Result<CostBreakdown> {
    eval_cost_with(instance, schedule, Horizon::Closed)
}

pub fn eval_cost_with(
    instance: &ProblemInstance,
    schedule: &Schedule,
    horizon: Horizon,
) -> Result<CostBreakdown> {
    instance.check_schedule(schedule)?;
    accumulate(
        schedule.0.iter().map(|&x| x as f64),
        instance.rates(),
        horizon,
        |t, x| Ok(instance.functions[t].eval(x)),
    )
}

/// Cost of a real-valued schedule using each function's own real extension
/// rather than interpolation between integers.
pub fn eval_real(
    instance: &ProblemInstance,
    schedule: &FractionalSchedule,
    horizon: Horizon,
) -> Result<CostBreakdown> {
    if schedule.len() != instance.horizon() {
        return Err(Error::Shape(format!(
            "schedule has {} slots, instance has {}",
            schedule.len(),
            instance.horizon()
        )));
    }
    let m = instance.m as f64;
    accumulate(schedule.0.iter().copied(), instance.rates(), horizon, |t, x| {
        if !(0.0..=m).contains(&x) {
            return Err(Error::Domain(format!("x_{} = {} outside [0, {}]", t + 1, x, m)));
        }
        Ok(instance.functions[t].eval(x))
    })
}

/// Cost of a schedule in the restricted model, `Σ x_t f(λ_t/x_t)` plus
/// switching under the instance's convention.
pub fn eval_restricted(instance: &RestrictedInstance, schedule: &Schedule) -> Result<CostBreakdown> {
    if schedule.len() != instance.horizon() {
        return Err(Error::Shape(format!(
            "schedule has {} slots, instance has {}",
            schedule.len(),
            instance.horizon()
        )));
    }
    for (t, (&x, &load)) in schedule.0.iter().zip(&instance.loads).enumerate() {
        if x > instance.m {
            return Err(Error::Domain(format!("x_{} = {} exceeds m = {}", t + 1, x, instance.m)));
        }
        if (x as f64) < load {
            return Err(Error::Infeasible {
                t: t + 1,
                reason: format!("x_t = {x} is below the load {load}"),
            });
        }
    }
    let rates = SwitchRates::new(instance.convention, instance.beta);
    accumulate(schedule.0.iter().map(|&x| x as f64), rates, Horizon::Closed, |t, x| {
        Ok(CostFunction::restricted(instance.unit, instance.loads[t]).eval(x))
    })
}

/// The continuous extension: operating costs linearly interpolated between
/// neighbouring integers, switching charged on real differences.
#[derive(Debug, Clone, Copy)]
pub struct ContinuousExtension<'a> {
    instance: &'a ProblemInstance,
}

pub fn extend_continuous(instance: &ProblemInstance) -> ContinuousExtension<'_> {
    ContinuousExtension { instance }
}

impl<'a> ContinuousExtension<'a> {
    pub fn instance(&self) -> &'a ProblemInstance {
        self.instance
    }

    /// `f̄_t(x)` for slot index `t` (zero-based).
    pub fn eval(&self, t: usize, x: f64) -> Result<f64> {
        let m = self.instance.m as f64;
        if !(0.0..=m).contains(&x) || x.is_nan() {
            return Err(Error::Domain(format!("x = {x} outside [0, {m}]")));
        }
        let f = self.instance.functions.get(t).ok_or_else(|| {
            Error::Shape(format!("slot {} beyond horizon {}", t + 1, self.instance.horizon()))
        })?;
        let lo = x.floor();
        let hi = x.ceil();
        if lo == hi {
            return Ok(f.eval(lo));
        }
        Ok((hi - x) * f.eval(lo) + (x - lo) * f.eval(hi))
    }

    pub fn cost(&self, schedule: &FractionalSchedule) -> Result<CostBreakdown> {
        self.cost_with(schedule, Horizon::Closed)
    }

    pub fn cost_with(&self, schedule: &FractionalSchedule, horizon: Horizon) -> Result<CostBreakdown> {
        if schedule.len() != self.instance.horizon() {
            return Err(Error::Shape(format!(
                "schedule has {} slots, instance has {}",
                schedule.len(),
                self.instance.horizon()
            )));
        }
        accumulate(schedule.0.iter().copied(), self.instance.rates(), horizon, |t, x| {
            self.eval(t, x)
        })
    }
}

/// A problem found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveBeta(f64),
    EmptyHorizon,
    ZeroServers,
    /// Table length differs from `m + 1`.
    TableShape { t: usize, len: usize },
    Negative { t: usize, x: u64, value: f64 },
    NotConvex { t: usize, x: u64, second_difference: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveBeta(b) => write!(f, "β must be positive (got {b})"),
            Violation::EmptyHorizon => write!(f, "T must be positive"),
            Violation::ZeroServers => write!(f, "m must be positive"),
            Violation::TableShape { t, len } => {
                write!(f, "f_{t} has {len} table entries, expected m+1")
            }
            Violation::Negative { t, x, value } => {
                write!(f, "f_{t} is negative at x={x} ({value})")
            }
            Violation::NotConvex { t, x, second_difference } => write!(
                f,
                "f_{t} not convex at x={x} (second difference {second_difference})"
            ),
        }
    }
}

pub fn validate(instance: &ProblemInstance) -> std::result::Result<(), Vec<Violation>> {
    validate_with_budget(instance, DEFAULT_CONVEXITY_BUDGET)
}

/// Checks shape, positivity of β, non-negativity and discrete convexity.
///
/// Tables are scanned in full. Closed forms are probed at no more than
/// `budget` points (endpoints always included) when `m + 1` exceeds it.
/// Infinite values mark an infeasible region and are skipped.
pub fn validate_with_budget(
    instance: &ProblemInstance,
    budget: u64,
) -> std::result::Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if instance.beta.is_nan() || instance.beta <= 0.0 {
        out.push(Violation::NonPositiveBeta(instance.beta));
    }
    if instance.functions.is_empty() {
        out.push(Violation::EmptyHorizon);
    }
    if instance.m == 0 {
        out.push(Violation::ZeroServers);
    }
    let m = instance.m;
    for (i, f) in instance.functions.iter().enumerate() {
        let t = i + 1;
        if let CostFunction::Table(values) = f {
            if values.len() as u64 != m + 1 {
                out.push(Violation::TableShape { t, len: values.len() });
                continue;
            }
        }
        let points: Vec<u64> = if f.is_table() || m < budget.max(3) {
            (0..=m).collect()
        } else {
            let n = budget.max(3);
            let mut pts: Vec<u64> = (0..n).map(|i| (i as u128 * m as u128 / (n - 1) as u128) as u64).collect();
            pts.dedup();
            pts
        };
        for &x in &points {
            let v = f.at(x);
            if v < 0.0 {
                out.push(Violation::Negative { t, x, value: v });
                break;
            }
        }
        for &x in &points {
            if x == 0 || x >= m {
                continue;
            }
            let (a, b, c) = (f.at(x - 1), f.at(x), f.at(x + 1));
            if !(a.is_finite() && b.is_finite() && c.is_finite()) {
                continue;
            }
            let d2 = a - 2.0 * b + c;
            if d2 < -1e-12 * a.abs().max(b.abs()).max(c.abs()).max(1.0) {
                out.push(Violation::NotConvex { t, x, second_difference: d2 });
                break;
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
