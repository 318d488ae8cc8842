use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rightsize_core::adversary::{run_duel, AdversaryConfig, Variant};
use rightsize_core::generate::{random_affine_instance, random_instance};
use rightsize_core::json::{parse_instance, to_json};
use rightsize_core::lcp::lcp_run;
use rightsize_core::model::{eval_real, validate};
use rightsize_core::offline::{dp_full, solve_poly};
use rightsize_core::policy::PolicyKind;
use rightsize_core::randomized::{rng_for, rounding_run_stream, AlgorithmBState, FractionalPolicy, Precomputed};
use rightsize_core::{Convention, Error, FractionalSchedule, Horizon, ProblemInstance};
use serde::Serialize;

use crate::failure::Failure;
use crate::Algorithm;

pub fn load(path: &Path) -> Result<ProblemInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let instance = parse_instance(&text)?;
    validate(&instance).map_err(Failure::Invalid)?;
    Ok(instance)
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Contract(format!("serializing output: {e}")))?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct Solution<'a> {
    schedule: &'a [u64],
    cost: f64,
    operating: f64,
    switching: f64,
    algorithm: &'static str,
    m: u64,
    /// `m` after padding to a power of two; poly only.
    padded_to: Option<u64>,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

pub fn solve(path: &Path, algorithm: Algorithm, timing: bool, out: Option<&Path>) -> Result<(), Failure> {
    let instance = load(path)?;
    let start = Instant::now();
    let (res, name) = match algorithm {
        Algorithm::Poly => (solve_poly(&instance)?, "poly"),
        Algorithm::Oracle => (dp_full(&instance)?, "oracle"),
    };
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let solution = Solution {
        schedule: res.schedule.states(),
        cost: res.cost,
        operating: res.breakdown.operating,
        switching: res.breakdown.switching,
        algorithm: name,
        m: instance.m,
        padded_to: matches!(algorithm, Algorithm::Poly).then_some(res.padded_m),
        iterations: res.iterations,
        wall_ms: timing.then_some(wall_ms),
    };
    emit(out, &json(&solution)?)
}

struct Row {
    band: Option<(u64, u64)>,
    x: f64,
}

pub fn simulate(
    path: &Path,
    policy: &str,
    seed: u64,
    grid: u64,
    eps: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let instance = load(path)?;
    let rows: Vec<Row> = match policy {
        "lcp" => {
            let trace = lcp_run(&instance)?;
            trace
                .decisions
                .iter()
                .map(|d| Row { band: Some((d.x_l, d.x_u)), x: d.x_lcp as f64 })
                .collect()
        }
        "random-round" => {
            let mut hindsight = Precomputed::hindsight(&instance, grid)?;
            let outcome = rounding_run_stream(&mut hindsight, &instance, seed, 0)?;
            outcome.schedule.states().iter().map(|&x| Row { band: None, x: x as f64 }).collect()
        }
        "algorithm-b" => {
            let mut b = AlgorithmBState::new(eps)?;
            instance
                .functions
                .iter()
                .map(|f| Ok(Row { band: None, x: b.step(f)? }))
                .collect::<Result<_, Error>>()?
        }
        "offline" => {
            let res = solve_poly(&instance)?;
            res.schedule.states().iter().map(|&x| Row { band: None, x: x as f64 }).collect()
        }
        other => return Err(Error::Config(format!("unknown policy '{other}'")).into()),
    };
    let opt = solve_poly(&instance)?.cost;
    let xs = FractionalSchedule(rows.iter().map(|r| r.x).collect());
    let total = eval_real(&instance, &xs, Horizon::Closed)?.total;
    let rates = instance.rates();

    let mut csv = String::from("t,x_L,x_U,x_policy,f_t_cost,cum_cost\n");
    let (mut prev, mut cum) = (0.0, 0.0);
    for (i, (row, f)) in rows.iter().zip(&instance.functions).enumerate() {
        let op = f.eval(row.x);
        cum += op + rates.cost(prev, row.x);
        prev = row.x;
        let (lo, hi) = row.band.map_or((String::new(), String::new()), |(l, u)| (l.to_string(), u.to_string()));
        let _ = writeln!(csv, "{},{lo},{hi},{},{op},{cum}", i + 1, row.x);
    }
    let ratio = if opt > 0.0 { total / opt } else if total == 0.0 { 1.0 } else { f64::INFINITY };
    let _ = writeln!(csv, "total,,,,{total},{ratio}");
    let _ = writeln!(csv, "seed,,,{seed},,");
    emit(out, &csv)
}

pub struct DuelArgs {
    pub variant: String,
    pub policy: String,
    pub eps: f64,
    pub horizon: Option<usize>,
    pub seed: u64,
    pub replicas: usize,
    pub k: f64,
    pub full_horizon: bool,
}

pub fn adversary(args: &DuelArgs, out: Option<&Path>) -> Result<(), Failure> {
    let variant: Variant = args.variant.parse()?;
    let policy: PolicyKind = args.policy.parse()?;
    let mut cfg = AdversaryConfig::new(variant, args.eps);
    cfg.horizon = args.horizon;
    cfg.seed = args.seed;
    cfg.replicas = args.replicas;
    cfg.k = args.k;
    cfg.stop_at_boundary = !args.full_horizon;
    let report = run_duel(policy, &cfg)?;
    emit(out, &json(&report)?)
}

#[allow(clippy::too_many_arguments)]
pub fn generate(
    horizon: usize,
    m: u64,
    beta: f64,
    seed: u64,
    affine: bool,
    scale: f64,
    symmetric: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut rng = rng_for(seed, 0);
    let mut instance = if affine {
        random_affine_instance(&mut rng, horizon, m, beta)
    } else {
        random_instance(&mut rng, horizon, m, beta, scale)
    };
    if symmetric {
        instance = instance.with_convention(Convention::Symmetric);
    }
    validate(&instance).map_err(Failure::Invalid)?;
    let mut text = to_json(&instance)?;
    text.push('\n');
    emit(out, &text)
}
