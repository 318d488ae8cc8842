use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rightsize_core::generate::{random_affine_instance, random_instance};
use rightsize_core::lcp::lcp_run;
use rightsize_core::model::approx_eq;
use rightsize_core::offline::{dp_full, solve_poly};
use rightsize_core::randomized::{expected_rounded_cost, rng_for, rounding_run_stream, Precomputed};

use crate::failure::Failure;

/// The oracle is skipped above this `m`.
pub const ORACLE_MAX_M: u64 = 1 << 12;
/// ... or when the layered graph would have more nodes than this.
pub const ORACLE_MAX_NODES: u64 = 1 << 24;

const ROUNDING_RUNS: usize = 2_000;

pub struct BenchConfig {
    pub horizon: usize,
    pub log_m_min: u32,
    pub log_m_max: u32,
    pub seed: u64,
}

impl BenchConfig {
    fn sizes(&self) -> impl Iterator<Item = u64> {
        (self.log_m_min..=self.log_m_max.min(40)).map(|l| 1u64 << l)
    }

    fn fits_tables(&self, m: u64) -> bool {
        (self.horizon as u64).saturating_mul(m + 1) <= ORACLE_MAX_NODES
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn write(dir: &Path, name: &str, csv: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, csv).map_err(|e| Failure::io(path, e))
}

pub fn offline(cfg: &BenchConfig, dir: &Path) -> Result<(), Failure> {
    let mut csv = String::from("T,m,poly_ms,oracle_ms,poly_cost,oracle_cost,costs_equal,iterations\n");
    for m in cfg.sizes() {
        let instance = random_affine_instance(&mut rng_for(cfg.seed, m), cfg.horizon, m, 2.0);
        let start = Instant::now();
        let poly = solve_poly(&instance)?;
        let poly_ms = ms(start);
        let (oracle_ms, oracle_cost, equal) = if m <= ORACLE_MAX_M && cfg.fits_tables(m) {
            let start = Instant::now();
            let oracle = dp_full(&instance)?;
            let t = ms(start);
            let eq = approx_eq(poly.cost, oracle.cost, 1e-9);
            (t.to_string(), oracle.cost.to_string(), eq.to_string())
        } else {
            ("skipped".into(), String::new(), String::new())
        };
        let _ = writeln!(
            csv,
            "{},{m},{poly_ms},{oracle_ms},{},{oracle_cost},{equal},{}",
            cfg.horizon, poly.cost, poly.iterations
        );
    }
    write(dir, "offline.csv", &csv)
}

pub fn lcp(cfg: &BenchConfig, dir: &Path) -> Result<(), Failure> {
    let mut csv = String::from("T,m,lcp_ms,lcp_cost,opt_cost,ratio\n");
    for m in cfg.sizes().filter(|&m| cfg.fits_tables(m)) {
        let instance = random_instance(&mut rng_for(cfg.seed, m), cfg.horizon, m, 1.0, 3.0);
        let start = Instant::now();
        let trace = lcp_run(&instance)?;
        let lcp_ms = ms(start);
        let opt = solve_poly(&instance)?.cost;
        let alg = trace.cost.total;
        let ratio = if opt > 0.0 { alg / opt } else { 1.0 };
        let _ = writeln!(csv, "{},{m},{lcp_ms},{alg},{opt},{ratio}", cfg.horizon);
    }
    write(dir, "lcp.csv", &csv)
}

pub fn random(cfg: &BenchConfig, dir: &Path) -> Result<(), Failure> {
    let mut csv = String::from("T,m,runs,fractional_cost,mean_cost,std_err,rel_diff,ms\n");
    for m in cfg.sizes().filter(|&m| cfg.fits_tables(4 * m)) {
        let instance = random_instance(&mut rng_for(cfg.seed, m), cfg.horizon, m, 1.0, 3.0);
        let start = Instant::now();
        let mut hindsight = Precomputed::hindsight(&instance, 4)?;
        let outcome = rounding_run_stream(&mut hindsight, &instance, cfg.seed, 0)?;
        let est = expected_rounded_cost(&instance, &outcome.fractional, ROUNDING_RUNS, cfg.seed)?;
        let elapsed = ms(start);
        let frac = outcome.fractional_cost.total;
        let rel = if frac > 0.0 { (est.mean - frac).abs() / frac } else { est.mean.abs() };
        let _ = writeln!(
            csv,
            "{},{m},{ROUNDING_RUNS},{frac},{},{},{rel},{elapsed}",
            cfg.horizon, est.mean, est.std_err
        );
    }
    write(dir, "random.csv", &csv)
}
