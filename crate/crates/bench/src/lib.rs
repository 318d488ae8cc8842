//! Seeded fixtures shared by the benchmarks.

use rightsize_core::generate::{random_affine_instance, random_instance};
use rightsize_core::offline::fractional_optimum;
use rightsize_core::randomized::rng_for;
use rightsize_core::{FractionalSchedule, ProblemInstance};

/// `T` slots of `eps·|x − c|`; cheap for any `m`.
pub fn affine(horizon: usize, m: u64, seed: u64) -> ProblemInstance {
    random_affine_instance(&mut rng_for(seed, m), horizon, m, 2.0)
}

/// `T` random convex tables.
pub fn tables(horizon: usize, m: u64, seed: u64) -> ProblemInstance {
    random_instance(&mut rng_for(seed, m), horizon, m, 1.0, 3.0)
}

/// Hindsight fractional optimum on the quarter grid.
pub fn fractional(instance: &ProblemInstance) -> FractionalSchedule {
    fractional_optimum(instance, 4).expect("fixture instances are feasible")
}
