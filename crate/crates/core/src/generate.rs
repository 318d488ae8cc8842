//! Seeded random instances.

use rand::Rng;

use crate::model::{CostFunction, ProblemInstance};

/// Random convex non-negative table on `0..=m`: sorted random slopes,
/// integrated and shifted so the minimum is zero. With `integral`, slopes
/// are integers in `[-scale, scale]`.
pub fn convex_table<R: Rng + ?Sized>(rng: &mut R, m: u64, scale: f64, integral: bool) -> Vec<f64> {
    let mut slopes: Vec<f64> = (0..m)
        .map(|_| {
            if integral {
                let s = scale.max(1.0) as i64;
                rng.gen_range(-s..=s) as f64
            } else {
                rng.gen_range(-scale..=scale)
            }
        })
        .collect();
    slopes.sort_by(f64::total_cmp);
    let mut values = Vec::with_capacity(m as usize + 1);
    let mut v = 0.0;
    values.push(v);
    for s in slopes {
        v += s;
        values.push(v);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values.iter_mut().for_each(|x| *x -= min);
    values
}

/// `T` random convex tables over `0..=m`.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: usize,
    m: u64,
    beta: f64,
    scale: f64,
) -> ProblemInstance {
    let functions = (0..horizon)
        .map(|_| CostFunction::table(convex_table(rng, m, scale, false)))
        .collect();
    ProblemInstance::new(m, beta, functions)
}

/// Like [`random_instance`] with integer-valued tables.
pub fn random_integral_instance<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: usize,
    m: u64,
    beta: f64,
    scale: u32,
) -> ProblemInstance {
    let functions = (0..horizon)
        .map(|_| CostFunction::table(convex_table(rng, m, scale as f64, true)))
        .collect();
    ProblemInstance::new(m, beta, functions)
}

/// `T` functions `eps·|x − c|` with random slopes in `[0.1, 2)` and integer
/// centers in `0..=m`. Constant size per slot, so `m` can be huge.
pub fn random_affine_instance<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: usize,
    m: u64,
    beta: f64,
) -> ProblemInstance {
    let functions = (0..horizon)
        .map(|_| {
            let eps = rng.gen_range(0.1..2.0);
            let center = rng.gen_range(0..=m) as f64;
            CostFunction::affine_abs(eps, center)
        })
        .collect();
    ProblemInstance::new(m, beta, functions)
}
