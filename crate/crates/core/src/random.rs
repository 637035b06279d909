//! Seeded generators for probe functions and vectors.
//!
//! Breakpoints and values live on a dyadic lattice so that sums, minima and
//! maxima of generated data are exact in `f64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distfn::DistributionFn;

/// Lattice resolution for generated breakpoints and values.
pub const LATTICE: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSpec {
    pub max_breakpoints: usize,
    /// Breakpoints are drawn from `[0, span]`.
    pub span: f64,
    /// Force `F(0) = 0` so the result lies in `Δ⁺`.
    pub distance: bool,
    /// Force the last value to 1 so the result lies in `D⁺`.
    pub proper: bool,
}

impl Default for StepSpec {
    fn default() -> Self {
        StepSpec { max_breakpoints: 8, span: 4.0, distance: true, proper: false }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random step function on the 1/64 lattice.
pub fn step_fn(rng: &mut impl Rng, spec: StepSpec) -> DistributionFn {
    let slots = (spec.span * LATTICE) as u32;
    let count = rng.gen_range(0..=spec.max_breakpoints);
    let mut knots: Vec<u32> = (0..count).map(|_| rng.gen_range(0..=slots)).collect();
    knots.sort_unstable();
    knots.dedup();
    let mut levels: Vec<u32> = (0..knots.len()).map(|_| rng.gen_range(0..=LATTICE as u32)).collect();
    levels.sort_unstable();
    if spec.proper {
        if let Some(last) = levels.last_mut() {
            *last = LATTICE as u32;
        }
    }
    let base = if spec.distance || levels.is_empty() { 0 } else { rng.gen_range(0..=levels[0]) };
    let breakpoints = knots.iter().map(|k| *k as f64 / LATTICE).collect();
    let values = levels.iter().map(|v| *v as f64 / LATTICE).collect();
    let f = DistributionFn::make_step(breakpoints, values, base as f64 / LATTICE).expect("lattice data is a valid step");
    if spec.proper && f.breakpoints().is_empty() {
        return DistributionFn::eps_zero();
    }
    f
}

/// A random vector with coordinates on the 1/4 lattice of `[-radius, radius]`.
pub fn vector(rng: &mut impl Rng, dim: usize, radius: f64) -> Vec<f64> {
    let slots = (radius * 4.0) as i32;
    (0..dim).map(|_| rng.gen_range(-slots..=slots) as f64 / 4.0).collect()
}
