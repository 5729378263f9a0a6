//! Search for a grid of the same knot with a smaller truncated complex.

use hfk_core::pipeline::truncation_estimates;
use hfk_core::GridDiagram;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Estimated number of lifted generators the pipeline enumerates for this grid.
pub fn cost(grid: &GridDiagram, m: usize) -> f64 {
    let (top, bottom) = truncation_estimates(grid, m);
    top.min(bottom)
}

#[derive(Clone, Debug)]
pub struct Simplified {
    pub grid: GridDiagram,
    pub initial_cost: f64,
    pub cost: f64,
}

/// Random walk over translations and commutations, keeping the cheapest grid seen.
pub fn simplify(grid: &GridDiagram, m: usize, steps: usize, seed: u64) -> Simplified {
    let n = grid.size();
    let mut rng = StdRng::seed_from_u64(seed);
    let initial_cost = cost(grid, m);
    let mut current = (grid.clone(), initial_cost);
    let mut best = current.clone();
    for _ in 0..steps {
        let shifted = current.0.translated(rng.gen_range(0..n), rng.gen_range(0..n));
        let k = rng.gen_range(0..n - 1);
        let moved = if rng.gen_bool(0.5) { shifted.commute_columns(k) } else { shifted.commute_rows(k) };
        let Some(candidate) = moved else { continue };
        let c = cost(&candidate, m);
        if c <= current.1 {
            current = (candidate, c);
            if c < best.1 {
                best = current.clone();
            }
        }
    }
    Simplified { grid: best.0, initial_cost, cost: best.1 }
}
