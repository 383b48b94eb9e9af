//! Seeded random step functions for the property-test corpora.
//!
//! Breakpoints are uniform in log x over the sampled range, values are drawn
//! in [0.1, 1.1) and sorted to satisfy the requested cone; the seed is echoed
//! by the callers into every report they produce.

use crate::error::Result;
use crate::funcspace::{Cone, FuncExpr, FuncKind};
use crate::rng::SplitMix64;

/// Generate a step function with `n_pieces` pieces over (lo, hi).
pub fn gen_step_function(seed: u64, lo: f64, hi: f64, n_pieces: usize, cone: Cone) -> Result<FuncExpr> {
    gen_step_inner(seed, lo, hi, n_pieces, cone, false)
}

/// As `gen_step_function`, but the first piece carries the value 0. Needed
/// by the non-decreasing-cone cases whose two sides both diverge when
/// f(0+) > 0 (the statement is non-vacuous only for f vanishing near 0).
pub fn gen_step_function_vanishing(seed: u64, lo: f64, hi: f64, n_pieces: usize, cone: Cone) -> Result<FuncExpr> {
    gen_step_inner(seed, lo, hi, n_pieces, cone, true)
}

fn gen_step_inner(seed: u64, lo: f64, hi: f64, n_pieces: usize, cone: Cone, vanish: bool) -> Result<FuncExpr> {
    assert!(hi > lo && lo > 0.0 && n_pieces >= 1);
    let mut rng = SplitMix64::new(seed);
    let mut cuts: Vec<f64> = (0..n_pieces - 1)
        .map(|_| lo * (hi / lo).powf(rng.next_f64()))
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut grid = cuts;
    grid.push(hi);

    let mut values: Vec<f64> = (0..grid.len()).map(|_| rng.uniform(0.1, 1.1)).collect();
    match cone {
        Cone::NonIncreasing => values.sort_by(|a, b| b.partial_cmp(a).unwrap()),
        Cone::NonDecreasing => values.sort_by(|a, b| a.partial_cmp(b).unwrap()),
        Cone::Unrestricted => {}
    }
    if vanish {
        if cone == Cone::NonIncreasing {
            return Err(crate::error::Error::Parameter(
                "a non-increasing step function cannot vanish near zero without vanishing everywhere".into(),
            ));
        }
        values[0] = 0.0;
    }
    FuncExpr::new(FuncKind::Sampled { grid, values }, cone, false)
}
