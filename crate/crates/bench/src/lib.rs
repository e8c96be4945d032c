//! Fixtures shared by the benchmarks.

use parrep_core::analysis::{FunctionTable, ProbabilitySpace};
use parrep_core::{gallery, repeat_game, value, Game, ProductStrategy};

pub fn parity(n: usize) -> FunctionTable {
    FunctionTable::real(ProbabilitySpace::uniform(2), n, |x| {
        if x.iter().sum::<usize>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
    .expect("parity table fits")
}

/// `GHZ^{⊗2}` with its optimal strategy.
pub fn ghz_squared() -> (Game, ProductStrategy) {
    let g = repeat_game(&gallery::ghz(), 2).expect("small");
    let (_, s) = value(&g).expect("enumerable");
    (g, s)
}
