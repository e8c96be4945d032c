//! Exact game value by exhaustive search over deterministic product strategies.
//!
//! Players `0..k-1` are enumerated in lexicographic order of their answer tables and the
//! last player best-responds question by question, which returns the same maximum and the
//! same lexicographically least witness as enumerating every table. Questions outside
//! the support of `Q` are pinned to the first answer.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Game, ProductEvent, ProductStrategy, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::rational::RationalProbability;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValueConfig {
    /// Largest number of enumerated strategy prefixes.
    pub cap: u128,
}

impl Default for ValueConfig {
    fn default() -> Self {
        ValueConfig { cap: DEFAULT_CAP }
    }
}

pub fn value(g: &Game) -> Result<(RationalProbability, ProductStrategy)> {
    value_with(g, &ValueConfig::default())
}

pub fn value_with(g: &Game, cfg: &ValueConfig) -> Result<(RationalProbability, ProductStrategy)> {
    let k = g.players();
    let last = k - 1;
    let q_sizes = g.question_sizes().to_vec();
    let a_sizes = g.answer_sizes().to_vec();

    // integer weights over a common denominator keep the inner loop allocation free
    let denom = g
        .support()
        .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
    let mut points: Vec<(usize, Vec<usize>, u128)> = Vec::with_capacity(g.support_size());
    for (qi, p) in g.support() {
        let w = (p * BigRational::from_integer(denom.clone())).to_integer();
        let w = w
            .to_u128()
            .ok_or_else(|| Error::cap("probability weights", w.to_string(), u128::MAX))?;
        points.push((qi, g.decode_questions(qi), w));
    }

    let mut positions: Vec<(usize, usize)> = Vec::new();
    let mut count: u128 = 1;
    for j in 0..last {
        let relevant: BTreeSet<usize> = points.iter().map(|(_, d, _)| d[j]).collect();
        for &q in &relevant {
            positions.push((j, q));
            count = count
                .checked_mul(a_sizes[j] as u128)
                .filter(|&c| c <= cfg.cap)
                .ok_or_else(|| Error::cap("strategy space", format!("> {}", cfg.cap), cfg.cap))?;
        }
    }
    let last_relevant: BTreeSet<usize> = points.iter().map(|(_, d, _)| d[last]).collect();

    let mut a_stride = vec![1usize; k];
    for j in (0..last).rev() {
        a_stride[j] = a_stride[j + 1] * a_sizes[j + 1];
    }
    let a_last = a_sizes[last];

    let mut tables: Vec<Vec<usize>> = q_sizes.iter().map(|&s| vec![0; s]).collect();
    let mut score = vec![0u128; q_sizes[last] * a_last];
    let mut best: Option<(u128, Vec<Vec<usize>>)> = None;

    'enumerate: loop {
        for &q in &last_relevant {
            score[q * a_last..(q + 1) * a_last].fill(0);
        }
        for (qi, d, w) in &points {
            let partial: usize = (0..last).map(|j| tables[j][d[j]] * a_stride[j]).sum();
            let row = d[last] * a_last;
            for a in 0..a_last {
                if g.wins(*qi, partial + a) {
                    score[row + a] += *w;
                }
            }
        }
        let mut total = 0u128;
        for &q in &last_relevant {
            total += score[q * a_last..(q + 1) * a_last].iter().max().copied().unwrap_or(0);
        }
        if best.as_ref().map_or(true, |(b, _)| total > *b) {
            let mut witness = tables.clone();
            for &q in &last_relevant {
                let row = &score[q * a_last..(q + 1) * a_last];
                let m = *row.iter().max().unwrap();
                witness[last][q] = row.iter().position(|&x| x == m).unwrap();
            }
            best = Some((total, witness));
        }

        let mut p = positions.len();
        loop {
            if p == 0 {
                break 'enumerate;
            }
            p -= 1;
            let (j, q) = positions[p];
            tables[j][q] += 1;
            if tables[j][q] < a_sizes[j] {
                continue 'enumerate;
            }
            tables[j][q] = 0;
        }
    }

    let (total, witness) = best.expect("at least one strategy is enumerated");
    let val = BigRational::new(BigInt::from(total), denom);
    Ok((RationalProbability::new(val)?, ProductStrategy::new(g, witness)?))
}

/// Value of `g` with questions drawn from `Q | E`.
pub fn value_conditioned(g: &Game, e: &ProductEvent) -> Result<RationalProbability> {
    value_conditioned_with(g, e, &ValueConfig::default())
}

pub fn value_conditioned_with(g: &Game, e: &ProductEvent, cfg: &ValueConfig) -> Result<RationalProbability> {
    e.check(g)?;
    let mass = e.probability(g);
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    let dist: BTreeMap<usize, BigRational> = g
        .support()
        .filter(|(qi, _)| e.contains(&g.decode_questions(*qi)))
        .map(|(qi, p)| (qi, p / &mass))
        .collect();
    Ok(value_with(&g.with_distribution(dist), cfg)?.0)
}
