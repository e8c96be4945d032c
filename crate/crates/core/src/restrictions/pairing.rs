//! Random merges of `k` coordinates inside a set `S`.
//!
//! Coordinates outside `S` are untouched, so the `ℓ1` error depends only on `|S|`, `k` and `μ`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::generalized::GeneralizedRestriction;
use super::grr::GeneralizedRandomRestriction;
use crate::analysis::ProbabilitySpace;
use crate::error::{Error, Result};
use crate::rational::to_f64;

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn check(size: usize, k: usize) -> Result<()> {
    if k == 0 || k > size {
        return Err(Error::Invalid(format!("merge size {k} not in 1..={size}")));
    }
    Ok(())
}

fn subsets(set: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(set: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..set.len() {
            cur.push(set[i]);
            go(set, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(set, k, 0, &mut Vec::new(), &mut out);
    out
}

/// The distribution `T ⊆ S`, `|T| = k` uniform, merge `T`, keep everything else alive.
pub fn pairing_grr(space: ProbabilitySpace, n: usize, set: &[usize], k: usize) -> Result<GeneralizedRandomRestriction> {
    check(set.len(), k)?;
    if let Some(&i) = set.iter().find(|&&i| i >= n) {
        return Err(Error::Index { index: i, limit: n });
    }
    let all = subsets(set, k);
    let w = BigRational::new(BigInt::one(), BigInt::from(all.len()));
    let mut entries = Vec::with_capacity(all.len());
    for t in all {
        let mut classes = vec![t.clone()];
        classes.extend((0..n).filter(|i| !t.contains(i)).map(|i| vec![i]));
        entries.push((GeneralizedRestriction::new(n, classes, BTreeMap::new())?, w.clone()));
    }
    GeneralizedRandomRestriction::new(space, n, entries)
}

/// Density of the merged mixture against `μ^S` at a point with symbol counts `counts`:
/// `Σ_a C(n_a, k) / C(|S|, k) / Σ_a μ(a)^k`.
fn ratio(counts: &[usize], size: usize, k: usize, weights: &[BigRational]) -> BigRational {
    let num = counts.iter().fold(BigInt::zero(), |a, &c| a + binomial(c, k));
    let z = weights
        .iter()
        .map(|w| num_traits::pow(w.clone(), k))
        .fold(BigRational::zero(), |a, b| a + b);
    BigRational::new(num, binomial(size, k)) / z
}

/// Exact `ℓ1` error of the merge distribution on `|S| = size` coordinates, by summing
/// over symbol-count vectors.
pub fn pairing_error_exact(space: &ProbabilitySpace, size: usize, k: usize) -> Result<BigRational> {
    check(size, k)?;
    let s = space.size();
    let w = space.weights();
    let mut total = BigRational::zero();
    let mut counts = vec![0usize; s];
    // compositions of `size` into `s` parts
    fn walk(
        pos: usize,
        left: usize,
        counts: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            f(counts);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            walk(pos + 1, left - c, counts, f);
        }
    }
    let mut visit = |c: &[usize]| {
        // multinomial · Π μ(a)^{n_a}
        let mut mult = BigRational::from_integer(BigInt::one());
        let mut rest = size;
        for (a, &ca) in c.iter().enumerate() {
            mult *= BigRational::from_integer(binomial(rest, ca)) * num_traits::pow(w[a].clone(), ca);
            rest -= ca;
        }
        if mult.is_zero() {
            return;
        }
        total += mult * (ratio(c, size, k, w) - BigRational::one()).abs();
    };
    walk(0, size, &mut counts, &mut visit);
    Ok(total)
}

/// Monte-Carlo estimate of the same error: mean of `|r(x) − 1|` over `x ~ μ^S`, with its
/// standard error.
pub fn pairing_error_mc(space: &ProbabilitySpace, size: usize, k: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    check(size, k)?;
    if samples < 2 {
        return Err(Error::Invalid("need at least two samples".into()));
    }
    let s = space.size();
    let z: f64 = space.shadow().iter().map(|p| p.powi(k as i32)).sum();
    let denom = to_f64(&BigRational::from_integer(binomial(size, k)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sq = 0.0;
    let mut counts = vec![0usize; s];
    for _ in 0..samples {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..size {
            counts[space.sample(&mut rng)] += 1;
        }
        let num: f64 = counts
            .iter()
            .map(|&c| to_f64(&BigRational::from_integer(binomial(c, k))))
            .sum();
        let v = (num / denom / z - 1.0).abs();
        sum += v;
        sq += v * v;
    }
    let mean = sum / samples as f64;
    let var = (sq / samples as f64 - mean * mean).max(0.0);
    Ok((mean, (var / (samples - 1) as f64).sqrt()))
}
