//! One step of the energy increment: a generalized random restriction that raises
//! `E_ρ |μ(g_ρ)|²` when `g − μ(g)` correlates with products under random restrictions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generalized::{apply_generalized, GeneralizedRestriction};
use super::grr::GeneralizedRandomRestriction;
use crate::analysis::kernel;
use crate::analysis::{
    max_product_correlation_with, product_pseudorandomness_estimate_with, AscentConfig, FunctionTable,
    PseudorandomnessConfig,
};
use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::util::{checked_pow, digits};

/// Largest number of restrictions an increment may list.
pub const INCREMENT_CAP: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementConfig {
    /// Certificate search; `n'` defaults to `⌈√n⌉`.
    pub pseudo: PseudorandomnessConfig,
    pub n_prime: Option<usize>,
    /// Number of groups; defaults to `⌈m^{1/(16s²)}⌉`.
    pub r: Option<usize>,
    /// Group size; defaults to `max(⌈√m/2⌉, s)`.
    pub group_size: Option<usize>,
    /// Largest multiplier; defaults to `max(⌊m^{1/(4s)}⌋, s)`.
    pub k_max: Option<usize>,
    /// Sampled fixed sets tried before giving up.
    pub candidates: usize,
    pub ascent: AscentConfig,
}

impl Default for IncrementConfig {
    fn default() -> Self {
        IncrementConfig {
            pseudo: PseudorandomnessConfig {
                stop_on_certificate: true,
                ..PseudorandomnessConfig::default()
            },
            n_prime: None,
            r: None,
            group_size: None,
            k_max: None,
            candidates: 16,
            ascent: AscentConfig {
                restarts: 6,
                iterations: 100,
                ..AscentConfig::default()
            },
        }
    }
}

/// Construction data for one good `z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementState {
    pub z: Vec<usize>,
    pub correlation: f64,
    /// Phase tables `v_j` of the live coordinates, normalized so that `v_j(0) = 0`.
    pub phases: Vec<Vec<f64>>,
    /// Groups `S_i` (original coordinates), pairwise disjoint.
    pub groups: Vec<Vec<usize>>,
    /// Multipliers `k_i`, one per group.
    pub multipliers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementReport {
    pub n_prime: usize,
    pub delta_prime: f64,
    /// The fixed set `I`; its complement is the live set.
    pub fixed: Vec<usize>,
    pub live: Vec<usize>,
    /// `Pr_z[z ∈ 𝒢]`, exact over `μ^I`.
    pub good_probability: f64,
    pub s: usize,
    pub r: usize,
    pub c: f64,
    pub group_size: usize,
    pub k_max: usize,
    pub width: f64,
    pub states: Vec<IncrementState>,
    /// `|μ(g)|²`
    pub before: f64,
    /// `E_ρ |μ(g_ρ)|²`
    pub after: f64,
    pub increment: f64,
    pub m: usize,
    pub epsilon: f64,
}

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn normalized_phases(raw: &[Vec<f64>]) -> Vec<Vec<f64>> {
    raw.iter()
        .map(|v| {
            v.iter()
                .map(|&t| {
                    let d = (t - v[0]).rem_euclid(1.0);
                    if d > 1.0 - 1e-9 {
                        0.0
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect()
}

/// Smallest `k ∈ 1..=k_max` minimizing `‖k·v‖_∞` (distance to the nearest integer).
fn best_multiplier(v: &[f64], k_max: usize) -> usize {
    let mut best = (f64::INFINITY, 1);
    for k in 1..=k_max.max(1) {
        let d = v.iter().map(|&t| dist_to_int(k as f64 * t)).fold(0.0, f64::max);
        if d < best.0 - 1e-12 {
            best = (d, k);
        }
    }
    best.1
}

/// Pigeonhole grouping: bucket the live coordinates by grid cell, then cut the largest
/// buckets into groups of `size`.
fn groups(live: &[usize], phases: &[Vec<f64>], width: f64, size: usize, r: usize) -> Vec<Vec<usize>> {
    let mut buckets: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (j, &coord) in live.iter().enumerate() {
        let key = phases[j].iter().map(|&t| (t / width).floor() as i64).collect();
        buckets.entry(key).or_default().push(coord);
    }
    let mut sorted: Vec<(Vec<i64>, Vec<usize>)> = buckets.into_iter().collect();
    sorted.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    let mut out = Vec::new();
    for (_, members) in &sorted {
        for chunk in members.chunks(size) {
            if chunk.len() == size && out.len() < r {
                out.push(chunk.to_vec());
            }
        }
    }
    if out.is_empty() {
        if let Some((_, members)) = sorted.first() {
            out.push(members.iter().copied().take(size).collect());
        }
    }
    out
}

fn subsets(set: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
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
    go(set, k, 0, &mut cur, &mut out);
    out
}

/// `E_{ρ~ℛ} |μ(g_ρ)|²` in floating point.
pub fn expected_squared_mean(g: &FunctionTable, r: &GeneralizedRandomRestriction) -> Result<f64> {
    let mut total = 0.0;
    for (rho, w) in r.entries() {
        total += to_f64(w) * apply_generalized(g, rho)?.mean().norm_sqr();
    }
    Ok(total)
}

struct Candidate {
    fixed: Vec<usize>,
    good: Vec<(Vec<usize>, f64, Vec<Vec<f64>>)>,
    good_probability: f64,
}

pub fn increment_grr(g: &FunctionTable, gamma: f64, seed: u64) -> Result<(GeneralizedRandomRestriction, IncrementReport)> {
    increment_grr_with(g, gamma, seed, &IncrementConfig::default())
}

/// Builds the increment restriction for `g`.
///
/// Fails with [`Error::NoCertificate`] when no grid point certifies that `g − μ(g)` is far from
/// pseudorandom, or when no sampled fixed set has good `z` values.
pub fn increment_grr_with(
    g: &FunctionTable,
    gamma: f64,
    seed: u64,
    cfg: &IncrementConfig,
) -> Result<(GeneralizedRandomRestriction, IncrementReport)> {
    if !g.is_one_bounded(1e-9) {
        return Err(Error::Precondition("function is not 1-bounded".into()));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Invalid(format!("γ = {gamma} outside (0, 1]")));
    }
    let n = g.n();
    let s = g.alphabet_size();
    let space = g.space().clone();
    let w = space.weights();
    let f = g.centered();

    let n_prime = cfg.n_prime.unwrap_or_else(|| (n as f64).sqrt().ceil() as usize).min(n);
    let pseudo = PseudorandomnessConfig { seed, ..cfg.pseudo.clone() };
    let est = product_pseudorandomness_estimate_with(&f, n_prime, gamma, &pseudo)?;
    let delta_prime = est.certified_delta.ok_or(Error::NoCertificate)?;

    // good-set search: sampled I, exact Pr_z[𝒢]
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut tried = BTreeSet::new();
    let mut chosen: Option<Candidate> = None;
    for _ in 0..cfg.candidates.max(1) {
        let fixed: Vec<usize> = (0..n).filter(|_| rng.gen::<f64>() >= delta_prime).collect();
        if fixed.len() == n || !tried.insert(fixed.clone()) {
            continue;
        }
        checked_pow(s, fixed.len(), INCREMENT_CAP, "fixed values")?;
        let mut good = Vec::new();
        let mut prob = 0.0;
        for zi in 0..s.pow(fixed.len() as u32) {
            let z = digits(zi, s, fixed.len());
            let pz: f64 = z.iter().map(|&a| space.shadow()[a]).product();
            if pz == 0.0 {
                continue;
            }
            let mut opts = vec![None; n];
            for (&i, &a) in fixed.iter().zip(&z) {
                opts[i] = Some(a);
            }
            let vals = kernel::restrict(f.values(), s, &opts);
            let h = FunctionTable::new(space.clone(), n - fixed.len(), vals)?;
            let asc = AscentConfig {
                seed: seed ^ (zi as u64).rotate_left(17),
                target: Some(gamma),
                ..cfg.ascent
            };
            let res = max_product_correlation_with(&h, &asc);
            if res.value >= gamma - 1e-12 {
                prob += pz;
                good.push((z, res.value, res.product.phases()));
            }
        }
        let better = chosen.as_ref().map_or(true, |c| prob > c.good_probability);
        if better {
            chosen = Some(Candidate {
                fixed,
                good,
                good_probability: prob,
            });
        }
        if prob >= gamma / 2.0 {
            break;
        }
    }
    let cand = chosen.ok_or(Error::NoCertificate)?;
    if cand.good.is_empty() {
        return Err(Error::NoCertificate);
    }

    let live: Vec<usize> = (0..n).filter(|i| !cand.fixed.contains(i)).collect();
    let m = live.len();
    let mf = m as f64;
    let sf = s as f64;
    let r = cfg.r.unwrap_or_else(|| mf.powf(1.0 / (16.0 * sf * sf)).ceil() as usize).max(1);
    let group_size = cfg.group_size.unwrap_or_else(|| ((mf.sqrt() / 2.0).ceil() as usize).max(s)).max(1);
    let k_max = cfg.k_max.unwrap_or_else(|| (mf.powf(1.0 / (4.0 * sf)).floor() as usize).max(s)).max(1);
    let width = mf.powf(-1.0 / (2.0 * sf));

    let good: BTreeMap<Vec<usize>, (f64, Vec<Vec<f64>>)> =
        cand.good.into_iter().map(|(z, v, p)| (z, (v, p))).collect();
    let mut entries = Vec::new();
    let mut states = Vec::new();
    let singleton_classes: Vec<Vec<usize>> = live.iter().map(|&i| vec![i]).collect();
    for zi in 0..s.pow(cand.fixed.len() as u32) {
        let z = digits(zi, s, cand.fixed.len());
        let pz = z.iter().fold(BigRational::one(), |a, &d| a * &w[d]);
        if pz.is_zero() {
            continue;
        }
        let zmap: BTreeMap<usize, usize> = cand.fixed.iter().copied().zip(z.iter().copied()).collect();
        let Some((corr, raw)) = good.get(&z) else {
            entries.push((GeneralizedRestriction::new(n, singleton_classes.clone(), zmap)?, pz));
            continue;
        };
        let phases = normalized_phases(raw);
        let gs = groups(&live, &phases, width, group_size.min(m), r);
        let pos: BTreeMap<usize, usize> = live.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        let ks: Vec<usize> = gs
            .iter()
            .map(|grp| best_multiplier(&phases[pos[&grp[0]]], k_max.min(grp.len())))
            .collect();
        let picks: Vec<Vec<Vec<usize>>> = gs.iter().zip(&ks).map(|(grp, &k)| subsets(grp, k)).collect();
        let pick_count = picks.iter().map(Vec::len).product::<usize>();
        let pick_weight = BigRational::new(BigInt::one(), BigInt::from(pick_count));
        let merged: usize = ks.iter().sum();
        checked_pow(s, m - merged, INCREMENT_CAP / pick_count.max(1) as u128, "increment restrictions")?;
        let mut choice = vec![0usize; picks.len()];
        loop {
            let ts: Vec<Vec<usize>> = choice.iter().zip(&picks).map(|(&c, p)| p[c].clone()).collect();
            let in_t: BTreeSet<usize> = ts.iter().flatten().copied().collect();
            let j_set: Vec<usize> = live.iter().copied().filter(|i| !in_t.contains(i)).collect();
            for ui in 0..s.pow(j_set.len() as u32) {
                let u = digits(ui, s, j_set.len());
                let pu = u.iter().fold(BigRational::one(), |a, &d| a * &w[d]);
                if pu.is_zero() {
                    continue;
                }
                let mut fixed = zmap.clone();
                fixed.extend(j_set.iter().copied().zip(u.iter().copied()));
                entries.push((GeneralizedRestriction::new(n, ts.clone(), fixed)?, &pz * &pick_weight * pu));
            }
            // odometer over the picks
            let mut t = choice.len();
            let done = loop {
                if t == 0 {
                    break true;
                }
                t -= 1;
                choice[t] += 1;
                if choice[t] < picks[t].len() {
                    break false;
                }
                choice[t] = 0;
            };
            if done {
                break;
            }
        }
        states.push(IncrementState {
            z,
            correlation: *corr,
            phases,
            groups: gs,
            multipliers: ks,
        });
    }

    let grr = GeneralizedRandomRestriction::new(space, n, entries)?;
    let before = g.mean().norm_sqr();
    let after = expected_squared_mean(g, &grr)?;
    let report = IncrementReport {
        n_prime,
        delta_prime,
        fixed: cand.fixed,
        live,
        good_probability: cand.good_probability,
        s,
        r,
        c: 1.0 / (100.0 * sf * sf),
        group_size,
        k_max,
        width,
        states,
        before,
        after,
        increment: after - before,
        m: grr.m(),
        epsilon: to_f64(grr.epsilon()),
    };
    Ok((grr, report))
}
