//! Iterated increments until the restricted functions look product pseudorandom.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::generalized::{apply_generalized, GeneralizedRestriction};
use super::grr::GeneralizedRandomRestriction;
use super::increment::{expected_squared_mean, increment_grr_with, IncrementConfig};
use crate::analysis::{is_constant, product_pseudorandomness_estimate_with, FunctionTable, PseudorandomnessConfig};
use crate::error::{Error, Result};
use crate::rational::{serde_rational, to_f64};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformizeConfig {
    /// Target bad-probability `δ`.
    pub delta: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Detection of bad restrictions; `n'` is `⌈√m(ρ)⌉`.
    pub pseudo: PseudorandomnessConfig,
    pub increment: IncrementConfig,
    /// Defaults to `⌈50r/(δγ³)⌉`.
    pub max_iterations: Option<usize>,
}

impl UniformizeConfig {
    pub fn new(delta: f64, gamma: f64, seed: u64) -> Self {
        UniformizeConfig {
            delta,
            gamma,
            seed,
            pseudo: PseudorandomnessConfig {
                stop_on_certificate: true,
                ..PseudorandomnessConfig::default()
            },
            increment: IncrementConfig::default(),
            max_iterations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    #[serde(with = "serde_rational")]
    pub bad_probability: BigRational,
    pub potential_before: f64,
    pub potential_after: f64,
    /// `2(r−1)ε` of the composed restriction.
    pub slack: f64,
    /// Restrictions that received an increment.
    pub increments: usize,
    /// Bad restrictions for which no increment could be built.
    pub skipped: usize,
}

impl IterationRecord {
    pub fn monotone_within_slack(&self) -> bool {
        self.potential_after >= self.potential_before - self.slack - 1e-12
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformizeReport {
    pub iterations: Vec<IterationRecord>,
    pub cap: usize,
    #[serde(with = "serde_rational")]
    pub bad_probability: BigRational,
    pub potential: f64,
    pub stop_reason: String,
    pub m: usize,
    #[serde(with = "serde_rational")]
    pub epsilon: BigRational,
}

impl UniformizeReport {
    /// Iterations that composed at least one increment.
    pub fn increments(&self) -> usize {
        self.iterations.iter().filter(|r| r.increments > 0).count()
    }

    pub fn monotone_within_slack(&self) -> bool {
        self.iterations.iter().all(IterationRecord::monotone_within_slack)
    }
}

fn potential(gs: &[FunctionTable], r: &GeneralizedRandomRestriction) -> Result<f64> {
    gs.iter().map(|g| expected_squared_mean(g, r)).sum()
}

/// First `i` with `(g_i)_ρ − μ((g_i)_ρ)` not `(⌈√m(ρ)⌉, γ)`-pseudorandom.
fn bad_index(gs: &[FunctionTable], rho: &GeneralizedRestriction, cfg: &UniformizeConfig, seed: u64) -> Result<Option<usize>> {
    if rho.m() == 0 {
        return Ok(None);
    }
    for (i, g) in gs.iter().enumerate() {
        let h = apply_generalized(g, rho)?.centered();
        if is_constant(&h, 1e-12) {
            continue;
        }
        let n_prime = ((rho.m() as f64).sqrt().ceil() as usize).min(rho.m());
        let pseudo = PseudorandomnessConfig { seed, ..cfg.pseudo.clone() };
        if product_pseudorandomness_estimate_with(&h, n_prime, cfg.gamma, &pseudo)?.not_pseudorandom() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

pub fn uniformize(gs: &[FunctionTable], delta: f64, gamma: f64, seed: u64) -> Result<(GeneralizedRandomRestriction, UniformizeReport)> {
    uniformize_with(gs, &UniformizeConfig::new(delta, gamma, seed))
}

/// Starts from the do-nothing restriction; each round increments every bad restriction.
///
/// Stops when the bad-probability is at most `δ`, or when a round fails to raise the
/// potential `Σ_i E_ρ|μ((g_i)_ρ)|²` (that round is discarded). Reaching the cap is an error.
pub fn uniformize_with(gs: &[FunctionTable], cfg: &UniformizeConfig) -> Result<(GeneralizedRandomRestriction, UniformizeReport)> {
    let first = gs.first().ok_or_else(|| Error::Invalid("no functions given".into()))?;
    for g in gs {
        first.check_same(g)?;
        if !g.is_one_bounded(1e-9) {
            return Err(Error::Precondition("function is not 1-bounded".into()));
        }
    }
    if !(cfg.delta > 0.0 && cfg.delta <= 1.0 && cfg.gamma > 0.0 && cfg.gamma <= 1.0) {
        return Err(Error::Invalid("δ and γ must lie in (0, 1]".into()));
    }
    let count = gs.len();
    let cap = cfg
        .max_iterations
        .unwrap_or_else(|| (50.0 * count as f64 / (cfg.delta * cfg.gamma.powi(3))).ceil() as usize);
    let delta = crate::rational::from_f64(cfg.delta)?;

    let mut r = GeneralizedRandomRestriction::identity(first.space().clone(), first.n())?;
    let mut pot = potential(gs, &r)?;
    let mut records = Vec::new();
    for iter in 0..cap {
        let mut bad = Vec::with_capacity(r.entries().len());
        let mut bad_prob = BigRational::zero();
        for (idx, (rho, w)) in r.entries().iter().enumerate() {
            let b = bad_index(gs, rho, cfg, cfg.seed ^ ((iter as u64) << 40) ^ idx as u64)?;
            if b.is_some() {
                bad_prob += w;
            }
            bad.push(b);
        }
        if bad_prob <= delta {
            return Ok(finish(r, records, cap, bad_prob, pot, "bad probability at most δ"));
        }
        let mut increments = 0;
        let mut skipped = 0;
        let mut idx = 0;
        let next = r.compose_each(|rho| {
            let b = bad[idx];
            let seed = cfg.seed ^ ((iter as u64) << 40) ^ (idx as u64) << 8 ^ 0x5a;
            idx += 1;
            let Some(i) = b else { return Ok(None) };
            let h = apply_generalized(&gs[i], rho)?;
            match increment_grr_with(&h, cfg.gamma, seed, &cfg.increment) {
                Ok((inner, _)) => {
                    increments += 1;
                    Ok(Some(inner))
                }
                Err(Error::NoCertificate) => {
                    skipped += 1;
                    Ok(None)
                }
                Err(e) => Err(e),
            }
        })?;
        let after = potential(gs, &next)?;
        let record = IterationRecord {
            bad_probability: bad_prob.clone(),
            potential_before: pot,
            potential_after: after,
            slack: 2.0 * (count as f64 - 1.0) * to_f64(next.epsilon()),
            increments,
            skipped,
        };
        records.push(record);
        if increments == 0 || after <= pot + 1e-12 {
            return Ok(finish(r, records, cap, bad_prob, pot, "potential stopped growing"));
        }
        r = next;
        pot = after;
    }
    Err(Error::NoConvergence {
        iterations: cap,
        detail: format!("potential {pot:.6} after {cap} rounds"),
    })
}

fn finish(
    r: GeneralizedRandomRestriction,
    iterations: Vec<IterationRecord>,
    cap: usize,
    bad_probability: BigRational,
    potential: f64,
    reason: &str,
) -> (GeneralizedRandomRestriction, UniformizeReport) {
    let report = UniformizeReport {
        iterations,
        cap,
        bad_probability,
        potential,
        stop_reason: reason.to_string(),
        m: r.m(),
        epsilon: r.epsilon().clone(),
    };
    (r, report)
}
