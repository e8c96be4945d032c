use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::generalized::GeneralizedRestriction;
use super::grr::GeneralizedRandomRestriction;
use crate::error::{Error, Result};
use crate::rational::{format_rational, serde_rational};
use crate::util::digits;

/// `ℛ|E`: `ℛ` reweighted by `Pr[E | E_ρ]` (Bayes rule).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalGrr {
    #[serde(with = "serde_rational")]
    pub event_probability: BigRational,
    pub entries: Vec<ConditionalEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalEntry {
    pub restriction: GeneralizedRestriction,
    /// `ℛ[ρ]`
    #[serde(with = "serde_rational")]
    pub prior: BigRational,
    /// `Pr[E | E_ρ]`
    #[serde(with = "serde_rational")]
    pub likelihood: BigRational,
    /// `(ℛ|E)[ρ]`
    #[serde(with = "serde_rational")]
    pub weight: BigRational,
}

fn point_mass(x: usize, s: usize, n: usize, w: &[BigRational]) -> BigRational {
    digits(x, s, n).iter().fold(BigRational::one(), |a, &d| a * &w[d])
}

fn check_event(r: &GeneralizedRandomRestriction, event: &[bool]) -> Result<()> {
    let len = r.space().size().pow(r.n() as u32);
    if event.len() != len {
        return Err(Error::Invalid(format!("event has {} entries, expected {len}", event.len())));
    }
    Ok(())
}

/// `ℛ|E` for an explicit event `E ⊆ Σ^n`; requires `Pr[E] > ε(ℛ)`.
pub fn conditional_grr(r: &GeneralizedRandomRestriction, event: &[bool]) -> Result<ConditionalGrr> {
    check_event(r, event)?;
    let s = r.space().size();
    let n = r.n();
    let w = r.space().weights();
    let pr_e = event
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(x, _)| point_mass(x, s, n, w))
        .fold(BigRational::zero(), |a, b| a + b);
    if pr_e <= *r.epsilon() {
        return Err(Error::Precondition(format!(
            "Pr[E] = {} does not exceed ε = {}",
            format_rational(&pr_e),
            format_rational(r.epsilon())
        )));
    }
    let mut entries = Vec::new();
    let mut total = BigRational::zero();
    for (rho, prior) in r.entries() {
        let members = rho.event_of(s)?;
        let mass = rho.mass(w);
        let inside = members
            .iter()
            .filter(|&&x| event[x])
            .map(|&x| point_mass(x, s, n, w))
            .fold(BigRational::zero(), |a, b| a + b);
        let likelihood = inside / mass;
        if likelihood.is_zero() {
            continue;
        }
        total += &likelihood * prior;
        entries.push(ConditionalEntry {
            restriction: rho.clone(),
            prior: prior.clone(),
            likelihood,
            weight: BigRational::zero(),
        });
    }
    if total.is_zero() {
        return Err(Error::ZeroMass);
    }
    for e in &mut entries {
        e.weight = &e.likelihood * &e.prior / &total;
    }
    Ok(ConditionalGrr {
        event_probability: pr_e,
        entries,
    })
}

/// Exact evaluation of the two guarantees for `ℛ|E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalCheck {
    /// Largest `|(ℛ|E)[ρ] − Pr[E|E_ρ]ℛ[ρ]/Pr[E]| − (ℛ|E)[ρ]·ε/Pr[E]` over the support.
    #[serde(with = "serde_rational")]
    pub worst_weight_slack: BigRational,
    pub weights_ok: bool,
    /// `‖E_{ρ~ℛ|E}[μ^n | E_ρ, E] − μ^n|E‖₁`
    #[serde(with = "serde_rational")]
    pub l1: BigRational,
    /// `2ε / Pr[E]`
    #[serde(with = "serde_rational")]
    pub l1_bound: BigRational,
    pub l1_ok: bool,
}

impl ConditionalCheck {
    pub fn holds(&self) -> bool {
        self.weights_ok && self.l1_ok
    }
}

/// Evaluates both bounds for `ℛ|E` exactly.
pub fn conditional_grr_property_check(r: &GeneralizedRandomRestriction, event: &[bool]) -> Result<ConditionalCheck> {
    let c = conditional_grr(r, event)?;
    let eps = r.epsilon();
    let pr_e = &c.event_probability;
    let mut worst: Option<BigRational> = None;
    for e in &c.entries {
        let dev = (&e.weight - &e.likelihood * &e.prior / pr_e).abs();
        let slack = dev - &e.weight * eps / pr_e;
        if worst.as_ref().map_or(true, |w| slack > *w) {
            worst = Some(slack);
        }
    }
    let worst = worst.unwrap_or_else(BigRational::zero);

    // E_{ρ~ℛ|E}[μ^n|E_ρ∩E] = M·1_E / Z with M the unconditioned mixture
    let s = r.space().size();
    let n = r.n();
    let w = r.space().weights();
    let mix = r.mixture();
    let z = mix
        .iter()
        .zip(event)
        .filter(|(_, &b)| b)
        .map(|(m, _)| m.clone())
        .fold(BigRational::zero(), |a, b| a + b);
    let mut l1 = BigRational::zero();
    for (x, m) in mix.iter().enumerate() {
        if event[x] {
            l1 += (m / &z - point_mass(x, s, n, w) / pr_e).abs();
        }
    }
    let l1_bound = BigRational::from_integer(2.into()) * eps / pr_e;
    Ok(ConditionalCheck {
        weights_ok: !worst.is_positive(),
        worst_weight_slack: worst,
        l1_ok: l1 <= l1_bound,
        l1,
        l1_bound,
    })
}
