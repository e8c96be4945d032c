//! Noise stability of randomly restricted functions.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::plain::sample_with;
use crate::analysis::kernel::{self, Scalar};
use crate::analysis::{is_constant, FunctionTable, RationalTable};
use crate::error::{Error, Result};
use crate::util::{checked_pow, digits};

/// Largest `2^n · |Σ|^n` summed over exactly.
pub const IDENTITY_CAP: u128 = 10_000_000;

/// `E_{I,z}[Stab_{1-δ}[g] - |ν(g)|²]` with `g = f_{I→z}`, `I ~_{1-p} [n]`, and
/// `Stab_{1-pδ}[f] - Stab_{1-p}[f]`.
fn identity_sides<T: Scalar>(vals: &[T], s: usize, n: usize, w: &[T], p: &T, delta: &T) -> (T, T) {
    let q = T::one() - p.clone();
    let inner_rho = T::one() - delta.clone();
    let mut lhs = T::zero();
    for mask in 0..(1usize << n) {
        // bit i set: coordinate i alive
        let mut prob = T::one();
        for i in 0..n {
            prob = prob * if mask >> i & 1 == 1 { p.clone() } else { q.clone() };
        }
        if prob.is_zero() {
            continue;
        }
        let fixed_coords: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let alive = n - fixed_coords.len();
        for zi in 0..s.pow(fixed_coords.len() as u32) {
            let z = digits(zi, s, fixed_coords.len());
            let mut pz = prob.clone();
            let mut fixed = vec![None; n];
            for (&i, &d) in fixed_coords.iter().zip(&z) {
                pz = pz * w[d].clone();
                fixed[i] = Some(d);
            }
            if pz.is_zero() {
                continue;
            }
            let g = kernel::restrict(vals, s, &fixed);
            let mean = kernel::expectation(&g, s, w);
            let stab = kernel::stability(&g, s, alive, w, &inner_rho);
            lhs = lhs + pz * (stab - mean.clone() * mean.conj());
        }
    }
    let hi = kernel::stability(vals, s, n, w, &(T::one() - p.clone() * delta.clone()));
    let lo = kernel::stability(vals, s, n, w, &q);
    (lhs, hi - lo)
}

fn check_size(s: usize, n: usize) -> Result<()> {
    checked_pow(2 * s, n, IDENTITY_CAP, "restriction enumeration").map(|_| ())
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} = {x} outside [0, 1]")))
    }
}

/// Both sides of the restricted-stability identity, in floating point.
pub fn restriction_stability_identity_check(f: &FunctionTable, p: f64, delta: f64) -> Result<(f64, f64)> {
    check_unit(p, "p")?;
    check_unit(delta, "δ")?;
    let s = f.alphabet_size();
    check_size(s, f.n())?;
    let w = f.weights();
    let (lhs, rhs) = identity_sides(
        f.values(),
        s,
        f.n(),
        &w,
        &Complex64::new(p, 0.0),
        &Complex64::new(delta, 0.0),
    );
    Ok((lhs.re, rhs.re))
}

/// Both sides of the restricted-stability identity, exactly.
pub fn restriction_stability_identity_exact(
    f: &RationalTable,
    p: &BigRational,
    delta: &BigRational,
) -> Result<(BigRational, BigRational)> {
    for (x, what) in [(p, "p"), (delta, "δ")] {
        if *x < BigRational::zero() || *x > BigRational::one() {
            return Err(Error::Invalid(format!("{what} outside [0, 1]")));
        }
    }
    let s = f.space().size();
    check_size(s, f.n())?;
    Ok(identity_sides(f.values(), s, f.n(), f.space().weights(), p, delta))
}

/// Empirical exceedance probability under the geometric keep-alive schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleEstimate {
    pub trials: usize,
    pub exceedances: usize,
    pub probability: f64,
    /// `1/(ηT)`
    pub bound: f64,
    /// Three standard deviations of a Bernoulli(`min(bound, 1)`) mean over `trials`.
    pub radius: f64,
    pub variance: f64,
}

impl ScheduleEstimate {
    pub fn holds(&self) -> bool {
        self.probability <= self.bound + self.radius
    }
}

/// Samples `p` uniformly from `{1, δ, .., δ^{T-1}}`, then `I ~_{1-p} [n]`, `z ~ μ^I`, and
/// counts how often `Stab_{1-δ}[f_{I→z} - ν(f_{I→z})] ≥ η·Var[f]`.
///
/// For constant `f` the event never fires.
pub fn random_restriction_degree_schedule(
    f: &FunctionTable,
    delta: f64,
    t_len: usize,
    eta: f64,
    trials: usize,
    seed: u64,
) -> Result<ScheduleEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Invalid(format!("δ = {delta} outside (0, 1)")));
    }
    if t_len == 0 || trials == 0 {
        return Err(Error::Invalid("schedule length and trial count must be positive".into()));
    }
    if eta <= 0.0 {
        return Err(Error::Invalid(format!("η = {eta} must be positive")));
    }
    let s = f.alphabet_size();
    let n = f.n();
    let w = f.weights();
    let variance = f.variance();
    let constant = is_constant(f, 1e-12);
    let rho = Complex64::new(1.0 - delta, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let t = rng.gen_range(0..t_len);
        let p = delta.powi(t as i32);
        let r = sample_with(f.space(), n, p, &mut rng);
        if constant {
            continue;
        }
        let g = kernel::restrict(f.values(), s, &r.as_options());
        let mean = kernel::expectation(&g, s, &w);
        let stab = kernel::stability(&g, s, r.alive().len(), &w, &rho).re - mean.norm_sqr();
        if stab >= eta * variance {
            hits += 1;
        }
    }
    let bound = 1.0 / (eta * t_len as f64);
    let b = bound.min(1.0);
    Ok(ScheduleEstimate {
        trials,
        exceedances: hits,
        probability: hits as f64 / trials as f64,
        bound,
        radius: 3.0 * (b * (1.0 - b) / trials as f64).sqrt(),
        variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ProbabilitySpace;
    use crate::rational::rat;
    use proptest::prelude::*;
    use rand::Rng;

    fn dictator(n: usize) -> FunctionTable {
        FunctionTable::real(ProbabilitySpace::uniform(2), n, |x| if x[0] == 0 { 1.0 } else { -1.0 }).unwrap()
    }

    #[test]
    fn keep_nothing_gives_zero() {
        let f = dictator(3);
        let (l, r) = restriction_stability_identity_check(&f, 0.0, 0.3).unwrap();
        assert!(l.abs() < 1e-15 && r.abs() < 1e-15);
    }

    #[test]
    fn dictator_closed_form() {
        for (p, d) in [(0.3, 0.2), (0.9, 0.5), (1.0, 0.7)] {
            let (l, r) = restriction_stability_identity_check(&dictator(3), p, d).unwrap();
            let want = p * (1.0 - d);
            assert!((l - want).abs() < 1e-12 && (r - want).abs() < 1e-12, "{l} {r} {want}");
        }
    }

    #[test]
    fn exact_sides_agree_on_a_biased_space() {
        let sp = ProbabilitySpace::new(vec![rat(1, 6), rat(1, 3), rat(1, 2)]).unwrap();
        let vals: Vec<BigRational> = (0..27).map(|i| rat((i * 7 % 11) as i64 - 5, 5)).collect();
        let f = RationalTable::new(sp, 3, vals).unwrap();
        let (l, r) = restriction_stability_identity_exact(&f, &rat(2, 7), &rat(1, 3)).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn schedule_constant_never_fires() {
        let f = FunctionTable::constant(ProbabilitySpace::uniform(2), 4, Complex64::new(0.5, 0.0)).unwrap();
        let e = random_restriction_degree_schedule(&f, 0.5, 4, 0.5, 1000, 1).unwrap();
        assert_eq!(e.exceedances, 0);
    }

    #[test]
    fn schedule_dictator_fires_when_the_coordinate_survives() {
        let e = random_restriction_degree_schedule(&dictator(4), 0.5, 4, 0.3, 20_000, 2).unwrap();
        // alive with probability (1 + 1/2 + 1/4 + 1/8)/4
        let want = 0.46875;
        let sd = (want * (1.0 - want) / 20_000.0f64).sqrt();
        assert!((e.probability - want).abs() < 4.0 * sd, "{e:?}");
        assert!(e.holds());
    }

    #[test]
    fn schedule_parity_within_bound() {
        let f = FunctionTable::real(ProbabilitySpace::uniform(2), 6, |x| {
            if x.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 }
        })
        .unwrap();
        let e = random_restriction_degree_schedule(&f, 0.5, 4, 0.5, 10_000, 3).unwrap();
        assert!(e.holds(), "{e:?}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = dictator(2);
        assert!(restriction_stability_identity_check(&f, 1.5, 0.1).is_err());
        assert!(random_restriction_degree_schedule(&f, 1.0, 4, 0.5, 10, 0).is_err());
        assert!(random_restriction_degree_schedule(&f, 0.5, 0, 0.5, 10, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn identity_holds_in_floating_point(
            n in 1usize..5,
            s in 2usize..4,
            p in 0.0f64..=1.0,
            d in 0.0f64..=1.0,
            seed in 0u64..10_000,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = FunctionTable::from_fn(ProbabilitySpace::uniform(s), n, |_| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }).unwrap();
            let (l, r) = restriction_stability_identity_check(&f, p, d).unwrap();
            prop_assert!((l - r).abs() <= 1e-10);
        }

        #[test]
        fn identity_is_exact_in_rationals(n in 1usize..4, a in 0i64..=5, b in 0i64..=5, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<BigRational> = (0..1usize << n).map(|_| rat(rng.gen_range(-4..=4), 4)).collect();
            let f = RationalTable::new(ProbabilitySpace::new(vec![rat(1, 4), rat(3, 4)]).unwrap(), n, vals).unwrap();
            let (l, r) = restriction_stability_identity_exact(&f, &rat(a, 5), &rat(b, 5)).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}
