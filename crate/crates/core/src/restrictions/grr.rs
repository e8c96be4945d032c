use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::generalized::{compose, GeneralizedRestriction, EVENT_CAP};
use crate::analysis::ProbabilitySpace;
use crate::error::{Error, Result};
use crate::rational::{format_rational, to_f64};
use crate::util::{checked_pow, digits};

/// An explicit distribution over generalized restrictions of `Σ^n`, with its declared
/// minimum number of free coordinates `m` and its measured `ℓ1` error `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedRandomRestriction {
    space: ProbabilitySpace,
    n: usize,
    entries: Vec<(GeneralizedRestriction, BigRational)>,
    m: usize,
    epsilon: BigRational,
}

impl GeneralizedRandomRestriction {
    /// Merges repeated restrictions, checks the weights, and measures `ε` exactly.
    pub fn new(
        space: ProbabilitySpace,
        n: usize,
        entries: impl IntoIterator<Item = (GeneralizedRestriction, BigRational)>,
    ) -> Result<Self> {
        checked_pow(space.size(), n, EVENT_CAP, "restriction space")?;
        let mut merged: BTreeMap<GeneralizedRestriction, BigRational> = BTreeMap::new();
        for (rho, w) in entries {
            if rho.n() != n {
                return Err(Error::Arity { expected: n, got: rho.n() });
            }
            rho.check_alphabet(space.size())?;
            if !w.is_positive() {
                return Err(Error::Invalid(format!("weight {} is not positive", format_rational(&w))));
            }
            *merged.entry(rho).or_insert_with(BigRational::zero) += w;
        }
        let total = merged.values().fold(BigRational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::Invalid(format!("weights sum to {}", format_rational(&total))));
        }
        for rho in merged.keys() {
            if rho.mass(space.weights()).is_zero() {
                return Err(Error::ZeroMass);
            }
        }
        let entries: Vec<_> = merged.into_iter().collect();
        let m = entries.iter().map(|(r, _)| r.m()).min().unwrap_or(0);
        let mut out = GeneralizedRandomRestriction {
            space,
            n,
            entries,
            m,
            epsilon: BigRational::zero(),
        };
        out.epsilon = grr_distribution_error(&out)?;
        Ok(out)
    }

    /// The restriction that does nothing.
    pub fn identity(space: ProbabilitySpace, n: usize) -> Result<Self> {
        Self::new(space, n, [(GeneralizedRestriction::identity(n), BigRational::one())])
    }

    /// Plain restrictions: each coordinate alive with probability `p`, otherwise fixed to a
    /// `μ`-sample. Zero-weight outcomes are left out.
    pub fn plain_p_random(space: ProbabilitySpace, n: usize, p: &BigRational) -> Result<Self> {
        if p.is_negative() || *p > BigRational::one() {
            return Err(Error::Invalid(format!("keep-alive rate {} outside [0, 1]", format_rational(p))));
        }
        let s = space.size();
        checked_pow(2 * s, n, EVENT_CAP, "plain restrictions")?;
        let q = BigRational::one() - p;
        let support = space.support();
        let mut entries = Vec::new();
        for mask in 0..(1usize << n) {
            let fixed: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let alive = n - fixed.len();
            let base = num_traits::pow(p.clone(), alive) * num_traits::pow(q.clone(), fixed.len());
            if base.is_zero() {
                continue;
            }
            for zi in 0..support.len().pow(fixed.len() as u32) {
                let z = digits(zi, support.len(), fixed.len());
                let mut w = base.clone();
                let mut map = BTreeMap::new();
                for (&i, &d) in fixed.iter().zip(&z) {
                    w *= &space.weights()[support[d]];
                    map.insert(i, support[d]);
                }
                let classes = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| vec![i]).collect();
                entries.push((GeneralizedRestriction::new(n, classes, map)?, w));
            }
        }
        Self::new(space, n, entries)
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(GeneralizedRestriction, BigRational)] {
        &self.entries
    }

    /// Least number of free coordinates over the support.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Measured `‖E_ρ[μ^n | E_ρ] − μ^n‖₁`.
    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    /// `E_{ρ~ℛ}[μ^n | E_ρ]` as a table over `Σ^n`.
    pub fn mixture(&self) -> Vec<BigRational> {
        let s = self.space.size();
        let w = self.space.weights();
        let mut out = vec![BigRational::zero(); s.pow(self.n as u32)];
        for (rho, weight) in &self.entries {
            // μ^n(x)/μ^n(E_ρ) = Π_t μ(y_t)^{|T_t|} / Π_t Z_{|T_t|}: the fixed part cancels
            let sizes: Vec<usize> = rho.classes().iter().map(Vec::len).collect();
            let norm = sizes
                .iter()
                .map(|&k| w.iter().map(|a| num_traits::pow(a.clone(), k)).fold(BigRational::zero(), |x, y| x + y))
                .fold(BigRational::one(), |x, y| x * y);
            let scale = weight / norm;
            for yi in 0..s.pow(rho.m() as u32) {
                let y = digits(yi, s, rho.m());
                let mut p = scale.clone();
                for (&d, &k) in y.iter().zip(&sizes) {
                    p *= num_traits::pow(w[d].clone(), k);
                }
                if p.is_zero() {
                    continue;
                }
                let x = rho.lift(&y);
                out[crate::util::undigits(&x, s)] += p;
            }
        }
        out
    }

    /// Replaces every `ρ` by `ρ' ∘ ρ` with `ρ' ~ f(ρ)`; `None` keeps `ρ`.
    pub fn compose_each(
        &self,
        mut f: impl FnMut(&GeneralizedRestriction) -> Result<Option<GeneralizedRandomRestriction>>,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for (rho, w) in &self.entries {
            match f(rho)? {
                None => entries.push((rho.clone(), w.clone())),
                Some(inner) => {
                    if inner.n != rho.m() || inner.space != self.space {
                        return Err(Error::Invalid("inner restriction does not match the free coordinates".into()));
                    }
                    for (r2, w2) in &inner.entries {
                        entries.push((compose(r2, rho)?, w * w2));
                    }
                }
            }
        }
        Self::new(self.space.clone(), self.n, entries)
    }

    /// Draws one restriction according to the weights.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> &GeneralizedRestriction {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (rho, w) in &self.entries {
            acc += to_f64(w);
            if u < acc {
                return rho;
            }
        }
        &self.entries.last().expect("weights sum to one").0
    }
}

/// `‖E_{ρ~ℛ}[μ^n | E_ρ] − μ^n‖₁`, exact.
pub fn grr_distribution_error(r: &GeneralizedRandomRestriction) -> Result<BigRational> {
    let s = r.space.size();
    let w = r.space.weights();
    let mix = r.mixture();
    let mut total = BigRational::zero();
    for (xi, m) in mix.iter().enumerate() {
        let p = digits(xi, s, r.n)
            .iter()
            .fold(BigRational::one(), |a, &d| a * &w[d]);
        total += (m - p).abs();
    }
    Ok(total)
}

#[derive(Serialize)]
struct EntryJson<'a> {
    classes: &'a [Vec<usize>],
    fixed: Vec<usize>,
    values: Vec<usize>,
    weight: String,
}

impl Serialize for GeneralizedRandomRestriction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<EntryJson> = self
            .entries
            .iter()
            .map(|(rho, w)| EntryJson {
                classes: rho.classes(),
                fixed: rho.fixed().keys().copied().collect(),
                values: rho.fixed().values().copied().collect(),
                weight: format_rational(w),
            })
            .collect();
        let mut st = s.serialize_struct("GeneralizedRandomRestriction", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("epsilon", &format_rational(&self.epsilon))?;
        st.serialize_field("restrictions", &entries)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn deterministic_pair_merge_on_bits() {
        let rho = GeneralizedRestriction::new(2, vec![vec![0, 1]], BTreeMap::new()).unwrap();
        let r = GeneralizedRandomRestriction::new(ProbabilitySpace::uniform(2), 2, [(rho, rat(1, 1))]).unwrap();
        assert_eq!(r.mixture(), vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)]);
        assert_eq!(r.epsilon(), &rat(1, 1));
        assert_eq!(r.m(), 1);
    }

    #[test]
    fn identity_and_duplicates() {
        let sp = ProbabilitySpace::uniform(3);
        let r = GeneralizedRandomRestriction::identity(sp.clone(), 3).unwrap();
        assert!(r.epsilon().is_zero());
        let id = GeneralizedRestriction::identity(2);
        let r = GeneralizedRandomRestriction::new(sp.clone(), 2, [(id.clone(), rat(1, 3)), (id, rat(2, 3))]).unwrap();
        assert_eq!(r.entries().len(), 1);
        assert!(GeneralizedRandomRestriction::new(sp.clone(), 2, [(GeneralizedRestriction::identity(2), rat(1, 2))]).is_err());
        assert!(GeneralizedRandomRestriction::new(sp, 2, [(GeneralizedRestriction::identity(3), rat(1, 1))]).is_err());
    }

    #[test]
    fn zero_mass_restriction_is_rejected() {
        let sp = ProbabilitySpace::new(vec![rat(1, 1), rat(0, 1)]).unwrap();
        let rho = GeneralizedRestriction::new(2, vec![vec![0]], [(1, 1)].into()).unwrap();
        assert!(matches!(
            GeneralizedRandomRestriction::new(sp, 2, [(rho, rat(1, 1))]),
            Err(Error::ZeroMass)
        ));
    }

    #[test]
    fn plain_restrictions_have_weights_of_the_product_process() {
        let sp = ProbabilitySpace::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let r = GeneralizedRandomRestriction::plain_p_random(sp, 2, &rat(1, 4)).unwrap();
        // 1 all-alive + 2·2 one-fixed + 4 all-fixed
        assert_eq!(r.entries().len(), 9);
        let all_fixed = r
            .entries()
            .iter()
            .find(|(rho, _)| rho.fixed().get(&0) == Some(&1) && rho.fixed().get(&1) == Some(&1))
            .unwrap();
        assert_eq!(all_fixed.1, rat(9, 16) * rat(4, 9));
        assert_eq!(r.m(), 0);
    }

    #[test]
    fn composing_with_identities_keeps_the_distribution() {
        let sp = ProbabilitySpace::uniform(2);
        let r = GeneralizedRandomRestriction::plain_p_random(sp.clone(), 3, &rat(1, 2)).unwrap();
        let same = r
            .compose_each(|rho| Ok(Some(GeneralizedRandomRestriction::identity(sp.clone(), rho.m())?)))
            .unwrap();
        assert_eq!(same, r);
        let kept = r.compose_each(|_| Ok(None)).unwrap();
        assert_eq!(kept, r);
    }

    #[test]
    fn serializes_entries_with_rational_weights() {
        let r = GeneralizedRandomRestriction::plain_p_random(ProbabilitySpace::uniform(2), 1, &rat(1, 2)).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["epsilon"], "0");
        assert_eq!(v["restrictions"].as_array().unwrap().len(), 3);
        let mut weights: Vec<&str> = v["restrictions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["weight"].as_str().unwrap())
            .collect();
        weights.sort();
        assert_eq!(weights, ["1/2", "1/4", "1/4"]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn plain_restrictions_preserve_the_measure(n in 1usize..4, s in 2usize..4, num in 0i64..=6, seed in 0u64..1000) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<i64> = (0..s).map(|_| rng.gen_range(1..5)).collect();
            let tot: i64 = raw.iter().sum();
            let sp = ProbabilitySpace::new(raw.iter().map(|&x| rat(x, tot)).collect()).unwrap();
            let r = GeneralizedRandomRestriction::plain_p_random(sp, n, &rat(num, 6)).unwrap();
            prop_assert!(r.epsilon().is_zero());
        }

        #[test]
        fn declared_m_and_epsilon_are_rederivable(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..5);
            let sp = ProbabilitySpace::uniform(2);
            let count = rng.gen_range(1..5);
            let entries: Vec<_> = (0..count)
                .map(|_| (super::super::generalized::tests::random_gr(n, 2, &mut rng), rat(1, count)))
                .collect();
            let r = GeneralizedRandomRestriction::new(sp.clone(), n, entries).unwrap();
            let again = GeneralizedRandomRestriction::new(sp, n, r.entries().to_vec()).unwrap();
            prop_assert_eq!(again.m(), r.entries().iter().map(|(x, _)| x.m()).min().unwrap());
            prop_assert_eq!(again.epsilon(), r.epsilon());
            // the mixture is a probability distribution
            let total = r.mixture().into_iter().fold(BigRational::zero(), |a, b| a + b);
            prop_assert!(total.is_one());
        }
    }
}
