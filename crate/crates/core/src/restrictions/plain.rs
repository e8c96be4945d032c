use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generalized::{apply_generalized, GeneralizedRestriction};
use crate::analysis::{kernel, FunctionTable, ProbabilitySpace};
use crate::error::{Error, Result};

/// `ρ = (I, z)`: coordinates in `I` fixed to `z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Restriction {
    n: usize,
    fixed: BTreeMap<usize, usize>,
}

impl Restriction {
    pub fn new(n: usize, fixed: BTreeMap<usize, usize>) -> Result<Self> {
        if let Some((&i, _)) = fixed.iter().find(|(&i, _)| i >= n) {
            return Err(Error::Index { index: i, limit: n });
        }
        Ok(Restriction { n, fixed })
    }

    /// Nothing fixed.
    pub fn free(n: usize) -> Self {
        Restriction {
            n,
            fixed: BTreeMap::new(),
        }
    }

    pub fn from_options(values: &[Option<usize>]) -> Self {
        Restriction {
            n: values.len(),
            fixed: values
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|z| (i, z)))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fixed(&self) -> &BTreeMap<usize, usize> {
        &self.fixed
    }

    pub fn alive(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.fixed.contains_key(i)).collect()
    }

    pub fn as_options(&self) -> Vec<Option<usize>> {
        (0..self.n).map(|i| self.fixed.get(&i).copied()).collect()
    }

    pub fn to_generalized(&self) -> GeneralizedRestriction {
        GeneralizedRestriction::new(
            self.n,
            self.alive().into_iter().map(|i| vec![i]).collect(),
            self.fixed.clone(),
        )
        .expect("a restriction is a generalized restriction")
    }
}

/// `f_{I→z}` on the alive coordinates in increasing order.
pub fn apply_restriction(f: &FunctionTable, rho: &Restriction) -> Result<FunctionTable> {
    if rho.n != f.n() {
        return Err(Error::Arity {
            expected: f.n(),
            got: rho.n,
        });
    }
    let s = f.alphabet_size();
    if let Some(&z) = rho.fixed.values().find(|&&z| z >= s) {
        return Err(Error::Index { index: z, limit: s });
    }
    let vals = kernel::restrict(f.values(), s, &rho.as_options());
    FunctionTable::new(f.space().clone(), rho.alive().len(), vals)
}

/// `I ~_{1-p} [n]`, `z ~ ν^I`: each coordinate stays alive with probability `p`.
pub fn sample_p_random_restriction(space: &ProbabilitySpace, n: usize, p: f64, seed: u64) -> Result<Restriction> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("keep-alive rate {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_with(space, n, p, &mut rng))
}

pub(crate) fn sample_with<R: Rng>(space: &ProbabilitySpace, n: usize, p: f64, rng: &mut R) -> Restriction {
    let mut fixed = BTreeMap::new();
    for i in 0..n {
        // gen::<f64>() < 1 always, so p = 1 keeps everything
        if rng.gen::<f64>() >= p {
            fixed.insert(i, space.sample(rng));
        }
    }
    Restriction { n, fixed }
}

/// `f_{=T}(y, z)`: the merged coordinate first, the rest in increasing order.
pub fn merge_coordinates(f: &FunctionTable, t: &[usize]) -> Result<FunctionTable> {
    if t.is_empty() {
        return Err(Error::Invalid("merge set is empty".into()));
    }
    let mut classes = vec![t.to_vec()];
    classes.extend((0..f.n()).filter(|i| !t.contains(i)).map(|i| vec![i]));
    let rho = GeneralizedRestriction::new(f.n(), classes, BTreeMap::new())?;
    apply_generalized(f, &rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn bits() -> ProbabilitySpace {
        ProbabilitySpace::uniform(2)
    }

    fn sign(b: usize) -> f64 {
        if b % 2 == 0 { 1.0 } else { -1.0 }
    }

    #[test]
    fn keep_all_and_fix_all() {
        let f = FunctionTable::real(bits(), 3, |x| (x[0] + 2 * x[1] + 4 * x[2]) as f64).unwrap();
        let all = sample_p_random_restriction(&bits(), 3, 1.0, 4).unwrap();
        assert!(all.fixed().is_empty());
        assert_eq!(apply_restriction(&f, &all).unwrap(), f);
        let none = sample_p_random_restriction(&bits(), 3, 0.0, 4).unwrap();
        let g = apply_restriction(&f, &none).unwrap();
        assert_eq!(g.n(), 0);
        assert_eq!(g.values().len(), 1);
    }

    #[test]
    fn dictator_with_its_coordinate_fixed() {
        let f = FunctionTable::real(bits(), 3, |x| sign(x[0])).unwrap();
        let rho = Restriction::new(3, [(0, 1)].into()).unwrap();
        let g = apply_restriction(&f, &rho).unwrap();
        assert!(g.values().iter().all(|v| *v == Complex64::new(-1.0, 0.0)));
        assert!(Restriction::new(3, [(3, 0)].into()).is_err());
    }

    #[test]
    fn merge_examples() {
        let f = FunctionTable::real(bits(), 3, |x| (x[0] + 2 * x[1] + 4 * x[2]) as f64).unwrap();
        let g = merge_coordinates(&f, &[1]).unwrap();
        // coordinate 1 moves to the front
        assert_eq!(g.get(&[1, 0, 1]), f.get(&[0, 1, 1]));
        let parity = FunctionTable::real(bits(), 2, |x| sign(x[0] + x[1])).unwrap();
        let c = merge_coordinates(&parity, &[0, 1]).unwrap();
        assert!(c.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let maj = FunctionTable::real(bits(), 3, |x| (x.iter().sum::<usize>() >= 2) as u8 as f64).unwrap();
        let m = merge_coordinates(&maj, &[0, 1]).unwrap();
        for y in 0..2 {
            for z in 0..2 {
                let want = ((2 * y + z) >= 2) as u8 as f64;
                assert_eq!(m.get(&[y, z]).re, want);
            }
        }
        assert!(merge_coordinates(&maj, &[]).is_err());
        assert!(merge_coordinates(&maj, &[0, 3]).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_p_random_restriction(&bits(), 20, 0.5, 9).unwrap();
        assert_eq!(a, sample_p_random_restriction(&bits(), 20, 0.5, 9).unwrap());
        assert!(sample_p_random_restriction(&bits(), 2, 1.5, 0).is_err());
    }
}
