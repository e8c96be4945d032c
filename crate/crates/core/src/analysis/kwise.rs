use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::function::FunctionTable;
use super::space::ProbabilitySpace;
use crate::error::{Error, Result};
use crate::rational::{format_rational, to_f64};

/// A distribution `μ` on `Σ_1 x ... x Σ_k` given by its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    sizes: Vec<usize>,
    support: Vec<(Vec<usize>, BigRational)>,
}

impl JointDistribution {
    pub fn new(sizes: Vec<usize>, support: Vec<(Vec<usize>, BigRational)>) -> Result<Self> {
        let mut total = BigRational::zero();
        for (t, p) in &support {
            if t.len() != sizes.len() {
                return Err(Error::Arity {
                    expected: sizes.len(),
                    got: t.len(),
                });
            }
            if t.iter().zip(&sizes).any(|(&a, &s)| a >= s) {
                return Err(Error::Invalid(format!("tuple {t:?} outside the alphabets")));
            }
            if p <= &BigRational::zero() {
                return Err(Error::Invalid("support weights must be positive".into()));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::Invalid(format!("mass {} != 1", format_rational(&total))));
        }
        Ok(JointDistribution { sizes, support })
    }

    /// Uniform on a support set.
    pub fn uniform(s: &crate::structure::SupportSet) -> Self {
        let p = crate::rational::rat(1, s.len() as i64);
        JointDistribution {
            sizes: s.sizes(),
            support: s.tuples().iter().map(|t| (t.clone(), p.clone())).collect(),
        }
    }

    /// Product of independent marginals.
    pub fn product(spaces: &[ProbabilitySpace]) -> Result<Self> {
        let sizes: Vec<usize> = spaces.iter().map(|s| s.size()).collect();
        let total = crate::util::checked_product(&sizes, 1 << 20, "product support")?;
        let mut support = Vec::new();
        for idx in 0..total {
            let t = crate::util::decode(idx, &sizes);
            let p = t
                .iter()
                .enumerate()
                .fold(BigRational::one(), |acc, (i, &a)| acc * &spaces[i].weights()[a]);
            if !p.is_zero() {
                support.push((t, p));
            }
        }
        Self::new(sizes, support)
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn support(&self) -> &[(Vec<usize>, BigRational)] {
        &self.support
    }

    pub fn marginal(&self, i: usize) -> ProbabilitySpace {
        let mut w = vec![BigRational::zero(); self.sizes[i]];
        for (t, p) in &self.support {
            w[t[i]] += p;
        }
        ProbabilitySpace::new(w).expect("marginal of a distribution")
    }
}

fn check(fs: &[FunctionTable], mu: &JointDistribution) -> Result<usize> {
    if fs.len() != mu.k() {
        return Err(Error::Arity {
            expected: mu.k(),
            got: fs.len(),
        });
    }
    let n = fs[0].n();
    for (i, f) in fs.iter().enumerate() {
        if f.n() != n {
            return Err(Error::Invalid("functions have different dimensions".into()));
        }
        if f.space() != &mu.marginal(i) {
            return Err(Error::Invalid(format!("function {i} is not on the marginal space")));
        }
    }
    let evals = crate::util::checked_pow(mu.support.len(), n, 10_000_000, "k-wise enumeration")?;
    Ok(evals)
}

/// `E_{(x_1..x_k) ~ μ^n}[Π_i f_i(x_i)]`, summed over `supp(μ)^n`.
pub fn k_wise_correlation(fs: &[FunctionTable], mu: &JointDistribution) -> Result<Complex64> {
    let evals = check(fs, mu)?;
    let n = fs[0].n();
    let k = mu.k();
    let sup: Vec<(&Vec<usize>, f64)> = mu.support.iter().map(|(t, p)| (t, to_f64(p))).collect();
    let mut pick = vec![0usize; n];
    let mut total = Complex64::new(0.0, 0.0);
    for _ in 0..evals {
        let mut idx = vec![0usize; k];
        let mut p = 1.0;
        for &b in &pick {
            let (t, q) = sup[b];
            for i in 0..k {
                idx[i] = idx[i] * mu.sizes[i] + t[i];
            }
            p *= q;
        }
        let prod: Complex64 = (0..k).map(|i| fs[i].values()[idx[i]]).product();
        total += prod * p;
        for t in (0..n).rev() {
            pick[t] += 1;
            if pick[t] < sup.len() {
                break;
            }
            pick[t] = 0;
        }
    }
    Ok(total)
}

/// `|E[Π f_i(x_i)] - Π μ_i(f_i)|`.
pub fn independence_gap(fs: &[FunctionTable], mu: &JointDistribution) -> Result<f64> {
    let c = k_wise_correlation(fs, mu)?;
    let means: Complex64 = fs.iter().map(FunctionTable::mean).product();
    Ok((c - means).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::structure::SupportSet;
    use rand::{Rng, SeedableRng};

    fn ghz() -> JointDistribution {
        JointDistribution::uniform(
            &SupportSet::new(&[2, 2, 2], [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]).unwrap(),
        )
    }

    #[test]
    fn constants_are_independent() {
        let mu = ghz();
        let ones: Vec<FunctionTable> = (0..3)
            .map(|i| FunctionTable::constant(mu.marginal(i), 2, Complex64::new(1.0, 0.0)).unwrap())
            .collect();
        assert!((k_wise_correlation(&ones, &mu).unwrap() - 1.0).norm() < 1e-14);
        assert!(independence_gap(&ones, &mu).unwrap() < 1e-14);
    }

    #[test]
    fn ghz_signs_are_perfectly_correlated() {
        let mu = ghz();
        let fs: Vec<FunctionTable> = (0..3)
            .map(|i| FunctionTable::real(mu.marginal(i), 1, |x| if x[0] == 0 { 1.0 } else { -1.0 }).unwrap())
            .collect();
        assert!((k_wise_correlation(&fs, &mu).unwrap() - 1.0).norm() < 1e-14);
        assert!((independence_gap(&fs, &mu).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_measures_have_no_gap() {
        let spaces = [
            ProbabilitySpace::new(vec![rat(1, 3), rat(2, 3)]).unwrap(),
            ProbabilitySpace::uniform(3),
            ProbabilitySpace::new(vec![rat(1, 4), rat(3, 4)]).unwrap(),
        ];
        let mu = JointDistribution::product(&spaces).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let fs: Vec<FunctionTable> = spaces
                .iter()
                .map(|s| {
                    FunctionTable::from_fn(s.clone(), 2, |_| Complex64::new(rng.gen(), rng.gen())).unwrap()
                })
                .collect();
            assert!(independence_gap(&fs, &mu).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_spaces() {
        let mu = ghz();
        let f = FunctionTable::constant(ProbabilitySpace::uniform(3), 1, Complex64::new(1.0, 0.0)).unwrap();
        assert!(k_wise_correlation(&[f.clone(), f.clone(), f], &mu).is_err());
    }
}
