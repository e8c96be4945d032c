use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::kernel::{self, Scalar};
use super::space::ProbabilitySpace;
use crate::error::{Error, Result};
use crate::util::{checked_pow, decode};

/// Largest table length materialized by the analysis routines.
pub const TABLE_LIMIT: u128 = 1 << 24;

/// Dense complex function on `Σ^n` under `ν^{⊗n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable {
    space: ProbabilitySpace,
    n: usize,
    values: Vec<Complex64>,
}

impl FunctionTable {
    pub fn new(space: ProbabilitySpace, n: usize, values: Vec<Complex64>) -> Result<Self> {
        let len = checked_pow(space.size(), n, TABLE_LIMIT, "function table")?;
        if values.len() != len {
            return Err(Error::Invalid(format!(
                "table has {} entries, expected {len}",
                values.len()
            )));
        }
        Ok(FunctionTable { space, n, values })
    }

    pub fn from_fn(space: ProbabilitySpace, n: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Result<Self> {
        let s = space.size();
        let len = checked_pow(s, n, TABLE_LIMIT, "function table")?;
        let values = (0..len).map(|i| f(&decode(i, &vec![s; n]))).collect();
        Ok(FunctionTable { space, n, values })
    }

    pub fn real(space: ProbabilitySpace, n: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        Self::from_fn(space, n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn constant(space: ProbabilitySpace, n: usize, c: Complex64) -> Result<Self> {
        Self::from_fn(space, n, |_| c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn alphabet_size(&self) -> usize {
        self.space.size()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, x: &[usize]) -> Complex64 {
        let s = self.alphabet_size();
        self.values[x.iter().fold(0, |acc, &d| acc * s + d)]
    }

    pub(crate) fn weights(&self) -> Vec<Complex64> {
        self.space.shadow().iter().map(|&w| Complex64::new(w, 0.0)).collect()
    }

    /// `ν(f) = E[f]`.
    pub fn mean(&self) -> Complex64 {
        kernel::expectation(&self.values, self.alphabet_size(), &self.weights())
    }

    pub fn norm2_sq(&self) -> f64 {
        inner_product(self, self).map(|c| c.re).unwrap_or(0.0)
    }

    /// `Var[f] = E|f|^2 - |E f|^2`.
    pub fn variance(&self) -> f64 {
        (self.norm2_sq() - self.mean().norm_sqr()).max(0.0)
    }

    pub fn is_one_bounded(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.norm() <= 1.0 + tol)
    }

    pub fn sub_constant(&self, c: Complex64) -> FunctionTable {
        FunctionTable {
            values: self.values.iter().map(|v| v - c).collect(),
            ..self.clone()
        }
    }

    /// `f - ν(f)`.
    pub fn centered(&self) -> FunctionTable {
        self.sub_constant(self.mean())
    }

    /// Same space and dimension, values replaced.
    pub(crate) fn with_values(&self, n: usize, values: Vec<Complex64>) -> FunctionTable {
        FunctionTable {
            space: self.space.clone(),
            n,
            values,
        }
    }

    pub(crate) fn check_same(&self, other: &FunctionTable) -> Result<()> {
        if self.n != other.n || self.space != other.space {
            return Err(Error::Invalid("functions live on different spaces".into()));
        }
        Ok(())
    }
}

/// `<f, g> = E_{x ~ ν^n}[f(x) conj(g(x))]`.
pub fn inner_product(f: &FunctionTable, g: &FunctionTable) -> Result<Complex64> {
    f.check_same(g)?;
    Ok(kernel::inner(&f.values, &g.values, f.alphabet_size(), &f.weights()))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Invalid(format!("noise parameter {rho} outside [0, 1]")));
    }
    Ok(())
}

/// `T_ρ f`: each coordinate kept with probability ρ, otherwise resampled from ν.
pub fn noise_operator(f: &FunctionTable, rho: f64) -> Result<FunctionTable> {
    check_rho(rho)?;
    let mut vals = f.values.clone();
    kernel::noise(&mut vals, f.alphabet_size(), f.n, &f.weights(), &Complex64::new(rho, 0.0));
    Ok(f.with_values(f.n, vals))
}

/// `Stab_ρ[f] = <f, T_ρ f>`, real and nonnegative.
pub fn stability(f: &FunctionTable, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let w = f.weights();
    Ok(kernel::stability(&f.values, f.alphabet_size(), f.n, &w, &Complex64::new(rho, 0.0)).re)
}

/// Rational-valued table for exact identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalTable {
    space: ProbabilitySpace,
    n: usize,
    values: Vec<BigRational>,
}

impl RationalTable {
    pub fn new(space: ProbabilitySpace, n: usize, values: Vec<BigRational>) -> Result<Self> {
        let len = checked_pow(space.size(), n, TABLE_LIMIT, "function table")?;
        if values.len() != len {
            return Err(Error::Invalid(format!(
                "table has {} entries, expected {len}",
                values.len()
            )));
        }
        Ok(RationalTable { space, n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &ProbabilitySpace {
        &self.space
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn mean(&self) -> BigRational {
        kernel::expectation(&self.values, self.space.size(), self.space.weights())
    }

    pub fn stability(&self, rho: &BigRational) -> Result<BigRational> {
        if rho < &BigRational::zero() || rho > &BigRational::from_integer(1.into()) {
            return Err(Error::Invalid("noise parameter outside [0, 1]".into()));
        }
        Ok(kernel::stability(&self.values, self.space.size(), self.n, self.space.weights(), rho))
    }

    /// Float copy.
    pub fn to_table(&self) -> FunctionTable {
        let values = self
            .values
            .iter()
            .map(|v| Complex64::from_weight(v, crate::rational::to_f64(v)))
            .collect();
        FunctionTable {
            space: self.space.clone(),
            n: self.n,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use rand::{Rng, SeedableRng};

    fn bits() -> ProbabilitySpace {
        ProbabilitySpace::uniform(2)
    }

    fn dictator(n: usize) -> FunctionTable {
        FunctionTable::real(bits(), n, |x| if x[0] == 0 { 1.0 } else { -1.0 }).unwrap()
    }

    fn random_table(space: ProbabilitySpace, n: usize, seed: u64) -> FunctionTable {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        FunctionTable::from_fn(space, n, |_| Complex64::new(rng_f(&mut rng), rng_f(&mut rng)))
            .unwrap()
    }

    fn rng_f(rng: &mut impl Rng) -> f64 {
        rng.gen_range(-1.0..1.0)
    }

    #[test]
    fn inner_product_basics() {
        let one = FunctionTable::constant(bits(), 2, Complex64::new(1.0, 0.0)).unwrap();
        assert!((inner_product(&one, &one).unwrap() - 1.0).norm() < 1e-15);
        let a = FunctionTable::real(bits(), 1, |x| (x[0] == 0) as u8 as f64).unwrap();
        let b = FunctionTable::real(bits(), 1, |x| (x[0] == 1) as u8 as f64).unwrap();
        assert_eq!(inner_product(&a, &b).unwrap(), Complex64::new(0.0, 0.0));
        assert!(inner_product(&a, &one).is_err());
    }

    #[test]
    fn inner_product_matches_double_loop() {
        let space = ProbabilitySpace::new(vec![rat(1, 6), rat(1, 3), rat(1, 2)]).unwrap();
        let f = random_table(space.clone(), 2, 1);
        let g = random_table(space.clone(), 2, 2);
        let w = space.shadow();
        let mut want = Complex64::new(0.0, 0.0);
        for a in 0..3 {
            for b in 0..3 {
                want += w[a] * w[b] * f.get(&[a, b]) * g.get(&[a, b]).conj();
            }
        }
        assert!((inner_product(&f, &g).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn noise_extremes_and_dictator() {
        let f = random_table(bits(), 3, 5);
        let same = noise_operator(&f, 1.0).unwrap();
        assert!(same.values().iter().zip(f.values()).all(|(a, b)| (a - b).norm() < 1e-15));
        let flat = noise_operator(&f, 0.0).unwrap();
        let m = f.mean();
        assert!(flat.values().iter().all(|v| (v - m).norm() < 1e-14));
        let d = noise_operator(&dictator(2), 0.3).unwrap();
        assert!((d.get(&[0, 1]).re - 0.3).abs() < 1e-15);
        assert!((d.get(&[1, 0]).re + 0.3).abs() < 1e-15);
        assert!(noise_operator(&f, 1.5).is_err());
    }

    #[test]
    fn stability_examples() {
        let c = FunctionTable::constant(bits(), 2, Complex64::new(0.6, 0.8)).unwrap();
        assert!((stability(&c, 0.4).unwrap() - 1.0).abs() < 1e-14);
        let f = random_table(bits(), 3, 9);
        assert!((stability(&f, 0.0).unwrap() - f.mean().norm_sqr()).abs() < 1e-14);
        assert!((stability(&dictator(3), 0.7).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn stability_is_a_squared_norm() {
        let f = random_table(ProbabilitySpace::uniform(3), 2, 11);
        let half = noise_operator(&f, 0.5f64.sqrt()).unwrap();
        assert!((stability(&f, 0.5).unwrap() - half.norm2_sq()).abs() < 1e-13);
    }

    #[test]
    fn rational_and_float_agree() {
        let space = ProbabilitySpace::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let vals: Vec<BigRational> = (0..8).map(|i| rat(i * i - 3, 7)).collect();
        let r = RationalTable::new(space, 3, vals).unwrap();
        let exact = crate::rational::to_f64(&r.stability(&rat(2, 5)).unwrap());
        assert!((exact - stability(&r.to_table(), 0.4).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn variance_of_dictator() {
        assert!((dictator(2).variance() - 1.0).abs() < 1e-15);
        assert!(dictator(2).is_one_bounded(0.0));
    }
}
