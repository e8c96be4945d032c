use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, to_f64};

/// A finite alphabet `{0, .., s-1}` with an exact measure and a binary64 shadow.
#[derive(Clone, Debug)]
pub struct ProbabilitySpace {
    weights: Vec<BigRational>,
    shadow: Vec<f64>,
}

// the shadow is a function of the weights
impl PartialEq for ProbabilitySpace {
    fn eq(&self, other: &Self) -> bool {
        self.weights == other.weights
    }
}

impl Eq for ProbabilitySpace {}

impl ProbabilitySpace {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Invalid("empty alphabet".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::Invalid("negative weight".into()));
        }
        let total: BigRational = weights.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::Invalid(format!("measure has mass {}", format_rational(&total))));
        }
        let shadow = weights.iter().map(to_f64).collect();
        Ok(ProbabilitySpace { weights, shadow })
    }

    pub fn uniform(s: usize) -> Self {
        Self::new(vec![rat(1, s as i64); s]).expect("uniform measure is valid")
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Float copy of the measure.
    pub fn shadow(&self) -> &[f64] {
        &self.shadow
    }

    pub fn full_support(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
    }

    /// Symbols with positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.size()).filter(|&a| !self.weights[a].is_zero()).collect()
    }

    /// Samples a symbol by inverse transform on the float shadow.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, &w) in self.shadow.iter().enumerate() {
            acc += w;
            if u < acc && w > 0.0 {
                return a;
            }
        }
        *self.support().last().expect("a measure has support")
    }
}

impl Serialize for ProbabilitySpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.weights.iter().map(format_rational).collect();
        v.serialize(s)
    }
}
