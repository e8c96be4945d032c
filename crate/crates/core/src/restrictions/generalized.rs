use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::FunctionTable;
use crate::error::{Error, Result};
use crate::util::checked_pow;

/// Largest `|Σ|^n` enumerated when listing events.
pub const EVENT_CAP: u128 = 1 << 24;

/// `ρ = (T_1, .., T_m, I, z)`: the classes are forced equal, `I` is fixed to `z`.
///
/// Classes are kept sorted internally; their order defines the free coordinates of `f_ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawGeneralized", into = "RawGeneralized")]
pub struct GeneralizedRestriction {
    n: usize,
    classes: Vec<Vec<usize>>,
    fixed: BTreeMap<usize, usize>,
}

/// Serialized form: `{n, classes, fixed, values}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawGeneralized {
    n: usize,
    classes: Vec<Vec<usize>>,
    fixed: Vec<usize>,
    values: Vec<usize>,
}

impl From<GeneralizedRestriction> for RawGeneralized {
    fn from(r: GeneralizedRestriction) -> Self {
        RawGeneralized {
            n: r.n,
            classes: r.classes,
            fixed: r.fixed.keys().copied().collect(),
            values: r.fixed.values().copied().collect(),
        }
    }
}

impl TryFrom<RawGeneralized> for GeneralizedRestriction {
    type Error = Error;

    fn try_from(r: RawGeneralized) -> Result<Self> {
        if r.fixed.len() != r.values.len() {
            return Err(Error::Invalid("fixed coordinates and values differ in length".into()));
        }
        GeneralizedRestriction::new(r.n, r.classes, r.fixed.into_iter().zip(r.values).collect())
    }
}

impl GeneralizedRestriction {
    pub fn new(n: usize, mut classes: Vec<Vec<usize>>, fixed: BTreeMap<usize, usize>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut mark = |i: usize| -> Result<()> {
            if i >= n {
                return Err(Error::Index { index: i, limit: n });
            }
            if seen[i] {
                return Err(Error::Invalid(format!("coordinate {i} appears twice in the partition")));
            }
            seen[i] = true;
            Ok(())
        };
        for c in &mut classes {
            if c.is_empty() {
                return Err(Error::Invalid("empty merge class".into()));
            }
            c.sort_unstable();
            for &i in c.iter() {
                mark(i)?;
            }
        }
        for &i in fixed.keys() {
            mark(i)?;
        }
        if let Some(i) = seen.iter().position(|&b| !b) {
            return Err(Error::Invalid(format!("coordinate {i} is neither merged nor fixed")));
        }
        Ok(GeneralizedRestriction { n, classes, fixed })
    }

    /// All singleton classes, nothing fixed.
    pub fn identity(n: usize) -> Self {
        GeneralizedRestriction {
            n,
            classes: (0..n).map(|i| vec![i]).collect(),
            fixed: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of free coordinates `m(ρ)`.
    pub fn m(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn fixed(&self) -> &BTreeMap<usize, usize> {
        &self.fixed
    }

    /// Least element of each class.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    /// Class index of every coordinate, `None` for fixed ones.
    pub fn class_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (t, c) in self.classes.iter().enumerate() {
            for &i in c {
                out[i] = Some(t);
            }
        }
        out
    }

    /// The point `x` with `x_i = y_t` on `T_t` and `x_i = z_i` on `I`.
    pub fn lift(&self, y: &[usize]) -> Vec<usize> {
        let mut x = vec![0; self.n];
        for (t, c) in self.classes.iter().enumerate() {
            for &i in c {
                x[i] = y[t];
            }
        }
        for (&i, &z) in &self.fixed {
            x[i] = z;
        }
        x
    }

    /// Membership in `E_ρ`.
    pub fn contains(&self, x: &[usize]) -> bool {
        self.classes.iter().all(|c| c.iter().all(|&i| x[i] == x[c[0]]))
            && self.fixed.iter().all(|(&i, &z)| x[i] == z)
    }

    pub(crate) fn check_alphabet(&self, s: usize) -> Result<()> {
        match self.fixed.values().find(|&&z| z >= s) {
            Some(&z) => Err(Error::Index { index: z, limit: s }),
            None => Ok(()),
        }
    }

    /// Indices (coordinate 0 most significant) of the points of `E_ρ` in increasing order.
    pub fn event_of(&self, s: usize) -> Result<Vec<usize>> {
        checked_pow(s, self.n, EVENT_CAP, "event space")?;
        self.check_alphabet(s)?;
        let m = self.m();
        let count = s.pow(m as u32);
        let mut out: Vec<usize> = (0..count)
            .map(|yi| {
                let y = crate::util::digits(yi, s, m);
                crate::util::undigits(&self.lift(&y), s)
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// `μ^n(E_ρ) = Π_{i∈I} μ(z_i) · Π_t Σ_a μ(a)^{|T_t|}`.
    pub fn mass(&self, weights: &[BigRational]) -> BigRational {
        let mut p = BigRational::one();
        for &z in self.fixed.values() {
            p *= &weights[z];
        }
        for c in &self.classes {
            p *= weights
                .iter()
                .map(|w| num_traits::pow(w.clone(), c.len()))
                .fold(BigRational::zero(), |a, b| a + b);
        }
        p
    }
}

/// `f_ρ(y) = f(lift(y))` on `Σ^{m(ρ)}`.
pub fn apply_generalized(f: &FunctionTable, rho: &GeneralizedRestriction) -> Result<FunctionTable> {
    if rho.n != f.n() {
        return Err(Error::Arity {
            expected: f.n(),
            got: rho.n,
        });
    }
    let s = f.alphabet_size();
    rho.check_alphabet(s)?;
    let m = rho.m();
    FunctionTable::from_fn(f.space().clone(), m, |y| f.get(&rho.lift(y)))
}

/// `ρ' ∘ ρ` for `ρ'` on `Σ^{m(ρ)}`: `U_i = ∪_{j∈S_i} T_j`, `K = ∪_{j∈J} T_j ∪ I`.
pub fn compose(outer: &GeneralizedRestriction, inner: &GeneralizedRestriction) -> Result<GeneralizedRestriction> {
    if outer.n != inner.m() {
        return Err(Error::Arity {
            expected: inner.m(),
            got: outer.n,
        });
    }
    let classes = outer
        .classes
        .iter()
        .map(|s| s.iter().flat_map(|&j| inner.classes[j].iter().copied()).collect())
        .collect();
    let mut fixed = inner.fixed.clone();
    for (&j, &w) in &outer.fixed {
        for &i in &inner.classes[j] {
            fixed.insert(i, w);
        }
    }
    GeneralizedRestriction::new(inner.n, classes, fixed)
}
