//! Abelian embeddings of support sets, decided through the relation lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::matrix::{smith_normal_form, HermiteSolver, IntegerMatrix};
use crate::error::{Error, Result};
use crate::structure::{is_pairwise_connected, Bipartition, SupportSet};

const RELATION_CAP: u128 = 1 << 22;

/// Column `(i, a)` of the relation matrix.
pub fn column_index(s: &SupportSet, i: usize, a: usize) -> usize {
    s.sizes()[..i].iter().sum::<usize>() + a
}

/// One row per support tuple, with a 1 in column `(i, t_i)` for every coordinate.
pub fn relation_matrix(s: &SupportSet) -> Result<IntegerMatrix> {
    let sizes = s.sizes();
    let n: usize = sizes.iter().sum();
    let cells = (s.len() as u128) * (n as u128);
    if cells > RELATION_CAP {
        return Err(Error::cap("relation matrix", cells, RELATION_CAP));
    }
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &x| {
            let o = *acc;
            *acc += x;
            Some(o)
        })
        .collect();
    let rows = s
        .tuples()
        .iter()
        .map(|t| {
            let mut row = vec![BigInt::zero(); n];
            for (i, &a) in t.iter().enumerate() {
                row[offsets[i] + a] = BigInt::one();
            }
            row
        })
        .collect();
    IntegerMatrix::new(n, rows)
}

/// `Z^free_rank x Z/d_1 x ... x Z/d_r`. Elements are written torsion coordinates first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroupPresentation {
    pub free_rank: usize,
    pub torsion_factors: Vec<BigInt>,
}

impl AbelianGroupPresentation {
    pub fn new(free_rank: usize, torsion_factors: Vec<BigInt>) -> Result<Self> {
        if torsion_factors.iter().any(|d| d < &BigInt::from(2)) {
            return Err(Error::Invalid("torsion factors must be at least 2".into()));
        }
        if torsion_factors.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(Error::Invalid("torsion factors must form a divisibility chain".into()));
        }
        Ok(AbelianGroupPresentation {
            free_rank,
            torsion_factors,
        })
    }

    pub fn cyclic(m: u64) -> Self {
        if m == 0 {
            AbelianGroupPresentation {
                free_rank: 1,
                torsion_factors: vec![],
            }
        } else {
            Self::new(0, vec![BigInt::from(m)]).expect("m >= 2")
        }
    }

    pub fn dimension(&self) -> usize {
        self.torsion_factors.len() + self.free_rank
    }

    pub fn is_trivial_group(&self) -> bool {
        self.dimension() == 0
    }

    /// Canonical representative: torsion coordinates in `[0, d)`.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter()
            .enumerate()
            .map(|(t, v)| match self.torsion_factors.get(t) {
                Some(d) => v.mod_floor(d),
                None => v.clone(),
            })
            .collect()
    }

    pub fn is_identity(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(Zero::is_zero)
    }

    pub fn add(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let sum: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&sum)
    }

    pub fn sub(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        let d: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.reduce(&d)
    }
}

impl Serialize for AbelianGroupPresentation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            free_rank: usize,
            torsion_factors: Vec<String>,
        }
        Raw {
            free_rank: self.free_rank,
            torsion_factors: self.torsion_factors.iter().map(ToString::to_string).collect(),
        }
        .serialize(s)
    }
}

/// Maps `σ_i : Σ_i -> G`, one group element per label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub group: AbelianGroupPresentation,
    pub sigma: Vec<Vec<Vec<BigInt>>>,
}

impl Serialize for EmbeddingWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            group: &'a AbelianGroupPresentation,
            sigma: Vec<Vec<Vec<String>>>,
        }
        Raw {
            group: &self.group,
            sigma: self
                .sigma
                .iter()
                .map(|m| m.iter().map(|g| g.iter().map(ToString::to_string).collect()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl EmbeddingWitness {
    /// Whether `σ_i` takes more than one value.
    pub fn is_nonconstant(&self, i: usize) -> bool {
        let m = &self.sigma[i];
        m.iter().any(|g| !self.group.is_identity(&self.group.sub(g, &m[0])))
    }

    pub fn is_nontrivial(&self) -> bool {
        (0..self.sigma.len()).any(|i| self.is_nonconstant(i))
    }

    /// Sum of `σ_i(t_i)` over the coordinates.
    pub fn evaluate(&self, t: &[usize]) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.group.dimension()];
        for (i, &a) in t.iter().enumerate() {
            acc = self.group.add(&acc, &self.sigma[i][a]);
        }
        acc
    }

    /// Extends a witness on the marginal `S_{-i}` by `σ_i = 0`.
    pub fn extend_with_zero(&self, i: usize, size: usize) -> EmbeddingWitness {
        let mut sigma = self.sigma.clone();
        sigma.insert(i.min(sigma.len()), vec![vec![BigInt::zero(); self.group.dimension()]; size]);
        EmbeddingWitness {
            group: self.group.clone(),
            sigma,
        }
    }
}

/// Shape check plus the relation on every support tuple. Does not require non-triviality.
pub fn satisfies_relations(s: &SupportSet, w: &EmbeddingWitness) -> bool {
    let dim = w.group.dimension();
    if w.sigma.len() != s.k() {
        return false;
    }
    for (m, &size) in w.sigma.iter().zip(&s.sizes()) {
        if m.len() != size || m.iter().any(|g| g.len() != dim) {
            return false;
        }
    }
    s.tuples().iter().all(|t| w.group.is_identity(&w.evaluate(t)))
}

/// A valid non-trivial embedding of `s`.
pub fn verify_witness(s: &SupportSet, w: &EmbeddingWitness) -> bool {
    satisfies_relations(s, w) && w.is_nontrivial()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalEmbedding {
    /// `σ_i(a)` is the class of `e_(i,a)` in `Z^N / rows(M)`.
    pub embedding: EmbeddingWitness,
    pub trivial: bool,
    /// First `(i, a, a0)` with `e_(i,a) - e_(i,a0)` outside the row lattice.
    pub separating: Option<(usize, usize, usize)>,
}

/// The universal embedding into the cokernel of the relation matrix.
pub fn universal_embedding(s: &SupportSet) -> Result<UniversalEmbedding> {
    let m = relation_matrix(s)?;
    let n = m.cols();
    let snf = smith_normal_form(&m);
    debug_assert!(snf.verify(&m));
    let factors = snf.invariant_factors();
    let rank = factors.len();
    let torsion: Vec<usize> = (0..rank).filter(|&t| factors[t] > BigInt::one()).collect();
    let group = AbelianGroupPresentation::new(n - rank, torsion.iter().map(|&t| factors[t].clone()).collect())?;
    let keep: Vec<usize> = torsion.iter().copied().chain(rank..n).collect();

    let sizes = s.sizes();
    let mut sigma = Vec::with_capacity(s.k());
    let mut col = 0;
    for &size in &sizes {
        let mut m_i = Vec::with_capacity(size);
        for _ in 0..size {
            let raw: Vec<BigInt> = keep.iter().map(|&t| snf.v.get(col, t).clone()).collect();
            m_i.push(group.reduce(&raw));
            col += 1;
        }
        sigma.push(m_i);
    }
    let embedding = EmbeddingWitness { group, sigma };
    debug_assert!(satisfies_relations(s, &embedding));

    let solver = HermiteSolver::new(&m);
    let mut separating = None;
    'outer: for (i, &size) in sizes.iter().enumerate() {
        let base = column_index(s, i, 0);
        for a in 1..size {
            let mut v = vec![BigInt::zero(); n];
            v[base + a] = BigInt::one();
            v[base] = -BigInt::one();
            if !solver.contains(&v) {
                separating = Some((i, a, 0));
                break 'outer;
            }
        }
    }
    Ok(UniversalEmbedding {
        trivial: separating.is_none(),
        embedding,
        separating,
    })
}

/// A non-trivial embedding into `(Z, +)`, if one exists. The witness is primitive with
/// its first nonzero entry positive.
pub fn has_z_embedding(s: &SupportSet) -> Result<Option<EmbeddingWitness>> {
    let m = relation_matrix(s)?;
    let n = m.cols();
    let snf = smith_normal_form(&m);
    let rank = snf.rank();
    // the constant-per-block solutions with zero total span a space of dimension k - 1
    if n - rank <= s.k() - 1 {
        return Ok(None);
    }
    let sizes = s.sizes();
    let group = AbelianGroupPresentation::cyclic(0);
    for t in rank..n {
        let mut col: Vec<BigInt> = (0..n).map(|r| snf.v.get(r, t).clone()).collect();
        let g = col.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            continue;
        }
        let first_negative = col.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
        for x in col.iter_mut() {
            *x = &*x / &g;
            if first_negative {
                *x = -&*x;
            }
        }
        let mut sigma = Vec::with_capacity(s.k());
        let mut c = 0;
        for &size in &sizes {
            sigma.push((0..size).map(|a| vec![col[c + a].clone()]).collect());
            c += size;
        }
        let w = EmbeddingWitness {
            group: group.clone(),
            sigma,
        };
        if w.is_nontrivial() {
            debug_assert!(verify_witness(s, &w));
            return Ok(Some(w));
        }
    }
    // kernel dimension exceeds the constant solutions, so some basis vector is non-constant
    unreachable!("integer kernel basis consists of constant solutions only")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarginalReport {
    pub pairwise_connected: bool,
    pub disconnection: Option<Bipartition>,
    /// Per coordinate `i`: whether `S_{-i}` admits no non-trivial embedding.
    pub marginal_trivial: Vec<bool>,
    pub holds: bool,
}

pub fn check_marginal_condition(s: &SupportSet) -> Result<MarginalReport> {
    let (pairwise_connected, disconnection) = is_pairwise_connected(s);
    let mut marginal_trivial = Vec::with_capacity(s.k());
    for i in 0..s.k() {
        // a single coordinate has no (k-1)-marginal to speak of
        let ok = if s.k() < 2 {
            false
        } else {
            universal_embedding(&s.without(i)?)?.trivial
        };
        marginal_trivial.push(ok);
    }
    let passing = marginal_trivial.iter().filter(|&&b| b).count();
    Ok(MarginalReport {
        holds: pairwise_connected && passing >= 2,
        pairwise_connected,
        disconnection,
        marginal_trivial,
    })
}

/// The `Z/2` embedding read off a disconnection of `S_{i,j}`: `σ_i = 1` on the left
/// block, `σ_j = 1` on the right block, every other map zero.
pub fn bipartition_embedding_witness(s: &SupportSet, partition: &Bipartition) -> Result<EmbeddingWitness> {
    if !partition.certifies(s) {
        return Err(Error::Precondition(format!(
            "partition does not certify a disconnection of coordinates ({}, {})",
            partition.i, partition.j
        )));
    }
    let one = || vec![BigInt::one()];
    let zero = || vec![BigInt::zero()];
    let sigma = s
        .sizes()
        .iter()
        .enumerate()
        .map(|(c, &size)| {
            (0..size)
                .map(|a| {
                    let hit = (c == partition.i && partition.left.contains(&a))
                        || (c == partition.j && partition.right.contains(&a));
                    if hit {
                        one()
                    } else {
                        zero()
                    }
                })
                .collect()
        })
        .collect();
    let w = EmbeddingWitness {
        group: AbelianGroupPresentation::cyclic(2),
        sigma,
    };
    if !verify_witness(s, &w) {
        return Err(Error::Invalid("bipartition witness failed verification".into()));
    }
    Ok(w)
}
