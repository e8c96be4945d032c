//! Support sets and their connectivity classifiers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

/// A nonempty set of tuples over `Σ_1 x ... x Σ_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportSet {
    alphabets: Vec<Vec<String>>,
    tuples: BTreeSet<Vec<usize>>,
}

impl SupportSet {
    pub fn with_labels(alphabets: Vec<Vec<String>>, tuples: BTreeSet<Vec<usize>>) -> Result<Self> {
        if alphabets.is_empty() {
            return Err(Error::Invalid("a support set needs at least one coordinate".into()));
        }
        if alphabets.iter().any(Vec::is_empty) {
            return Err(Error::Invalid("empty alphabet".into()));
        }
        if tuples.is_empty() {
            return Err(Error::Invalid("support set is empty".into()));
        }
        for t in &tuples {
            if t.len() != alphabets.len() {
                return Err(Error::Arity {
                    expected: alphabets.len(),
                    got: t.len(),
                });
            }
            for (i, &a) in t.iter().enumerate() {
                if a >= alphabets[i].len() {
                    return Err(Error::Index {
                        index: a,
                        limit: alphabets[i].len(),
                    });
                }
            }
        }
        Ok(SupportSet { alphabets, tuples })
    }

    /// Alphabets `{0, .., s_i - 1}` labeled by their indices.
    pub fn new<I, T>(sizes: &[usize], tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let alphabets = sizes
            .iter()
            .map(|&s| (0..s).map(|a| a.to_string()).collect())
            .collect();
        Self::with_labels(alphabets, tuples.into_iter().map(|t| t.as_ref().to_vec()).collect())
    }

    /// The full product `Σ_1 x ... x Σ_k`.
    pub fn rectangle(sizes: &[usize]) -> Result<Self> {
        let total: usize = sizes.iter().product();
        if total > 1 << 20 {
            return Err(Error::cap("rectangle", total, 1 << 20));
        }
        Self::new(sizes, (0..total).map(|i| crate::util::decode(i, sizes)))
    }

    pub fn k(&self) -> usize {
        self.alphabets.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.alphabets.iter().map(Vec::len).collect()
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn tuples(&self) -> &BTreeSet<Vec<usize>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    /// Projection onto the listed coordinates, in that order.
    pub fn project(&self, coords: &[usize]) -> Result<SupportSet> {
        if coords.is_empty() {
            return Err(Error::Invalid("projection onto no coordinates".into()));
        }
        for &c in coords {
            if c >= self.k() {
                return Err(Error::Index { index: c, limit: self.k() });
            }
        }
        let tuples = self
            .tuples
            .iter()
            .map(|t| coords.iter().map(|&c| t[c]).collect())
            .collect();
        Self::with_labels(coords.iter().map(|&c| self.alphabets[c].clone()).collect(), tuples)
    }

    /// The marginal support on all coordinates except `i`.
    pub fn without(&self, i: usize) -> Result<SupportSet> {
        let coords: Vec<usize> = (0..self.k()).filter(|&c| c != i).collect();
        self.project(&coords)
    }

    /// Whether every label of every alphabet occurs in some tuple.
    pub fn full_projections(&self) -> bool {
        (0..self.k()).all(|i| {
            let used: BTreeSet<usize> = self.tuples.iter().map(|t| t[i]).collect();
            used.len() == self.alphabets[i].len()
        })
    }
}

/// The bipartite graph `S_{i,j}` on `Σ_i ⊔ Σ_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteProjectionGraph {
    pub i: usize,
    pub j: usize,
    pub left: usize,
    pub right: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl BipartiteProjectionGraph {
    /// Vertex sets `(left, right)` of the component containing left vertex 0.
    pub fn first_component(&self) -> (BTreeSet<usize>, BTreeSet<usize>) {
        let mut adj_l: Vec<Vec<usize>> = vec![Vec::new(); self.left];
        let mut adj_r: Vec<Vec<usize>> = vec![Vec::new(); self.right];
        for &(a, b) in &self.edges {
            adj_l[a].push(b);
            adj_r[b].push(a);
        }
        let mut l = BTreeSet::from([0usize]);
        let mut r = BTreeSet::new();
        // queue entries: (is_left, vertex)
        let mut queue = VecDeque::from([(true, 0usize)]);
        while let Some((is_left, v)) = queue.pop_front() {
            if is_left {
                for &b in &adj_l[v] {
                    if r.insert(b) {
                        queue.push_back((false, b));
                    }
                }
            } else {
                for &a in &adj_r[v] {
                    if l.insert(a) {
                        queue.push_back((true, a));
                    }
                }
            }
        }
        (l, r)
    }

    pub fn is_connected(&self) -> bool {
        let (l, r) = self.first_component();
        l.len() == self.left && r.len() == self.right
    }
}

pub fn pairwise_projection(s: &SupportSet, i: usize, j: usize) -> Result<BipartiteProjectionGraph> {
    let k = s.k();
    if i >= k || j >= k {
        return Err(Error::Index { index: i.max(j), limit: k });
    }
    if i == j {
        return Err(Error::Invalid("projection needs two distinct coordinates".into()));
    }
    Ok(BipartiteProjectionGraph {
        i,
        j,
        left: s.alphabets[i].len(),
        right: s.alphabets[j].len(),
        edges: s.tuples.iter().map(|t| (t[i], t[j])).collect(),
    })
}

/// Certificate that `S_{i,j}` is disconnected: every support tuple projects into
/// `L1 x R1` or into its complement `L2 x R2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub i: usize,
    pub j: usize,
    pub left: BTreeSet<usize>,
    pub right: BTreeSet<usize>,
}

impl Bipartition {
    /// Re-checks the certificate against the support.
    pub fn certifies(&self, s: &SupportSet) -> bool {
        let k = s.k();
        if self.i >= k || self.j >= k || self.i == self.j {
            return false;
        }
        let (li, rj) = (s.alphabets[self.i].len(), s.alphabets[self.j].len());
        if self.left.iter().any(|&a| a >= li) || self.right.iter().any(|&b| b >= rj) {
            return false;
        }
        // both sides of the vertex partition must be nonempty
        let side1 = self.left.len() + self.right.len();
        if side1 == 0 || side1 == li + rj {
            return false;
        }
        s.tuples
            .iter()
            .all(|t| self.left.contains(&t[self.i]) == self.right.contains(&t[self.j]))
    }
}

/// Pairwise connectivity with a bipartition witness for the first disconnected pair.
pub fn is_pairwise_connected(s: &SupportSet) -> (bool, Option<Bipartition>) {
    for i in 0..s.k() {
        for j in i + 1..s.k() {
            let g = pairwise_projection(s, i, j).expect("valid coordinates");
            if !g.is_connected() {
                let (left, right) = g.first_component();
                return (false, Some(Bipartition { i, j, left, right }));
            }
        }
    }
    (true, None)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn components(&mut self) -> usize {
        (0..self.0.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Tuples grouped by their value off coordinate `j`.
fn extensions(s: &SupportSet, j: usize) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for t in &s.tuples {
        let mut rest = t.clone();
        rest.remove(j);
        groups.entry(rest).or_default().push(t[j]);
    }
    groups
}

/// Number of edges of the connection graph `H(S)`.
pub fn connection_graph_edges(s: &SupportSet) -> usize {
    (0..s.k())
        .map(|j| {
            extensions(s, j)
                .values()
                .map(|g| g.len() * (g.len() - 1) / 2)
                .sum::<usize>()
        })
        .sum()
}

/// Connectivity of `H(S)`: tuples adjacent when they differ in exactly one coordinate.
pub fn is_connected(s: &SupportSet) -> bool {
    connection_components(s).len() == 1
}

/// Components of `H(S)` in order of their least tuple.
pub fn connection_components(s: &SupportSet) -> Vec<Vec<Vec<usize>>> {
    let tuples: Vec<&Vec<usize>> = s.tuples.iter().collect();
    let index: BTreeMap<&Vec<usize>, usize> = tuples.iter().enumerate().map(|(n, t)| (*t, n)).collect();
    let mut uf = UnionFind::new(tuples.len());
    for j in 0..s.k() {
        for (rest, vals) in extensions(s, j) {
            let idx: Vec<usize> = vals
                .iter()
                .map(|&v| {
                    let mut t = rest.clone();
                    t.insert(j, v);
                    index[&t]
                })
                .collect();
            for w in idx.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for (n, t) in tuples.iter().enumerate() {
        let r = uf.find(n);
        comps.entry(r).or_default().push((*t).clone());
    }
    comps.into_values().collect()
}

/// Connectivity of every `H_j(S)` on the full alphabet `Σ_j`.
pub fn is_coordinatewise_connected(s: &SupportSet) -> (bool, Vec<bool>) {
    let flags: Vec<bool> = (0..s.k())
        .map(|j| {
            let mut uf = UnionFind::new(s.alphabets[j].len());
            for vals in extensions(s, j).values() {
                for w in vals.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
            uf.components() == 1
        })
        .collect();
    (flags.iter().all(|&f| f), flags)
}

/// Two tuples in different components of `H(S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentWitness {
    pub component: Vec<Vec<usize>>,
    pub outside: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    /// `H(S)` connected and every label used.
    pub connected: bool,
    pub coordinatewise_connected: bool,
    pub pairwise_connected: bool,
    pub full_projections: bool,
    pub connection_graph_connected: bool,
    pub connection_graph_edges: usize,
    pub coordinate_flags: Vec<bool>,
    pub component_witness: Option<ComponentWitness>,
    pub bipartition: Option<Bipartition>,
}

pub fn classify(s: &SupportSet) -> StructureReport {
    let comps = connection_components(s);
    let full_projections = s.full_projections();
    let raw = comps.len() == 1;
    let (coordinatewise_connected, coordinate_flags) = is_coordinatewise_connected(s);
    let (pairwise_connected, bipartition) = is_pairwise_connected(s);
    let component_witness = if raw {
        None
    } else {
        Some(ComponentWitness {
            component: comps[0].clone(),
            outside: comps[1][0].clone(),
        })
    };
    StructureReport {
        connected: raw && full_projections,
        coordinatewise_connected,
        pairwise_connected,
        full_projections,
        connection_graph_connected: raw,
        connection_graph_edges: connection_graph_edges(s),
        coordinate_flags,
        component_witness,
        bipartition,
    }
}
