//! The greedy chain of hard coordinates and the closed-form repetition bound it yields.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, ProductStrategy};
use crate::rational::serde_rational;

/// Support point of `Q^{⊗n}` with its per-coordinate base questions, answers and wins.
struct ChainPoint {
    x: Vec<usize>,
    a: Vec<usize>,
    p: BigRational,
    wins: Vec<bool>,
}

fn chain_points(g_rep: &Game, s: &ProductStrategy) -> Result<(usize, Vec<ChainPoint>)> {
    let (base, n) = g_rep
        .repetition()
        .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
    if s.arity() != n || s.tables().len() != g_rep.players() {
        return Err(Error::Arity { expected: n, got: s.arity() });
    }
    let points = g_rep
        .support()
        .map(|(qi, p)| {
            let q = g_rep.decode_questions(qi);
            let ans: Vec<usize> = q.iter().enumerate().map(|(j, &x)| s.answer(j, x)).collect();
            let x: Vec<usize> = (0..n).map(|c| g_rep.coordinate_question(&q, c)).collect();
            let a: Vec<usize> = (0..n).map(|c| g_rep.coordinate_answer(&ans, c)).collect();
            let wins = (0..n).map(|c| base.wins(x[c], a[c])).collect();
            ChainPoint { x, a, p: p.clone(), wins }
        })
        .collect();
    Ok((n, points))
}

/// A node of the conditioning tree: all previous chain coordinates won, with `Z_{<k}` fixed.
struct Node {
    depth: usize,
    /// `(J, x_J, a_J)` along the path.
    prefix: Vec<(usize, usize, usize)>,
    members: Vec<usize>,
    mass: BigRational,
    /// The greedy choice at this node, if any coordinate is left.
    next: Option<usize>,
}

fn conditional_wins(points: &[ChainPoint], members: &[usize], n: usize) -> (BigRational, Vec<BigRational>) {
    let mut mass = BigRational::zero();
    let mut won = vec![BigRational::zero(); n];
    for &t in members {
        let pt = &points[t];
        mass += &pt.p;
        for c in 0..n {
            if pt.wins[c] {
                won[c] += &pt.p;
            }
        }
    }
    let win = won.into_iter().map(|w| w / &mass).collect();
    (mass, win)
}

/// Walks every winning prefix, choosing the lowest conditional win probability among
/// the unchosen coordinates, ties to the lowest index.
fn walk(points: &[ChainPoint], n: usize) -> Vec<Node> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), (0..points.len()).collect::<Vec<usize>>())];
    while let Some((prefix, members)) = stack.pop() {
        let (mass, win) = conditional_wins(points, &members, n);
        let chosen: Vec<usize> = prefix.iter().map(|&(c, _, _)| c).collect();
        let next = (0..n)
            .filter(|c| !chosen.contains(c))
            .min_by(|&a, &b| win[a].cmp(&win[b]).then(a.cmp(&b)));
        if let Some(c) = next {
            let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
            for &t in &members {
                let pt = &points[t];
                if pt.wins[c] {
                    groups.entry((pt.x[c], pt.a[c])).or_default().push(t);
                }
            }
            for ((x, a), g) in groups.into_iter().rev() {
                let mut p = prefix.clone();
                p.push((c, x, a));
                stack.push((p, g));
            }
        }
        out.push(Node {
            depth: prefix.len(),
            prefix,
            members,
            mass,
            next,
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    /// `J_k` on the heaviest winning path.
    pub coordinate: usize,
    /// `Z_k = (x, a)` as base question and answer tuple indices on that path.
    pub question: usize,
    pub answer: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardCoordinateChain {
    pub n: usize,
    /// Representative realization of `J_1..J_n`, `Z_1..Z_n`.
    pub steps: Vec<ChainStep>,
    /// `Pr[W_{≤k}]` for `k = 1..n`, aggregated over every prefix value.
    #[serde(serialize_with = "ser_rationals")]
    pub win_probabilities: Vec<BigRational>,
    /// Conditioning nodes visited.
    pub nodes: usize,
}

impl HardCoordinateChain {
    pub fn is_monotone(&self) -> bool {
        self.win_probabilities.windows(2).all(|w| w[1] <= w[0])
    }

    /// `Pr[W_{≤k}] ≤ (1 − ε/2)^k` for `k = 1..=min(m, n)`.
    pub fn decays(&self, epsilon: &BigRational, m: usize) -> bool {
        let ratio = BigRational::one() - epsilon / BigRational::from_integer(2.into());
        self.win_probabilities
            .iter()
            .take(m)
            .enumerate()
            .all(|(k, w)| w <= &num_traits::pow(ratio.clone(), k + 1))
    }
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&crate::rational::format_rational(r))?;
    }
    seq.end()
}

pub fn greedy_hard_chain(g_rep: &Game, s: &ProductStrategy) -> Result<HardCoordinateChain> {
    let (n, points) = chain_points(g_rep, s)?;
    let nodes = walk(&points, n);
    let mut win_probabilities = vec![BigRational::zero(); n];
    for node in nodes.iter().filter(|nd| nd.depth > 0) {
        win_probabilities[node.depth - 1] += &node.mass;
    }
    // heaviest winning child at each level
    let mut steps = Vec::new();
    let mut prefix: Vec<(usize, usize, usize)> = Vec::new();
    loop {
        let child = nodes
            .iter()
            .filter(|nd| nd.depth == prefix.len() + 1 && nd.prefix[..prefix.len()] == prefix[..])
            .max_by(|a, b| a.mass.cmp(&b.mass).then(b.prefix.cmp(&a.prefix)));
        let Some(child) = child else { break };
        let &(c, x, a) = child.prefix.last().expect("nonempty prefix");
        steps.push(ChainStep {
            coordinate: c,
            question: x,
            answer: a,
        });
        prefix = child.prefix.clone();
    }
    if steps.is_empty() {
        // nothing is ever won; J_1 is still defined
        let root = nodes.iter().find(|nd| nd.depth == 0).expect("root");
        if let Some(c) = root.next {
            steps.push(ChainStep {
                coordinate: c,
                question: 0,
                answer: 0,
            });
        }
    }
    Ok(HardCoordinateChain {
        n,
        steps,
        win_probabilities,
        nodes: nodes.len(),
    })
}

/// `(1 − ε/2)^{log2(1/α) / (2 log2(4|X||A|))}`.
pub fn parrep_bound_from_criterion(alpha: f64, epsilon: f64, question_tuples: usize, answer_tuples: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Invalid(format!("α = {alpha} is outside (0, 1]")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Invalid(format!("ε = {epsilon} is outside (0, 1]")));
    }
    if question_tuples == 0 || answer_tuples == 0 {
        return Err(Error::Invalid("empty question or answer set".into()));
    }
    let s = (question_tuples as f64) * (answer_tuples as f64);
    let exponent = (1.0 / alpha).log2() / (2.0 * (4.0 * s).log2());
    Ok((1.0 - epsilon / 2.0).powf(exponent))
}

/// `m = ⌊log2(1/α) / log2(4|X||A|)⌋`, the chain length the bound is read from.
pub fn criterion_chain_length(alpha: f64, question_tuples: usize, answer_tuples: usize) -> usize {
    let s = (question_tuples as f64) * (answer_tuples as f64);
    ((1.0 / alpha).log2() / (4.0 * s).log2()).floor().max(0.0) as usize
}

/// Product events scanned for the inductive hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventFamily {
    /// The whole space.
    Full,
    /// `{X_c = x, A_c = a}` for every coordinate and pair.
    SingleFixings,
    /// `{Z_{≤k} = z}` along the winning prefixes of the greedy chain, `k < n`.
    ChainPrefixes,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScannedEvent {
    /// `(coordinate, question tuple, answer tuple)` fixings defining the event.
    pub fixings: Vec<(usize, usize, usize)>,
    #[serde(with = "serde_rational")]
    pub mass: BigRational,
    /// Coordinate attaining the minimum below.
    pub coordinate: usize,
    /// `min_i Pr[Win_i | E]`
    #[serde(with = "serde_rational")]
    pub min_win: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisScan {
    pub family: EventFamily,
    #[serde(with = "serde_rational")]
    pub alpha: BigRational,
    pub events: Vec<ScannedEvent>,
    /// `max_E min_i Pr[Win_i | E]` over the scanned events of mass at least `α`.
    #[serde(with = "serde_rational")]
    pub worst: BigRational,
    /// Largest `ε` the scan certifies: `1 − worst`.
    #[serde(with = "serde_rational")]
    pub epsilon: BigRational,
}

fn scanned(points: &[ChainPoint], members: &[usize], n: usize, fixings: Vec<(usize, usize, usize)>) -> Option<ScannedEvent> {
    if members.is_empty() {
        return None;
    }
    let (mass, win) = conditional_wins(points, members, n);
    let (coordinate, min_win) = win
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(c, w)| (c, w.clone()))?;
    Some(ScannedEvent {
        fixings,
        mass,
        coordinate,
        min_win,
    })
}

/// Scans `family` for events of mass at least `α` and reports the hardest coordinate of each.
/// The hypothesis `∃i: Pr[Win_i | E] ≤ 1 − ε` holds on the family for every `ε ≤ epsilon`.
pub fn criterion_hypothesis_scan(
    g_rep: &Game,
    s: &ProductStrategy,
    alpha: &BigRational,
    family: EventFamily,
) -> Result<HypothesisScan> {
    if alpha <= &BigRational::zero() || alpha > &BigRational::one() {
        return Err(Error::Invalid(format!(
            "α = {} is outside (0, 1]",
            crate::rational::format_rational(alpha)
        )));
    }
    let (n, points) = chain_points(g_rep, s)?;
    let all: Vec<usize> = (0..points.len()).collect();
    let mut events = Vec::new();
    match family {
        EventFamily::Full => events.extend(scanned(&points, &all, n, Vec::new())),
        EventFamily::SingleFixings => {
            for c in 0..n {
                let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
                for (t, pt) in points.iter().enumerate() {
                    groups.entry((pt.x[c], pt.a[c])).or_default().push(t);
                }
                for ((x, a), g) in groups {
                    events.extend(scanned(&points, &g, n, vec![(c, x, a)]));
                }
            }
        }
        EventFamily::ChainPrefixes => {
            for node in walk(&points, n).into_iter().filter(|nd| nd.depth < n) {
                events.extend(scanned(&points, &node.members, n, node.prefix));
            }
        }
    }
    events.retain(|e| &e.mass >= alpha);
    if events.is_empty() {
        return Err(Error::Invalid("no event in the family reaches mass α".into()));
    }
    let worst = events.iter().map(|e| e.min_win.clone()).max().expect("nonempty");
    Ok(HypothesisScan {
        family,
        alpha: alpha.clone(),
        epsilon: BigRational::one() - &worst,
        worst,
        events,
    })
}
