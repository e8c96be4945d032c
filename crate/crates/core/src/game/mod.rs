//! Finite k-player games with exact rational query distributions.
//!
//! Question and answer tuples are addressed by mixed-radix indices with player 0 as the
//! most significant digit. An n-fold repetition keeps a handle on its base game, so the
//! per-coordinate structure stays available to the restriction and lab modules.

mod json;
mod reduce;
mod restrict;
mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, RationalProbability};
use crate::structure::SupportSet;
use crate::util::{checked_pow, checked_product, decode, decode_into, encode};

pub use json::{
    parse_game, validate_game, DistributionRow, GameJson, PredicatePolicy, PredicateRow,
    ValidationReport,
};
pub use reduce::{eliminate_deterministic_player, eliminate_deterministic_player_with, merge_players};
pub use restrict::{restrict_repeated_game, RestrictedGame};
pub use value::{value, value_conditioned, value_conditioned_with, value_with, ValueConfig};

/// Default cap on enumerated strategies and on materialized tables.
pub const DEFAULT_CAP: u128 = 100_000_000;

/// Largest predicate table (question tuples times answer tuples) stored densely.
const TABLE_CAP: u128 = 1 << 26;
/// Largest materialized support of a repeated distribution.
const SUPPORT_CAP: u128 = 1 << 22;

#[derive(Clone, Debug)]
enum Predicate {
    Table(Arc<Vec<bool>>),
    Repeated { base: Arc<Game>, n: usize },
}

/// A finite k-player game `(X, A, Q, V)`.
#[derive(Clone, Debug)]
pub struct Game {
    questions: Vec<Vec<String>>,
    answers: Vec<Vec<String>>,
    q_sizes: Vec<usize>,
    a_sizes: Vec<usize>,
    q_count: usize,
    a_count: usize,
    distribution: BTreeMap<usize, BigRational>,
    predicate: Predicate,
}

impl Game {
    /// Builds a game from label alphabets, a sparse distribution given by per-player
    /// question indices, and a winning predicate on per-player index tuples.
    pub fn new<F>(
        questions: Vec<Vec<String>>,
        answers: Vec<Vec<String>>,
        distribution: Vec<(Vec<usize>, BigRational)>,
        win: F,
    ) -> Result<Game>
    where
        F: Fn(&[usize], &[usize]) -> bool,
    {
        let k = questions.len();
        if k == 0 {
            return Err(Error::Invalid("a game needs at least one player".into()));
        }
        if answers.len() != k {
            return Err(Error::Arity {
                expected: k,
                got: answers.len(),
            });
        }
        for (j, alph) in questions.iter().chain(answers.iter()).enumerate() {
            if alph.is_empty() {
                return Err(Error::Invalid(format!("alphabet {j} is empty")));
            }
        }
        let q_sizes: Vec<usize> = questions.iter().map(Vec::len).collect();
        let a_sizes: Vec<usize> = answers.iter().map(Vec::len).collect();
        let q_count = checked_product(&q_sizes, TABLE_CAP, "question tuples")?;
        let a_count = checked_product(&a_sizes, TABLE_CAP, "answer tuples")?;
        checked_product(&[q_count, a_count], TABLE_CAP, "predicate table")?;

        let mut dist = BTreeMap::new();
        let mut total = BigRational::zero();
        for (q, p) in distribution {
            if q.len() != k {
                return Err(Error::Arity {
                    expected: k,
                    got: q.len(),
                });
            }
            for (j, &x) in q.iter().enumerate() {
                if x >= q_sizes[j] {
                    return Err(Error::Index {
                        index: x,
                        limit: q_sizes[j],
                    });
                }
            }
            if p < BigRational::zero() {
                return Err(Error::Invalid(format!(
                    "negative probability {}",
                    format_rational(&p)
                )));
            }
            let idx = encode(&q, &q_sizes);
            total += &p;
            if dist.contains_key(&idx) {
                return Err(Error::Invalid(format!("duplicate distribution entry {q:?}")));
            }
            if !p.is_zero() {
                dist.insert(idx, p);
            } else {
                dist.entry(idx).or_insert_with(BigRational::zero);
            }
        }
        dist.retain(|_, p| !p.is_zero());
        if !total.is_one() {
            return Err(Error::Invalid(format!(
                "distribution mass {} != 1",
                format_rational(&total)
            )));
        }

        let mut table = vec![false; q_count * a_count];
        let mut qd = vec![0; k];
        let mut ad = vec![0; k];
        for qi in 0..q_count {
            decode_into(qi, &q_sizes, &mut qd);
            for ai in 0..a_count {
                decode_into(ai, &a_sizes, &mut ad);
                table[qi * a_count + ai] = win(&qd, &ad);
            }
        }
        Ok(Game {
            questions,
            answers,
            q_sizes,
            a_sizes,
            q_count,
            a_count,
            distribution: dist,
            predicate: Predicate::Table(Arc::new(table)),
        })
    }

    pub fn players(&self) -> usize {
        self.questions.len()
    }

    pub fn question_sizes(&self) -> &[usize] {
        &self.q_sizes
    }

    pub fn answer_sizes(&self) -> &[usize] {
        &self.a_sizes
    }

    pub fn question_labels(&self, j: usize) -> &[String] {
        &self.questions[j]
    }

    pub fn answer_labels(&self, j: usize) -> &[String] {
        &self.answers[j]
    }

    /// Number of question tuples `|X|`.
    pub fn question_tuple_count(&self) -> usize {
        self.q_count
    }

    /// Number of answer tuples `|A|`.
    pub fn answer_tuple_count(&self) -> usize {
        self.a_count
    }

    pub fn encode_questions(&self, q: &[usize]) -> usize {
        encode(q, &self.q_sizes)
    }

    pub fn decode_questions(&self, qi: usize) -> Vec<usize> {
        decode(qi, &self.q_sizes)
    }

    pub fn encode_answers(&self, a: &[usize]) -> usize {
        encode(a, &self.a_sizes)
    }

    pub fn decode_answers(&self, ai: usize) -> Vec<usize> {
        decode(ai, &self.a_sizes)
    }

    /// `Q[x]` for a question tuple index.
    pub fn probability(&self, qi: usize) -> BigRational {
        self.distribution
            .get(&qi)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Question tuples with positive probability, in index order.
    pub fn support(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.distribution.iter().map(|(&q, p)| (q, p))
    }

    pub fn support_size(&self) -> usize {
        self.distribution.len()
    }

    /// `V(x, a)` on tuple indices.
    pub fn wins(&self, qi: usize, ai: usize) -> bool {
        match &self.predicate {
            Predicate::Table(t) => t[qi * self.a_count + ai],
            Predicate::Repeated { base, n } => {
                let k = self.players();
                let mut qd = vec![0; k];
                let mut ad = vec![0; k];
                decode_into(qi, &self.q_sizes, &mut qd);
                decode_into(ai, &self.a_sizes, &mut ad);
                let bq = base.question_sizes();
                let ba = base.answer_sizes();
                let mut qpow: Vec<usize> = bq.iter().map(|&s| s.pow(*n as u32 - 1)).collect();
                let mut apow: Vec<usize> = ba.iter().map(|&s| s.pow(*n as u32 - 1)).collect();
                for _ in 0..*n {
                    let mut bqi = 0;
                    let mut bai = 0;
                    for j in 0..k {
                        bqi = bqi * bq[j] + (qd[j] / qpow[j]) % bq[j];
                        bai = bai * ba[j] + (ad[j] / apow[j]) % ba[j];
                    }
                    if !base.wins(bqi, bai) {
                        return false;
                    }
                    for j in 0..k {
                        qpow[j] /= bq[j].max(1);
                        apow[j] /= ba[j].max(1);
                    }
                }
                true
            }
        }
    }

    /// Base game and repetition count if this game is an n-fold repetition.
    pub fn repetition(&self) -> Option<(&Game, usize)> {
        match &self.predicate {
            Predicate::Repeated { base, n } => Some((base.as_ref(), *n)),
            Predicate::Table(_) => None,
        }
    }

    /// Number of coordinates a strategy for this game addresses (1 for a base game).
    pub fn arity(&self) -> usize {
        self.repetition().map_or(1, |(_, n)| n)
    }

    /// Per-coordinate base question indices of player `j`'s repeated question `q`.
    pub fn split_question(&self, j: usize, q: usize) -> Vec<usize> {
        match self.repetition() {
            Some((base, n)) => decode(q, &vec![base.question_sizes()[j]; n]),
            None => vec![q],
        }
    }

    pub fn join_question(&self, j: usize, parts: &[usize]) -> usize {
        match self.repetition() {
            Some((base, n)) => encode(parts, &vec![base.question_sizes()[j]; n]),
            None => parts[0],
        }
    }

    pub fn split_answer(&self, j: usize, a: usize) -> Vec<usize> {
        match self.repetition() {
            Some((base, n)) => decode(a, &vec![base.answer_sizes()[j]; n]),
            None => vec![a],
        }
    }

    pub fn join_answer(&self, j: usize, parts: &[usize]) -> usize {
        match self.repetition() {
            Some((base, n)) => encode(parts, &vec![base.answer_sizes()[j]; n]),
            None => parts[0],
        }
    }

    /// Base question tuple index at coordinate `c` for per-player repeated questions.
    pub fn coordinate_question(&self, per_player: &[usize], c: usize) -> usize {
        match self.repetition() {
            Some((base, n)) => {
                let bq = base.question_sizes();
                let mut idx = 0;
                for (j, &q) in per_player.iter().enumerate() {
                    let digit = (q / bq[j].pow((n - 1 - c) as u32)) % bq[j];
                    idx = idx * bq[j] + digit;
                }
                idx
            }
            None => encode(per_player, &self.q_sizes),
        }
    }

    /// Base answer tuple index at coordinate `c` for per-player repeated answers.
    pub fn coordinate_answer(&self, per_player: &[usize], c: usize) -> usize {
        match self.repetition() {
            Some((base, n)) => {
                let ba = base.answer_sizes();
                let mut idx = 0;
                for (j, &a) in per_player.iter().enumerate() {
                    let digit = (a / ba[j].pow((n - 1 - c) as u32)) % ba[j];
                    idx = idx * ba[j] + digit;
                }
                idx
            }
            None => encode(per_player, &self.a_sizes),
        }
    }

    /// Support of `Q` as a structural support set.
    pub fn support_set(&self) -> SupportSet {
        let tuples: BTreeSet<Vec<usize>> =
            self.support().map(|(q, _)| self.decode_questions(q)).collect();
        SupportSet::with_labels(self.questions.clone(), tuples)
            .expect("support of a valid game is a valid support set")
    }

    /// Same alphabets and predicate, new distribution.
    pub(crate) fn with_distribution(&self, dist: BTreeMap<usize, BigRational>) -> Game {
        Game {
            distribution: dist,
            ..self.clone()
        }
    }
}

fn join_labels(parts: &[&str], compact: bool) -> String {
    if compact {
        parts.concat()
    } else {
        parts.join(",")
    }
}

fn repeated_labels(alph: &[String], n: usize) -> Vec<String> {
    let compact = alph.iter().all(|l| l.chars().count() == 1);
    let s = alph.len();
    let count = s.pow(n as u32);
    (0..count)
        .map(|idx| {
            let d = decode(idx, &vec![s; n]);
            let parts: Vec<&str> = d.iter().map(|&x| alph[x].as_str()).collect();
            join_labels(&parts, compact)
        })
        .collect()
}

/// The n-fold repetition `G^{⊗n}`: product alphabets, `Q^{⊗n}`, conjunction predicate.
///
/// Repeated labels concatenate base labels, separated by commas unless every base label
/// is a single character.
pub fn repeat_game(g: &Game, n: usize) -> Result<Game> {
    if n == 0 {
        return Err(Error::Invalid("repetition count must be positive".into()));
    }
    let k = g.players();
    let mut q_sizes = Vec::with_capacity(k);
    let mut a_sizes = Vec::with_capacity(k);
    for j in 0..k {
        q_sizes.push(checked_pow(g.q_sizes[j], n, DEFAULT_CAP, &format!("player {j} questions"))?);
        a_sizes.push(checked_pow(g.a_sizes[j], n, DEFAULT_CAP, &format!("player {j} answers"))?);
    }
    let q_count = checked_product(&q_sizes, u64::MAX as u128, "question tuples")?;
    let a_count = checked_product(&a_sizes, u64::MAX as u128, "answer tuples")?;
    checked_pow(g.support_size(), n, SUPPORT_CAP, "repeated support")?;

    let base_support: Vec<(Vec<usize>, &BigRational)> =
        g.support().map(|(q, p)| (g.decode_questions(q), p)).collect();
    let mut dist = BTreeMap::new();
    let mut pick = vec![0usize; n];
    'outer: loop {
        let mut per_player = vec![0usize; k];
        let mut p = BigRational::one();
        for &b in &pick {
            let (digits, prob) = &base_support[b];
            for j in 0..k {
                per_player[j] = per_player[j] * g.q_sizes[j] + digits[j];
            }
            p *= *prob;
        }
        dist.insert(encode(&per_player, &q_sizes), p);
        let mut t = n;
        loop {
            if t == 0 {
                break 'outer;
            }
            t -= 1;
            pick[t] += 1;
            if pick[t] < base_support.len() {
                continue 'outer;
            }
            pick[t] = 0;
        }
    }

    Ok(Game {
        questions: g.questions.iter().map(|a| repeated_labels(a, n)).collect(),
        answers: g.answers.iter().map(|a| repeated_labels(a, n)).collect(),
        q_sizes,
        a_sizes,
        q_count,
        a_count,
        distribution: dist,
        predicate: Predicate::Repeated {
            base: Arc::new(g.clone()),
            n,
        },
    })
}

/// Deterministic product strategy: one answer table per player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStrategy {
    tables: Vec<Vec<usize>>,
    arity: usize,
}

impl ProductStrategy {
    pub fn new(g: &Game, tables: Vec<Vec<usize>>) -> Result<Self> {
        if tables.len() != g.players() {
            return Err(Error::Arity {
                expected: g.players(),
                got: tables.len(),
            });
        }
        for (j, t) in tables.iter().enumerate() {
            if t.len() != g.q_sizes[j] {
                return Err(Error::Invalid(format!(
                    "strategy table {j} has {} entries, expected {}",
                    t.len(),
                    g.q_sizes[j]
                )));
            }
            if let Some(&bad) = t.iter().find(|&&a| a >= g.a_sizes[j]) {
                return Err(Error::Index {
                    index: bad,
                    limit: g.a_sizes[j],
                });
            }
        }
        Ok(ProductStrategy {
            tables,
            arity: g.arity(),
        })
    }

    /// Builds the tables from a per-player answer rule.
    pub fn from_fn(g: &Game, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let tables = (0..g.players())
            .map(|j| (0..g.q_sizes[j]).map(|q| f(j, q)).collect())
            .collect();
        Self::new(g, tables)
    }

    /// Every player always answers the first label.
    pub fn constant(g: &Game) -> Self {
        Self::from_fn(g, |_, _| 0).expect("zero answers are always valid")
    }

    /// Plays a single-copy strategy independently on every coordinate of `g_rep`.
    pub fn per_coordinate(g_rep: &Game, single: &ProductStrategy) -> Result<Self> {
        let (base, _) = g_rep
            .repetition()
            .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
        single.check(base)?;
        Self::from_fn(g_rep, |j, q| {
            let parts: Vec<usize> = g_rep
                .split_question(j, q)
                .into_iter()
                .map(|x| single.tables[j][x])
                .collect();
            g_rep.join_answer(j, &parts)
        })
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn answer(&self, j: usize, q: usize) -> usize {
        self.tables[j][q]
    }

    /// Answer tuple index for per-player question indices.
    pub fn answer_tuple(&self, g: &Game, q: &[usize]) -> usize {
        let a: Vec<usize> = q.iter().enumerate().map(|(j, &x)| self.tables[j][x]).collect();
        g.encode_answers(&a)
    }

    pub(crate) fn check(&self, g: &Game) -> Result<()> {
        if self.arity != g.arity() {
            return Err(Error::Arity {
                expected: g.arity(),
                got: self.arity,
            });
        }
        if self.tables.len() != g.players()
            || self.tables.iter().zip(&g.q_sizes).any(|(t, &s)| t.len() != s)
        {
            return Err(Error::Invalid("strategy tables do not match the game".into()));
        }
        Ok(())
    }

    /// Label form: per player, question label to answer label.
    pub fn to_labels(&self, g: &Game) -> Vec<BTreeMap<String, String>> {
        self.tables
            .iter()
            .enumerate()
            .map(|(j, t)| {
                t.iter()
                    .enumerate()
                    .map(|(q, &a)| (g.questions[j][q].clone(), g.answers[j][a].clone()))
                    .collect()
            })
            .collect()
    }
}

/// Product event `E = E^1 x ... x E^k` stored as per-player membership tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductEvent {
    sets: Vec<Vec<bool>>,
    arity: usize,
}

impl ProductEvent {
    pub fn full(g: &Game) -> Self {
        ProductEvent {
            sets: g.q_sizes.iter().map(|&s| vec![true; s]).collect(),
            arity: g.arity(),
        }
    }

    pub fn new(g: &Game, sets: Vec<Vec<bool>>) -> Result<Self> {
        if sets.len() != g.players() {
            return Err(Error::Arity {
                expected: g.players(),
                got: sets.len(),
            });
        }
        for (j, s) in sets.iter().enumerate() {
            if s.len() != g.q_sizes[j] {
                return Err(Error::Invalid(format!(
                    "event set {j} has {} entries, expected {}",
                    s.len(),
                    g.q_sizes[j]
                )));
            }
        }
        Ok(ProductEvent {
            sets,
            arity: g.arity(),
        })
    }

    pub fn from_fn(g: &Game, f: impl Fn(usize, usize) -> bool) -> Self {
        ProductEvent {
            sets: (0..g.players())
                .map(|j| (0..g.q_sizes[j]).map(|q| f(j, q)).collect())
                .collect(),
            arity: g.arity(),
        }
    }

    /// Builds an event from per-player lists of question labels.
    pub fn from_labels(g: &Game, labels: &[Vec<String>]) -> Result<Self> {
        if labels.len() != g.players() {
            return Err(Error::Arity {
                expected: g.players(),
                got: labels.len(),
            });
        }
        let mut sets: Vec<Vec<bool>> = g.q_sizes.iter().map(|&s| vec![false; s]).collect();
        for (j, list) in labels.iter().enumerate() {
            for l in list {
                let pos = g.questions[j]
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| Error::Invalid(format!("player {j} has no question '{l}'")))?;
                sets[j][pos] = true;
            }
        }
        Self::new(g, sets)
    }

    pub fn sets(&self) -> &[Vec<bool>] {
        &self.sets
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains_player(&self, j: usize, q: usize) -> bool {
        self.sets[j][q]
    }

    pub fn contains(&self, q: &[usize]) -> bool {
        q.iter().enumerate().all(|(j, &x)| self.sets[j][x])
    }

    pub fn is_full(&self) -> bool {
        self.sets.iter().all(|s| s.iter().all(|&b| b))
    }

    pub(crate) fn check(&self, g: &Game) -> Result<()> {
        if self.arity != g.arity() {
            return Err(Error::Arity {
                expected: g.arity(),
                got: self.arity,
            });
        }
        if self.sets.len() != g.players()
            || self.sets.iter().zip(&g.q_sizes).any(|(t, &s)| t.len() != s)
        {
            return Err(Error::Invalid("event sets do not match the game".into()));
        }
        Ok(())
    }

    /// `Pr_Q[E]`, exact.
    pub fn probability(&self, g: &Game) -> BigRational {
        g.support()
            .filter(|(q, _)| self.contains(&g.decode_questions(*q)))
            .map(|(_, p)| p.clone())
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Exact `Pr[V(X, f(X)) = 1]`.
pub fn win_probability(g: &Game, s: &ProductStrategy) -> Result<RationalProbability> {
    s.check(g)?;
    let mut total = BigRational::zero();
    for (qi, p) in g.support() {
        let q = g.decode_questions(qi);
        if g.wins(qi, s.answer_tuple(g, &q)) {
            total += p;
        }
    }
    RationalProbability::new(total)
}

/// Exact `Pr[V(X_i, A_i) = 1 | E]` in a repeated game.
pub fn coordinate_win_probability(
    g_rep: &Game,
    s: &ProductStrategy,
    i: usize,
    e: &ProductEvent,
) -> Result<RationalProbability> {
    let (base, n) = g_rep
        .repetition()
        .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
    if i >= n {
        return Err(Error::Index { index: i, limit: n });
    }
    s.check(g_rep)?;
    e.check(g_rep)?;
    let mut mass = BigRational::zero();
    let mut won = BigRational::zero();
    for (qi, p) in g_rep.support() {
        let q = g_rep.decode_questions(qi);
        if !e.contains(&q) {
            continue;
        }
        mass += p;
        let a: Vec<usize> = q.iter().enumerate().map(|(j, &x)| s.answer(j, x)).collect();
        let bq = g_rep.coordinate_question(&q, i);
        let ba = g_rep.coordinate_answer(&a, i);
        if base.wins(bq, ba) {
            won += p;
        }
    }
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    RationalProbability::new(won / mass)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::gallery;
    use crate::rational::rat;

    pub(crate) fn labels(n: usize) -> Vec<String> {
        (0..n).map(|x| x.to_string()).collect()
    }

    fn coin_game(win: impl Fn(&[usize], &[usize]) -> bool) -> Game {
        Game::new(
            vec![labels(2)],
            vec![labels(2)],
            vec![(vec![0], rat(1, 2)), (vec![1], rat(1, 2))],
            win,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_mass_and_duplicates() {
        let bad = Game::new(vec![labels(2)], vec![labels(2)], vec![(vec![0], rat(3, 4))], |_, _| true);
        assert!(matches!(bad, Err(Error::Invalid(m)) if m.contains("3/4")));
        let dup = Game::new(
            vec![labels(2)],
            vec![labels(2)],
            vec![(vec![0], rat(1, 2)), (vec![0], rat(1, 2))],
            |_, _| true,
        );
        assert!(dup.is_err());
    }

    #[test]
    fn repeat_once_is_isomorphic() {
        let g = gallery::ghz();
        let r = repeat_game(&g, 1).unwrap();
        assert_eq!(r.question_tuple_count(), g.question_tuple_count());
        for qi in 0..g.question_tuple_count() {
            assert_eq!(r.probability(qi), g.probability(qi));
            for ai in 0..g.answer_tuple_count() {
                assert_eq!(r.wins(qi, ai), g.wins(qi, ai));
            }
        }
    }

    #[test]
    fn repeated_distribution_is_the_product() {
        let g = coin_game(|q, a| q[0] == a[0]);
        let r = repeat_game(&g, 2).unwrap();
        for qi in 0..4 {
            assert_eq!(r.probability(qi), rat(1, 4));
        }
        assert_eq!(r.question_labels(0), &["00", "01", "10", "11"]);
    }

    #[test]
    fn repeated_predicate_is_the_conjunction() {
        let g = coin_game(|q, a| q[0] != a[0] || q[0] == 0);
        let r = repeat_game(&g, 2).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                for a1 in 0..2 {
                    for a2 in 0..2 {
                        let qi = r.encode_questions(&[x1 * 2 + x2]);
                        let ai = r.encode_answers(&[a1 * 2 + a2]);
                        let want = g.wins(x1, a1) && g.wins(x2, a2);
                        assert_eq!(r.wins(qi, ai), want);
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_predicates_give_trivial_win_probability() {
        let g = coin_game(|_, _| true);
        let s = ProductStrategy::constant(&g);
        assert_eq!(win_probability(&g, &s).unwrap(), RationalProbability::one());
        let g = coin_game(|_, _| false);
        assert_eq!(win_probability(&g, &s).unwrap(), RationalProbability::zero());
    }

    #[test]
    fn ghz_all_zero_answers_by_hand() {
        // zero answers win exactly when x1 | x2 | x3 = 0, i.e. on question 000 only
        let g = gallery::ghz();
        let s = ProductStrategy::constant(&g);
        assert_eq!(win_probability(&g, &s).unwrap().value(), &rat(1, 4));
    }

    #[test]
    fn coordinate_win_of_independent_strategy() {
        let g = gallery::ghz();
        let single = ProductStrategy::from_fn(&g, |_, q| q).unwrap();
        let single_p = win_probability(&g, &single).unwrap();
        let r = repeat_game(&g, 2).unwrap();
        let s = ProductStrategy::per_coordinate(&r, &single).unwrap();
        let e = ProductEvent::full(&r);
        for i in 0..2 {
            assert_eq!(coordinate_win_probability(&r, &s, i, &e).unwrap(), single_p);
        }
    }

    #[test]
    fn coordinate_win_matches_direct_enumeration() {
        let g = gallery::ghz();
        let r = repeat_game(&g, 2).unwrap();
        // player j answers the parity of its two question bits on both coordinates
        let s = ProductStrategy::from_fn(&r, |j, q| {
            let parts = r.split_question(j, q);
            let b = (parts[0] + parts[1]) % 2;
            r.join_answer(j, &[b, b])
        })
        .unwrap();
        let e = ProductEvent::full(&r);
        // oracle: loop over pairs of base support points directly
        let sup: Vec<(Vec<usize>, BigRational)> =
            g.support().map(|(q, p)| (g.decode_questions(q), p.clone())).collect();
        for i in 0..2 {
            let mut want = BigRational::zero();
            for (x, px) in &sup {
                for (y, py) in &sup {
                    let xs = [x, y];
                    let bits: Vec<usize> = (0..3).map(|j| (x[j] + y[j]) % 2).collect();
                    let or = xs[i].iter().any(|&b| b == 1) as usize;
                    if bits.iter().sum::<usize>() % 2 == or {
                        want += px * py;
                    }
                }
            }
            assert_eq!(coordinate_win_probability(&r, &s, i, &e).unwrap().value(), &want);
        }
    }

    #[test]
    fn coordinate_win_errors() {
        let g = gallery::ghz();
        let r = repeat_game(&g, 2).unwrap();
        let s = ProductStrategy::constant(&r);
        let e = ProductEvent::full(&r);
        assert!(matches!(
            coordinate_win_probability(&r, &s, 2, &e),
            Err(Error::Index { .. })
        ));
        let empty = ProductEvent::from_fn(&r, |_, _| false);
        assert_eq!(coordinate_win_probability(&r, &s, 0, &empty), Err(Error::ZeroMass));
        assert!(coordinate_win_probability(&g, &ProductStrategy::constant(&g), 0, &ProductEvent::full(&g)).is_err());
    }

    #[test]
    fn event_from_labels() {
        let g = gallery::ghz();
        let r = repeat_game(&g, 2).unwrap();
        let e = ProductEvent::from_labels(
            &r,
            &[vec!["00".into(), "01".into()], vec!["00".into()], vec!["11".into()]],
        )
        .unwrap();
        assert!(e.contains(&[0, 0, 3]));
        assert!(!e.contains(&[2, 0, 3]));
        assert!(ProductEvent::from_labels(&r, &[vec!["2".into()], vec![], vec![]]).is_err());
    }
}
