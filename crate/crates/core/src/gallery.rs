//! Named example games.
//!
//! The GHZ predicate `a1 ^ a2 ^ a3 = x1 | x2 | x3` and the anti-correlation predicate are
//! conventional choices; only the question supports are canonical.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::rational::rat;
use crate::util::decode;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|x| x.to_string()).collect()
}

fn uniform(support: &[Vec<usize>]) -> Vec<(Vec<usize>, BigRational)> {
    let p = rat(1, support.len() as i64);
    support.iter().map(|t| (t.clone(), p.clone())).collect()
}

/// Three players, questions uniform on the even-weight triples.
pub fn ghz() -> Game {
    let support = [vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
    Game::new(vec![labels(2); 3], vec![labels(2); 3], uniform(&support), |q, a| {
        (a[0] ^ a[1] ^ a[2]) == (q[0] | q[1] | q[2])
    })
    .expect("valid")
}

/// Questions uniform on the weight-one triples. The player cyclically after the holder
/// of the 1 must answer 1 and everyone else 0.
pub fn anticorr() -> Game {
    let support = [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]];
    Game::new(vec![labels(2); 3], vec![labels(2); 3], uniform(&support), |q, a| {
        let Some(h) = q.iter().position(|&x| x == 1) else {
            return false;
        };
        (0..3).all(|j| a[j] == usize::from(j == (h + 1) % 3))
    })
    .expect("valid")
}

/// Full rectangle `[s]^k`, uniform questions, win iff `Σa ≡ Σx (mod s)`.
pub fn rect(k: usize, s: usize) -> Result<Game> {
    if k == 0 || s == 0 {
        return Err(Error::Invalid("rect needs k, s >= 1".into()));
    }
    let sizes = vec![s; k];
    let total = crate::util::checked_product(&sizes, 1 << 16, "rect questions")?;
    let support: Vec<Vec<usize>> = (0..total).map(|i| decode(i, &sizes)).collect();
    Game::new(vec![labels(s); k], vec![labels(s); k], uniform(&support), |q, a| {
        (q.iter().sum::<usize>() % s) == (a.iter().sum::<usize>() % s)
    })
}

/// A 3-CNF clause: three variables and, per literal, whether it is negated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub vars: [usize; 3],
    pub negated: [bool; 3],
}

impl Clause {
    pub fn satisfied(&self, a: &[usize]) -> bool {
        (0..3).any(|t| (a[t] == 1) != self.negated[t])
    }
}

/// `m` clauses drawn uniformly from the `8 d^3` clauses on `d` variables.
pub fn random_3cnf_clauses(m: usize, d: usize, seed: u64) -> Vec<Clause> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| Clause {
            vars: [rng.gen_range(0..d), rng.gen_range(0..d), rng.gen_range(0..d)],
            negated: [rng.gen(), rng.gen(), rng.gen()],
        })
        .collect()
}

/// The verifier sends the three variables of a uniform clause; players win iff their
/// answers satisfy it. Clauses sharing a variable triple must all be satisfied.
pub fn random_3cnf(m: usize, d: usize, seed: u64) -> Result<Game> {
    if m == 0 || d == 0 {
        return Err(Error::Invalid("3cnf needs m, d >= 1".into()));
    }
    let clauses = random_3cnf_clauses(m, d, seed);
    let mut by_triple: BTreeMap<Vec<usize>, Vec<&Clause>> = BTreeMap::new();
    for c in &clauses {
        by_triple.entry(c.vars.to_vec()).or_default().push(c);
    }
    let dist = by_triple
        .iter()
        .map(|(t, cs)| (t.clone(), rat(cs.len() as i64, m as i64)))
        .collect();
    Game::new(vec![labels(d); 3], vec![labels(2); 3], dist, |q, a| {
        by_triple
            .get(q)
            .map_or(true, |cs| cs.iter().all(|c| c.satisfied(a)))
    })
}

/// Binary three-player game where players 0 and 1 always receive equal questions.
pub fn binary3_equal() -> Game {
    let support = [vec![0, 0, 0], vec![0, 0, 1], vec![1, 1, 0], vec![1, 1, 1]];
    Game::new(vec![labels(2); 3], vec![labels(2); 3], uniform(&support), |q, a| {
        (a[0] ^ a[1] ^ a[2]) == (q[0] & q[2])
    })
    .expect("valid")
}

pub const NAMES: &[&str] = &["ghz", "anticorr", "rect-k-s", "3cnf-m-d-seed", "binary3-eq"];

fn num(part: &str, name: &str) -> Result<u64> {
    part.parse()
        .map_err(|_| Error::Invalid(format!("bad parameter '{part}' in gallery name '{name}'")))
}

/// Resolves a stable gallery identifier such as `rect-3-2` or `3cnf-96-8-7`.
pub fn by_name(name: &str) -> Result<Game> {
    let parts: Vec<&str> = name.split('-').collect();
    match parts.as_slice() {
        ["ghz"] => Ok(ghz()),
        ["anticorr"] => Ok(anticorr()),
        ["binary3", "eq"] => Ok(binary3_equal()),
        ["rect", k, s] => rect(num(k, name)? as usize, num(s, name)? as usize),
        ["3cnf", m, d, seed] => random_3cnf(num(m, name)? as usize, num(d, name)? as usize, num(seed, name)?),
        _ => Err(Error::Invalid(format!(
            "unknown gallery game '{name}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{validate_game, value, PredicatePolicy};
    use crate::structure::pairwise_projection;

    #[test]
    fn gallery_games_validate() {
        for name in ["ghz", "anticorr", "rect-3-2", "rect-2-3", "3cnf-20-4-1", "binary3-eq"] {
            let g = by_name(name).unwrap();
            assert!(validate_game(&g.to_json(), PredicatePolicy::MissingRowsLose).ok(), "{name}");
        }
        assert!(by_name("nope").is_err());
        assert!(by_name("rect-x-2").is_err());
    }

    #[test]
    fn single_clause_is_always_satisfiable() {
        for seed in 0..5 {
            let g = random_3cnf(1, 2, seed).unwrap();
            assert_eq!(value(&g).unwrap().0.value(), &rat(1, 1));
        }
    }

    #[test]
    fn cnf_projection_edges_come_from_clauses() {
        let cs = random_3cnf_clauses(50, 3, 4);
        let g = random_3cnf(50, 3, 4).unwrap();
        let s = g.support_set();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let e = pairwise_projection(&s, a, b).unwrap().edges;
            let want = cs.iter().map(|c| (c.vars[a], c.vars[b])).collect();
            assert_eq!(e, want);
        }
    }

    #[test]
    fn clause_sampling_is_reproducible() {
        assert_eq!(random_3cnf_clauses(10, 8, 3), random_3cnf_clauses(10, 8, 3));
        assert_ne!(random_3cnf_clauses(10, 8, 3), random_3cnf_clauses(10, 8, 4));
    }
}
