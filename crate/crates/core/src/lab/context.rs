//! Flattened view of a repeated game, a strategy and an event.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::analysis::ProbabilitySpace;
use crate::error::{Error, Result};
use crate::game::{Game, ProductEvent, ProductStrategy};
use crate::util::checked_pow;

/// Largest per-player repeated alphabet enumerated by the lab.
pub(crate) const PLAYER_CAP: u128 = 1 << 20;

/// One point of the support of `Q^{⊗n}`.
#[derive(Clone, Debug)]
pub(crate) struct Point {
    /// Base question tuple per coordinate.
    pub x: Vec<usize>,
    pub p: BigRational,
    pub in_e: bool,
}

/// One repeated question of a single player.
#[derive(Clone, Debug)]
pub(crate) struct PlayerPoint {
    pub parts: Vec<usize>,
    /// Mass under `(Q^j)^{⊗n}`.
    pub p: BigRational,
    pub in_e: bool,
    pub answers: Vec<usize>,
}

pub(crate) struct Repeated<'a> {
    pub base: &'a Game,
    pub n: usize,
    pub k: usize,
    pub points: Vec<Point>,
    pub players: Vec<Vec<PlayerPoint>>,
    pub pr_e: BigRational,
}

impl<'a> Repeated<'a> {
    pub fn new(g_rep: &'a Game, s: &ProductStrategy, e: &ProductEvent) -> Result<Self> {
        let (base, n) = g_rep
            .repetition()
            .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
        if s.arity() != n || e.arity() != n {
            return Err(Error::Arity {
                expected: n,
                got: if s.arity() != n { s.arity() } else { e.arity() },
            });
        }
        if s.tables().len() != g_rep.players() || e.sets().len() != g_rep.players() {
            return Err(Error::Arity {
                expected: g_rep.players(),
                got: s.tables().len().min(e.sets().len()),
            });
        }
        let k = base.players();
        let marginals = player_marginals(base);

        let mut points = Vec::with_capacity(g_rep.support_size());
        let mut pr_e = BigRational::zero();
        for (qi, p) in g_rep.support() {
            let q = g_rep.decode_questions(qi);
            let x: Vec<usize> = (0..n).map(|c| g_rep.coordinate_question(&q, c)).collect();
            let in_e = e.contains(&q);
            if in_e {
                pr_e += p;
            }
            points.push(Point {
                x,
                p: p.clone(),
                in_e,
            });
        }

        let mut players = Vec::with_capacity(k);
        for j in 0..k {
            let size = checked_pow(base.question_sizes()[j], n, PLAYER_CAP, "player questions")?;
            let mut list = Vec::with_capacity(size);
            for q in 0..size {
                let parts = g_rep.split_question(j, q);
                let p = parts.iter().fold(BigRational::one(), |acc, &x| acc * &marginals[j][x]);
                list.push(PlayerPoint {
                    answers: g_rep.split_answer(j, s.answer(j, q)),
                    in_e: e.contains_player(j, q),
                    parts,
                    p,
                });
            }
            players.push(list);
        }
        Ok(Repeated {
            base,
            n,
            k,
            points,
            players,
            pr_e,
        })
    }

    /// `Q` over every base question tuple.
    pub fn q(&self) -> Vec<BigRational> {
        base_distribution(self.base)
    }
}

pub(crate) fn base_distribution(base: &Game) -> Vec<BigRational> {
    (0..base.question_tuple_count()).map(|x| base.probability(x)).collect()
}

pub(crate) fn player_marginals(base: &Game) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> = base
        .question_sizes()
        .iter()
        .map(|&s| vec![BigRational::zero(); s])
        .collect();
    for (qi, p) in base.support() {
        for (j, &x) in base.decode_questions(qi).iter().enumerate() {
            out[j][x] += p;
        }
    }
    out
}

/// `(X, Q)` as a probability space over all base question tuples.
pub fn question_space(base: &Game) -> Result<ProbabilitySpace> {
    ProbabilitySpace::new(base_distribution(base))
}

/// `(X^j, Q^j)` for player `j`.
pub fn player_space(base: &Game, j: usize) -> Result<ProbabilitySpace> {
    let m = player_marginals(base);
    let row = m.get(j).ok_or(Error::Index {
        index: j,
        limit: base.players(),
    })?;
    ProbabilitySpace::new(row.clone())
}
