//! Per-player event and answer indicators around one coordinate.

use serde::Serialize;

use super::context::PLAYER_CAP;
use crate::error::{Error, Result};
use crate::game::{Game, ProductEvent, ProductStrategy};
use crate::util::{checked_pow, decode};

/// For coordinate `i` and every player `j`:
/// `F^j_{x̃}(x_{-i}) = 1[(x_{-i}, x̃) ∈ E^j]` and `f^j_{x̃,ã} = F^j_{x̃} · 1[h_i^j(x_{-i}, x̃) = ã]`.
///
/// Tables are indexed over `(X^j)^{n-1}`, coordinates `[n] \ {i}` in increasing order, the
/// first one most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndicatorFamily {
    pub i: usize,
    pub n: usize,
    pub question_sizes: Vec<usize>,
    pub answer_sizes: Vec<usize>,
    /// `event[j][x̃]`
    pub event: Vec<Vec<Vec<bool>>>,
    /// `answer[j][x̃][ã]`
    pub answer: Vec<Vec<Vec<Vec<bool>>>>,
}

impl IndicatorFamily {
    /// Coordinates of `x_{-i}` in table order.
    pub fn others(&self) -> Vec<usize> {
        (0..self.n).filter(|&c| c != self.i).collect()
    }

    /// Number of tables, `Σ_j |X^j| (1 + |A^j|)`.
    pub fn len(&self) -> usize {
        self.question_sizes
            .iter()
            .zip(&self.answer_sizes)
            .map(|(q, a)| q * (1 + a))
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every table, player by player: `F^j_{x̃}` followed by `f^j_{x̃,ã}` for each `ã`.
    pub fn tables(&self) -> impl Iterator<Item = (usize, &Vec<bool>)> {
        (0..self.event.len()).flat_map(move |j| {
            self.event[j]
                .iter()
                .zip(&self.answer[j])
                .flat_map(move |(big, small)| std::iter::once(big).chain(small.iter()).map(move |t| (j, t)))
        })
    }
}

pub fn indicator_family(g_rep: &Game, s: &ProductStrategy, e: &ProductEvent, i: usize) -> Result<IndicatorFamily> {
    let (base, n) = g_rep
        .repetition()
        .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
    if i >= n {
        return Err(Error::Index { index: i, limit: n });
    }
    if s.arity() != n || e.arity() != n {
        return Err(Error::Arity {
            expected: n,
            got: s.arity().min(e.arity()),
        });
    }
    let k = base.players();
    let qs = base.question_sizes().to_vec();
    let as_ = base.answer_sizes().to_vec();
    let mut event = Vec::with_capacity(k);
    let mut answer = Vec::with_capacity(k);
    for j in 0..k {
        let len = checked_pow(qs[j], n - 1, PLAYER_CAP, "indicator table")?;
        let radices = vec![qs[j]; n - 1];
        let mut ev = vec![vec![false; len]; qs[j]];
        let mut an = vec![vec![vec![false; len]; as_[j]]; qs[j]];
        for y in 0..len {
            let rest = decode(y, &radices);
            for xt in 0..qs[j] {
                let mut parts = rest.clone();
                parts.insert(i, xt);
                let q = g_rep.join_question(j, &parts);
                if !e.contains_player(j, q) {
                    continue;
                }
                ev[xt][y] = true;
                let a = g_rep.split_answer(j, s.answer(j, q))[i];
                an[xt][a][y] = true;
            }
        }
        event.push(ev);
        answer.push(an);
    }
    Ok(IndicatorFamily {
        i,
        n,
        question_sizes: qs,
        answer_sizes: as_,
        event,
        answer,
    })
}
