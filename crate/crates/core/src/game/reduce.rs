//! Player reductions: merging players whose questions determine each other, and removing
//! a player whose question is fixed.

use num_rational::BigRational;

use super::value::{value_with, ValueConfig};
use super::Game;
use crate::error::{Error, Result};

/// Merges player `j` into player `i` when `x_j = correspondence[x_i]` on the support.
///
/// The merged player keeps position `i`, sees `i`'s question and answers pairs `a_i|a_j`.
pub fn merge_players(g: &Game, i: usize, j: usize, correspondence: &[usize]) -> Result<Game> {
    let k = g.players();
    if i >= k || j >= k {
        return Err(Error::Index {
            index: i.max(j),
            limit: k,
        });
    }
    if i == j {
        return Err(Error::Invalid("cannot merge a player with itself".into()));
    }
    let qs = g.question_sizes();
    if correspondence.len() != qs[i] || qs[i] != qs[j] {
        return Err(Error::Invalid("correspondence is not a bijection between the question alphabets".into()));
    }
    let mut hit = vec![false; qs[j]];
    for &y in correspondence {
        if y >= qs[j] || hit[y] {
            return Err(Error::Invalid("correspondence is not a bijection".into()));
        }
        hit[y] = true;
    }
    let mut dist: Vec<(Vec<usize>, BigRational)> = Vec::new();
    for (qi, p) in g.support() {
        let q = g.decode_questions(qi);
        if q[j] != correspondence[q[i]] {
            return Err(Error::Precondition(format!(
                "support tuple {q:?} violates the correspondence"
            )));
        }
        let mut nq = q.clone();
        nq.remove(j);
        dist.push((nq, p.clone()));
    }

    let aj = g.answer_sizes()[j];
    let keep: Vec<usize> = (0..k).filter(|&x| x != j).collect();
    let pos_i = keep.iter().position(|&x| x == i).unwrap();
    let mut questions = Vec::new();
    let mut answers = Vec::new();
    for &p in &keep {
        questions.push(g.question_labels(p).to_vec());
        if p == i {
            let mut pairs = Vec::new();
            for a in g.answer_labels(i) {
                for b in g.answer_labels(j) {
                    pairs.push(format!("{a}|{b}"));
                }
            }
            answers.push(pairs);
        } else {
            answers.push(g.answer_labels(p).to_vec());
        }
    }
    Game::new(questions, answers, dist, |q, a| {
        let mut oq = vec![0; k];
        let mut oa = vec![0; k];
        for (t, &p) in keep.iter().enumerate() {
            oq[p] = q[t];
            oa[p] = a[t];
        }
        oq[j] = correspondence[q[pos_i]];
        oa[i] = a[pos_i] / aj;
        oa[j] = a[pos_i] % aj;
        g.wins(g.encode_questions(&oq), g.encode_answers(&oa))
    })
}

/// Removes a player whose question is constant on the support of `Q`.
pub fn eliminate_deterministic_player(g: &Game, j: usize) -> Result<Game> {
    Ok(eliminate_deterministic_player_with(g, j, &ValueConfig::default())?.0)
}

/// As [`eliminate_deterministic_player`], also returning the folded answer.
///
/// The removed player can only ever play one fixed answer, so the answer is fixed to the
/// one maximizing the value of the remaining game (least index on ties).
pub fn eliminate_deterministic_player_with(g: &Game, j: usize, cfg: &ValueConfig) -> Result<(Game, usize)> {
    let k = g.players();
    if j >= k {
        return Err(Error::Index { index: j, limit: k });
    }
    if k == 1 {
        return Err(Error::Precondition("cannot remove the only player".into()));
    }
    let mut fixed = None;
    let mut dist = Vec::new();
    for (qi, p) in g.support() {
        let q = g.decode_questions(qi);
        match fixed {
            None => fixed = Some(q[j]),
            Some(x) if x != q[j] => {
                return Err(Error::Precondition(format!("player {j} is not deterministic")))
            }
            _ => {}
        }
        let mut nq = q;
        nq.remove(j);
        dist.push((nq, p.clone()));
    }
    let xj = fixed.expect("support is nonempty");
    let keep: Vec<usize> = (0..k).filter(|&x| x != j).collect();
    let questions: Vec<Vec<String>> = keep.iter().map(|&p| g.question_labels(p).to_vec()).collect();
    let answers: Vec<Vec<String>> = keep.iter().map(|&p| g.answer_labels(p).to_vec()).collect();

    let mut best: Option<(BigRational, Game, usize)> = None;
    for aj in 0..g.answer_sizes()[j] {
        let h = Game::new(questions.clone(), answers.clone(), dist.clone(), |q, a| {
            let mut oq = Vec::with_capacity(k);
            let mut oa = Vec::with_capacity(k);
            oq.extend_from_slice(&q[..j]);
            oq.push(xj);
            oq.extend_from_slice(&q[j..]);
            oa.extend_from_slice(&a[..j]);
            oa.push(aj);
            oa.extend_from_slice(&a[j..]);
            g.wins(g.encode_questions(&oq), g.encode_answers(&oa))
        })?;
        let v = value_with(&h, cfg)?.0.into_inner();
        if best.as_ref().map_or(true, |(b, _, _)| v > *b) {
            best = Some((v, h, aj));
        }
    }
    let (_, h, aj) = best.unwrap();
    Ok((h, aj))
}
