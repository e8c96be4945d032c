//! Repeated games under a generalized restriction of their coordinates.

use super::{repeat_game, Game, ProductEvent, ProductStrategy};
use crate::error::{Error, Result};
use crate::restrictions::GeneralizedRestriction;

/// The `m`-fold game obtained from `G^{⊗n}` by restricting its coordinates.
#[derive(Clone, Debug)]
pub struct RestrictedGame {
    pub game: Game,
    pub strategy: ProductStrategy,
    pub event: ProductEvent,
    /// One coordinate per class, whose answers the restricted strategy reports.
    pub representatives: Vec<usize>,
}

/// Restricts a repeated game, strategy and event along `ρ`.
///
/// The fixed values of `ρ` are base question-tuple indices. A restricted question `x'` lifts to
/// `x'^{(ρ)}` by copying coordinate `t` of `x'` onto every member of `T_t` and `z_i` onto `i ∈ I`.
/// The restricted strategy answers what the original strategy answers at the representatives,
/// and `x' ∈ E'` iff `x'^{(ρ)} ∈ E`.
pub fn restrict_repeated_game(
    g_rep: &Game,
    s: &ProductStrategy,
    e: &ProductEvent,
    rho: &GeneralizedRestriction,
) -> Result<RestrictedGame> {
    let (base, n) = g_rep
        .repetition()
        .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
    if rho.n() != n {
        return Err(Error::Arity { expected: n, got: rho.n() });
    }
    if rho.m() == 0 {
        return Err(Error::Invalid("restriction leaves no free coordinate".into()));
    }
    rho.check_alphabet(base.question_tuple_count())?;
    s.check(g_rep)?;
    e.check(g_rep)?;

    let k = base.players();
    let m = rho.m();
    let h = repeat_game(base, m)?;
    let class_of = rho.class_of();
    let fixed: Vec<Option<Vec<usize>>> = (0..n)
        .map(|i| rho.fixed().get(&i).map(|&z| base.decode_questions(z)))
        .collect();
    let reps = rho.representatives();

    let lift = |j: usize, q: usize| -> usize {
        let parts = h.split_question(j, q);
        let orig: Vec<usize> = (0..n)
            .map(|i| match class_of[i] {
                Some(t) => parts[t],
                None => fixed[i].as_ref().expect("partition covers every coordinate")[j],
            })
            .collect();
        g_rep.join_question(j, &orig)
    };

    let mut tables = Vec::with_capacity(k);
    let mut sets = Vec::with_capacity(k);
    for j in 0..k {
        let size = h.question_sizes()[j];
        let mut table = Vec::with_capacity(size);
        let mut set = Vec::with_capacity(size);
        for q in 0..size {
            let x = lift(j, q);
            let answers = g_rep.split_answer(j, s.answer(j, x));
            let picked: Vec<usize> = reps.iter().map(|&i| answers[i]).collect();
            table.push(h.join_answer(j, &picked));
            set.push(e.contains_player(j, x));
        }
        tables.push(table);
        sets.push(set);
    }
    let strategy = ProductStrategy::new(&h, tables)?;
    let event = ProductEvent::new(&h, sets)?;
    Ok(RestrictedGame {
        game: h,
        strategy,
        event,
        representatives: reps,
    })
}
