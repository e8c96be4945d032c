//! Energy increment from fixing coordinate `i` on top of a restriction of the others.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::context::question_space;
use super::embed::{event_table, lift_around};
use crate::error::{Error, Result};
use crate::game::{Game, ProductEvent};
use crate::rational::{format_rational, serde_rational};
use crate::restrictions::{conditional_grr, GeneralizedRandomRestriction, GeneralizedRestriction};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementCheck {
    pub i: usize,
    /// `α = Pr[E]`
    #[serde(with = "serde_rational")]
    pub alpha: BigRational,
    /// Measured `ε(ℛ_i)`.
    #[serde(with = "serde_rational")]
    pub epsilon: BigRational,
    /// `β = E_{ρ~ℛ_i|E} ‖P_{X_i|E,E_ρ} − Q‖₁`
    #[serde(with = "serde_rational")]
    pub beta: BigRational,
    /// `E_{ρ~ℛ_i} Pr[E | E_ρ]²`
    #[serde(with = "serde_rational")]
    pub before: BigRational,
    /// `E_{ρ'~ℛ} Pr[E | E_ρ']²` with coordinate `i` also fixed to `x̃ ~ Q`.
    #[serde(with = "serde_rational")]
    pub after: BigRational,
    /// `α²(1 + β² − 6ε/α)`
    #[serde(with = "serde_rational")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// `Pr[E | E_ρ]` from the support of `Q^{⊗n}`.
fn likelihood(points: &[(Vec<usize>, BigRational, bool)], rho: &GeneralizedRestriction, weights: &[BigRational]) -> BigRational {
    let inside = points
        .iter()
        .filter(|(x, _, in_e)| *in_e && rho.contains(x))
        .map(|(_, p, _)| p.clone())
        .fold(BigRational::zero(), |a, b| a + b);
    inside / rho.mass(weights)
}

/// Evaluates both sides of the energy-increment inequality exactly.
///
/// `ri` acts on the coordinates `[n] \ {i}` in increasing order, over the base question
/// tuples with measure `Q`.
pub fn information_increment_check(
    g_rep: &Game,
    e: &ProductEvent,
    ri: &GeneralizedRandomRestriction,
    i: usize,
) -> Result<IncrementCheck> {
    let (base, n) = g_rep
        .repetition()
        .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
    if i >= n {
        return Err(Error::Index { index: i, limit: n });
    }
    if ri.n() + 1 != n {
        return Err(Error::Arity { expected: n - 1, got: ri.n() });
    }
    let space = question_space(base)?;
    if ri.space() != &space {
        return Err(Error::Invalid("restriction measure differs from Q".into()));
    }
    let q = space.weights().to_vec();
    let points: Vec<(Vec<usize>, BigRational, bool)> = g_rep
        .support()
        .map(|(qi, p)| {
            let per_player = g_rep.decode_questions(qi);
            let x = (0..n).map(|c| g_rep.coordinate_question(&per_player, c)).collect();
            (x, p.clone(), e.contains(&per_player))
        })
        .collect();
    let alpha = points
        .iter()
        .filter(|t| t.2)
        .map(|t| t.1.clone())
        .fold(BigRational::zero(), |a, b| a + b);
    let epsilon = ri.epsilon().clone();
    if epsilon >= alpha {
        return Err(Error::Precondition(format!(
            "ε = {} is not below Pr[E] = {}",
            format_rational(&epsilon),
            format_rational(&alpha)
        )));
    }

    let lifted: Vec<(GeneralizedRestriction, BigRational)> = ri
        .entries()
        .iter()
        .map(|(rho, w)| Ok((lift_around(rho, i)?, w.clone())))
        .collect::<Result<_>>()?;
    let full = GeneralizedRandomRestriction::new(space.clone(), n, lifted.clone())?;
    let cond = conditional_grr(&full, &event_table(g_rep, e)?)?;

    let mut beta = BigRational::zero();
    for entry in &cond.entries {
        let mut px = vec![BigRational::zero(); q.len()];
        let mut mass = BigRational::zero();
        for (x, p, in_e) in &points {
            if *in_e && entry.restriction.contains(x) {
                px[x[i]] += p;
                mass += p;
            }
        }
        let l1 = px
            .iter()
            .zip(&q)
            .map(|(a, b)| (a / &mass - b).abs())
            .fold(BigRational::zero(), |a, b| a + b);
        beta += &entry.weight * l1;
    }

    let mut before = BigRational::zero();
    let mut after = BigRational::zero();
    for (rho, w) in &lifted {
        let l = likelihood(&points, rho, &q);
        before += w * &l * &l;
        let classes: Vec<Vec<usize>> = rho.classes().iter().filter(|c| c[..] != [i]).cloned().collect();
        for (xt, qx) in q.iter().enumerate() {
            if qx.is_zero() {
                continue;
            }
            let mut fixed = rho.fixed().clone();
            fixed.insert(i, xt);
            let fixed_rho = GeneralizedRestriction::new(n, classes.clone(), fixed)?;
            let l = likelihood(&points, &fixed_rho, &q);
            after += w * qx * &l * &l;
        }
    }
    let one = BigRational::from_integer(1.into());
    let six = BigRational::from_integer(6.into());
    let rhs = &alpha * &alpha * (one + &beta * &beta) - six * &epsilon * &alpha;
    Ok(IncrementCheck {
        i,
        holds: after >= rhs,
        alpha,
        epsilon,
        beta,
        before,
        after,
        rhs,
    })
}
