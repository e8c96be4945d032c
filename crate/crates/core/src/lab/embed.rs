//! The randomized single-copy strategy that embeds one game into coordinate `i` of
//! `G^{⊗n}` conditioned on a product event, and the good-restriction event `Λ`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::context::{player_space, Repeated};
use crate::analysis::RationalTable;
use crate::error::{Error, Result};
use crate::game::{coordinate_win_probability, Game, ProductEvent, ProductStrategy};
use crate::rational::{from_f64, serde_rational, to_f64};
use crate::restrictions::{conditional_grr, GeneralizedRandomRestriction, GeneralizedRestriction};
use crate::util::{checked_pow, decode, undigits};

/// Largest `n` for which the subsets of `[n] \ {i}` are enumerated.
const SUBSET_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum EmbeddingVariant {
    /// `p` from the grid, `I ~_p [n] \ {i}`, `Z ~ P_{X_{I'}|E}`.
    Plain,
    /// `ρ ~ ℛ_i | E`, one restriction per coordinate acting on the other `n - 1`.
    Generalized(Vec<GeneralizedRandomRestriction>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingConfig {
    /// Grid ratio; the grid is `{1, δ, .., δ^{T-1}}`.
    pub delta: f64,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    /// Enumerate the shared randomness instead of sampling.
    pub exact: bool,
    pub variant: EmbeddingVariant,
}

impl EmbeddingConfig {
    pub fn new(delta: f64, t: usize) -> Self {
        EmbeddingConfig {
            delta,
            t,
            trials: 10_000,
            seed: 0,
            exact: true,
            variant: EmbeddingVariant::Plain,
        }
    }

    /// `δ = (log n)^{-1/3}`, `T = ⌈1/δ²⌉`. Only meaningful for large `n`; small `n`
    /// gives `δ ≥ 1`, which `check` rejects.
    pub fn asymptotic(n: usize) -> Self {
        let delta = (n as f64).ln().powf(-1.0 / 3.0);
        let t = (1.0 / (delta * delta)).ceil().max(1.0) as usize;
        Self::new(delta, t)
    }

    fn check(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Invalid(format!("δ = {} is outside (0, 1)", self.delta)));
        }
        if self.t == 0 {
            return Err(Error::Invalid("T must be at least 1".into()));
        }
        if !self.exact && self.trials == 0 {
            return Err(Error::Invalid("Monte-Carlo mode needs trials".into()));
        }
        Ok(())
    }

    /// The grid as exact rationals.
    fn grid(&self) -> Result<Vec<BigRational>> {
        let d = from_f64(self.delta)?;
        Ok((0..self.t).map(|e| num_traits::pow(d.clone(), e)).collect())
    }
}

/// Estimate with a 95% confidence radius; exact results have radius 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub radius: f64,
}

impl Estimate {
    fn exact(r: &BigRational) -> Self {
        Estimate {
            value: to_f64(r),
            radius: 0.0,
        }
    }

    /// Hoeffding radius for a mean of `trials` indicators.
    fn sampled(hits: usize, trials: usize) -> Self {
        Estimate {
            value: hits as f64 / trials as f64,
            radius: ((2.0f64 / 0.05).ln() / (2.0 * trials as f64)).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordinateEmbedding {
    pub i: usize,
    /// Embedding strategy's winning probability with `i` fixed.
    #[serde(with = "serde_rational")]
    pub embedding_win: BigRational,
    /// `Pr[Win_i | E]`
    #[serde(with = "serde_rational")]
    pub target_win: BigRational,
}

/// Exact quantities of the embedding strategy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactEmbedding {
    /// `Pr[L]`, summing over the shared randomness first.
    #[serde(with = "serde_rational")]
    pub losing: BigRational,
    /// `Pr[L]`, summing over `X̃ ~ Q` first.
    #[serde(with = "serde_rational")]
    pub losing_by_question: BigRational,
    /// `E ‖P_{X_i | E, ·} − Q‖₁` over the shared randomness.
    #[serde(with = "serde_rational")]
    pub distribution_term: BigRational,
    /// `E E_{X̃ ~ P_{X_i | E, ·}} Pr[L | X̃, ·]`
    #[serde(with = "serde_rational")]
    pub conditioned_term: BigRational,
    #[serde(with = "serde_rational")]
    pub inconsistency: BigRational,
    #[serde(with = "serde_rational")]
    pub target_losing: BigRational,
    pub per_coordinate: Vec<CoordinateEmbedding>,
}

impl ExactEmbedding {
    /// Both summation orders agree.
    pub fn identity_holds(&self) -> bool {
        self.losing == self.losing_by_question
    }

    /// `Pr[L] ≤ distribution term + conditioned term`.
    pub fn decomposition_holds(&self) -> bool {
        self.losing <= &self.distribution_term + &self.conditioned_term
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub mode: &'static str,
    pub variant: &'static str,
    pub n: usize,
    pub delta: f64,
    pub t: usize,
    pub seed: u64,
    pub trials: usize,
    #[serde(with = "serde_rational")]
    pub event_probability: BigRational,
    pub losing: Estimate,
    /// `E_i Pr[Lose_i | E]`
    pub target_losing: Estimate,
    /// Both measured terms of the loss decomposition (exact mode only).
    pub distribution_term: Option<Estimate>,
    pub conditioned_term: Option<Estimate>,
    /// `sqrt(2 log2(1/Pr[E]) / (δ^T n))`, plain variant only.
    pub distribution_term_bound: Option<f64>,
    pub inconsistency: Estimate,
    pub exact: Option<ExactEmbedding>,
}

/// One realization of the shared randomness with `i` fixed, written as a restriction on
/// all `n` coordinates that leaves `i` alone.
pub(crate) struct Scenario {
    i: usize,
    weight: BigRational,
    rho: GeneralizedRestriction,
}

/// `Pr[X_i = · | E, E_ρ]` over base question tuples, with `Pr[E ∩ E_ρ]` under `Q^{⊗n}`.
fn conditioned_marginal(r: &Repeated, rho: &GeneralizedRestriction, i: usize, s: usize) -> (Vec<BigRational>, BigRational) {
    let mut out = vec![BigRational::zero(); s];
    let mut mass = BigRational::zero();
    for pt in &r.points {
        if pt.in_e && rho.contains(&pt.x) {
            out[pt.x[i]] += &pt.p;
            mass += &pt.p;
        }
    }
    if !mass.is_zero() {
        for v in &mut out {
            *v /= &mass;
        }
    }
    (out, mass)
}

/// Player `j`'s view of `E_ρ`: equal components within classes, fixed components on `I`.
fn player_consistent(r: &Repeated, rho: &GeneralizedRestriction, fixed: &[Option<Vec<usize>>], j: usize, parts: &[usize]) -> bool {
    rho.classes().iter().all(|c| c.iter().all(|&t| parts[t] == parts[c[0]]))
        && fixed
            .iter()
            .enumerate()
            .all(|(t, z)| z.as_ref().map_or(true, |z| parts[t] == z[j]))
        && parts.len() == r.n
}

fn fixed_components(r: &Repeated, rho: &GeneralizedRestriction) -> Vec<Option<Vec<usize>>> {
    (0..r.n)
        .map(|t| rho.fixed().get(&t).map(|&z| r.base.decode_questions(z)))
        .collect()
}

/// Answer distribution of player `j` on question `x̃^j`, `None` when inconsistent.
fn answer_tables(r: &Repeated, rho: &GeneralizedRestriction, i: usize) -> Vec<Vec<Option<Vec<BigRational>>>> {
    let fixed = fixed_components(r, rho);
    (0..r.k)
        .map(|j| {
            let qs = r.base.question_sizes()[j];
            let asz = r.base.answer_sizes()[j];
            let mut dist = vec![vec![BigRational::zero(); asz]; qs];
            let mut total = vec![BigRational::zero(); qs];
            for pp in &r.players[j] {
                if !pp.in_e || pp.p.is_zero() || !player_consistent(r, rho, &fixed, j, &pp.parts) {
                    continue;
                }
                let xt = pp.parts[i];
                dist[xt][pp.answers[i]] += &pp.p;
                total[xt] += &pp.p;
            }
            dist.into_iter()
                .zip(total)
                .map(|(d, t)| {
                    if t.is_zero() {
                        None
                    } else {
                        Some(d.into_iter().map(|v| v / &t).collect())
                    }
                })
                .collect()
        })
        .collect()
}

/// `Pr[win | X̃ = x̃]` and whether some player is inconsistent, for every base tuple.
fn win_given_question(r: &Repeated, tables: &[Vec<Option<Vec<BigRational>>>]) -> Vec<(BigRational, bool)> {
    let base = r.base;
    let a_sizes = base.answer_sizes();
    (0..base.question_tuple_count())
        .map(|xt| {
            let xs = base.decode_questions(xt);
            let dists: Vec<Vec<BigRational>> = (0..r.k)
                .map(|j| match &tables[j][xs[j]] {
                    Some(d) => d.clone(),
                    None => {
                        let mut d = vec![BigRational::zero(); a_sizes[j]];
                        d[0] = BigRational::one();
                        d
                    }
                })
                .collect();
            let inconsistent = (0..r.k).any(|j| tables[j][xs[j]].is_none());
            let mut win = BigRational::zero();
            for ai in 0..base.answer_tuple_count() {
                if !base.wins(xt, ai) {
                    continue;
                }
                let a = base.decode_answers(ai);
                let mut p = BigRational::one();
                for j in 0..r.k {
                    p *= &dists[j][a[j]];
                    if p.is_zero() {
                        break;
                    }
                }
                win += p;
            }
            (win, inconsistent)
        })
        .collect()
}

/// Weight of `I` under `p` uniform on the grid and `I ~_p` the `n - 1` other coordinates.
fn subset_weight(grid: &[BigRational], size: usize, others: usize) -> BigRational {
    let t = BigRational::from_integer(grid.len().into());
    grid.iter()
        .map(|p| num_traits::pow(p.clone(), size) * num_traits::pow(BigRational::one() - p, others - size))
        .fold(BigRational::zero(), |a, b| a + b)
        / t
}

fn plain_scenarios(r: &Repeated, i: usize, grid: &[BigRational], condition: Option<usize>) -> Result<Vec<Scenario>> {
    let n = r.n;
    if n - 1 > SUBSET_LIMIT {
        return Err(Error::cap("restricted coordinate subsets", n - 1, SUBSET_LIMIT as u128));
    }
    let others: Vec<usize> = (0..n).filter(|&c| c != i).collect();
    let relevant = |x: &[usize]| condition.map_or(true, |xt| x[i] == xt);
    let mass: BigRational = r
        .points
        .iter()
        .filter(|p| p.in_e && relevant(&p.x))
        .map(|p| p.p.clone())
        .fold(BigRational::zero(), |a, b| a + b);
    if mass.is_zero() {
        return Err(Error::ZeroMass);
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << others.len()) {
        let live: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c).collect();
        let dead: Vec<usize> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 0).map(|(_, &c)| c).collect();
        let w_i = subset_weight(grid, live.len(), others.len());
        if w_i.is_zero() {
            continue;
        }
        let mut groups: BTreeMap<Vec<usize>, BigRational> = BTreeMap::new();
        for pt in r.points.iter().filter(|p| p.in_e && relevant(&p.x)) {
            let z: Vec<usize> = dead.iter().map(|&c| pt.x[c]).collect();
            *groups.entry(z).or_insert_with(BigRational::zero) += &pt.p;
        }
        for (z, m) in groups {
            let classes: Vec<Vec<usize>> = std::iter::once(i).chain(live.iter().copied()).map(|c| vec![c]).collect();
            let fixed = dead.iter().copied().zip(z).collect();
            out.push(Scenario {
                i,
                weight: &w_i * m / &mass,
                rho: GeneralizedRestriction::new(n, classes, fixed)?,
            });
        }
    }
    Ok(out)
}

/// Lifts a restriction of `[n] \ {i}` to `[n]`, leaving `i` as its own class.
pub(crate) fn lift_around(rho: &GeneralizedRestriction, i: usize) -> Result<GeneralizedRestriction> {
    let up = |c: usize| if c < i { c } else { c + 1 };
    let mut classes: Vec<Vec<usize>> = rho.classes().iter().map(|c| c.iter().map(|&t| up(t)).collect()).collect();
    classes.push(vec![i]);
    let fixed = rho.fixed().iter().map(|(&t, &z)| (up(t), z)).collect();
    GeneralizedRestriction::new(rho.n() + 1, classes, fixed)
}

/// `E` as a membership table over `X^n`, base tuples as symbols.
pub(crate) fn event_table(g_rep: &Game, e: &ProductEvent) -> Result<Vec<bool>> {
    let (base, n) = g_rep
        .repetition()
        .ok_or_else(|| Error::Precondition("game is not a repetition".into()))?;
    let s = base.question_tuple_count();
    let len = checked_pow(s, n, crate::restrictions::EVENT_CAP, "event table")?;
    let k = base.players();
    let decoded: Vec<Vec<usize>> = (0..s).map(|x| base.decode_questions(x)).collect();
    Ok((0..len)
        .map(|idx| {
            let x = crate::util::digits(idx, s, n);
            (0..k).all(|j| {
                let parts: Vec<usize> = x.iter().map(|&t| decoded[t][j]).collect();
                e.contains_player(j, g_rep.join_question(j, &parts))
            })
        })
        .collect())
}

pub(crate) fn generalized_scenarios(
    g_rep: &Game,
    e: &ProductEvent,
    r: &Repeated,
    i: usize,
    ri: &GeneralizedRandomRestriction,
) -> Result<Vec<Scenario>> {
    let n = r.n;
    if ri.n() + 1 != n {
        return Err(Error::Arity { expected: n - 1, got: ri.n() });
    }
    if ri.space().size() != r.base.question_tuple_count() {
        return Err(Error::Invalid("restriction alphabet is not the base question set".into()));
    }
    let lifted: Vec<(GeneralizedRestriction, BigRational)> = ri
        .entries()
        .iter()
        .map(|(rho, w)| Ok((lift_around(rho, i)?, w.clone())))
        .collect::<Result<_>>()?;
    let full = GeneralizedRandomRestriction::new(ri.space().clone(), n, lifted)?;
    let table = event_table(g_rep, e)?;
    let cond = conditional_grr(&full, &table)?;
    Ok(cond
        .entries
        .into_iter()
        .map(|c| Scenario {
            i,
            weight: c.weight,
            rho: c.restriction,
        })
        .collect())
}

fn scenarios_for(
    g_rep: &Game,
    e: &ProductEvent,
    r: &Repeated,
    i: usize,
    cfg: &EmbeddingConfig,
) -> Result<Vec<Scenario>> {
    match &cfg.variant {
        EmbeddingVariant::Plain => plain_scenarios(r, i, &cfg.grid()?, None),
        EmbeddingVariant::Generalized(rs) => {
            let ri = rs.get(i).ok_or(Error::Index { index: i, limit: rs.len() })?;
            generalized_scenarios(g_rep, e, r, i, ri)
        }
    }
}

/// Runs the embedding strategy against `(s, E)` in `G^{⊗n}`.
pub fn simulate_embedding_strategy(
    g_rep: &Game,
    s: &ProductStrategy,
    e: &ProductEvent,
    cfg: &EmbeddingConfig,
) -> Result<SimulationReport> {
    cfg.check()?;
    let r = Repeated::new(g_rep, s, e)?;
    if r.pr_e.is_zero() {
        return Err(Error::ZeroMass);
    }
    let n = r.n;
    let mut target_win = Vec::with_capacity(n);
    for i in 0..n {
        target_win.push(coordinate_win_probability(g_rep, s, i, e)?.into_inner());
    }
    let nn = BigRational::from_integer(n.into());
    let target_losing = BigRational::one() - target_win.iter().fold(BigRational::zero(), |a, b| a + b) / &nn;
    let (variant, bound) = match cfg.variant {
        EmbeddingVariant::Plain => {
            let alpha = to_f64(&r.pr_e);
            let b = (2.0 / (cfg.delta.powi(cfg.t as i32) * n as f64) * (1.0 / alpha).log2()).sqrt();
            ("plain", Some(b))
        }
        EmbeddingVariant::Generalized(_) => ("generalized", None),
    };
    let mut report = SimulationReport {
        mode: if cfg.exact { "exact" } else { "monte-carlo" },
        variant,
        n,
        delta: cfg.delta,
        t: cfg.t,
        seed: cfg.seed,
        trials: if cfg.exact { 0 } else { cfg.trials },
        event_probability: r.pr_e.clone(),
        losing: Estimate::exact(&BigRational::zero()),
        target_losing: Estimate::exact(&target_losing),
        distribution_term: None,
        conditioned_term: None,
        distribution_term_bound: bound,
        inconsistency: Estimate::exact(&BigRational::zero()),
        exact: None,
    };
    if cfg.exact {
        let ex = exact_embedding(g_rep, e, &r, cfg, &target_win, target_losing)?;
        report.losing = Estimate::exact(&ex.losing);
        report.distribution_term = Some(Estimate::exact(&ex.distribution_term));
        report.conditioned_term = Some(Estimate::exact(&ex.conditioned_term));
        report.inconsistency = Estimate::exact(&ex.inconsistency);
        report.exact = Some(ex);
    } else {
        let (lost, inconsistent) = sample_embedding(g_rep, e, &r, cfg)?;
        report.losing = Estimate::sampled(lost, cfg.trials);
        report.inconsistency = Estimate::sampled(inconsistent, cfg.trials);
    }
    Ok(report)
}

fn exact_embedding(
    g_rep: &Game,
    e: &ProductEvent,
    r: &Repeated,
    cfg: &EmbeddingConfig,
    target_win: &[BigRational],
    target_losing: BigRational,
) -> Result<ExactEmbedding> {
    let q = r.q();
    let s = q.len();
    let nn = BigRational::from_integer(r.n.into());
    let mut losing = BigRational::zero();
    let mut loss_by_question = vec![BigRational::zero(); s];
    let mut distribution_term = BigRational::zero();
    let mut conditioned_term = BigRational::zero();
    let mut inconsistency = BigRational::zero();
    let mut per_coordinate = Vec::with_capacity(r.n);
    for i in 0..r.n {
        let mut win_i = BigRational::zero();
        for sc in scenarios_for(g_rep, e, r, i, cfg)? {
            debug_assert_eq!(sc.i, i);
            let w = &sc.weight / &nn;
            let (px, _) = conditioned_marginal(r, &sc.rho, i, s);
            let tables = answer_tables(r, &sc.rho, i);
            let wins = win_given_question(r, &tables);
            let mut lose_q = BigRational::zero();
            let mut lose_p = BigRational::zero();
            let mut bad = BigRational::zero();
            let mut l1 = BigRational::zero();
            for xt in 0..s {
                let (win, inc) = &wins[xt];
                let lose = BigRational::one() - win;
                l1 += (&px[xt] - &q[xt]).abs();
                if !q[xt].is_zero() {
                    lose_q += &q[xt] * &lose;
                    loss_by_question[xt] += &w * &lose;
                    if *inc {
                        bad += &q[xt];
                    }
                }
                lose_p += &px[xt] * &lose;
            }
            win_i += &sc.weight * (BigRational::one() - &lose_q);
            losing += &w * lose_q;
            distribution_term += &w * l1;
            conditioned_term += &w * lose_p;
            inconsistency += &w * bad;
        }
        per_coordinate.push(CoordinateEmbedding {
            i,
            embedding_win: win_i,
            target_win: target_win[i].clone(),
        });
    }
    let losing_by_question = q
        .iter()
        .zip(&loss_by_question)
        .map(|(a, b)| a * b)
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(ExactEmbedding {
        losing,
        losing_by_question,
        distribution_term,
        conditioned_term,
        inconsistency,
        target_losing,
        per_coordinate,
    })
}

fn weighted<T: Clone>(items: &[(T, BigRational)]) -> Result<(Vec<T>, WeightedIndex<f64>)> {
    let w: Vec<f64> = items.iter().map(|(_, p)| to_f64(p)).collect();
    let idx = WeightedIndex::new(&w).map_err(|_| Error::ZeroMass)?;
    Ok((items.iter().map(|(t, _)| t.clone()).collect(), idx))
}

/// Plays the strategy `cfg.trials` times: returns losses and inconsistent rounds.
fn sample_embedding(g_rep: &Game, e: &ProductEvent, r: &Repeated, cfg: &EmbeddingConfig) -> Result<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = r.n;
    let base = r.base;
    let q = r.q();
    let (questions, q_index) = weighted(&q.iter().cloned().enumerate().collect::<Vec<_>>())?;
    let e_points: Vec<(usize, BigRational)> =
        r.points.iter().enumerate().filter(|(_, p)| p.in_e).map(|(t, p)| (t, p.p.clone())).collect();
    let (e_ids, e_index) = weighted(&e_points)?;
    let grid: Vec<f64> = (0..cfg.t).map(|t| cfg.delta.powi(t as i32)).collect();
    let conditioned: Vec<Option<(Vec<GeneralizedRestriction>, WeightedIndex<f64>)>> = match &cfg.variant {
        EmbeddingVariant::Plain => vec![None; n],
        EmbeddingVariant::Generalized(_) => (0..n)
            .map(|i| {
                let sc = scenarios_for(g_rep, e, r, i, cfg)?;
                let items: Vec<(GeneralizedRestriction, BigRational)> = sc.into_iter().map(|s| (s.rho, s.weight)).collect();
                weighted(&items).map(Some)
            })
            .collect::<Result<_>>()?,
    };

    let mut lost = 0;
    let mut inconsistent = 0;
    for _ in 0..cfg.trials {
        let i = rng.gen_range(0..n);
        let rho = match &conditioned[i] {
            Some((rs, idx)) => rs[idx.sample(&mut rng)].clone(),
            None => {
                let p = grid[rng.gen_range(0..grid.len())];
                let z = &r.points[e_ids[e_index.sample(&mut rng)]].x;
                let mut classes = vec![vec![i]];
                let mut fixed = BTreeMap::new();
                for c in (0..n).filter(|&c| c != i) {
                    if rng.gen_bool(p) {
                        classes.push(vec![c]);
                    } else {
                        fixed.insert(c, z[c]);
                    }
                }
                GeneralizedRestriction::new(n, classes, fixed)?
            }
        };
        let xt = questions[q_index.sample(&mut rng)];
        let xs = base.decode_questions(xt);
        let fixed = fixed_components(r, &rho);
        let mut answers = Vec::with_capacity(r.k);
        let mut any_bad = false;
        for j in 0..r.k {
            let pool: Vec<(usize, BigRational)> = r.players[j]
                .iter()
                .filter(|pp| pp.in_e && !pp.p.is_zero() && pp.parts[i] == xs[j] && player_consistent(r, &rho, &fixed, j, &pp.parts))
                .map(|pp| (pp.answers[i], pp.p.clone()))
                .collect();
            if pool.is_empty() {
                any_bad = true;
                answers.push(0);
            } else {
                let (ans, idx) = weighted(&pool)?;
                answers.push(ans[idx.sample(&mut rng)]);
            }
        }
        if any_bad {
            inconsistent += 1;
        }
        if !base.wins(xt, base.encode_answers(&answers)) {
            lost += 1;
        }
    }
    Ok((lost, inconsistent))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaConfig {
    pub delta: f64,
    pub t: usize,
    /// Base question tuple `x̃` and answer tuple `ã` the indicators are built for.
    pub question: usize,
    pub answer: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaReport {
    pub i: usize,
    pub question: usize,
    pub answer: usize,
    /// `Pr[Λ(I, Z)]` over `p`, `I ~_p`, `Z ~ P_{X_{I'} | E, X_i = x̃}`.
    #[serde(with = "serde_rational")]
    pub frequency: BigRational,
    pub estimate: Estimate,
    /// `4k / (δ T Pr[E | X_i = x̃])`, bounding `Pr[¬Λ]`.
    pub failure_bound: f64,
    /// Restrictions enumerated, and how many of them fail `Λ`.
    pub restrictions: usize,
    pub failures: usize,
}

/// `Pr[Λ]` for the plain variant: every restricted `F^j` and `f^j`, once centered, has
/// `Stab_{1-δ} < δ` under `Q^j`.
pub fn lambda_event_probability(
    g_rep: &Game,
    s: &ProductStrategy,
    e: &ProductEvent,
    i: usize,
    cfg: &LambdaConfig,
) -> Result<LambdaReport> {
    let ecfg = EmbeddingConfig::new(cfg.delta, cfg.t);
    ecfg.check()?;
    let r = Repeated::new(g_rep, s, e)?;
    if i >= r.n {
        return Err(Error::Index { index: i, limit: r.n });
    }
    let base = r.base;
    if cfg.question >= base.question_tuple_count() || cfg.answer >= base.answer_tuple_count() {
        return Err(Error::Invalid("question or answer tuple out of range".into()));
    }
    let fam = super::indicator::indicator_family(g_rep, s, e, i)?;
    let xs = base.decode_questions(cfg.question);
    let as_ = base.decode_answers(cfg.answer);
    let delta = from_f64(cfg.delta)?;
    let rho_noise = BigRational::one() - &delta;
    let spaces: Vec<_> = (0..r.k).map(|j| player_space(base, j)).collect::<Result<_>>()?;
    let others = fam.others();

    let scenarios = plain_scenarios(&r, i, &ecfg.grid()?, Some(cfg.question))?;
    let mut cache: BTreeMap<(Vec<usize>, Vec<(usize, usize)>), bool> = BTreeMap::new();
    let mut frequency = BigRational::zero();
    let mut failures = 0;
    for sc in &scenarios {
        let live: Vec<usize> = sc.rho.classes().iter().map(|c| c[0]).filter(|&c| c != i).collect();
        let key_fixed: Vec<(usize, usize)> = sc.rho.fixed().iter().map(|(&a, &b)| (a, b)).collect();
        let key = (live.clone(), key_fixed);
        let good = match cache.get(&key) {
            Some(&g) => g,
            None => {
                let mut good = true;
                'players: for j in 0..r.k {
                    let tables = [&fam.event[j][xs[j]], &fam.answer[j][xs[j]][as_[j]]];
                    for table in tables {
                        if !restricted_is_noise_stable_free(table, &others, &live, sc.rho.fixed(), base, j, &spaces[j], &rho_noise, &delta)? {
                            good = false;
                            break 'players;
                        }
                    }
                }
                cache.insert(key, good);
                good
            }
        };
        if good {
            frequency += &sc.weight;
        } else {
            failures += 1;
        }
    }
    let cond: BigRational = {
        let num: BigRational = r
            .points
            .iter()
            .filter(|p| p.in_e && p.x[i] == cfg.question)
            .map(|p| p.p.clone())
            .fold(BigRational::zero(), |a, b| a + b);
        num / &r.q()[cfg.question]
    };
    let failure_bound = 4.0 * r.k as f64 / (cfg.delta * cfg.t as f64 * to_f64(&cond));
    Ok(LambdaReport {
        i,
        question: cfg.question,
        answer: cfg.answer,
        estimate: Estimate::exact(&frequency),
        frequency,
        failure_bound,
        restrictions: scenarios.len(),
        failures,
    })
}

/// Restricts an `(n-1)`-coordinate table to the live coordinates and tests
/// `Stab_{1-δ}[g − E g] < δ`.
#[allow(clippy::too_many_arguments)]
fn restricted_is_noise_stable_free(
    table: &[bool],
    others: &[usize],
    live: &[usize],
    fixed: &BTreeMap<usize, usize>,
    base: &Game,
    j: usize,
    space: &crate::analysis::ProbabilitySpace,
    rho_noise: &BigRational,
    delta: &BigRational,
) -> Result<bool> {
    if live.is_empty() {
        return Ok(true);
    }
    let sj = space.size();
    let m = live.len();
    let len = checked_pow(sj, m, crate::analysis::TABLE_LIMIT, "restricted indicator")?;
    let pos_of: BTreeMap<usize, usize> = others.iter().enumerate().map(|(p, &c)| (c, p)).collect();
    let mut template = vec![0usize; others.len()];
    for (&c, &z) in fixed {
        template[pos_of[&c]] = base.decode_questions(z)[j];
    }
    let live_pos: BTreeSet<usize> = live.iter().map(|c| pos_of[c]).collect();
    let values: Vec<BigRational> = (0..len)
        .map(|y| {
            let ys = decode(y, &vec![sj; m]);
            let mut full = template.clone();
            for (p, v) in live_pos.iter().zip(ys) {
                full[*p] = v;
            }
            if table[undigits(&full, sj)] {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let t = RationalTable::new(space.clone(), m, values)?;
    let mean = t.mean();
    let centered = RationalTable::new(space.clone(), m, t.values().iter().map(|v| v - &mean).collect())?;
    Ok(&centered.stability(rho_noise)? < delta)
}
