//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parrep_core::abelian::{
    bipartition_embedding_witness, check_marginal_condition, has_z_embedding, universal_embedding, verify_witness,
};
use parrep_core::analysis::{FunctionTable, ProbabilitySpace, RationalTable};
use parrep_core::game::{eliminate_deterministic_player, merge_players, win_probability};
use parrep_core::lab::{
    criterion_chain_length, criterion_hypothesis_scan, greedy_hard_chain, parrep_bound_from_criterion,
    question_space, simulate_embedding_strategy, information_increment_check, EmbeddingConfig, EventFamily,
};
use parrep_core::rational::{rat, to_f64};
use parrep_core::restrictions::{
    apply_generalized, conditional_grr_property_check, grr_distribution_error, increment_grr, pairing_error_exact,
    pairing_error_mc, pairing_grr, random_restriction_degree_schedule, restriction_stability_identity_check,
    restriction_stability_identity_exact, uniformize, GeneralizedRandomRestriction, GeneralizedRestriction,
};
use parrep_core::structure::is_pairwise_connected;
use parrep_core::{classify, gallery, repeat_game, value, Game, ProductEvent, ProductStrategy, SupportSet};

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

// ---------------------------------------------------------------------------
// independent oracles

/// Best deterministic strategy by enumerating every answer function of every player.
fn brute_value(g: &Game) -> BigRational {
    let k = g.players();
    let qs = g.question_sizes().to_vec();
    let as_ = g.answer_sizes().to_vec();
    let counts: Vec<usize> = (0..k).map(|j| as_[j].pow(qs[j] as u32)).collect();
    let total: usize = counts.iter().product();
    let support: Vec<(Vec<usize>, BigRational)> =
        g.support().map(|(qi, p)| (g.decode_questions(qi), p.clone())).collect();
    let mut best = BigRational::zero();
    for idx in 0..total {
        let mut rest = idx;
        let mut tables = Vec::with_capacity(k);
        for j in 0..k {
            let mut code = rest % counts[j];
            rest /= counts[j];
            let mut t = Vec::with_capacity(qs[j]);
            for _ in 0..qs[j] {
                t.push(code % as_[j]);
                code /= as_[j];
            }
            tables.push(t);
        }
        let mut w = BigRational::zero();
        for (q, p) in &support {
            let a: Vec<usize> = (0..k).map(|j| tables[j][q[j]]).collect();
            if g.wins(g.encode_questions(q), g.encode_answers(&a)) {
                w += p;
            }
        }
        if w > best {
            best = w;
        }
    }
    best
}

/// Searches maps `σ_i: Σ_i → D` with `σ_i(0) = 0`, not all zero, whose sum is constant on
/// `s`. `D` is `Z/m` when `modulus` is set, else the integers in `[-bound, bound]`.
fn brute_embedding(s: &SupportSet, modulus: Option<i64>, bound: i64) -> bool {
    let sizes = s.sizes();
    let vars: Vec<(usize, usize)> = sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| (1..n).map(move |a| (i, a)))
        .collect();
    let index: BTreeMap<(usize, usize), usize> = vars.iter().enumerate().map(|(v, &ia)| (ia, v)).collect();
    let tuples: Vec<Vec<usize>> = s.tuples().iter().cloned().collect();
    // tuples grouped by the last variable they depend on
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); vars.len() + 1];
    for (t, tup) in tuples.iter().enumerate() {
        let last = tup
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| index[&(i, a)] + 1)
            .max()
            .unwrap_or(0);
        ready[last].push(t);
    }
    let domain: Vec<i64> = match modulus {
        Some(m) => (0..m).collect(),
        None => (-bound..=bound).collect(),
    };
    let norm = |x: i64| match modulus {
        Some(m) => x.rem_euclid(m),
        None => x,
    };
    let eval = |vals: &[i64], t: &[usize]| -> i64 {
        norm(t.iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| vals[index[&(i, a)]])
            .sum())
    };
    struct Search<'a> {
        domain: &'a [i64],
        ready: &'a [Vec<usize>],
        tuples: &'a [Vec<usize>],
    }
    fn go(
        sr: &Search,
        eval: &dyn Fn(&[i64], &[usize]) -> i64,
        vals: &mut Vec<i64>,
        target: &mut Option<i64>,
    ) -> bool {
        let depth = vals.len();
        let saved = *target;
        for &t in &sr.ready[depth] {
            let v = eval(vals, &sr.tuples[t]);
            match *target {
                None => *target = Some(v),
                Some(c) if c != v => {
                    *target = saved;
                    return false;
                }
                _ => {}
            }
        }
        if depth + 1 == sr.ready.len() {
            let found = vals.iter().any(|&v| v != 0);
            *target = saved;
            return found;
        }
        for &d in sr.domain {
            vals.push(d);
            let hit = go(sr, eval, vals, target);
            vals.pop();
            if hit {
                *target = saved;
                return true;
            }
        }
        *target = saved;
        false
    }
    let sr = Search {
        domain: &domain,
        ready: &ready,
        tuples: &tuples,
    };
    go(&sr, &eval, &mut Vec::new(), &mut None)
}

fn random_support(rng: &mut ChaCha8Rng) -> SupportSet {
    loop {
        let k = rng.gen_range(2..=3);
        let mut sizes = vec![1usize; k];
        let extra = rng.gen_range(0..=(8 - k));
        for _ in 0..extra {
            let j = rng.gen_range(0..k);
            sizes[j] += 1;
        }
        let total: usize = sizes.iter().product();
        let density = rng.gen_range(0.2..0.9);
        let mut tuples = BTreeSet::new();
        for idx in 0..total {
            if rng.gen_bool(density) {
                let mut rest = idx;
                let mut t = vec![0; k];
                for c in (0..k).rev() {
                    t[c] = rest % sizes[c];
                    rest /= sizes[c];
                }
                tuples.insert(t);
            }
        }
        if !tuples.is_empty() {
            return SupportSet::new(&sizes, tuples).expect("valid support");
        }
    }
}

fn random_space(rng: &mut ChaCha8Rng, s: usize) -> ProbabilitySpace {
    let raw: Vec<i64> = (0..s).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    ProbabilitySpace::new(raw.iter().map(|&r| rat(r, total)).collect()).expect("valid measure")
}

/// Random game with the given question support, uniform-ish weights and a random predicate.
fn random_game(rng: &mut ChaCha8Rng, qsizes: &[usize], asizes: &[usize], support: &[Vec<usize>]) -> Game {
    let raw: Vec<i64> = support.iter().map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = raw.iter().sum();
    let dist = support.iter().zip(&raw).map(|(q, &r)| (q.clone(), rat(r, total))).collect();
    let qn: usize = qsizes.iter().product();
    let an: usize = asizes.iter().product();
    let table: Vec<bool> = (0..qn * an).map(|_| rng.gen_bool(0.6)).collect();
    let (qs, as_) = (qsizes.to_vec(), asizes.to_vec());
    Game::new(
        qsizes.iter().map(|&n| labels(n)).collect(),
        asizes.iter().map(|&n| labels(n)).collect(),
        dist,
        move |q, a| {
            let qi = q.iter().zip(&qs).fold(0, |acc, (&x, &n)| acc * n + x);
            let ai = a.iter().zip(&as_).fold(0, |acc, (&x, &n)| acc * n + x);
            table[qi * an + ai]
        },
    )
    .expect("valid game")
}

fn random_strategy(rng: &mut ChaCha8Rng, g: &Game) -> ProductStrategy {
    let tables = (0..g.players())
        .map(|j| {
            (0..g.question_sizes()[j])
                .map(|_| rng.gen_range(0..g.answer_sizes()[j]))
                .collect()
        })
        .collect();
    ProductStrategy::new(g, tables).expect("valid strategy")
}

fn random_event(rng: &mut ChaCha8Rng, g: &Game, density: f64) -> ProductEvent {
    loop {
        let sets = (0..g.players())
            .map(|j| (0..g.question_sizes()[j]).map(|_| rng.gen_bool(density)).collect())
            .collect();
        let e = ProductEvent::new(g, sets).expect("valid event");
        if !e.probability(g).is_zero() {
            return e;
        }
    }
}

fn all_pairs_game(rng: &mut ChaCha8Rng) -> Game {
    let support: Vec<Vec<usize>> = (0..4).map(|t| vec![t / 2, t % 2]).collect();
    random_game(rng, &[2, 2], &[2, 2], &support)
}

// ---------------------------------------------------------------------------
// criteria

fn classification() -> Outcome {
    let ghz = gallery::ghz().support_set();
    let r = classify(&ghz);
    ensure(r.pairwise_connected, "GHZ should be pairwise connected")?;
    ensure(r.connection_graph_edges == 0, "GHZ connection graph should be edgeless")?;
    let u = universal_embedding(&ghz).map_err(err)?;
    ensure(!u.trivial && verify_witness(&ghz, &u.embedding), "GHZ needs a non-trivial embedding")?;
    ensure(
        u.embedding.group.torsion_factors.iter().any(|d| (d % 2u32).is_zero()),
        "GHZ embedding is not Z/2-compatible",
    )?;
    ensure(check_marginal_condition(&ghz).map_err(err)?.holds, "GHZ marginal condition")?;

    let anti = gallery::anticorr().support_set();
    ensure(classify(&anti).pairwise_connected, "anti-correlation should be pairwise connected")?;
    let z = has_z_embedding(&anti).map_err(err)?.ok_or("anti-correlation has no Z witness")?;
    ensure(verify_witness(&anti, &z), "anti-correlation Z witness fails")?;
    ensure(check_marginal_condition(&anti).map_err(err)?.holds, "anti-correlation marginal condition")?;

    for (k, s) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
        let rect = SupportSet::rectangle(&vec![s; k]).map_err(err)?;
        ensure(universal_embedding(&rect).map_err(err)?.trivial, format!("rectangle [{s}]^{k} embeds"))?;
    }

    let diag = SupportSet::new(&[2, 2], [[0, 0], [1, 1]]).map_err(err)?;
    let (connected, part) = is_pairwise_connected(&diag);
    ensure(!connected, "diagonal should be disconnected")?;
    let part = part.ok_or("no bipartition reported")?;
    let w = bipartition_embedding_witness(&diag, &part).map_err(err)?;
    ensure(verify_witness(&diag, &w), "bipartition witness fails")?;
    Ok("GHZ, anti-correlation, rectangles, diagonal".into())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut disagreements = Vec::new();
    let mut nontrivial = 0;
    let mut with_z = 0;
    for t in 0..500 {
        let s = random_support(&mut rng);
        let u = universal_embedding(&s).map_err(err)?;
        let z = has_z_embedding(&s).map_err(err)?;
        if !u.trivial && !verify_witness(&s, &u.embedding) {
            return Err(format!("support {t}: universal witness fails"));
        }
        if let Some(w) = &z {
            if !verify_witness(&s, w) {
                return Err(format!("support {t}: Z witness fails"));
            }
        }
        let brute_z = brute_embedding(&s, None, 3);
        let brute_any = brute_z || (2..=12).any(|m| brute_embedding(&s, Some(m), 0));
        if brute_any != !u.trivial {
            disagreements.push(format!("{t}: lattice {} brute {}", !u.trivial, brute_any));
        }
        if brute_z != z.is_some() {
            disagreements.push(format!("{t}: lattice Z {} brute Z {}", z.is_some(), brute_z));
        }
        nontrivial += usize::from(!u.trivial);
        with_z += usize::from(z.is_some());
    }
    ensure(disagreements.is_empty(), format!("disagreements: {disagreements:?}"))?;
    Ok(format!("500 supports, {nontrivial} embeddable, {with_z} into Z, 0 disagreements"))
}

fn exact_values() -> Outcome {
    let ghz = gallery::ghz();
    let (v, _) = value(&ghz).map_err(err)?;
    ensure(*v.value() == rat(3, 4), format!("val(GHZ) = {:?}", v.value()))?;
    ensure(brute_value(&ghz) == rat(3, 4), "exhaustive val(GHZ) differs")?;
    let g2 = repeat_game(&ghz, 2).map_err(err)?;
    let (v2, s2) = value(&g2).map_err(err)?;
    let v2 = v2.into_inner();
    ensure(win_probability(&g2, &s2).map_err(err)?.into_inner() == v2, "optimal strategy does not attain value")?;
    ensure(rat(9, 16) <= v2 && v2 <= rat(3, 4), format!("val(GHZ^2) = {v2} out of range"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..50 {
        // player 1's question is a relabelling of player 0's
        let flip = rng.gen_bool(0.5);
        let pi = if flip { vec![1, 0] } else { vec![0, 1] };
        let support: Vec<Vec<usize>> = (0..4).map(|u| vec![u / 2, pi[u / 2], u % 2]).collect();
        let g = random_game(&mut rng, &[2, 2, 2], &[2, 2, 2], &support);
        let merged = merge_players(&g, 0, 1, &pi).map_err(err)?;
        let (a, b) = (value(&g).map_err(err)?.0.into_inner(), value(&merged).map_err(err)?.0.into_inner());
        ensure(a == b, format!("merge changed the value on game {t}: {a} vs {b}"))?;
        ensure(brute_value(&g) == a, format!("value search disagrees with enumeration on game {t}"))?;

        // player 2's question is fixed
        let c = rng.gen_range(0..2);
        let support: Vec<Vec<usize>> = (0..4).map(|u| vec![u / 2, u % 2, c]).collect();
        let g = random_game(&mut rng, &[2, 2, 2], &[2, 2, 2], &support);
        let reduced = eliminate_deterministic_player(&g, 2).map_err(err)?;
        let (a, b) = (value(&g).map_err(err)?.0.into_inner(), value(&reduced).map_err(err)?.0.into_inner());
        ensure(a == b, format!("elimination changed the value on game {t}: {a} vs {b}"))?;
    }
    Ok(format!("val(GHZ) = 3/4, val(GHZ^2) = {v2}, 100 reductions preserved"))
}

fn stability_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=6);
        let space = random_space(&mut rng, s);
        let f = FunctionTable::from_fn(space, n, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .map_err(err)?;
        let p = rng.gen_range(0.0..=1.0);
        let delta = rng.gen_range(0.0..1.0);
        let (l, r) = restriction_stability_identity_check(&f, p, delta).map_err(err)?;
        worst = worst.max((l - r).abs());
    }
    ensure(worst <= 1e-10, format!("float mode max gap {worst:e}"))?;
    for t in 0..200 {
        let s = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=4);
        let space = random_space(&mut rng, s);
        let len = s.pow(n as u32);
        let values = (0..len).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=7))).collect();
        let f = RationalTable::new(space, n, values).map_err(err)?;
        let p = rat(rng.gen_range(0..=8), 8);
        let delta = rat(rng.gen_range(1..=6), 7);
        let (l, r) = restriction_stability_identity_exact(&f, &p, &delta).map_err(err)?;
        ensure(l == r, format!("rational instance {t}: {l} vs {r}"))?;
    }
    Ok(format!("1000 float instances (max gap {worst:.1e}), 200 exact"))
}

fn schedule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::NEG_INFINITY;
    for t in 0..20 {
        let s = rng.gen_range(2..=3);
        let n = if s == 2 { 6 } else { 4 };
        let space = random_space(&mut rng, s);
        let f = FunctionTable::real(space, n, |_| rng.gen_range(-1.0..1.0)).map_err(err)?;
        let est = random_restriction_degree_schedule(&f, 0.5, 8, 0.5, 10_000, 100 + t).map_err(err)?;
        ensure(
            est.holds(),
            format!("function {t}: {} > {} + {}", est.probability, est.bound, est.radius),
        )?;
        worst = worst.max(est.probability - est.bound);
    }
    Ok(format!("20 functions, 10^4 trials each, max excess over 1/(ηT) {worst:.4}"))
}

fn grr_certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let s = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=4);
        let space = random_space(&mut rng, s);
        let p = rat(rng.gen_range(0..=4), 4);
        let r = GeneralizedRandomRestriction::plain_p_random(space, n, &p).map_err(err)?;
        ensure(r.epsilon().is_zero(), "plain restriction has ε > 0")?;
        ensure(grr_distribution_error(&r).map_err(err)?.is_zero(), "plain restriction error > 0")?;
    }
    let space = ProbabilitySpace::uniform(2);
    let k = 2;
    let sizes = [8usize, 16, 32, 64];
    let mut points = Vec::new();
    for (t, &size) in sizes.iter().enumerate() {
        let (mean, se) = pairing_error_mc(&space, size, k, 10_000, 60 + t as u64).map_err(err)?;
        let exact = to_f64(&pairing_error_exact(&space, size, k).map_err(err)?);
        ensure(
            (mean - exact).abs() <= 4.0 * se + 1e-12,
            format!("|S| = {size}: sampled {mean} vs exact {exact} (se {se})"),
        )?;
        points.push((size, mean));
    }
    ensure(
        points.windows(2).all(|w| w[1].1 < w[0].1),
        format!("error not decreasing: {points:?}"),
    )?;
    // smallest C with err ≤ C·k/√|S| at every size
    let c = points
        .iter()
        .map(|&(size, y)| y * (size as f64).sqrt() / k as f64)
        .fold(0.0f64, f64::max);
    Ok(format!(
        "plain ε = 0; pairing errors {:?}, C = {c:.3}",
        points.iter().map(|(_, y)| format!("{y:.4}")).collect::<Vec<_>>()
    ))
}

fn random_restriction(rng: &mut ChaCha8Rng, n: usize, s: usize) -> GeneralizedRestriction {
    let mut fixed = BTreeMap::new();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        if rng.gen_bool(0.25) {
            fixed.insert(i, rng.gen_range(0..s));
        } else {
            groups.entry(rng.gen_range(0..n)).or_default().push(i);
        }
    }
    GeneralizedRestriction::new(n, groups.into_values().collect(), fixed).expect("valid restriction")
}

fn event_mass(space: &ProbabilitySpace, n: usize, event: &[bool]) -> BigRational {
    let s = space.size();
    let mut total = BigRational::zero();
    for (x, &b) in event.iter().enumerate() {
        if b {
            let mut p = BigRational::one();
            let mut rest = x;
            for _ in 0..n {
                p *= &space.weights()[rest % s];
                rest /= s;
            }
            total += p;
        }
    }
    total
}

fn conditional() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut positive_eps = 0;
    for t in 0..200 {
        let s = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=if s == 2 { 5 } else { 4 });
        let space = random_space(&mut rng, s);
        let len = s.pow(n as u32);
        let event: Vec<bool> = loop {
            let e: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
            if e.iter().any(|&b| b) {
                break e;
            }
        };
        let pr_e = event_mass(&space, n, &event);
        let count = rng.gen_range(1..=4);
        let merged: Vec<GeneralizedRestriction> = (0..count).map(|_| random_restriction(&mut rng, n, s)).collect();
        let p = rat(rng.gen_range(0..=4), 4);
        let plain = GeneralizedRandomRestriction::plain_p_random(space.clone(), n, &p).map_err(err)?;
        // shrink the weight of the merging part until ε < Pr[E]
        let mut lambda = rat(1, 2);
        let r = loop {
            let mut entries: Vec<(GeneralizedRestriction, BigRational)> = plain
                .entries()
                .iter()
                .map(|(r, w)| (r.clone(), w * (BigRational::one() - &lambda)))
                .collect();
            entries.extend(merged.iter().map(|r| (r.clone(), &lambda / BigRational::from_integer(count.into()))));
            let r = GeneralizedRandomRestriction::new(space.clone(), n, entries).map_err(err)?;
            if r.epsilon() < &pr_e {
                break r;
            }
            lambda /= BigRational::from_integer(4.into());
        };
        let c = conditional_grr_property_check(&r, &event).map_err(err)?;
        ensure(c.holds(), format!("pair {t}: {c:?}"))?;
        positive_eps += usize::from(!r.epsilon().is_zero());
    }
    Ok(format!("200 pairs ({positive_eps} with ε > 0)"))
}

fn parity(n: usize) -> FunctionTable {
    FunctionTable::real(ProbabilitySpace::uniform(2), n, |x| {
        if x.iter().sum::<usize>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })
    .expect("valid table")
}

fn increment_uniformize() -> Outcome {
    let mut max_increments = 0;
    for seed in 0..100u64 {
        let n = [2, 4, 6][seed as usize % 3];
        let g = parity(n);
        let (grr, _) = increment_grr(&g, 0.5, seed).map_err(err)?;
        let mut total = BigRational::zero();
        for (rho, w) in grr.entries() {
            let h = apply_generalized(&g, rho).map_err(err)?;
            let v0 = h.values()[0];
            ensure(h.values().iter().all(|&v| v == v0), format!("seed {seed}: restricted parity not constant"))?;
            ensure(v0.norm_sqr() == 1.0, format!("seed {seed}: |μ|² = {}", v0.norm_sqr()))?;
            total += w;
        }
        ensure(total.is_one(), "restriction weights do not sum to one")?;

        let (_, rep) = uniformize(&[g], 0.1, 0.5, seed).map_err(err)?;
        ensure(rep.increments() <= 2, format!("seed {seed}: {} increments", rep.increments()))?;
        ensure(rep.monotone_within_slack(), format!("seed {seed}: potential dropped"))?;
        max_increments = max_increments.max(rep.increments());

        let dict = FunctionTable::real(ProbabilitySpace::uniform(2), 4, |x| if x[0] == 0 { 1.0 } else { -1.0 })
            .map_err(err)?;
        let (_, rep) = uniformize(&[parity(4), dict], 0.1, 0.5, seed).map_err(err)?;
        ensure(rep.monotone_within_slack(), format!("seed {seed}: mixed run potential dropped"))?;
    }
    Ok(format!("100 seeds, at most {max_increments} increments, potential monotone"))
}

fn information_increment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut drift = 0;
    let mut t = 0;
    let mut attempts = 0;
    while t < 200 {
        attempts += 1;
        if attempts > 2000 {
            return Err(format!("only {t} admissible instances constructed"));
        }
        let base = all_pairs_game(&mut rng);
        let n = rng.gen_range(2..=4);
        let g_rep = repeat_game(&base, n).map_err(err)?;
        let e = random_event(&mut rng, &g_rep, 0.6);
        let alpha = e.probability(&g_rep);
        let space = question_space(&base).map_err(err)?;
        let m = n - 1;
        let p = rat(rng.gen_range(0..=4), 4);
        let plain = GeneralizedRandomRestriction::plain_p_random(space.clone(), m, &p).map_err(err)?;
        let ri = if m >= 2 && rng.gen_bool(0.7) {
            let pairing = pairing_grr(space.clone(), m, &(0..m).collect::<Vec<_>>(), 2).map_err(err)?;
            let mut lambda = rat(1, 2);
            loop {
                let mut entries: Vec<(GeneralizedRestriction, BigRational)> = plain
                    .entries()
                    .iter()
                    .map(|(r, w)| (r.clone(), w * (BigRational::one() - &lambda)))
                    .collect();
                entries.extend(pairing.entries().iter().map(|(r, w)| (r.clone(), w * &lambda)));
                let r = GeneralizedRandomRestriction::new(space.clone(), m, entries).map_err(err)?;
                if r.epsilon() < &alpha {
                    break r;
                }
                lambda /= BigRational::from_integer(4.into());
            }
        } else {
            plain
        };
        let i = rng.gen_range(0..n);
        let c = information_increment_check(&g_rep, &e, &ri, i).map_err(err)?;
        ensure(c.holds, format!("instance {t}: {c:?}"))?;
        drift += usize::from(c.after > c.before);
        t += 1;
    }
    Ok(format!("200 instances, {drift} with a strict increment"))
}

fn chain() -> Outcome {
    let ghz = gallery::ghz();
    let g2 = repeat_game(&ghz, 2).map_err(err)?;
    let (v2, s) = value(&g2).map_err(err)?;
    let c = greedy_hard_chain(&g2, &s).map_err(err)?;
    ensure(c.win_probabilities[1] == *v2.value(), "Pr[W≤2] differs from val(GHZ^2)")?;

    let b = parrep_bound_from_criterion(1.0 / 16.0, 1.0, 2, 2).map_err(err)?;
    ensure((b - 0.5f64.sqrt()).abs() <= 1e-12, format!("bound {b} vs 2^(-1/2)"))?;
    // log2(2^12) / (2 log2 16) = 3/2
    let b = parrep_bound_from_criterion(2f64.powi(-12), 0.5, 2, 2).map_err(err)?;
    ensure((b - 0.75f64.powf(1.5)).abs() <= 1e-12, format!("bound {b} vs (3/4)^(3/2)"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let alpha_f = 2f64.powi(-20);
    let alpha = rat(1, 1 << 20);
    let mut certified = 0;
    let mut cases: Vec<(Game, ProductStrategy)> = vec![(g2.clone(), s)];
    for _ in 0..10 {
        cases.push((g2.clone(), random_strategy(&mut rng, &g2)));
    }
    for _ in 0..10 {
        let base = all_pairs_game(&mut rng);
        let g = repeat_game(&base, 3).map_err(err)?;
        let st = random_strategy(&mut rng, &g);
        cases.push((g, st));
    }
    for (g, st) in &cases {
        let (base, n) = g.repetition().expect("repeated");
        let m = criterion_chain_length(alpha_f, base.question_tuple_count(), base.answer_tuple_count()).min(n);
        let scan = criterion_hypothesis_scan(g, st, &alpha, EventFamily::ChainPrefixes).map_err(err)?;
        let ch = greedy_hard_chain(g, st).map_err(err)?;
        if scan.epsilon > BigRational::zero() {
            certified += 1;
            ensure(ch.decays(&scan.epsilon, m), format!("decay fails: {:?} with ε {}", ch.win_probabilities, scan.epsilon))?;
        }
    }
    Ok(format!(
        "Pr[W≤2] = {}, bound matches, decay on {certified}/{} certified cases",
        v2.value(),
        cases.len()
    ))
}

fn embedding_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = EmbeddingConfig::new(0.5, 3);
    let mut bases = vec![gallery::ghz(), gallery::anticorr()];
    for _ in 0..8 {
        bases.push(all_pairs_game(&mut rng));
    }
    let mut checked = 0;
    for base in &bases {
        let g2 = repeat_game(base, 2).map_err(err)?;
        for _ in 0..3 {
            let single = random_strategy(&mut rng, base);
            let oracle = brute_strategy_win(base, &single);
            let s = ProductStrategy::per_coordinate(&g2, &single).map_err(err)?;
            let rep = simulate_embedding_strategy(&g2, &s, &ProductEvent::full(&g2), &cfg).map_err(err)?;
            let ex = rep.exact.ok_or("exact mode returned no exact block")?;
            for pc in &ex.per_coordinate {
                ensure(pc.embedding_win == pc.target_win, format!("coordinate {}: embedding differs", pc.i))?;
                ensure(pc.target_win == oracle, format!("coordinate {}: target differs from oracle", pc.i))?;
            }
            ensure(ex.identity_holds() && ex.decomposition_holds(), "decomposition fails for independent play")?;

            let s = random_strategy(&mut rng, &g2);
            let e = random_event(&mut rng, &g2, 0.6);
            let rep = simulate_embedding_strategy(&g2, &s, &e, &cfg).map_err(err)?;
            let ex = rep.exact.ok_or("exact mode returned no exact block")?;
            ensure(ex.identity_holds(), "summation orders disagree")?;
            ensure(ex.decomposition_holds(), "loss exceeds the decomposition")?;
            checked += 2;
        }
    }
    Ok(format!("{checked} exact simulations at n = 2"))
}

/// Winning probability of a single-copy strategy by direct summation.
fn brute_strategy_win(g: &Game, s: &ProductStrategy) -> BigRational {
    let mut w = BigRational::zero();
    for (qi, p) in g.support() {
        let q = g.decode_questions(qi);
        let a: Vec<usize> = q.iter().enumerate().map(|(j, &x)| s.tables()[j][x]).collect();
        if g.wins(qi, g.encode_answers(&a)) {
            w += p;
        }
    }
    w
}

fn cnf_empirics() -> Outcome {
    let d = 8usize;
    let high = (4.0 * d as f64 * (d as f64).log2()).ceil() as usize;
    let freq = |m: usize| -> std::result::Result<f64, String> {
        let mut hits = 0;
        for seed in 0..200 {
            let g = gallery::random_3cnf(m, d, seed).map_err(err)?;
            hits += usize::from(classify(&g.support_set()).pairwise_connected);
        }
        Ok(hits as f64 / 200.0)
    };
    let lo = freq(d)?;
    let hi = freq(high)?;
    ensure(hi - lo >= 0.5, format!("frequency {hi} at m = {high} vs {lo} at m = {d}"))?;
    Ok(format!("m = {d}: {lo:.3}, m = {high}: {hi:.3}"))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("classification of examples", Duration::from_secs(1), classification),
        ("embedding oracle equivalence", Duration::from_secs(60), oracle_equivalence),
        ("exact values and reductions", Duration::from_secs(120), exact_values),
        ("restricted stability identity", Duration::from_secs(60), stability_identity),
        ("degree schedule", Duration::from_secs(60), schedule),
        ("GRR certificates", Duration::from_secs(120), grr_certificates),
        ("conditional GRR bounds", Duration::from_secs(60), conditional),
        ("increment and uniformization", Duration::from_secs(120), increment_uniformize),
        ("information increment", Duration::from_secs(60), information_increment),
        ("hard-coordinate chain", Duration::from_secs(60), chain),
        ("embedding strategy consistency", Duration::from_secs(60), embedding_consistency),
        ("random 3-CNF connectivity", Duration::from_secs(120), cnf_empirics),
    ];
    let mut failed = 0;
    for (idx, (name, budget, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", idx + 1, elapsed),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", idx + 1, elapsed);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
