//! Command handlers. Each returns the `results` object of the report.

use std::collections::BTreeMap;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use parrep_core::abelian::{
    bipartition_embedding_witness, check_marginal_condition, has_z_embedding, universal_embedding,
};
use parrep_core::analysis::{FunctionTable, ProbabilitySpace};
use parrep_core::game::{validate_game, value_with, GameJson, PredicatePolicy, ValueConfig};
use parrep_core::lab::{
    criterion_chain_length, criterion_hypothesis_scan, greedy_hard_chain, parrep_bound_from_criterion,
    simulate_embedding_strategy, EmbeddingConfig, EventFamily,
};
use parrep_core::rational::{format_rational, parse_rational, to_f64};
use parrep_core::restrictions::uniformize;
use parrep_core::{classify, gallery, repeat_game, value, Game, ProductEvent};

use crate::report::{Failure, Inputs};
use crate::Command;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Full,
    SingleFixings,
    ChainPrefixes,
}

impl From<Family> for EventFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Full => EventFamily::Full,
            Family::SingleFixings => EventFamily::SingleFixings,
            Family::ChainPrefixes => EventFamily::ChainPrefixes,
        }
    }
}

fn read(path: &str, inputs: &mut Inputs) -> Result<String, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {path}: {e}")))?;
    inputs.add("file", text.as_bytes());
    Ok(text)
}

/// Resolves `gallery:<name>` or a JSON file; file problems come back with the validation report.
fn load_game(reference: &str, inputs: &mut Inputs) -> Result<Game, Failure> {
    let game = if let Some(name) = reference.strip_prefix("gallery:") {
        gallery::by_name(name)?
    } else {
        let text = read(reference, inputs)?;
        let raw: GameJson = serde_json::from_str(&text)?;
        let report = validate_game(&raw, PredicatePolicy::MissingRowsLose);
        if !report.ok() {
            return Err(Failure::invalid("game failed validation").with_detail(json!({ "validation": report })));
        }
        Game::from_json(&raw)?
    };
    let canonical = serde_json::to_vec(&game.to_json())?;
    inputs.add("game", &canonical);
    Ok(game)
}

fn repeated(g: &Game, n: usize) -> Result<Game, Failure> {
    if n == 0 {
        return Err(Failure::invalid("--repeat must be at least 1"));
    }
    Ok(repeat_game(g, n)?)
}

pub fn run(cmd: &Command, inputs: &mut Inputs) -> Result<Value, Failure> {
    match cmd {
        Command::Classify { game } => classify_cmd(&load_game(game, inputs)?),
        Command::Value { game, repeat, cap } => {
            let g = repeated(&load_game(game, inputs)?, *repeat)?;
            let mut cfg = ValueConfig::default();
            if let Some(c) = cap {
                cfg.cap = *c;
            }
            let (v, s) = value_with(&g, &cfg)?;
            Ok(json!({
                "repeat": repeat,
                "value": format_rational(v.value()),
                "value_f64": v.to_f64(),
                "strategy": s.to_labels(&g),
            }))
        }
        Command::Chain { game, repeat, alpha, family } => {
            let base = load_game(game, inputs)?;
            chain_cmd(&base, *repeat, alpha, *family)
        }
        Command::SimulateEmbed {
            game,
            repeat,
            event,
            exact,
            delta,
            t,
            trials,
            seed,
        } => {
            let g = repeated(&load_game(game, inputs)?, *repeat)?;
            let labels: Vec<Vec<String>> = serde_json::from_str(&read(event, inputs)?)?;
            let e = ProductEvent::from_labels(&g, &labels)?;
            let (_, s) = value(&g)?;
            let mut cfg = EmbeddingConfig::new(*delta, *t);
            cfg.exact = *exact;
            cfg.trials = *trials;
            cfg.seed = *seed;
            if !exact {
                inputs.seed(*seed);
            }
            let rep = simulate_embedding_strategy(&g, &s, &e, &cfg)?;
            Ok(json!({ "strategy": s.to_labels(&g), "report": rep }))
        }
        Command::Uniformize {
            functions,
            delta,
            gamma,
            seed,
        } => {
            let text = read(functions, inputs)?;
            inputs.seed(*seed);
            uniformize_cmd(&text, *delta, *gamma, *seed)
        }
        Command::Gallery { name, params, .. } => {
            let full = std::iter::once(name.as_str())
                .chain(params.iter().map(String::as_str))
                .collect::<Vec<_>>()
                .join("-");
            let g = gallery::by_name(&full)?;
            let raw = g.to_json();
            Ok(json!({
                "name": full,
                "validation": validate_game(&raw, PredicatePolicy::MissingRowsLose),
                "game": raw,
            }))
        }
    }
}

fn classify_cmd(g: &Game) -> Result<Value, Failure> {
    let s = g.support_set();
    let structure = classify(&s);
    let universal = universal_embedding(&s)?;
    let z = has_z_embedding(&s)?;
    let marginal = check_marginal_condition(&s)?;
    let bipartition_witness = match &structure.bipartition {
        Some(b) => Some(bipartition_embedding_witness(&s, b)?),
        None => None,
    };
    Ok(json!({
        "structure": structure,
        "embedding": {
            "trivial": universal.trivial,
            "universal": universal,
            "z_witness": z,
            "bipartition_witness": bipartition_witness,
        },
        "marginal_condition": marginal,
    }))
}

fn chain_cmd(base: &Game, n: usize, alpha: &str, family: Family) -> Result<Value, Failure> {
    let g = repeated(base, n)?;
    let alpha_r = parse_rational(alpha)?;
    let (v, s) = value(&g)?;
    let chain = greedy_hard_chain(&g, &s)?;
    let scan = criterion_hypothesis_scan(&g, &s, &alpha_r, family.into())?;
    let (qs, as_) = (base.question_tuple_count(), base.answer_tuple_count());
    let alpha_f = to_f64(&alpha_r);
    let m = criterion_chain_length(alpha_f, qs, as_).min(n);
    let certified = scan.epsilon > num_traits::Zero::zero();
    let (bound, decays) = if certified {
        let eps = to_f64(&scan.epsilon);
        (Some(parrep_bound_from_criterion(alpha_f, eps, qs, as_)?), Some(chain.decays(&scan.epsilon, m)))
    } else {
        (None, None)
    };
    Ok(json!({
        "repeat": n,
        "value": format_rational(v.value()),
        "chain": chain,
        "scan": scan,
        "m": m,
        "certified": certified,
        "bound": bound,
        "decay_holds": decays,
    }))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionsFile {
    n: usize,
    /// Rational weights of the base measure; uniform over `alphabet` when absent.
    #[serde(default)]
    weights: Option<Vec<String>>,
    #[serde(default)]
    alphabet: Option<usize>,
    functions: Vec<Vec<Entry>>,
}

fn uniformize_cmd(text: &str, delta: f64, gamma: f64, seed: u64) -> Result<Value, Failure> {
    let file: FunctionsFile = serde_json::from_str(text)?;
    let space = match (&file.weights, file.alphabet) {
        (Some(w), _) => ProbabilitySpace::new(w.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?)?,
        (None, Some(s)) if s > 0 => ProbabilitySpace::uniform(s),
        _ => return Err(Failure::invalid("functions file needs `weights` or a positive `alphabet`")),
    };
    let tables = file
        .functions
        .iter()
        .map(|vals| {
            let v = vals
                .iter()
                .map(|e| match e {
                    Entry::Real(r) => Complex64::new(*r, 0.0),
                    Entry::Complex([re, im]) => Complex64::new(*re, *im),
                })
                .collect();
            FunctionTable::new(space.clone(), file.n, v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (grr, rep) = uniformize(&tables, delta, gamma, seed)?;
    let mut sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for (rho, _) in grr.entries() {
        *sizes.entry(rho.m()).or_default() += 1;
    }
    Ok(json!({
        "report": rep,
        "restrictions": grr.entries().len(),
        "free_coordinates": sizes,
        "epsilon": format_rational(grr.epsilon()),
        "grr": grr,
    }))
}
