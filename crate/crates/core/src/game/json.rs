//! JSON game format and report-style validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Game;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub q: Vec<String>,
    pub p: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateRow {
    pub q: Vec<String>,
    pub a: Vec<String>,
    pub win: bool,
}

/// On-disk game description. Omitted predicate rows lose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameJson {
    pub players: usize,
    pub questions: Vec<Vec<String>>,
    pub answers: Vec<Vec<String>>,
    pub distribution: Vec<DistributionRow>,
    #[serde(default)]
    pub predicate: Vec<PredicateRow>,
}

/// How rows missing from the predicate list are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredicatePolicy {
    /// The file format convention.
    MissingRowsLose,
    /// Every (question, answer) pair must be listed.
    RequireTotal,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn index_of(alph: &[String]) -> HashMap<&str, usize> {
    alph.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}

struct Checked {
    dist: Vec<(Vec<usize>, BigRational)>,
    wins: BTreeMap<(Vec<usize>, Vec<usize>), bool>,
}

fn check(raw: &GameJson, policy: PredicatePolicy) -> (ValidationReport, Checked) {
    let mut v = Vec::new();
    let k = raw.players;
    if k == 0 {
        v.push("players must be positive".to_string());
    }
    if raw.questions.len() != k {
        v.push(format!("{} question alphabets for {k} players", raw.questions.len()));
    }
    if raw.answers.len() != k {
        v.push(format!("{} answer alphabets for {k} players", raw.answers.len()));
    }
    for (kind, alphs) in [("question", &raw.questions), ("answer", &raw.answers)] {
        for (j, a) in alphs.iter().enumerate() {
            if a.is_empty() {
                v.push(format!("{kind} alphabet of player {j} is empty"));
            }
            let uniq: BTreeSet<&String> = a.iter().collect();
            if uniq.len() != a.len() {
                v.push(format!("{kind} alphabet of player {j} repeats a label"));
            }
        }
    }
    let qidx: Vec<_> = raw.questions.iter().map(|a| index_of(a)).collect();
    let aidx: Vec<_> = raw.answers.iter().map(|a| index_of(a)).collect();
    let lookup = |maps: &[HashMap<&str, usize>], labels: &[String], what: &str, v: &mut Vec<String>| {
        if labels.len() != maps.len() {
            v.push(format!("{what} {labels:?} has arity {}, expected {}", labels.len(), maps.len()));
            return None;
        }
        let mut out = Vec::with_capacity(labels.len());
        for (j, l) in labels.iter().enumerate() {
            match maps[j].get(l.as_str()) {
                Some(&x) => out.push(x),
                None => {
                    v.push(format!("dangling label '{l}' for player {j} in {what} {labels:?}"));
                    return None;
                }
            }
        }
        Some(out)
    };

    let mut dist = Vec::new();
    let mut seen = BTreeSet::new();
    let mut total = BigRational::zero();
    for row in &raw.distribution {
        let p = match parse_rational(&row.p) {
            Ok(p) => p,
            Err(e) => {
                v.push(e.to_string());
                continue;
            }
        };
        if p.is_negative() {
            v.push(format!("negative probability {} at {:?}", row.p, row.q));
        }
        total += &p;
        if let Some(q) = lookup(&qidx, &row.q, "distribution row", &mut v) {
            if !seen.insert(q.clone()) {
                v.push(format!("duplicate distribution row {:?}", row.q));
            }
            dist.push((q, p));
        }
    }
    if !total.is_one() {
        v.push(format!("mass {} != 1", format_rational(&total)));
    }

    let mut wins = BTreeMap::new();
    for row in &raw.predicate {
        let q = lookup(&qidx, &row.q, "predicate row", &mut v);
        let a = lookup(&aidx, &row.a, "predicate row", &mut v);
        if let (Some(q), Some(a)) = (q, a) {
            if wins.insert((q, a), row.win).is_some() {
                v.push(format!("duplicate predicate row {:?} {:?}", row.q, row.a));
            }
        }
    }
    if policy == PredicatePolicy::RequireTotal && v.is_empty() {
        let q_total: usize = raw.questions.iter().map(Vec::len).product();
        let a_total: usize = raw.answers.iter().map(Vec::len).product();
        if wins.len() != q_total * a_total {
            v.push(format!(
                "predicate not total: {} of {} rows given",
                wins.len(),
                q_total * a_total
            ));
        }
    }
    (ValidationReport { violations: v }, Checked { dist, wins })
}

/// Report-style validation: lists every violation instead of stopping at the first.
pub fn validate_game(raw: &GameJson, policy: PredicatePolicy) -> ValidationReport {
    check(raw, policy).0
}

impl Game {
    /// Builds a game from its JSON description (missing predicate rows lose).
    pub fn from_json(raw: &GameJson) -> Result<Game> {
        let (report, checked) = check(raw, PredicatePolicy::MissingRowsLose);
        if !report.ok() {
            return Err(Error::Invalid(report.violations.join("; ")));
        }
        let wins = checked.wins;
        Game::new(
            raw.questions.clone(),
            raw.answers.clone(),
            checked.dist,
            |q, a| wins.get(&(q.to_vec(), a.to_vec())).copied().unwrap_or(false),
        )
    }

    /// JSON form listing only winning predicate rows.
    pub fn to_json(&self) -> GameJson {
        let k = self.players();
        let label_q = |q: &[usize]| -> Vec<String> {
            (0..k).map(|j| self.questions[j][q[j]].clone()).collect()
        };
        let distribution = self
            .support()
            .map(|(qi, p)| DistributionRow {
                q: label_q(&self.decode_questions(qi)),
                p: format_rational(p),
            })
            .collect();
        let mut predicate = Vec::new();
        for qi in 0..self.question_tuple_count() {
            let q = self.decode_questions(qi);
            for ai in 0..self.answer_tuple_count() {
                if self.wins(qi, ai) {
                    let a = self.decode_answers(ai);
                    predicate.push(PredicateRow {
                        q: label_q(&q),
                        a: (0..k).map(|j| self.answers[j][a[j]].clone()).collect(),
                        win: true,
                    });
                }
            }
        }
        GameJson {
            players: k,
            questions: self.questions.clone(),
            answers: self.answers.clone(),
            distribution,
            predicate,
        }
    }
}

/// Parses and validates a JSON game.
pub fn parse_game(text: &str) -> Result<Game> {
    let raw: GameJson =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed game JSON: {e}")))?;
    Game::from_json(&raw)
}
