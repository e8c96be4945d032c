//! Correlation with bounded product functions and its coordinate-ascent maximizer.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::function::FunctionTable;
use crate::error::{Error, Result};

/// `P(x) = Π_i P_i(x_i)` with every `|P_i| <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductFunction {
    factors: Vec<Vec<Complex64>>,
}

impl ProductFunction {
    pub fn new(factors: Vec<Vec<Complex64>>) -> Result<Self> {
        if factors.iter().flatten().any(|z| z.norm() > 1.0 + 1e-12) {
            return Err(Error::Invalid("product factor exceeds modulus 1".into()));
        }
        Ok(ProductFunction { factors })
    }

    pub fn ones(n: usize, s: usize) -> Self {
        ProductFunction {
            factors: vec![vec![Complex64::new(1.0, 0.0); s]; n],
        }
    }

    /// `P_i(a) = exp(2πi v_i(a))`.
    pub fn from_phases(phases: &[Vec<f64>]) -> Self {
        ProductFunction {
            factors: phases
                .iter()
                .map(|v| v.iter().map(|&t| Complex64::from_polar(1.0, TAU * t)).collect())
                .collect(),
        }
    }

    pub fn factors(&self) -> &[Vec<Complex64>] {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    /// Phases in `[0, 1)`.
    pub fn phases(&self) -> Vec<Vec<f64>> {
        self.factors
            .iter()
            .map(|p| p.iter().map(|z| (z.arg() / TAU).rem_euclid(1.0)).collect())
            .collect()
    }

    pub fn is_unit_modulus(&self, tol: f64) -> bool {
        self.factors.iter().flatten().all(|z| (z.norm() - 1.0).abs() <= tol)
    }

    pub fn evaluate(&self, x: &[usize]) -> Complex64 {
        x.iter().enumerate().map(|(i, &a)| self.factors[i][a]).product()
    }

    pub fn conj(&self) -> Self {
        ProductFunction {
            factors: self.factors.iter().map(|p| p.iter().map(|z| z.conj()).collect()).collect(),
        }
    }
}

fn weighted(f: &FunctionTable, p: &ProductFunction) -> Vec<Vec<Complex64>> {
    let w = f.space().shadow();
    p.factors
        .iter()
        .map(|pi| pi.iter().zip(w).map(|(z, &wa)| z * wa).collect())
        .collect()
}

fn check(f: &FunctionTable, p: &ProductFunction) -> Result<()> {
    if p.n() != f.n() || p.factors.iter().any(|pi| pi.len() != f.alphabet_size()) {
        return Err(Error::Invalid("product function does not match the table".into()));
    }
    Ok(())
}

/// `E_{x ~ ν^n}[f(x) Π_i P_i(x_i)]`.
pub fn correlation_with_product(f: &FunctionTable, p: &ProductFunction) -> Result<Complex64> {
    check(f, p)?;
    let u = weighted(f, p);
    let s = f.alphabet_size();
    let mut cur = f.values().to_vec();
    for c in (0..f.n()).rev() {
        cur = cur
            .chunks(s)
            .map(|ch| ch.iter().zip(&u[c]).map(|(v, x)| v * x).sum())
            .collect();
    }
    Ok(cur[0])
}

/// Multilinear coefficient of `P_i(a)` in the correlation.
fn coefficient(f: &FunctionTable, u: &[Vec<Complex64>], i: usize) -> Vec<Complex64> {
    let s = f.alphabet_size();
    let n = f.n();
    let mut cur = f.values().to_vec();
    for c in (i + 1..n).rev() {
        cur = cur
            .chunks(s)
            .map(|ch| ch.iter().zip(&u[c]).map(|(v, x)| v * x).sum())
            .collect();
    }
    for uc in u.iter().take(i) {
        let stride = cur.len() / s;
        let mut next = vec![Complex64::new(0.0, 0.0); stride];
        for (a, x) in uc.iter().enumerate() {
            for (j, nv) in next.iter_mut().enumerate() {
                *nv += x * cur[a * stride + j];
            }
        }
        cur = next;
    }
    let w = f.space().shadow();
    cur.iter().zip(w).map(|(v, &wa)| v * wa).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AscentConfig {
    pub restarts: usize,
    pub iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Stop as soon as some restart reaches this value.
    pub target: Option<f64>,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            restarts: 8,
            iterations: 200,
            tolerance: 1e-9,
            seed: 0,
            target: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AscentResult {
    pub value: f64,
    pub product: ProductFunction,
    /// Per-sweep values of the winning restart, starting with its initial value.
    pub trace: Vec<f64>,
    pub restart: usize,
}

fn ascend(f: &FunctionTable, mut p: ProductFunction, cfg: &AscentConfig) -> (f64, ProductFunction, Vec<f64>) {
    let mut value = correlation_with_product(f, &p).expect("shapes checked").norm();
    let mut trace = vec![value];
    for _ in 0..cfg.iterations {
        for i in 0..f.n() {
            let u = weighted(f, &p);
            let c = coefficient(f, &u, i);
            for (a, ca) in c.iter().enumerate() {
                let r = ca.norm();
                // zero coefficients keep their phase
                if r > 1e-15 {
                    p.factors[i][a] = ca.conj() / r;
                }
            }
        }
        let next = correlation_with_product(f, &p).expect("shapes checked").norm();
        trace.push(next);
        let gain = next - value;
        value = value.max(next);
        if gain < cfg.tolerance {
            break;
        }
    }
    (value, p, trace)
}

/// Lower bound on `max_P |E[f P]|` over unit-modulus product functions.
pub fn max_product_correlation(f: &FunctionTable, restarts: usize, iterations: usize) -> (f64, ProductFunction) {
    let r = max_product_correlation_with(
        f,
        &AscentConfig {
            restarts,
            iterations,
            ..AscentConfig::default()
        },
    );
    (r.value, r.product)
}

/// Uniform-phase start, then seeded random-phase restarts on per-restart streams.
pub fn max_product_correlation_with(f: &FunctionTable, cfg: &AscentConfig) -> AscentResult {
    let s = f.alphabet_size();
    let n = f.n();
    let mut best: Option<AscentResult> = None;
    for r in 0..cfg.restarts.max(1) {
        let start = if r == 0 {
            ProductFunction::ones(n, s)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let phases: Vec<Vec<f64>> = (0..n).map(|_| (0..s).map(|_| rng.gen::<f64>()).collect()).collect();
            ProductFunction::from_phases(&phases)
        };
        let (value, product, trace) = ascend(f, start, cfg);
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(AscentResult {
                value,
                product,
                trace,
                restart: r,
            });
        }
        if cfg.target.is_some_and(|t| value >= t) {
            break;
        }
    }
    best.expect("at least one restart")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ProbabilitySpace;
    use rand::Rng;

    fn random_f(space: ProbabilitySpace, n: usize, seed: u64) -> FunctionTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FunctionTable::from_fn(space, n, |_| {
            Complex64::from_polar(rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>())
        })
        .unwrap()
    }

    #[test]
    fn product_function_against_its_conjugate() {
        let p = ProductFunction::from_phases(&[vec![0.1, 0.7, 0.3], vec![0.0, 0.25, 0.5]]);
        let f = FunctionTable::from_fn(ProbabilitySpace::uniform(3), 2, |x| p.evaluate(x)).unwrap();
        let c = correlation_with_product(&f, &p.conj()).unwrap();
        assert!((c - 1.0).norm() < 1e-14);
    }

    #[test]
    fn parity_reaches_one() {
        let f = FunctionTable::real(ProbabilitySpace::uniform(2), 5, |x| {
            if x.iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 }
        })
        .unwrap();
        let (v, p) = max_product_correlation(&f, 8, 200);
        assert!((v - 1.0).abs() < 1e-9);
        assert!(p.is_unit_modulus(1e-12));
    }

    #[test]
    fn rejects_oversized_factors() {
        assert!(ProductFunction::new(vec![vec![Complex64::new(1.5, 0.0)]]).is_err());
    }

    #[test]
    fn ascent_matches_phase_grid_oracle() {
        for seed in 0..4 {
            let f = random_f(ProbabilitySpace::uniform(2), 2, seed);
            let (v, _) = max_product_correlation(&f, 8, 200);
            // global phase is free, so one entry is pinned to 1
            let grid: Vec<Complex64> = (0..64).map(|t| Complex64::from_polar(1.0, TAU * t as f64 / 64.0)).collect();
            let one = Complex64::new(1.0, 0.0);
            let mut best = 0.0f64;
            for &b in &grid {
                for &c in &grid {
                    for &d in &grid {
                        let p = ProductFunction::new(vec![vec![one, b], vec![c, d]]).unwrap();
                        best = best.max(correlation_with_product(&f, &p).unwrap().norm());
                    }
                }
            }
            assert!(v >= best - 1e-3, "seed {seed}: ascent {v} vs grid {best}");
        }
    }

    #[test]
    fn ascent_is_monotone_and_beats_the_mean() {
        for seed in 0..20 {
            let space = ProbabilitySpace::uniform(3);
            let f = random_f(space, 3, 100 + seed);
            let r = max_product_correlation_with(&f, &AscentConfig { seed, ..AscentConfig::default() });
            assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
            assert!(r.value >= f.mean().norm() - 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let f = random_f(ProbabilitySpace::uniform(2), 4, 8);
        let cfg = AscentConfig { seed: 5, ..AscentConfig::default() };
        assert_eq!(max_product_correlation_with(&f, &cfg), max_product_correlation_with(&f, &cfg));
    }
}
