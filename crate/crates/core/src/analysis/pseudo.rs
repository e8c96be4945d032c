//! Monte-Carlo estimate of product pseudorandomness.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::function::FunctionTable;
use super::kernel;
use super::product::{max_product_correlation_with, AscentConfig, ProductFunction};
use crate::error::{Error, Result};

/// Whether each sampled restriction is centered before correlating.
///
/// `None` is the literal definition. Under it every function whose restrictions are
/// eventually constant correlates with the constant product, so structured parts are
/// only visible after subtracting each restriction's mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Centering {
    None,
    PerRestriction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudorandomnessConfig {
    pub samples: usize,
    pub grid_points: usize,
    pub seed: u64,
    pub centering: Centering,
    pub ascent: AscentConfig,
    /// Width of the confidence radius in standard errors.
    pub z: f64,
    /// Correlating restrictions kept per grid point.
    pub keep_witnesses: usize,
    /// Skip the remaining grid points once one certifies failure.
    pub stop_on_certificate: bool,
}

impl Default for PseudorandomnessConfig {
    fn default() -> Self {
        PseudorandomnessConfig {
            samples: 200,
            grid_points: 8,
            seed: 0,
            centering: Centering::None,
            ascent: AscentConfig {
                restarts: 4,
                iterations: 100,
                ..AscentConfig::default()
            },
            z: 3.0,
            keep_witnesses: 0,
            stop_on_certificate: false,
        }
    }
}

/// A sampled restriction whose restricted function correlated with a product.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationWitness {
    /// `fixed[i]` is the value of a fixed coordinate, `None` if alive.
    pub fixed: Vec<Option<usize>>,
    pub value: f64,
    pub product: ProductFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub estimate: f64,
    pub radius: f64,
    pub samples: usize,
    pub witnesses: Vec<CorrelationWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudorandomnessEstimate {
    pub n_prime: usize,
    pub gamma: f64,
    pub seed: u64,
    pub per_delta: Vec<DeltaEstimate>,
    pub max_estimate: f64,
    /// First grid point with `estimate - radius >= gamma`.
    pub certified_delta: Option<f64>,
}

impl PseudorandomnessEstimate {
    pub fn not_pseudorandom(&self) -> bool {
        self.certified_delta.is_some()
    }
}

/// Geometric grid on `[n'/n, 1]`, descending from 1.
pub fn delta_grid(n: usize, n_prime: usize, points: usize) -> Vec<f64> {
    if n == 0 || n_prime >= n || points <= 1 {
        return vec![1.0];
    }
    // δ = 0 has no geometric neighbour, so the grid stops at 1/(16n)
    let lo = if n_prime == 0 {
        1.0 / (16.0 * n as f64)
    } else {
        n_prime as f64 / n as f64
    };
    let mut grid: Vec<f64> = (0..points)
        .map(|t| lo.powf(t as f64 / (points - 1) as f64))
        .collect();
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    grid
}

/// Samples `I ~_{1-δ} [n]`, `z ~ ν^I` and the restricted table.
pub(crate) fn sample_restriction<R: Rng>(
    f: &FunctionTable,
    delta: f64,
    rng: &mut R,
) -> (Vec<Option<usize>>, FunctionTable) {
    let fixed: Vec<Option<usize>> = (0..f.n())
        .map(|_| {
            if rng.gen::<f64>() < delta {
                None
            } else {
                Some(f.space().sample(rng))
            }
        })
        .collect();
    let alive = fixed.iter().filter(|x| x.is_none()).count();
    let vals = kernel::restrict(f.values(), f.alphabet_size(), &fixed);
    (fixed, f.with_values(alive, vals))
}

pub fn product_pseudorandomness_estimate(
    f: &FunctionTable,
    n_prime: usize,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<PseudorandomnessEstimate> {
    product_pseudorandomness_estimate_with(
        f,
        n_prime,
        gamma,
        &PseudorandomnessConfig {
            samples,
            seed,
            ..PseudorandomnessConfig::default()
        },
    )
}

/// Estimates, per grid point δ, the probability that a δ-random restriction of `f` is
/// γ-correlated with a product function, using one random stream per grid point.
pub fn product_pseudorandomness_estimate_with(
    f: &FunctionTable,
    n_prime: usize,
    gamma: f64,
    cfg: &PseudorandomnessConfig,
) -> Result<PseudorandomnessEstimate> {
    if n_prime > f.n() {
        return Err(Error::Precondition(format!("n' = {n_prime} exceeds n = {}", f.n())));
    }
    if gamma <= 0.0 {
        return Err(Error::Invalid("gamma must be positive".into()));
    }
    if cfg.samples == 0 {
        return Err(Error::Invalid("at least one sample is needed".into()));
    }
    let mut per_delta = Vec::new();
    for (t, delta) in delta_grid(f.n(), n_prime, cfg.grid_points).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t as u64);
        let mut hits = 0usize;
        let mut witnesses = Vec::new();
        for sample in 0..cfg.samples {
            let (fixed, mut g) = sample_restriction(f, delta, &mut rng);
            if cfg.centering == Centering::PerRestriction {
                g = g.centered();
            }
            let ascent = AscentConfig {
                seed: cfg.seed ^ ((t as u64) << 32 | sample as u64),
                target: Some(gamma),
                ..cfg.ascent
            };
            let r = max_product_correlation_with(&g, &ascent);
            if r.value >= gamma - 1e-12 {
                hits += 1;
                if witnesses.len() < cfg.keep_witnesses {
                    witnesses.push(CorrelationWitness {
                        fixed,
                        value: r.value,
                        product: r.product,
                    });
                }
            }
        }
        let p = hits as f64 / cfg.samples as f64;
        let radius = cfg.z * (p * (1.0 - p) / cfg.samples as f64).sqrt();
        per_delta.push(DeltaEstimate {
            delta,
            estimate: p,
            radius,
            samples: cfg.samples,
            witnesses,
        });
        if cfg.stop_on_certificate && p - radius >= gamma {
            break;
        }
    }
    let max_estimate = per_delta.iter().map(|d| d.estimate).fold(0.0, f64::max);
    let certified_delta = per_delta
        .iter()
        .find(|d| d.estimate - d.radius >= gamma)
        .map(|d| d.delta);
    Ok(PseudorandomnessEstimate {
        n_prime,
        gamma,
        seed: cfg.seed,
        per_delta,
        max_estimate,
        certified_delta,
    })
}

/// Whether `f` is constant up to `tol`.
pub fn is_constant(f: &FunctionTable, tol: f64) -> bool {
    let first = f.values().first().copied().unwrap_or(Complex64::new(0.0, 0.0));
    f.values().iter().all(|v| (v - first).norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ProbabilitySpace;

    fn parity_on(n: usize, coords: usize) -> FunctionTable {
        FunctionTable::real(ProbabilitySpace::uniform(2), n, |x| {
            if x[..coords].iter().sum::<usize>() % 2 == 0 { 1.0 } else { -1.0 }
        })
        .unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = delta_grid(8, 2, 8);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 1.0);
        assert!((g[7] - 0.25).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(delta_grid(8, 8, 8), vec![1.0]);
    }

    #[test]
    fn full_parity_always_correlates() {
        let e = product_pseudorandomness_estimate(&parity_on(6, 6), 1, 0.5, 100, 3).unwrap();
        assert!(e.per_delta.iter().all(|d| d.estimate == 1.0));
        assert!(e.not_pseudorandom());
    }

    #[test]
    fn zero_never_correlates() {
        let z = FunctionTable::constant(ProbabilitySpace::uniform(2), 4, Complex64::new(0.0, 0.0)).unwrap();
        let e = product_pseudorandomness_estimate(&z, 1, 0.1, 50, 0).unwrap();
        assert_eq!(e.max_estimate, 0.0);
        assert!(!e.not_pseudorandom());
    }

    #[test]
    fn half_parity_matches_survival_probability() {
        // centered restrictions correlate iff some parity coordinate stays alive
        let (n, h) = (8, 4);
        let f = parity_on(n, h);
        let cfg = PseudorandomnessConfig {
            samples: 4000,
            grid_points: 4,
            seed: 7,
            centering: Centering::PerRestriction,
            ..PseudorandomnessConfig::default()
        };
        let e = product_pseudorandomness_estimate_with(&f, 1, 0.5, &cfg).unwrap();
        for d in &e.per_delta {
            let want = 1.0 - (1.0 - d.delta).powi(h as i32);
            let se = (want * (1.0 - want) / 4000.0).sqrt();
            assert!((d.estimate - want).abs() <= 4.0 * se + 1e-12, "{d:?} vs {want}");
        }
    }

    #[test]
    fn errors() {
        let f = parity_on(3, 3);
        assert!(product_pseudorandomness_estimate(&f, 4, 0.5, 10, 0).is_err());
        assert!(product_pseudorandomness_estimate(&f, 1, 0.0, 10, 0).is_err());
    }
}
