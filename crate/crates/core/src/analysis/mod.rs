//! Analysis on product probability spaces: noise, stability, distances, and correlation
//! with product functions. Float arithmetic, with a rational path for exact identities.

mod distance;
mod function;
pub(crate) mod kernel;
mod kwise;
mod product;
mod pseudo;
mod space;

pub use distance::{kl_divergence, l1_distance, l1_distance_exact, marginal_drift_bound, DriftBound};
pub use function::{inner_product, noise_operator, stability, FunctionTable, RationalTable, TABLE_LIMIT};
pub use kwise::{independence_gap, k_wise_correlation, JointDistribution};
pub use product::{
    correlation_with_product, max_product_correlation, max_product_correlation_with, AscentConfig,
    AscentResult, ProductFunction,
};
pub use pseudo::{
    delta_grid, product_pseudorandomness_estimate, product_pseudorandomness_estimate_with, Centering,
    CorrelationWitness, DeltaEstimate, PseudorandomnessConfig, PseudorandomnessEstimate,
};
pub use pseudo::is_constant;
pub use space::ProbabilitySpace;
