//! Game-facing constructions: indicator families, the single-copy embedding strategy,
//! information increments and the hard-coordinate chain.

mod chain;
mod context;
mod embed;
mod increment;
mod indicator;

pub use chain::{
    criterion_chain_length, criterion_hypothesis_scan, greedy_hard_chain, parrep_bound_from_criterion, ChainStep, EventFamily,
    HardCoordinateChain, HypothesisScan, ScannedEvent,
};
pub use context::{player_space, question_space};
pub use embed::{
    lambda_event_probability, simulate_embedding_strategy, CoordinateEmbedding, EmbeddingConfig, EmbeddingVariant,
    Estimate, ExactEmbedding, LambdaConfig, LambdaReport, SimulationReport,
};
pub use increment::{information_increment_check, IncrementCheck};
pub use indicator::{indicator_family, IndicatorFamily};
