//! Parallel repetition of multiplayer games: structural classification of supports,
//! abelian embeddings, random restrictions and an exact lab for small repeated games.

mod util;

pub mod abelian;
pub mod analysis;
pub mod error;
pub mod gallery;
pub mod game;
pub mod lab;
pub mod rational;
pub mod restrictions;
pub mod structure;

pub use error::{Error, Result};
pub use game::{repeat_game, value, Game, ProductEvent, ProductStrategy};
pub use rational::RationalProbability;
pub use structure::{classify, Bipartition, StructureReport, SupportSet};
