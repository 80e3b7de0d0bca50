//! Morality-annotated text-adventure environments and shaping agents.

pub mod agent;
pub mod annotation;
pub mod engine;
pub mod env;
pub mod metrics;
pub mod scorers;
mod seeding;
pub mod suite;

pub use annotation::{Category, Degrees, MoralAnnotation};
pub use engine::{GameState, StepOutcome, WorldModel};
pub use env::{Env, EnvConfig, EpisodeLog};
pub use seeding::derive_seed;
