//! Candidate generation, linear Q-learning over hashed text features,
//! softmax selection with a rejection loop, and morality shaping.

mod candidates;
pub mod features;
mod replay;
mod select;
mod shaping;
mod train;

pub use candidates::generate_candidates;
pub use features::{ActionTokens, ContextTokens, Features, QFunction};
pub use replay::{ReplayBuffer, Transition};
pub use select::{argmax, rejection_loop, select_action, softmax, Attempt, SelectionTrace};
pub use shaping::{
    shape_q, shape_q_soft, shape_reward, Judgement, ShapingConfig, ShapingMode, DEFAULT_GAMMA, DEFAULT_PENALTY,
};
pub use train::{evaluate, train, AgentConfig, DecisionStats, EpisodeSummary, EvalOutput, TrainOutput};

use crate::env::EnvError;
use crate::scorers::ScorerError;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("candidate set is empty")]
    NoCandidates,
    #[error("length mismatch: {0} values vs {1} flags")]
    LengthMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
}
