//! Text-adventure engine: script compiler, world model, and step semantics.

mod actions;
mod command;
mod script;
mod snapshot;
mod state;
mod step;
mod validate;
pub mod world;

pub use actions::{is_movement, valid_actions};
pub use command::{normalize_action, normalize_words, parse_command, Command};
pub use script::{parse_script, Diagnostic, ScriptError};
pub use snapshot::{object_tree_snapshot, restore, Snapshot, SnapshotRecord};
pub use state::{Ending, GameState, ObjectState};
pub use step::{
    describe_inventory, describe_room, replay, step, StepOutcome, ATTEMPT_REPLY, INVALID_REPLY,
};
pub use validate::validate_world;
pub use world::{Direction, Location, ObjectId, RoomId, WorldModel};

pub(crate) use step::{execute, may_annotate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("episode is already done")]
    EpisodeDone,
    #[error("replay failed at step {step} ('{action}'): {reason}")]
    Replay {
        step: usize,
        action: String,
        reason: String,
    },
    #[error("bad snapshot: {0}")]
    Snapshot(String),
}

/// Clones a state; provided for symmetry with the lookahead API.
pub fn clone_state(state: &GameState) -> GameState {
    state.clone()
}
