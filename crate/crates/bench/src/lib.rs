//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use conscience::engine::{step, GameState};
use conscience::suite::load_game;
use conscience::WorldModel;

/// A bundled game with its state after replaying `prefix` walkthrough actions,
/// plus the next walkthrough action.
pub fn mid_game(id: &str, prefix: usize) -> (Arc<WorldModel>, GameState, String) {
    let world = load_game(id).unwrap_or_else(|| panic!("unknown game {id}"));
    let mut state = GameState::initial(&world);
    let prefix = prefix.min(world.walkthrough.len() - 1);
    for a in &world.walkthrough[..prefix] {
        step(&world, &mut state, a).expect("walkthrough step");
    }
    let next = world.walkthrough[prefix].clone();
    (world, state, next)
}
