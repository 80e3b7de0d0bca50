use rand::seq::index;

use crate::engine::{valid_actions, Direction, GameState, WorldModel};
use crate::seeding::rng_for;

/// Samples `k` actions from the valid-action set, uniformly without
/// replacement, always keeping every movement that has an exit. When the
/// valid set has at most `k` entries it is returned whole.
pub fn generate_candidates(world: &WorldModel, state: &GameState, k: usize, seed: u64) -> Vec<String> {
    let valid = valid_actions(world, state);
    if valid.len() <= k {
        return valid;
    }
    let room = world.room(state.room);
    let open: Vec<&str> = Direction::ALL
        .iter()
        .filter(|d| room.exit(**d).is_some())
        .map(|d| d.word())
        .collect();
    let is_move = |a: &str| Direction::ALL.iter().any(|d| d.word() == a);
    let pool: Vec<&String> = valid.iter().filter(|a| !is_move(a)).collect();

    let quota = k.saturating_sub(open.len()).min(pool.len());
    let mut rng = rng_for(seed);
    let mut picked = index::sample(&mut rng, pool.len(), quota).into_vec();
    picked.sort_unstable();

    let mut out: Vec<String> = picked.into_iter().map(|i| pool[i].clone()).collect();
    out.extend(open.into_iter().map(str::to_string));
    out
}
