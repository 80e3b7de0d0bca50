use crate::engine::actions::valid_actions;
use crate::engine::command::parse_command;
use crate::engine::script::Diagnostic;
use crate::engine::state::GameState;
use crate::engine::step::{reachable_rooms, step};
use crate::engine::world::WorldModel;

/// Suite-quality checks on a compiled world. An empty list means the game
/// is fit for experiments.
pub fn validate_world(world: &WorldModel) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    for (room, reachable) in world.rooms.iter().zip(reachable_rooms(world)) {
        if !reachable {
            diags.push(Diagnostic::new(
                room.line,
                format!("unreachable room '{}'", room.id),
            ));
        }
    }

    for rule in &world.rules {
        if !world.is_declared_verb(&rule.pattern.verb) {
            diags.push(Diagnostic::new(
                rule.line,
                format!(
                    "rule '{}' uses undeclared verb '{}'",
                    rule.id, rule.pattern.verb
                ),
            ));
        }
        if rule.annotation.is_some() && rule.effects.is_empty() && rule.preconditions.is_empty() {
            diags.push(Diagnostic::new(
                rule.line,
                format!(
                    "annotated rule '{}' has no effects and no preconditions",
                    rule.id
                ),
            ));
        }
    }

    let mut state = GameState::initial(world);
    for (i, action) in world.walkthrough.iter().enumerate() {
        if state.done {
            diags.push(Diagnostic::new(
                0,
                format!("walkthrough ends early, before step {} ('{action}')", i + 1),
            ));
            break;
        }
        let rendered = parse_command(action, &state, world).map(|c| c.render(world));
        match &rendered {
            Some(r) if valid_actions(world, &state).contains(r) => {}
            _ => diags.push(Diagnostic::new(
                0,
                format!("walkthrough step {} ('{action}') is not a valid action", i + 1),
            )),
        }
        match step(world, &mut state, action) {
            Ok(out) if out.valid => {}
            Ok(out) => {
                diags.push(Diagnostic::new(
                    0,
                    format!(
                        "walkthrough step {} ('{action}') failed: {}",
                        i + 1,
                        out.observation
                    ),
                ));
                break;
            }
            Err(e) => {
                diags.push(Diagnostic::new(0, format!("walkthrough step {}: {e}", i + 1)));
                break;
            }
        }
    }
    if state.score < world.max_score || !state.done {
        diags.push(Diagnostic::new(
            0,
            format!(
                "walkthrough incomplete: score {} of {}, {}",
                state.score,
                world.max_score,
                if state.done { "ended" } else { "not ended" }
            ),
        ));
    } else if state.score > world.max_score {
        diags.push(Diagnostic::new(
            0,
            format!(
                "walkthrough score {} exceeds MAXSCORE {}",
                state.score, world.max_score
            ),
        ));
    }
    diags
}
