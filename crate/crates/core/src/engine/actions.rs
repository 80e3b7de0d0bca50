use crate::engine::state::GameState;
use crate::engine::world::{Direction, ObjectId, TemplateShape, WorldModel};

/// Instantiates every action template with the objects currently in scope,
/// followed by the six movement words. Order: template (verb declaration)
/// order, then object id order; duplicates keep their first position.
pub fn valid_actions(world: &WorldModel, state: &GameState) -> Vec<String> {
    let mut scope: Vec<ObjectId> = state.visible_objects(world);
    scope.sort_by(|a, b| world.object(*a).id.cmp(&world.object(*b).id));
    let nouns: Vec<String> = scope.iter().map(|&o| world.object(o).noun()).collect();

    let mut out: Vec<String> = Vec::new();
    for t in world.templates() {
        match &t.shape {
            TemplateShape::Bare => out.push(t.verb.clone()),
            TemplateShape::Direct => {
                out.extend(nouns.iter().map(|n| format!("{} {}", t.verb, n)));
            }
            TemplateShape::WithIndirect(prep) => {
                for (i, a) in nouns.iter().enumerate() {
                    for (j, b) in nouns.iter().enumerate() {
                        if i != j {
                            out.push(format!("{} {} {} {}", t.verb, a, prep, b));
                        }
                    }
                }
            }
        }
    }
    out.extend(Direction::ALL.iter().map(|d| d.word().to_string()));

    let mut seen = std::collections::HashSet::with_capacity(out.len());
    out.retain(|a| seen.insert(a.clone()));
    out
}

pub fn is_movement(action: &str) -> bool {
    Direction::ALL.iter().any(|d| d.word() == action)
}
