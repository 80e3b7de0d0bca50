use std::fmt::Write;

use crate::engine::{Direction, GameState, Location, WorldModel};

fn quote(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the room graph as DOT. Each node is labelled with the room name
/// and the number of objects located in it, directly or transitively, in the
/// initial state. Edges are directed exits labelled with their direction.
pub fn export_map(world: &WorldModel) -> String {
    let state = GameState::initial(world);
    let mut counts = vec![0usize; world.rooms.len()];
    for i in 0..world.objects.len() {
        if let Location::Room(r) = state.root(crate::engine::ObjectId(i)) {
            counts[r.0] += 1;
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", quote(&world.game_id));
    for (room, n) in world.rooms.iter().zip(&counts) {
        let _ = writeln!(out, "  \"{}\" [label=\"{} ({n})\"];", quote(&room.id), quote(&room.name));
    }
    for room in &world.rooms {
        for dir in Direction::ALL {
            if let Some(to) = room.exit(dir) {
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\" [label=\"{}\"];",
                    quote(&room.id),
                    quote(&world.room(to).id),
                    dir.word()
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
