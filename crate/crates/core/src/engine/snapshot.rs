//! Object-tree snapshots: one JSON record per line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::state::{Ending, GameState, ObjectState};
use crate::engine::world::{Direction, ObjectId, WorldModel};
use crate::engine::EngineError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum SnapshotRecord {
    State {
        game: String,
        room: String,
        score: i64,
        moves: u32,
        done: bool,
        ending: Option<Ending>,
        fired: Vec<String>,
    },
    Object {
        id: String,
        parent: String,
        attributes: BTreeMap<String, bool>,
        revealed: bool,
    },
    Room {
        id: String,
        name: String,
        exits: BTreeMap<String, String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub records: Vec<SnapshotRecord>,
}

impl Snapshot {
    pub fn objects(&self) -> impl Iterator<Item = (&str, &str)> {
        self.records.iter().filter_map(|r| match r {
            SnapshotRecord::Object { id, parent, .. } => Some((id.as_str(), parent.as_str())),
            _ => None,
        })
    }

    pub fn parent_of(&self, id: &str) -> Option<&str> {
        self.objects().find(|(o, _)| *o == id).map(|(_, p)| p)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Snapshot, EngineError> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| EngineError::Snapshot(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Snapshot { records })
    }
}

/// Captures every object's placement, attribute bits and revealed flag,
/// plus the room graph.
pub fn object_tree_snapshot(state: &GameState, world: &WorldModel) -> Snapshot {
    let mut records = Vec::with_capacity(1 + world.objects.len() + world.rooms.len());
    records.push(SnapshotRecord::State {
        game: world.game_id.clone(),
        room: world.room(state.room).id.clone(),
        score: state.score,
        moves: state.moves,
        done: state.done,
        ending: state.ending,
        fired: world
            .rules
            .iter()
            .zip(&state.fired)
            .filter(|(_, f)| **f)
            .map(|(r, _)| r.id.clone())
            .collect(),
    });
    for (i, obj) in world.objects.iter().enumerate() {
        let os = &state.objects[i];
        let mut attributes = BTreeMap::new();
        for (a, _) in &obj.attributes {
            attributes.insert(world.attribute_names[*a].clone(), false);
        }
        for (a, name) in world.attribute_names.iter().enumerate() {
            if state.attr(ObjectId(i), a) {
                attributes.insert(name.clone(), true);
            }
        }
        records.push(SnapshotRecord::Object {
            id: obj.id.clone(),
            parent: world.location_name(os.parent),
            attributes,
            revealed: os.revealed,
        });
    }
    for room in &world.rooms {
        let exits = Direction::ALL
            .into_iter()
            .filter_map(|d| room.exit(d).map(|r| (d.word().to_string(), world.room(r).id.clone())))
            .collect();
        records.push(SnapshotRecord::Room {
            id: room.id.clone(),
            name: room.name.clone(),
            exits,
        });
    }
    Snapshot { records }
}

/// Rebuilds a state from a snapshot taken on the same world.
pub fn restore(snapshot: &Snapshot, world: &WorldModel) -> Result<GameState, EngineError> {
    let bad = |m: String| EngineError::Snapshot(m);
    let mut state = GameState::initial(world);
    let mut seen = vec![false; world.objects.len()];
    let mut have_state = false;
    for record in &snapshot.records {
        match record {
            SnapshotRecord::State {
                game,
                room,
                score,
                moves,
                done,
                ending,
                fired,
            } => {
                if *game != world.game_id {
                    return Err(bad(format!("snapshot is for game '{game}'")));
                }
                state.room = world
                    .room_id(room)
                    .ok_or_else(|| bad(format!("unknown room '{room}'")))?;
                state.score = *score;
                state.moves = *moves;
                state.done = *done;
                state.ending = *ending;
                state.fired = vec![false; world.rules.len()];
                for id in fired {
                    let i = world
                        .rules
                        .iter()
                        .position(|r| r.id == *id)
                        .ok_or_else(|| bad(format!("unknown rule '{id}'")))?;
                    state.fired[i] = true;
                }
                have_state = true;
            }
            SnapshotRecord::Object {
                id,
                parent,
                attributes,
                revealed,
            } => {
                let o = world
                    .object_id(id)
                    .ok_or_else(|| bad(format!("unknown object '{id}'")))?;
                let parent = world
                    .parse_location(parent)
                    .ok_or_else(|| bad(format!("unknown location '{parent}'")))?;
                let mut attrs = 0u64;
                for (name, v) in attributes {
                    let a = world
                        .attribute_index(name)
                        .ok_or_else(|| bad(format!("unknown attribute '{name}'")))?;
                    if *v {
                        attrs |= 1 << a;
                    }
                }
                state.objects[o.0] = ObjectState {
                    parent,
                    attrs,
                    revealed: *revealed,
                };
                seen[o.0] = true;
            }
            SnapshotRecord::Room { .. } => {}
        }
    }
    if !have_state {
        return Err(bad("missing state record".to_string()));
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(bad(format!("missing object '{}'", world.objects[i].id)));
    }
    Ok(state)
}
