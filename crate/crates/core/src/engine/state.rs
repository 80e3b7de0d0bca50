use serde::{Deserialize, Serialize};

use crate::engine::world::{Location, ObjectId, RoomId, WorldModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Ending {
    Win,
    Die,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectState {
    pub parent: Location,
    /// Attribute bits indexed by the world's interned attribute names.
    pub attrs: u64,
    pub revealed: bool,
}

/// Mutable episode state. Cloning is a deep copy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub room: RoomId,
    pub objects: Vec<ObjectState>,
    pub score: i64,
    pub moves: u32,
    pub done: bool,
    pub ending: Option<Ending>,
    /// Rules whose effects have fired at least once this episode.
    pub fired: Vec<bool>,
}

impl GameState {
    pub fn initial(world: &WorldModel) -> GameState {
        let objects = world
            .objects
            .iter()
            .map(|o| ObjectState {
                parent: o.initial_location,
                attrs: o
                    .attributes
                    .iter()
                    .filter(|(_, v)| *v)
                    .fold(0u64, |acc, (i, _)| acc | (1 << i)),
                revealed: false,
            })
            .collect();
        GameState {
            room: world.start_room(),
            objects,
            score: 0,
            moves: 0,
            done: false,
            ending: None,
            fired: vec![false; world.rules.len()],
        }
    }

    pub fn parent(&self, obj: ObjectId) -> Location {
        self.objects[obj.0].parent
    }

    pub fn attr(&self, obj: ObjectId, attr: usize) -> bool {
        self.objects[obj.0].attrs & (1 << attr) != 0
    }

    pub fn set_attr(&mut self, obj: ObjectId, attr: usize, value: bool) {
        let bits = &mut self.objects[obj.0].attrs;
        if value {
            *bits |= 1 << attr;
        } else {
            *bits &= !(1 << attr);
        }
    }

    /// True when `obj` is somewhere under the player.
    pub fn carries(&self, obj: ObjectId) -> bool {
        self.root(obj) == Location::Player
    }

    /// True when `ancestor` contains `obj`, directly or transitively.
    pub fn is_inside(&self, obj: ObjectId, ancestor: ObjectId) -> bool {
        let mut cursor = self.parent(obj);
        while let Location::Object(p) = cursor {
            if p == ancestor {
                return true;
            }
            cursor = self.parent(p);
        }
        false
    }

    /// The room, PLAYER, or LIMBO at the top of `obj`'s containment chain.
    pub fn root(&self, obj: ObjectId) -> Location {
        let mut cursor = self.parent(obj);
        while let Location::Object(p) = cursor {
            cursor = self.parent(p);
        }
        cursor
    }

    fn concealed(&self, world: &WorldModel, obj: ObjectId) -> bool {
        world.object(obj).flags.hidden && !self.objects[obj.0].revealed
    }

    fn closed(&self, world: &WorldModel, obj: ObjectId) -> bool {
        world.closed_attr.is_some_and(|a| self.attr(obj, a))
    }

    /// Visible objects: not concealed, and either GLOBAL or reachable from
    /// the current room or the player through visible, open containers.
    pub fn is_visible(&self, world: &WorldModel, obj: ObjectId) -> bool {
        if self.concealed(world, obj) {
            return false;
        }
        let parent = self.parent(obj);
        if world.object(obj).flags.global && parent != Location::Limbo {
            return true;
        }
        match parent {
            Location::Room(r) => r == self.room,
            Location::Player => true,
            Location::Limbo => false,
            Location::Object(p) => !self.closed(world, p) && self.is_visible(world, p),
        }
    }

    /// Visible and not carried.
    pub fn is_here(&self, world: &WorldModel, obj: ObjectId) -> bool {
        !self.carries(obj) && self.is_visible(world, obj)
    }

    pub fn visible_objects(&self, world: &WorldModel) -> Vec<ObjectId> {
        (0..self.objects.len())
            .map(ObjectId)
            .filter(|&o| self.is_visible(world, o))
            .collect()
    }

    /// Objects held directly by the player, in declaration order.
    pub fn inventory(&self) -> Vec<ObjectId> {
        (0..self.objects.len())
            .map(ObjectId)
            .filter(|&o| self.parent(o) == Location::Player)
            .collect()
    }
}
