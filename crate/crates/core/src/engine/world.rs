use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::annotation::Degrees;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoomId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    South,
    East,
    West,
    Up,
    Down,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
        Direction::Up,
        Direction::Down,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Lower-case command word (`"north"`).
    pub fn word(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }

    /// Accepts full words and single-letter abbreviations, any case.
    pub fn parse(s: &str) -> Option<Direction> {
        let lower = s.to_ascii_lowercase();
        Direction::ALL
            .into_iter()
            .find(|d| d.word() == lower || d.word()[..1] == lower)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word().to_ascii_uppercase())
    }
}

/// Where an object sits in the object tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Room(RoomId),
    Object(ObjectId),
    Player,
    Limbo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: String,
    pub name: String,
    pub description: String,
    pub exits: [Option<RoomId>; 6],
    pub line: usize,
}

impl Room {
    pub fn exit(&self, dir: Direction) -> Option<RoomId> {
        self.exits[dir.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObjectFlags {
    pub takeable: bool,
    pub container: bool,
    pub hidden: bool,
    pub global: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameObject {
    pub id: String,
    pub name: String,
    pub synonyms: Vec<String>,
    pub initial_location: Location,
    pub flags: ObjectFlags,
    /// Initial attribute values, keyed by interned attribute index.
    pub attributes: Vec<(usize, bool)>,
    pub line: usize,
    /// Lower-cased words this object answers to (synonyms plus name words).
    pub(crate) vocabulary: Vec<String>,
}

impl GameObject {
    pub fn answers_to(&self, word: &str) -> bool {
        self.vocabulary.iter().any(|w| w == word)
    }

    /// The noun phrase used when rendering commands about this object.
    pub fn noun(&self) -> String {
        crate::engine::command::normalize_words(&self.name).join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verb {
    /// Canonical word followed by synonyms.
    pub words: Vec<String>,
    pub line: usize,
}

impl Verb {
    pub fn canonical(&self) -> &str {
        &self.words[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    /// Canonical verb word (raw word if the verb was never declared).
    pub verb: String,
    pub direct: Option<ObjectId>,
    pub indirect: Option<(String, ObjectId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    At(RoomId),
    Has(ObjectId),
    Here(ObjectId),
    Attr(ObjectId, usize, bool),
    Not(Box<Condition>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Move(ObjectId, Location),
    MovePlayer(RoomId),
    SetAttr(ObjectId, usize, bool),
    Print(String),
    Score(i64),
    Reveal(ObjectId),
    Destroy(ObjectId),
    Win,
    Die,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSpec {
    pub degrees: Degrees,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub pattern: Pattern,
    pub preconditions: Vec<Condition>,
    pub effects: Vec<Effect>,
    pub annotation: Option<AnnotationSpec>,
    pub line: usize,
}

impl Rule {
    pub fn scores(&self) -> bool {
        self.effects.iter().any(|e| matches!(e, Effect::Score(_)))
    }
}

/// Arity of an instantiable action template.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateShape {
    Bare,
    Direct,
    WithIndirect(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub verb: String,
    pub shape: TemplateShape,
}

/// Immutable compiled game.
#[derive(Debug, Clone)]
pub struct WorldModel {
    pub game_id: String,
    pub max_score: i64,
    pub rooms: Vec<Room>,
    pub objects: Vec<GameObject>,
    pub verbs: Vec<Verb>,
    pub rules: Vec<Rule>,
    pub walkthrough: Vec<String>,
    /// Interned attribute names; objects store attribute bits by index.
    pub attribute_names: Vec<String>,
    pub(crate) room_index: HashMap<String, RoomId>,
    pub(crate) object_index: HashMap<String, ObjectId>,
    pub(crate) verb_lookup: HashMap<String, usize>,
    pub(crate) rules_by_verb: HashMap<String, Vec<usize>>,
    pub(crate) prepositions: Vec<String>,
    pub(crate) templates: Vec<Template>,
    pub(crate) closed_attr: Option<usize>,
}

pub const START_ROOM: RoomId = RoomId(0);

/// Verbs with engine-provided fallback behaviour when declared by a script.
pub const BUILTIN_VERBS: [(&str, TemplateShape); 4] = [
    ("take", TemplateShape::Direct),
    ("drop", TemplateShape::Direct),
    ("look", TemplateShape::Bare),
    ("inventory", TemplateShape::Bare),
];

impl WorldModel {
    pub fn room(&self, id: RoomId) -> &Room {
        &self.rooms[id.0]
    }

    pub fn object(&self, id: ObjectId) -> &GameObject {
        &self.objects[id.0]
    }

    pub fn room_id(&self, id: &str) -> Option<RoomId> {
        self.room_index.get(id).copied()
    }

    pub fn object_id(&self, id: &str) -> Option<ObjectId> {
        self.object_index.get(id).copied()
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attribute_names.iter().position(|a| a == name)
    }

    /// Canonical verb for a word or synonym.
    pub fn canonical_verb(&self, word: &str) -> Option<&str> {
        self.verb_lookup
            .get(word)
            .map(|&i| self.verbs[i].canonical())
    }

    pub fn is_declared_verb(&self, canonical: &str) -> bool {
        self.verbs.iter().any(|v| v.canonical() == canonical)
    }

    pub fn start_room(&self) -> RoomId {
        START_ROOM
    }

    /// Action templates in verb declaration order.
    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub(crate) fn rules_for(&self, verb: &str) -> &[usize] {
        self.rules_by_verb.get(verb).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn is_preposition(&self, word: &str) -> bool {
        self.prepositions.iter().any(|p| p == word)
    }

    /// Rules carrying an annotation, in declaration order.
    pub fn annotated_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.annotation.is_some())
    }

    /// Renders a location the way scripts and snapshots spell it.
    pub fn location_name(&self, loc: Location) -> String {
        match loc {
            Location::Room(r) => self.room(r).id.clone(),
            Location::Object(o) => self.object(o).id.clone(),
            Location::Player => "PLAYER".to_string(),
            Location::Limbo => "LIMBO".to_string(),
        }
    }

    pub fn parse_location(&self, name: &str) -> Option<Location> {
        match name {
            "PLAYER" => Some(Location::Player),
            "LIMBO" => Some(Location::Limbo),
            _ => self
                .room_id(name)
                .map(Location::Room)
                .or_else(|| self.object_id(name).map(Location::Object)),
        }
    }
}
