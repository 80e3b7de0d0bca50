//! Compiler for the line-oriented game-script format.
//!
//! ```text
//! GAME manor-heist
//! MAXSCORE 20
//! ROOM foyer "Foyer" "A draughty entrance hall."
//! EXIT foyer NORTH study
//! OBJECT lamp "brass lamp" LOC foyer
//!   FLAGS TAKEABLE
//!   SYNONYMS lantern
//!   ATTRS lit=0
//! VERB take get grab
//! RULE steal_lamp ON "take lamp"
//!   REQUIRE HERE lamp
//!   DO MOVE lamp PLAYER
//!   DO SCORE 2
//!   ANNOTATE 2 0 0 0 "You steal the lamp."
//! WALKTHROUGH
//! take lamp
//! END
//! ```
//!
//! The first `ROOM` declared is where the player starts. Parsing is total:
//! every rejected input yields at least one [`Diagnostic`].

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::annotation::Degrees;
use crate::engine::command::normalize_words;
use crate::engine::world::*;

/// A problem found in a script, with its 1-based line number (0 when the
/// problem is not tied to a line).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} diagnostic(s), first: {}", .0.len(), .0[0])]
pub struct ScriptError(pub Vec<Diagnostic>);

impl ScriptError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.0
    }
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    quoted: bool,
}

fn tokenize(line: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            None | Some('#') => break,
            Some('"') => {
                chars.next();
                let mut text = String::new();
                let mut closed = false;
                for c in chars.by_ref() {
                    if c == '"' {
                        closed = true;
                        break;
                    }
                    text.push(c);
                }
                if !closed {
                    return Err("unterminated string".to_string());
                }
                tokens.push(Token { text, quoted: true });
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() {
                        break;
                    }
                    text.push(c);
                    chars.next();
                }
                tokens.push(Token {
                    text,
                    quoted: false,
                });
            }
        }
    }
    Ok(tokens)
}

struct RawRoom {
    id: String,
    name: String,
    desc: String,
    line: usize,
}

struct RawExit {
    from: String,
    dir: Direction,
    to: String,
    line: usize,
}

struct RawObject {
    id: String,
    name: String,
    loc: String,
    flags: ObjectFlags,
    synonyms: Vec<String>,
    attrs: Vec<(String, bool)>,
    line: usize,
}

struct RawRule {
    id: String,
    pattern: String,
    line: usize,
    requires: Vec<(usize, Vec<Token>)>,
    effects: Vec<(usize, Vec<Token>)>,
    annotate: Option<(usize, Vec<Token>)>,
}

enum Owner {
    None,
    Object(usize),
    Rule(usize),
}

#[derive(Default)]
struct Raw {
    game: Option<String>,
    max_score: Option<i64>,
    rooms: Vec<RawRoom>,
    exits: Vec<RawExit>,
    objects: Vec<RawObject>,
    verbs: Vec<(Vec<String>, usize)>,
    rules: Vec<RawRule>,
    walkthrough: Option<Vec<String>>,
}

const RESERVED_IDS: [&str; 2] = ["PLAYER", "LIMBO"];

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn parse_bit(s: &str) -> Option<bool> {
    match s {
        "0" => Some(false),
        "1" => Some(true),
        _ => None,
    }
}

/// Compiles a script into a [`WorldModel`].
pub fn parse_script(text: &str) -> Result<WorldModel, ScriptError> {
    let mut diags = Vec::new();
    let raw = read_directives(text, &mut diags);
    let world = resolve(raw, &mut diags);
    if diags.is_empty() {
        Ok(world.expect("resolution succeeds without diagnostics"))
    } else {
        diags.sort_by_key(|d| d.line);
        Err(ScriptError(diags))
    }
}

fn read_directives(text: &str, diags: &mut Vec<Diagnostic>) -> Raw {
    let mut raw = Raw::default();
    let mut owner = Owner::None;
    let mut in_walkthrough = false;
    let mut ended = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if ended {
            diags.push(Diagnostic::new(lineno, "content after END"));
            break;
        }
        if in_walkthrough {
            if trimmed == "END" {
                ended = true;
            } else if let Some(steps) = raw.walkthrough.as_mut() {
                steps.push(trimmed.to_string());
            }
            continue;
        }
        let tokens = match tokenize(trimmed) {
            Ok(t) => t,
            Err(msg) => {
                diags.push(Diagnostic::new(lineno, msg));
                continue;
            }
        };
        let Some(head) = tokens.first() else { continue };
        let args = &tokens[1..];
        let mut expect = |n: usize, usage: &str| -> bool {
            if args.len() == n {
                true
            } else {
                diags.push(Diagnostic::new(lineno, format!("usage: {usage}")));
                false
            }
        };
        match head.text.as_str() {
            "GAME" => {
                if expect(1, "GAME <id>") {
                    if raw.game.is_some() {
                        diags.push(Diagnostic::new(lineno, "duplicate GAME directive"));
                    }
                    raw.game = Some(args[0].text.clone());
                }
                owner = Owner::None;
            }
            "MAXSCORE" => {
                if expect(1, "MAXSCORE <int>") {
                    match args[0].text.parse::<i64>() {
                        Ok(v) if v >= 0 => raw.max_score = Some(v),
                        _ => diags.push(Diagnostic::new(
                            lineno,
                            format!("invalid max score '{}'", args[0].text),
                        )),
                    }
                }
                owner = Owner::None;
            }
            "ROOM" => {
                if expect(3, "ROOM <id> \"<name>\" \"<description>\"") {
                    raw.rooms.push(RawRoom {
                        id: args[0].text.clone(),
                        name: args[1].text.clone(),
                        desc: args[2].text.clone(),
                        line: lineno,
                    });
                }
                owner = Owner::None;
            }
            "EXIT" => {
                if expect(3, "EXIT <room> <DIR> <room>") {
                    match Direction::parse(&args[1].text) {
                        Some(dir) if args[1].text.len() > 1 => raw.exits.push(RawExit {
                            from: args[0].text.clone(),
                            dir,
                            to: args[2].text.clone(),
                            line: lineno,
                        }),
                        _ => diags.push(Diagnostic::new(
                            lineno,
                            format!("unknown direction '{}'", args[1].text),
                        )),
                    }
                }
                owner = Owner::None;
            }
            "OBJECT" => {
                if args.len() == 4 && args[2].text == "LOC" {
                    raw.objects.push(RawObject {
                        id: args[0].text.clone(),
                        name: args[1].text.clone(),
                        loc: args[3].text.clone(),
                        flags: ObjectFlags::default(),
                        synonyms: Vec::new(),
                        attrs: Vec::new(),
                        line: lineno,
                    });
                    owner = Owner::Object(raw.objects.len() - 1);
                } else {
                    diags.push(Diagnostic::new(
                        lineno,
                        "usage: OBJECT <id> \"<name>\" LOC <location>",
                    ));
                    owner = Owner::None;
                }
            }
            "FLAGS" | "SYNONYMS" | "ATTRS" => {
                let Owner::Object(i) = owner else {
                    diags.push(Diagnostic::new(
                        lineno,
                        format!("{} outside an OBJECT block", head.text),
                    ));
                    continue;
                };
                let obj = &mut raw.objects[i];
                for arg in args {
                    match head.text.as_str() {
                        "FLAGS" => match arg.text.as_str() {
                            "TAKEABLE" => obj.flags.takeable = true,
                            "CONTAINER" => obj.flags.container = true,
                            "HIDDEN" => obj.flags.hidden = true,
                            "GLOBAL" => obj.flags.global = true,
                            other => diags.push(Diagnostic::new(
                                lineno,
                                format!("unknown flag '{other}'"),
                            )),
                        },
                        "SYNONYMS" => obj.synonyms.push(arg.text.to_lowercase()),
                        _ => match arg.text.split_once('=') {
                            Some((name, bit)) if is_identifier(name) => match parse_bit(bit) {
                                Some(v) => obj.attrs.push((name.to_string(), v)),
                                None => diags.push(Diagnostic::new(
                                    lineno,
                                    format!("attribute value must be 0 or 1 in '{}'", arg.text),
                                )),
                            },
                            _ => diags.push(Diagnostic::new(
                                lineno,
                                format!("malformed attribute '{}'", arg.text),
                            )),
                        },
                    }
                }
            }
            "VERB" => {
                if args.is_empty() {
                    diags.push(Diagnostic::new(lineno, "usage: VERB <word> [synonym ...]"));
                } else {
                    raw.verbs.push((
                        args.iter().map(|t| t.text.to_lowercase()).collect(),
                        lineno,
                    ));
                }
                owner = Owner::None;
            }
            "RULE" => {
                if args.len() == 3 && args[1].text == "ON" && args[2].quoted {
                    raw.rules.push(RawRule {
                        id: args[0].text.clone(),
                        pattern: args[2].text.clone(),
                        line: lineno,
                        requires: Vec::new(),
                        effects: Vec::new(),
                        annotate: None,
                    });
                    owner = Owner::Rule(raw.rules.len() - 1);
                } else {
                    diags.push(Diagnostic::new(
                        lineno,
                        "usage: RULE <id> ON \"<verb> [object] [preposition object]\"",
                    ));
                    owner = Owner::None;
                }
            }
            "REQUIRE" | "DO" | "ANNOTATE" => {
                let Owner::Rule(i) = owner else {
                    diags.push(Diagnostic::new(
                        lineno,
                        format!("{} outside a RULE block", head.text),
                    ));
                    continue;
                };
                let rule = &mut raw.rules[i];
                let entry = (lineno, args.to_vec());
                match head.text.as_str() {
                    "REQUIRE" => rule.requires.push(entry),
                    "DO" => rule.effects.push(entry),
                    _ => {
                        if rule.annotate.is_some() {
                            diags.push(Diagnostic::new(lineno, "rule already annotated"));
                        }
                        rule.annotate = Some(entry);
                    }
                }
            }
            "WALKTHROUGH" => {
                if !args.is_empty() {
                    diags.push(Diagnostic::new(lineno, "WALKTHROUGH takes no arguments"));
                }
                if raw.walkthrough.is_some() {
                    diags.push(Diagnostic::new(lineno, "duplicate WALKTHROUGH section"));
                }
                raw.walkthrough = Some(Vec::new());
                in_walkthrough = true;
                owner = Owner::None;
            }
            "END" => {
                diags.push(Diagnostic::new(lineno, "END without WALKTHROUGH"));
            }
            other => {
                diags.push(Diagnostic::new(
                    lineno,
                    format!("unknown directive '{other}'"),
                ));
            }
        }
    }
    raw
}

/// Second pass: check ids and references, build indices.
fn resolve(raw: Raw, diags: &mut Vec<Diagnostic>) -> Option<WorldModel> {
    let last_line = raw
        .rules
        .last()
        .map(|r| r.line)
        .unwrap_or_default();
    let game_id = raw.game.clone().unwrap_or_else(|| {
        diags.push(Diagnostic::new(1, "missing GAME directive"));
        String::new()
    });
    if raw.walkthrough.is_none() {
        diags.push(Diagnostic::new(last_line.max(1), "missing WALKTHROUGH section"));
    }
    if raw.rooms.is_empty() {
        diags.push(Diagnostic::new(1, "script declares no rooms"));
    }

    // Ids share one namespace so snapshot locations are unambiguous.
    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut check_id = |id: &str, line: usize, diags: &mut Vec<Diagnostic>| {
        if !is_identifier(id) || RESERVED_IDS.contains(&id) {
            diags.push(Diagnostic::new(line, format!("invalid id '{id}'")));
        }
        if !seen_ids.insert(id.to_string()) {
            diags.push(Diagnostic::new(line, format!("duplicate id '{id}'")));
        }
    };

    let mut room_index = HashMap::new();
    let mut rooms = Vec::with_capacity(raw.rooms.len());
    for (i, r) in raw.rooms.iter().enumerate() {
        check_id(&r.id, r.line, diags);
        if r.desc.trim().is_empty() {
            diags.push(Diagnostic::new(r.line, format!("room '{}' has an empty description", r.id)));
        }
        room_index.entry(r.id.clone()).or_insert(RoomId(i));
        rooms.push(Room {
            id: r.id.clone(),
            name: r.name.clone(),
            description: r.desc.clone(),
            exits: [None; 6],
            line: r.line,
        });
    }

    let mut object_index = HashMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        check_id(&o.id, o.line, diags);
        object_index.entry(o.id.clone()).or_insert(ObjectId(i));
    }

    for e in &raw.exits {
        let from = room_index.get(&e.from).copied();
        let to = room_index.get(&e.to).copied();
        if from.is_none() {
            diags.push(Diagnostic::new(e.line, format!("unknown room '{}'", e.from)));
        }
        if to.is_none() {
            diags.push(Diagnostic::new(e.line, format!("unknown room '{}'", e.to)));
        }
        if let (Some(from), Some(to)) = (from, to) {
            let slot = &mut rooms[from.0].exits[e.dir.index()];
            if slot.is_some() {
                diags.push(Diagnostic::new(
                    e.line,
                    format!("room '{}' already has an exit {}", e.from, e.dir),
                ));
            }
            *slot = Some(to);
        }
    }

    let mut attribute_names: Vec<String> = Vec::new();
    let mut intern = |name: &str| -> usize {
        if let Some(i) = attribute_names.iter().position(|a| a == name) {
            i
        } else {
            attribute_names.push(name.to_string());
            attribute_names.len() - 1
        }
    };

    let lookup_location = |name: &str| -> Option<Location> {
        match name {
            "PLAYER" => Some(Location::Player),
            "LIMBO" => Some(Location::Limbo),
            _ => room_index
                .get(name)
                .map(|&r| Location::Room(r))
                .or_else(|| object_index.get(name).map(|&o| Location::Object(o))),
        }
    };

    let mut objects = Vec::with_capacity(raw.objects.len());
    for o in &raw.objects {
        let initial_location = lookup_location(&o.loc).unwrap_or_else(|| {
            diags.push(Diagnostic::new(o.line, format!("unknown location '{}'", o.loc)));
            Location::Limbo
        });
        let name_words = normalize_words(&o.name);
        if name_words.is_empty() {
            diags.push(Diagnostic::new(o.line, format!("object '{}' has an empty name", o.id)));
        }
        let mut vocabulary: Vec<String> = o.synonyms.clone();
        for w in name_words {
            if !vocabulary.contains(&w) {
                vocabulary.push(w);
            }
        }
        let attributes = o
            .attrs
            .iter()
            .map(|(name, v)| (intern(name), *v))
            .collect();
        objects.push(GameObject {
            id: o.id.clone(),
            name: o.name.clone(),
            synonyms: o.synonyms.clone(),
            initial_location,
            flags: o.flags,
            attributes,
            line: o.line,
            vocabulary,
        });
    }

    // Initial containment must be a forest.
    for (i, o) in objects.iter().enumerate() {
        let mut cursor = o.initial_location;
        let mut steps = 0;
        while let Location::Object(p) = cursor {
            if p.0 == i || steps > objects.len() {
                diags.push(Diagnostic::new(
                    o.line,
                    format!("object '{}' is contained in itself", o.id),
                ));
                break;
            }
            cursor = objects[p.0].initial_location;
            steps += 1;
        }
    }

    let mut verbs = Vec::new();
    let mut verb_lookup = HashMap::new();
    for (words, line) in &raw.verbs {
        for w in words {
            if Direction::parse(w).is_some() || w == "go" {
                diags.push(Diagnostic::new(*line, format!("'{w}' is reserved for movement")));
            } else if verb_lookup.insert(w.clone(), verbs.len()).is_some() {
                diags.push(Diagnostic::new(*line, format!("duplicate verb word '{w}'")));
            }
        }
        verbs.push(Verb {
            words: words.clone(),
            line: *line,
        });
    }

    let object_ref = |name: &str, line: usize, diags: &mut Vec<Diagnostic>| -> Option<ObjectId> {
        let id = object_index.get(name).copied();
        if id.is_none() {
            diags.push(Diagnostic::new(line, format!("unknown object '{name}'")));
        }
        id
    };
    let room_ref = |name: &str, line: usize, diags: &mut Vec<Diagnostic>| -> Option<RoomId> {
        let id = room_index.get(name).copied();
        if id.is_none() {
            diags.push(Diagnostic::new(line, format!("unknown room '{name}'")));
        }
        id
    };

    let mut rules = Vec::with_capacity(raw.rules.len());
    let mut rule_ids = HashSet::new();
    for r in &raw.rules {
        if !rule_ids.insert(r.id.as_str()) {
            diags.push(Diagnostic::new(r.line, format!("duplicate rule id '{}'", r.id)));
        }
        let words: Vec<String> = r.pattern.split_whitespace().map(str::to_string).collect();
        let pattern = match words.as_slice() {
            [] => {
                diags.push(Diagnostic::new(r.line, "empty rule pattern"));
                None
            }
            [verb, rest @ ..] => {
                let verb = verb.to_lowercase();
                let verb = verb_lookup
                    .get(&verb)
                    .map(|&i| verbs[i].words[0].clone())
                    .unwrap_or(verb);
                match rest {
                    [] => Some(Pattern {
                        verb,
                        direct: None,
                        indirect: None,
                    }),
                    [obj] => object_ref(obj, r.line, diags).map(|o| Pattern {
                        verb,
                        direct: Some(o),
                        indirect: None,
                    }),
                    [obj, prep, ind] => {
                        let o = object_ref(obj, r.line, diags);
                        let i = object_ref(ind, r.line, diags);
                        o.zip(i).map(|(o, i)| Pattern {
                            verb,
                            direct: Some(o),
                            indirect: Some((prep.to_lowercase(), i)),
                        })
                    }
                    _ => {
                        diags.push(Diagnostic::new(
                            r.line,
                            format!("malformed pattern '{}'", r.pattern),
                        ));
                        None
                    }
                }
            }
        };

        let mut preconditions = Vec::new();
        for (line, toks) in &r.requires {
            let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
            match parse_condition(&texts, *line, &object_ref, &room_ref, &mut intern, diags) {
                Some(c) => preconditions.push(c),
                None => {}
            }
        }

        let mut effects = Vec::new();
        for (line, toks) in &r.effects {
            let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
            let effect = match texts.as_slice() {
                ["MOVE", "PLAYER", room] => room_ref(room, *line, diags).map(Effect::MovePlayer),
                ["MOVE", obj, loc] => {
                    let o = object_ref(obj, *line, diags);
                    let l = lookup_location(loc);
                    if l.is_none() {
                        diags.push(Diagnostic::new(*line, format!("unknown location '{loc}'")));
                    }
                    o.zip(l).map(|(o, l)| Effect::Move(o, l))
                }
                ["SETATTR", obj, name, bit] => {
                    let o = object_ref(obj, *line, diags);
                    match parse_bit(bit) {
                        Some(v) => o.map(|o| Effect::SetAttr(o, intern(name), v)),
                        None => {
                            diags.push(Diagnostic::new(*line, "attribute value must be 0 or 1"));
                            None
                        }
                    }
                }
                ["PRINT", _] if toks[1].quoted => Some(Effect::Print(toks[1].text.clone())),
                ["SCORE", n] => match n.parse::<i64>() {
                    Ok(v) if v > 0 => Some(Effect::Score(v)),
                    _ => {
                        diags.push(Diagnostic::new(*line, format!("invalid score '{n}'")));
                        None
                    }
                },
                ["REVEAL", obj] => object_ref(obj, *line, diags).map(Effect::Reveal),
                ["DESTROY", obj] => object_ref(obj, *line, diags).map(Effect::Destroy),
                ["WIN"] => Some(Effect::Win),
                ["DIE"] => Some(Effect::Die),
                _ => {
                    diags.push(Diagnostic::new(
                        *line,
                        format!("unknown effect '{}'", texts.join(" ")),
                    ));
                    None
                }
            };
            effects.extend(effect);
        }

        let annotation = r.annotate.as_ref().and_then(|(line, toks)| {
            if toks.len() != 5 || !toks[4].quoted {
                diags.push(Diagnostic::new(
                    *line,
                    "usage: ANNOTATE <n0> <n1> <n2> <n3> \"<description>\"",
                ));
                return None;
            }
            let mut comps = [0u8; 4];
            for (slot, tok) in comps.iter_mut().zip(&toks[..4]) {
                match tok.text.parse::<u8>() {
                    Ok(v) if v <= crate::annotation::MAX_DEGREE => *slot = v,
                    _ => {
                        diags.push(Diagnostic::new(
                            *line,
                            format!("degree out of 0-3: '{}'", tok.text),
                        ));
                        return None;
                    }
                }
            }
            let degrees = Degrees(comps);
            if degrees.is_zero() {
                diags.push(Diagnostic::new(*line, "annotation has no nonzero degree"));
                return None;
            }
            Some(AnnotationSpec {
                degrees,
                description: toks[4].text.clone(),
            })
        });

        if let Some(pattern) = pattern {
            rules.push(Rule {
                id: r.id.clone(),
                pattern,
                preconditions,
                effects,
                annotation,
                line: r.line,
            });
        }
    }

    if attribute_names.len() > 64 {
        diags.push(Diagnostic::new(0, "more than 64 distinct attribute names"));
    }

    if !diags.is_empty() {
        return None;
    }

    let mut rules_by_verb: HashMap<String, Vec<usize>> = HashMap::new();
    let mut prepositions = BTreeSet::new();
    for (i, r) in rules.iter().enumerate() {
        rules_by_verb.entry(r.pattern.verb.clone()).or_default().push(i);
        if let Some((prep, _)) = &r.pattern.indirect {
            prepositions.insert(prep.clone());
        }
    }

    let mut templates = Vec::new();
    for v in &verbs {
        let canonical = v.canonical();
        let mut shapes = BTreeSet::new();
        for &ri in rules_by_verb.get(canonical).map(Vec::as_slice).unwrap_or(&[]) {
            let p = &rules[ri].pattern;
            shapes.insert(match (&p.direct, &p.indirect) {
                (None, _) => TemplateShape::Bare,
                (Some(_), None) => TemplateShape::Direct,
                (Some(_), Some((prep, _))) => TemplateShape::WithIndirect(prep.clone()),
            });
        }
        for (builtin, shape) in BUILTIN_VERBS.iter() {
            if *builtin == canonical {
                shapes.insert(shape.clone());
            }
        }
        templates.extend(shapes.into_iter().map(|shape| Template {
            verb: canonical.to_string(),
            shape,
        }));
    }

    let closed_attr = attribute_names.iter().position(|a| a == "closed");
    Some(WorldModel {
        game_id,
        max_score: raw.max_score.unwrap_or(0),
        rooms,
        objects,
        verbs,
        rules,
        walkthrough: raw.walkthrough.unwrap_or_default(),
        attribute_names,
        room_index,
        object_index,
        verb_lookup,
        rules_by_verb,
        prepositions: prepositions.into_iter().collect(),
        templates,
        closed_attr,
    })
}

fn parse_condition(
    texts: &[&str],
    line: usize,
    object_ref: &dyn Fn(&str, usize, &mut Vec<Diagnostic>) -> Option<ObjectId>,
    room_ref: &dyn Fn(&str, usize, &mut Vec<Diagnostic>) -> Option<RoomId>,
    intern: &mut dyn FnMut(&str) -> usize,
    diags: &mut Vec<Diagnostic>,
) -> Option<Condition> {
    match texts {
        ["NOT", rest @ ..] => parse_condition(rest, line, object_ref, room_ref, intern, diags)
            .map(|c| Condition::Not(Box::new(c))),
        ["AT", room] => room_ref(room, line, diags).map(Condition::At),
        ["HAS", obj] => object_ref(obj, line, diags).map(Condition::Has),
        ["HERE", obj] => object_ref(obj, line, diags).map(Condition::Here),
        ["ATTR", obj, name, "=", bit] | ["ATTR", obj, name, bit] => {
            let o = object_ref(obj, line, diags);
            match parse_bit(bit) {
                Some(v) => o.map(|o| Condition::Attr(o, intern(name), v)),
                None => {
                    diags.push(Diagnostic::new(line, "attribute value must be 0 or 1"));
                    None
                }
            }
        }
        _ => {
            diags.push(Diagnostic::new(
                line,
                format!("unknown condition '{}'", texts.join(" ")),
            ));
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
GAME tiny
ROOM hall "Hall" "A bare hall."
ROOM yard "Yard" "An overgrown yard."
EXIT hall NORTH yard
WALKTHROUGH
END
"#;

    #[test]
    fn minimal_script_compiles() {
        let w = parse_script(MINIMAL).unwrap();
        assert_eq!(w.rooms.len(), 2);
        assert_eq!(w.max_score, 0);
        assert_eq!(w.room(RoomId(0)).exit(Direction::North), Some(RoomId(1)));
        assert!(w.walkthrough.is_empty());
    }

    #[test]
    fn dangling_exit_reports_line() {
        let src = MINIMAL.replace("EXIT hall NORTH yard", "EXIT hall NORTH nowhere");
        let err = parse_script(&src).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].line, 5);
        assert_eq!(err.0[0].message, "unknown room 'nowhere'");
    }

    #[test]
    fn unknown_directive() {
        let src = format!("{MINIMAL}").replace("GAME tiny", "GAME tiny\nTELEPORT hall");
        let err = parse_script(&src).unwrap_err();
        assert!(err.0.iter().any(|d| d.message == "unknown directive 'TELEPORT'" && d.line == 3));
    }

    #[test]
    fn duplicate_ids_across_rooms_and_objects() {
        let src = MINIMAL.replace(
            "EXIT hall NORTH yard",
            "EXIT hall NORTH yard\nOBJECT hall \"hall sign\" LOC hall",
        );
        let err = parse_script(&src).unwrap_err();
        assert!(err.0.iter().any(|d| d.message == "duplicate id 'hall'"));
    }

    #[test]
    fn degree_out_of_range() {
        let src = MINIMAL.replace(
            "WALKTHROUGH",
            "VERB kick\nRULE k ON \"kick\"\n  ANNOTATE 4 0 0 0 \"too much\"\nWALKTHROUGH",
        );
        let err = parse_script(&src).unwrap_err();
        assert!(err.0[0].message.starts_with("degree out of 0-3"));
        assert_eq!(err.0[0].line, 8);
    }

    #[test]
    fn missing_walkthrough() {
        let src = MINIMAL.replace("WALKTHROUGH\nEND\n", "");
        let err = parse_script(&src).unwrap_err();
        assert!(err.0.iter().any(|d| d.message == "missing WALKTHROUGH section"));
    }

    #[test]
    fn containment_cycle_rejected() {
        let src = MINIMAL.replace(
            "WALKTHROUGH",
            "OBJECT box \"box\" LOC bag\nOBJECT bag \"bag\" LOC box\nWALKTHROUGH",
        );
        let err = parse_script(&src).unwrap_err();
        assert!(err.0.iter().any(|d| d.message.contains("contained in itself")));
    }

    #[test]
    fn unterminated_string_is_a_diagnostic() {
        let err = parse_script("GAME x\nROOM a \"A oops\nWALKTHROUGH\nEND").unwrap_err();
        assert!(err.0.iter().any(|d| d.message == "unterminated string" && d.line == 2));
    }

    #[test]
    fn rules_with_undeclared_verbs_still_compile() {
        let src = MINIMAL.replace("WALKTHROUGH", "RULE r ON \"dance\"\n  DO PRINT \"hi\"\nWALKTHROUGH");
        let w = parse_script(&src).unwrap();
        assert_eq!(w.rules[0].pattern.verb, "dance");
        assert!(!w.is_declared_verb("dance"));
    }

    #[test]
    fn arbitrary_input_never_panics() {
        for junk in ["", "\"", "RULE", "DO X", "OBJECT a b LOC", "WALKTHROUGH\nEND\nEND", "ANNOTATE 1 1 1 1"] {
            let _ = parse_script(junk);
        }
    }
}
