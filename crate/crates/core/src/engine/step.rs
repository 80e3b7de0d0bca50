use serde::{Deserialize, Serialize};

use crate::annotation::MoralAnnotation;
use crate::engine::command::{parse_command, Command};
use crate::engine::state::{Ending, GameState};
use crate::engine::world::{Condition, Effect, Location, Pattern, RoomId, Rule, WorldModel};
use crate::engine::EngineError;

/// Reply for any action the game does not understand or cannot perform.
pub const INVALID_REPLY: &str = "Nothing happens.";
/// Reply when an annotated rule matched but its preconditions failed.
pub const ATTEMPT_REPLY: &str = "You try, but it doesn't work out.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub observation: String,
    pub reward: i64,
    pub annotations: Vec<MoralAnnotation>,
    pub done: bool,
    pub valid: bool,
}

impl StepOutcome {
    fn invalid(done: bool) -> StepOutcome {
        StepOutcome {
            observation: INVALID_REPLY.to_string(),
            reward: 0,
            annotations: Vec::new(),
            done,
            valid: false,
        }
    }
}

/// Room name, description and loose visible objects.
pub fn describe_room(world: &WorldModel, state: &GameState) -> String {
    let room = world.room(state.room);
    let mut text = format!("{}. {}", room.name, room.description);
    let here: Vec<&str> = state
        .visible_objects(world)
        .into_iter()
        .filter(|&o| state.parent(o) == Location::Room(state.room))
        .map(|o| world.object(o).name.as_str())
        .collect();
    if !here.is_empty() {
        text.push_str(" You see: ");
        text.push_str(&here.join(", "));
        text.push('.');
    }
    text
}

pub fn describe_inventory(world: &WorldModel, state: &GameState) -> String {
    let held: Vec<&str> = state
        .inventory()
        .into_iter()
        .map(|o| world.object(o).name.as_str())
        .collect();
    if held.is_empty() {
        "You are empty-handed.".to_string()
    } else {
        format!("You are carrying: {}.", held.join(", "))
    }
}

pub(crate) fn holds(cond: &Condition, state: &GameState, world: &WorldModel) -> bool {
    match cond {
        Condition::At(r) => state.room == *r,
        Condition::Has(o) => state.carries(*o),
        Condition::Here(o) => state.is_here(world, *o),
        Condition::Attr(o, a, v) => state.attr(*o, *a) == *v,
        Condition::Not(c) => !holds(c, state, world),
    }
}

pub(crate) fn pattern_matches(pattern: &Pattern, cmd: &Command) -> bool {
    match cmd {
        Command::Go(_) => false,
        Command::Act {
            verb,
            direct,
            indirect,
        } => pattern.verb == *verb && pattern.direct == *direct && pattern.indirect == *indirect,
    }
}

/// Whether any annotated rule could respond to `cmd`.
pub(crate) fn may_annotate(world: &WorldModel, cmd: &Command) -> bool {
    match cmd {
        Command::Go(_) => false,
        Command::Act { verb, .. } => world.rules_for(verb).iter().any(|&i| {
            let r = &world.rules[i];
            r.annotation.is_some() && pattern_matches(&r.pattern, cmd)
        }),
    }
}

/// Executes one player action. Stepping a finished episode is an error.
pub fn step(world: &WorldModel, state: &mut GameState, action: &str) -> Result<StepOutcome, EngineError> {
    if state.done {
        return Err(EngineError::EpisodeDone);
    }
    state.moves += 1;
    let Some(cmd) = parse_command(action, state, world) else {
        return Ok(StepOutcome::invalid(false));
    };
    Ok(execute(world, state, &cmd))
}

pub(crate) fn execute(world: &WorldModel, state: &mut GameState, cmd: &Command) -> StepOutcome {
    let (verb, direct, indirect) = match cmd {
        Command::Go(dir) => {
            return match world.room(state.room).exit(*dir) {
                Some(to) => {
                    state.room = to;
                    StepOutcome {
                        observation: describe_room(world, state),
                        reward: 0,
                        annotations: Vec::new(),
                        done: false,
                        valid: true,
                    }
                }
                None => StepOutcome::invalid(false),
            };
        }
        Command::Act {
            verb,
            direct,
            indirect,
        } => (verb, direct, indirect),
    };

    for &ri in world.rules_for(verb) {
        let rule = &world.rules[ri];
        if rule.pattern.direct != *direct || rule.pattern.indirect != *indirect {
            continue;
        }
        if rule.preconditions.iter().all(|c| holds(c, state, world)) {
            return fire(world, state, ri, rule);
        }
        if let Some(spec) = &rule.annotation {
            return StepOutcome {
                observation: ATTEMPT_REPLY.to_string(),
                reward: 0,
                annotations: vec![MoralAnnotation {
                    degrees: spec.degrees.attempted(),
                    description: spec.description.clone(),
                    source_rule: rule.id.clone(),
                    attempt: true,
                }],
                done: false,
                valid: true,
            };
        }
    }

    builtin(world, state, verb, *direct, indirect.is_some())
}

fn fire(world: &WorldModel, state: &mut GameState, ri: usize, rule: &Rule) -> StepOutcome {
    let first_time = !state.fired[ri];
    state.fired[ri] = true;
    let mut reward = 0;
    let mut text: Vec<String> = Vec::new();
    for effect in &rule.effects {
        match effect {
            Effect::Move(o, loc) => {
                // Refuse moves that would put an object inside itself.
                let cyclic = match loc {
                    Location::Object(p) => p == o || state.is_inside(*p, *o),
                    _ => false,
                };
                if !cyclic {
                    state.objects[o.0].parent = *loc;
                }
            }
            Effect::MovePlayer(r) => {
                state.room = *r;
                text.push(describe_room(world, state));
            }
            Effect::SetAttr(o, a, v) => state.set_attr(*o, *a, *v),
            Effect::Print(t) => text.push(t.clone()),
            Effect::Score(n) => {
                if first_time {
                    reward += n;
                }
            }
            Effect::Reveal(o) => state.objects[o.0].revealed = true,
            Effect::Destroy(o) => state.objects[o.0].parent = Location::Limbo,
            Effect::Win => end(state, Ending::Win),
            Effect::Die => end(state, Ending::Die),
        }
    }
    state.score += reward;
    let annotations = rule
        .annotation
        .iter()
        .map(|spec| MoralAnnotation {
            degrees: spec.degrees,
            description: spec.description.clone(),
            source_rule: rule.id.clone(),
            attempt: false,
        })
        .collect();
    StepOutcome {
        observation: if text.is_empty() {
            "Done.".to_string()
        } else {
            text.join(" ")
        },
        reward,
        annotations,
        done: state.done,
        valid: true,
    }
}

fn end(state: &mut GameState, ending: Ending) {
    if !state.done {
        state.done = true;
        state.ending = Some(ending);
    }
}

fn builtin(
    world: &WorldModel,
    state: &mut GameState,
    verb: &str,
    direct: Option<crate::engine::world::ObjectId>,
    has_indirect: bool,
) -> StepOutcome {
    let ok = |observation: String| StepOutcome {
        observation,
        reward: 0,
        annotations: Vec::new(),
        done: false,
        valid: true,
    };
    match (verb, direct, has_indirect) {
        ("take", Some(o), false) if world.object(o).flags.takeable && !state.carries(o) => {
            state.objects[o.0].parent = Location::Player;
            ok("Taken.".to_string())
        }
        ("drop", Some(o), false) if state.parent(o) == Location::Player => {
            state.objects[o.0].parent = Location::Room(state.room);
            ok("Dropped.".to_string())
        }
        ("look", None, false) => ok(describe_room(world, state)),
        ("inventory", None, false) => ok(describe_inventory(world, state)),
        _ => StepOutcome::invalid(false),
    }
}

/// Replays a list of actions from the initial state, stopping at the first
/// invalid step or premature ending.
pub fn replay<'a>(
    world: &WorldModel,
    actions: impl IntoIterator<Item = &'a str>,
) -> Result<(GameState, Vec<StepOutcome>), EngineError> {
    let mut state = GameState::initial(world);
    let mut outcomes = Vec::new();
    for (i, action) in actions.into_iter().enumerate() {
        if state.done {
            return Err(EngineError::Replay {
                step: i + 1,
                action: action.to_string(),
                reason: "episode already ended".to_string(),
            });
        }
        let out = step(world, &mut state, action)?;
        if !out.valid {
            return Err(EngineError::Replay {
                step: i + 1,
                action: action.to_string(),
                reason: out.observation,
            });
        }
        outcomes.push(out);
    }
    Ok((state, outcomes))
}

/// Rooms reachable from the start via exits and MOVE PLAYER effects.
pub(crate) fn reachable_rooms(world: &WorldModel) -> Vec<bool> {
    let mut seen = vec![false; world.rooms.len()];
    if world.rooms.is_empty() {
        return seen;
    }
    let teleports: Vec<RoomId> = world
        .rules
        .iter()
        .flat_map(|r| r.effects.iter())
        .filter_map(|e| match e {
            Effect::MovePlayer(r) => Some(*r),
            _ => None,
        })
        .collect();
    let mut queue = vec![world.start_room()];
    queue.extend(teleports);
    while let Some(r) = queue.pop() {
        if std::mem::replace(&mut seen[r.0], true) {
            continue;
        }
        queue.extend(world.room(r).exits.iter().flatten().copied());
    }
    seen
}
