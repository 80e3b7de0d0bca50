use crate::engine::state::GameState;
use crate::engine::world::{Direction, ObjectId, WorldModel};

const ARTICLES: [&str; 3] = ["the", "a", "an"];

/// Lower-cases, drops punctuation and articles, and splits on whitespace.
pub fn normalize_words(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '\'' {
                c.to_ascii_lowercase()
            } else {
                ' '
            }
        })
        .collect();
    cleaned
        .split_whitespace()
        .filter(|w| !ARTICLES.contains(w))
        .map(str::to_string)
        .collect()
}

/// Normalized action text, as compared against walkthrough lines.
pub fn normalize_action(text: &str) -> String {
    normalize_words(text).join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Go(Direction),
    Act {
        verb: String,
        direct: Option<ObjectId>,
        indirect: Option<(String, ObjectId)>,
    },
}

impl Command {
    pub fn render(&self, world: &WorldModel) -> String {
        match self {
            Command::Go(d) => d.word().to_string(),
            Command::Act {
                verb,
                direct,
                indirect,
            } => {
                let mut out = verb.clone();
                if let Some(o) = direct {
                    out.push(' ');
                    out.push_str(&world.object(*o).noun());
                }
                if let Some((prep, o)) = indirect {
                    out.push(' ');
                    out.push_str(prep);
                    out.push(' ');
                    out.push_str(&world.object(*o).noun());
                }
                out
            }
        }
    }
}

/// Parses raw player input against the current scope. `None` means the
/// input is unparsed: unknown verb, malformed phrase, or a noun that names
/// nothing visible.
pub fn parse_command(text: &str, state: &GameState, world: &WorldModel) -> Option<Command> {
    let words = normalize_words(text);
    match words.as_slice() {
        [] => return None,
        [w] => {
            if let Some(d) = Direction::parse(w) {
                return Some(Command::Go(d));
            }
        }
        [go, rest @ ..] if go == "go" => {
            return match rest {
                [w] => Direction::parse(w).map(Command::Go),
                _ => None,
            };
        }
        _ => {}
    }
    let verb = world.canonical_verb(&words[0])?.to_string();
    let rest = &words[1..];
    let (direct_words, indirect) = match rest.iter().position(|w| world.is_preposition(w)) {
        Some(i) => (&rest[..i], Some((rest[i].clone(), &rest[i + 1..]))),
        None => (rest, None),
    };
    let direct = if direct_words.is_empty() {
        if indirect.is_some() {
            return None;
        }
        None
    } else {
        Some(resolve_noun(direct_words, state, world)?)
    };
    let indirect = match indirect {
        Some((_, [])) => return None,
        Some((prep, phrase)) => Some((prep, resolve_noun(phrase, state, world)?)),
        None => None,
    };
    Some(Command::Act {
        verb,
        direct,
        indirect,
    })
}

fn resolve_noun(phrase: &[String], state: &GameState, world: &WorldModel) -> Option<ObjectId> {
    let mut best: Option<(bool, ObjectId)> = None;
    for (i, obj) in world.objects.iter().enumerate() {
        if !phrase.iter().all(|w| obj.answers_to(w)) {
            continue;
        }
        let id = ObjectId(i);
        if !state.is_visible(world, id) {
            continue;
        }
        let carried = state.carries(id);
        match best {
            None => best = Some((carried, id)),
            Some((false, _)) if carried => best = Some((carried, id)),
            _ => {}
        }
    }
    best.map(|(_, id)| id)
}
