//! Episode lifecycle: fast-forwarded resets, logged steps, valid actions and
//! oracle lookahead.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::annotation::{Degrees, MoralAnnotation};
use crate::engine::{
    self, describe_room, object_tree_snapshot, parse_command, Ending, EngineError, GameState,
    Snapshot, WorldModel,
};

/// The starting percentages used throughout the experiments.
pub const STARTING_PERCENTAGES: [u32; 5] = [0, 20, 40, 60, 80];
pub const DEFAULT_STEP_LIMIT: u32 = 100;

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("unknown game '{0}'")]
    UnknownGame(String),
    #[error("starting percentage {0} is not one of 0, 20, 40, 60, 80")]
    BadStart(u32),
    #[error("step limit must be at least 1")]
    BadStepLimit,
    #[error("fast-forward failed: {0}")]
    FastForward(EngineError),
    #[error("episode is already done")]
    Done,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("log i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("log format: {0}")]
    Format(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub game_id: String,
    pub starting_percentage: u32,
    pub step_limit: u32,
    pub seed: u64,
}

impl EnvConfig {
    pub fn new(game_id: impl Into<String>, starting_percentage: u32) -> EnvConfig {
        EnvConfig {
            game_id: game_id.into(),
            starting_percentage,
            step_limit: DEFAULT_STEP_LIMIT,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if !STARTING_PERCENTAGES.contains(&self.starting_percentage) {
            return Err(EnvError::BadStart(self.starting_percentage));
        }
        if self.step_limit == 0 {
            return Err(EnvError::BadStepLimit);
        }
        Ok(())
    }
}

/// Number of walkthrough actions replayed before hand-off.
pub fn fast_forward_steps(starting_percentage: u32, walkthrough_len: usize) -> usize {
    starting_percentage as usize * walkthrough_len / 100
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DoneReason {
    Win,
    Die,
    Limit,
}

/// Compact annotation record kept in logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedAnnotation {
    pub degrees: Degrees,
    pub rule: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub attempt: bool,
}

impl From<&MoralAnnotation> for LoggedAnnotation {
    fn from(a: &MoralAnnotation) -> Self {
        LoggedAnnotation {
            degrees: a.degrees,
            rule: a.source_rule.clone(),
            attempt: a.attempt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub step: u32,
    pub action: String,
    pub observation: String,
    pub reward: i64,
    pub annotations: Vec<LoggedAnnotation>,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub config: EnvConfig,
    pub s_k: i64,
    pub s_max: i64,
    pub transitions: Vec<Transition>,
    pub final_score: i64,
    pub done_reason: Option<DoneReason>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum LogLine {
    Episode {
        config: EnvConfig,
        s_k: i64,
        s_max: i64,
        final_score: i64,
        done_reason: Option<DoneReason>,
    },
    Transition(Transition),
}

impl EpisodeLog {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn total_reward(&self) -> i64 {
        self.transitions.iter().map(|t| t.reward).sum()
    }

    /// Writes a header record followed by one record per transition.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), EnvError> {
        let header = LogLine::Episode {
            config: self.config.clone(),
            s_k: self.s_k,
            s_max: self.s_max,
            final_score: self.final_score,
            done_reason: self.done_reason,
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for t in &self.transitions {
            serde_json::to_writer(&mut out, &LogLine::Transition(t.clone()))?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads every episode from a stream written by [`write_jsonl`](Self::write_jsonl).
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<EpisodeLog>, EnvError> {
        let mut logs: Vec<EpisodeLog> = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<LogLine>(&line)? {
                LogLine::Episode {
                    config,
                    s_k,
                    s_max,
                    final_score,
                    done_reason,
                } => logs.push(EpisodeLog {
                    config,
                    s_k,
                    s_max,
                    transitions: Vec::new(),
                    final_score,
                    done_reason,
                }),
                LogLine::Transition(t) => match logs.last_mut() {
                    Some(log) => log.transitions.push(t),
                    None => {
                        return Err(EnvError::Format(serde::de::Error::custom(
                            "transition before episode header",
                        )))
                    }
                },
            }
        }
        Ok(logs)
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvStep {
    pub observation: String,
    pub reward: i64,
    pub done: bool,
    pub valid: bool,
    pub annotations: Vec<MoralAnnotation>,
    pub score: i64,
    pub moves: u32,
}

/// One episode handle.
#[derive(Debug, Clone)]
pub struct Env {
    world: Arc<WorldModel>,
    state: GameState,
    log: EpisodeLog,
    observation: String,
}

impl Env {
    /// Resets a bundled game by id.
    pub fn reset(config: EnvConfig) -> Result<(String, Env), EnvError> {
        let world =
            crate::suite::load_game(&config.game_id).ok_or_else(|| EnvError::UnknownGame(config.game_id.clone()))?;
        Env::reset_with(world, config)
    }

    /// Resets an episode on an already compiled world, replaying the first
    /// `floor(k/100 * |walkthrough|)` walkthrough actions.
    pub fn reset_with(world: Arc<WorldModel>, config: EnvConfig) -> Result<(String, Env), EnvError> {
        config.validate()?;
        if config.game_id != world.game_id {
            return Err(EnvError::UnknownGame(config.game_id.clone()));
        }
        let n = fast_forward_steps(config.starting_percentage, world.walkthrough.len());
        let (state, outcomes) = engine::replay(&world, world.walkthrough[..n].iter().map(String::as_str))
            .map_err(EnvError::FastForward)?;
        if state.done {
            return Err(EnvError::FastForward(EngineError::Replay {
                step: n,
                action: world.walkthrough[n - 1].clone(),
                reason: "game ended during fast-forward".to_string(),
            }));
        }
        let observation = match outcomes.last() {
            Some(o) => o.observation.clone(),
            None => describe_room(&world, &state),
        };
        let log = EpisodeLog {
            config,
            s_k: state.score,
            s_max: world.max_score,
            transitions: Vec::new(),
            final_score: state.score,
            done_reason: None,
        };
        let env = Env {
            world,
            state,
            log,
            observation: observation.clone(),
        };
        Ok((observation, env))
    }

    pub fn world(&self) -> &Arc<WorldModel> {
        &self.world
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn config(&self) -> &EnvConfig {
        &self.log.config
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn into_log(self) -> EpisodeLog {
        self.log
    }

    pub fn observation(&self) -> &str {
        &self.observation
    }

    pub fn score(&self) -> i64 {
        self.state.score
    }

    /// Steps taken since reset (fast-forward excluded).
    pub fn steps(&self) -> u32 {
        self.log.transitions.len() as u32
    }

    pub fn is_done(&self) -> bool {
        self.log.done_reason.is_some()
    }

    pub fn step(&mut self, action: &str) -> Result<EnvStep, EnvError> {
        if self.is_done() {
            return Err(EnvError::Done);
        }
        let out = engine::step(&self.world, &mut self.state, action)?;
        let step = self.steps() + 1;
        self.log.transitions.push(Transition {
            step,
            action: action.to_string(),
            observation: out.observation.clone(),
            reward: out.reward,
            annotations: out.annotations.iter().map(LoggedAnnotation::from).collect(),
            valid: out.valid,
        });
        self.log.final_score = self.state.score;
        self.log.done_reason = match self.state.ending {
            Some(Ending::Win) => Some(DoneReason::Win),
            Some(Ending::Die) => Some(DoneReason::Die),
            None if step >= self.log.config.step_limit => Some(DoneReason::Limit),
            None => None,
        };
        self.observation = out.observation.clone();
        Ok(EnvStep {
            observation: out.observation,
            reward: out.reward,
            done: self.is_done(),
            valid: out.valid,
            annotations: out.annotations,
            score: self.state.score,
            moves: step,
        })
    }

    pub fn valid_actions(&self) -> Vec<String> {
        engine::valid_actions(&self.world, &self.state)
    }

    /// Annotations the action would emit, computed on a copy of the state.
    pub fn peek(&self, action: &str) -> Vec<MoralAnnotation> {
        peek_state(&self.world, &self.state, action)
    }

    /// Text the agent conditions on: room, last observation and inventory.
    pub fn context(&self) -> String {
        let room = &self.world.room(self.state.room).name;
        format!(
            "{room}. {} {}",
            self.observation,
            engine::describe_inventory(&self.world, &self.state)
        )
    }

    pub fn snapshot(&self) -> Snapshot {
        object_tree_snapshot(&self.state, &self.world)
    }
}

/// Lookahead on an arbitrary state. Commands that no annotated rule can
/// answer are resolved without cloning.
pub fn peek_state(world: &WorldModel, state: &GameState, action: &str) -> Vec<MoralAnnotation> {
    if state.done {
        return Vec::new();
    }
    let Some(cmd) = parse_command(action, state, world) else {
        return Vec::new();
    };
    if !engine::may_annotate(world, &cmd) {
        return Vec::new();
    }
    let mut probe = state.clone();
    engine::execute(world, &mut probe, &cmd).annotations
}

/// Number of distinct rules that emitted an annotation across the logs.
pub fn unique_annotation_coverage<'a>(logs: impl IntoIterator<Item = &'a EpisodeLog>) -> usize {
    let mut rules = BTreeSet::new();
    for log in logs {
        for t in &log.transitions {
            for a in &t.annotations {
                rules.insert(a.rule.as_str());
            }
        }
    }
    rules.len()
}
