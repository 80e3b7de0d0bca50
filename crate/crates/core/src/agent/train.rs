use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agent::candidates::generate_candidates;
use crate::agent::features::{ActionTokens, ContextTokens, QFunction, DEFAULT_DIM_BITS};
use crate::agent::replay::{ReplayBuffer, Transition};
use crate::agent::select::{rejection_loop, Attempt};
use crate::agent::shaping::{Judgement, ShapingConfig};
use crate::agent::AgentError;
use crate::annotation::Category;
use crate::engine::{Ending, WorldModel};
use crate::env::{Env, EnvConfig, EpisodeLog, DEFAULT_STEP_LIMIT};
use crate::scorers::Scorer;
use crate::seeding::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    /// Candidate actions proposed per decision.
    pub candidates: usize,
    pub temperature: f64,
    pub learning_rate: f64,
    pub discount: f64,
    pub replay_capacity: usize,
    /// Replayed transitions per environment step, on top of the newest one.
    pub batch_size: usize,
    pub priority_fraction: f64,
    /// Total environment steps across all parallel environments.
    pub steps: u64,
    pub parallel_envs: usize,
    /// Stop once this many steps have run without any positive score.
    pub early_stop_after: u64,
    pub dim_bits: u32,
    pub init_std: f64,
    pub step_limit: u32,
    pub seed: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            candidates: 30,
            temperature: 1.0,
            learning_rate: 0.1,
            discount: 0.9,
            replay_capacity: 10_000,
            batch_size: 3,
            priority_fraction: 0.5,
            steps: 15_000,
            parallel_envs: 8,
            early_stop_after: 5_000,
            dim_bits: DEFAULT_DIM_BITS,
            init_std: 0.1,
            step_limit: DEFAULT_STEP_LIMIT,
            seed: 0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let fail = |m: &str| Err(AgentError::Config(m.to_string()));
        if self.candidates == 0 {
            return fail("candidate count must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.discount) {
            return fail("discount must lie in [0, 1]");
        }
        if self.parallel_envs == 0 {
            return fail("need at least one environment");
        }
        if !(self.temperature > 0.0) {
            return fail("temperature must be positive");
        }
        if !(self.learning_rate >= 0.0) {
            return fail("learning rate must be non-negative");
        }
        if !(1..=30).contains(&self.dim_bits) {
            return fail("dim_bits must lie in 1..=30");
        }
        Ok(())
    }
}

/// Counters over executed actions, judged by the exact oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionStats {
    pub actions: u64,
    /// Executed actions the oracle flags as harmful to others.
    pub flagged: u64,
    /// Flagged actions taken while an unflagged candidate was still untried.
    pub avoidable: u64,
}

impl DecisionStats {
    fn absorb(&mut self, attempts: &[Attempt], oracle_flags: &[bool]) {
        for a in attempts {
            self.actions += 1;
            if oracle_flags[a.index] {
                self.flagged += 1;
                if a.remaining.iter().any(|&j| !oracle_flags[j]) {
                    self.avoidable += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub step: u64,
    pub env: usize,
    pub game: String,
    pub k: u32,
    pub episode_return: i64,
    pub immorality: u32,
    pub length: usize,
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub episodes: Vec<EpisodeLog>,
    pub summaries: Vec<EpisodeSummary>,
    pub steps: u64,
    pub early_stopped: bool,
    pub stats: DecisionStats,
    pub q: QFunction,
}

struct Decision {
    attempts: Vec<Attempt>,
    judgement: Judgement,
    oracle_flags: Vec<bool>,
}

/// Scores candidates, shapes Q and runs the rejection loop once.
#[allow(clippy::too_many_arguments)]
fn decide(
    env: &mut Env,
    q: &QFunction,
    ctx: &ContextTokens,
    candidates: &[String],
    tokens: &[ActionTokens],
    shaping: &ShapingConfig,
    oracle: &Scorer,
    temperature: f64,
    greedy: bool,
    rng: &mut ChaCha8Rng,
) -> Result<Decision, AgentError> {
    let judgement = shaping.judge(candidates, &*env)?;
    let oracle_flags = match &shaping.scorer {
        Some(s) if s == oracle && shaping.mode != crate::agent::ShapingMode::None => judgement.flags.clone(),
        _ => {
            let mut flags = Vec::with_capacity(candidates.len());
            for c in candidates {
                flags.push(oracle.is_immoral(oracle.score(c, Some(&*env))?));
            }
            flags
        }
    };
    let shaped = shaping.shape(&q.values(ctx, tokens), &judgement)?;
    let attempts = rejection_loop(env, candidates, &shaped, temperature, greedy, rng)?;
    Ok(Decision {
        attempts,
        judgement,
        oracle_flags,
    })
}

struct Slot {
    env: Env,
    context: Arc<ContextTokens>,
    candidates: Arc<Vec<String>>,
    tokens: Arc<Vec<ActionTokens>>,
    episode: u64,
}

fn propose(env: &Env, k: usize, seed: u64) -> (Arc<Vec<String>>, Arc<Vec<ActionTokens>>) {
    let cands = generate_candidates(env.world(), env.state(), k, seed);
    let tokens = cands.iter().map(|c| ActionTokens::new(c)).collect();
    (Arc::new(cands), Arc::new(tokens))
}

fn episode_immorality(log: &EpisodeLog) -> u32 {
    log.transitions
        .iter()
        .flat_map(|t| &t.annotations)
        .map(|a| u32::from(a.degrees.get(Category::NegativeOthers)))
        .sum()
}

fn td_target(q: &QFunction, t: &Transition, discount: f64) -> f64 {
    if t.terminal || t.next_candidates.is_empty() {
        return t.reward;
    }
    let best = t
        .next_candidates
        .iter()
        .map(|a| q.value(&q.features(&t.next_context, a)))
        .fold(f64::NEG_INFINITY, f64::max);
    t.reward + discount * best
}

/// Trains one agent on one (game, starting percentage) cell.
pub fn train(
    world: &Arc<WorldModel>,
    starting_percentage: u32,
    agent: &AgentConfig,
    shaping: &ShapingConfig,
) -> Result<TrainOutput, AgentError> {
    agent.validate()?;
    shaping.validate()?;
    let seed = agent.seed;
    let mut config = EnvConfig::new(world.game_id.clone(), starting_percentage);
    config.step_limit = agent.step_limit;
    config.seed = seed;
    let (_, fresh) = Env::reset_with(Arc::clone(world), config)?;
    let s_k = fresh.score();

    let mut q = QFunction::random(agent.dim_bits, agent.init_std, seed);
    let mut replay = ReplayBuffer::new(agent.replay_capacity, agent.priority_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(("train", seed)));
    let oracle = Scorer::oracle();

    let cand_seed = |slot: usize, episode: u64, step: u32| derive_seed(("cand", seed, slot as u64, episode, step));
    let mut slots: Vec<Slot> = (0..agent.parallel_envs)
        .map(|i| {
            let env = fresh.clone();
            let (candidates, tokens) = propose(&env, agent.candidates, cand_seed(i, 0, 0));
            Slot {
                context: Arc::new(ContextTokens::new(&env.context())),
                env,
                candidates,
                tokens,
                episode: 0,
            }
        })
        .collect();

    let mut out = TrainOutput {
        episodes: Vec::new(),
        summaries: Vec::new(),
        steps: 0,
        early_stopped: false,
        stats: DecisionStats::default(),
        q: QFunction::zeros(1),
    };
    let mut best_return = i64::MIN;
    let empty: Arc<Vec<ActionTokens>> = Arc::new(Vec::new());

    'outer: loop {
        for (i, slot) in slots.iter_mut().enumerate() {
            if out.steps >= agent.steps {
                break 'outer;
            }
            if out.steps >= agent.early_stop_after && best_return <= 0 {
                out.early_stopped = true;
                break 'outer;
            }
            let decision = decide(
                &mut slot.env,
                &q,
                &slot.context,
                &slot.candidates,
                &slot.tokens,
                shaping,
                &oracle,
                agent.temperature,
                false,
                &mut rng,
            )?;
            out.stats.absorb(&decision.attempts, &decision.oracle_flags);
            best_return = best_return.max(slot.env.score() - s_k);

            let tokens = Arc::clone(&slot.tokens);
            let mut context = Arc::clone(&slot.context);
            let last = decision.attempts.len() - 1;
            for (n, att) in decision.attempts.iter().enumerate() {
                out.steps += 1;
                let next_context = Arc::new(ContextTokens::new(&att.context_after));
                let ending = slot.env.state().ending;
                let terminal = n == last && ending.is_some();
                let next_candidates = if n < last {
                    Arc::clone(&tokens)
                } else if terminal {
                    Arc::clone(&empty)
                } else {
                    let (c, t) = propose(&slot.env, agent.candidates, cand_seed(i, slot.episode, slot.env.steps()));
                    slot.candidates = c;
                    slot.tokens = Arc::clone(&t);
                    t
                };
                let reward = shaping.learning_reward(att.outcome.reward as f64, decision.judgement.flags[att.index]);
                let t = Transition {
                    context: Arc::clone(&context),
                    action: tokens[att.index].clone(),
                    reward,
                    next_context: Arc::clone(&next_context),
                    next_candidates,
                    terminal: terminal && matches!(ending, Some(Ending::Win | Ending::Die)),
                };
                if agent.learning_rate > 0.0 {
                    let target = td_target(&q, &t, agent.discount);
                    let f = q.features(&t.context, &t.action);
                    q.td_update(&f, target, agent.learning_rate);
                    replay.push(t);
                    for r in replay.sample(agent.batch_size, &mut rng) {
                        let target = td_target(&q, r, agent.discount);
                        let f = q.features(&r.context, &r.action);
                        q.td_update(&f, target, agent.learning_rate);
                    }
                }
                context = next_context;
            }
            slot.context = context;

            if slot.env.is_done() {
                let finished = std::mem::replace(&mut slot.env, fresh.clone());
                let log = finished.into_log();
                out.summaries.push(EpisodeSummary {
                    step: out.steps,
                    env: i,
                    game: world.game_id.clone(),
                    k: starting_percentage,
                    episode_return: log.final_score - log.s_k,
                    immorality: episode_immorality(&log),
                    length: log.len(),
                });
                out.episodes.push(log);
                slot.episode += 1;
                let (c, t) = propose(&slot.env, agent.candidates, cand_seed(i, slot.episode, 0));
                slot.candidates = c;
                slot.tokens = t;
                slot.context = Arc::new(ContextTokens::new(&slot.env.context()));
            }
        }
    }
    out.q = q;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub episodes: Vec<EpisodeLog>,
    pub stats: DecisionStats,
}

/// Runs `episodes` episodes with fixed weights and no learning.
pub fn evaluate(
    world: &Arc<WorldModel>,
    starting_percentage: u32,
    agent: &AgentConfig,
    shaping: &ShapingConfig,
    q: &QFunction,
    episodes: usize,
    greedy: bool,
) -> Result<EvalOutput, AgentError> {
    agent.validate()?;
    shaping.validate()?;
    let mut config = EnvConfig::new(world.game_id.clone(), starting_percentage);
    config.step_limit = agent.step_limit;
    config.seed = agent.seed;
    let (_, fresh) = Env::reset_with(Arc::clone(world), config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(("eval", agent.seed)));
    let oracle = Scorer::oracle();
    let mut out = EvalOutput {
        episodes: Vec::with_capacity(episodes),
        stats: DecisionStats::default(),
    };
    for ep in 0..episodes {
        let mut env = fresh.clone();
        while !env.is_done() {
            let seed = derive_seed(("eval-cand", agent.seed, ep as u64, env.steps()));
            let (cands, tokens) = propose(&env, agent.candidates, seed);
            let ctx = ContextTokens::new(&env.context());
            let d = decide(
                &mut env,
                q,
                &ctx,
                &cands,
                &tokens,
                shaping,
                &oracle,
                agent.temperature,
                greedy,
                &mut rng,
            )?;
            out.stats.absorb(&d.attempts, &d.oracle_flags);
        }
        out.episodes.push(env.into_log());
    }
    Ok(out)
}
