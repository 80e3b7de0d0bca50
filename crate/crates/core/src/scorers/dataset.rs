use std::sync::Arc;

use crate::agent::generate_candidates;
use crate::engine::{self, EngineError, GameState, WorldModel};
use crate::env::peek_state;
use crate::scorers::{auroc, noisy_score, oracle_flag, Scorer, ScorerError, StateProbe};
use crate::seeding::derive_seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RocItem {
    pub game: String,
    /// Walkthrough step index of the state the action was proposed in.
    pub step: usize,
    pub action: String,
    pub label: bool,
    state: usize,
}

/// Candidate actions proposed along expert walkthroughs, labelled by the
/// exact oracle. States are kept so oracle scorers can be re-run.
#[derive(Debug, Clone, Default)]
pub struct RocDataset {
    pub items: Vec<RocItem>,
    states: Vec<(Arc<WorldModel>, GameState)>,
}

pub fn build_roc_dataset(world: &Arc<WorldModel>, n_per_step: usize, seed: u64) -> Result<RocDataset, EngineError> {
    let mut data = RocDataset::default();
    let mut state = GameState::initial(world);
    for (i, action) in world.walkthrough.iter().enumerate() {
        let mut cands = generate_candidates(world, &state, n_per_step, derive_seed((seed, world.game_id.as_str(), i as u64)));
        let mut seen = std::collections::HashSet::new();
        cands.retain(|c| seen.insert(c.clone()));
        data.states.push((Arc::clone(world), state.clone()));
        let idx = data.states.len() - 1;
        for c in cands {
            let label = oracle_flag(&peek_state(world, &state, &c), true);
            data.items.push(RocItem {
                game: world.game_id.clone(),
                step: i,
                action: c,
                label,
                state: idx,
            });
        }
        let out = engine::step(world, &mut state, action)?;
        if !out.valid {
            return Err(EngineError::Replay {
                step: i + 1,
                action: action.clone(),
                reason: out.observation,
            });
        }
    }
    Ok(data)
}

impl RocDataset {
    pub fn extend(&mut self, other: RocDataset) {
        let offset = self.states.len();
        self.states.extend(other.states);
        self.items.extend(other.items.into_iter().map(|mut it| {
            it.state += offset;
            it
        }));
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.items.iter().map(|i| i.label).collect()
    }

    pub fn positives(&self) -> usize {
        self.items.iter().filter(|i| i.label).count()
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.items.is_empty() {
            0.0
        } else {
            self.positives() as f64 / self.items.len() as f64
        }
    }

    /// Raw scores of every item under `scorer`.
    pub fn scores(&self, scorer: &Scorer) -> Result<Vec<f64>, ScorerError> {
        self.items
            .iter()
            .map(|it| {
                let (world, state) = &self.states[it.state];
                let probe = StateProbe {
                    world,
                    state,
                    step: it.step as u64,
                };
                scorer.score(&it.action, Some(&probe))
            })
            .collect()
    }
}

/// Finds the noisy-oracle noise scale whose AUROC on `dataset` is closest to
/// `target` by bisection. Returns `(sigma, achieved_auroc)`.
pub fn fit_noise_sigma(dataset: &RocDataset, target: f64, seed: u64) -> Result<(f64, f64), ScorerError> {
    let labels = dataset.labels();
    let auc_at = |sigma: f64| -> Result<f64, ScorerError> {
        let scores: Vec<f64> = dataset
            .items
            .iter()
            .map(|it| noisy_score(it.label, sigma, seed, it.step as u64, &it.action))
            .collect();
        auroc(&scores, &labels)
    };
    let (mut lo, mut hi) = (0.0f64, 8.0f64);
    let mut hi_auc = auc_at(hi)?;
    while hi_auc > target && hi < 1024.0 {
        lo = hi;
        hi *= 2.0;
        hi_auc = auc_at(hi)?;
    }
    let mut best = (hi, hi_auc);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let auc = auc_at(mid)?;
        if (auc - target).abs() < (best.1 - target).abs() {
            best = (mid, auc);
        }
        if auc > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}
