use std::sync::Arc;

use rand::Rng;

use crate::agent::features::{ActionTokens, ContextTokens};

/// Replay record `(c, a, r, c', A', done)`.
#[derive(Debug, Clone)]
pub struct Transition {
    pub context: Arc<ContextTokens>,
    pub action: ActionTokens,
    /// Learning reward (shaped in REWARD mode).
    pub reward: f64,
    pub next_context: Arc<ContextTokens>,
    pub next_candidates: Arc<Vec<ActionTokens>>,
    /// True only for WIN/DIE endings; step-limit cut-offs still bootstrap.
    pub terminal: bool,
}

#[derive(Debug, Clone)]
struct Ring {
    items: Vec<Transition>,
    capacity: usize,
    next: usize,
}

impl Ring {
    fn new(capacity: usize) -> Self {
        Ring {
            items: Vec::new(),
            capacity: capacity.max(1),
            next: 0,
        }
    }

    fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }
}

/// Two-pool buffer: transitions with positive reward are kept apart and
/// drawn for a fixed fraction of each batch.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    regular: Ring,
    priority: Ring,
    priority_fraction: f64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, priority_fraction: f64) -> Self {
        ReplayBuffer {
            regular: Ring::new(capacity),
            priority: Ring::new(capacity / 2),
            priority_fraction,
        }
    }

    pub fn len(&self) -> usize {
        self.regular.items.len() + self.priority.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push(&mut self, t: Transition) {
        if t.reward > 0.0 {
            self.priority.push(t);
        } else {
            self.regular.push(t);
        }
    }

    /// Indices drawn with replacement; `priority_fraction` of the batch comes
    /// from the positive-reward pool when it is non-empty.
    pub fn sample<'a, R: Rng>(&'a self, batch: usize, rng: &mut R) -> Vec<&'a Transition> {
        let mut out = Vec::with_capacity(batch);
        let n_pri = if self.priority.items.is_empty() {
            0
        } else if self.regular.items.is_empty() {
            batch
        } else {
            (batch as f64 * self.priority_fraction).round() as usize
        };
        for i in 0..batch {
            let pool = if i < n_pri { &self.priority } else { &self.regular };
            if pool.items.is_empty() {
                continue;
            }
            out.push(&pool.items[rng.gen_range(0..pool.items.len())]);
        }
        out
    }
}
