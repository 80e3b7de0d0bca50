//! Linear Q-function over hashed text features.

use std::hash::Hasher;

use fnv::FnvHasher;
use rand_distr::{Distribution, Normal};

use crate::engine::normalize_words;
use crate::seeding::rng_for;

pub const DEFAULT_DIM_BITS: u32 = 20;

const CONTEXT_NS: u8 = b'c';
const ACTION_NS: u8 = b'a';
const BIAS: u64 = 0x9e37_79b9_7f4a_7c15;

fn hash_token(ns: u8, word: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write_u8(ns);
    h.write(word.as_bytes());
    h.finish()
}

fn mix(a: u64, b: u64) -> u64 {
    let mut x = a ^ b.rotate_left(29).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 31;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 29)
}

/// Distinct hashed word tokens of a text, in first-occurrence order.
fn hashed_words(ns: u8, text: &str) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for w in normalize_words(text) {
        let h = hash_token(ns, &w);
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

/// Pre-hashed context tokens, shared by all candidates of one decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextTokens(pub(crate) Vec<u64>);

impl ContextTokens {
    pub fn new(text: &str) -> Self {
        ContextTokens(hashed_words(CONTEXT_NS, text))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTokens(pub(crate) Vec<u64>);

impl ActionTokens {
    pub fn new(text: &str) -> Self {
        ActionTokens(hashed_words(ACTION_NS, text))
    }
}

/// Sparse binary feature vector scaled to unit norm (up to collisions).
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    pub indices: Vec<u32>,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct QFunction {
    weights: Vec<f64>,
    mask: u64,
}

impl QFunction {
    pub fn zeros(dim_bits: u32) -> Self {
        QFunction {
            weights: vec![0.0; 1usize << dim_bits],
            mask: (1u64 << dim_bits) - 1,
        }
    }

    /// Gaussian initial weights with standard deviation `std`.
    pub fn random(dim_bits: u32, std: f64, seed: u64) -> Self {
        let mut q = QFunction::zeros(dim_bits);
        if std > 0.0 {
            let normal = Normal::new(0.0, std).expect("finite std");
            let mut rng = rng_for(("qinit", seed));
            for w in &mut q.weights {
                *w = normal.sample(&mut rng);
            }
        }
        q
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    /// Bias, context tokens, action tokens and every context-action pair.
    pub fn features(&self, ctx: &ContextTokens, act: &ActionTokens) -> Features {
        let mut indices = Vec::with_capacity(1 + ctx.0.len() + act.0.len() * (1 + ctx.0.len()));
        indices.push((BIAS & self.mask) as u32);
        indices.extend(ctx.0.iter().map(|&c| (c & self.mask) as u32));
        for &a in &act.0 {
            indices.push((a & self.mask) as u32);
            indices.extend(ctx.0.iter().map(|&c| (mix(c, a) & self.mask) as u32));
        }
        let scale = 1.0 / (indices.len() as f64).sqrt();
        Features { indices, scale }
    }

    pub fn value(&self, f: &Features) -> f64 {
        f.scale * f.indices.iter().map(|&i| self.weights[i as usize]).sum::<f64>()
    }

    pub fn q_value(&self, context: &str, action: &str) -> f64 {
        self.value(&self.features(&ContextTokens::new(context), &ActionTokens::new(action)))
    }

    pub fn values(&self, ctx: &ContextTokens, actions: &[ActionTokens]) -> Vec<f64> {
        actions.iter().map(|a| self.value(&self.features(ctx, a))).collect()
    }

    /// Moves `Q(f)` toward `target`: `w += lr * (target - Q) * x`.
    /// Returns the TD error before the update.
    pub fn td_update(&mut self, f: &Features, target: f64, lr: f64) -> f64 {
        let delta = target - self.value(f);
        let step = lr * delta * f.scale;
        for &i in &f.indices {
            self.weights[i as usize] += step;
        }
        delta
    }
}
