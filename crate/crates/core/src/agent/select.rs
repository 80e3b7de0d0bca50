use rand::Rng;

use crate::agent::AgentError;
use crate::env::{Env, EnvStep};

/// Softmax with max-subtraction. `temperature` must be positive.
pub fn softmax(values: &[f64], temperature: f64) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = values.iter().map(|&v| ((v - max) / temperature).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index of the first maximum.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.map_or(true, |b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub shaped: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub chosen: usize,
}

/// Samples an index from the softmax over shaped Q-values, or takes the
/// argmax when `greedy` is set.
pub fn select_action<R: Rng>(shaped: &[f64], temperature: f64, greedy: bool, rng: &mut R) -> Result<SelectionTrace, AgentError> {
    if shaped.is_empty() {
        return Err(AgentError::NoCandidates);
    }
    if greedy {
        let chosen = argmax(shaped).expect("non-empty");
        let mut probabilities = vec![0.0; shaped.len()];
        probabilities[chosen] = 1.0;
        return Ok(SelectionTrace {
            shaped: shaped.to_vec(),
            probabilities,
            chosen,
        });
    }
    if !(temperature > 0.0) {
        return Err(AgentError::Config("temperature must be positive".into()));
    }
    let probabilities = softmax(shaped, temperature);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut chosen = probabilities.len() - 1;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            chosen = i;
            break;
        }
    }
    Ok(SelectionTrace {
        shaped: shaped.to_vec(),
        probabilities,
        chosen,
    })
}

/// One executed attempt within a rejection loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub index: usize,
    pub outcome: EnvStep,
    /// Agent context after the step.
    pub context_after: String,
    /// Candidate indices still untried when this one was chosen (itself included).
    pub remaining: Vec<usize>,
}

/// Executes the sampled first choice, then after each invalid reply the
/// highest shaped-Q untried candidate, until a valid reply, exhaustion, or
/// the end of the episode.
pub fn rejection_loop<R: Rng>(
    env: &mut Env,
    candidates: &[String],
    shaped: &[f64],
    temperature: f64,
    greedy: bool,
    rng: &mut R,
) -> Result<Vec<Attempt>, AgentError> {
    let first = select_action(shaped, temperature, greedy, rng)?.chosen;
    let mut remaining: Vec<usize> = (0..candidates.len()).collect();
    let mut attempts = Vec::new();
    let mut pick = first;
    loop {
        let snapshot = remaining.clone();
        remaining.retain(|&i| i != pick);
        let outcome = env.step(&candidates[pick])?;
        let stop = outcome.valid || outcome.done || remaining.is_empty();
        attempts.push(Attempt {
            index: pick,
            outcome,
            context_after: env.context(),
            remaining: snapshot,
        });
        if stop {
            return Ok(attempts);
        }
        pick = remaining
            .iter()
            .copied()
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if shaped[b] >= shaped[i] => Some(b),
                _ => Some(i),
            })
            .expect("remaining non-empty");
    }
}
