use serde::{Deserialize, Serialize};

use crate::agent::AgentError;
use crate::scorers::{Lookahead, Scorer, ScorerError};

pub const DEFAULT_GAMMA: f64 = 10.0;
pub const DEFAULT_PENALTY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShapingMode {
    None,
    Policy,
    Soft,
    Reward,
    UtilityPolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapingConfig {
    pub mode: ShapingMode,
    pub gamma: f64,
    pub penalty: f64,
    pub scorer: Option<Scorer>,
}

impl ShapingConfig {
    pub fn none() -> Self {
        ShapingConfig {
            mode: ShapingMode::None,
            gamma: DEFAULT_GAMMA,
            penalty: DEFAULT_PENALTY,
            scorer: None,
        }
    }

    pub fn with(mode: ShapingMode, scorer: Scorer) -> Self {
        ShapingConfig {
            mode,
            scorer: Some(scorer),
            ..ShapingConfig::none()
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        if !(self.gamma >= 0.0) || !(self.penalty >= 0.0) {
            return Err(AgentError::Config("gamma and penalty must be non-negative".into()));
        }
        if self.mode != ShapingMode::None && self.scorer.is_none() {
            return Err(AgentError::Config(format!("{:?} shaping needs a scorer", self.mode)));
        }
        Ok(())
    }

    /// Scores and flags every candidate with the bound scorer.
    pub fn judge(&self, candidates: &[String], look: &dyn Lookahead) -> Result<Judgement, ScorerError> {
        let Some(scorer) = self.scorer.as_ref().filter(|_| self.mode != ShapingMode::None) else {
            return Ok(Judgement {
                scores: vec![0.0; candidates.len()],
                flags: vec![false; candidates.len()],
            });
        };
        let mut scores = Vec::with_capacity(candidates.len());
        let mut flags = Vec::with_capacity(candidates.len());
        for c in candidates {
            let s = scorer.score(c, Some(look))?;
            flags.push(scorer.is_immoral(s));
            scores.push(scorer.immorality_score(s));
        }
        Ok(Judgement { scores, flags })
    }

    /// Q-values after policy shaping; identity for NONE and REWARD.
    pub fn shape(&self, q: &[f64], judgement: &Judgement) -> Result<Vec<f64>, AgentError> {
        match self.mode {
            ShapingMode::None | ShapingMode::Reward => Ok(q.to_vec()),
            ShapingMode::Policy | ShapingMode::UtilityPolicy => shape_q(q, &judgement.flags, self.gamma),
            ShapingMode::Soft => shape_q_soft(q, &judgement.scores, self.gamma),
        }
    }

    /// Learning reward; metrics always see the raw reward.
    pub fn learning_reward(&self, raw: f64, flagged: bool) -> f64 {
        match self.mode {
            ShapingMode::Reward => shape_reward(raw, flagged, self.penalty),
            _ => raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Judgement {
    /// Scores oriented so that larger means more immoral.
    pub scores: Vec<f64>,
    pub flags: Vec<bool>,
}

/// `q_i - gamma * flag_i`.
pub fn shape_q(q: &[f64], flags: &[bool], gamma: f64) -> Result<Vec<f64>, AgentError> {
    if q.len() != flags.len() {
        return Err(AgentError::LengthMismatch(q.len(), flags.len()));
    }
    Ok(q
        .iter()
        .zip(flags)
        .map(|(&v, &f)| if f { v - gamma } else { v })
        .collect())
}

/// `q_i - gamma * score_i`.
pub fn shape_q_soft(q: &[f64], scores: &[f64], gamma: f64) -> Result<Vec<f64>, AgentError> {
    if q.len() != scores.len() {
        return Err(AgentError::LengthMismatch(q.len(), scores.len()));
    }
    Ok(q.iter().zip(scores).map(|(&v, &s)| v - gamma * s).collect())
}

pub fn shape_reward(reward: f64, flagged: bool, penalty: f64) -> f64 {
    if flagged {
        reward - penalty
    } else {
        reward
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_and_soft_formulas() {
        assert_eq!(shape_q(&[1.0, 2.0], &[false, true], 10.0).unwrap(), vec![1.0, -8.0]);
        assert_eq!(shape_q(&[1.0, 2.0], &[true, true], 0.0).unwrap(), vec![1.0, 2.0]);
        assert_eq!(shape_q_soft(&[0.0, 0.0], &[0.5, 1.0], 10.0).unwrap(), vec![-5.0, -10.0]);
        assert!(shape_q(&[1.0], &[], 10.0).is_err());
    }

    #[test]
    fn reward_penalty() {
        assert_eq!(shape_reward(5.0, false, 0.5), 5.0);
        assert_eq!(shape_reward(0.0, true, 0.5), -0.5);
    }
}
