use std::collections::HashMap;

use crate::engine::normalize_words;
use crate::scorers::ScorerError;

/// Word weights read from `<word> <weight>` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    weights: HashMap<String, f64>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Lexicon, ScorerError> {
        let mut weights = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| ScorerError::Lexicon {
                line: i + 1,
                message: message.to_string(),
            };
            let mut parts = line.split_whitespace();
            let (Some(word), Some(weight), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected '<word> <weight>'"));
            };
            let weight: f64 = weight.parse().map_err(|_| err("weight is not a number"))?;
            if !weight.is_finite() {
                return Err(err("weight must be finite"));
            }
            if weights.insert(word.to_lowercase(), weight).is_some() {
                return Err(err("duplicate word"));
            }
        }
        Ok(Lexicon { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, word: &str) -> Option<f64> {
        self.weights.get(word).copied()
    }

    fn matched(&self, action: &str) -> Vec<f64> {
        normalize_words(action)
            .iter()
            .filter_map(|w| self.weights.get(w).copied())
            .collect()
    }

    /// Largest weight among matched words, or 0 when nothing matches.
    pub fn max_weight(&self, action: &str) -> f64 {
        self.matched(action).into_iter().reduce(f64::max).unwrap_or(0.0)
    }

    /// Sum of signed weights of matched words.
    pub fn utility(&self, action: &str) -> f64 {
        self.matched(action).iter().sum()
    }
}
