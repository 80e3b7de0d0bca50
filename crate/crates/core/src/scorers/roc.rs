use serde::{Deserialize, Serialize};

use crate::scorers::ScorerError;

/// Exact area under the ROC curve: the probability that a random positive
/// outscores a random negative, ties counted as one half.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64, ScorerError> {
    if scores.len() != labels.len() {
        return Err(ScorerError::LengthMismatch(scores.len(), labels.len()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(ScorerError::SingleClass);
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(ScorerError::NonFinite);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Mid-ranks over tie groups (1-based).
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k]).count();
        pos_rank_sum += mid * pos_in_group as f64;
        i = j + 1;
    }
    let p = n_pos as f64;
    let n = n_neg as f64;
    Ok((pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub tau: f64,
    pub target_fpr: f64,
    pub achieved_fpr: f64,
    pub auroc: f64,
    pub dataset_size: usize,
    pub positives: usize,
}

/// Picks the smallest threshold whose false-positive rate (fraction of
/// negatives scoring strictly above it) does not exceed `target_fpr`.
pub fn calibrate_threshold(
    scores: &[f64],
    labels: &[bool],
    target_fpr: f64,
) -> Result<CalibrationReport, ScorerError> {
    let auc = auroc(scores, labels)?;
    if !(0.0..=1.0).contains(&target_fpr) {
        return Err(ScorerError::BadTarget(target_fpr));
    }
    let first = scores[0];
    if scores.iter().all(|&s| s == first) {
        return Err(ScorerError::Degenerate);
    }
    let mut negatives: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &l)| !l)
        .map(|(&s, _)| s)
        .collect();
    negatives.sort_by(|a, b| b.total_cmp(a));
    let m = ((target_fpr * negatives.len() as f64).floor() as usize).min(negatives.len() - 1);
    let tau = negatives[m];
    let above = negatives.iter().filter(|&&s| s > tau).count();
    Ok(CalibrationReport {
        tau,
        target_fpr,
        achieved_fpr: above as f64 / negatives.len() as f64,
        auroc: auc,
        dataset_size: scores.len(),
        positives: labels.iter().filter(|&&l| l).count(),
    })
}
