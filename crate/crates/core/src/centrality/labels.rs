use serde::{Deserialize, Serialize};

use super::{ScoreKind, ScoreVector};
use crate::error::{Result, ShsError};

/// Per-node SHS labels. When produced by top-k ranking, `k_percent` records
/// the fraction and exactly `ceil(k * n / 100)` entries are true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelVector {
    pub labels: Vec<bool>,
    pub k_percent: Option<KPercent>,
}

/// Bit-exact wrapper so labels stay `Eq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KPercent(u64);

impl KPercent {
    pub fn new(k: f64) -> Self {
        KPercent(k.to_bits())
    }

    pub fn get(self) -> f64 {
        f64::from_bits(self.0)
    }
}

impl LabelVector {
    pub fn unranked(labels: Vec<bool>) -> Self {
        LabelVector {
            labels,
            k_percent: None,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&b| b).count()
    }

    pub fn k(&self) -> Option<f64> {
        self.k_percent.map(KPercent::get)
    }

    pub fn permuted(&self, perm: &[usize]) -> LabelVector {
        let mut labels = vec![false; self.labels.len()];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = self.labels[old];
        }
        LabelVector {
            labels,
            k_percent: self.k_percent,
        }
    }
}

/// `ceil(k * n / 100)`, clamped to `n`.
pub fn top_k_count(n: usize, k_percent: f64) -> usize {
    let raw = k_percent * n as f64 / 100.0;
    // Absorb representation error such as 0.07 * 100 = 7.000000000000001.
    let count = (raw - raw.abs() * 1e-12).ceil();
    (count.max(0.0) as usize).min(n)
}

fn check_k(k_percent: f64) -> Result<()> {
    if k_percent > 0.0 && k_percent <= 100.0 {
        Ok(())
    } else {
        Err(ShsError::invalid(format!(
            "k_percent = {k_percent} is outside (0, 100]"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankOrder {
    Descending,
    Ascending,
}

/// Node ids sorted best-first; ties go to the lower id.
pub fn rank_nodes(values: &[f64], order: RankOrder) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..values.len()).collect();
    ids.sort_by(|&a, &b| {
        let by_score = match order {
            RankOrder::Descending => values[b].total_cmp(&values[a]),
            RankOrder::Ascending => values[a].total_cmp(&values[b]),
        };
        by_score.then(a.cmp(&b))
    });
    ids
}

fn label_ranked(values: &[f64], k_percent: f64, order: RankOrder) -> Result<LabelVector> {
    check_k(k_percent)?;
    let count = top_k_count(values.len(), k_percent);
    let mut labels = vec![false; values.len()];
    for &id in rank_nodes(values, order).iter().take(count) {
        labels[id] = true;
    }
    Ok(LabelVector {
        labels,
        k_percent: Some(KPercent::new(k_percent)),
    })
}

/// Ground-truth labeling: the `ceil(k * n / 100)` highest scores.
pub fn label_top_k(scores: &ScoreVector, k_percent: f64) -> Result<LabelVector> {
    label_ranked(&scores.values, k_percent, RankOrder::Descending)
}

/// Labels the most spanner-like nodes under a baseline score.
///
/// Closeness and predicted probability rank descending; constraint ranks
/// ascending unless `constraint_order` overrides it. Betweenness is ground
/// truth and is rejected here.
pub fn baseline_predict(
    scores: &ScoreVector,
    k_percent: f64,
    constraint_order: Option<RankOrder>,
) -> Result<LabelVector> {
    let order = match scores.kind {
        ScoreKind::Bc => return Err(ShsError::WrongScoreKind(ScoreKind::Bc)),
        ScoreKind::Closeness | ScoreKind::ProbShs => RankOrder::Descending,
        ScoreKind::Constraint => constraint_order.unwrap_or(RankOrder::Ascending),
    };
    label_ranked(&scores.values, k_percent, order)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// `|pred ∩ truth| / |truth|`.
    pub overlap: f64,
}

/// Overall accuracy plus precision, recall, F1 and top-k overlap on the SHS class.
pub fn accuracy(pred: &[bool], truth: &[bool]) -> Result<Metrics> {
    if pred.len() != truth.len() {
        return Err(ShsError::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(ShsError::invalid("cannot score an empty label set"));
    }
    let (mut tp, mut fp, mut fn_, mut agree) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
        if p == t {
            agree += 1;
        }
    }
    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    // With no predicted positives precision is reported as 0 unless there was nothing to find.
    let precision = if tp + fp == 0 && tp + fn_ > 0 {
        0.0
    } else {
        ratio(tp, tp + fp)
    };
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics {
        accuracy: agree as f64 / pred.len() as f64,
        precision,
        recall,
        f1,
        overlap: recall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(kind: ScoreKind, values: &[f64]) -> ScoreVector {
        ScoreVector::new(kind, values.to_vec())
    }

    #[test]
    fn top_five_of_hundred() {
        let values: Vec<f64> = (0..100).map(|i| ((i * 37) % 100) as f64).collect();
        let labels = label_top_k(&scores(ScoreKind::Bc, &values), 5.0).unwrap();
        assert_eq!(labels.positives(), 5);
        for (i, &l) in labels.labels.iter().enumerate() {
            assert_eq!(l, values[i] >= 95.0);
        }
    }

    #[test]
    fn ties_go_to_lower_ids() {
        let labels = label_top_k(&scores(ScoreKind::Bc, &[1.0; 10]), 20.0).unwrap();
        let on: Vec<usize> = (0..10).filter(|&i| labels.labels[i]).collect();
        assert_eq!(on, vec![0, 1]);
    }

    #[test]
    fn rank_invariance_under_scaling() {
        let values = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let scaled: Vec<f64> = values.iter().map(|v| v * 1000.0).collect();
        assert_eq!(
            label_top_k(&scores(ScoreKind::Bc, &values), 25.0).unwrap(),
            label_top_k(&scores(ScoreKind::Bc, &scaled), 25.0).unwrap()
        );
    }

    #[test]
    fn baseline_directions() {
        let c = baseline_predict(&scores(ScoreKind::Constraint, &[1.0, 0.2, 0.9, 0.8, 0.7]), 20.0, None).unwrap();
        assert_eq!(c.labels, vec![false, true, false, false, false]);
        let flipped = baseline_predict(
            &scores(ScoreKind::Constraint, &[1.0, 0.2, 0.9, 0.8, 0.7]),
            20.0,
            Some(RankOrder::Descending),
        )
        .unwrap();
        assert_eq!(flipped.labels, vec![true, false, false, false, false]);

        let star_cc = [1.0 / 5.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0];
        let cc = baseline_predict(&scores(ScoreKind::Closeness, &star_cc), 20.0, None).unwrap();
        assert_eq!(cc.positives(), 2);
        assert!(cc.labels[0]);

        let p = baseline_predict(&scores(ScoreKind::ProbShs, &[0.9, 0.9, 0.1]), 33.0, None).unwrap();
        assert_eq!(p.labels, vec![true, false, false]);
        let p = baseline_predict(&scores(ScoreKind::ProbShs, &[0.9, 0.9, 0.1]), 34.0, None).unwrap();
        assert!(p.labels[0]);
        assert_eq!(p.positives(), 2);

        assert!(baseline_predict(&scores(ScoreKind::Bc, &[1.0]), 50.0, None).is_err());
    }

    #[test]
    fn k_count_rounding() {
        assert_eq!(top_k_count(100, 5.0), 5);
        assert_eq!(top_k_count(1000, 7.0), 70);
        assert_eq!(top_k_count(3, 34.0), 2);
        assert_eq!(top_k_count(3, 33.0), 1);
        assert_eq!(top_k_count(7, 100.0), 7);
        assert!(label_top_k(&scores(ScoreKind::Bc, &[1.0]), 0.0).is_err());
    }

    #[test]
    fn accuracy_cases() {
        let truth: Vec<bool> = (0..100).map(|i| i < 5).collect();
        let m = accuracy(&truth, &truth).unwrap();
        assert_eq!((m.accuracy, m.f1), (1.0, 1.0));

        let normal = vec![false; 100];
        let m = accuracy(&normal, &truth).unwrap();
        assert_eq!(m.accuracy, 0.95);
        assert_eq!((m.recall, m.overlap), (0.0, 0.0));

        // shares 3 of 5 positives: 2 false negatives + 2 false positives
        let pred: Vec<bool> = (0..100).map(|i| i < 3 || i == 50 || i == 51).collect();
        let m = accuracy(&pred, &truth).unwrap();
        assert!((m.accuracy - 0.96).abs() < 1e-12);
        assert!((m.overlap - 0.6).abs() < 1e-12);

        assert!(accuracy(&[true], &[true, false]).is_err());
    }
}
