//! Shared domain types: datasets, costs, weights, stumps and ensembles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::compensated_sum;

/// Tolerance accepted on the total mass of an input distribution.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Binary-labelled training data, stored positives first.
///
/// Rows are stable-sorted on construction so that examples `0..m` are
/// positive and `m..n` negative; [`Dataset::permutation`] maps each stored
/// row back to its position in the input.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    features: Vec<f64>,
    labels: Vec<i8>,
    n_pos: usize,
    costs: Option<Vec<f64>>,
    permutation: Vec<usize>,
}

impl Dataset {
    /// Builds a dataset from rows in any label order.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<i8>, costs: Option<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::Input(format!("{n} rows but {} labels", labels.len())));
        }
        if n < 2 {
            return Err(Error::Input(format!("need at least two examples, got {n}")));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::Input("examples have no features".into()));
        }
        if let Some(c) = &costs {
            if c.len() != n {
                return Err(Error::Input(format!("{n} rows but {} costs", c.len())));
            }
            if let Some((i, v)) = c.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
                return Err(Error::Input(format!("cost of example {i} must be positive, got {v}")));
            }
        }
        for (i, (row, &y)) in rows.iter().zip(&labels).enumerate() {
            if row.len() != d {
                return Err(Error::Input(format!("row {i} has {} features, expected {d}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Input(format!("row {i} contains non-finite value {v}")));
            }
            if y != 1 && y != -1 {
                return Err(Error::Input(format!("label of row {i} must be -1 or 1, got {y}")));
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        // stable: positives keep their relative order, as do negatives
        order.sort_by_key(|&i| if labels[i] == 1 { 0 } else { 1 });
        let n_pos = labels.iter().filter(|&&y| y == 1).count();
        if n_pos == 0 || n_pos == n {
            return Err(Error::Input(format!(
                "both classes must be present ({n_pos} positives of {n})"
            )));
        }

        let mut features = Vec::with_capacity(n * d);
        for &i in &order {
            features.extend_from_slice(&rows[i]);
        }
        let sorted_labels = order.iter().map(|&i| labels[i]).collect();
        let sorted_costs = costs.map(|c| order.iter().map(|&i| c[i]).collect());
        Ok(Self {
            n_features: d,
            features,
            labels: sorted_labels,
            n_pos,
            costs: sorted_costs,
            permutation: order,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Number of positive examples (`m`).
    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_neg(&self) -> usize {
        self.n() - self.n_pos
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn feature(&self, i: usize, j: usize) -> f64 {
        self.features[i * self.n_features + j]
    }

    pub fn label(&self, i: usize) -> i8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn is_positive(&self, i: usize) -> bool {
        i < self.n_pos
    }

    /// Optional per-example costs (example-level asymmetry).
    pub fn costs(&self) -> Option<&[f64]> {
        self.costs.as_deref()
    }

    /// Original input position of each stored row.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks(self.n_features)
    }

    /// Returns a copy with per-example costs attached (or removed).
    pub fn with_costs(&self, costs: Option<Vec<f64>>) -> Result<Self> {
        let rows = self.rows().map(|r| r.to_vec()).collect();
        Self::new(rows, self.labels.clone(), costs).map(|d| d.relative_to(self))
    }

    /// Same examples with every label negated, re-sorted positives first.
    pub fn swap_labels(&self) -> Self {
        let rows = self.rows().map(|r| r.to_vec()).collect();
        let labels = self.labels.iter().map(|y| -y).collect();
        Self::new(rows, labels, self.costs.clone()).expect("label swap preserves validity").relative_to(self)
    }

    /// Rewrites a permutation computed over `parent`'s stored order so it
    /// points back into the parent's original input order.
    fn relative_to(mut self, parent: &Dataset) -> Self {
        for p in &mut self.permutation {
            *p = parent.permutation[*p];
        }
        self
    }
}

/// Misclassification costs `(C_P, C_N)` for positives and negatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub c_pos: f64,
    pub c_neg: f64,
}

impl CostSpec {
    pub fn new(c_pos: f64, c_neg: f64) -> Result<Self> {
        if !(c_pos > 0.0 && c_pos.is_finite() && c_neg > 0.0 && c_neg.is_finite()) {
            return Err(Error::Input(format!(
                "costs must be positive and finite, got ({c_pos}, {c_neg})"
            )));
        }
        Ok(Self { c_pos, c_neg })
    }

    pub fn symmetric() -> Self {
        Self { c_pos: 1.0, c_neg: 1.0 }
    }

    /// Normalized cost asymmetry `C_P / (C_P + C_N)`.
    pub fn gamma(&self) -> f64 {
        self.c_pos / (self.c_pos + self.c_neg)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.c_pos * k, self.c_neg * k)
    }

    pub fn is_symmetric(&self) -> bool {
        self.c_pos == self.c_neg
    }

    /// Class cost for an example with label `y`.
    pub fn for_label(&self, y: i8) -> f64 {
        if y > 0 {
            self.c_pos
        } else {
            self.c_neg
        }
    }

    /// Canonical cost pair for a given asymmetry: the cheaper class
    /// gets cost 1, the other `max(γ, 1-γ) / min(γ, 1-γ)`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Input(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        if gamma >= 0.5 {
            Self::new(gamma / (1.0 - gamma), 1.0)
        } else {
            Self::new(1.0, (1.0 - gamma) / gamma)
        }
    }
}

/// Per-example weight distribution `D(i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightState {
    pub weights: Vec<f64>,
}

impl WeightState {
    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Mass on the first `m` (positive) examples.
    pub fn pos_mass(&self, m: usize) -> f64 {
        compensated_sum(self.weights[..m].iter().copied())
    }

    pub fn neg_mass(&self, m: usize) -> f64 {
        compensated_sum(self.weights[m..].iter().copied())
    }

    /// Rescales to unit mass and returns the previous total.
    pub fn normalize(&mut self) -> f64 {
        normalize(&mut self.weights)
    }
}

/// Rescales `w` to unit mass (compensated sum) and returns the previous total.
pub fn normalize(w: &mut [f64]) -> f64 {
    let z = compensated_sum(w.iter().copied());
    let inv = 1.0 / z;
    for v in w.iter_mut() {
        *v *= inv;
    }
    z
}

/// Splits a normalized distribution into its class asymmetry and the two
/// class-conditional distributions.
pub fn decompose_asymmetry(weights: &WeightState, m: usize) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let n = weights.weights.len();
    if m == 0 || m >= n {
        return Err(Error::Input(format!("positive count {m} out of range for {n} weights")));
    }
    let gamma = weights.pos_mass(m);
    let neg = weights.neg_mass(m);
    if !(gamma > 0.0) {
        return Err(Error::Degenerate("positive class has zero weight".into()));
    }
    if !(neg > 0.0) {
        return Err(Error::Degenerate("negative class has zero weight".into()));
    }
    let d_pos = weights.weights[..m].iter().map(|w| w / gamma).collect();
    let d_neg = weights.weights[m..].iter().map(|w| w / neg).collect();
    Ok((gamma, d_pos, d_neg))
}

/// Global distribution `γ·D₊ ⊕ (1-γ)·D₋` for `γ` taken from the cost pair.
pub fn compose_weights(cost_spec: &CostSpec, d_pos: &[f64], d_neg: &[f64]) -> Result<WeightState> {
    compose_with_gamma(cost_spec.gamma(), d_pos, d_neg)
}

pub(crate) fn compose_with_gamma(gamma: f64, d_pos: &[f64], d_neg: &[f64]) -> Result<WeightState> {
    for (name, d) in [("positive", d_pos), ("negative", d_neg)] {
        if d.is_empty() {
            return Err(Error::Input(format!("{name} distribution is empty")));
        }
        if d.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::Input(format!("{name} distribution has negative entries")));
        }
        let s = compensated_sum(d.iter().copied());
        if (s - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(Error::Input(format!("{name} distribution sums to {s}, expected 1")));
        }
    }
    let weights = d_pos
        .iter()
        .map(|w| gamma * w)
        .chain(d_neg.iter().map(|w| (1.0 - gamma) * w))
        .collect();
    Ok(WeightState { weights })
}

/// Axis-aligned decision stump, or a constant classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stump {
    /// Predicts `polarity` when `x[feature] >= threshold`, `-polarity` otherwise.
    Threshold { feature: usize, threshold: f64, polarity: i8 },
    /// Predicts `polarity` everywhere.
    Constant { polarity: i8 },
}

impl Stump {
    #[inline]
    pub fn predict(&self, x: &[f64]) -> i8 {
        match *self {
            Stump::Threshold { feature, threshold, polarity } => {
                if x[feature] >= threshold {
                    polarity
                } else {
                    -polarity
                }
            }
            Stump::Constant { polarity } => polarity,
        }
    }

    /// Same rule with the opposite output everywhere.
    pub fn flipped(&self) -> Stump {
        match *self {
            Stump::Threshold { feature, threshold, polarity } => {
                Stump::Threshold { feature, threshold, polarity: -polarity }
            }
            Stump::Constant { polarity } => Stump::Constant { polarity: -polarity },
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Stump::Constant { .. })
    }

    fn max_feature(&self) -> Option<usize> {
        match self {
            Stump::Threshold { feature, .. } => Some(*feature),
            Stump::Constant { .. } => None,
        }
    }
}

/// How member votes are combined into a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Voting {
    /// `Σ α_t h_t(x)`.
    WeightedSum,
    /// `Σ α_t h_t(x) (C_P⟦h_t=+1⟧ + C_N⟦h_t=-1⟧)`.
    CsbCostVote,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub alpha: f64,
    pub stump: Stump,
}

/// Output of [`Ensemble::predict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: i8,
    pub score: f64,
}

/// Weighted vote of stumps with a decision threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub n_features: usize,
    pub members: Vec<Member>,
    pub threshold: f64,
    pub voting: Voting,
    pub cost_spec: CostSpec,
}

impl Ensemble {
    pub fn new(n_features: usize, voting: Voting, cost_spec: CostSpec) -> Self {
        Self { n_features, members: Vec::new(), threshold: 0.0, voting, cost_spec }
    }

    pub fn push(&mut self, alpha: f64, stump: Stump) {
        self.members.push(Member { alpha, stump });
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Contribution of a single member's vote to the score.
    #[inline]
    pub fn vote(&self, alpha: f64, h: i8) -> f64 {
        match self.voting {
            Voting::WeightedSum => alpha * h as f64,
            Voting::CsbCostVote => alpha * h as f64 * self.cost_spec.for_label(h),
        }
    }

    /// Score without the dimension check.
    pub fn score_unchecked(&self, x: &[f64]) -> f64 {
        self.members.iter().map(|m| self.vote(m.alpha, m.stump.predict(x))).sum()
    }

    /// Score of the first `t` members only.
    pub fn prefix_score(&self, x: &[f64], t: usize) -> f64 {
        self.members[..t].iter().map(|m| self.vote(m.alpha, m.stump.predict(x))).sum()
    }

    /// Label by `sign(score - threshold)`; a score equal to the threshold is
    /// labelled `+1`.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::Input(format!(
                "expected {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        if self.members.is_empty() {
            return Err(Error::Input("ensemble has no members".into()));
        }
        let score = self.score_unchecked(x);
        Ok(Prediction { label: label_for(score, self.threshold), score })
    }

    /// Checks internal consistency (finite alphas, feature indices in range).
    pub fn validate(&self) -> Result<()> {
        for (t, m) in self.members.iter().enumerate() {
            if !m.alpha.is_finite() {
                return Err(Error::Input(format!("member {t} has non-finite alpha")));
            }
            if let Some(f) = m.stump.max_feature() {
                if f >= self.n_features {
                    return Err(Error::Input(format!(
                        "member {t} uses feature {f} but the model has {} features",
                        self.n_features
                    )));
                }
            }
        }
        Ok(())
    }
}

#[inline]
pub fn label_for(score: f64, threshold: f64) -> i8 {
    if score >= threshold {
        1
    } else {
        -1
    }
}

/// Per-round training record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    /// Weighted error of the selected stump.
    pub epsilon: f64,
    pub alpha: f64,
    /// Normalization factor of this round's update.
    pub z: f64,
    /// Running product of `z`.
    pub bound: f64,
    /// Training error of the ensemble so far, weighted by the initial distribution.
    pub train_error: f64,
    pub pos_error: f64,
    pub neg_error: f64,
    /// Weight mass on positives before this round's update.
    pub pos_mass: f64,
}
