//! Decision-stump hypothesis pool and weighted-error scans.
//!
//! The pool holds, per feature, one threshold at each midpoint between
//! consecutive distinct values (both polarities), followed by the two
//! constant classifiers. Candidate order is fixed: feature ascending,
//! threshold ascending, polarity `+1` before `-1`, then constant `+1` and
//! constant `-1`. Selection breaks ties by this order, so a parallel scan
//! returns exactly what a sequential one would.

use crate::domain::{Dataset, Stump};
use crate::error::{Error, Result};
use crate::par::{map_range, Parallelism};

/// Losses within this relative distance of the minimum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Misclassified weight split by class.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassErrors {
    pub pos: f64,
    pub neg: f64,
}

impl ClassErrors {
    pub fn total(&self) -> f64 {
        self.pos + self.neg
    }
}

#[derive(Debug, Clone)]
struct FeatureIndex {
    /// Example indices sorted by this feature's value.
    order: Vec<usize>,
    /// `(k, threshold)`: the first `k` sorted examples fall below `threshold`.
    cuts: Vec<(usize, f64)>,
    /// Index of this feature's first candidate in the pool.
    offset: usize,
}

/// Deterministically ordered stump candidates with precomputed sort orders.
#[derive(Debug, Clone)]
pub struct StumpPool {
    candidates: Vec<Stump>,
    features: Vec<FeatureIndex>,
    n_examples: usize,
}

/// Result of [`select_best`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub loss: f64,
}

/// Enumerates the stump pool for `dataset`.
pub fn build_pool(dataset: &Dataset) -> StumpPool {
    let n = dataset.n();
    let mut candidates = Vec::new();
    let mut features = Vec::with_capacity(dataset.n_features());
    for j in 0..dataset.n_features() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| dataset.feature(a, j).total_cmp(&dataset.feature(b, j)).then(a.cmp(&b)));
        let offset = candidates.len();
        let mut cuts = Vec::new();
        for k in 1..n {
            let lo = dataset.feature(order[k - 1], j);
            let hi = dataset.feature(order[k], j);
            if hi > lo {
                let threshold = lo + 0.5 * (hi - lo);
                cuts.push((k, threshold));
                candidates.push(Stump::Threshold { feature: j, threshold, polarity: 1 });
                candidates.push(Stump::Threshold { feature: j, threshold, polarity: -1 });
            }
        }
        features.push(FeatureIndex { order, cuts, offset });
    }
    candidates.push(Stump::Constant { polarity: 1 });
    candidates.push(Stump::Constant { polarity: -1 });
    StumpPool { candidates, features, n_examples: n }
}

impl StumpPool {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Stump] {
        &self.candidates
    }

    pub fn get(&self, index: usize) -> Stump {
        self.candidates[index]
    }

    /// Misclassified weight of every candidate, split by class, in pool order.
    ///
    /// One pass over each feature's sorted order: `O(n·d)` per call.
    pub fn class_errors(&self, dataset: &Dataset, weights: &[f64]) -> Vec<ClassErrors> {
        self.class_errors_with(dataset, weights, Parallelism::default())
    }

    pub fn class_errors_with(
        &self,
        dataset: &Dataset,
        weights: &[f64],
        parallelism: Parallelism,
    ) -> Vec<ClassErrors> {
        assert_eq!(weights.len(), self.n_examples, "weight vector length");
        let m = dataset.n_pos();
        let pos_total: f64 = weights[..m].iter().sum();
        let neg_total: f64 = weights[m..].iter().sum();

        let per_feature = map_range(self.features.len(), parallelism, |j| {
            let fi = &self.features[j];
            let mut out = Vec::with_capacity(2 * fi.cuts.len());
            let mut pos_below = 0.0;
            let mut neg_below = 0.0;
            let mut k = 0;
            for &(cut, _) in &fi.cuts {
                while k < cut {
                    let i = fi.order[k];
                    if i < m {
                        pos_below += weights[i];
                    } else {
                        neg_below += weights[i];
                    }
                    k += 1;
                }
                // polarity +1: below predicts -1
                out.push(ClassErrors { pos: pos_below, neg: neg_total - neg_below });
                out.push(ClassErrors { pos: pos_total - pos_below, neg: neg_below });
            }
            out
        });

        let mut errors = Vec::with_capacity(self.candidates.len());
        for (fi, chunk) in self.features.iter().zip(per_feature) {
            debug_assert_eq!(fi.offset, errors.len());
            errors.extend(chunk);
        }
        errors.push(ClassErrors { pos: 0.0, neg: neg_total });
        errors.push(ClassErrors { pos: pos_total, neg: 0.0 });
        errors
    }
}

/// Weighted error of a single stump by a direct pass over the examples.
pub fn weighted_error(stump: &Stump, dataset: &Dataset, weights: &[f64]) -> f64 {
    dataset
        .rows()
        .zip(dataset.labels())
        .zip(weights)
        .filter(|((x, &y), _)| stump.predict(x) != y)
        .map(|(_, w)| *w)
        .sum()
}

/// Index of the minimum-loss candidate.
///
/// Losses within [`TIE_TOLERANCE`] (relative) of the minimum are tied and
/// resolved to the lowest index. Non-finite losses are never selected.
pub fn select_best<F>(n_candidates: usize, parallelism: Parallelism, loss: F) -> Result<Selection>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let losses = map_range(n_candidates, parallelism, loss);
    select_from_losses(&losses)
}

/// [`select_best`] over precomputed losses.
pub fn select_from_losses(losses: &[f64]) -> Result<Selection> {
    let min = losses
        .iter()
        .copied()
        .filter(|l| l.is_finite())
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::Selection(format!(
            "none of {} candidates has a finite loss",
            losses.len()
        )));
    }
    let cutoff = min + TIE_TOLERANCE * min.abs();
    let index = losses
        .iter()
        .position(|l| l.is_finite() && *l <= cutoff)
        .expect("minimum is attained");
    Ok(Selection { index, loss: losses[index] })
}
