//! Error measures, exponential bounds and class-emphasis diagnostics.

use serde::{Deserialize, Serialize};

use crate::boosters::TrainedModel;
use crate::domain::{label_for, CostSpec, Dataset, Ensemble};
use crate::error::{Error, Result};
use crate::numerics::compensated_sum;

/// Class-conditional and cost-weighted training error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostErrorReport {
    /// Fraction of positives misclassified.
    pub err_pos: f64,
    pub err_neg: f64,
    /// `γ·err_pos + (1-γ)·err_neg`.
    pub global: f64,
    /// Unweighted error over all examples.
    pub raw: f64,
}

pub fn cost_error(ensemble: &Ensemble, dataset: &Dataset, cost_spec: &CostSpec) -> Result<CostErrorReport> {
    let m = dataset.n_pos();
    let mut wrong_pos = 0usize;
    let mut wrong_neg = 0usize;
    for i in 0..dataset.n() {
        if ensemble.predict(dataset.row(i))?.label != dataset.label(i) {
            if i < m {
                wrong_pos += 1;
            } else {
                wrong_neg += 1;
            }
        }
    }
    let err_pos = wrong_pos as f64 / m as f64;
    let err_neg = wrong_neg as f64 / dataset.n_neg() as f64;
    let gamma = cost_spec.gamma();
    Ok(CostErrorReport {
        err_pos,
        err_neg,
        global: gamma * err_pos + (1.0 - gamma) * err_neg,
        raw: (wrong_pos + wrong_neg) as f64 / dataset.n() as f64,
    })
}

/// Which exponential bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `Σ D₁(i) exp(-y_i f(x_i))`.
    Symmetric,
    /// `γ/m Σ_pos exp(-y f) + (1-γ)/(n-m) Σ_neg exp(-y f)`.
    Cga,
    /// `Σ D₁(i) exp(-C_{y_i} y_i f(x_i))`.
    Csa,
}

/// Scores of every training example after each prefix `0..=T` of the model.
fn prefix_scores(model: &TrainedModel, dataset: &Dataset) -> Result<Vec<Vec<f64>>> {
    let e = &model.ensemble;
    if dataset.n_features() != e.n_features {
        return Err(Error::Input(format!(
            "dataset has {} features, model expects {}",
            dataset.n_features(),
            e.n_features
        )));
    }
    if model.initial_weights.len() != dataset.n() {
        return Err(Error::Input("dataset is not the one the model was trained on".into()));
    }
    let mut scores = vec![0.0; dataset.n()];
    let mut out = Vec::with_capacity(e.len() + 1);
    out.push(scores.clone());
    for member in &e.members {
        for (i, s) in scores.iter_mut().enumerate() {
            *s += e.vote(member.alpha, member.stump.predict(dataset.row(i)));
        }
        out.push(scores.clone());
    }
    Ok(out)
}

fn bound_value(variant: BoundVariant, model: &TrainedModel, dataset: &Dataset, scores: &[f64]) -> f64 {
    let cs = model.config.cost_spec;
    let d1 = &model.initial_weights;
    let m = dataset.n_pos();
    let margin = |i: usize| dataset.label(i) as f64 * scores[i];
    match variant {
        BoundVariant::Symmetric => compensated_sum((0..dataset.n()).map(|i| d1[i] * (-margin(i)).exp())),
        BoundVariant::Cga => {
            let g = cs.gamma();
            let pos = compensated_sum((0..m).map(|i| (-margin(i)).exp())) / m as f64;
            let neg = compensated_sum((m..dataset.n()).map(|i| (-margin(i)).exp())) / dataset.n_neg() as f64;
            g * pos + (1.0 - g) * neg
        }
        BoundVariant::Csa => compensated_sum(
            (0..dataset.n()).map(|i| d1[i] * (-cs.for_label(dataset.label(i)) * margin(i)).exp()),
        ),
    }
}

fn error_value(variant: BoundVariant, model: &TrainedModel, dataset: &Dataset, scores: &[f64]) -> f64 {
    let m = dataset.n_pos();
    let wrong = |i: usize| label_for(scores[i], 0.0) != dataset.label(i);
    match variant {
        BoundVariant::Symmetric | BoundVariant::Csa => {
            compensated_sum((0..dataset.n()).filter(|&i| wrong(i)).map(|i| model.initial_weights[i]))
        }
        BoundVariant::Cga => {
            let g = model.config.cost_spec.gamma();
            let pos = (0..m).filter(|&i| wrong(i)).count() as f64 / m as f64;
            let neg = (m..dataset.n()).filter(|&i| wrong(i)).count() as f64 / dataset.n_neg() as f64;
            g * pos + (1.0 - g) * neg
        }
    }
}

/// Bound value for the empty predictor and after every round (length `T+1`).
pub fn exp_bound_trace(model: &TrainedModel, dataset: &Dataset, variant: BoundVariant) -> Result<Vec<f64>> {
    Ok(prefix_scores(model, dataset)?
        .iter()
        .map(|s| bound_value(variant, model, dataset, s))
        .collect())
}

/// The error each bound dominates, at the same prefixes as [`exp_bound_trace`]:
/// `D₁`-weighted error for the symmetric and CSA bounds, the cost-weighted
/// global error for the CGA bound.
pub fn bounded_error_trace(model: &TrainedModel, dataset: &Dataset, variant: BoundVariant) -> Result<Vec<f64>> {
    Ok(prefix_scores(model, dataset)?
        .iter()
        .map(|s| error_value(variant, model, dataset, s))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrevalenceVariant {
    Cga,
    Csa,
}

/// Ratio of the positive to the negative class loss at performance score `s`.
pub fn prevalence_ratio(score: f64, cost_spec: &CostSpec, variant: PrevalenceVariant) -> f64 {
    match variant {
        // both class losses carry the same e^{-s} factor
        PrevalenceVariant::Cga => cost_spec.c_pos / cost_spec.c_neg,
        PrevalenceVariant::Csa => ((cost_spec.c_neg - cost_spec.c_pos) * score).exp(),
    }
}

/// Positive-class weight mass recorded before each round's update.
pub fn weight_asymmetry_trace(model: &TrainedModel) -> Vec<f64> {
    model.trace.iter().map(|r| r.pos_mass).collect()
}

/// First round (1-based) whose positive mass falls below `γ·margin`.
pub fn asymmetry_swap_round(model: &TrainedModel, margin: f64) -> Option<usize> {
    let limit = model.config.cost_spec.gamma() * margin;
    model.trace.iter().find(|r| r.pos_mass < limit).map(|r| r.round)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Stump, Voting};

    fn four() -> Dataset {
        Dataset::new(vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]], vec![1, 1, -1, -1], None).unwrap()
    }

    #[test]
    fn perfect_classifier_reports_zero() {
        let mut e = Ensemble::new(1, Voting::WeightedSum, CostSpec::symmetric());
        e.push(1.0, Stump::Threshold { feature: 0, threshold: 1.5, polarity: -1 });
        let r = cost_error(&e, &four(), &CostSpec::symmetric()).unwrap();
        assert_eq!((r.err_pos, r.err_neg, r.global, r.raw), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn all_positives_global_error() {
        let mut e = Ensemble::new(1, Voting::WeightedSum, CostSpec::symmetric());
        e.push(1.0, Stump::Constant { polarity: 1 });
        let r = cost_error(&e, &four(), &CostSpec::new(4.0, 1.0).unwrap()).unwrap();
        assert_eq!((r.err_pos, r.err_neg), (0.0, 1.0));
        assert!((r.global - 0.2).abs() < 1e-15);
        assert_eq!(r.raw, 0.5);
    }

    #[test]
    fn prevalence_ratios() {
        let c = CostSpec::new(2.0, 1.0).unwrap();
        for s in [-3.0, 0.0, 0.5, 4.0] {
            assert!((prevalence_ratio(s, &c, PrevalenceVariant::Cga) - 2.0).abs() < 1e-12);
        }
        assert_eq!(prevalence_ratio(0.0, &c, PrevalenceVariant::Csa), 1.0);
        assert!((prevalence_ratio(1.0, &c, PrevalenceVariant::Csa) - (-1f64).exp()).abs() < 1e-15);
        assert!(prevalence_ratio(1.0, &c, PrevalenceVariant::Csa) > prevalence_ratio(1.1, &c, PrevalenceVariant::Csa));
    }
}
