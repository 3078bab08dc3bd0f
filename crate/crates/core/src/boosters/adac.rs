//! AdaC1, AdaC2 and AdaC3.

use serde::{Deserialize, Serialize};

use crate::domain::{CostSpec, Dataset, Voting};
use crate::error::Result;
use crate::numerics::compensated_sum;
use crate::weaklearn::{select_from_losses, StumpPool};

use super::{pos_mass, reweight, Recorder, RoundRecord, TrainConfig, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaCVariant {
    /// Cost inside the exponent.
    AdaC1,
    /// Cost outside the exponent.
    AdaC2,
    /// Both.
    AdaC3,
}

/// Per-example costs in `(0, 1]`: class costs divided by the larger one, or
/// dataset costs divided by their maximum.
pub fn adac_costs(dataset: &Dataset, cost_spec: &CostSpec) -> Vec<f64> {
    match dataset.costs() {
        Some(c) => {
            let max = c.iter().copied().fold(0.0, f64::max);
            c.iter().map(|v| v / max).collect()
        }
        None => {
            let max = cost_spec.c_pos.max(cost_spec.c_neg);
            dataset.labels().iter().map(|&y| cost_spec.for_label(y) / max).collect()
        }
    }
}

/// Goodness from the cost-weighted totals.
///
/// `w1 = Σ c D`, `w2 = Σ c² D` and `epsilon` the cost-weighted error (with
/// squared costs for AdaC3). `epsilon` is clamped into
/// `[clamp·W, (1-clamp)·W]` where `W` is the total it is drawn from.
pub fn adac_alpha(variant: AdaCVariant, w1: f64, w2: f64, epsilon: f64, clamp: f64) -> f64 {
    match variant {
        AdaCVariant::AdaC1 => {
            let e = epsilon.clamp(clamp * w1, (1.0 - clamp) * w1);
            0.5 * ((1.0 + w1 - 2.0 * e) / (1.0 - w1 + 2.0 * e)).ln()
        }
        AdaCVariant::AdaC2 => {
            let e = epsilon.clamp(clamp * w1, (1.0 - clamp) * w1);
            0.5 * ((w1 - e) / e).ln()
        }
        AdaCVariant::AdaC3 => {
            let e = epsilon.clamp(clamp * w2, (1.0 - clamp) * w2);
            0.5 * ((w1 + w2 - 2.0 * e) / (w1 - w2 + 2.0 * e)).ln()
        }
    }
}

pub fn train_adac(
    config: &TrainConfig,
    dataset: &Dataset,
    pool: &StumpPool,
    variant: AdaCVariant,
) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let m = dataset.n_pos();
    let costs = adac_costs(dataset, &config.cost_spec);
    let mut weights = config.base_weights(dataset.n());

    let mut rec = Recorder::new(config, dataset, weights.clone(), Voting::WeightedSum);
    for _ in 0..config.rounds {
        rec.snapshot(&weights);
        let w1 = compensated_sum(weights.iter().zip(&costs).map(|(d, c)| c * d));
        let w2 = compensated_sum(weights.iter().zip(&costs).map(|(d, c)| c * c * d));
        let scaled: Vec<f64> = match variant {
            AdaCVariant::AdaC3 => weights.iter().zip(&costs).map(|(d, c)| c * c * d).collect(),
            _ => weights.iter().zip(&costs).map(|(d, c)| c * d).collect(),
        };
        let errors = pool.class_errors_with(dataset, &scaled, config.parallelism);
        let losses: Vec<f64> = errors.iter().map(|e| e.total()).collect();
        let sel = select_from_losses(&losses)?;
        let (index, epsilon) = (sel.index, sel.loss);
        let alpha = adac_alpha(variant, w1, w2, epsilon, config.epsilon_clamp);
        let stump = pool.get(index);
        let pm = pos_mass(&weights, m);
        let z = reweight(&mut weights, dataset, &stump, |i, h| {
            let c = costs[i];
            let yh = (dataset.label(i) * h) as f64;
            match variant {
                AdaCVariant::AdaC1 => (-alpha * c * yh).exp(),
                AdaCVariant::AdaC2 => c * (-alpha * yh).exp(),
                AdaCVariant::AdaC3 => c * (-alpha * c * yh).exp(),
            }
        });
        rec.record(RoundRecord { index, stump, alpha, epsilon, z, pos_mass: pm });
    }
    Ok(rec.finish(config, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosters::alpha_from_error;

    #[test]
    fn unit_costs_collapse_to_adaboost() {
        for v in [AdaCVariant::AdaC1, AdaCVariant::AdaC2, AdaCVariant::AdaC3] {
            for eps in [0.1, 0.25, 0.4] {
                assert!((adac_alpha(v, 1.0, 1.0, eps, 1e-12) - alpha_from_error(eps)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn adac2_constant_cost_cancels() {
        let c = 0.3;
        let a = adac_alpha(AdaCVariant::AdaC2, c, c * c, c * 0.2, 1e-12);
        assert!((a - alpha_from_error(0.2)).abs() < 1e-14);
    }

    #[test]
    fn adac1_two_example_hand_computation() {
        // c = (0.9, 0.3), uniform D, stump wrong on example 2
        let w1 = 0.5 * 0.9 + 0.5 * 0.3;
        let eps = 0.5 * 0.3;
        assert!((w1 - 0.6f64).abs() < 1e-15);
        let a = adac_alpha(AdaCVariant::AdaC1, w1, 0.0, eps, 1e-12);
        assert!((a - 0.5 * (1.3f64 / 0.7).ln()).abs() < 1e-12);
        assert!((a - 0.3095).abs() < 1e-4);
    }
}
