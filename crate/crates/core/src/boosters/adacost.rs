//! AdaCost.

use crate::domain::{normalize, CostSpec, Dataset, Voting};
use crate::error::Result;
use crate::numerics::compensated_sum;
use crate::weaklearn::StumpPool;

use super::{pos_mass, reweight, select_min_error, Recorder, RoundRecord, TrainConfig, TrainedModel};

/// Cost function `C(i)`: class costs as `C_P/(C_P+C_N)`, `C_N/(C_P+C_N)`,
/// or per-example dataset costs scaled by their maximum.
pub fn adacost_costs(dataset: &Dataset, cost_spec: &CostSpec) -> Vec<f64> {
    match dataset.costs() {
        Some(c) => {
            let max = c.iter().copied().fold(0.0, f64::max);
            c.iter().map(|v| v / max).collect()
        }
        None => {
            let total = cost_spec.c_pos + cost_spec.c_neg;
            dataset.labels().iter().map(|&y| cost_spec.for_label(y) / total).collect()
        }
    }
}

/// Cost adjustment `β(i)`.
#[inline]
pub fn adacost_beta(cost: f64, correct: bool) -> f64 {
    if correct {
        0.5 * (1.0 - cost)
    } else {
        0.5 * (1.0 + cost)
    }
}

/// `½ ln((1+r)/(1-r))` with `|r|` kept below `1 - clamp`.
pub fn adacost_alpha(r: f64, clamp: f64) -> f64 {
    let r = r.clamp(-1.0 + clamp, 1.0 - clamp);
    0.5 * ((1.0 + r) / (1.0 - r)).ln()
}

pub fn train_adacost(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let m = dataset.n_pos();
    let costs = adacost_costs(dataset, &config.cost_spec);
    let mut weights = config.base_weights(dataset.n());
    for (w, c) in weights.iter_mut().zip(&costs) {
        *w *= c;
    }
    normalize(&mut weights);

    let mut rec = Recorder::new(config, dataset, weights.clone(), Voting::WeightedSum);
    for _ in 0..config.rounds {
        rec.snapshot(&weights);
        let (index, errors) = select_min_error(pool, dataset, &weights, config.parallelism)?;
        let stump = pool.get(index);
        let margins: Vec<f64> = (0..dataset.n())
            .map(|i| {
                let yh = dataset.label(i) * stump.predict(dataset.row(i));
                yh as f64 * adacost_beta(costs[i], yh > 0)
            })
            .collect();
        let r = compensated_sum(weights.iter().zip(&margins).map(|(w, g)| w * g));
        let alpha = adacost_alpha(r, config.epsilon_clamp);
        let pm = pos_mass(&weights, m);
        let z = reweight(&mut weights, dataset, &stump, |i, _| (-alpha * margins[i]).exp());
        rec.record(RoundRecord { index, stump, alpha, epsilon: errors.total(), z, pos_mass: pm });
    }
    Ok(rec.finish(config, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosters::alpha_from_error;

    #[test]
    fn perfect_stump_closed_form() {
        for c in [0.1f64, 0.5, 0.8] {
            // every example correct: r = Σ D β = 0.5 (1 - c)
            let r = 0.5 * (1.0 - c);
            let expected = 0.5 * ((1.5 - 0.5 * c) / (0.5 + 0.5 * c)).ln();
            assert!((adacost_alpha(r, 1e-12) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn does_not_reduce_to_adaboost() {
        // eps = 0.25, c = 0.5: r = 0.75 * 0.25 - 0.25 * 0.75
        let c = 0.5;
        let r = 0.75 * adacost_beta(c, true) - 0.25 * adacost_beta(c, false);
        assert!((adacost_alpha(r, 1e-12) - alpha_from_error(0.25)).abs() > 0.1);
    }

    #[test]
    fn high_cost_mistakes_grow_faster() {
        let alpha = 0.4;
        let hi = (alpha * adacost_beta(0.9, false)).exp();
        let lo = (alpha * adacost_beta(0.2, false)).exp();
        assert!(hi > lo);
    }
}
