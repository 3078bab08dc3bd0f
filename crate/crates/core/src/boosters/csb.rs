//! CSB0, CSB1 and CSB2.

use serde::{Deserialize, Serialize};

use crate::domain::{normalize, Dataset, Voting};
use crate::error::Result;
use crate::weaklearn::StumpPool;

use super::adaboost::alpha_clamped;
use super::{pos_mass, reweight, select_min_error, Recorder, RoundRecord, TrainConfig, TrainedModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsbVariant {
    /// Misclassified examples scaled by their class cost only.
    Csb0,
    /// Class cost times `exp(-y h)`.
    Csb1,
    /// Class cost times `exp(-α y h)`.
    Csb2,
}

/// Multiplicative update for one example.
pub fn csb_factor(variant: CsbVariant, cost: f64, alpha: f64, yh: i8) -> f64 {
    let c = if yh < 0 { cost } else { 1.0 };
    match variant {
        CsbVariant::Csb0 => c,
        CsbVariant::Csb1 => c * (-(yh as f64)).exp(),
        CsbVariant::Csb2 => c * (-alpha * yh as f64).exp(),
    }
}

pub fn train_csb(
    config: &TrainConfig,
    dataset: &Dataset,
    pool: &StumpPool,
    variant: CsbVariant,
) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let m = dataset.n_pos();
    let cs = config.cost_spec;
    let mut weights = config.base_weights(dataset.n());
    for (w, &y) in weights.iter_mut().zip(dataset.labels()) {
        *w *= cs.for_label(y);
    }
    normalize(&mut weights);

    let mut rec = Recorder::new(config, dataset, weights.clone(), Voting::CsbCostVote);
    for _ in 0..config.rounds {
        rec.snapshot(&weights);
        let (index, errors) = select_min_error(pool, dataset, &weights, config.parallelism)?;
        let epsilon = errors.total();
        let alpha = alpha_clamped(epsilon, config.epsilon_clamp);
        let stump = pool.get(index);
        let pm = pos_mass(&weights, m);
        let z = reweight(&mut weights, dataset, &stump, |i, h| {
            let y = dataset.label(i);
            csb_factor(variant, cs.for_label(y), alpha, y * h)
        });
        rec.record(RoundRecord { index, stump, alpha, epsilon, z, pos_mass: pm });
    }
    Ok(rec.finish(config, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csb0_update_arithmetic() {
        // C_P = 2, C_N = 1; stump right on the positive, wrong on the negative
        let mut w = [0.5, 0.5];
        w[0] *= csb_factor(CsbVariant::Csb0, 2.0, 0.3, 1);
        w[1] *= csb_factor(CsbVariant::Csb0, 1.0, 0.3, -1);
        assert_eq!(w, [0.5, 0.5]);
        normalize(&mut w);
        assert_eq!(w, [0.5, 0.5]);
    }

    #[test]
    fn csb1_ignores_alpha() {
        for yh in [-1, 1] {
            assert_eq!(
                csb_factor(CsbVariant::Csb1, 3.0, 0.1, yh),
                csb_factor(CsbVariant::Csb1, 3.0, 7.5, yh)
            );
        }
    }

    #[test]
    fn csb2_unit_cost_is_adaboost_factor() {
        for yh in [-1i8, 1] {
            assert_eq!(csb_factor(CsbVariant::Csb2, 1.0, 0.7, yh), (-0.7 * yh as f64).exp());
        }
    }
}
