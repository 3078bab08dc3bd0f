//! AdaBoost, its cost-generalized initialization, and AsymBoost.

use crate::domain::{compose_weights, decompose_asymmetry, CostSpec, Dataset, Voting, WeightState};
use crate::error::Result;
use crate::weaklearn::StumpPool;

use super::{
    clamp_error, pos_mass, reweight, select_min_error, Recorder, RoundRecord, TrainConfig, TrainedModel,
    DEFAULT_EPSILON_CLAMP,
};

/// `½ ln((1-ε)/ε)` after clamping ε to `[1e-12, 1-1e-12]`.
pub fn alpha_from_error(epsilon: f64) -> f64 {
    alpha_clamped(epsilon, DEFAULT_EPSILON_CLAMP)
}

pub(crate) fn alpha_clamped(epsilon: f64, clamp: f64) -> f64 {
    let e = clamp_error(epsilon, clamp);
    0.5 * ((1.0 - e) / e).ln()
}

/// Plain AdaBoost from `config.initial_weights` (uniform by default).
pub fn train_adaboost(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let weights = config.base_weights(dataset.n());
    boost(config, dataset, pool, weights, None)
}

/// AdaBoost started from `γ·D₊ ⊕ (1-γ)·D₋`.
///
/// The class-conditional distributions come from `config.initial_weights`
/// when given, otherwise from the per-example costs of the dataset
/// (normalized within each class), otherwise uniform.
pub fn train_cost_generalized(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let m = dataset.n_pos();
    let base = match (&config.initial_weights, dataset.costs()) {
        (Some(w), _) => w.clone(),
        (None, Some(c)) => WeightState { weights: c.to_vec() },
        (None, None) => WeightState::uniform(dataset.n()),
    };
    let (_, d_pos, d_neg) = decompose_asymmetry(&base, m)?;
    let weights = compose_weights(&config.cost_spec, &d_pos, &d_neg)?.weights;
    boost(config, dataset, pool, weights, None)
}

/// Per-round asymmetric factor `(C_P/C_N)^{y/(2T)}`.
pub fn asymboost_factor(cost_spec: &CostSpec, label: i8, rounds: usize) -> f64 {
    (cost_spec.c_pos / cost_spec.c_neg).powf(label as f64 / (2.0 * rounds as f64))
}

/// AsymBoost: pre-emphasis by the per-round factor, then the same factor in
/// every update.
pub fn train_asymboost(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let factors: Vec<f64> = dataset
        .labels()
        .iter()
        .map(|&y| asymboost_factor(&config.cost_spec, y, config.rounds))
        .collect();
    let mut weights = config.base_weights(dataset.n());
    for (w, k) in weights.iter_mut().zip(&factors) {
        *w *= k;
    }
    crate::domain::normalize(&mut weights);
    boost(config, dataset, pool, weights, Some(&factors))
}

fn boost(
    config: &TrainConfig,
    dataset: &Dataset,
    pool: &StumpPool,
    mut weights: Vec<f64>,
    emphasis: Option<&[f64]>,
) -> Result<TrainedModel> {
    let m = dataset.n_pos();
    let mut rec = Recorder::new(config, dataset, weights.clone(), Voting::WeightedSum);
    for _ in 0..config.rounds {
        rec.snapshot(&weights);
        let (index, errors) = select_min_error(pool, dataset, &weights, config.parallelism)?;
        let epsilon = errors.total();
        let alpha = alpha_clamped(epsilon, config.epsilon_clamp);
        let stump = pool.get(index);
        let pm = pos_mass(&weights, m);
        let z = reweight(&mut weights, dataset, &stump, |i, h| {
            let y = dataset.label(i);
            let k = emphasis.map_or(1.0, |e| e[i]);
            (-alpha * (y * h) as f64).exp() * k
        });
        rec.record(RoundRecord { index, stump, alpha, epsilon, z, pos_mass: pm });
    }
    Ok(rec.finish(config, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boosters::Algorithm;
    use crate::domain::Stump;
    use crate::weaklearn::build_pool;

    fn one_dim(values: &[f64], labels: &[i8]) -> Dataset {
        Dataset::new(values.iter().map(|v| vec![*v]).collect(), labels.to_vec(), None).unwrap()
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_from_error(0.5), 0.0);
        assert!((alpha_from_error(0.25) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((alpha_from_error(0.75) + alpha_from_error(0.25)).abs() < 1e-15);
        assert!(alpha_from_error(0.0).is_finite());
        assert!(alpha_from_error(1.0).is_finite());
    }

    #[test]
    fn forced_geometry_first_round() {
        let ds = one_dim(&[1.0, 2.0, 3.0, 4.0], &[1, 1, -1, -1]);
        let pool = build_pool(&ds);
        let cfg = TrainConfig::new(Algorithm::Adaboost, 3, CostSpec::symmetric());
        let model = train_adaboost(&cfg, &ds, &pool).unwrap();
        let first = model.ensemble.members[0];
        assert_eq!(first.stump, Stump::Threshold { feature: 0, threshold: 2.5, polarity: -1 });
        assert_eq!(model.trace[0].epsilon, 0.0);
        let expected = 0.5 * ((1.0 - 1e-12) / 1e-12f64).ln();
        assert!((first.alpha - expected).abs() < 1e-10);
        assert_eq!(model.trace[0].train_error, 0.0);
        assert!(model.trace[0].z < 3e-6);
    }

    #[test]
    fn asymboost_pre_emphasis() {
        let ds = one_dim(&[0.0, 1.0], &[1, -1]);
        let pool = build_pool(&ds);
        let cfg = TrainConfig::new(Algorithm::Asymboost, 2, CostSpec::new(4.0, 1.0).unwrap());
        let model = train_asymboost(&cfg, &ds, &pool).unwrap();
        assert!((model.initial_weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((model.initial_weights[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn asymboost_cumulative_factor() {
        let cs = CostSpec::new(3.0, 1.0).unwrap();
        for t in [1, 2, 7, 50] {
            let pos: f64 = (0..t).map(|_| asymboost_factor(&cs, 1, t)).product();
            let neg: f64 = (0..t).map(|_| asymboost_factor(&cs, -1, t)).product();
            assert!((pos / neg - 3.0).abs() < 1e-12);
        }
    }
}
