//! A-posteriori decision threshold tuning.

use crate::domain::{CostSpec, Dataset, Ensemble, Voting};
use crate::error::{Error, Result};
use crate::weaklearn::{StumpPool, TIE_TOLERANCE};

use super::{train_adaboost, Algorithm, TrainConfig, TrainedModel};

/// Cost-optimal threshold on a calibrated score, `ln(C_N/C_P)`.
pub fn bayes_threshold(cost_spec: &CostSpec) -> f64 {
    (cost_spec.c_neg / cost_spec.c_pos).ln()
}

/// Picks the threshold minimizing `C_P·FNR + C_N·FPR` on `validation`.
///
/// Candidates are `0`, `±∞` and the midpoints of consecutive distinct
/// validation scores. Ties go to the smallest `|φ|`, then the smaller `φ`.
pub fn tune_threshold(ensemble: &Ensemble, validation: &Dataset, cost_spec: &CostSpec) -> Result<Ensemble> {
    if ensemble.voting != Voting::WeightedSum {
        return Err(Error::Input("threshold tuning needs a weighted-sum ensemble".into()));
    }
    if ensemble.is_empty() {
        return Err(Error::Input("ensemble has no members".into()));
    }
    if validation.n_features() != ensemble.n_features {
        return Err(Error::Input(format!(
            "validation set has {} features, model expects {}",
            validation.n_features(),
            ensemble.n_features
        )));
    }
    let m = validation.n_pos();
    let mut pos: Vec<f64> = (0..m).map(|i| ensemble.score_unchecked(validation.row(i))).collect();
    let mut neg: Vec<f64> = (m..validation.n()).map(|i| ensemble.score_unchecked(validation.row(i))).collect();
    pos.sort_by(f64::total_cmp);
    neg.sort_by(f64::total_cmp);

    let mut all: Vec<f64> = pos.iter().chain(&neg).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let mut candidates = vec![0.0, f64::NEG_INFINITY, f64::INFINITY];
    candidates.extend(all.windows(2).map(|w| w[0] + 0.5 * (w[1] - w[0])));

    let (fnr_w, fpr_w) = (cost_spec.c_pos / pos.len() as f64, cost_spec.c_neg / neg.len() as f64);
    let cost = |phi: f64| {
        let fn_count = pos.partition_point(|&s| s < phi);
        let fp_count = neg.len() - neg.partition_point(|&s| s < phi);
        fnr_w * fn_count as f64 + fpr_w * fp_count as f64
    };
    let costs: Vec<f64> = candidates.iter().map(|&phi| cost(phi)).collect();
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let cutoff = min + TIE_TOLERANCE * min.abs().max(1.0);
    let best = candidates
        .iter()
        .zip(&costs)
        .filter(|(_, c)| **c <= cutoff)
        .map(|(phi, _)| *phi)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)))
        .expect("at least one candidate");

    let mut tuned = ensemble.clone();
    tuned.threshold = best;
    tuned.cost_spec = *cost_spec;
    Ok(tuned)
}

/// AdaBoost followed by threshold tuning on `validation`, or on the training
/// set when none is given.
pub fn train_threshold_tuned(
    config: &TrainConfig,
    dataset: &Dataset,
    pool: &StumpPool,
    validation: Option<&Dataset>,
) -> Result<TrainedModel> {
    let base = config.with_algorithm(Algorithm::Adaboost);
    let mut model = train_adaboost(&base, dataset, pool)?;
    model.ensemble = tune_threshold(&model.ensemble, validation.unwrap_or(dataset), &config.cost_spec)?;
    model.algorithm = Algorithm::ThresholdTuned;
    model.config = config.clone();
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Stump;

    /// Identity-like ensemble: score = x for x in {-2, -1, 1, 2}.
    fn identity_scores() -> (Ensemble, Dataset) {
        let mut e = Ensemble::new(1, Voting::WeightedSum, CostSpec::symmetric());
        for t in [-1.5, 0.0, 1.5] {
            e.push(0.5, Stump::Threshold { feature: 0, threshold: t, polarity: 1 });
        }
        let ds = Dataset::new(
            vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]],
            vec![-1, -1, 1, 1],
            None,
        )
        .unwrap();
        (e, ds)
    }

    #[test]
    fn separable_scores_pick_zero() {
        let (e, ds) = identity_scores();
        for cs in [CostSpec::symmetric(), CostSpec::new(5.0, 1.0).unwrap(), CostSpec::new(1.0, 9.0).unwrap()] {
            assert_eq!(tune_threshold(&e, &ds, &cs).unwrap().threshold, 0.0);
        }
    }

    #[test]
    fn bayes_values() {
        assert_eq!(bayes_threshold(&CostSpec::symmetric()), 0.0);
        let c = CostSpec::new(2.0, 1.0).unwrap();
        assert_eq!(bayes_threshold(&c), -std::f64::consts::LN_2);
        assert!((bayes_threshold(&c.scaled(7.0).unwrap()) - bayes_threshold(&c)).abs() < 1e-15);
    }

    #[test]
    fn rejects_cost_vote_models() {
        let (mut e, ds) = identity_scores();
        e.voting = Voting::CsbCostVote;
        assert!(tune_threshold(&e, &ds, &CostSpec::symmetric()).is_err());
    }
}
