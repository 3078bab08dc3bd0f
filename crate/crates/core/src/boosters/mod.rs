//! Boosting trainers.
//!
//! Every trainer consumes a [`TrainConfig`], a [`Dataset`] and its
//! [`StumpPool`], and produces a [`TrainedModel`] holding the ensemble and a
//! per-round [`RoundTrace`]. Rounds are strictly sequential; the candidate
//! scan inside a round runs through [`crate::par`].

mod adaboost;
mod adac;
mod adacost;
mod csa;
mod csb;
mod db;
mod threshold;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{label_for, normalize, CostSpec, Dataset, Ensemble, RoundTrace, Stump, Voting, WeightState};
use crate::error::{Error, Result};
use crate::numerics::compensated_sum;
use crate::par::Parallelism;
use crate::weaklearn::{select_from_losses, ClassErrors, StumpPool};

pub use adaboost::{alpha_from_error, asymboost_factor, train_adaboost, train_asymboost, train_cost_generalized};
pub use adac::{adac_alpha, adac_costs, train_adac, AdaCVariant};
pub use adacost::{adacost_alpha, adacost_beta, adacost_costs, train_adacost};
pub use csa::{csa_equation, csa_loss, solve_csa_alpha, train_cs_adaboost, CsaParams};
pub use csb::{csb_factor, train_csb, CsbVariant};
pub use db::{db_loss, db_polynomial, solve_db_root, train_adaboost_db, DbParams};
pub use threshold::{bayes_threshold, train_threshold_tuned, tune_threshold};

/// Default clamp applied to weighted errors before any goodness formula.
pub const DEFAULT_EPSILON_CLAMP: f64 = 1e-12;

/// Training algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Adaboost,
    ThresholdTuned,
    Asymboost,
    Adacost,
    Csb0,
    Csb1,
    Csb2,
    Adac1,
    Adac2,
    Adac3,
    CsAdaboost,
    AdaboostDb,
    CostGeneralized,
}

impl Algorithm {
    pub const ALL: [Algorithm; 13] = [
        Algorithm::Adaboost,
        Algorithm::ThresholdTuned,
        Algorithm::Asymboost,
        Algorithm::Adacost,
        Algorithm::Csb0,
        Algorithm::Csb1,
        Algorithm::Csb2,
        Algorithm::Adac1,
        Algorithm::Adac2,
        Algorithm::Adac3,
        Algorithm::CsAdaboost,
        Algorithm::AdaboostDb,
        Algorithm::CostGeneralized,
    ];

    /// The eleven cost-sensitive training algorithms (everything except
    /// plain AdaBoost and the a-posteriori threshold tuner).
    pub const COST_SENSITIVE: [Algorithm; 11] = [
        Algorithm::Asymboost,
        Algorithm::Adacost,
        Algorithm::Csb0,
        Algorithm::Csb1,
        Algorithm::Csb2,
        Algorithm::Adac1,
        Algorithm::Adac2,
        Algorithm::Adac3,
        Algorithm::CsAdaboost,
        Algorithm::AdaboostDb,
        Algorithm::CostGeneralized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Adaboost => "adaboost",
            Algorithm::ThresholdTuned => "threshold_tuned",
            Algorithm::Asymboost => "asymboost",
            Algorithm::Adacost => "adacost",
            Algorithm::Csb0 => "csb0",
            Algorithm::Csb1 => "csb1",
            Algorithm::Csb2 => "csb2",
            Algorithm::Adac1 => "adac1",
            Algorithm::Adac2 => "adac2",
            Algorithm::Adac3 => "adac3",
            Algorithm::CsAdaboost => "cs_adaboost",
            Algorithm::AdaboostDb => "adaboost_db",
            Algorithm::CostGeneralized => "cost_generalized",
        }
    }

    /// Whether the algorithm ignores the cost pair entirely.
    pub fn is_cost_insensitive(self) -> bool {
        matches!(self, Algorithm::Adaboost)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown algorithm '{s}'")))
    }
}

/// Training parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub algorithm: Algorithm,
    pub rounds: usize,
    pub cost_spec: CostSpec,
    /// Starting distribution; uniform when absent. Algorithms with their own
    /// initialization (pre-emphasis, cost-proportional) apply it on top.
    pub initial_weights: Option<WeightState>,
    pub epsilon_clamp: f64,
    pub seed: u64,
    #[serde(default)]
    pub parallelism: Parallelism,
    /// Keep a copy of the weight distribution used in every round.
    #[serde(default)]
    pub record_weights: bool,
}

impl TrainConfig {
    pub fn new(algorithm: Algorithm, rounds: usize, cost_spec: CostSpec) -> Self {
        Self {
            algorithm,
            rounds,
            cost_spec,
            initial_weights: None,
            epsilon_clamp: DEFAULT_EPSILON_CLAMP,
            seed: 0,
            parallelism: Parallelism::default(),
            record_weights: false,
        }
    }

    pub fn with_algorithm(&self, algorithm: Algorithm) -> Self {
        Self { algorithm, ..self.clone() }
    }

    pub fn with_costs(&self, cost_spec: CostSpec) -> Self {
        Self { cost_spec, ..self.clone() }
    }

    pub fn recording_weights(mut self) -> Self {
        self.record_weights = true;
        self
    }

    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Input("rounds must be at least 1".into()));
        }
        if !(self.epsilon_clamp > 0.0 && self.epsilon_clamp < 0.5) {
            return Err(Error::Input(format!("epsilon clamp {} outside (0, 0.5)", self.epsilon_clamp)));
        }
        CostSpec::new(self.cost_spec.c_pos, self.cost_spec.c_neg)?;
        if !self.parallelism.available() {
            return Err(Error::Input("parallel execution requested but not compiled in".into()));
        }
        if let Some(w) = &self.initial_weights {
            if w.weights.len() != dataset.n() {
                return Err(Error::Input(format!(
                    "initial weights have {} entries for {} examples",
                    w.weights.len(),
                    dataset.n()
                )));
            }
            if w.weights.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::Input("initial weights must be finite and non-negative".into()));
            }
            let m = dataset.n_pos();
            if !(w.pos_mass(m) > 0.0 && w.neg_mass(m) > 0.0) {
                return Err(Error::Degenerate("initial weights leave a class without mass".into()));
            }
        }
        if self.algorithm == Algorithm::AdaboostDb {
            integer_costs(&self.cost_spec)?;
        }
        Ok(())
    }

    /// Normalized starting distribution (uniform unless overridden).
    pub(crate) fn base_weights(&self, n: usize) -> Vec<f64> {
        match &self.initial_weights {
            Some(w) => {
                let mut v = w.weights.clone();
                normalize(&mut v);
                v
            }
            None => vec![1.0 / n as f64; n],
        }
    }
}

pub(crate) fn integer_costs(cost_spec: &CostSpec) -> Result<(u32, u32)> {
    let as_int = |c: f64| {
        if c >= 1.0 && c.fract() == 0.0 && c <= 64.0 {
            Some(c as u32)
        } else {
            None
        }
    };
    match (as_int(cost_spec.c_pos), as_int(cost_spec.c_neg)) {
        (Some(p), Some(n)) => Ok((p, n)),
        _ => Err(Error::Input(format!(
            "adaboost_db needs integer costs in [1, 64], got ({}, {}); rescale rational costs first",
            cost_spec.c_pos, cost_spec.c_neg
        ))),
    }
}

/// A finished training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub algorithm: Algorithm,
    pub ensemble: Ensemble,
    pub trace: Vec<RoundTrace>,
    pub config: TrainConfig,
    /// Distribution in force at round 1 (after any pre-emphasis).
    pub initial_weights: Vec<f64>,
    /// Pool index of the stump selected in each round.
    pub selected: Vec<usize>,
    /// Weight distribution used for selection in each round, when recorded.
    pub weight_history: Vec<Vec<f64>>,
    /// True when training ended before `rounds` (no admissible candidate).
    pub stopped_early: bool,
}

impl TrainedModel {
    pub fn rounds_completed(&self) -> usize {
        self.trace.len()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.ensemble.members.iter().map(|m| m.alpha).collect()
    }
}

/// Trains with the algorithm named in `config`.
///
/// [`Algorithm::ThresholdTuned`] tunes its threshold on the training set;
/// use [`train_threshold_tuned`] to supply a separate validation set.
pub fn train(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    match config.algorithm {
        Algorithm::Adaboost => train_adaboost(config, dataset, pool),
        Algorithm::ThresholdTuned => train_threshold_tuned(config, dataset, pool, None),
        Algorithm::Asymboost => train_asymboost(config, dataset, pool),
        Algorithm::Adacost => train_adacost(config, dataset, pool),
        Algorithm::Csb0 => train_csb(config, dataset, pool, CsbVariant::Csb0),
        Algorithm::Csb1 => train_csb(config, dataset, pool, CsbVariant::Csb1),
        Algorithm::Csb2 => train_csb(config, dataset, pool, CsbVariant::Csb2),
        Algorithm::Adac1 => train_adac(config, dataset, pool, AdaCVariant::AdaC1),
        Algorithm::Adac2 => train_adac(config, dataset, pool, AdaCVariant::AdaC2),
        Algorithm::Adac3 => train_adac(config, dataset, pool, AdaCVariant::AdaC3),
        Algorithm::CsAdaboost => train_cs_adaboost(config, dataset, pool),
        Algorithm::AdaboostDb => train_adaboost_db(config, dataset, pool),
        Algorithm::CostGeneralized => train_cost_generalized(config, dataset, pool),
    }
}

/// Clamps a weighted error into `[clamp, 1 - clamp]`.
#[inline]
pub(crate) fn clamp_error(epsilon: f64, clamp: f64) -> f64 {
    epsilon.clamp(clamp, 1.0 - clamp)
}

/// Scan the pool and pick the minimum weighted-error candidate.
pub(crate) fn select_min_error(
    pool: &StumpPool,
    dataset: &Dataset,
    weights: &[f64],
    parallelism: Parallelism,
) -> Result<(usize, ClassErrors)> {
    let errors = pool.class_errors_with(dataset, weights, parallelism);
    let losses: Vec<f64> = errors.iter().map(ClassErrors::total).collect();
    let sel = select_from_losses(&losses)?;
    Ok((sel.index, errors[sel.index]))
}

/// Multiplies each weight by `factor(i, h_i)` and renormalizes. Returns the
/// normalization factor.
pub(crate) fn reweight<F>(weights: &mut [f64], dataset: &Dataset, stump: &Stump, factor: F) -> f64
where
    F: Fn(usize, i8) -> f64,
{
    for (i, w) in weights.iter_mut().enumerate() {
        *w *= factor(i, stump.predict(dataset.row(i)));
    }
    normalize(weights)
}

pub(crate) fn pos_mass(weights: &[f64], m: usize) -> f64 {
    compensated_sum(weights[..m].iter().copied())
}

/// Collects ensemble members, running scores and the per-round trace.
pub(crate) struct Recorder<'a> {
    dataset: &'a Dataset,
    initial: Vec<f64>,
    scores: Vec<f64>,
    ensemble: Ensemble,
    trace: Vec<RoundTrace>,
    selected: Vec<usize>,
    bound: f64,
    weight_history: Vec<Vec<f64>>,
    record_weights: bool,
}

/// What a trainer reports for one round.
pub(crate) struct RoundRecord {
    pub index: usize,
    pub stump: Stump,
    pub alpha: f64,
    pub epsilon: f64,
    pub z: f64,
    pub pos_mass: f64,
}

impl<'a> Recorder<'a> {
    pub fn new(config: &TrainConfig, dataset: &'a Dataset, initial: Vec<f64>, voting: Voting) -> Self {
        Self {
            dataset,
            initial,
            scores: vec![0.0; dataset.n()],
            ensemble: Ensemble::new(dataset.n_features(), voting, config.cost_spec),
            trace: Vec::with_capacity(config.rounds),
            selected: Vec::with_capacity(config.rounds),
            bound: 1.0,
            weight_history: Vec::new(),
            record_weights: config.record_weights,
        }
    }

    /// Stores the distribution used for this round's selection.
    pub fn snapshot(&mut self, weights: &[f64]) {
        if self.record_weights {
            self.weight_history.push(weights.to_vec());
        }
    }

    pub fn record(&mut self, r: RoundRecord) {
        self.ensemble.push(r.alpha, r.stump);
        self.selected.push(r.index);
        self.bound *= r.z;

        let ds = self.dataset;
        let m = ds.n_pos();
        let mut wrong_pos = 0usize;
        let mut wrong_neg = 0usize;
        let mut weighted = Vec::new();
        for i in 0..ds.n() {
            let h = r.stump.predict(ds.row(i));
            self.scores[i] += self.ensemble.vote(r.alpha, h);
            if label_for(self.scores[i], 0.0) != ds.label(i) {
                weighted.push(self.initial[i]);
                if i < m {
                    wrong_pos += 1;
                } else {
                    wrong_neg += 1;
                }
            }
        }
        self.trace.push(RoundTrace {
            round: self.trace.len() + 1,
            epsilon: r.epsilon,
            alpha: r.alpha,
            z: r.z,
            bound: self.bound,
            train_error: compensated_sum(weighted),
            pos_error: wrong_pos as f64 / m as f64,
            neg_error: wrong_neg as f64 / ds.n_neg() as f64,
            pos_mass: r.pos_mass,
        });
    }

    pub fn finish(self, config: &TrainConfig, stopped_early: bool) -> TrainedModel {
        TrainedModel {
            algorithm: config.algorithm,
            ensemble: self.ensemble,
            trace: self.trace,
            config: config.clone(),
            initial_weights: self.initial,
            selected: self.selected,
            weight_history: self.weight_history,
            stopped_early,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_value(a).unwrap(), a.name());
        }
        assert!("adaboost2".parse::<Algorithm>().is_err());
    }

    #[test]
    fn db_requires_integer_costs() {
        assert!(integer_costs(&CostSpec::new(2.0, 1.0).unwrap()).is_ok());
        assert!(integer_costs(&CostSpec::new(1.5, 1.0).unwrap()).is_err());
        assert!(integer_costs(&CostSpec::new(0.5, 1.0).unwrap()).is_err());
    }
}
