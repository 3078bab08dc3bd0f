//! AdaBoostDB: class-dependent exponential bases with a polynomial root
//! search per candidate.
//!
//! Weights live in two per-class subdistributions plus a pair of class
//! accumulators. Accumulators start at the class masses of the initial
//! distribution and are rescaled to unit sum every round; only their ratio
//! enters the algorithm.

use crate::domain::{normalize, Dataset, Voting};
use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, positive_poly_root};
use crate::par::map_range;
use crate::weaklearn::{select_from_losses, StumpPool};

use super::{integer_costs, Recorder, RoundRecord, TrainConfig, TrainedModel};

/// Slack applied to the pruning test so rounding can never prune the winner.
const PRUNE_SLACK: f64 = 4e-12;

/// Per-candidate quantities of one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbParams {
    pub c_pos: u32,
    pub c_neg: u32,
    pub acc_pos: f64,
    pub acc_neg: f64,
    /// Error on the positive subdistribution.
    pub err_pos: f64,
    pub err_neg: f64,
}

impl DbParams {
    /// Builds parameters from the static pair `(a, b)` directly.
    pub fn from_ab(c_pos: u32, c_neg: u32, a: f64, b: f64, err_pos: f64, err_neg: f64) -> Self {
        Self { c_pos, c_neg, acc_pos: a / c_pos as f64, acc_neg: b / c_neg as f64, err_pos, err_neg }
    }

    pub fn a(&self) -> f64 {
        let (p, n) = (self.c_pos as f64 * self.acc_pos, self.c_neg as f64 * self.acc_neg);
        p / (p + n)
    }

    pub fn b(&self) -> f64 {
        1.0 - self.a()
    }

    /// `a·ε_P + b·ε_N < ½`: the candidate can lower the loss at all.
    pub fn contributes(&self) -> bool {
        self.a() * self.err_pos + self.b() * self.err_neg < 0.5
    }

    /// Lower bound on [`db_loss`] over every goodness value.
    pub fn loss_lower_bound(&self) -> f64 {
        let g = |e: f64| 2.0 * (e * (1.0 - e)).max(0.0).sqrt();
        self.acc_pos * g(self.err_pos) + self.acc_neg * g(self.err_neg)
    }

    fn clamped(mut self, clamp: f64) -> Self {
        if self.err_pos < clamp && self.err_neg < clamp {
            self.err_pos = clamp;
            self.err_neg = clamp;
        }
        self
    }
}

/// `(exponent, coefficient)` terms of the stationarity polynomial in
/// `x = e^α`, shifted by `max(C_P, C_N)` so every exponent is non-negative.
pub fn db_polynomial(p: &DbParams) -> Vec<(u32, f64)> {
    let (cp, cn) = (p.c_pos, p.c_neg);
    let s = cp.max(cn);
    let (a, b) = (p.a(), p.b());
    vec![
        (s + cp, a * p.err_pos),
        (s + cn, b * p.err_neg),
        (s - cn, b * (p.err_neg - 1.0)),
        (s - cp, a * (p.err_pos - 1.0)),
    ]
}

/// The unique positive root `r`; the goodness is `ln r`.
pub fn solve_db_root(p: &DbParams) -> Result<f64> {
    if !p.contributes() {
        return Err(Error::NoRoot { limit: 0.0 });
    }
    positive_poly_root(&db_polynomial(p))
}

/// Loss `A_P[ε_P e^{C_P α} + (1-ε_P) e^{-C_P α}] + A_N[...]`.
pub fn db_loss(p: &DbParams, alpha: f64) -> f64 {
    let side = |acc: f64, e: f64, c: u32| {
        let k = c as f64 * alpha;
        let up = if e == 0.0 { 0.0 } else { e * k.exp() };
        acc * (up + (1.0 - e) * (-k).exp())
    };
    side(p.acc_pos, p.err_pos, p.c_pos) + side(p.acc_neg, p.err_neg, p.c_neg)
}

pub fn train_adaboost_db(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let (cp, cn) = integer_costs(&config.cost_spec)?;
    let m = dataset.n_pos();
    let initial = config.base_weights(dataset.n());

    let mut acc_pos = compensated_sum(initial[..m].iter().copied());
    let mut acc_neg = compensated_sum(initial[m..].iter().copied());
    let mut sub = initial.clone();
    normalize(&mut sub[..m]);
    normalize(&mut sub[m..]);

    let mut rec = Recorder::new(config, dataset, initial, Voting::WeightedSum);
    let mut stopped_early = false;
    for _ in 0..config.rounds {
        if config.record_weights {
            let composite: Vec<f64> = sub
                .iter()
                .enumerate()
                .map(|(i, d)| d * if i < m { acc_pos } else { acc_neg })
                .collect();
            rec.snapshot(&composite);
        }

        let errors = pool.class_errors_with(dataset, &sub, config.parallelism);
        let params: Vec<DbParams> = errors
            .iter()
            .map(|e| {
                DbParams { c_pos: cp, c_neg: cn, acc_pos, acc_neg, err_pos: e.pos, err_neg: e.neg }
                    .clamped(config.epsilon_clamp)
            })
            .collect();
        let bounds = map_range(params.len(), config.parallelism, |f| {
            if params[f].contributes() {
                params[f].loss_lower_bound()
            } else {
                f64::INFINITY
            }
        });

        // root searches in order of increasing lower bound; once the bound
        // exceeds the best loss found, no later candidate can win
        let mut order: Vec<usize> = (0..params.len()).filter(|&f| bounds[f].is_finite()).collect();
        if order.is_empty() {
            stopped_early = true;
            break;
        }
        order.sort_by(|&x, &y| bounds[x].total_cmp(&bounds[y]).then(x.cmp(&y)));
        let mut losses = vec![f64::INFINITY; params.len()];
        let mut alphas = vec![0.0; params.len()];
        let mut best = f64::INFINITY;
        for f in order {
            if bounds[f] > best * (1.0 + PRUNE_SLACK) {
                break;
            }
            if let Ok(r) = solve_db_root(&params[f]) {
                let alpha = r.ln();
                let loss = db_loss(&params[f], alpha);
                losses[f] = loss;
                alphas[f] = alpha;
                best = best.min(loss);
            }
        }
        let index = match select_from_losses(&losses) {
            Ok(sel) => sel.index,
            Err(_) => {
                stopped_early = true;
                break;
            }
        };
        let alpha = alphas[index];
        let stump = pool.get(index);
        let epsilon = acc_pos * errors[index].pos + acc_neg * errors[index].neg;
        let pos_mass = acc_pos;

        for (i, d) in sub.iter_mut().enumerate() {
            let y = dataset.label(i);
            let c = if y > 0 { cp } else { cn } as f64;
            *d *= (-c * alpha * (y * stump.predict(dataset.row(i))) as f64).exp();
        }
        let sum_pos = normalize(&mut sub[..m]);
        let sum_neg = normalize(&mut sub[m..]);
        let z = acc_pos * sum_pos + acc_neg * sum_neg;
        acc_pos = acc_pos * sum_pos / z;
        acc_neg = acc_neg * sum_neg / z;

        rec.record(RoundRecord { index, stump, alpha, epsilon, z, pos_mass });
    }
    Ok(rec.finish(config, stopped_early))
}
