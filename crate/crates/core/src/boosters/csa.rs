//! Cost-Sensitive AdaBoost (hyperbolic goodness equation).

use crate::domain::{Dataset, Voting};
use crate::error::{Error, Result};
use crate::numerics::{bisect, Bracket};
use crate::par::map_range;
use crate::weaklearn::{select_from_losses, StumpPool};

use super::{pos_mass, reweight, Recorder, RoundRecord, TrainConfig, TrainedModel};

const BRACKET_HI: f64 = 64.0;
const BRACKET_LIMIT: f64 = 1e6;

/// Inputs of the per-candidate goodness equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsaParams {
    pub c_pos: f64,
    pub c_neg: f64,
    /// Weight of misclassified positives (`B`).
    pub miss_pos: f64,
    /// Weight of misclassified negatives.
    pub miss_neg: f64,
    /// Total positive weight `T_P`.
    pub mass_pos: f64,
    /// Total negative weight `T_N`.
    pub mass_neg: f64,
}

impl CsaParams {
    /// Lifts both misclassified masses to `clamp` times their class mass
    /// when the candidate is (nearly) perfect on both classes.
    pub fn clamped(mut self, clamp: f64) -> Self {
        if self.miss_pos < clamp * self.mass_pos && self.miss_neg < clamp * self.mass_neg {
            self.miss_pos = self.miss_pos.max(clamp * self.mass_pos);
            self.miss_neg = self.miss_neg.max(clamp * self.mass_neg);
        }
        self
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            miss_pos: self.miss_pos * k,
            miss_neg: self.miss_neg * k,
            mass_pos: self.mass_pos * k,
            mass_neg: self.mass_neg * k,
            ..*self
        }
    }
}

// 0 * inf guard for the growing exponentials
#[inline]
fn term(coef: f64, f: impl FnOnce() -> f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * f()
    }
}

/// `2C_P B cosh(C_P α) + 2C_N D cosh(C_N α) - C_P T_P e^{-C_P α} - C_N T_N e^{-C_N α}`.
pub fn csa_equation(p: &CsaParams, alpha: f64) -> f64 {
    let (cp, cn) = (p.c_pos, p.c_neg);
    term(2.0 * cp * p.miss_pos, || (cp * alpha).cosh()) + term(2.0 * cn * p.miss_neg, || (cn * alpha).cosh())
        - cp * p.mass_pos * (-cp * alpha).exp()
        - cn * p.mass_neg * (-cn * alpha).exp()
}

/// Exponential loss of adding the candidate with goodness `alpha`.
pub fn csa_loss(p: &CsaParams, alpha: f64) -> f64 {
    let (ep, en) = ((-p.c_pos * alpha).exp(), (-p.c_neg * alpha).exp());
    term(p.miss_pos, || (p.c_pos * alpha).exp() - ep)
        + p.mass_pos * ep
        + term(p.miss_neg, || (p.c_neg * alpha).exp() - en)
        + p.mass_neg * en
}

/// Positive root of [`csa_equation`] by bisection.
///
/// Fails with [`Error::NoRoot`] when the equation is non-negative at zero
/// (the candidate cannot lower the loss) or stays negative up to `1e6`.
pub fn solve_csa_alpha(p: &CsaParams) -> Result<f64> {
    let g = |a: f64| csa_equation(p, a);
    let g0 = g(0.0);
    if !(g0 < 0.0) {
        return Err(Error::NoRoot { limit: 0.0 });
    }
    let mut lo = 0.0;
    let mut hi = BRACKET_HI;
    let mut g_hi = g(hi);
    while g_hi < 0.0 {
        if hi >= BRACKET_LIMIT {
            return Err(Error::NoRoot { limit: BRACKET_LIMIT });
        }
        lo = hi;
        hi *= 2.0;
        g_hi = g(hi);
    }
    let g_lo = if lo == 0.0 { g0 } else { g(lo) };
    bisect(g, Bracket::from_values(lo, hi, g_lo, g_hi)?, 1e-12, 200)
}

pub fn train_cs_adaboost(config: &TrainConfig, dataset: &Dataset, pool: &StumpPool) -> Result<TrainedModel> {
    config.validate(dataset)?;
    let m = dataset.n_pos();
    let cs = config.cost_spec;
    let mut weights = config.base_weights(dataset.n());

    let mut rec = Recorder::new(config, dataset, weights.clone(), Voting::WeightedSum);
    for _ in 0..config.rounds {
        rec.snapshot(&weights);
        let mass_pos = pos_mass(&weights, m);
        let mass_neg = crate::numerics::compensated_sum(weights[m..].iter().copied());
        let errors = pool.class_errors_with(dataset, &weights, config.parallelism);
        let solved = map_range(errors.len(), config.parallelism, |f| {
            let p = CsaParams {
                c_pos: cs.c_pos,
                c_neg: cs.c_neg,
                miss_pos: errors[f].pos,
                miss_neg: errors[f].neg,
                mass_pos,
                mass_neg,
            }
            .clamped(config.epsilon_clamp);
            match solve_csa_alpha(&p) {
                Ok(alpha) => (csa_loss(&p, alpha), alpha),
                Err(_) => (f64::INFINITY, 0.0),
            }
        });
        let losses: Vec<f64> = solved.iter().map(|s| s.0).collect();
        let index = select_from_losses(&losses)?.index;
        let alpha = solved[index].1;
        let stump = pool.get(index);
        let z = reweight(&mut weights, dataset, &stump, |i, h| {
            let c = cs.for_label(dataset.label(i));
            (-c * alpha * (dataset.label(i) * h) as f64).exp()
        });
        rec.record(RoundRecord { index, stump, alpha, epsilon: errors[index].total(), z, pos_mass: mass_pos });
    }
    Ok(rec.finish(config, false))
}
