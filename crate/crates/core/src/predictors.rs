//! Pointwise optimal predictors and conditional risks.
//!
//! `p` is the posterior `P(y=1|x)`. Each variant's predictor is the
//! minimizer over `f` of its conditional risk.

use serde::{Deserialize, Serialize};

use crate::domain::CostSpec;
use crate::error::{Error, Result};

/// Distance kept from 0 and 1 when building grids.
pub const P_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskVariant {
    Ab,
    Cga,
    Csa,
}

impl std::str::FromStr for RiskVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ab" => Ok(RiskVariant::Ab),
            "cga" => Ok(RiskVariant::Cga),
            "csa" => Ok(RiskVariant::Csa),
            other => Err(Error::Input(format!("unknown predictor variant '{other}'"))),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("posterior must lie in (0, 1), got {p}")))
    }
}

/// `½ ln(p/(1-p))`.
pub fn f_ab(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(0.5 * (p / (1.0 - p)).ln())
}

/// `½ ln(C_P p / (C_N (1-p)))`.
pub fn f_cga(p: f64, cost_spec: &CostSpec) -> Result<f64> {
    check_p(p)?;
    Ok(0.5 * ((cost_spec.c_pos * p) / (cost_spec.c_neg * (1.0 - p))).ln())
}

/// `ln(C_P p / (C_N (1-p))) / (C_P + C_N)`.
pub fn f_csa(p: f64, cost_spec: &CostSpec) -> Result<f64> {
    check_p(p)?;
    Ok(((cost_spec.c_pos * p) / (cost_spec.c_neg * (1.0 - p))).ln() / (cost_spec.c_pos + cost_spec.c_neg))
}

pub fn optimal_predictor(variant: RiskVariant, p: f64, cost_spec: &CostSpec) -> Result<f64> {
    match variant {
        RiskVariant::Ab => f_ab(p),
        RiskVariant::Cga => f_cga(p, cost_spec),
        RiskVariant::Csa => f_csa(p, cost_spec),
    }
}

/// Conditional risk of predicting `f` when `P(y=1|x) = p`.
pub fn risk(f: f64, p: f64, cost_spec: &CostSpec, variant: RiskVariant) -> f64 {
    let (cp, cn) = (cost_spec.c_pos, cost_spec.c_neg);
    match variant {
        RiskVariant::Ab => p * (-f).exp() + (1.0 - p) * f.exp(),
        RiskVariant::Cga => p * cp * (-f).exp() + (1.0 - p) * cn * f.exp(),
        RiskVariant::Csa => p * (-cp * f).exp() + (1.0 - p) * (cn * f).exp(),
    }
}

/// One cell of an isoline grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub p: f64,
    pub gamma: f64,
    pub f_value: f64,
}

/// Optimal predictor over `p_grid × gammas`, `p` outer and `γ` inner.
///
/// Each `γ` is turned into a cost pair with the cheaper class at cost 1;
/// `p` is pulled [`P_MARGIN`] away from the ends.
pub fn isoline_grid(variant: RiskVariant, gammas: &[f64], p_grid: &[f64]) -> Result<Vec<RiskPoint>> {
    if gammas.is_empty() || p_grid.is_empty() {
        return Err(Error::Input("isoline grid needs at least one p and one gamma".into()));
    }
    let costs = gammas.iter().map(|&g| CostSpec::from_gamma(g)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(gammas.len() * p_grid.len());
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Input(format!("grid value p = {p} outside [0, 1]")));
        }
        let pc = p.clamp(P_MARGIN, 1.0 - P_MARGIN);
        for (&gamma, cs) in gammas.iter().zip(&costs) {
            out.push(RiskPoint { p: pc, gamma, f_value: optimal_predictor(variant, pc, cs)? });
        }
    }
    Ok(out)
}

/// `k` evenly spaced interior points `1/(k+1), ..., k/(k+1)`.
pub fn interior_grid(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64 / (k + 1) as f64).collect()
}

/// A row of a grid where the predictor drops as `γ` grows while staying positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityWitness {
    pub p: f64,
    pub lower: RiskPoint,
    pub higher: RiskPoint,
}

/// First `(p, γ₁ < γ₂)` in `grid` with `f(γ₁) > f(γ₂) > 0`.
///
/// `grid` must be laid out as [`isoline_grid`] returns it, with `n_gamma`
/// ascending gammas per row.
pub fn find_non_monotone(grid: &[RiskPoint], n_gamma: usize) -> Option<MonotonicityWitness> {
    if n_gamma == 0 {
        return None;
    }
    for row in grid.chunks(n_gamma) {
        for i in 0..row.len() {
            for j in i + 1..row.len() {
                let (lo, hi) = (row[i], row[j]);
                if lo.gamma < hi.gamma && lo.f_value > hi.f_value && hi.f_value > 0.0 {
                    return Some(MonotonicityWitness { p: lo.p, lower: lo, higher: hi });
                }
            }
        }
    }
    None
}
