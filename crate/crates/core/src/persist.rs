//! Model JSON and trace CSV formats.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::boosters::{Algorithm, TrainedModel};
use crate::datagen::fmt_f64;
use crate::domain::{CostSpec, Ensemble, Member, RoundTrace, Voting};
use crate::error::{Error, Result};

pub const MODEL_VERSION: &str = "1";

pub const TRACE_HEADER: &str = "round,epsilon,alpha,z,bound,train_error,pos_error,neg_error,pos_mass";

/// On-disk model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: String,
    pub algorithm: Algorithm,
    pub cost_spec: CostSpec,
    pub threshold: f64,
    pub voting: Voting,
    pub n_features: usize,
    pub members: Vec<Member>,
}

impl ModelFile {
    pub fn from_model(model: &TrainedModel) -> Self {
        let e = &model.ensemble;
        Self {
            version: MODEL_VERSION.into(),
            algorithm: model.algorithm,
            cost_spec: e.cost_spec,
            threshold: e.threshold,
            voting: e.voting,
            n_features: e.n_features,
            members: e.members.clone(),
        }
    }

    pub fn ensemble(&self) -> Result<Ensemble> {
        if self.version != MODEL_VERSION {
            return Err(Error::Schema { line: 0, message: format!("unsupported model version '{}'", self.version) });
        }
        let e = Ensemble {
            n_features: self.n_features,
            members: self.members.clone(),
            threshold: self.threshold,
            voting: self.voting,
            cost_spec: self.cost_spec,
        };
        e.validate().map_err(|err| Error::Schema { line: 0, message: err.to_string() })?;
        Ok(e)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Writes the per-round trace as CSV.
pub fn write_trace_csv<W: Write>(trace: &[RoundTrace], mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in trace {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.round,
            fmt_f64(r.epsilon),
            fmt_f64(r.alpha),
            fmt_f64(r.z),
            fmt_f64(r.bound),
            fmt_f64(r.train_error),
            fmt_f64(r.pos_error),
            fmt_f64(r.neg_error),
            fmt_f64(r.pos_mass)
        )?;
    }
    Ok(())
}
