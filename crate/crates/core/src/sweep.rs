//! Algorithm × cost grid runs.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::boosters::{train, Algorithm, TrainConfig};
use crate::datagen::fmt_f64;
use crate::domain::{CostSpec, Dataset};
use crate::metrics::cost_error;
use crate::par::{map_range, Parallelism};
use crate::weaklearn::StumpPool;

pub const SWEEP_HEADER: &str = "algorithm,c_pos,c_neg,global_error,pos_error,neg_error,rounds,runtime_ms,status";

/// One finished (algorithm, cost) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub c_pos: f64,
    pub c_neg: f64,
    pub global_error: Option<f64>,
    pub pos_error: Option<f64>,
    pub neg_error: Option<f64>,
    pub rounds: usize,
    pub runtime_ms: f64,
    /// `ok`, `stopped_early`, or `error: ...`.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        !self.status.starts_with("error")
    }
}

/// Trains every algorithm at every cost pair on `dataset` and reports the
/// training-set errors. Rows come back ordered by algorithm, then cost, in
/// the order given; a failing cell is recorded and the sweep continues.
pub fn run_sweep(
    algorithms: &[Algorithm],
    costs: &[CostSpec],
    dataset: &Dataset,
    pool: &StumpPool,
    rounds: usize,
    parallelism: Parallelism,
) -> Vec<SweepRow> {
    let cells: Vec<(Algorithm, CostSpec)> =
        algorithms.iter().flat_map(|&a| costs.iter().map(move |&c| (a, c))).collect();
    map_range(cells.len(), parallelism, |k| {
        let (algorithm, cost_spec) = cells[k];
        let mut config = TrainConfig::new(algorithm, rounds, cost_spec);
        config.parallelism = Parallelism::Sequential;
        let start = Instant::now();
        let result = train(&config, dataset, pool)
            .and_then(|model| cost_error(&model.ensemble, dataset, &cost_spec).map(|r| (model, r)));
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let mut row = SweepRow {
            algorithm,
            c_pos: cost_spec.c_pos,
            c_neg: cost_spec.c_neg,
            global_error: None,
            pos_error: None,
            neg_error: None,
            rounds: 0,
            runtime_ms,
            status: String::new(),
        };
        match result {
            Ok((model, report)) => {
                row.global_error = Some(report.global);
                row.pos_error = Some(report.err_pos);
                row.neg_error = Some(report.err_neg);
                row.rounds = model.rounds_completed();
                row.status = if model.stopped_early { "stopped_early" } else { "ok" }.into();
            }
            Err(e) => row.status = format!("error: {e}"),
        }
        row
    })
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:.3},\"{}\"",
            r.algorithm,
            fmt_f64(r.c_pos),
            fmt_f64(r.c_neg),
            opt(r.global_error),
            opt(r.pos_error),
            opt(r.neg_error),
            r.rounds,
            r.runtime_ms,
            r.status.replace('"', "'")
        )?;
    }
    Ok(())
}
