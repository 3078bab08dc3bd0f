//! Deterministic synthetic datasets and CSV dataset I/O.
//!
//! # Random stream
//!
//! All randomness comes from [`SplitMix64`], a counter-based generator with
//! a fully specified state transition so that ports in other languages can
//! reproduce datasets bit for bit:
//!
//! ```text
//! state  <- state + 0x9E3779B97F4A7C15            (wrapping)
//! z      <- state
//! z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (wrapping)
//! z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB  (wrapping)
//! output <- z ^ (z >> 31)
//! ```
//!
//! A uniform double is `(output >> 11) * 2^-53`. A Gaussian pair uses
//! Box-Muller on two consecutive uniforms `u1, u2` with `u1` replaced by
//! `1 - u1` to keep the logarithm finite; only the cosine branch is used.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domain::Dataset;
use crate::error::{Error, Result};

/// Inner disk radius of the counterexample geometry.
pub const VJ_INNER_RADIUS: f64 = 1.0;
/// Annulus radii of the counterexample geometry.
pub const VJ_RING: (f64, f64) = (1.3, 2.5);

/// Counter-based 64-bit generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    /// Positives uniform in a disk, negatives in a surrounding annulus.
    VjCounterexample,
    /// The counterexample with labels swapped.
    VjInverted,
    /// Two isotropic Gaussians centred at `±separation/2` on every axis.
    GaussianBlobs,
    /// Features uniform on the unit cube, labels independent of features.
    UniformRandom,
}

impl std::str::FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vj_counterexample" => Ok(SynthKind::VjCounterexample),
            "vj_inverted" => Ok(SynthKind::VjInverted),
            "gaussian_blobs" => Ok(SynthKind::GaussianBlobs),
            "uniform_random" => Ok(SynthKind::UniformRandom),
            other => Err(Error::Input(format!("unknown synthetic dataset '{other}'"))),
        }
    }
}

/// Parameters of a synthetic dataset.
///
/// For [`SynthKind::VjInverted`], `n_pos`/`n_neg` count the disk and ring
/// points before the swap, so the inverted set has `n_neg` positives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub n_pos: usize,
    pub n_neg: usize,
    pub seed: u64,
    /// Dimensionality (ignored by the 2-D counterexample kinds).
    pub dims: usize,
    /// Distance between blob centres along each axis.
    pub separation: f64,
    /// Standard deviation of each blob.
    pub spread: f64,
}

impl SynthSpec {
    pub fn new(kind: SynthKind, n_pos: usize, n_neg: usize, seed: u64) -> Self {
        Self { kind, n_pos, n_neg, seed, dims: 2, separation: 2.0, spread: 1.0 }
    }

    pub fn with_dims(mut self, dims: usize) -> Self {
        self.dims = dims;
        self
    }

    pub fn with_blobs(mut self, separation: f64, spread: f64) -> Self {
        self.separation = separation;
        self.spread = spread;
        self
    }
}

fn disk_point(rng: &mut SplitMix64, r_in: f64, r_out: f64) -> Vec<f64> {
    // uniform in area
    let r = (rng.uniform(r_in * r_in, r_out * r_out)).sqrt();
    let theta = rng.uniform(0.0, std::f64::consts::TAU);
    vec![r * theta.cos(), r * theta.sin()]
}

/// Generates the dataset described by `spec`.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    if spec.n_pos == 0 || spec.n_neg == 0 {
        return Err(Error::Input("both classes need at least one example".into()));
    }
    let mut rng = SplitMix64::new(spec.seed);
    let mut rows = Vec::with_capacity(spec.n_pos + spec.n_neg);
    let labels: Vec<i8> = (0..spec.n_pos).map(|_| 1).chain((0..spec.n_neg).map(|_| -1)).collect();
    match spec.kind {
        SynthKind::VjCounterexample | SynthKind::VjInverted => {
            for _ in 0..spec.n_pos {
                rows.push(disk_point(&mut rng, 0.0, VJ_INNER_RADIUS));
            }
            for _ in 0..spec.n_neg {
                rows.push(disk_point(&mut rng, VJ_RING.0, VJ_RING.1));
            }
        }
        SynthKind::GaussianBlobs => {
            if spec.dims == 0 || !(spec.spread > 0.0) || !spec.separation.is_finite() {
                return Err(Error::Input("gaussian blobs need dims >= 1 and a positive spread".into()));
            }
            for &y in &labels {
                let centre = 0.5 * spec.separation * y as f64;
                rows.push((0..spec.dims).map(|_| centre + spec.spread * rng.gaussian()).collect());
            }
        }
        SynthKind::UniformRandom => {
            if spec.dims == 0 {
                return Err(Error::Input("uniform data needs dims >= 1".into()));
            }
            for _ in &labels {
                rows.push((0..spec.dims).map(|_| rng.next_f64()).collect());
            }
        }
    }
    let ds = Dataset::new(rows, labels, None)?;
    Ok(if spec.kind == SynthKind::VjInverted { ds.swap_labels() } else { ds })
}

/// Formats a value with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_label(s: &str, line: u64) -> Result<i8> {
    match s.trim() {
        "1" | "+1" => Ok(1),
        "-1" | "\u{2212}1" => Ok(-1),
        other => match other.parse::<f64>() {
            Ok(v) => Err(Error::Schema { line, message: format!("label must be -1 or 1, got {v}") }),
            Err(_) => Err(Error::Parse { line, message: format!("label '{other}' is not a number") }),
        },
    }
}

/// Reads a dataset from CSV with header `f1,...,fd,label[,cost]`.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let has_cost = cols.last() == Some(&"cost");
    let label_col = if has_cost { cols.len().wrapping_sub(2) } else { cols.len().wrapping_sub(1) };
    if cols.get(label_col) != Some(&"label") || label_col == 0 {
        return Err(Error::Schema {
            line: 1,
            message: "header must be f1,...,fd,label with an optional trailing cost column".into(),
        });
    }

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut costs = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let number = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Parse { line, message: format!("'{s}' is not a number") })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse { line, message: format!("non-finite value '{s}'") })
            }
        };
        let row = record.iter().take(label_col).map(number).collect::<Result<Vec<_>>>()?;
        labels.push(parse_label(&record[label_col], line)?);
        if has_cost {
            let c = number(&record[label_col + 1])?;
            if !(c > 0.0) {
                return Err(Error::Schema { line, message: format!("cost must be positive, got {c}") });
            }
            costs.push(c);
        }
        rows.push(row);
    }
    Dataset::new(rows, labels, has_cost.then_some(costs)).map_err(|e| match e {
        Error::Input(message) => Error::Schema { line: 0, message },
        other => other,
    })
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        other => Error::Parse { line, message: format!("{other:?}") },
    }
}

/// Writes `dataset` in its original input order.
pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let mut header: Vec<String> = (1..=dataset.n_features()).map(|j| format!("f{j}")).collect();
    header.push("label".into());
    if dataset.costs().is_some() {
        header.push("cost".into());
    }
    writeln!(w, "{}", header.join(","))?;

    let mut stored = vec![0; dataset.n()];
    for (i, &orig) in dataset.permutation().iter().enumerate() {
        stored[orig] = i;
    }
    for &i in &stored {
        let mut fields: Vec<String> = dataset.row(i).iter().map(|v| fmt_f64(*v)).collect();
        fields.push(dataset.label(i).to_string());
        if let Some(c) = dataset.costs() {
            fields.push(fmt_f64(c[i]));
        }
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    read_csv(BufReader::new(File::open(path)?))
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(dataset, File::create(path)?)
}

/// SHA-256 of the dataset's canonical CSV form, as lowercase hex.
pub fn fingerprint(dataset: &Dataset) -> String {
    let mut buf = Vec::new();
    write_csv(dataset, &mut buf).expect("writing to memory");
    Sha256::digest(&buf).iter().map(|b| format!("{b:02x}")).collect()
}
