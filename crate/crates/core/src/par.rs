//! Data-parallel helpers with a sequential fallback.
//!
//! Every parallel entry point in the crate funnels through [`map_range`] so
//! that results are collected in index order regardless of how the work was
//! scheduled. Building without the `parallel` feature removes rayon entirely.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the data-parallel inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    Sequential,
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Parallelism::Rayon
        } else {
            Parallelism::Sequential
        }
    }
}

impl Parallelism {
    /// Whether this build can actually run the parallel path.
    pub fn available(self) -> bool {
        match self {
            Parallelism::Sequential => true,
            Parallelism::Rayon => cfg!(feature = "parallel"),
        }
    }
}

/// Maps `f` over `0..n`, returning results in index order.
pub fn map_range<T, F>(n: usize, parallelism: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match parallelism {
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_range(1000, Parallelism::Sequential, |i| i * i);
        let par = map_range(1000, Parallelism::Rayon, |i| i * i);
        assert_eq!(seq, par);
    }
}
