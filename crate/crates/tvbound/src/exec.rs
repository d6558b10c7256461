//! Trial-level parallelism with a deterministic contract: per-trial work
//! is a pure function of the trial index, results come back in index
//! order, and all aggregation downstream is index-ordered — so serial
//! and parallel execution produce bit-identical results.
//!
//! The `parallel` feature (on by default) backs [`ExecMode::Parallel`]
//! with a rayon pool; without it both modes run serially.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Serial,
    #[default]
    Parallel,
}

/// Maps `f` over trial indices `0..n`, returning results in index order.
#[cfg(feature = "parallel")]
pub fn map_trials<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match mode {
        ExecMode::Serial => (0..n).map(f).collect(),
        ExecMode::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

/// Maps `f` over trial indices `0..n`, returning results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_trials<T, F>(_mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_preserve_index_order() {
        let squares = |i: usize| (i * i) as u64;
        let serial = map_trials(ExecMode::Serial, 1000, squares);
        let parallel = map_trials(ExecMode::Parallel, 1000, squares);
        assert_eq!(serial, parallel);
        assert_eq!(serial[7], 49);
        assert_eq!(serial.len(), 1000);
    }

    #[test]
    fn empty_range_yields_empty_vec() {
        let out = map_trials(ExecMode::Parallel, 0, |i| i);
        assert!(out.is_empty());
    }

    #[test]
    fn mode_serializes_as_snake_case() {
        assert_eq!(
            serde_json::to_string(&ExecMode::Parallel).unwrap(),
            "\"parallel\""
        );
        assert_eq!(
            serde_json::from_str::<ExecMode>("\"serial\"").unwrap(),
            ExecMode::Serial
        );
        assert_eq!(ExecMode::default(), ExecMode::Parallel);
    }
}
