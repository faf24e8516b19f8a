//! Reductions with wall-clock timing.

use std::time::{Duration, Instant};

use kmsketch_core::reducers::{self, Reduction, ReductionMethod};
use kmsketch_core::Matrix;

use crate::Result;

/// A reduction plus the time spent producing it (reduction only, no clustering).
#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub c: Matrix,
    pub method: ReductionMethod,
    pub r: usize,
    pub elapsed: Duration,
    pub seed: u64,
}

impl ReductionResult {
    pub fn from_reduction(red: Reduction, elapsed: Duration) -> Self {
        Self { c: red.c, method: red.method, r: red.r, elapsed, seed: red.seed }
    }
}

/// Runs `f` and returns its output with the elapsed monotonic time.
pub fn time<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

pub fn reduce(a: &Matrix, method: ReductionMethod, k: usize, r: usize, seed: u64) -> Result<ReductionResult> {
    let (red, elapsed) = time(|| reducers::reduce(a, method, k, r, seed));
    Ok(ReductionResult::from_reduction(red?, elapsed))
}

pub fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}
