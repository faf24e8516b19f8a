//! Provably accurate dimensionality reduction for k-means clustering.
//!
//! Three reductions map an `m × n` data matrix `A` to a narrow `m × r` matrix `C`
//! on which Lloyd's method is then run:
//!
//! - [`reducers::reduce_sampling`]: feature *selection*. Rows of an (approximate)
//!   top-k right singular basis give sampling probabilities; `r` rescaled columns
//!   of `A` are drawn with replacement.
//! - [`reducers::reduce_rp`]: feature *extraction* with a random `±1/√r` sign
//!   matrix, multiplied blockwise with the mailman algorithm.
//! - [`reducers::reduce_svd`]: feature extraction with `C = A·Z`, where `Z` comes
//!   from the exact SVD or from the randomized Frobenius-norm SVD.
//!
//! The crate is `no_std` and only needs `alloc`. All randomness flows through
//! explicit `u64` seeds (see [`rng`]), so every routine is reproducible.

#![no_std]

extern crate alloc;

mod error;
mod math;

pub mod datagen;
pub mod kmeans;
pub mod linalg;
pub mod reducers;
pub mod rng;
pub mod sketch;
pub mod svd;

pub use error::{Error, Result};
pub use linalg::Matrix;
