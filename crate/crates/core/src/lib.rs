//! Gittins indices of finite-state bandits, and optimal stopping of Markov
//! chains through them.
//!
//! The main entry point is [`fp_compute`], a fast-pivoting algorithm that
//! computes all `n` index values in `(2/3) n^3 + O(n^2)` arithmetic
//! operations (discounted or undiscounted). Three reference algorithms —
//! conventional pivoting ([`cp_compute`], `2 n^3`), state elimination
//! ([`se_compute`], `n^3`), and repeated linear solves ([`vwb_compute`],
//! `(1/3) n^4`) — plus an exhaustive oracle ([`oracle::gittins_bruteforce`])
//! exist for cross-validation and benchmarking; every algorithm reports an
//! exact tally of the arithmetic it performed.
//!
//! Optimal stopping with terminal rewards reduces to an index computation
//! ([`stopping::solve_optimal_stopping`]): stop wherever the index of the
//! reduced problem is at most the continuation charge.
//!
//! The numeric core is generic over the scalar type ([`Scalar`], i.e.
//! `f32`/`f64`); the aliases below pin the common `f64` instantiations
//! used by the CLI and the instance file format.
//!
//! ```
//! use gittins::{fp_compute, BanditInstanceF64, Mat};
//!
//! let instance = BanditInstanceF64::new(
//!     Mat::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]])?,
//!     vec![1.0, 0.0],
//!     0.5,
//! )?;
//! let result = fp_compute(&instance, false)?;
//! assert_eq!(result.values, vec![1.0, 0.25]);
//! assert_eq!(result.order, vec![0, 1]);
//! # Ok::<(), gittins::Error>(())
//! ```

pub mod counter;
pub mod cp;
pub mod error;
pub mod fp;
pub mod io;
pub mod linsolve;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod se;
pub mod stopping;
pub mod vwb;

pub use counter::OpCounter;
pub use cp::cp_compute;
pub use error::{Error, Result};
pub use fp::{fp_compute, fp_compute_recorded, fp_compute_traced};
pub use io::{load_instance, parse_instance, save_instance, save_stopping_instance};
pub use linsolve::{evaluate_policy, solve_dense};
pub use matrix::Mat;
pub use model::{random_instance, BanditInstance, GeneratorConfig, IndexResult, StoppingInstance};
pub use scalar::Scalar;
pub use se::se_compute;
pub use stopping::{reduce_terminal_rewards, solve_optimal_stopping, value_iteration};
pub use vwb::vwb_compute;

/// Double-precision instantiations, matching the instance file format.
pub type BanditInstanceF64 = model::BanditInstance<f64>;
pub type StoppingInstanceF64 = model::StoppingInstance<f64>;
pub type IndexResultF64 = model::IndexResult<f64>;
pub type StoppingSolutionF64 = stopping::StoppingSolution<f64>;
pub type MatF64 = matrix::Mat<f64>;

/// Single-precision instantiations.
pub type BanditInstanceF32 = model::BanditInstance<f32>;
pub type IndexResultF32 = model::IndexResult<f32>;
