//! Simulation and estimation toolkit for the singular Stratonovich SDE
//! `dX = |X|^alpha o dB` and its regularization `dX = |X|^alpha o dB + eps dW`.
//!
//! Modules, bottom up:
//! - [`noise`]: dyadic grids, Brownian pairs, bridge refinement, skew BM
//! - [`lamperti`]: `sigma_eps`, `F_eps`, `F_0` and related maps
//! - [`exact`]: solution paths built by transforming the driving noise
//! - [`integrate`]: Euler-Maruyama (Ito form) and Heun (Stratonovich form)
//! - [`estimate`]: partition sums, local/occupation times, Monte Carlo summaries
//! - [`harness`]: Monte Carlo experiments with pass/fail verdicts

pub mod error;
pub mod estimate;
pub mod exact;
pub mod harness;
pub mod integrate;
pub mod lamperti;
pub mod noise;
pub mod power;
pub mod quad;
pub mod rng;

pub use error::{Error, Result};
pub use estimate::McSummary;
pub use harness::{simulate_paths, Experiment, ExperimentConfig, ExperimentReport, ReportRow, Verdict};
pub use exact::{RotatedNoise, WeakTriple};
pub use integrate::{Scheme, SchemeConfig, Taming};
pub use lamperti::{ModelParams, TransformTable};
pub use noise::{NoisePair, Partition, Path, SkewMethod, SkewParams};
