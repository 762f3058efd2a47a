//! Dyadic time grids and the driving noise: Brownian pairs, Brownian-bridge
//! refinement and skew Brownian motion.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::rng::{stream, stream_rng};

pub const MAX_LEVEL: u32 = 30;

/// Dyadic partition `t_k = k t_end 2^-level`, `k = 0..=2^level`.
#[derive(Debug, Clone)]
pub struct Partition {
    t_end: f64,
    level: u32,
    times: Arc<[f64]>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.t_end == other.t_end && self.level == other.level
    }
}

impl Partition {
    pub fn new(t_end: f64, level: u32) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return param(format!("t_end must be finite and > 0, got {t_end}"));
        }
        if level > MAX_LEVEL {
            return param(format!("level must be in 0..={MAX_LEVEL}, got {level}"));
        }
        let n = 1usize << level;
        let scale = (n as f64).recip();
        let times = (0..=n).map(|k| t_end * (k as f64 * scale)).collect();
        Ok(Self { t_end, level, times })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of intervals, `2^level`.
    pub fn steps(&self) -> usize {
        1usize << self.level
    }

    pub fn mesh(&self) -> f64 {
        self.t_end * (self.steps() as f64).recip()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Index of the grid point closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        let k = (t / self.mesh()).round();
        (k.max(0.0) as usize).min(self.steps())
    }

    /// True when `other` is this partition or a finer dyadic grid on the same interval.
    pub fn is_refined_by(&self, other: &Partition) -> bool {
        self.t_end == other.t_end && other.level >= self.level
    }
}

/// `make_partition` under its operational name.
pub fn make_partition(t_end: f64, level: u32) -> Result<Partition> {
    Partition::new(t_end, level)
}

/// Values of one process on a [`Partition`].
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    partition: Partition,
    values: Vec<f64>,
}

impl Path {
    pub fn new(partition: Partition, values: Vec<f64>) -> Result<Self> {
        if values.len() != partition.times().len() {
            return param(format!(
                "path has {} values but the partition has {} grid times",
                values.len(),
                partition.times().len()
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite path value at index {k}")));
        }
        Ok(Self { partition, values })
    }

    /// Constructor for internal maps whose outputs are finite by construction.
    pub(crate) fn from_parts(partition: Partition, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), partition.times().len());
        Self { partition, values }
    }

    pub fn constant(partition: &Partition, c: f64) -> Self {
        Self::from_parts(partition.clone(), vec![c; partition.times().len()])
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("a partition has at least two points")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise image under `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Path {
        Path::from_parts(self.partition.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn negated(&self) -> Path {
        self.map(|v| -v)
    }

    /// Restriction to a coarser dyadic grid on the same interval.
    pub fn restrict(&self, level: u32) -> Result<Path> {
        if level > self.partition.level {
            return param(format!(
                "cannot restrict a level-{} path to finer level {level}",
                self.partition.level
            ));
        }
        let target = Partition::new(self.partition.t_end, level)?;
        let stride = 1usize << (self.partition.level - level);
        let values = self.values.iter().step_by(stride).copied().collect();
        Ok(Path::from_parts(target, values))
    }

    pub(crate) fn check_same_grid(&self, other: &Path) -> Result<()> {
        if self.partition != other.partition {
            return param(format!(
                "partition mismatch: (t_end {}, level {}) vs (t_end {}, level {})",
                self.partition.t_end, self.partition.level, other.partition.t_end, other.partition.level
            ));
        }
        Ok(())
    }
}

/// Independent Brownian paths `(B, W)` and the key that generated them.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePair {
    pub b: Path,
    pub w: Path,
    pub seed: u64,
    pub path_index: u64,
}

impl NoisePair {
    pub fn partition(&self) -> &Partition {
        self.b.partition()
    }

    /// Bridge-refines both components to `target`, drawing midpoints from the
    /// keyed bridge streams of `(seed, path_index)`. Successive refinements of the
    /// same pair are therefore reproducible and nested.
    pub fn refine(&self, target: &Partition) -> Result<NoisePair> {
        let b = refine_keyed(&self.b, target, self.seed, self.path_index, stream::bridge_b)?;
        let w = refine_keyed(&self.w, target, self.seed, self.path_index, stream::bridge_w)?;
        Ok(NoisePair { b, w, seed: self.seed, path_index: self.path_index })
    }
}

fn brownian_path<R: Rng>(p: &Partition, start: f64, rng: &mut R) -> Vec<f64> {
    let sd = p.mesh().sqrt();
    let mut values = Vec::with_capacity(p.steps() + 1);
    let mut x = start;
    values.push(x);
    for _ in 0..p.steps() {
        let z: f64 = rng.sample(StandardNormal);
        x += sd * z;
        values.push(x);
    }
    values
}

pub fn sample_bm_pair(p: &Partition, seed: u64, path_index: u64) -> NoisePair {
    let b = brownian_path(p, 0.0, &mut stream_rng(seed, stream::BM_B, path_index));
    let w = brownian_path(p, 0.0, &mut stream_rng(seed, stream::BM_W, path_index));
    NoisePair {
        b: Path::from_parts(p.clone(), b),
        w: Path::from_parts(p.clone(), w),
        seed,
        path_index,
    }
}

/// Refines a Brownian-increment path to a finer dyadic grid by inserting
/// Brownian-bridge midpoints one level at a time. Values at the original grid
/// times are copied unchanged.
pub fn refine_bridge<R: Rng>(x: &Path, target: &Partition, rng: &mut R) -> Result<Path> {
    let from = x.partition();
    check_refinement(from, target)?;
    let mut values = x.values.clone();
    for level in from.level + 1..=target.level {
        values = bridge_one_level(&values, from.t_end, level, rng);
    }
    Ok(Path::from_parts(target.clone(), values))
}

fn check_refinement(from: &Partition, target: &Partition) -> Result<()> {
    if !from.is_refined_by(target) {
        return param(format!(
            "target (t_end {}, level {}) is not a dyadic refinement of (t_end {}, level {})",
            target.t_end, target.level, from.t_end, from.level
        ));
    }
    Ok(())
}

fn refine_keyed(
    x: &Path,
    target: &Partition,
    seed: u64,
    path_index: u64,
    stream_of: fn(u32) -> u64,
) -> Result<Path> {
    let from = x.partition();
    check_refinement(from, target)?;
    let mut values = x.values.clone();
    for level in from.level + 1..=target.level {
        let mut rng = stream_rng(seed, stream_of(level), path_index);
        values = bridge_one_level(&values, from.t_end, level, &mut rng);
    }
    Ok(Path::from_parts(target.clone(), values))
}

/// Doubles the resolution of `coarse`, producing a path on the level-`level` grid.
fn bridge_one_level<R: Rng>(coarse: &[f64], t_end: f64, level: u32, rng: &mut R) -> Vec<f64> {
    let coarse_len = t_end / (1u64 << (level - 1)) as f64;
    // Bridge midpoint variance is a quarter of the coarse interval length.
    let sd = (0.25 * coarse_len).sqrt();
    let mut out = Vec::with_capacity(2 * coarse.len() - 1);
    out.push(coarse[0]);
    for pair in coarse.windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        out.push(0.5 * (pair[0] + pair[1]) + sd * z);
        out.push(pair[1]);
    }
    out
}

/// Skewness and starting point of a skew Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewParams {
    pub theta: f64,
    pub start: f64,
}

impl SkewParams {
    pub fn new(theta: f64, start: f64) -> Result<Self> {
        let sp = Self { theta, start };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta.abs() <= 1.0) {
            return param(format!("|theta| <= 1 required, got theta = {}", self.theta));
        }
        if !self.start.is_finite() {
            return param("skew BM start must be finite");
        }
        Ok(())
    }

    /// Probability that an excursion leaving zero is positive.
    pub fn p_up(&self) -> f64 {
        0.5 * (1.0 + self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkewMethod {
    /// Random signs for the sign-constant stretches of a simulated Brownian path.
    ExcursionFlip,
    /// Simple random walk with a biased step out of zero.
    HarrisonShepp,
}

pub fn sample_skew_bm(
    p: &Partition,
    sp: SkewParams,
    seed: u64,
    path_index: u64,
    method: SkewMethod,
) -> Result<Path> {
    sp.validate()?;
    let mut signs = stream_rng(seed, stream::SKEW_SIGNS, path_index);
    let values = match method {
        SkewMethod::ExcursionFlip => {
            let mut path_rng = stream_rng(seed, stream::SKEW_PATH, path_index);
            let bm = brownian_path(p, sp.start, &mut path_rng);
            flip_excursions(&bm, sp.p_up(), &mut signs)
        }
        SkewMethod::HarrisonShepp => skew_walk(p, sp, &mut signs),
    };
    Ok(Path::from_parts(p.clone(), values))
}

/// A new stretch starts at `k` when `v[k-1] v[k] <= 0` and `v[k-1] != 0`; a path
/// started exactly at zero also opens a stretch at index 0. Each such stretch
/// gets sign `+` with probability `p_up`; magnitudes are kept.
fn flip_excursions<R: Rng>(bm: &[f64], p_up: f64, rng: &mut R) -> Vec<f64> {
    let draw = |rng: &mut R| if rng.random::<f64>() < p_up { 1.0 } else { -1.0 };
    let mut out = Vec::with_capacity(bm.len());
    // Multiplier applied to |v|; the stretch before the first crossing keeps its sign.
    let mut s = if bm[0] == 0.0 { draw(rng) } else { bm[0].signum() };
    out.push(s * bm[0].abs());
    for k in 1..bm.len() {
        let (prev, cur) = (bm[k - 1], bm[k]);
        if prev != 0.0 && prev * cur <= 0.0 {
            s = draw(rng);
        }
        out.push(s * cur.abs());
    }
    out
}

/// Walk on the lattice `sqrt(mesh) Z`, started at the lattice point nearest to
/// `start`; from 0 it steps up with probability `(1+theta)/2`.
fn skew_walk<R: Rng>(p: &Partition, sp: SkewParams, rng: &mut R) -> Vec<f64> {
    let h = p.mesh().sqrt();
    let mut k = (sp.start / h).round() as i64;
    let p_up = sp.p_up();
    let mut out = Vec::with_capacity(p.steps() + 1);
    out.push(k as f64 * h);
    for _ in 0..p.steps() {
        let up = if k == 0 { p_up } else { 0.5 };
        k += if rng.random::<f64>() < up { 1 } else { -1 };
        out.push(k as f64 * h);
    }
    out
}
