//! Rotary frequency schedules and their periodicity diagnostics.
//!
//! Every rotary pair `n` turns at angular frequency `theta_n = base^(-2n/d)`.
//! Over a relative offset `delta`, the content-free sub-embedding of a set of
//! pairs moves by `sqrt(sum 4 sin^2(theta_n * delta / 2))`. High-frequency
//! pairs wrap around quickly, so two distant offsets can land on almost the
//! same embedding; the helpers here quantify that.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_BASE: f64 = 1_000_000.0;
pub const DEFAULT_HEAD_DIM: usize = 128;

/// Angle table `theta_0 .. theta_{d/2-1}` for a base and head dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySchedule {
    base: f64,
    head_dim: usize,
    thetas: Vec<f64>,
}

impl FrequencySchedule {
    pub fn new(base: f64, head_dim: usize) -> Result<Self> {
        if !(base.is_finite() && base > 1.0) {
            return Err(Error::invalid(format!(
                "base must be a finite value > 1, got {base}"
            )));
        }
        if head_dim < 2 || !head_dim.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "head_dim must be even and >= 2, got {head_dim}"
            )));
        }
        let d = head_dim as f64;
        let thetas = (0..head_dim / 2)
            .map(|n| base.powf(-2.0 * n as f64 / d))
            .collect();
        Ok(Self {
            base,
            head_dim,
            thetas,
        })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn head_dim(&self) -> usize {
        self.head_dim
    }

    pub fn num_pairs(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Frequency of pair `n`. Panics if `n` is out of range.
    pub fn theta(&self, n: usize) -> f64 {
        self.thetas[n]
    }

    /// Checks that `pairs` is a non-empty set of valid, distinct pair indices.
    pub fn validate_pairs(&self, pairs: &[usize]) -> Result<()> {
        if pairs.is_empty() {
            return Err(Error::invalid("pair set is empty"));
        }
        let mut seen = vec![false; self.num_pairs()];
        for &n in pairs {
            if n >= self.num_pairs() {
                return Err(Error::invalid(format!(
                    "pair index {n} out of range for {} pairs",
                    self.num_pairs()
                )));
            }
            if std::mem::replace(&mut seen[n], true) {
                return Err(Error::invalid(format!("pair index {n} listed twice")));
            }
        }
        Ok(())
    }
}

impl Default for FrequencySchedule {
    fn default() -> Self {
        Self::new(DEFAULT_BASE, DEFAULT_HEAD_DIM).expect("default schedule is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodReport {
    pub pair_index: usize,
    pub theta: f64,
    /// `2π / theta`, in position-index units.
    pub period: f64,
    /// `π / theta`; the pairwise distance grows monotonically up to here.
    pub half_period: f64,
}

pub fn period_table(schedule: &FrequencySchedule) -> Vec<PeriodReport> {
    schedule
        .thetas()
        .iter()
        .enumerate()
        .map(|(pair_index, &theta)| {
            let half_period = PI / theta;
            PeriodReport {
                pair_index,
                theta,
                period: 2.0 * half_period,
                half_period,
            }
        })
        .collect()
}

/// Euclidean distance between unit-amplitude rotary embeddings of `pairs`
/// at two positions `delta` apart.
pub fn sub_embedding_distance(
    schedule: &FrequencySchedule,
    pairs: &[usize],
    delta: f64,
) -> Result<f64> {
    schedule.validate_pairs(pairs)?;
    Ok(distance_unchecked(schedule, pairs, delta))
}

fn distance_unchecked(schedule: &FrequencySchedule, pairs: &[usize], delta: f64) -> f64 {
    pairs
        .iter()
        .map(|&n| {
            let s = (schedule.theta(n) * delta / 2.0).sin();
            4.0 * s * s
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionScanResult {
    pub delta_star: u64,
    pub distance_star: f64,
    /// `(delta, distance)` for every scanned integer offset, when requested.
    pub distances: Option<Vec<(u64, f64)>>,
}

/// Finds the integer offset in `[delta_min, delta_max]` whose sub-embedding
/// lies closest to the origin's. Ties go to the smallest offset.
pub fn collision_scan(
    schedule: &FrequencySchedule,
    pairs: &[usize],
    delta_min: u64,
    delta_max: u64,
    keep_table: bool,
) -> Result<CollisionScanResult> {
    if delta_min < 1 || delta_min > delta_max {
        return Err(Error::invalid(format!(
            "scan window [{delta_min}, {delta_max}] is empty or starts below 1"
        )));
    }
    schedule.validate_pairs(pairs)?;

    let mut table = keep_table.then(Vec::new);
    let mut best = (delta_min, f64::INFINITY);
    for delta in delta_min..=delta_max {
        let dist = distance_unchecked(schedule, pairs, delta as f64);
        if dist < best.1 {
            best = (delta, dist);
        }
        if let Some(t) = table.as_mut() {
            t.push((delta, dist));
        }
    }
    Ok(CollisionScanResult {
        delta_star: best.0,
        distance_star: best.1,
        distances: table,
    })
}

/// Largest offset below which the sub-embedding distance of `pairs` is
/// strictly increasing: `π / max theta`.
pub fn monotonicity_bound(schedule: &FrequencySchedule, pairs: &[usize]) -> Result<f64> {
    schedule.validate_pairs(pairs)?;
    let fastest = pairs
        .iter()
        .map(|&n| schedule.theta(n))
        .fold(0.0_f64, f64::max);
    Ok(PI / fastest)
}
