//! Needle-in-a-haystack layouts for long video retrieval, with optional
//! periodic distractors, and a positional susceptibility score relating
//! distractor spacing to rotary collisions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{self, FrequencySchedule};
use crate::rotary::DimensionAllocation;

pub const DEFAULT_TOKENS_PER_FRAME: usize = 144;
pub const DEFAULT_DISTRACTOR_PERIOD: usize = 200;

/// Frame-level placement of a needle and its distractors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaystackPlan {
    pub total_frames: usize,
    #[serde(rename = "needle")]
    pub needle_frame: usize,
    #[serde(rename = "distractors")]
    pub distractor_frames: Vec<usize>,
    pub tokens_per_frame: usize,
}

impl HaystackPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub frame_counts: Vec<usize>,
    pub depths: Vec<f64>,
}

impl SweepGrid {
    /// Every `(frames, depth)` combination, frame-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.frame_counts
            .iter()
            .flat_map(move |&f| self.depths.iter().map(move |&d| (f, d)))
    }
}

fn needle_for(total_frames: usize, depth: f64) -> Result<usize> {
    if total_frames < 1 {
        return Err(Error::invalid("haystack needs at least one frame"));
    }
    if !(0.0..=1.0).contains(&depth) {
        return Err(Error::invalid(format!(
            "depth must lie in [0, 1], got {depth}"
        )));
    }
    Ok((depth * (total_frames - 1) as f64).floor() as usize)
}

/// Plain haystack: a needle at `floor(depth * (total_frames - 1))`.
pub fn plan_vniah(total_frames: usize, depth: f64) -> Result<HaystackPlan> {
    Ok(HaystackPlan {
        total_frames,
        needle_frame: needle_for(total_frames, depth)?,
        distractor_frames: Vec::new(),
        tokens_per_frame: DEFAULT_TOKENS_PER_FRAME,
    })
}

/// Haystack with distractors at every nonzero multiple of `period` frames
/// from the needle, on both sides.
pub fn plan_vniah_d(total_frames: usize, depth: f64, period: usize) -> Result<HaystackPlan> {
    if period < 1 {
        return Err(Error::invalid("distractor period must be >= 1"));
    }
    let mut plan = plan_vniah(total_frames, depth)?;
    let needle = plan.needle_frame;
    let below = (1..=needle / period).rev().map(|k| needle - k * period);
    let above = (needle + period..total_frames).step_by(period);
    plan.distractor_frames = below.chain(above).collect();
    Ok(plan)
}

/// Haystack lengths `start, start + step, ... <= max_frames` crossed with
/// depths `0, depth_step, ..., 1`.
pub fn sweep_grid(
    start: usize,
    step: usize,
    max_frames: usize,
    depth_step: f64,
) -> Result<SweepGrid> {
    if start < 1 || step < 1 || start > max_frames {
        return Err(Error::invalid(format!(
            "invalid frame sweep start={start} step={step} max={max_frames}"
        )));
    }
    if !(depth_step > 0.0 && depth_step <= 1.0) {
        return Err(Error::invalid(format!(
            "depth_step must lie in (0, 1], got {depth_step}"
        )));
    }
    let frame_counts = (start..=max_frames).step_by(step).collect();

    // k / (1 / step) keeps exact decimals such as 0.6 for step 0.2.
    let per_unit = 1.0 / depth_step;
    let mut depths: Vec<f64> = (0..)
        .map(|k| k as f64 / per_unit)
        .take_while(|&d| d < 1.0 - 1e-9)
        .collect();
    depths.push(1.0);
    Ok(SweepGrid {
        frame_counts,
        depths,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Susceptibility {
    pub min_distance: f64,
    pub worst_distractor: usize,
}

/// Smallest temporal sub-embedding distance between the needle and any
/// distractor, with `frame_position` mapping a frame to its temporal coordinate.
pub fn susceptibility(
    plan: &HaystackPlan,
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
    frame_position: impl Fn(usize) -> f64,
) -> Result<Susceptibility> {
    if plan.distractor_frames.is_empty() {
        return Err(Error::invalid("plan has no distractors"));
    }
    let pairs = alloc.t_pairs();
    schedule.validate_pairs(pairs)?;
    let needle_t = frame_position(plan.needle_frame);

    let mut worst: Option<Susceptibility> = None;
    for &f in &plan.distractor_frames {
        let delta = (frame_position(f) - needle_t).abs();
        let d = freq::sub_embedding_distance(schedule, pairs, delta)?;
        let better = match worst {
            None => true,
            Some(w) => d < w.min_distance || (d == w.min_distance && f < w.worst_distractor),
        };
        if better {
            worst = Some(Susceptibility {
                min_distance: d,
                worst_distractor: f,
            });
        }
    }
    Ok(worst.expect("non-empty distractor set"))
}
