//! Seeded invariant suite behind `ropelab check` and `ropelab rotary check`.
//!
//! Comparisons are written as `!(a < b)` where a NaN must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ropelab::freq::{self, monotonicity_bound, sub_embedding_distance};
use ropelab::layout::assign_positions;
use ropelab::niah::{plan_vniah_d, susceptibility};
use ropelab::rotary::{block_diag_oracle, decompose_score, rotate, score};
use ropelab::{
    DimensionAllocation, FrequencySchedule, HeadVector, PositionTriple, Segment, SequenceSpec,
    TokenKind, VariantConfig, VariantKind,
};

/// Random inputs shared by the suite and the test harnesses.
pub mod gen {
    use super::*;

    pub fn vector(rng: &mut impl Rng, d: usize) -> HeadVector {
        HeadVector::new((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    pub fn unit_vector(rng: &mut impl Rng, d: usize) -> HeadVector {
        let v = vector(rng, d);
        let n = v.norm().max(f64::MIN_POSITIVE);
        HeadVector::new(v.components().iter().map(|c| c / n).collect())
    }

    pub fn position(rng: &mut impl Rng, span: f64) -> PositionTriple {
        PositionTriple::new(
            rng.gen_range(-span..span),
            rng.gen_range(-span..span),
            rng.gen_range(-span..span),
        )
    }

    /// `[Text, Video, Text]` with small random extents.
    pub fn text_video_text(rng: &mut impl Rng) -> SequenceSpec {
        SequenceSpec::new(vec![
            Segment::Text(rng.gen_range(1..8)),
            Segment::Video {
                frames: rng.gen_range(1..6),
                width: rng.gen_range(1..7),
                height: rng.gen_range(1..7),
            },
            Segment::Text(rng.gen_range(1..8)),
        ])
        .expect("non-zero extents")
    }

    /// Arbitrary interleaving of text and video segments.
    pub fn mixed(rng: &mut impl Rng) -> SequenceSpec {
        let n = rng.gen_range(1..6);
        let segs = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Segment::Text(rng.gen_range(1..6))
                } else {
                    Segment::Video {
                        frames: rng.gen_range(1..4),
                        width: rng.gen_range(1..5),
                        height: rng.gen_range(1..5),
                    }
                }
            })
            .collect();
        SequenceSpec::new(segs).expect("non-zero extents")
    }

    pub fn pair_subset(rng: &mut impl Rng, num_pairs: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..num_pairs).collect();
        all.shuffle(rng);
        let k = rng.gen_range(1..=num_pairs);
        all.truncate(k);
        all.sort_unstable();
        all
    }
}

pub struct SuiteContext {
    pub schedule: FrequencySchedule,
    pub alloc: DimensionAllocation,
    /// Base 1e6, d = 128.
    pub canonical: FrequencySchedule,
}

impl SuiteContext {
    pub fn new(schedule: FrequencySchedule, alloc: DimensionAllocation) -> Self {
        Self {
            schedule,
            alloc,
            canonical: FrequencySchedule::default(),
        }
    }
}

type Check = fn(&SuiteContext, &mut ChaCha8Rng) -> Result<(), String>;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub failure: Option<String>,
}

pub const PROPERTIES: &[(&str, Check)] = &[
    ("freq.theta_ratio", theta_ratio),
    ("freq.distance_even", distance_even),
    ("freq.distance_periodic", distance_periodic),
    ("freq.monotone_below_bound", monotone_below_bound),
    (
        "freq.mrope_temporal_nonmonotone",
        mrope_temporal_nonmonotone,
    ),
    (
        "freq.videorope_temporal_monotone",
        videorope_temporal_monotone,
    ),
    ("layout.vanilla_unit_steps", vanilla_unit_steps),
    ("layout.tad_accumulator", tad_accumulator),
    ("layout.videorope_diagonal", videorope_diagonal),
    (
        "layout.videorope_unit_delta_symmetric",
        videorope_unit_delta_symmetric,
    ),
    ("layout.mrope_adjacency", mrope_adjacency),
    ("layout.deterministic", layout_deterministic),
    ("rotary.isometry", isometry),
    ("rotary.composition", composition),
    ("rotary.relative_form", relative_form),
    ("rotary.argmax_shift_invariance", argmax_shift_invariance),
    ("rotary.decomposition_exact", decomposition_exact),
    ("rotary.oracle_equivalence", oracle_equivalence),
    ("rotary.channel_independence", channel_independence),
    ("niah.distractor_multiples", distractor_multiples),
    ("niah.videorope_nearest_worst", videorope_nearest_worst),
    ("niah.cross_module_consistency", cross_module_consistency),
];

/// Runs every property with an RNG derived from `seed` and the property index.
pub fn run_all(ctx: &SuiteContext, seed: u64) -> Vec<PropertyOutcome> {
    PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            PropertyOutcome {
                name,
                failure: check(ctx, &mut rng).err(),
            }
        })
        .collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn theta_ratio(ctx: &SuiteContext, _: &mut ChaCha8Rng) -> Result<(), String> {
    let s = &ctx.schedule;
    let ratio = s.base().powf(-2.0 / s.head_dim() as f64);
    if s.thetas()[0] != 1.0 {
        return Err(format!("theta_0 = {}", s.thetas()[0]));
    }
    for (n, w) in s.thetas().windows(2).enumerate() {
        let rel = (w[1] / w[0] - ratio).abs() / ratio;
        if !(w[1] < w[0]) || rel > 1e-12 {
            return Err(format!("pair {n}: theta ratio {} vs {ratio}", w[1] / w[0]));
        }
    }
    Ok(())
}

fn distance_even(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..200 {
        let pairs = gen::pair_subset(rng, ctx.schedule.num_pairs());
        let delta = rng.gen_range(-1e5..1e5);
        let a = sub_embedding_distance(&ctx.schedule, &pairs, delta).map_err(err)?;
        let b = sub_embedding_distance(&ctx.schedule, &pairs, -delta).map_err(err)?;
        if a != b {
            return Err(format!("pairs {pairs:?} delta {delta}: {a} != {b}"));
        }
    }
    Ok(())
}

fn distance_periodic(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = &ctx.schedule;
    for _ in 0..200 {
        // Long periods amplify rounding of delta + period, so stay on pairs
        // whose period is within a few thousand positions.
        let n = rng.gen_range(0..s.num_pairs().min(20));
        let period = 2.0 * PI / s.theta(n);
        if period > 1e4 {
            continue;
        }
        let delta = rng.gen_range(-10.0..10.0) * period;
        let a = sub_embedding_distance(s, &[n], delta).map_err(err)?;
        let b = sub_embedding_distance(s, &[n], delta + period).map_err(err)?;
        if (a - b).abs() > 1e-9 {
            return Err(format!("pair {n} delta {delta}: {a} vs {b}"));
        }
    }
    Ok(())
}

fn monotone_below_bound(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = &ctx.schedule;
    for _ in 0..1000 {
        let pairs = gen::pair_subset(rng, s.num_pairs());
        let bound = monotonicity_bound(s, &pairs).map_err(err)?.floor() as u64;
        let a = rng.gen_range(0..bound);
        let b = rng.gen_range(a + 1..=bound);
        let da = sub_embedding_distance(s, &pairs, a as f64).map_err(err)?;
        let db = sub_embedding_distance(s, &pairs, b as f64).map_err(err)?;
        if !(da < db) {
            return Err(format!("pairs {pairs:?}: d({a}) = {da} >= d({b}) = {db}"));
        }
    }
    Ok(())
}

fn mrope_temporal_nonmonotone(ctx: &SuiteContext, _: &mut ChaCha8Rng) -> Result<(), String> {
    let pairs: Vec<usize> = (0..16).collect();
    let d: Vec<f64> = (1..=1000)
        .map(|x| sub_embedding_distance(&ctx.canonical, &pairs, x as f64))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    if d.windows(2).any(|w| w[1] < w[0]) {
        Ok(())
    } else {
        Err("no decrease found on [1, 1000]".into())
    }
}

fn videorope_temporal_monotone(ctx: &SuiteContext, _: &mut ChaCha8Rng) -> Result<(), String> {
    let pairs: Vec<usize> = (48..64).collect();
    let dense = (0..=1000u64).collect::<Vec<_>>();
    let strided = (0..=900u64).map(|k| k * 100).collect::<Vec<_>>();
    for grid in [dense, strided] {
        let mut prev: Option<(u64, f64)> = None;
        for x in grid {
            let d = sub_embedding_distance(&ctx.canonical, &pairs, x as f64).map_err(err)?;
            if let Some((px, pd)) = prev {
                if !(pd < d) {
                    return Err(format!("d({px}) = {pd} >= d({x}) = {d}"));
                }
            }
            prev = Some((x, d));
        }
    }
    Ok(())
}

fn vanilla_unit_steps(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let spec = gen::mixed(rng);
        let table =
            assign_positions(&spec, &VariantConfig::new(VariantKind::Vanilla)).map_err(err)?;
        for (i, w) in table.entries().windows(2).enumerate() {
            if w[1].position - w[0].position != PositionTriple::splat(1.0) {
                return Err(format!("{} token {i}", spec.to_json()));
            }
        }
    }
    Ok(())
}

fn tad_accumulator(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let spec = gen::mixed(rng);
        let gamma = rng.gen_range(0..4) as f64;
        let cfg = VariantConfig::new(VariantKind::TadRope).with_gamma(gamma);
        let table = assign_positions(&spec, &cfg).map_err(err)?;
        let text = table
            .entries()
            .iter()
            .filter(|e| e.kind == TokenKind::Text)
            .count() as f64;
        let visual = table.len() as f64 - text;
        let last = table.entries().last().expect("non-empty");
        let step = if last.kind == TokenKind::Text {
            gamma + 1.0
        } else {
            gamma
        };
        let expect = (gamma + 1.0) * text + gamma * visual;
        if last.position.t + step != expect {
            return Err(format!(
                "{} gamma {gamma}: final {} != {expect}",
                spec.to_json(),
                last.position.t + step
            ));
        }
    }
    Ok(())
}

fn videorope_diagonal(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let spec = gen::text_video_text(rng);
        for delta in [0.5, 1.0, 2.0] {
            let cfg = VariantConfig::new(VariantKind::VideoRope).with_delta(delta);
            let table = assign_positions(&spec, &cfg).map_err(err)?;
            let (mut sum, mut count) = (0.0, 0.0);
            for e in table
                .entries()
                .iter()
                .filter(|e| e.kind == TokenKind::Visual)
            {
                let frame = e.frame.expect("visual frame");
                let (w, h) = e.patch.expect("visual patch");
                let (fw, fh) = table.frame_dims(frame).expect("frame dims");
                let p = e.position;
                if p.x - p.t != w as f64 - fw as f64 / 2.0
                    || p.y - p.t != h as f64 - fh as f64 / 2.0
                {
                    return Err(format!(
                        "{} delta {delta}: frame {frame} patch ({w},{h}) at {p:?}",
                        spec.to_json()
                    ));
                }
                sum += p.x - p.t;
                count += 1.0;
                if frame + 1 < table.frame_count() {
                    let step = table.adjacency_delta(frame, (w, h)).map_err(err)?;
                    if step != PositionTriple::splat(delta) {
                        return Err(format!("adjacency {step:?} != ({delta}, {delta}, {delta})"));
                    }
                }
            }
            if sum / count != -0.5 {
                return Err(format!("{}: mean x offset {}", spec.to_json(), sum / count));
            }
        }
    }
    Ok(())
}

fn videorope_unit_delta_symmetric(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let spec = gen::text_video_text(rng);
        let cfg = VariantConfig::new(VariantKind::VideoRope).with_delta(1.0);
        let report = assign_positions(&spec, &cfg)
            .and_then(|t| t.symmetry_report())
            .map_err(err)?;
        if !report.symmetric {
            return Err(format!("{}: {report:?}", spec.to_json()));
        }
    }
    Ok(())
}

fn mrope_adjacency(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..50 {
        let spec = gen::text_video_text(rng);
        let table =
            assign_positions(&spec, &VariantConfig::new(VariantKind::MRope)).map_err(err)?;
        for f in 0..table.frame_count().saturating_sub(1) {
            let (w, h) = table.frame_dims(f).expect("frame");
            for hh in 0..h {
                for ww in 0..w {
                    let d = table.adjacency_delta(f, (ww, hh)).map_err(err)?;
                    if d != PositionTriple::new(1.0, 0.0, 0.0) {
                        return Err(format!(
                            "{} frame {f} patch ({ww},{hh}): {d:?}",
                            spec.to_json()
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

fn layout_deterministic(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..20 {
        let spec = gen::text_video_text(rng);
        for kind in VariantKind::ALL {
            let cfg = VariantConfig::new(kind);
            if assign_positions(&spec, &cfg).map_err(err)?
                != assign_positions(&spec, &cfg).map_err(err)?
            {
                return Err(format!("{} {kind}", spec.to_json()));
            }
        }
    }
    Ok(())
}

fn isometry(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = ctx.schedule.head_dim();
    for _ in 0..200 {
        let v = gen::vector(rng, d);
        let p = gen::position(rng, 1e4);
        let r = rotate(&v, &p, &ctx.alloc, &ctx.schedule).map_err(err)?;
        if (r.norm() - v.norm()).abs() > 1e-12 * v.norm() {
            return Err(format!("norm {} -> {} at {p:?}", v.norm(), r.norm()));
        }
    }
    Ok(())
}

fn composition(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = ctx.schedule.head_dim();
    for _ in 0..200 {
        let v = gen::vector(rng, d);
        let (p1, p2) = (gen::position(rng, 1e3), gen::position(rng, 1e3));
        let twice = rotate(&v, &p1, &ctx.alloc, &ctx.schedule)
            .and_then(|r| rotate(&r, &p2, &ctx.alloc, &ctx.schedule))
            .map_err(err)?;
        let once = rotate(&v, &(p1 + p2), &ctx.alloc, &ctx.schedule).map_err(err)?;
        let worst = twice
            .components()
            .iter()
            .zip(once.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if worst > 1e-9 {
            return Err(format!("max component error {worst:e} at {p1:?} + {p2:?}"));
        }
    }
    Ok(())
}

fn relative_form(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = ctx.schedule.head_dim();
    for _ in 0..200 {
        let (q, k) = (gen::vector(rng, d), gen::vector(rng, d));
        let (p1, p2) = (gen::position(rng, 1e3), gen::position(rng, 1e3));
        let a = score(&q, &p1, &k, &p2, &ctx.alloc, &ctx.schedule).map_err(err)?;
        let b = score(
            &q,
            &(p1 - p2),
            &k,
            &PositionTriple::ZERO,
            &ctx.alloc,
            &ctx.schedule,
        )
        .map_err(err)?;
        if (a - b).abs() > 1e-9 * q.norm() * k.norm() {
            return Err(format!("{a} vs {b} at {p1:?}, {p2:?}"));
        }
    }
    Ok(())
}

fn argmax_shift_invariance(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = ctx.schedule.head_dim();
    let argmax = |scores: &[f64]| {
        scores
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &s)| {
                if s > best.1 {
                    (i, s)
                } else {
                    best
                }
            })
    };
    for _ in 0..50 {
        let q = gen::vector(rng, d);
        let pq = gen::position(rng, 500.0);
        let keys: Vec<_> = (0..16)
            .map(|_| (gen::vector(rng, d), gen::position(rng, 500.0)))
            .collect();
        let c = PositionTriple::splat(rng.gen_range(-500.0..500.0));
        let base: Vec<f64> = keys
            .iter()
            .map(|(k, p)| score(&q, &pq, k, p, &ctx.alloc, &ctx.schedule))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let shifted: Vec<f64> = keys
            .iter()
            .map(|(k, p)| score(&q, &(pq + c), k, &(*p + c), &ctx.alloc, &ctx.schedule))
            .collect::<Result<_, _>>()
            .map_err(err)?;
        let (i, best) = argmax(&base);
        let (j, _) = argmax(&shifted);
        // A genuine near-tie can swap under rounding; only flag clear margins.
        let runner_up = base
            .iter()
            .enumerate()
            .filter(|&(n, _)| n != i)
            .map(|(_, &s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        if i != j && best - runner_up > 1e-9 * q.norm() * d as f64 {
            return Err(format!("argmax moved from {i} to {j} under shift {c:?}"));
        }
    }
    Ok(())
}

fn decomposition_exact(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = ctx.schedule.head_dim();
    for _ in 0..200 {
        let (q, k) = (gen::unit_vector(rng, d), gen::unit_vector(rng, d));
        let (pq, pk) = (gen::position(rng, 1e4), gen::position(rng, 1e4));
        let parts = decompose_score(&q, &pq, &k, &pk, &ctx.alloc, &ctx.schedule).map_err(err)?;
        let direct = score(&q, &pq, &k, &pk, &ctx.alloc, &ctx.schedule).map_err(err)?;
        if (parts.parts_sum() - parts.total).abs() > 1e-12 || (parts.total - direct).abs() > 1e-12 {
            return Err(format!("{parts:?} vs score {direct}"));
        }
    }
    Ok(())
}

/// Relative-form and oracle agreement over every variant's allocation.
pub fn oracle_sweep(
    schedule: &FrequencySchedule,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<OracleSweep, String> {
    let d = schedule.head_dim();
    let mut sweep = OracleSweep::default();
    for i in 0..trials {
        let kind = VariantKind::ALL[i % 4];
        let alloc = DimensionAllocation::for_variant(kind, d).map_err(err)?;
        let (q, k) = (gen::vector(rng, d), gen::vector(rng, d));
        let (p1, p2) = (gen::position(rng, 1e3), gen::position(rng, 1e3));
        let fast = score(&q, &p1, &k, &p2, &alloc, schedule).map_err(err)?;
        let rel =
            score(&q, &(p1 - p2), &k, &PositionTriple::ZERO, &alloc, schedule).map_err(err)?;
        let oracle = block_diag_oracle(&q, &p1, &k, &p2, &alloc, schedule).map_err(err)?;
        let scale = q.norm() * k.norm();
        sweep.trials += 1;
        sweep.max_relative_error = sweep.max_relative_error.max((fast - rel).abs() / scale);
        sweep.max_oracle_error = sweep.max_oracle_error.max((fast - oracle).abs());
        if (fast - rel).abs() > 1e-9 * scale {
            sweep
                .failures
                .push(format!("{kind} relative: {fast} vs {rel}"));
        }
        if (fast - oracle).abs() > 1e-9 {
            sweep
                .failures
                .push(format!("{kind} oracle: {fast} vs {oracle}"));
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Default)]
pub struct OracleSweep {
    pub trials: usize,
    pub max_relative_error: f64,
    pub max_oracle_error: f64,
    pub failures: Vec<String>,
}

fn oracle_equivalence(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut dims = vec![4, 8];
    if ctx.schedule.head_dim() <= ropelab::rotary::ORACLE_MAX_DIM {
        dims.push(ctx.schedule.head_dim());
    }
    for d in dims {
        let s = FrequencySchedule::new(ctx.schedule.base(), d).map_err(err)?;
        let sweep = oracle_sweep(&s, 400, rng)?;
        if let Some(f) = sweep.failures.first() {
            return Err(format!("d = {d}: {f}"));
        }
    }
    Ok(())
}

fn channel_independence(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let d = ctx.schedule.head_dim();
    for _ in 0..200 {
        let (q, k) = (gen::unit_vector(rng, d), gen::unit_vector(rng, d));
        let p = gen::position(rng, 1e3);
        let moved = PositionTriple::new(p.t, p.x, p.y + rng.gen_range(-1e3..1e3));
        let same = decompose_score(&q, &p, &k, &p, &ctx.alloc, &ctx.schedule).map_err(err)?;
        let other = decompose_score(&q, &p, &k, &moved, &ctx.alloc, &ctx.schedule).map_err(err)?;
        if (same.t_part - other.t_part).abs() > 1e-12 || (same.x_part - other.x_part).abs() > 1e-12
        {
            return Err(format!("{same:?} vs {other:?}"));
        }
    }
    Ok(())
}

fn distractor_multiples(_: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..200 {
        let total = rng.gen_range(1..4000);
        let depth = rng.gen_range(0.0..=1.0);
        let period = rng.gen_range(1..600);
        let plan = plan_vniah_d(total, depth, period).map_err(err)?;
        for &f in &plan.distractor_frames {
            if f == plan.needle_frame || f >= total || f.abs_diff(plan.needle_frame) % period != 0 {
                return Err(format!("{plan:?}: bad distractor {f}"));
            }
        }
        if period > total && !plan.distractor_frames.is_empty() {
            return Err(format!(
                "period {period} > {total} frames but distractors exist"
            ));
        }
    }
    Ok(())
}

fn videorope_nearest_worst(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let alloc = DimensionAllocation::canonical_videorope(128).map_err(err)?;
    let bound = monotonicity_bound(&ctx.canonical, alloc.t_pairs()).map_err(err)?;
    for _ in 0..50 {
        let delta = [0.5, 1.0, 2.0, 3.0][rng.gen_range(0..4)];
        let total = rng.gen_range(2..3001);
        let plan =
            plan_vniah_d(total, rng.gen_range(0.0..=1.0), rng.gen_range(1..400)).map_err(err)?;
        let max_gap = plan
            .distractor_frames
            .iter()
            .map(|f| f.abs_diff(plan.needle_frame))
            .max();
        let Some(max_gap) = max_gap else { continue };
        if max_gap as f64 * delta >= bound {
            continue;
        }
        let r = susceptibility(&plan, &alloc, &ctx.canonical, |f| delta * f as f64).map_err(err)?;
        let nearest = plan
            .distractor_frames
            .iter()
            .map(|f| f.abs_diff(plan.needle_frame))
            .min()
            .expect("non-empty");
        if r.worst_distractor.abs_diff(plan.needle_frame) != nearest {
            return Err(format!(
                "{plan:?}: worst {} is not nearest",
                r.worst_distractor
            ));
        }
    }
    Ok(())
}

fn cross_module_consistency(ctx: &SuiteContext, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let allocs = [
        (DimensionAllocation::canonical_mrope(128).map_err(err)?, 1.0),
        (
            DimensionAllocation::canonical_videorope(128).map_err(err)?,
            2.0,
        ),
    ];
    for _ in 0..20 {
        let plan =
            plan_vniah_d(rng.gen_range(201..3001), rng.gen_range(0.0..=1.0), 200).map_err(err)?;
        if plan.distractor_frames.is_empty() {
            continue;
        }
        for (alloc, scale) in &allocs {
            let r =
                susceptibility(&plan, alloc, &ctx.canonical, |f| scale * f as f64).map_err(err)?;
            let direct = plan
                .distractor_frames
                .iter()
                .map(|&f| {
                    let delta = (scale * f as f64 - scale * plan.needle_frame as f64).abs();
                    freq::sub_embedding_distance(&ctx.canonical, alloc.t_pairs(), delta)
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if (r.min_distance - direct).abs() > 1e-12 {
                return Err(format!("{plan:?}: {} vs {direct}", r.min_distance));
            }
        }
    }
    Ok(())
}
