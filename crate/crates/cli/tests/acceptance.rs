//! Acceptance criteria. Each test prints one PASS/FAIL line; run with
//! `cargo test -p ropelab-cli --test acceptance -- --nocapture --test-threads=1`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ropelab::freq::{monotonicity_bound, period_table, sub_embedding_distance};
use ropelab::layout::assign_positions;
use ropelab::niah::{plan_vniah_d, susceptibility, sweep_grid};
use ropelab::rotary::{block_diag_oracle, decompose_score, score};
use ropelab::{
    DimensionAllocation, FrequencySchedule, HeadVector, PositionTriple, Segment, SequenceSpec,
    TokenKind, VariantConfig, VariantKind,
};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {id:>2} {:<4} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn vector(rng: &mut ChaCha8Rng, d: usize) -> HeadVector {
    HeadVector::new((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn unit(rng: &mut ChaCha8Rng, d: usize) -> HeadVector {
    let v = vector(rng, d);
    let n = v.norm();
    HeadVector::new(v.components().iter().map(|c| c / n).collect())
}

fn position(rng: &mut ChaCha8Rng, span: f64) -> PositionTriple {
    PositionTriple::new(
        rng.gen_range(-span..span),
        rng.gen_range(-span..span),
        rng.gen_range(-span..span),
    )
}

fn tvt(rng: &mut ChaCha8Rng) -> (SequenceSpec, usize, usize, usize) {
    let (frames, w, h) = (
        rng.gen_range(1..6),
        rng.gen_range(1..7),
        rng.gen_range(1..7),
    );
    let spec = SequenceSpec::new(vec![
        Segment::Text(rng.gen_range(1..8)),
        Segment::Video {
            frames,
            width: w,
            height: h,
        },
        Segment::Text(rng.gen_range(1..8)),
    ])
    .unwrap();
    (spec, frames, w, h)
}

struct Instance {
    schedule: FrequencySchedule,
    alloc: DimensionAllocation,
    q: HeadVector,
    k: HeadVector,
    p1: PositionTriple,
    p2: PositionTriple,
}

/// 1,000 instances cycling d in {4, 8, 128} and the four variants' allocations.
fn scoring_instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..1000)
        .map(|i| {
            let d = [4, 8, 128][i % 3];
            let kind = VariantKind::ALL[(i / 3) % 4];
            Instance {
                schedule: FrequencySchedule::new(1e6, d).unwrap(),
                alloc: DimensionAllocation::for_variant(kind, d).unwrap(),
                q: vector(&mut rng, d),
                k: vector(&mut rng, d),
                p1: position(&mut rng, 1e3),
                p2: position(&mut rng, 1e3),
            }
        })
        .collect()
}

#[test]
fn c01_period_reproduction() {
    let start = Instant::now();
    let schedule = FrequencySchedule::new(1e6, 128).unwrap();
    let period = period_table(&schedule)[16].period;
    let elapsed = start.elapsed();
    let pass = (period - 198.69).abs() <= 0.01 && elapsed < Duration::from_millis(1);
    report(
        1,
        "period of pair 16",
        pass,
        format!("{period:.6} in {elapsed:?}"),
    );
}

#[test]
fn c02_allocation_boundaries() {
    let m = DimensionAllocation::canonical_mrope(128).unwrap();
    let v = DimensionAllocation::canonical_videorope(128).unwrap();
    let range = |a: usize, b: usize| (a..=b).collect::<Vec<_>>();
    let pass = m.t_pairs() == range(0, 15)
        && m.x_pairs() == range(16, 39)
        && m.y_pairs() == range(40, 63)
        && v.x_pairs() == (0..=46).step_by(2).collect::<Vec<_>>()
        && v.y_pairs() == (1..=47).step_by(2).collect::<Vec<_>>()
        && v.t_pairs() == range(48, 63);
    report(
        2,
        "canonical allocations",
        pass,
        format!(
            "mrope t={}..={} x={}..={} y={}..={}; videorope t={}..={}",
            m.t_pairs()[0],
            m.t_pairs()[15],
            m.x_pairs()[0],
            m.x_pairs()[23],
            m.y_pairs()[0],
            m.y_pairs()[23],
            v.t_pairs()[0],
            v.t_pairs()[15]
        ),
    );
}

#[test]
fn c03_monotonicity_contrast() {
    let start = Instant::now();
    let s = FrequencySchedule::default();
    let vrope: Vec<usize> = (48..64).collect();
    let mrope: Vec<usize> = (0..16).collect();
    let bound = monotonicity_bound(&s, &vrope).unwrap();

    let dist = |pairs: &[usize], x: u64| sub_embedding_distance(&s, pairs, x as f64).unwrap();
    let count_violations = |grid: Vec<u64>| {
        grid.windows(2)
            .filter(|w| dist(&vrope, w[0]) >= dist(&vrope, w[1]))
            .count()
    };
    let violations = count_violations((0..=900).map(|k| k * 100).collect())
        + count_violations((0..=1000).collect());
    let inversions = (1..1000u64)
        .filter(|&x| dist(&mrope, x + 1) < dist(&mrope, x))
        .count();
    let elapsed = start.elapsed();

    let pass = (bound - 99_346.0).abs() < 0.5
        && violations == 0
        && inversions >= 1
        && elapsed < Duration::from_secs(5);
    report(
        3,
        "monotonicity contrast",
        pass,
        format!("bound={bound:.3} videorope_violations={violations} mrope_inversions={inversions} in {elapsed:?}"),
    );
}

#[test]
fn c04_relative_position_identity() {
    let mut failures = 0;
    let mut worst = 0.0f64;
    for it in scoring_instances() {
        let a = score(&it.q, &it.p1, &it.k, &it.p2, &it.alloc, &it.schedule).unwrap();
        let b = score(
            &it.q,
            &(it.p1 - it.p2),
            &it.k,
            &PositionTriple::ZERO,
            &it.alloc,
            &it.schedule,
        )
        .unwrap();
        let scale = it.q.norm() * it.k.norm();
        worst = worst.max((a - b).abs() / scale);
        if (a - b).abs() > 1e-9 * scale {
            failures += 1;
        }
    }
    report(
        4,
        "relative-position identity",
        failures == 0,
        format!("1000 instances, failures={failures}, max scaled error={worst:e}"),
    );
}

#[test]
fn c05_oracle_equivalence() {
    let mut failures = 0;
    let mut worst = 0.0f64;
    for it in scoring_instances() {
        let a = score(&it.q, &it.p1, &it.k, &it.p2, &it.alloc, &it.schedule).unwrap();
        let b = block_diag_oracle(&it.q, &it.p1, &it.k, &it.p2, &it.alloc, &it.schedule).unwrap();
        worst = worst.max((a - b).abs());
        if (a - b).abs() > 1e-9 {
            failures += 1;
        }
    }
    report(
        5,
        "block-diagonal oracle",
        failures == 0,
        format!("1000 instances, failures={failures}, max error={worst:e}"),
    );
}

#[test]
fn c06_decomposition_exactness() {
    let s = FrequencySchedule::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sum_failures = 0;
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let alloc = DimensionAllocation::for_variant(VariantKind::ALL[i % 4], 128).unwrap();
        let (q, k) = (unit(&mut rng, 128), unit(&mut rng, 128));
        let (pq, pk) = (position(&mut rng, 1e4), position(&mut rng, 1e4));
        let d = decompose_score(&q, &pq, &k, &pk, &alloc, &s).unwrap();
        let err = (d.t_part + d.x_part + d.y_part + d.residual_part - d.total).abs();
        worst = worst.max(err);
        if err > 1e-12 {
            sum_failures += 1;
        }
    }
    let mut indep_failures = 0;
    for i in 0..200 {
        let alloc = DimensionAllocation::for_variant(
            [VariantKind::MRope, VariantKind::VideoRope][i % 2],
            128,
        )
        .unwrap();
        let (q, k) = (unit(&mut rng, 128), unit(&mut rng, 128));
        let p = position(&mut rng, 1e3);
        let moved = PositionTriple::new(p.t, p.x, p.y + rng.gen_range(-1e3..1e3));
        let base = decompose_score(&q, &p, &k, &p, &alloc, &s).unwrap();
        let other = decompose_score(&q, &p, &k, &moved, &alloc, &s).unwrap();
        if (base.t_part - other.t_part).abs() > 1e-12 || (base.x_part - other.x_part).abs() > 1e-12
        {
            indep_failures += 1;
        }
    }
    report(
        6,
        "score decomposition",
        sum_failures == 0 && indep_failures == 0,
        format!("sum failures={sum_failures}/1000 (max {worst:e}), channel-independence failures={indep_failures}/200"),
    );
}

#[test]
fn c07_diagonal_layout_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let (spec, _, w, h) = tvt(&mut rng);
        for delta in [0.5, 1.0, 2.0] {
            let cfg = VariantConfig::new(VariantKind::VideoRope).with_delta(delta);
            let table = assign_positions(&spec, &cfg).unwrap();
            for e in table
                .entries()
                .iter()
                .filter(|e| e.kind == TokenKind::Visual)
            {
                let (pw, ph) = e.patch.unwrap();
                let p = e.position;
                if p.x - p.t != pw as f64 - w as f64 / 2.0
                    || p.y - p.t != ph as f64 - h as f64 / 2.0
                {
                    failures.push(format!("offset {} δ={delta}", spec.to_json()));
                }
                let f = e.frame.unwrap();
                if f + 1 < table.frame_count()
                    && table.adjacency_delta(f, (pw, ph)).unwrap() != PositionTriple::splat(delta)
                {
                    failures.push(format!("adjacency {} δ={delta}", spec.to_json()));
                }
            }
        }
        let table = assign_positions(&spec, &VariantConfig::new(VariantKind::MRope)).unwrap();
        for f in 0..table.frame_count().saturating_sub(1) {
            for ph in 0..h {
                for pw in 0..w {
                    if table.adjacency_delta(f, (pw, ph)).unwrap()
                        != PositionTriple::new(1.0, 0.0, 0.0)
                    {
                        failures.push(format!("mrope adjacency {}", spec.to_json()));
                    }
                }
            }
        }
    }
    report(
        7,
        "diagonal layout identities",
        failures.is_empty(),
        format!(
            "50 specs x δ∈{{0.5,1,2}}, failures={} {:?}",
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn c08_spatial_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut vrope_bad, mut mrope_bad, mut asymmetric_cases) = (0, 0, 0);
    for _ in 0..50 {
        let (spec, frames, w, h) = tvt(&mut rng);
        let cfg = VariantConfig::new(VariantKind::VideoRope).with_delta(1.0);
        if !assign_positions(&spec, &cfg)
            .unwrap()
            .symmetry_report()
            .unwrap()
            .symmetric
        {
            vrope_bad += 1;
        }
        let r = assign_positions(&spec, &VariantConfig::new(VariantKind::MRope))
            .unwrap()
            .symmetry_report()
            .unwrap();
        // The resume point jumps past the frame extent only when the grid is
        // wider or taller than the number of frames.
        let resume_overshoots = w.max(h) > frames;
        if resume_overshoots {
            asymmetric_cases += 1;
            if r.symmetric || r.gap_post <= r.gap_pre {
                mrope_bad += 1;
            }
        } else if !r.symmetric {
            mrope_bad += 1;
        }
    }
    report(
        8,
        "spatial symmetry",
        vrope_bad == 0 && mrope_bad == 0 && asymmetric_cases > 0,
        format!("videorope δ=1 asymmetric={vrope_bad}/50; mrope mismatches={mrope_bad} ({asymmetric_cases} overshooting specs)"),
    );
}

#[test]
fn c09_vniah_d_planner() {
    let plan = plan_vniah_d(3000, 0.5, 200).unwrap();
    let offsets_ok = plan
        .distractor_frames
        .iter()
        .all(|&f| f != 1499 && f.abs_diff(1499) % 200 == 0);
    let grid = sweep_grid(100, 200, 3000, 0.2).unwrap();
    let frames_ok = grid.frame_counts == (0..15).map(|k| 100 + 200 * k).collect::<Vec<_>>();
    let depths_ok = grid.depths == vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let pass = plan.needle_frame == 1499
        && plan.distractor_frames.len() == 14
        && offsets_ok
        && frames_ok
        && depths_ok;
    report(
        9,
        "V-NIAH-D planner",
        pass,
        format!(
            "needle={} distractors={} frame_counts={} ({}..{}) depths={:?}",
            plan.needle_frame,
            plan.distractor_frames.len(),
            grid.frame_counts.len(),
            grid.frame_counts[0],
            grid.frame_counts.last().unwrap(),
            grid.depths
        ),
    );
}

#[test]
fn c10_cross_module_consistency() {
    let s = FrequencySchedule::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let allocs = [
        (DimensionAllocation::canonical_mrope(128).unwrap(), 1.0),
        (DimensionAllocation::canonical_videorope(128).unwrap(), 2.0),
    ];
    let mut checked = 0;
    let mut worst = 0.0f64;
    while checked < 40 {
        let plan = plan_vniah_d(rng.gen_range(300..=3000), rng.gen_range(0.0..=1.0), 200).unwrap();
        if plan.distractor_frames.is_empty() {
            continue;
        }
        for (alloc, scale) in &allocs {
            let r = susceptibility(&plan, alloc, &s, |f| scale * f as f64).unwrap();
            let direct = plan
                .distractor_frames
                .iter()
                .map(|&f| {
                    let delta = scale * f.abs_diff(plan.needle_frame) as f64;
                    sub_embedding_distance(&s, alloc.t_pairs(), delta).unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max((r.min_distance - direct).abs());
            checked += 1;
        }
    }
    report(
        10,
        "susceptibility vs direct distance",
        worst <= 1e-12,
        format!("20 plans x 2 allocations, max error={worst:e}"),
    );
}

fn ropelab(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ropelab"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn run_to_file(args: &[&str], path: &Path) -> (i32, Vec<u8>) {
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--out", p]);
    let (code, _) = ropelab(&full);
    (code, std::fs::read(path).unwrap_or_default())
}

#[test]
fn c11_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"segments":[{"text":2},{"video":{"frames":2,"w":2,"h":2}},{"text":1}]}"#,
    )
    .unwrap();
    let spec = spec.to_str().unwrap();

    let (check_code, _) = ropelab(&["check"]);
    let commands: Vec<Vec<&str>> = vec![
        vec!["figdata", "periods"],
        vec!["figdata", "oscillation", "--pairs", "13,14,15"],
        vec!["figdata", "scan", "--variant", "mrope", "--max", "2000"],
        vec!["figdata", "symmetry"],
        vec!["figdata", "niah"],
        vec!["layout", "dump", "--spec", spec],
        vec!["layout", "dump", "--spec", spec, "--variant", "mrope"],
        vec![
            "layout",
            "dump",
            "--spec",
            spec,
            "--variant",
            "tad",
            "--format",
            "json",
        ],
    ];
    let mut mismatched = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let a = run_to_file(args, &dir.path().join(format!("a{i}")));
        let b = run_to_file(args, &dir.path().join(format!("b{i}")));
        if a.0 != 0 || b.0 != 0 || a.1 != b.1 || a.1.is_empty() {
            mismatched.push(args.join(" "));
        }
    }
    report(
        11,
        "CLI determinism",
        check_code == 0 && mismatched.is_empty(),
        format!(
            "check exit={check_code}; {} commands byte-identical, mismatched={mismatched:?}",
            commands.len() - mismatched.len()
        ),
    );
}
