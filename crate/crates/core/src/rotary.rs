//! Rotations of query/key head vectors and attention-logit decomposition.
//!
//! Pair `n` owns components `(2n, 2n + 1)` and is driven by one coordinate of
//! the position triple, chosen by a [`DimensionAllocation`]. Pairs that no
//! channel owns are left unrotated and accounted for as the residual part of a
//! [`ScoreDecomposition`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::FrequencySchedule;
use crate::layout::{PositionTriple, VariantKind};

/// Which coordinate of a position triple drives a rotary pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    T,
    X,
    Y,
}

impl Channel {
    pub fn coordinate(self, pos: &PositionTriple) -> f64 {
        match self {
            Channel::T => pos.t,
            Channel::X => pos.x,
            Channel::Y => pos.y,
        }
    }
}

/// Disjoint assignment of rotary pairs to the `t`, `x` and `y` channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionAllocation {
    head_dim: usize,
    t_pairs: Vec<usize>,
    x_pairs: Vec<usize>,
    y_pairs: Vec<usize>,
    owner: Vec<Option<Channel>>,
}

impl DimensionAllocation {
    pub fn new(
        head_dim: usize,
        t_pairs: Vec<usize>,
        x_pairs: Vec<usize>,
        y_pairs: Vec<usize>,
    ) -> Result<Self> {
        if head_dim < 2 || !head_dim.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "head_dim must be even and >= 2, got {head_dim}"
            )));
        }
        let mut owner = vec![None; head_dim / 2];
        for (channel, pairs) in [
            (Channel::T, &t_pairs),
            (Channel::X, &x_pairs),
            (Channel::Y, &y_pairs),
        ] {
            for &n in pairs {
                let slot = owner.get_mut(n).ok_or_else(|| {
                    Error::invalid(format!("pair {n} out of range for head_dim {head_dim}"))
                })?;
                if let Some(prev) = slot.replace(channel) {
                    return Err(Error::invalid(format!(
                        "pair {n} assigned to both {prev:?} and {channel:?}"
                    )));
                }
            }
        }
        Ok(Self {
            head_dim,
            t_pairs,
            x_pairs,
            y_pairs,
            owner,
        })
    }

    /// Every pair driven by `t`; with `t = x = y` this is plain 1D RoPE.
    pub fn one_dimensional(head_dim: usize) -> Result<Self> {
        Self::new(head_dim, (0..head_dim / 2).collect(), vec![], vec![])
    }

    /// Pair counts in the 16:24:24 ratio of the 128-dim layout, `t` rounded
    /// down and the remainder split `x` first.
    fn canonical_counts(head_dim: usize) -> (usize, usize, usize) {
        let pairs = head_dim / 2;
        let t = pairs * 16 / 64;
        let spatial = pairs - t;
        (t, spatial - spatial / 2, spatial / 2)
    }

    /// Sequential split: `t` on the fastest pairs, then `x`, then `y`.
    pub fn canonical_mrope(head_dim: usize) -> Result<Self> {
        let (t, x, y) = Self::canonical_counts(head_dim);
        Self::new(
            head_dim,
            (0..t).collect(),
            (t..t + x).collect(),
            (t + x..t + x + y).collect(),
        )
    }

    /// `x`/`y` interleaved on the fastest pairs, `t` on the slowest.
    pub fn canonical_videorope(head_dim: usize) -> Result<Self> {
        let (t, x, y) = Self::canonical_counts(head_dim);
        let spatial = x + y;
        let x_pairs = (0..spatial).step_by(2).collect();
        let y_pairs = (1..spatial).step_by(2).collect();
        Self::new(head_dim, (spatial..spatial + t).collect(), x_pairs, y_pairs)
    }

    /// The allocation each indexing scheme pairs with.
    pub fn for_variant(kind: VariantKind, head_dim: usize) -> Result<Self> {
        match kind {
            VariantKind::Vanilla | VariantKind::TadRope => Self::one_dimensional(head_dim),
            VariantKind::MRope => Self::canonical_mrope(head_dim),
            VariantKind::VideoRope => Self::canonical_videorope(head_dim),
        }
    }

    pub fn head_dim(&self) -> usize {
        self.head_dim
    }

    pub fn t_pairs(&self) -> &[usize] {
        &self.t_pairs
    }

    pub fn x_pairs(&self) -> &[usize] {
        &self.x_pairs
    }

    pub fn y_pairs(&self) -> &[usize] {
        &self.y_pairs
    }

    pub fn pairs(&self, channel: Channel) -> &[usize] {
        match channel {
            Channel::T => &self.t_pairs,
            Channel::X => &self.x_pairs,
            Channel::Y => &self.y_pairs,
        }
    }

    /// Channel driving pair `n`, or `None` for an unrotated pair.
    pub fn owner(&self, n: usize) -> Option<Channel> {
        self.owner.get(n).copied().flatten()
    }

    fn angle(&self, schedule: &FrequencySchedule, n: usize, pos: &PositionTriple) -> f64 {
        match self.owner[n] {
            Some(ch) => schedule.theta(n) * ch.coordinate(pos),
            None => 0.0,
        }
    }
}

/// Config form of an allocation: a name or explicit pair lists.
///
/// `"mrope"`, `"videorope"`, `"vanilla"`/`"tad"`, or
/// `{"t":[48,...,63],"x":[0,2,...],"y":[1,3,...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AllocationSpec {
    Named(String),
    Explicit {
        #[serde(default)]
        t: Vec<usize>,
        #[serde(default)]
        x: Vec<usize>,
        #[serde(default)]
        y: Vec<usize>,
    },
}

impl AllocationSpec {
    /// Accepts a bare name (`mrope`) as well as JSON.
    pub fn parse(src: &str) -> Result<Self> {
        let trimmed = src.trim();
        if !trimmed.is_empty()
            && trimmed
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-')
        {
            return Ok(AllocationSpec::Named(trimmed.to_string()));
        }
        Ok(serde_json::from_str(trimmed)?)
    }

    pub fn resolve(&self, head_dim: usize) -> Result<DimensionAllocation> {
        match self {
            AllocationSpec::Named(name) => {
                DimensionAllocation::for_variant(name.parse()?, head_dim)
            }
            AllocationSpec::Explicit { t, x, y } => {
                DimensionAllocation::new(head_dim, t.clone(), x.clone(), y.clone())
            }
        }
    }
}

/// One query or key vector of a single attention head.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadVector(Vec<f64>);

impl HeadVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &HeadVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl From<Vec<f64>> for HeadVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreDecomposition {
    pub total: f64,
    pub t_part: f64,
    pub x_part: f64,
    pub y_part: f64,
    /// Contribution of pairs no channel owns.
    pub residual_part: f64,
}

impl ScoreDecomposition {
    pub fn parts_sum(&self) -> f64 {
        self.t_part + self.x_part + self.y_part + self.residual_part
    }
}

fn check_dims(
    vectors: &[&HeadVector],
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
) -> Result<()> {
    if alloc.head_dim != schedule.head_dim() {
        return Err(Error::invalid(format!(
            "allocation head_dim {} != schedule head_dim {}",
            alloc.head_dim,
            schedule.head_dim()
        )));
    }
    for v in vectors {
        if v.len() != alloc.head_dim {
            return Err(Error::invalid(format!(
                "vector length {} != head_dim {}",
                v.len(),
                alloc.head_dim
            )));
        }
    }
    Ok(())
}

/// Rotates each pair of `v` by `theta_n` times its channel's coordinate.
pub fn rotate(
    v: &HeadVector,
    pos: &PositionTriple,
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
) -> Result<HeadVector> {
    check_dims(&[v], alloc, schedule)?;
    Ok(rotate_unchecked(v, pos, alloc, schedule))
}

fn rotate_unchecked(
    v: &HeadVector,
    pos: &PositionTriple,
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
) -> HeadVector {
    let mut out = v.0.clone();
    for (n, pair) in out.chunks_exact_mut(2).enumerate() {
        let angle = alloc.angle(schedule, n, pos);
        if angle == 0.0 {
            continue;
        }
        let (sin, cos) = angle.sin_cos();
        let (a, b) = (pair[0], pair[1]);
        pair[0] = a * cos - b * sin;
        pair[1] = a * sin + b * cos;
    }
    HeadVector(out)
}

/// Attention logit between a rotated query and a rotated key.
pub fn score(
    q: &HeadVector,
    pos_q: &PositionTriple,
    k: &HeadVector,
    pos_k: &PositionTriple,
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
) -> Result<f64> {
    check_dims(&[q, k], alloc, schedule)?;
    let rq = rotate_unchecked(q, pos_q, alloc, schedule);
    let rk = rotate_unchecked(k, pos_k, alloc, schedule);
    Ok(rq.dot(&rk))
}

/// Splits the logit into the partial dot products of each channel's pairs.
pub fn decompose_score(
    q: &HeadVector,
    pos_q: &PositionTriple,
    k: &HeadVector,
    pos_k: &PositionTriple,
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
) -> Result<ScoreDecomposition> {
    check_dims(&[q, k], alloc, schedule)?;
    let rq = rotate_unchecked(q, pos_q, alloc, schedule);
    let rk = rotate_unchecked(k, pos_k, alloc, schedule);

    let mut parts = [0.0; 4];
    for (n, (a, b)) in rq.0.chunks_exact(2).zip(rk.0.chunks_exact(2)).enumerate() {
        let slot = match alloc.owner[n] {
            Some(Channel::T) => 0,
            Some(Channel::X) => 1,
            Some(Channel::Y) => 2,
            None => 3,
        };
        parts[slot] += a[0] * b[0] + a[1] * b[1];
    }
    Ok(ScoreDecomposition {
        total: rq.dot(&rk),
        t_part: parts[0],
        x_part: parts[1],
        y_part: parts[2],
        residual_part: parts[3],
    })
}

pub const ORACLE_MAX_DIM: usize = 512;

/// Reference logit from the explicit block-diagonal relative rotation matrix.
///
/// Builds the full `d x d` matrix with a 2x2 block per pair at angle
/// `theta_n * (c_k - c_q)` and evaluates `q^T M k`. Quadratic in `d`.
pub fn block_diag_oracle(
    q: &HeadVector,
    pos_q: &PositionTriple,
    k: &HeadVector,
    pos_k: &PositionTriple,
    alloc: &DimensionAllocation,
    schedule: &FrequencySchedule,
) -> Result<f64> {
    check_dims(&[q, k], alloc, schedule)?;
    let d = alloc.head_dim;
    if d > ORACLE_MAX_DIM {
        return Err(Error::OracleLimit {
            head_dim: d,
            limit: ORACLE_MAX_DIM,
        });
    }
    let mut m = DMatrix::<f64>::zeros(d, d);
    for n in 0..d / 2 {
        let phi = match alloc.owner(n) {
            Some(ch) => schedule.theta(n) * (ch.coordinate(pos_k) - ch.coordinate(pos_q)),
            None => 0.0,
        };
        let (i, j) = (2 * n, 2 * n + 1);
        m[(i, i)] = phi.cos();
        m[(i, j)] = -phi.sin();
        m[(j, i)] = phi.sin();
        m[(j, j)] = phi.cos();
    }
    let qv = DVector::from_column_slice(q.components());
    let kv = DVector::from_column_slice(k.components());
    Ok(qv.dot(&(m * kv)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn random_vec(rng: &mut impl Rng, d: usize) -> HeadVector {
        HeadVector::new((0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    fn random_pos(rng: &mut impl Rng, span: f64) -> PositionTriple {
        PositionTriple::new(
            rng.gen_range(-span..span),
            rng.gen_range(-span..span),
            rng.gen_range(-span..span),
        )
    }

    #[test]
    fn canonical_allocations_at_128() {
        let m = DimensionAllocation::canonical_mrope(128).unwrap();
        assert_eq!(m.t_pairs(), (0..16).collect::<Vec<_>>());
        assert_eq!(m.x_pairs(), (16..40).collect::<Vec<_>>());
        assert_eq!(m.y_pairs(), (40..64).collect::<Vec<_>>());

        let v = DimensionAllocation::canonical_videorope(128).unwrap();
        assert_eq!(v.x_pairs(), (0..=46).step_by(2).collect::<Vec<_>>());
        assert_eq!(v.y_pairs(), (1..=47).step_by(2).collect::<Vec<_>>());
        assert_eq!(v.t_pairs(), (48..64).collect::<Vec<_>>());
        assert!((0..64).all(|n| v.owner(n).is_some() && m.owner(n).is_some()));
    }

    #[test]
    fn small_canonical_allocations_cover_all_pairs() {
        for d in [2, 4, 8, 16, 30, 64, 256] {
            for a in [
                DimensionAllocation::canonical_mrope(d).unwrap(),
                DimensionAllocation::canonical_videorope(d).unwrap(),
            ] {
                let total = a.t_pairs().len() + a.x_pairs().len() + a.y_pairs().len();
                assert_eq!(total, d / 2);
            }
        }
        let v8 = DimensionAllocation::canonical_videorope(8).unwrap();
        assert_eq!(
            (v8.t_pairs(), v8.x_pairs(), v8.y_pairs()),
            (&[3][..], &[0, 2][..], &[1][..])
        );
    }

    #[test]
    fn allocation_rejects_overlap_and_range() {
        assert!(DimensionAllocation::new(8, vec![0, 1], vec![1], vec![]).is_err());
        assert!(DimensionAllocation::new(8, vec![4], vec![], vec![]).is_err());
        assert!(DimensionAllocation::new(7, vec![], vec![], vec![]).is_err());
        let partial = DimensionAllocation::new(8, vec![0], vec![], vec![3]).unwrap();
        assert_eq!(partial.owner(1), None);
    }

    #[test]
    fn allocation_spec_forms() {
        let named = AllocationSpec::parse("videorope").unwrap();
        assert_eq!(
            named.resolve(128).unwrap(),
            DimensionAllocation::canonical_videorope(128).unwrap()
        );
        let quoted = AllocationSpec::parse("\"mrope\"").unwrap();
        assert_eq!(
            quoted.resolve(128).unwrap(),
            DimensionAllocation::canonical_mrope(128).unwrap()
        );
        let explicit = AllocationSpec::parse(r#"{"t":[3],"x":[0,2],"y":[1]}"#).unwrap();
        assert_eq!(
            explicit.resolve(8).unwrap(),
            DimensionAllocation::canonical_videorope(8).unwrap()
        );
        assert!(AllocationSpec::parse(r#"{"t":[0],"x":[0]}"#)
            .unwrap()
            .resolve(8)
            .is_err());
        assert!(AllocationSpec::parse("bogus").unwrap().resolve(8).is_err());
        assert!(AllocationSpec::parse("{").is_err());
    }

    #[test]
    fn rotate_examples() {
        let s2 = FrequencySchedule::new(10.0, 2).unwrap();
        let a2 = DimensionAllocation::new(2, vec![0], vec![], vec![]).unwrap();
        let out = rotate(
            &HeadVector::new(vec![1.0, 0.0]),
            &PositionTriple::new(FRAC_PI_2, 0.0, 0.0),
            &a2,
            &s2,
        )
        .unwrap();
        assert!(out.components()[0].abs() < 1e-15);
        assert!((out.components()[1] - 1.0).abs() < 1e-15);

        let s = FrequencySchedule::default();
        let a = DimensionAllocation::canonical_videorope(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = random_vec(&mut rng, 128);
        assert_eq!(rotate(&v, &PositionTriple::ZERO, &a, &s).unwrap(), v);
        for _ in 0..50 {
            let p = random_pos(&mut rng, 1e4);
            let r = rotate(&v, &p, &a, &s).unwrap();
            assert!((r.norm() - v.norm()).abs() <= 1e-12 * v.norm());
        }
        assert!(rotate(&HeadVector::zeros(4), &PositionTriple::ZERO, &a, &s).is_err());
        let s64 = FrequencySchedule::new(1e6, 64).unwrap();
        assert!(rotate(&v, &PositionTriple::ZERO, &a, &s64).is_err());
    }

    #[test]
    fn score_examples() {
        let s = FrequencySchedule::default();
        let a = DimensionAllocation::canonical_mrope(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_vec(&mut rng, 128);
        let u = HeadVector::new(u.components().iter().map(|c| c / u.norm()).collect());
        let p = random_pos(&mut rng, 500.0);
        assert!((score(&u, &p, &u, &p, &a, &s).unwrap() - 1.0).abs() < 1e-12);

        let s2 = FrequencySchedule::new(10.0, 2).unwrap();
        let a2 = DimensionAllocation::new(2, vec![0], vec![], vec![]).unwrap();
        let e = HeadVector::new(vec![1.0, 0.0]);
        let got = score(
            &e,
            &PositionTriple::new(FRAC_PI_2, 0.0, 0.0),
            &e,
            &PositionTriple::ZERO,
            &a2,
            &s2,
        )
        .unwrap();
        assert!(got.abs() < 1e-15);
    }

    #[test]
    fn score_relative_and_shift_invariant() {
        let s = FrequencySchedule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in VariantKind::ALL {
            let a = DimensionAllocation::for_variant(kind, 128).unwrap();
            for _ in 0..50 {
                let (q, k) = (random_vec(&mut rng, 128), random_vec(&mut rng, 128));
                let (p1, p2, c) = (
                    random_pos(&mut rng, 1e3),
                    random_pos(&mut rng, 1e3),
                    rng.gen_range(-1e3..1e3),
                );
                let tol = 1e-9 * q.norm() * k.norm();
                let base = score(&q, &p1, &k, &p2, &a, &s).unwrap();
                let shifted = score(
                    &q,
                    &(p1 + PositionTriple::splat(c)),
                    &k,
                    &(p2 + PositionTriple::splat(c)),
                    &a,
                    &s,
                )
                .unwrap();
                assert!((base - shifted).abs() <= tol);
                let rel = q.dot(&rotate(&k, &(p2 - p1), &a, &s).unwrap());
                assert!((base - rel).abs() <= tol);
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let s = FrequencySchedule::default();
        let a = DimensionAllocation::canonical_videorope(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_vec(&mut rng, 128);
        let d = decompose_score(
            &q,
            &random_pos(&mut rng, 10.0),
            &HeadVector::zeros(128),
            &PositionTriple::ZERO,
            &a,
            &s,
        )
        .unwrap();
        assert_eq!(
            (d.total, d.t_part, d.x_part, d.y_part, d.residual_part),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );

        // d = 4, x on pair 0 (theta 1), t on pair 1 (theta = base^-1/2).
        let s4 = FrequencySchedule::new(100.0, 4).unwrap();
        let a4 = DimensionAllocation::new(4, vec![1], vec![0], vec![]).unwrap();
        let qk = HeadVector::new(vec![1.0, 0.0, 1.0, 0.0]);
        let pos_q = PositionTriple::new(FRAC_PI_2 / s4.theta(1), FRAC_PI_2, 0.0);
        let d = decompose_score(&qk, &pos_q, &qk, &PositionTriple::ZERO, &a4, &s4).unwrap();
        assert!(d.x_part.abs() < 1e-15 && d.t_part.abs() < 1e-15 && d.total.abs() < 1e-15);
        assert_eq!(d.y_part, 0.0);

        for _ in 0..100 {
            let (q, k) = (random_vec(&mut rng, 128), random_vec(&mut rng, 128));
            let (pq, pk) = (random_pos(&mut rng, 1e4), random_pos(&mut rng, 1e4));
            let d = decompose_score(&q, &pq, &k, &pk, &a, &s).unwrap();
            assert!((d.parts_sum() - d.total).abs() < 1e-12);
            assert_eq!(d.total, score(&q, &pq, &k, &pk, &a, &s).unwrap());
        }
    }

    #[test]
    fn residual_holds_unallocated_pairs() {
        let s = FrequencySchedule::new(1e4, 8).unwrap();
        let a = DimensionAllocation::new(8, vec![0], vec![1], vec![]).unwrap();
        let q = HeadVector::new(vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        let d = decompose_score(
            &q,
            &PositionTriple::splat(3.0),
            &q,
            &PositionTriple::splat(-8.0),
            &a,
            &s,
        )
        .unwrap();
        assert_eq!(d.residual_part, 30.0);
        assert_eq!(d.total, 30.0);
    }

    #[test]
    fn oracle_examples() {
        let s2 = FrequencySchedule::new(10.0, 2).unwrap();
        let a2 = DimensionAllocation::new(2, vec![0], vec![], vec![]).unwrap();
        let e = HeadVector::new(vec![1.0, 0.0]);
        let got = block_diag_oracle(
            &e,
            &PositionTriple::ZERO,
            &e,
            &PositionTriple::new(PI, 0.0, 0.0),
            &a2,
            &s2,
        )
        .unwrap();
        assert!((got + 1.0).abs() < 1e-15);

        let s = FrequencySchedule::default();
        let a = DimensionAllocation::canonical_videorope(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (q, k) = (random_vec(&mut rng, 128), random_vec(&mut rng, 128));
        let p = random_pos(&mut rng, 100.0);
        assert!((block_diag_oracle(&q, &p, &k, &p, &a, &s).unwrap() - q.dot(&k)).abs() < 1e-12);
        for _ in 0..50 {
            let (pq, pk) = (random_pos(&mut rng, 1e4), random_pos(&mut rng, 1e4));
            let fast = score(&q, &pq, &k, &pk, &a, &s).unwrap();
            let slow = block_diag_oracle(&q, &pq, &k, &pk, &a, &s).unwrap();
            assert!((fast - slow).abs() < 1e-9);
        }

        let big = FrequencySchedule::new(1e6, 1024).unwrap();
        let a_big = DimensionAllocation::one_dimensional(1024).unwrap();
        let z = HeadVector::zeros(1024);
        assert!(matches!(
            block_diag_oracle(
                &z,
                &PositionTriple::ZERO,
                &z,
                &PositionTriple::ZERO,
                &a_big,
                &big
            ),
            Err(Error::OracleLimit { .. })
        ));
    }

    #[test]
    fn rotations_compose() {
        let s = FrequencySchedule::default();
        let a = DimensionAllocation::canonical_mrope(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let v = random_vec(&mut rng, 128);
            let (p1, p2) = (random_pos(&mut rng, 1e3), random_pos(&mut rng, 1e3));
            let twice = rotate(&rotate(&v, &p1, &a, &s).unwrap(), &p2, &a, &s).unwrap();
            let once = rotate(&v, &(p1 + p2), &a, &s).unwrap();
            for (x, y) in twice.components().iter().zip(once.components()) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn y_only_offsets_leave_t_and_x_parts() {
        let s = FrequencySchedule::default();
        let a = DimensionAllocation::canonical_videorope(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..50 {
            let (q, k) = (random_vec(&mut rng, 128), random_vec(&mut rng, 128));
            let p = random_pos(&mut rng, 1e3);
            let moved = PositionTriple::new(p.t, p.x, p.y + rng.gen_range(-1e3..1e3));
            let same = decompose_score(&q, &p, &k, &p, &a, &s).unwrap();
            let other = decompose_score(&q, &p, &k, &moved, &a, &s).unwrap();
            assert!((same.t_part - other.t_part).abs() < 1e-12);
            assert!((same.x_part - other.x_part).abs() < 1e-12);
        }
    }
}
