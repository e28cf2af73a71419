//! Position triples for mixed text/video sequences.
//!
//! Each indexing scheme maps every token of a [`SequenceSpec`] to a
//! [`PositionTriple`] `(t, x, y)`. Visual tokens are emitted frame-major and,
//! within a frame, row-major (`h` outer, `w` inner).

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One contiguous run of tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Segment {
    Text(usize),
    Video {
        frames: usize,
        #[serde(rename = "w")]
        width: usize,
        #[serde(rename = "h")]
        height: usize,
    },
}

impl Segment {
    fn token_count(&self) -> u64 {
        match *self {
            Segment::Text(n) => n as u64,
            Segment::Video {
                frames,
                width,
                height,
            } => (frames as u64)
                .saturating_mul(width as u64)
                .saturating_mul(height as u64),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    segments: Vec<Segment>,
}

/// An ordered, validated list of segments.
///
/// JSON form: `{"segments":[{"text":3},{"video":{"frames":2,"w":2,"h":2}},{"text":1}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct SequenceSpec {
    segments: Vec<Segment>,
}

impl TryFrom<RawSpec> for SequenceSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        SequenceSpec::new(raw.segments)
    }
}

impl SequenceSpec {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("sequence has no segments"));
        }
        for seg in &segments {
            let ok = match *seg {
                Segment::Text(n) => n >= 1,
                Segment::Video {
                    frames,
                    width,
                    height,
                } => frames >= 1 && width >= 1 && height >= 1,
            };
            if !ok {
                return Err(Error::invalid(format!("segment {seg:?} has a zero count")));
            }
        }
        Ok(Self { segments })
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total number of tokens, saturating at `u64::MAX`.
    pub fn token_count(&self) -> u64 {
        self.segments
            .iter()
            .fold(0u64, |acc, s| acc.saturating_add(s.token_count()))
    }

    /// Length of the leading text segment (`T_s`), 0 if the sequence opens with video.
    pub fn leading_text(&self) -> usize {
        match self.segments.first() {
            Some(Segment::Text(n)) => *n,
            _ => 0,
        }
    }

    /// Length of the trailing text segment (`T_e`), 0 if the sequence ends with video.
    pub fn trailing_text(&self) -> usize {
        match self.segments.last() {
            Some(Segment::Text(n)) if self.segments.len() > 1 => *n,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PositionTriple {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl PositionTriple {
    pub const ZERO: Self = Self {
        t: 0.0,
        x: 0.0,
        y: 0.0,
    };

    pub fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn splat(v: f64) -> Self {
        Self { t: v, x: v, y: v }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PositionTriple {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.t + o.t, self.x + o.x, self.y + o.y)
    }
}

impl Sub for PositionTriple {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.t - o.t, self.x - o.x, self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    Vanilla,
    #[serde(rename = "tad")]
    TadRope,
    MRope,
    VideoRope,
}

impl VariantKind {
    pub const ALL: [VariantKind; 4] = [
        VariantKind::Vanilla,
        VariantKind::TadRope,
        VariantKind::MRope,
        VariantKind::VideoRope,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Vanilla => "vanilla",
            VariantKind::TadRope => "tad",
            VariantKind::MRope => "mrope",
            VariantKind::VideoRope => "videorope",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vanilla" => Ok(VariantKind::Vanilla),
            "tad" | "tadrope" | "tad-rope" => Ok(VariantKind::TadRope),
            "mrope" | "m-rope" => Ok(VariantKind::MRope),
            "videorope" | "video-rope" => Ok(VariantKind::VideoRope),
            other => Err(Error::invalid(format!("unknown variant `{other}`"))),
        }
    }
}

/// How VideoRoPE indexes text that follows the video.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndingTextMode {
    /// Trailing token `j` sits at `T_s + δ·T_v + j`.
    #[default]
    Continuous,
    /// Trailing token `j` sits at `T_s + δ·T_v + (T_s + T_v + j)`.
    Literal,
}

impl FromStr for EndingTextMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "continuous" => Ok(EndingTextMode::Continuous),
            "literal" => Ok(EndingTextMode::Literal),
            other => Err(Error::invalid(format!(
                "unknown ending-text mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub kind: VariantKind,
    /// TAD-RoPE step for visual tokens; text tokens step by `gamma + 1`.
    pub gamma: f64,
    /// VideoRoPE temporal spacing between consecutive frames.
    pub delta: f64,
    pub ending_text_mode: EndingTextMode,
}

impl VariantConfig {
    pub const DEFAULT_GAMMA: f64 = 1.0;
    pub const DEFAULT_DELTA: f64 = 2.0;

    pub fn new(kind: VariantKind) -> Self {
        Self {
            kind,
            gamma: Self::DEFAULT_GAMMA,
            delta: Self::DEFAULT_DELTA,
            ending_text_mode: EndingTextMode::Continuous,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_ending_text(mut self, mode: EndingTextMode) -> Self {
        self.ending_text_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid(format!(
                "delta must be > 0, got {}",
                self.delta
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Text,
    Visual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositionEntry {
    pub kind: TokenKind,
    /// Global frame index, counted across all video segments.
    pub frame: Option<usize>,
    /// `(w, h)` patch coordinate inside the frame.
    pub patch: Option<(usize, usize)>,
    pub position: PositionTriple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FrameSpan {
    first_entry: usize,
    width: usize,
    height: usize,
    video: usize,
}

impl FrameSpan {
    fn patches(&self) -> usize {
        self.width * self.height
    }

    fn last_entry(&self) -> usize {
        self.first_entry + self.patches() - 1
    }
}

/// One position per token, in sequence order.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionTable {
    variant: VariantKind,
    entries: Vec<PositionEntry>,
    frames: Vec<FrameSpan>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    /// Anchor `t` of the first frame minus `t` of the last preceding text token.
    pub gap_pre: f64,
    /// `t` of the first subsequent text token minus anchor `t` of the last frame.
    pub gap_post: f64,
    pub symmetric: bool,
}

impl SymmetryReport {
    pub const TOLERANCE: f64 = 1e-9;

    fn new(gap_pre: f64, gap_post: f64) -> Self {
        Self {
            gap_pre,
            gap_post,
            symmetric: (gap_pre - gap_post).abs() < Self::TOLERANCE,
        }
    }
}

struct TableBuilder {
    variant: VariantKind,
    entries: Vec<PositionEntry>,
    frames: Vec<FrameSpan>,
    videos: usize,
}

impl TableBuilder {
    fn new(variant: VariantKind, capacity: usize) -> Self {
        Self {
            variant,
            entries: Vec::with_capacity(capacity),
            frames: Vec::new(),
            videos: 0,
        }
    }

    fn text(&mut self, position: PositionTriple) {
        self.entries.push(PositionEntry {
            kind: TokenKind::Text,
            frame: None,
            patch: None,
            position,
        });
    }

    /// Emits one video segment; `place(f, w, h)` gives the position of each patch.
    fn video(
        &mut self,
        frames: usize,
        width: usize,
        height: usize,
        mut place: impl FnMut(usize, usize, usize) -> PositionTriple,
    ) {
        for f in 0..frames {
            let frame = self.frames.len();
            self.frames.push(FrameSpan {
                first_entry: self.entries.len(),
                width,
                height,
                video: self.videos,
            });
            for h in 0..height {
                for w in 0..width {
                    self.entries.push(PositionEntry {
                        kind: TokenKind::Visual,
                        frame: Some(frame),
                        patch: Some((w, h)),
                        position: place(f, w, h),
                    });
                }
            }
        }
        self.videos += 1;
    }

    fn finish(self) -> PositionTable {
        PositionTable {
            variant: self.variant,
            entries: self.entries,
            frames: self.frames,
        }
    }
}

/// Assigns a position triple to every token of `spec` under `variant`.
pub fn assign_positions(spec: &SequenceSpec, variant: &VariantConfig) -> Result<PositionTable> {
    variant.validate()?;
    let capacity = usize::try_from(spec.token_count())
        .unwrap_or(usize::MAX)
        .min(1 << 20);
    let mut out = TableBuilder::new(variant.kind, capacity);

    match variant.kind {
        VariantKind::Vanilla => {
            let mut next = 0.0;
            let mut step = || {
                let p = next;
                next += 1.0;
                PositionTriple::splat(p)
            };
            for seg in spec.segments() {
                match *seg {
                    Segment::Text(n) => (0..n).for_each(|_| out.text(step())),
                    Segment::Video {
                        frames,
                        width,
                        height,
                    } => out.video(frames, width, height, |_, _, _| step()),
                }
            }
        }
        VariantKind::TadRope => {
            let mut acc = 0.0;
            let (text_step, visual_step) = (variant.gamma + 1.0, variant.gamma);
            for seg in spec.segments() {
                match *seg {
                    Segment::Text(n) => {
                        for _ in 0..n {
                            out.text(PositionTriple::splat(acc));
                            acc += text_step;
                        }
                    }
                    Segment::Video {
                        frames,
                        width,
                        height,
                    } => out.video(frames, width, height, |_, _, _| {
                        let p = acc;
                        acc += visual_step;
                        PositionTriple::splat(p)
                    }),
                }
            }
        }
        VariantKind::MRope => {
            let mut next = 0.0;
            for seg in spec.segments() {
                match *seg {
                    Segment::Text(n) => {
                        for _ in 0..n {
                            out.text(PositionTriple::splat(next));
                            next += 1.0;
                        }
                    }
                    Segment::Video {
                        frames,
                        width,
                        height,
                    } => {
                        let base = next;
                        out.video(frames, width, height, |f, w, h| {
                            PositionTriple::new(base + f as f64, base + w as f64, base + h as f64)
                        });
                        let extent = (frames - 1).max(width - 1).max(height - 1);
                        next = base + extent as f64 + 1.0;
                    }
                }
            }
        }
        VariantKind::VideoRope => assign_videorope(spec, variant, &mut out)?,
    }
    Ok(out.finish())
}

fn assign_videorope(
    spec: &SequenceSpec,
    variant: &VariantConfig,
    out: &mut TableBuilder,
) -> Result<()> {
    let (leading, video, trailing) = match spec.segments() {
        [Segment::Text(n)] => (*n, None, 0),
        [v @ Segment::Video { .. }] => (0, Some(*v), 0),
        [Segment::Text(s), v @ Segment::Video { .. }] => (*s, Some(*v), 0),
        [v @ Segment::Video { .. }, Segment::Text(e)] => (0, Some(*v), *e),
        [Segment::Text(s), v @ Segment::Video { .. }, Segment::Text(e)] => (*s, Some(*v), *e),
        other => {
            return Err(Error::UnsupportedShape(format!(
                "VideoRoPE expects [text?, video, text?], got {} segments",
                other.len()
            )))
        }
    };

    for tau in 0..leading {
        out.text(PositionTriple::splat(tau as f64));
    }
    let Some(Segment::Video {
        frames,
        width,
        height,
    }) = video
    else {
        return Ok(());
    };

    let t_s = leading as f64;
    let delta = variant.delta;
    let half_w = width as f64 / 2.0;
    let half_h = height as f64 / 2.0;
    out.video(frames, width, height, |f, w, h| {
        // f = tau - T_s
        let t = t_s + delta * f as f64;
        PositionTriple::new(t, t + (w as f64 - half_w), t + (h as f64 - half_h))
    });

    let start = t_s + delta * frames as f64;
    let skip = match variant.ending_text_mode {
        EndingTextMode::Continuous => 0.0,
        EndingTextMode::Literal => (leading + frames) as f64,
    };
    for j in 0..trailing {
        out.text(PositionTriple::splat(start + skip + j as f64));
    }
    Ok(())
}

impl PositionTable {
    pub fn variant(&self) -> VariantKind {
        self.variant
    }

    pub fn entries(&self) -> &[PositionEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// `(width, height)` of a frame.
    pub fn frame_dims(&self, frame: usize) -> Option<(usize, usize)> {
        self.frames.get(frame).map(|f| (f.width, f.height))
    }

    fn span(&self, frame: usize) -> Result<&FrameSpan> {
        self.frames.get(frame).ok_or_else(|| {
            Error::NotFound(format!("frame {frame} (table has {})", self.frames.len()))
        })
    }

    /// Position of patch `(w, h)` in `frame`.
    pub fn patch_position(&self, frame: usize, (w, h): (usize, usize)) -> Result<PositionTriple> {
        let span = self.span(frame)?;
        if w >= span.width || h >= span.height {
            return Err(Error::NotFound(format!(
                "patch ({w}, {h}) outside {}x{} frame",
                span.width, span.height
            )));
        }
        Ok(self.entries[span.first_entry + h * span.width + w].position)
    }

    /// Position of the frame's continuous center `(W/2, H/2)`.
    ///
    /// Grid layouts offset the `(0, 0)` patch by `(0, W/2, H/2)`; flattened
    /// layouts use the mean over the frame's patches.
    pub fn frame_anchor(&self, frame: usize) -> Result<PositionTriple> {
        let span = *self.span(frame)?;
        let first = self.entries[span.first_entry].position;
        Ok(match self.variant {
            VariantKind::VideoRope => PositionTriple::splat(first.t),
            VariantKind::MRope => {
                first + PositionTriple::new(0.0, span.width as f64 / 2.0, span.height as f64 / 2.0)
            }
            VariantKind::Vanilla | VariantKind::TadRope => {
                let patches = &self.entries[span.first_entry..=span.last_entry()];
                let n = patches.len() as f64;
                let sum = patches
                    .iter()
                    .fold(PositionTriple::ZERO, |acc, e| acc + e.position);
                PositionTriple::new(sum.t / n, sum.x / n, sum.y / n)
            }
        })
    }

    /// Compares the positional gap into the first video with the gap out of it.
    pub fn symmetry_report(&self) -> Result<SymmetryReport> {
        let first = *self
            .frames
            .first()
            .ok_or_else(|| Error::InsufficientStructure("table has no video".into()))?;
        let last_frame = self
            .frames
            .iter()
            .rposition(|f| f.video == first.video)
            .expect("first frame belongs to its own video");
        let last = self.frames[last_frame];

        let before = first
            .first_entry
            .checked_sub(1)
            .map(|i| self.entries[i])
            .filter(|e| e.kind == TokenKind::Text)
            .ok_or_else(|| Error::InsufficientStructure("no text precedes the video".into()))?;
        let after = self
            .entries
            .get(last.last_entry() + 1)
            .filter(|e| e.kind == TokenKind::Text)
            .ok_or_else(|| Error::InsufficientStructure("no text follows the video".into()))?;

        let gap_pre = self.frame_anchor(0)?.t - before.position.t;
        let gap_post = after.position.t - self.frame_anchor(last_frame)?.t;
        Ok(SymmetryReport::new(gap_pre, gap_post))
    }

    /// Position change of patch `(w, h)` from `frame` to `frame + 1`.
    pub fn adjacency_delta(&self, frame: usize, patch: (usize, usize)) -> Result<PositionTriple> {
        let here = self.span(frame)?;
        let next = self.span(frame + 1)?;
        if here.video != next.video {
            return Err(Error::NotFound(format!(
                "frame {frame} is the last frame of its video"
            )));
        }
        Ok(self.patch_position(frame + 1, patch)? - self.patch_position(frame, patch)?)
    }
}
