//! Rotary position embedding laboratory for mixed text/video token sequences.
//!
//! Four position-indexing schemes are supported (vanilla 1D RoPE, TAD-RoPE,
//! M-RoPE and VideoRoPE), along with the diagnostics used to compare them:
//!
//! * [`freq`] builds frequency schedules and measures periodicity, monotonic
//!   windows and near-collisions of the rotary sub-embeddings.
//! * [`layout`] assigns `(t, x, y)` position triples to token sequences and
//!   reports spatial symmetry and frame-to-frame increments.
//! * [`rotary`] rotates query/key vectors under a pair allocation and splits
//!   attention logits into temporal, horizontal and vertical parts.
//! * [`niah`] lays out needle-in-a-haystack plans with periodic distractors.
//! * [`export`] serializes the above to CSV/JSON.

pub mod error;
pub mod export;
pub mod freq;
pub mod layout;
pub mod niah;
pub mod rotary;

pub use error::{Error, Result};
pub use freq::{CollisionScanResult, FrequencySchedule, PeriodReport};
pub use layout::{
    EndingTextMode, PositionEntry, PositionTable, PositionTriple, Segment, SequenceSpec,
    SymmetryReport, TokenKind, VariantConfig, VariantKind,
};
pub use niah::{HaystackPlan, Susceptibility, SweepGrid};
pub use rotary::{AllocationSpec, Channel, DimensionAllocation, HeadVector, ScoreDecomposition};
