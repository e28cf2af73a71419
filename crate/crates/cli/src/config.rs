//! Run configuration: command-line flags layered over an optional TOML file
//! layered over defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use ropelab::freq::{DEFAULT_BASE, DEFAULT_HEAD_DIM};
use ropelab::{
    AllocationSpec, DimensionAllocation, EndingTextMode, FrequencySchedule, VariantConfig,
    VariantKind,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Vanilla,
    Tad,
    Mrope,
    Videorope,
}

impl From<VariantArg> for VariantKind {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Vanilla => VariantKind::Vanilla,
            VariantArg::Tad => VariantKind::TadRope,
            VariantArg::Mrope => VariantKind::MRope,
            VariantArg::Videorope => VariantKind::VideoRope,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndingTextArg {
    Continuous,
    Literal,
}

impl From<EndingTextArg> for EndingTextMode {
    fn from(v: EndingTextArg) -> Self {
        match v {
            EndingTextArg::Continuous => EndingTextMode::Continuous,
            EndingTextArg::Literal => EndingTextMode::Literal,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Frequency base.
    #[arg(long, global = true)]
    pub base: Option<f64>,
    /// Head dimension (even).
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub variant: Option<VariantArg>,
    /// VideoRoPE temporal spacing.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// TAD-RoPE visual step.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long = "ending-text", global = true, value_enum)]
    pub ending_text: Option<EndingTextArg>,
    /// Pair allocation: a name (mrope, videorope, vanilla) or JSON `{"t":[..],"x":[..],"y":[..]}`.
    #[arg(long, global = true)]
    pub alloc: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// Values accepted in the config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub base: Option<f64>,
    pub dim: Option<usize>,
    pub variant: Option<VariantArg>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub ending_text: Option<EndingTextArg>,
    pub alloc: Option<AllocationSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn parse(src: &str) -> Result<Self, CliError> {
        toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&src)
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schedule: FrequencySchedule,
    pub variant: VariantConfig,
    pub alloc: DimensionAllocation,
    /// True when the allocation was given explicitly rather than implied by the variant.
    pub alloc_explicit: bool,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

impl RunConfig {
    pub fn resolve(flags: &GlobalArgs) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(flags, file)
    }

    pub fn merge(flags: &GlobalArgs, file: FileConfig) -> Result<Self, CliError> {
        let base = flags.base.or(file.base).unwrap_or(DEFAULT_BASE);
        let dim = flags.dim.or(file.dim).unwrap_or(DEFAULT_HEAD_DIM);
        let schedule = FrequencySchedule::new(base, dim)?;

        let kind: VariantKind = flags
            .variant
            .or(file.variant)
            .unwrap_or(VariantArg::Videorope)
            .into();
        let mut variant = VariantConfig::new(kind);
        if let Some(d) = flags.delta.or(file.delta) {
            variant.delta = d;
        }
        if let Some(g) = flags.gamma.or(file.gamma) {
            variant.gamma = g;
        }
        if let Some(m) = flags.ending_text.or(file.ending_text) {
            variant.ending_text_mode = m.into();
        }
        variant.validate()?;

        let alloc_spec = match &flags.alloc {
            Some(src) => Some(AllocationSpec::parse(src)?),
            None => file.alloc,
        };
        let alloc_explicit = alloc_spec.is_some();
        let alloc = match alloc_spec {
            Some(spec) => spec.resolve(dim)?,
            None => DimensionAllocation::for_variant(kind, dim)?,
        };

        Ok(Self {
            schedule,
            variant,
            alloc,
            alloc_explicit,
            out: flags.out.clone().or(file.out),
            format: flags.format.or(file.format),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        })
    }

    /// The allocation paired with `kind`, unless one was configured explicitly.
    pub fn alloc_for(&self, kind: VariantKind) -> Result<DimensionAllocation, CliError> {
        if self.alloc_explicit && kind == self.variant.kind {
            return Ok(self.alloc.clone());
        }
        Ok(DimensionAllocation::for_variant(
            kind,
            self.schedule.head_dim(),
        )?)
    }
}
