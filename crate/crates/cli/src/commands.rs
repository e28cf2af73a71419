use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ropelab::export;
use ropelab::freq::{collision_scan, period_table};
use ropelab::layout::assign_positions;
use ropelab::niah::{
    plan_vniah, plan_vniah_d, susceptibility, sweep_grid, HaystackPlan, Susceptibility,
    DEFAULT_DISTRACTOR_PERIOD,
};
use ropelab::{Segment, SequenceSpec, SymmetryReport, VariantConfig, VariantKind};

use crate::config::{Format, GlobalArgs, RunConfig};
use crate::error::CliError;
use crate::pairs::parse_pair_list;
use crate::suite::{self, SuiteContext};

#[derive(Debug, Parser)]
#[command(
    name = "ropelab",
    version,
    about = "Rotary position embedding analyses for text/video sequences"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frequency schedule analyses.
    #[command(subcommand)]
    Freq(FreqCommand),
    /// Position layouts.
    #[command(subcommand)]
    Layout(LayoutCommand),
    /// Rotary scoring checks.
    #[command(subcommand)]
    Rotary(RotaryCommand),
    /// Needle-in-a-haystack planning.
    #[command(subcommand)]
    Niah(NiahCommand),
    /// Data tables behind the diagnostic figures.
    Figdata(FigdataArgs),
    /// Run the full invariant suite.
    Check,
}

#[derive(Debug, Subcommand)]
pub enum FreqCommand {
    /// Period and half-period of every rotary pair.
    Periods,
    /// Distance table over an integer offset window.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Pair list (`0-15`, `13,14,15`) or channel of the allocation (`t`, `x`, `y`).
    #[arg(long, default_value = "t")]
    pub pairs: String,
    #[arg(long = "min", default_value_t = 1)]
    pub delta_min: u64,
    #[arg(long = "max", default_value_t = 10_000)]
    pub delta_max: u64,
}

#[derive(Debug, Subcommand)]
pub enum LayoutCommand {
    /// Position table for a JSON sequence spec.
    Dump {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RotaryCommand {
    /// Compare fast scoring with its relative form and the block-diagonal oracle.
    Check {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 3000)]
    pub frames: usize,
    #[arg(long, default_value_t = 0.5)]
    pub depth: f64,
    /// Distractor period in frames.
    #[arg(long, default_value_t = DEFAULT_DISTRACTOR_PERIOD)]
    pub period: usize,
    /// Plain haystack without distractors.
    #[arg(long)]
    pub no_distractors: bool,
}

#[derive(Debug, Subcommand)]
pub enum NiahCommand {
    /// Needle and distractor frames as JSON.
    Plan(PlanArgs),
    /// Haystack length / depth grid as CSV.
    Sweep {
        #[arg(long, default_value_t = 100)]
        start: usize,
        #[arg(long, default_value_t = 200)]
        step: usize,
        #[arg(long = "max-frames", default_value_t = 3000)]
        max_frames: usize,
        #[arg(long = "depth-step", default_value_t = 0.2)]
        depth_step: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigKind {
    Periods,
    Oscillation,
    Scan,
    Symmetry,
    Niah,
}

#[derive(Debug, Clone, Args)]
pub struct FigdataArgs {
    pub kind: FigKind,
    /// Pairs for oscillation/scan (defaults to the allocation's temporal pairs).
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long = "t-min", default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long = "t-max", default_value_t = 1000.0)]
    pub t_max: f64,
    #[arg(long = "t-step", default_value_t = 1.0)]
    pub t_step: f64,
    #[arg(long = "min", default_value_t = 1)]
    pub delta_min: u64,
    #[arg(long = "max", default_value_t = 10_000)]
    pub delta_max: u64,
    /// Sequence spec for the symmetry table.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub plan: PlanArgs,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Table or document destined for `--out` or stdout.
    Data(String),
    /// Human-readable report; `passed == false` maps to the property exit code.
    Report { text: String, passed: bool },
}

/// Resolves the configuration and runs the command.
pub fn execute(cli: &Cli) -> Result<(RunConfig, Outcome), CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let outcome = dispatch(&cfg, &cli.command)?;
    Ok((cfg, outcome))
}

pub fn dispatch(cfg: &RunConfig, command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Freq(FreqCommand::Periods) => periods(cfg),
        Command::Freq(FreqCommand::Scan(args)) => {
            scan(cfg, &args.pairs, args.delta_min, args.delta_max)
        }
        Command::Layout(LayoutCommand::Dump { spec }) => layout_dump(cfg, spec),
        Command::Rotary(RotaryCommand::Check { trials }) => rotary_check(cfg, *trials),
        Command::Niah(NiahCommand::Plan(args)) => {
            csv_unsupported(cfg, "niah plan")?;
            Ok(Outcome::Data(json(&make_plan(args)?)))
        }
        Command::Niah(NiahCommand::Sweep {
            start,
            step,
            max_frames,
            depth_step,
        }) => {
            json_unsupported(cfg, "niah sweep")?;
            let grid = sweep_grid(*start, *step, *max_frames, *depth_step)?;
            Ok(Outcome::Data(export::sweep_grid_csv(&grid)))
        }
        Command::Figdata(args) => figdata(cfg, args),
        Command::Check => check(cfg),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn csv_unsupported(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("{what} only emits json"))),
        _ => Ok(()),
    }
}

fn json_unsupported(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Json) => Err(CliError::Usage(format!("{what} only emits csv"))),
        _ => Ok(()),
    }
}

fn periods(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let rows = period_table(&cfg.schedule);
    Ok(Outcome::Data(match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => export::period_table_csv(&rows),
        Format::Json => json(&rows),
    }))
}

fn scan(cfg: &RunConfig, pairs: &str, lo: u64, hi: u64) -> Result<Outcome, CliError> {
    json_unsupported(cfg, "scan")?;
    let pairs = parse_pair_list(pairs, &cfg.alloc)?;
    let result = collision_scan(&cfg.schedule, &pairs, lo, hi, true)?;
    let table = result.distances.expect("table requested");
    Ok(Outcome::Data(export::scan_csv(&table)))
}

fn read_spec(path: &Path) -> Result<SequenceSpec, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(SequenceSpec::from_json(&src)?)
}

fn layout_dump(cfg: &RunConfig, spec: &Path) -> Result<Outcome, CliError> {
    let spec = read_spec(spec)?;
    let table = assign_positions(&spec, &cfg.variant)?;
    Ok(Outcome::Data(match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => export::position_table_csv(&table),
        Format::Json => json(&table.entries()),
    }))
}

fn rotary_check(cfg: &RunConfig, trials: usize) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sweep = suite::oracle_sweep(&cfg.schedule, trials, &mut rng).map_err(CliError::Usage)?;
    let passed = sweep.failures.is_empty();
    let mut text = format!(
        "trials={} max_relative_error={:e} max_oracle_error={:e}\n",
        sweep.trials, sweep.max_relative_error, sweep.max_oracle_error
    );
    match sweep.failures.first() {
        None => text.push_str("PASS rotary.oracle_sweep\n"),
        Some(f) => text.push_str(&format!("FAIL rotary.oracle_sweep: {f}\n")),
    }
    Ok(Outcome::Report { text, passed })
}

fn check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = SuiteContext::new(cfg.schedule.clone(), cfg.alloc.clone());
    let outcomes = suite::run_all(&ctx, cfg.seed);
    let mut text = String::new();
    let mut first_failure = None;
    for o in &outcomes {
        match &o.failure {
            None => text.push_str(&format!("PASS {}\n", o.name)),
            Some(f) => {
                text.push_str(&format!("FAIL {}\n", o.name));
                first_failure.get_or_insert_with(|| format!("{}: {f}", o.name));
            }
        }
    }
    let passed = first_failure.is_none();
    if let Some(f) = first_failure {
        text.push_str(&format!("counterexample: {f}\n"));
    }
    text.push_str(&format!(
        "{} of {} properties passed\n",
        outcomes.iter().filter(|o| o.failure.is_none()).count(),
        outcomes.len()
    ));
    Ok(Outcome::Report { text, passed })
}

fn make_plan(args: &PlanArgs) -> Result<HaystackPlan, CliError> {
    Ok(if args.no_distractors {
        plan_vniah(args.frames, args.depth)?
    } else {
        plan_vniah_d(args.frames, args.depth, args.period)?
    })
}

fn figdata(cfg: &RunConfig, args: &FigdataArgs) -> Result<Outcome, CliError> {
    match args.kind {
        FigKind::Periods => periods(cfg),
        FigKind::Oscillation => oscillation(cfg, args),
        FigKind::Scan => scan(
            cfg,
            args.pairs.as_deref().unwrap_or("t"),
            args.delta_min,
            args.delta_max,
        ),
        FigKind::Symmetry => symmetry(cfg, args),
        FigKind::Niah => niah_figure(cfg, &args.plan),
    }
}

fn oscillation(cfg: &RunConfig, args: &FigdataArgs) -> Result<Outcome, CliError> {
    json_unsupported(cfg, "oscillation")?;
    let pairs = parse_pair_list(args.pairs.as_deref().unwrap_or("t"), &cfg.alloc)?;
    let (lo, hi, step) = (args.t_min, args.t_max, args.t_step);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && lo <= hi) {
        return Err(CliError::Usage(format!(
            "bad t range [{lo}, {hi}] step {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let mut rows = Vec::with_capacity(count * pairs.len());
    for &n in &pairs {
        let theta = cfg.schedule.theta(n);
        for k in 0..count {
            let t = lo + k as f64 * step;
            rows.push((t, n, (theta * t).cos()));
        }
    }
    Ok(Outcome::Data(export::oscillation_csv(&rows)))
}

fn default_symmetry_spec() -> SequenceSpec {
    SequenceSpec::new(vec![
        Segment::Text(2),
        Segment::Video {
            frames: 2,
            width: 2,
            height: 2,
        },
        Segment::Text(1),
    ])
    .expect("valid spec")
}

#[derive(Serialize)]
struct SymmetryRow {
    variant: VariantKind,
    #[serde(flatten)]
    report: SymmetryReport,
}

fn symmetry(cfg: &RunConfig, args: &FigdataArgs) -> Result<Outcome, CliError> {
    let spec = match &args.spec {
        Some(path) => read_spec(path)?,
        None => default_symmetry_spec(),
    };
    let mut rows = Vec::new();
    for kind in VariantKind::ALL {
        let variant = VariantConfig {
            kind,
            ..cfg.variant
        };
        let report = assign_positions(&spec, &variant)?.symmetry_report()?;
        rows.push(SymmetryRow {
            variant: kind,
            report,
        });
    }
    Ok(Outcome::Data(match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows),
        Format::Csv => {
            let mut out = String::from("variant,gap_pre,gap_post,symmetric\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.variant,
                    export::format_f64(r.report.gap_pre),
                    export::format_f64(r.report.gap_post),
                    r.report.symmetric
                ));
            }
            out
        }
    }))
}

#[derive(Serialize)]
struct NiahFigure {
    plan: HaystackPlan,
    susceptibility: Vec<VariantSusceptibility>,
}

#[derive(Serialize)]
struct VariantSusceptibility {
    variant: VariantKind,
    #[serde(flatten)]
    result: Susceptibility,
}

/// Temporal coordinate of a haystack frame under each indexing scheme.
fn frame_position(
    cfg: &RunConfig,
    kind: VariantKind,
    tokens_per_frame: usize,
) -> impl Fn(usize) -> f64 {
    let scale = match kind {
        VariantKind::Vanilla => tokens_per_frame as f64,
        VariantKind::TadRope => tokens_per_frame as f64 * cfg.variant.gamma,
        VariantKind::MRope => 1.0,
        VariantKind::VideoRope => cfg.variant.delta,
    };
    move |f| scale * f as f64
}

fn niah_figure(cfg: &RunConfig, args: &PlanArgs) -> Result<Outcome, CliError> {
    csv_unsupported(cfg, "niah figure data")?;
    let plan = make_plan(args)?;
    let mut rows = Vec::new();
    for kind in VariantKind::ALL {
        let alloc = cfg.alloc_for(kind)?;
        let rule = frame_position(cfg, kind, plan.tokens_per_frame);
        let result = susceptibility(&plan, &alloc, &cfg.schedule, rule)?;
        rows.push(VariantSusceptibility {
            variant: kind,
            result,
        });
    }
    Ok(Outcome::Data(json(&NiahFigure {
        plan,
        susceptibility: rows,
    })))
}
