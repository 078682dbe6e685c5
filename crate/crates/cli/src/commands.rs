//! Argument definitions and the four subcommands.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ctxseg_core::ctxgen::{generate, ContextStep};
use ctxseg_core::strategies::multichannel_vote;
use ctxseg_core::synth::{generate_ar_sequence, generate_harmonics, ArModel, HarmonicsSpec};
use ctxseg_core::metrics::evaluate;
use ctxseg_core::{ContextSchedule, GeneratedSignal, GeneratorConfig, MultiChannelSeries, TaperKind};
use rayon::prelude::*;
use serde::Deserialize;

use crate::experiment::{fit_exemplar, load_spec, run_experiment};
use crate::io::{
    csv_bytes, encode_signal, fmt6, ground_truth_path, read_json, read_signal, write_all_atomic,
    BoundaryDocument, ChannelResult, SegmentOutput,
};
use crate::methods::{parse_bands, Fixed, MethodName, MethodSpec};
use ctxseg_core::strategies::FixedSlicing;

#[derive(Debug, Parser)]
#[command(name = "ctxseg", version, about = "Adaptive signal segmentation toolkit")]
pub struct Cli {
    /// Master seed for generation and experiments.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for ensembles and multichannel work.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Output file (generate, segment, evaluate) or directory (experiment).
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic signal and its ground-truth boundaries.
    Generate {
        #[command(subcommand)]
        source: GenerateSource,
    },
    /// Find boundaries in a signal file.
    Segment(SegmentArgs),
    /// Score found boundaries against ground truth.
    Evaluate(EvaluateArgs),
    /// Run an ensemble experiment described by a JSON spec.
    Experiment {
        spec: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateSource {
    /// Spiking-neuron signal following a firing-rate schedule.
    Ctxgen {
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Piecewise sums of cosines.
    Harmonics {
        /// JSON spec; the seven-segment preset when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Restart time at zero in every segment.
        #[arg(long)]
        reset_time: bool,
    },
    /// Autoregressive segments following a state sequence.
    Ar(ArArgs),
}

#[derive(Debug, Args)]
pub struct ArArgs {
    /// One state label per character, e.g. AEAEAEA.
    #[arg(long)]
    pub states: String,
    #[arg(long)]
    pub exemplar_a: Option<PathBuf>,
    #[arg(long)]
    pub exemplar_e: Option<PathBuf>,
    /// Exemplar for any state, as STATE=PATH. Repeatable.
    #[arg(long, value_parser = parse_assignment)]
    pub exemplar: Vec<(String, PathBuf)>,
    /// JSON object of ready-made models keyed by state.
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    #[arg(long, default_value_t = 5.0)]
    pub segment_s: f64,
    #[arg(long, default_value_t = 256.0)]
    pub sample_rate: f64,
}

fn parse_assignment(text: &str) -> Result<(String, PathBuf), String> {
    match text.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), PathBuf::from(v))),
        _ => Err(format!("expected STATE=PATH, got {text:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaperArg {
    Hamming,
    Hann,
    Rectangular,
}

impl From<TaperArg> for TaperKind {
    fn from(t: TaperArg) -> Self {
        match t {
            TaperArg::Hamming => TaperKind::Hamming,
            TaperArg::Hann => TaperKind::Hann,
            TaperArg::Rectangular => TaperKind::Rectangular,
        }
    }
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodName::Ctxseg)]
    pub method: MethodName,
    #[arg(long, default_value_t = 0.5)]
    pub window_s: f64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, value_enum, default_value_t = TaperArg::Hamming)]
    pub taper: TaperArg,
    /// Drop the DC bin from compared spectra.
    #[arg(long)]
    pub no_dc: bool,
    /// Advance the test window by the stride after a non-rejection.
    #[arg(long)]
    pub slide_by_stride: bool,
    /// Sample rate of CSV input; must match the sidecar of raw input.
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Overlap fraction for fixed slicing.
    #[arg(long, default_value_t = 0.0)]
    pub overlap: f64,
    /// SPS bands as lo-hi,lo-hi,...
    #[arg(long)]
    pub bands: Option<String>,
    /// Let SPS skip a window past every boundary.
    #[arg(long)]
    pub sps_jump: bool,
    /// Also emit boundaries agreed on by several channels.
    #[arg(long)]
    pub vote: bool,
    #[arg(long, default_value_t = 2)]
    pub min_channels: usize,
    /// Vote clustering tolerance in windows.
    #[arg(long, default_value_t = 2.0)]
    pub vote_tolerance: f64,
}

impl SegmentArgs {
    pub fn method_spec(&self) -> Result<MethodSpec> {
        let mut spec = MethodSpec {
            method: self.method,
            window_s: self.window_s,
            stride: self.stride,
            alpha: self.alpha,
            taper: self.taper.into(),
            include_dc: !self.no_dc,
            slide_by_stride: self.slide_by_stride,
            sps_jump: self.sps_jump,
            overlap: self.overlap,
            ..MethodSpec::default()
        };
        if let Some(b) = &self.bands {
            spec.bands_hz = parse_bands(b)?;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub found: PathBuf,
    /// Similarity near-miss tolerance in samples; 2 × 0.5 s windows by default.
    #[arg(long)]
    pub tolerance: Option<usize>,
    /// Needed when neither file records it.
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Channel to score when the found file holds several and no vote.
    #[arg(long, default_value_t = 0)]
    pub channel: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
}

/// A schedule file: a bare list of steps, or steps plus generator settings.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScheduleFile {
    Steps(Vec<ContextStep>),
    Full {
        steps: Vec<ContextStep>,
        #[serde(default)]
        generator: GeneratorConfig,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    ensure!(cli.jobs >= 1, "--jobs must be at least 1");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
    match &cli.command {
        Command::Generate { source } => cmd_generate(&cli, source),
        Command::Segment(args) => pool.install(|| cmd_segment(&cli, args)),
        Command::Evaluate(args) => cmd_evaluate(&cli, args),
        Command::Experiment { spec } => cmd_experiment(&cli, spec),
    }
}

fn cmd_generate(cli: &Cli, source: &GenerateSource) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let (signal, default_name) = match source {
        GenerateSource::Ctxgen { schedule } => {
            let (steps, mut generator) = match read_json::<ScheduleFile>(schedule)? {
                ScheduleFile::Steps(s) => (s, GeneratorConfig::default()),
                ScheduleFile::Full { steps, generator } => (steps, generator),
            };
            if let Some(s) = cli.seed {
                generator.seed = s;
            }
            (generate(&ContextSchedule::new(steps), &generator)?, "ctxgen.csv")
        }
        GenerateSource::Harmonics { spec, reset_time } => {
            let mut spec = match spec {
                Some(p) => read_json::<HarmonicsSpec>(p)?,
                None => HarmonicsSpec::preset(),
            };
            spec.reset_time_per_segment |= reset_time;
            (generate_harmonics(&spec)?, "harmonics.csv")
        }
        GenerateSource::Ar(args) => (generate_ar(args, seed)?, "ar.csv"),
    };
    let path = cli.output.clone().unwrap_or_else(|| PathBuf::from(default_name));
    write_generated(&path, &signal)
}

fn generate_ar(args: &ArArgs, seed: u64) -> Result<GeneratedSignal> {
    let mut models: BTreeMap<String, ArModel> = match &args.models {
        Some(p) => read_json(p)?,
        None => BTreeMap::new(),
    };
    let mut exemplars = args.exemplar.clone();
    if let Some(p) = &args.exemplar_a {
        exemplars.push(("A".into(), p.clone()));
    }
    if let Some(p) = &args.exemplar_e {
        exemplars.push(("E".into(), p.clone()));
    }
    for (state, path) in &exemplars {
        models.insert(state.clone(), fit_exemplar(path, args.order, args.sample_rate)?);
    }
    let states: Vec<String> = args.states.chars().map(String::from).collect();
    ensure!(!states.is_empty(), "--states must name at least one state");
    Ok(generate_ar_sequence(&models, &states, args.segment_s, args.sample_rate, seed)?)
}

fn write_generated(path: &Path, signal: &GeneratedSignal) -> Result<()> {
    let series = MultiChannelSeries::single(signal.series.clone(), "signal");
    let mut files = encode_signal(path, &series)?;
    files.push((
        ground_truth_path(path),
        serde_json::to_vec_pretty(&signal.ground_truth)?,
    ));
    write_all_atomic(&files)?;
    log::info!(
        "wrote {} samples and {} boundaries to {}",
        signal.series.len(),
        signal.ground_truth.len(),
        path.display()
    );
    Ok(())
}

/// Segments every channel of `series` and optionally votes across them.
pub fn segment_series(series: &MultiChannelSeries, args: &SegmentArgs) -> Result<SegmentOutput> {
    let spec = args.method_spec()?;
    let fs = series.sample_rate_hz();
    let segmenter = spec.build(fs)?;
    let fixed = match spec.method {
        MethodName::Fixed => Some(Fixed(FixedSlicing::new(spec.window_samples(fs)?, spec.overlap)?)),
        _ => None,
    };
    let channels = series
        .channels()
        .par_iter()
        .zip(series.labels().par_iter())
        .map(|(ch, label)| {
            let seg = segmenter.segment(ch)?;
            Ok(ChannelResult {
                label: label.clone(),
                boundaries: seg.boundaries,
                windows: fixed.as_ref().map(|f| f.windows(ch.len())).transpose()?,
                warning: seg.warning,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let voted = if args.vote {
        let w = spec.window_samples(fs)?;
        let sets: Vec<_> = channels.iter().map(|c| c.boundaries.clone()).collect();
        let tolerance = (args.vote_tolerance * w as f64).round() as usize;
        Some(multichannel_vote(&sets, args.min_channels, tolerance, w)?)
    } else {
        None
    };
    Ok(SegmentOutput {
        sample_rate_hz: fs,
        method: spec.label(),
        channels,
        voted,
    })
}

fn cmd_segment(cli: &Cli, args: &SegmentArgs) -> Result<()> {
    let series = read_signal(&args.input, args.sample_rate)?;
    let out = segment_series(&series, args)?;
    let mut bytes = serde_json::to_vec_pretty(&out)?;
    bytes.push(b'\n');
    emit(cli.output.as_deref(), bytes)
}

fn emit(path: Option<&Path>, bytes: Vec<u8>) -> Result<()> {
    match path {
        Some(p) => write_all_atomic(&[(p.to_path_buf(), bytes)]),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn cmd_evaluate(cli: &Cli, args: &EvaluateArgs) -> Result<()> {
    let (gt, gt_rate) = read_json::<BoundaryDocument>(&args.gt)?.select(0)?;
    let (found, found_rate) = read_json::<BoundaryDocument>(&args.found)?.select(args.channel)?;
    let fs = match (args.sample_rate, found_rate.or(gt_rate)) {
        (Some(a), Some(b)) if a != b => bail!("--sample-rate {a} disagrees with {b} Hz recorded in the input"),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => 256.0,
    };
    let tolerance = match args.tolerance {
        Some(t) => t,
        None => MethodSpec::default().default_tolerance(fs)?,
    };
    let report = evaluate(&gt, &found, fs, tolerance).context("evaluating boundaries")?;
    let bytes = match args.format {
        ReportFormat::Json => {
            let mut b = serde_json::to_vec_pretty(&report)?;
            b.push(b'\n');
            b
        }
        ReportFormat::Csv => csv_bytes(
            &["count", "delay_s", "sensitivity", "similarity"],
            &[vec![
                fmt6(report.boundary_count),
                fmt6(report.mean_delay_s),
                fmt6(report.sensitivity),
                fmt6(report.similarity),
            ]],
        )?,
    };
    emit(cli.output.as_deref(), bytes)
}

fn cmd_experiment(cli: &Cli, spec_path: &Path) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let result = run_experiment(&spec, cli.jobs, cli.seed)?;
    let (report, plot) = result.to_csv()?;
    let dir = cli.output.clone().unwrap_or_else(|| PathBuf::from("."));
    write_all_atomic(&[
        (dir.join(format!("{}.report.csv", spec.name)), report),
        (dir.join(format!("{}.plot.csv", spec.name)), plot),
    ])?;
    log::info!("wrote {} results to {}", spec.name, dir.display());
    Ok(())
}
