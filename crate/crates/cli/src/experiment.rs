//! Seeded ensemble experiments and their report and plot-data files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use ctxseg_core::ctxgen::{generate, ContextStep};
use ctxseg_core::metrics::{boundary_delay, evaluate, EnsembleReport, EvaluationReport};
use ctxseg_core::synth::{fit_ar, generate_ar_sequence, generate_harmonics, ArModel, HarmonicsSpec};
use ctxseg_core::{BoundarySet, ContextSchedule, GeneratedSignal, GeneratorConfig, TimeSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{csv_bytes, fmt6, read_json, read_signal, BoundaryDocument};
use crate::methods::{MethodName, MethodSpec};

/// Child seed of trial `k`: a SplitMix64 step over `master + k`, so any trial
/// can be reproduced on its own.
pub fn derive_seed(master: u64, k: u64) -> u64 {
    let mut z = master.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The seven-step firing-rate protocol: 2, 40, 20, 10, 40, 6 and 20 Hz for 5 s each.
pub fn reference_schedule() -> ContextSchedule {
    ContextSchedule::uniform(&[2.0, 40.0, 20.0, 10.0, 40.0, 6.0, 20.0], 5.0)
}

fn default_sample_rate() -> f64 {
    256.0
}

fn default_segment_s() -> f64 {
    5.0
}

fn default_order() -> usize {
    8
}

/// Where the signals of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Ctxgen {
        #[serde(default = "reference_schedule")]
        schedule: ContextSchedule,
        #[serde(default)]
        generator: GeneratorConfig,
    },
    Harmonics {
        #[serde(default = "HarmonicsSpec::preset")]
        spec: HarmonicsSpec,
    },
    Ar {
        /// Fitted or hand-written models by state label.
        #[serde(default)]
        models: BTreeMap<String, ArModel>,
        /// Exemplar signal files by state label, fitted with `order`.
        #[serde(default)]
        exemplars: BTreeMap<String, PathBuf>,
        #[serde(default = "default_order")]
        order: usize,
        /// One state label per character, e.g. `AEAEAEA`.
        states: String,
        #[serde(default = "default_segment_s")]
        segment_duration_s: f64,
        #[serde(default = "default_sample_rate")]
        sample_rate_hz: f64,
    },
    File {
        path: PathBuf,
        ground_truth: PathBuf,
        #[serde(default = "default_sample_rate")]
        sample_rate_hz: f64,
        #[serde(default)]
        channel: usize,
    },
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self::Ctxgen {
            schedule: reference_schedule(),
            generator: GeneratorConfig::default(),
        }
    }
}

/// A source with every external input loaded, ready to produce trials.
pub enum Source {
    Ctxgen(ContextSchedule, GeneratorConfig),
    Fixed(GeneratedSignal),
    Ar {
        models: BTreeMap<String, ArModel>,
        states: Vec<String>,
        segment_duration_s: f64,
        sample_rate_hz: f64,
    },
}

impl Source {
    pub fn load(spec: &SourceSpec) -> Result<Self> {
        Ok(match spec {
            SourceSpec::Ctxgen { schedule, generator } => {
                generator.validate()?;
                schedule.validate(generator.sample_rate_hz)?;
                Self::Ctxgen(schedule.clone(), *generator)
            }
            SourceSpec::Harmonics { spec } => Self::Fixed(generate_harmonics(spec)?),
            SourceSpec::Ar {
                models,
                exemplars,
                order,
                states,
                segment_duration_s,
                sample_rate_hz,
            } => {
                let mut all = models.clone();
                for (state, path) in exemplars {
                    all.insert(state.clone(), fit_exemplar(path, *order, *sample_rate_hz)?);
                }
                Self::Ar {
                    models: all,
                    states: states.chars().map(String::from).collect(),
                    segment_duration_s: *segment_duration_s,
                    sample_rate_hz: *sample_rate_hz,
                }
            }
            SourceSpec::File {
                path,
                ground_truth,
                sample_rate_hz,
                channel,
            } => {
                let series = read_signal(path, Some(*sample_rate_hz))?;
                let ts = series
                    .channels()
                    .get(*channel)
                    .with_context(|| format!("{} has no channel {channel}", path.display()))?
                    .clone();
                let (gt, _) = read_json::<BoundaryDocument>(ground_truth)?.select(0)?;
                ensure!(
                    gt.signal_length() == ts.len(),
                    "ground truth covers {} samples but the signal has {}",
                    gt.signal_length(),
                    ts.len()
                );
                Self::Fixed(GeneratedSignal {
                    series: ts,
                    ground_truth: gt,
                    schedule: None,
                })
            }
        })
    }

    pub fn generate(&self, seed: u64) -> Result<GeneratedSignal> {
        Ok(match self {
            Self::Ctxgen(schedule, config) => generate(schedule, &GeneratorConfig { seed, ..*config })?,
            Self::Fixed(signal) => signal.clone(),
            Self::Ar {
                models,
                states,
                segment_duration_s,
                sample_rate_hz,
            } => generate_ar_sequence(models, states, *segment_duration_s, *sample_rate_hz, seed)?,
        })
    }
}

/// Fits an AR model to the first channel of an exemplar file.
pub fn fit_exemplar(path: &Path, order: usize, sample_rate_hz: f64) -> Result<ArModel> {
    let series = read_signal(path, Some(sample_rate_hz))?;
    let ts = series
        .channels()
        .first()
        .with_context(|| format!("{} has no channels", path.display()))?;
    fit_ar(ts, order).with_context(|| format!("fitting AR({order}) to {}", path.display()))
}

fn default_trials() -> usize {
    1
}

fn default_alphas() -> Vec<f64> {
    vec![0.05, 0.01, 0.001]
}

fn default_table_methods() -> Vec<MethodSpec> {
    let ctx = |alpha| MethodSpec {
        alpha,
        ..MethodSpec::default()
    };
    let sps = |alpha| MethodSpec {
        method: MethodName::Sps,
        alpha,
        ..MethodSpec::default()
    };
    let plain = |method| MethodSpec {
        method,
        ..MethodSpec::default()
    };
    vec![
        ctx(0.05),
        ctx(0.01),
        ctx(0.001),
        plain(MethodName::Varri),
        plain(MethodName::Nleo),
        sps(0.05),
        sps(0.01),
        sps(0.001),
    ]
}

fn default_windows() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 3.0, 4.0]
}

fn default_grid_rates() -> Vec<f64> {
    vec![2.0, 6.0, 10.0, 20.0, 40.0]
}

fn default_switch_s() -> f64 {
    1.0
}

fn default_grid_duration() -> f64 {
    6.0
}

fn default_periods() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
}

fn default_low() -> f64 {
    20.0
}

fn default_high() -> f64 {
    40.0
}

fn default_states() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Every method on every trial signal, one summary row per method.
    Table {
        #[serde(default)]
        source: SourceSpec,
        #[serde(default = "default_table_methods")]
        methods: Vec<MethodSpec>,
    },
    /// CTXSEG segment counts over a grid of window sizes and alphas.
    WindowSweep {
        #[serde(default = "harmonics_source")]
        source: SourceSpec,
        #[serde(default = "default_windows")]
        windows_s: Vec<f64>,
        #[serde(default = "default_alphas")]
        alphas: Vec<f64>,
        #[serde(default)]
        method: MethodSpec,
    },
    /// Delay of a single rate switch for every ordered pair of rates.
    DelayGrid {
        #[serde(default = "default_grid_rates")]
        rates_hz: Vec<f64>,
        #[serde(default = "default_switch_s")]
        switch_s: f64,
        #[serde(default = "default_grid_duration")]
        duration_s: f64,
        #[serde(default)]
        generator: GeneratorConfig,
        #[serde(default)]
        method: MethodSpec,
    },
    /// Signals alternating between two rates; `periods_s` is the time between switches.
    Oscillation {
        #[serde(default = "default_periods")]
        periods_s: Vec<f64>,
        #[serde(default = "default_low")]
        low_hz: f64,
        #[serde(default = "default_high")]
        high_hz: f64,
        #[serde(default = "default_states")]
        states: usize,
        #[serde(default = "default_alphas")]
        alphas: Vec<f64>,
        #[serde(default)]
        generator: GeneratorConfig,
        #[serde(default)]
        method: MethodSpec,
    },
}

fn harmonics_source() -> SourceSpec {
    SourceSpec::Harmonics {
        spec: HarmonicsSpec::preset(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Similarity near-miss tolerance in samples; defaults to twice each method's window.
    #[serde(default)]
    pub tolerance_units: Option<usize>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

fn default_name() -> String {
    "experiment".into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub median_s: f64,
    pub variance_s2: f64,
    /// Counts per 0.25 s bin, starting at zero.
    pub histogram: Vec<usize>,
}

pub const SIZE_BIN_S: f64 = 0.25;

impl SizeSummary {
    pub fn from_sizes(sizes: &[f64]) -> Self {
        let mut sorted = sizes.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median_s = match n {
            0 => f64::NAN,
            _ if n % 2 == 1 => sorted[n / 2],
            _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
        };
        let variance_s2 = if n > 1 {
            let m = sorted.iter().sum::<f64>() / n as f64;
            sorted.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        let mut histogram = Vec::new();
        for v in &sorted {
            let bin = (v / SIZE_BIN_S) as usize;
            if histogram.len() <= bin {
                histogram.resize(bin + 1, 0);
            }
            histogram[bin] += 1;
        }
        Self {
            median_s,
            variance_s2,
            histogram,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub ensemble: EnsembleReport,
    pub sizes: SizeSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub window_s: f64,
    pub alpha: f64,
    pub ensemble: EnsembleReport,
    /// Mean number of segments (boundaries + 1).
    pub segments: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayCell {
    pub from_hz: f64,
    pub to_hz: f64,
    pub trials: usize,
    pub sensitivity: f64,
    /// Mean over trials where the switch was found; NaN if never found.
    pub mean_delay_s: f64,
    pub delay_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationRow {
    pub period_s: f64,
    pub alpha: f64,
    pub trials: usize,
    pub sensitivity: f64,
    pub delays_s: Vec<f64>,
    pub sizes: SizeSummary,
}

impl OscillationRow {
    /// Share of present delays no longer than `limit_s`.
    pub fn delays_within(&self, limit_s: f64) -> f64 {
        if self.delays_s.is_empty() {
            return f64::NAN;
        }
        self.delays_s.iter().filter(|&&d| d <= limit_s).count() as f64 / self.delays_s.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentResult {
    Table(Vec<TableRow>),
    WindowSweep(Vec<SweepRow>),
    DelayGrid(Vec<DelayCell>),
    Oscillation(Vec<OscillationRow>),
}

/// Runs `f(k, seed_k)` for every trial on `pool`; results come back in trial order.
fn run_trials<T, F>(pool: &rayon::ThreadPool, trials: usize, master: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|k| {
                let seed = derive_seed(master, k as u64);
                f(k, seed).with_context(|| format!("trial {k} (seed {seed}) failed"))
            })
            .collect()
    })
}

fn segment_sizes_s(b: &BoundarySet, sample_rate_hz: f64) -> impl Iterator<Item = f64> + '_ {
    b.segments()
        .into_iter()
        .map(move |(s, e)| (e - s) as f64 / sample_rate_hz)
}

fn ctxseg_at(base: &MethodSpec, alpha: f64, window_s: f64) -> MethodSpec {
    MethodSpec {
        method: MethodName::Ctxseg,
        alpha,
        window_s,
        ..base.clone()
    }
}

/// Runs an experiment with `jobs` worker threads. `seed` overrides the spec's seed.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize, seed: Option<u64>) -> Result<ExperimentResult> {
    ensure!(spec.trials >= 1, "trials must be at least 1");
    let master = seed.or(spec.seed).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    let trials = spec.trials;
    let tolerance = |m: &MethodSpec, fs: f64| match spec.tolerance_units {
        Some(t) => Ok(t),
        None => m.default_tolerance(fs),
    };

    match &spec.kind {
        ExperimentKind::Table { source, methods } => {
            ensure!(!methods.is_empty(), "a table experiment needs at least one method");
            let source = Source::load(source)?;
            let per_trial = run_trials(&pool, trials, master, |_, seed| {
                let sig = source.generate(seed)?;
                let fs = sig.series.sample_rate_hz();
                methods
                    .iter()
                    .map(|m| {
                        let seg = m.build(fs)?.segment(&sig.series)?;
                        let report = evaluate(&sig.ground_truth, &seg.boundaries, fs, tolerance(m, fs)?)?;
                        let sizes: Vec<f64> = segment_sizes_s(&seg.boundaries, fs).collect();
                        Ok((report, sizes))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let rows = methods
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let reports: Vec<EvaluationReport> = per_trial.iter().map(|t| t[i].0).collect();
                    let sizes: Vec<f64> = per_trial.iter().flat_map(|t| t[i].1.iter().copied()).collect();
                    Ok(TableRow {
                        label: m.label(),
                        ensemble: EnsembleReport::from_reports(&reports)?,
                        sizes: SizeSummary::from_sizes(&sizes),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ExperimentResult::Table(rows))
        }
        ExperimentKind::WindowSweep {
            source,
            windows_s,
            alphas,
            method,
        } => {
            let source = Source::load(source)?;
            let grid: Vec<(f64, f64)> = windows_s
                .iter()
                .flat_map(|&w| alphas.iter().map(move |&a| (w, a)))
                .collect();
            let per_trial = run_trials(&pool, trials, master, |_, seed| {
                let sig = source.generate(seed)?;
                let fs = sig.series.sample_rate_hz();
                grid.iter()
                    .map(|&(w, a)| {
                        let m = ctxseg_at(method, a, w);
                        let seg = m.build(fs)?.segment(&sig.series)?;
                        Ok(evaluate(&sig.ground_truth, &seg.boundaries, fs, tolerance(&m, fs)?)?)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let rows = grid
                .iter()
                .enumerate()
                .map(|(i, &(window_s, alpha))| {
                    let reports: Vec<EvaluationReport> = per_trial.iter().map(|t| t[i]).collect();
                    let ensemble = EnsembleReport::from_reports(&reports)?;
                    Ok(SweepRow {
                        window_s,
                        alpha,
                        segments: ensemble.mean.boundary_count + 1.0,
                        ensemble,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ExperimentResult::WindowSweep(rows))
        }
        ExperimentKind::DelayGrid {
            rates_hz,
            switch_s,
            duration_s,
            generator,
            method,
        } => {
            ensure!(
                *switch_s > 0.0 && duration_s > switch_s,
                "the switch must fall inside the signal"
            );
            let pairs: Vec<(f64, f64)> = rates_hz
                .iter()
                .flat_map(|&a| rates_hz.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
                .collect();
            let m = ctxseg_at(method, method.alpha, method.window_s);
            let fs = generator.sample_rate_hz;
            let segmenter = m.build(fs)?;
            let per_trial = run_trials(&pool, trials, master, |_, seed| {
                pairs
                    .iter()
                    .enumerate()
                    .map(|(p, &(from, to))| {
                        let schedule = ContextSchedule::new(vec![
                            ContextStep {
                                rate_hz: from,
                                duration_s: *switch_s,
                            },
                            ContextStep {
                                rate_hz: to,
                                duration_s: duration_s - switch_s,
                            },
                        ]);
                        // every cell of a trial gets its own stream
                        let config = GeneratorConfig {
                            seed: derive_seed(seed, p as u64),
                            ..*generator
                        };
                        let sig = generate(&schedule, &config)?;
                        let seg = segmenter.segment(&sig.series)?;
                        Ok(boundary_delay(&sig.ground_truth, &seg.boundaries, fs)[0])
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let cells = pairs
                .iter()
                .enumerate()
                .map(|(p, &(from_hz, to_hz))| {
                    let present: Vec<f64> = per_trial.iter().filter_map(|t| t[p]).collect();
                    let n = present.len() as f64;
                    let mean = present.iter().sum::<f64>() / n;
                    let var = if present.len() > 1 {
                        present.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)
                    } else {
                        0.0
                    };
                    DelayCell {
                        from_hz,
                        to_hz,
                        trials,
                        sensitivity: n / trials as f64,
                        mean_delay_s: if present.is_empty() { f64::NAN } else { mean },
                        delay_variance: var,
                    }
                })
                .collect();
            Ok(ExperimentResult::DelayGrid(cells))
        }
        ExperimentKind::Oscillation {
            periods_s,
            low_hz,
            high_hz,
            states,
            alphas,
            generator,
            method,
        } => {
            ensure!(*states >= 2, "an oscillation needs at least two states");
            let fs = generator.sample_rate_hz;
            let segmenters = alphas
                .iter()
                .map(|&a| ctxseg_at(method, a, method.window_s).build(fs))
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for (pi, &period) in periods_s.iter().enumerate() {
                let rates: Vec<f64> = (0..*states)
                    .map(|i| if i % 2 == 0 { *low_hz } else { *high_hz })
                    .collect();
                let schedule = ContextSchedule::uniform(&rates, period);
                let per_trial = run_trials(&pool, trials, derive_seed(master, 1 << 32 | pi as u64), |_, seed| {
                    let sig = generate(&schedule, &GeneratorConfig { seed, ..*generator })?;
                    segmenters
                        .iter()
                        .map(|s| {
                            let seg = s.segment(&sig.series)?;
                            let delays = boundary_delay(&sig.ground_truth, &seg.boundaries, fs);
                            let sizes: Vec<f64> = segment_sizes_s(&seg.boundaries, fs).collect();
                            Ok((delays, sizes))
                        })
                        .collect::<Result<Vec<_>>>()
                })?;
                for (ai, &alpha) in alphas.iter().enumerate() {
                    let mut hits = 0usize;
                    let mut total = 0usize;
                    let mut delays = Vec::new();
                    let mut sizes = Vec::new();
                    for t in &per_trial {
                        let (d, s) = &t[ai];
                        total += d.len();
                        hits += d.iter().filter(|x| x.is_some()).count();
                        delays.extend(d.iter().flatten());
                        sizes.extend(s);
                    }
                    rows.push(OscillationRow {
                        period_s: period,
                        alpha,
                        trials,
                        sensitivity: hits as f64 / total as f64,
                        delays_s: delays,
                        sizes: SizeSummary::from_sizes(&sizes),
                    });
                }
            }
            Ok(ExperimentResult::Oscillation(rows))
        }
    }
}

const PLOT_HEADER: [&str; 4] = ["series", "x", "variable", "value"];

fn plot_row(series: impl Into<String>, x: f64, variable: &str, value: f64) -> Vec<String> {
    vec![series.into(), fmt6(x), variable.into(), fmt6(value)]
}

fn histogram_rows(series: &str, sizes: &SizeSummary, out: &mut Vec<Vec<String>>) {
    for (bin, &count) in sizes.histogram.iter().enumerate() {
        if count > 0 {
            let centre = (bin as f64 + 0.5) * SIZE_BIN_S;
            out.push(plot_row(series, centre, "segment_size_count", count as f64));
        }
    }
}

fn report_cells(e: &EnsembleReport) -> Vec<String> {
    vec![
        e.trials.to_string(),
        fmt6(e.mean.boundary_count),
        fmt6(e.mean.mean_delay_s),
        fmt6(e.mean.sensitivity),
        fmt6(e.mean.similarity),
        fmt6(e.variance.boundary_count),
        fmt6(e.variance.mean_delay_s),
        fmt6(e.variance.sensitivity),
        fmt6(e.variance.similarity),
    ]
}

const REPORT_COLUMNS: [&str; 9] = [
    "trials",
    "count",
    "delay_s",
    "sensitivity",
    "similarity",
    "count_var",
    "delay_s_var",
    "sensitivity_var",
    "similarity_var",
];

impl ExperimentResult {
    /// The summary report and long-format plot data as CSV documents.
    pub fn to_csv(&self) -> Result<(Vec<u8>, Vec<u8>)> {
        let mut plot = Vec::new();
        let report = match self {
            Self::Table(rows) => {
                let mut header = vec!["method"];
                header.extend(REPORT_COLUMNS);
                header.extend(["median_segment_s", "segment_var_s2"]);
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        let mut row = vec![r.label.clone()];
                        row.extend(report_cells(&r.ensemble));
                        row.extend([fmt6(r.sizes.median_s), fmt6(r.sizes.variance_s2)]);
                        histogram_rows(&r.label, &r.sizes, &mut plot);
                        row
                    })
                    .collect();
                csv_bytes(&header, &body)?
            }
            Self::WindowSweep(rows) => {
                let mut header = vec!["window_s", "alpha"];
                header.extend(REPORT_COLUMNS);
                header.push("segments");
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        let series = format!("alpha={}", r.alpha);
                        plot.push(plot_row(&series, r.window_s, "segments", r.segments));
                        plot.push(plot_row(&series, r.window_s, "sensitivity", r.ensemble.mean.sensitivity));
                        let mut row = vec![fmt6(r.window_s), fmt6(r.alpha)];
                        row.extend(report_cells(&r.ensemble));
                        row.push(fmt6(r.segments));
                        row
                    })
                    .collect();
                csv_bytes(&header, &body)?
            }
            Self::DelayGrid(cells) => {
                let header = ["from_hz", "to_hz", "trials", "sensitivity", "mean_delay_s", "delay_s_var"];
                let body: Vec<Vec<String>> = cells
                    .iter()
                    .map(|c| {
                        let series = format!("from_hz={}", c.from_hz);
                        plot.push(plot_row(&series, c.to_hz, "mean_delay_s", c.mean_delay_s));
                        plot.push(plot_row(&series, c.to_hz, "sensitivity", c.sensitivity));
                        vec![
                            fmt6(c.from_hz),
                            fmt6(c.to_hz),
                            c.trials.to_string(),
                            fmt6(c.sensitivity),
                            fmt6(c.mean_delay_s),
                            fmt6(c.delay_variance),
                        ]
                    })
                    .collect();
                csv_bytes(&header, &body)?
            }
            Self::Oscillation(rows) => {
                let header = [
                    "period_s",
                    "alpha",
                    "trials",
                    "sensitivity",
                    "delays_within_2_5s",
                    "median_segment_s",
                    "segment_var_s2",
                ];
                let body: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        let series = format!("alpha={}", r.alpha);
                        plot.push(plot_row(&series, r.period_s, "sensitivity", r.sensitivity));
                        for &d in &r.delays_s {
                            plot.push(plot_row(&series, r.period_s, "delay_s", d));
                        }
                        histogram_rows(&format!("alpha={} period_s={}", r.alpha, r.period_s), &r.sizes, &mut plot);
                        vec![
                            fmt6(r.period_s),
                            fmt6(r.alpha),
                            r.trials.to_string(),
                            fmt6(r.sensitivity),
                            fmt6(r.delays_within(2.5)),
                            fmt6(r.sizes.median_s),
                            fmt6(r.sizes.variance_s2),
                        ]
                    })
                    .collect();
                csv_bytes(&header, &body)?
            }
        };
        Ok((report, csv_bytes(&PLOT_HEADER, &plot)?))
    }
}

/// Reads an experiment spec; unknown fields and kinds are errors.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let spec: ExperimentSpec = read_json(path)?;
    if spec.trials == 0 {
        bail!("{}: trials must be at least 1", path.display());
    }
    Ok(spec)
}

/// Signals shorter than this many samples cannot carry a boundary.
pub fn check_signal(ts: &TimeSeries) -> Result<()> {
    ensure!(ts.len() >= 2, "signal has fewer than two samples");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|k| derive_seed(7, k)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(derive_seed(7, 3), a[3]);
        assert_ne!(derive_seed(8, 3), a[3]);
    }

    #[test]
    fn size_summary() {
        let s = SizeSummary::from_sizes(&[1.0, 3.0, 0.1, 2.0]);
        assert_eq!(s.median_s, 1.5);
        assert_eq!(s.histogram[0], 1);
        assert_eq!(s.histogram[4], 1);
        assert_eq!(s.histogram.iter().sum::<usize>(), 4);
    }

    #[test]
    fn spec_parsing() {
        let spec: ExperimentSpec = serde_json::from_str(
            r#"{"kind": "table", "trials": 3, "seed": 4, "source": {"type": "harmonics"},
                "methods": [{"method": "varri"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.trials, 3);
        match spec.kind {
            ExperimentKind::Table { methods, .. } => assert_eq!(methods[0].method, MethodName::Varri),
            _ => panic!("wrong kind"),
        }
        let sweep: ExperimentSpec = serde_json::from_str(r#"{"kind": "window_sweep"}"#).unwrap();
        assert!(matches!(sweep.kind, ExperimentKind::WindowSweep { .. }));
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"kind": "nope"}"#).is_err());
    }

    #[test]
    fn harmonics_table_is_deterministic() {
        let spec: ExperimentSpec = serde_json::from_str(
            r#"{"kind": "table", "trials": 2, "source": {"type": "harmonics"},
                "methods": [{"method": "ctxseg"}, {"method": "nleo"}]}"#,
        )
        .unwrap();
        let a = run_experiment(&spec, 2, Some(1)).unwrap();
        let b = run_experiment(&spec, 1, Some(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        if let ExperimentResult::Table(rows) = a {
            assert_eq!(rows[0].ensemble.mean.boundary_count, 68.0);
            assert_eq!(rows[0].ensemble.variance.boundary_count, 0.0);
        }
    }
}
