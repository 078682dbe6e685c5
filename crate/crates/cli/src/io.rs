//! Signal files, boundary documents and report formatting.
//!
//! Signals are either CSV (a header row of channel labels, then one row per
//! sample) or raw little-endian `f32` samples, interleaved by channel, with a
//! JSON sidecar at `<path>.json` describing `sample_rate_hz`, `channels` and
//! `samples`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use ctxseg_core::{BoundarySet, MultiChannelSeries, TimeSeries};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub sample_rate_hz: f64,
    pub channels: Vec<String>,
    pub samples: usize,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a signal file. CSV files take their rate from `sample_rate_hz`; raw
/// files from their sidecar, which must agree with `sample_rate_hz` when given.
pub fn read_signal(path: &Path, sample_rate_hz: Option<f64>) -> Result<MultiChannelSeries> {
    if is_csv(path) {
        read_csv(path, sample_rate_hz.unwrap_or(256.0))
    } else {
        read_raw(path, sample_rate_hz)
    }
}

fn read_csv(path: &Path, sample_rate_hz: f64) -> Result<MultiChannelSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let labels: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    ensure!(!labels.is_empty(), "{} has no header row", path.display());
    let mut columns = vec![Vec::new(); labels.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{} row {}", path.display(), row + 2))?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let v: f64 = field
                .parse()
                .with_context(|| format!("{} row {}: bad number {field:?}", path.display(), row + 2))?;
            col.push(v);
        }
    }
    build_series(columns, labels, sample_rate_hz)
}

fn read_raw(path: &Path, sample_rate_hz: Option<f64>) -> Result<MultiChannelSeries> {
    let side = sidecar_path(path);
    let meta: RawSidecar = serde_json::from_slice(
        &fs::read(&side).with_context(|| format!("reading sidecar {}", side.display()))?,
    )
    .with_context(|| format!("parsing sidecar {}", side.display()))?;
    if let Some(rate) = sample_rate_hz {
        ensure!(
            rate == meta.sample_rate_hz,
            "declared sample rate {rate} Hz does not match {} Hz in {}",
            meta.sample_rate_hz,
            side.display()
        );
    }
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let c = meta.channels.len();
    ensure!(c > 0, "{} declares no channels", side.display());
    let expected = meta.samples * c * 4;
    ensure!(
        bytes.len() == expected,
        "{} holds {} bytes but the sidecar declares {} samples x {c} channels ({expected} bytes)",
        path.display(),
        bytes.len(),
        meta.samples
    );
    let mut columns = vec![Vec::with_capacity(meta.samples); c];
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("four bytes"));
        columns[i % c].push(f64::from(v));
    }
    build_series(columns, meta.channels, meta.sample_rate_hz)
}

fn build_series(
    columns: Vec<Vec<f64>>,
    labels: Vec<String>,
    sample_rate_hz: f64,
) -> Result<MultiChannelSeries> {
    let channels = columns
        .into_iter()
        .map(|c| TimeSeries::new(c, sample_rate_hz))
        .collect::<ctxseg_core::Result<Vec<_>>>()?;
    Ok(MultiChannelSeries::new(channels, labels)?)
}

/// Encodes a signal for `path`: CSV for a `.csv` extension, raw `f32` plus a
/// sidecar otherwise.
pub fn encode_signal(path: &Path, series: &MultiChannelSeries) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    if is_csv(path) {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(series.labels())?;
        for i in 0..series.len() {
            w.write_record(series.channels().iter().map(|c| c.samples()[i].to_string()))?;
        }
        return Ok(vec![(path.to_path_buf(), w.into_inner()?)]);
    }
    let mut bytes = Vec::with_capacity(series.len() * series.channel_count() * 4);
    for i in 0..series.len() {
        for c in series.channels() {
            bytes.extend_from_slice(&(c.samples()[i] as f32).to_le_bytes());
        }
    }
    let meta = RawSidecar {
        sample_rate_hz: series.sample_rate_hz(),
        channels: series.labels().to_vec(),
        samples: series.len(),
    };
    Ok(vec![
        (path.to_path_buf(), bytes),
        (sidecar_path(path), serde_json::to_vec_pretty(&meta)?),
    ])
}

/// Writes every file to a temporary sibling first and renames only once all
/// writes succeeded, so a failure leaves no partial outputs behind.
pub fn write_all_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    let mut staged = Vec::new();
    let result = (|| -> Result<()> {
        for (path, bytes) in files {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
            staged.push(tmp.clone());
            f.write_all(bytes)?;
            f.sync_all()?;
        }
        Ok(())
    })();
    if let Err(e) = result {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
        return Err(e);
    }
    for ((path, _), tmp) in files.iter().zip(&staged) {
        fs::rename(tmp, path).with_context(|| format!("moving output into {}", path.display()))?;
    }
    Ok(())
}

/// Where the ground truth of a generated signal goes: `<stem>.gt.json`.
pub fn ground_truth_path(signal: &Path) -> PathBuf {
    let stem = signal
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "signal".into());
    signal.with_file_name(format!("{stem}.gt.json"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Boundaries for one channel in a segmentation document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelResult {
    pub label: String,
    #[serde(flatten)]
    pub boundaries: BoundarySet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Output of the `segment` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentOutput {
    pub sample_rate_hz: f64,
    pub method: String,
    pub channels: Vec<ChannelResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voted: Option<BoundarySet>,
}

/// A boundary file: either a bare boundary set or a segmentation document.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum BoundaryDocument {
    Segmentation(SegmentOutput),
    Plain(BoundarySet),
}

impl BoundaryDocument {
    /// The voted set if present, else the requested channel.
    pub fn select(self, channel: usize) -> Result<(BoundarySet, Option<f64>)> {
        match self {
            Self::Plain(b) => Ok((b, None)),
            Self::Segmentation(s) => {
                let rate = Some(s.sample_rate_hz);
                if let Some(v) = s.voted {
                    return Ok((v, rate));
                }
                let count = s.channels.len();
                match s.channels.into_iter().nth(channel) {
                    Some(c) => Ok((c.boundaries, rate)),
                    None => bail!("channel {channel} requested but the document has {count}"),
                }
            }
        }
    }
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros trimmed.
pub fn fmt6(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Builds a CSV document from a header and rows of pre-formatted cells.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(w.into_inner()?)
}
