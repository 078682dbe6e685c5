//! Signal containers, tapers and log-magnitude spectra.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitude floor applied before taking the logarithm.
pub const MAGNITUDE_FLOOR: f64 = 1e-12;

/// A uniformly sampled, finite-valued signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sampling interval in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    /// Duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn window(&self, view: WindowView) -> Result<&[f64]> {
        view.slice(&self.samples)
    }
}

/// Several equally long channels sampled at one rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelSeries {
    channels: Vec<TimeSeries>,
    labels: Vec<String>,
}

impl MultiChannelSeries {
    pub fn new(channels: Vec<TimeSeries>, labels: Vec<String>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if channels.len() != labels.len() {
            return Err(Error::LengthMismatch(format!(
                "{} channels but {} labels",
                channels.len(),
                labels.len()
            )));
        }
        let first = &channels[0];
        for (ch, label) in channels.iter().zip(&labels).skip(1) {
            if ch.len() != first.len() || ch.sample_rate_hz() != first.sample_rate_hz() {
                return Err(Error::LengthMismatch(format!(
                    "channel '{label}' has {} samples at {} Hz, expected {} at {} Hz",
                    ch.len(),
                    ch.sample_rate_hz(),
                    first.len(),
                    first.sample_rate_hz()
                )));
            }
        }
        Ok(Self { channels, labels })
    }

    pub fn single(series: TimeSeries, label: impl Into<String>) -> Self {
        Self {
            channels: vec![series],
            labels: vec![label.into()],
        }
    }

    pub fn channels(&self) -> &[TimeSeries] {
        &self.channels
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels[0].is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.channels[0].sample_rate_hz()
    }
}

/// A fixed-length window `[start, start + length)` into a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowView {
    pub start: usize,
    pub length: usize,
}

impl WindowView {
    pub fn new(start: usize, length: usize) -> Self {
        Self { start, length }
    }

    pub fn end(&self) -> usize {
        self.start + self.length
    }

    pub fn slice<'a>(&self, samples: &'a [f64]) -> Result<&'a [f64]> {
        samples.get(self.start..self.end()).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "window [{}, {}) exceeds signal length {}",
                self.start,
                self.end(),
                samples.len()
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaperKind {
    #[default]
    Hamming,
    Hann,
    Rectangular,
}

impl TaperKind {
    /// Symmetric taper coefficients of the given length.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        if len == 1 {
            return vec![1.0];
        }
        let denom = (len - 1) as f64;
        (0..len)
            .map(|k| {
                let phase = 2.0 * PI * k as f64 / denom;
                match self {
                    TaperKind::Hamming => 0.54 - 0.46 * phase.cos(),
                    TaperKind::Hann => 0.5 - 0.5 * phase.cos(),
                    TaperKind::Rectangular => 1.0,
                }
            })
            .collect()
    }
}

impl fmt::Display for TaperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaperKind::Hamming => "hamming",
            TaperKind::Hann => "hann",
            TaperKind::Rectangular => "rectangular",
        })
    }
}

impl FromStr for TaperKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(TaperKind::Hamming),
            "hann" | "hanning" => Ok(TaperKind::Hann),
            "rectangular" | "rect" | "none" => Ok(TaperKind::Rectangular),
            other => Err(Error::InvalidParameter(format!(
                "unknown taper '{other}' (expected hamming, hann or rectangular)"
            ))),
        }
    }
}

/// Multiplies `window` element-wise by the taper coefficients.
pub fn taper(window: &[f64], kind: TaperKind) -> Result<Vec<f64>> {
    if window.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(window
        .iter()
        .zip(kind.coefficients(window.len()))
        .map(|(x, c)| x * c)
        .collect())
}

/// One-sided natural-log magnitude spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpectrum {
    pub bins: Vec<f64>,
    pub bin_resolution_hz: f64,
}

/// Log-magnitude of the one-sided FFT of `window`, DC bin included.
///
/// The window is used as given; apply [`taper`] first if needed.
pub fn log_magnitude_spectrum(window: &[f64], sample_rate_hz: f64) -> Result<LogSpectrum> {
    if window.len() < 2 {
        return Err(Error::WindowTooShort {
            min: 2,
            got: window.len(),
        });
    }
    let mut est = SpectrumEstimator::new(window.len(), TaperKind::Rectangular, true);
    let mut bins = vec![0.0; est.bin_count()];
    est.log_magnitude(window, &mut bins);
    Ok(LogSpectrum {
        bins,
        bin_resolution_hz: sample_rate_hz / window.len() as f64,
    })
}

/// Reusable tapered FFT for repeatedly transforming windows of one length.
pub struct SpectrumEstimator {
    len: usize,
    coeffs: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
    skip_dc: bool,
}

impl SpectrumEstimator {
    pub fn new(len: usize, taper: TaperKind, include_dc: bool) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            len,
            coeffs: taper.coefficients(len),
            fft,
            buf: vec![Complex::default(); len],
            scratch,
            skip_dc: !include_dc,
        }
    }

    pub fn window_len(&self) -> usize {
        self.len
    }

    /// Number of output bins: `len / 2 + 1`, minus one when DC is excluded.
    pub fn bin_count(&self) -> usize {
        self.len / 2 + 1 - usize::from(self.skip_dc)
    }

    fn transform(&mut self, window: &[f64]) {
        assert_eq!(window.len(), self.len, "window length mismatch");
        for ((b, x), c) in self.buf.iter_mut().zip(window).zip(&self.coeffs) {
            *b = Complex::new(x * c, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
    }

    /// Writes the floored natural-log magnitudes into `out`.
    pub fn log_magnitude(&mut self, window: &[f64], out: &mut [f64]) {
        self.transform(window);
        let first = usize::from(self.skip_dc);
        for (o, c) in out.iter_mut().zip(&self.buf[first..=self.len / 2]) {
            *o = c.norm().max(MAGNITUDE_FLOOR).ln();
        }
    }

    /// Writes the squared magnitudes of all one-sided bins (DC included) into `out`.
    pub fn power(&mut self, window: &[f64], out: &mut [f64]) {
        self.transform(window);
        for (o, c) in out.iter_mut().zip(&self.buf[..=self.len / 2]) {
            *o = c.norm_sqr();
        }
    }
}
