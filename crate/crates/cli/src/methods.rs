//! Segmentation methods selectable by name.

use anyhow::{ensure, Result};
use clap::ValueEnum;
use ctxseg_core::baselines::{Nleo, NleoConfig, Sps, SpsConfig, Varri, VarriConfig, DEFAULT_SPS_BANDS};
use ctxseg_core::strategies::{fixed_slices, FixedSlicing};
use ctxseg_core::{BoundarySet, Ctxseg, CtxsegConfig, Segmentation, Segmenter, TaperKind, TimeSeries};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Ctxseg,
    Varri,
    Nleo,
    Sps,
    Fixed,
}

impl MethodName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ctxseg => "ctxseg",
            Self::Varri => "varri",
            Self::Nleo => "nleo",
            Self::Sps => "sps",
            Self::Fixed => "fixed",
        }
    }
}

/// A method and its parameters, with window lengths in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodSpec {
    pub method: MethodName,
    /// Row label in reports; defaults to the method name and alpha.
    pub label: Option<String>,
    pub window_s: f64,
    pub stride: usize,
    pub alpha: f64,
    pub taper: TaperKind,
    pub include_dc: bool,
    pub slide_by_stride: bool,
    pub k_a: f64,
    pub k_f: f64,
    pub threshold_window_s: f64,
    pub extrema_window_s: f64,
    pub bands_hz: Vec<(f64, f64)>,
    pub sps_jump: bool,
    pub overlap: f64,
}

impl Default for MethodSpec {
    fn default() -> Self {
        Self {
            method: MethodName::Ctxseg,
            label: None,
            window_s: 0.5,
            stride: 1,
            alpha: 0.05,
            taper: TaperKind::Hamming,
            include_dc: true,
            slide_by_stride: false,
            k_a: 1.0,
            k_f: 7.0,
            threshold_window_s: 8.0,
            extrema_window_s: 0.1,
            bands_hz: DEFAULT_SPS_BANDS.to_vec(),
            sps_jump: false,
            overlap: 0.0,
        }
    }
}

impl MethodSpec {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| match self.method {
            MethodName::Ctxseg | MethodName::Sps => format!("{} {}", self.method.as_str(), self.alpha),
            m => m.as_str().to_string(),
        })
    }

    pub fn window_samples(&self, sample_rate_hz: f64) -> Result<usize> {
        ensure!(self.window_s > 0.0, "window must be positive, got {} s", self.window_s);
        let w = (self.window_s * sample_rate_hz).round() as usize;
        ensure!(w >= 1, "window of {} s is shorter than one sample", self.window_s);
        Ok(w)
    }

    /// Default near-miss tolerance for similarity: twice the window.
    pub fn default_tolerance(&self, sample_rate_hz: f64) -> Result<usize> {
        Ok(2 * self.window_samples(sample_rate_hz)?)
    }

    pub fn build(&self, sample_rate_hz: f64) -> Result<Box<dyn Segmenter>> {
        let w = self.window_samples(sample_rate_hz)?;
        Ok(match self.method {
            MethodName::Ctxseg => {
                let cfg = CtxsegConfig {
                    window_samples: w,
                    stride_samples: self.stride,
                    alpha: self.alpha,
                    taper: self.taper,
                    include_dc: self.include_dc,
                    slide_by_stride: self.slide_by_stride,
                };
                cfg.validate()?;
                Box::new(Ctxseg(cfg))
            }
            MethodName::Varri => {
                let cfg = VarriConfig {
                    window_samples: w,
                    k_a: self.k_a,
                    k_f: self.k_f,
                    threshold_window_s: self.threshold_window_s,
                    extrema_window_s: self.extrema_window_s,
                };
                cfg.validate()?;
                Box::new(Varri(cfg))
            }
            MethodName::Nleo => {
                let cfg = NleoConfig {
                    window_samples: w,
                    extrema_window_s: self.extrema_window_s,
                };
                cfg.validate()?;
                Box::new(Nleo(cfg))
            }
            MethodName::Sps => {
                let cfg = SpsConfig {
                    window_samples: w,
                    alpha: self.alpha,
                    bands_hz: self.bands_hz.clone(),
                    taper: self.taper,
                    jump_after_boundary: self.sps_jump,
                };
                cfg.validate(sample_rate_hz)?;
                Box::new(Sps(cfg))
            }
            MethodName::Fixed => Box::new(Fixed(FixedSlicing::new(w, self.overlap)?)),
        })
    }
}

/// Fixed-length slicing as a segmenter: every slice start after 0 is a boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed(pub FixedSlicing);

impl Fixed {
    pub fn windows(&self, signal_length: usize) -> Result<Vec<(usize, usize)>> {
        Ok(fixed_slices(signal_length, &self.0)?)
    }
}

impl Segmenter for Fixed {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn segment(&self, signal: &TimeSeries) -> ctxseg_core::Result<Segmentation> {
        let n = signal.len();
        let slices = fixed_slices(n, &self.0)?;
        let starts = slices.iter().map(|s| s.0).filter(|&s| s > 0).collect();
        Ok(Segmentation {
            boundaries: BoundarySet::new(starts, n)?,
            comparisons: 0,
            warning: None,
        })
    }
}

/// Parses `lo-hi,lo-hi,...` band lists.
pub fn parse_bands(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|band| {
            let (lo, hi) = band
                .trim()
                .split_once('-')
                .ok_or_else(|| anyhow::anyhow!("band {band:?} is not of the form lo-hi"))?;
            Ok((lo.trim().parse()?, hi.trim().parse()?))
        })
        .collect()
}
