//! Context segmentation: a fixed reference window, a sliding test window and a
//! paired t-test on their log-magnitude spectra.
//!
//! ```text
//! r <- 0, t <- s
//! while t < N - w:
//!     p <- ttest(log|F(x[r, r+w))|, log|F(x[t, t+w))|)
//!     if p < alpha: boundary at b = t + w; r <- b + 1; t <- r + s
//!     else:         t <- t + 1
//! ```
//!
//! Each boundary re-anchors the reference window past the test window, so
//! consecutive boundaries are at least `w + 1` samples apart and the whole pass
//! makes at most one comparison per sample.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::signal::{MultiChannelSeries, SpectrumEstimator, TaperKind, TimeSeries};
use crate::stats::paired_t_test;
use crate::{Segmentation, Segmenter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CtxsegConfig {
    pub window_samples: usize,
    pub stride_samples: usize,
    pub alpha: f64,
    pub taper: TaperKind,
    /// Include the DC bin in the compared spectra.
    pub include_dc: bool,
    /// Advance the test window by the stride instead of one sample on a non-rejection.
    pub slide_by_stride: bool,
}

impl Default for CtxsegConfig {
    fn default() -> Self {
        Self {
            window_samples: 128,
            stride_samples: 1,
            alpha: 0.05,
            taper: TaperKind::Hamming,
            include_dc: true,
            slide_by_stride: false,
        }
    }
}

impl CtxsegConfig {
    pub fn new(window_samples: usize, stride_samples: usize, alpha: f64) -> Self {
        Self {
            window_samples,
            stride_samples,
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_samples < 2 {
            return Err(Error::WindowTooShort {
                min: 2,
                got: self.window_samples,
            });
        }
        if self.stride_samples == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !self.include_dc && self.window_samples < 4 {
            return Err(Error::WindowTooShort {
                min: 4,
                got: self.window_samples,
            });
        }
        Ok(())
    }
}

/// Runs the context segmenter over one channel.
///
/// Signals shorter than `window + stride` produce an empty boundary set with a
/// warning rather than an error.
pub fn ctxseg_segment(signal: &TimeSeries, config: &CtxsegConfig) -> Result<Segmentation> {
    config.validate()?;
    let x = signal.samples();
    let n = x.len();
    let w = config.window_samples;
    let s = config.stride_samples;
    if n < w + s {
        let msg = format!("signal of {n} samples is shorter than window + stride ({})", w + s);
        log::warn!("{msg}");
        return Ok(Segmentation::short(n, msg));
    }

    let mut est = SpectrumEstimator::new(w, config.taper, config.include_dc);
    let bins = est.bin_count();
    let mut reference = vec![0.0; bins];
    let mut test = vec![0.0; bins];

    let mut positions = Vec::new();
    let mut p_values = Vec::new();
    let mut comparisons = 0usize;

    let mut r = 0usize;
    let mut t = s;
    let mut reference_at = usize::MAX;
    while t + w < n {
        if reference_at != r {
            est.log_magnitude(&x[r..r + w], &mut reference);
            reference_at = r;
        }
        est.log_magnitude(&x[t..t + w], &mut test);
        let p = paired_t_test(&reference, &test)?.p_value;
        comparisons += 1;
        if p < config.alpha {
            let b = t + w;
            if b >= n {
                break;
            }
            positions.push(b);
            p_values.push(p);
            r = b + 1;
            t = r + s;
        } else if config.slide_by_stride {
            t += s;
        } else {
            t += 1;
        }
    }

    Ok(Segmentation {
        boundaries: BoundarySet::with_p_values(positions, p_values, n)?,
        comparisons,
        warning: None,
    })
}

/// Segments every channel independently, in parallel.
pub fn ctxseg_channels(
    series: &MultiChannelSeries,
    config: &CtxsegConfig,
) -> Result<Vec<Segmentation>> {
    series
        .channels()
        .par_iter()
        .map(|ch| ctxseg_segment(ch, config))
        .collect()
}

/// [`Segmenter`] wrapper around [`ctxseg_segment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ctxseg(pub CtxsegConfig);

impl Segmenter for Ctxseg {
    fn name(&self) -> &'static str {
        "ctxseg"
    }

    fn segment(&self, signal: &TimeSeries) -> Result<Segmentation> {
        ctxseg_segment(signal, &self.0)
    }
}
