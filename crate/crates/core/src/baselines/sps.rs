//! Spectral power sums compared with a two-sample Anderson–Darling test.
//!
//! Each window is tapered and transformed, its power is summed within every
//! band (a bin at frequency `f` belongs to `(lo, hi]`), and the band powers of
//! the left and right windows are treated as two samples.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::signal::{SpectrumEstimator, TaperKind, TimeSeries};
use crate::stats::anderson_darling_2sample;
use crate::{Segmentation, Segmenter};

/// Default band edges in Hz.
pub const DEFAULT_SPS_BANDS: [(f64, f64); 9] = [
    (0.5, 2.0),
    (2.0, 4.0),
    (4.0, 6.0),
    (6.0, 8.0),
    (8.0, 10.0),
    (10.0, 13.0),
    (13.0, 20.0),
    (20.0, 30.0),
    (30.0, 35.0),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpsConfig {
    pub window_samples: usize,
    pub alpha: f64,
    pub bands_hz: Vec<(f64, f64)>,
    pub taper: TaperKind,
    /// After a boundary at `n`, move both windows so the left one starts at `n`.
    pub jump_after_boundary: bool,
}

impl Default for SpsConfig {
    fn default() -> Self {
        Self {
            window_samples: 128,
            alpha: 0.05,
            bands_hz: DEFAULT_SPS_BANDS.to_vec(),
            taper: TaperKind::Hamming,
            jump_after_boundary: false,
        }
    }
}

impl SpsConfig {
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.window_samples < 2 {
            return Err(Error::WindowTooShort {
                min: 2,
                got: self.window_samples,
            });
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.bands_hz.len() < 2 {
            return Err(Error::InvalidParameter("SPS needs at least two bands".into()));
        }
        let nyquist = sample_rate_hz / 2.0;
        let mut prev_hi = 0.0;
        for &(lo, hi) in &self.bands_hz {
            if !(lo >= prev_hi && lo < hi && hi <= nyquist) {
                return Err(Error::InvalidParameter(format!(
                    "band ({lo}, {hi}) must be ascending, non-overlapping and within (0, {nyquist}]"
                )));
            }
            prev_hi = hi;
        }
        Ok(())
    }
}

/// Band powers of every window start `0..=len - w`, row-major.
pub fn band_powers(
    x: &[f64],
    w: usize,
    bands_hz: &[(f64, f64)],
    taper: TaperKind,
    sample_rate_hz: f64,
) -> Vec<Vec<f64>> {
    let mut est = SpectrumEstimator::new(w, taper, true);
    let mut power = vec![0.0; w / 2 + 1];
    let resolution = sample_rate_hz / w as f64;
    let membership: Vec<Option<usize>> = (0..power.len())
        .map(|k| {
            let f = k as f64 * resolution;
            bands_hz.iter().position(|&(lo, hi)| f > lo && f <= hi)
        })
        .collect();
    (0..=x.len() - w)
        .map(|start| {
            est.power(&x[start..start + w], &mut power);
            let mut row = vec![0.0; bands_hz.len()];
            for (p, m) in power.iter().zip(&membership) {
                if let Some(b) = m {
                    row[*b] += p;
                }
            }
            row
        })
        .collect()
}

pub fn sps_segment(signal: &TimeSeries, config: &SpsConfig) -> Result<Segmentation> {
    let fs = signal.sample_rate_hz();
    config.validate(fs)?;
    let x = signal.samples();
    let w = config.window_samples;
    if x.len() < 2 * w {
        return Err(Error::SignalTooShort {
            needed: 2 * w,
            got: x.len(),
        });
    }
    let rows = band_powers(x, w, &config.bands_hz, config.taper, fs);
    let mut positions = Vec::new();
    let mut p_values = Vec::new();
    let mut comparisons = 0;
    let mut n = w;
    // the boundary at n must be an interior sample, so n < len
    let last = (x.len() - w).min(x.len() - 1);
    while n <= last {
        let p = anderson_darling_2sample(&rows[n - w], &rows[n])?.p_value;
        comparisons += 1;
        if p < config.alpha {
            positions.push(n);
            p_values.push(p);
            if config.jump_after_boundary {
                n += w;
                continue;
            }
        }
        n += 1;
    }
    Ok(Segmentation {
        boundaries: BoundarySet::with_p_values(positions, p_values, x.len())?,
        comparisons,
        warning: None,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sps(pub SpsConfig);

impl Segmenter for Sps {
    fn name(&self) -> &'static str {
        "sps"
    }

    fn segment(&self, signal: &TimeSeries) -> Result<Segmentation> {
        sps_segment(signal, &self.0)
    }
}
