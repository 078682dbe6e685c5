//! Amplitude and frequency difference measure with an adaptive threshold.
//!
//! For a window, `ADIF = sum |x_i|` over its `w` samples and
//! `FDIF = sum |x_i - x_{i-1}|` over its `w - 1` first differences. The
//! distance at `n` is `G = k_a |ADIF_1 - ADIF_2| + k_f |FDIF_1 - FDIF_2|` for the
//! windows either side of `n`.

use serde::{Deserialize, Serialize};

use super::{extrema_half_width, pick_peaks};
use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::signal::TimeSeries;
use crate::{Segmentation, Segmenter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VarriConfig {
    pub window_samples: usize,
    pub k_a: f64,
    pub k_f: f64,
    /// Block length of the adaptive threshold, in seconds.
    pub threshold_window_s: f64,
    /// Neighbourhood over which a boundary must be the largest maximum, in seconds.
    pub extrema_window_s: f64,
}

impl Default for VarriConfig {
    fn default() -> Self {
        Self {
            window_samples: 128,
            k_a: 1.0,
            k_f: 7.0,
            threshold_window_s: 8.0,
            extrema_window_s: 0.1,
        }
    }
}

impl VarriConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_samples < 2 {
            return Err(Error::WindowTooShort {
                min: 2,
                got: self.window_samples,
            });
        }
        let positive = [
            self.k_a,
            self.k_f,
            self.threshold_window_s,
            self.extrema_window_s,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter(
                "Varri coefficients and windows must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn prefix(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// Distance `G[n]` for every `n`; positions without two full windows hold 0.
pub fn varri_distance(x: &[f64], w: usize, k_a: f64, k_f: f64) -> Result<Vec<f64>> {
    if w < 2 {
        return Err(Error::WindowTooShort { min: 2, got: w });
    }
    if x.len() < 2 * w {
        return Err(Error::SignalTooShort {
            needed: 2 * w,
            got: x.len(),
        });
    }
    let n = x.len();
    let amp = prefix(x.iter().map(|v| v.abs()));
    // diff[i] = |x[i] - x[i-1]| for i >= 1, so a window [a, b) owns diff[a+1..b)
    let diff = prefix(
        std::iter::once(0.0).chain(x.windows(2).map(|p| (p[1] - p[0]).abs())),
    );
    let adif = |a: usize| amp[a + w] - amp[a];
    let fdif = |a: usize| diff[a + w] - diff[a + 1];
    let mut g = vec![0.0; n];
    for (c, gc) in g.iter_mut().enumerate().take(n - w + 1).skip(w) {
        let (l, r) = (c - w, c);
        *gc = k_a * (adif(l) - adif(r)).abs() + k_f * (fdif(l) - fdif(r)).abs();
    }
    Ok(g)
}

/// Per-sample threshold `(k_a * ADIF + k_f * FDIF) / BL` over consecutive
/// blocks of `block` samples (the last block may be shorter).
pub fn varri_threshold(x: &[f64], block: usize, k_a: f64, k_f: f64) -> Vec<f64> {
    let mut thr = Vec::with_capacity(x.len());
    for chunk in x.chunks(block.max(1)) {
        let a: f64 = chunk.iter().map(|v| v.abs()).sum();
        let f: f64 = chunk.windows(2).map(|p| (p[1] - p[0]).abs()).sum();
        let t = (k_a * a + k_f * f) / chunk.len() as f64;
        thr.extend(std::iter::repeat_n(t, chunk.len()));
    }
    thr
}

pub fn varri_segment(signal: &TimeSeries, config: &VarriConfig) -> Result<Segmentation> {
    config.validate()?;
    let x = signal.samples();
    let fs = signal.sample_rate_hz();
    let g = varri_distance(x, config.window_samples, config.k_a, config.k_f)?;
    let block = (config.threshold_window_s * fs).round() as usize;
    let thr = varri_threshold(x, block, config.k_a, config.k_f);
    let peaks = pick_peaks(&g, Some(&thr), extrema_half_width(config.extrema_window_s, fs));
    Ok(Segmentation {
        boundaries: BoundarySet::new(peaks, x.len())?,
        comparisons: x.len() + 1 - 2 * config.window_samples,
        warning: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Varri(pub VarriConfig);

impl Segmenter for Varri {
    fn name(&self) -> &'static str {
        "varri"
    }

    fn segment(&self, signal: &TimeSeries) -> Result<Segmentation> {
        varri_segment(signal, &self.0)
    }
}
