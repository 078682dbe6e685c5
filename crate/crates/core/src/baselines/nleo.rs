//! Non-linear energy operator distance.
//!
//! `Q(n) = x[n-1] x[n-2] - x[n] x[n-3]` and the distance at `n` is
//! `|sum_{n-w+1..=n} Q - sum_{n+1..=n+w} Q|`.

use serde::{Deserialize, Serialize};

use super::{extrema_half_width, pick_peaks};
use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::signal::TimeSeries;
use crate::{Segmentation, Segmenter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NleoConfig {
    pub window_samples: usize,
    /// Neighbourhood over which a boundary must be the largest maximum, in seconds.
    pub extrema_window_s: f64,
}

impl Default for NleoConfig {
    fn default() -> Self {
        Self {
            window_samples: 128,
            extrema_window_s: 0.1,
        }
    }
}

impl NleoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_samples == 0 {
            return Err(Error::WindowTooShort { min: 1, got: 0 });
        }
        if !(self.extrema_window_s > 0.0) {
            return Err(Error::InvalidParameter(
                "extrema window must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `Q(n)` for every sample; the first three entries are 0.
pub fn nleo_energy(x: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; x.len()];
    for n in 3..x.len() {
        q[n] = x[n - 1] * x[n - 2] - x[n] * x[n - 3];
    }
    q
}

/// Distance for every `n`; positions without two full windows of `Q` hold 0.
pub fn nleo_distance(x: &[f64], w: usize) -> Result<Vec<f64>> {
    if w == 0 {
        return Err(Error::WindowTooShort { min: 1, got: 0 });
    }
    if x.len() < 2 * w + 3 {
        return Err(Error::SignalTooShort {
            needed: 2 * w + 3,
            got: x.len(),
        });
    }
    let q = nleo_energy(x);
    let mut c = vec![0.0; q.len() + 1];
    for (i, v) in q.iter().enumerate() {
        c[i + 1] = c[i] + v;
    }
    let n = x.len();
    let mut g = vec![0.0; n];
    // the left window must start at index 3, the right must end by n - 1
    for (i, gi) in g.iter_mut().enumerate().take(n - w).skip(w + 2) {
        let left = c[i + 1] - c[i + 1 - w];
        let right = c[i + 1 + w] - c[i + 1];
        *gi = (left - right).abs();
    }
    Ok(g)
}

pub fn nleo_segment(signal: &TimeSeries, config: &NleoConfig) -> Result<Segmentation> {
    config.validate()?;
    let x = signal.samples();
    let g = nleo_distance(x, config.window_samples)?;
    let half = extrema_half_width(config.extrema_window_s, signal.sample_rate_hz());
    let peaks = pick_peaks(&g, None, half);
    Ok(Segmentation {
        boundaries: BoundarySet::new(peaks, x.len())?,
        comparisons: x.len() - 2 * config.window_samples - 2,
        warning: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Nleo(pub NleoConfig);

impl Segmenter for Nleo {
    fn name(&self) -> &'static str {
        "nleo"
    }

    fn segment(&self, signal: &TimeSeries) -> Result<Segmentation> {
        nleo_segment(signal, &self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_by_substitution() {
        let q = nleo_energy(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(q[3], 2.0);
    }

    #[test]
    fn constant_signal() {
        let g = nleo_distance(&[1.7; 64], 8).unwrap();
        assert!(g.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn window_sums() {
        let x: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let q = nleo_energy(&x);
        let g = nleo_distance(&x, 3).unwrap();
        for n in 5..17 {
            let l: f64 = q[n - 2..=n].iter().sum();
            let r: f64 = q[n + 1..=n + 3].iter().sum();
            assert!((g[n] - (l - r).abs()).abs() < 1e-12);
        }
        assert_eq!(g[4], 0.0);
        assert_eq!(g[17], 0.0);
    }

    #[test]
    fn too_short_errors() {
        assert!(nleo_distance(&[0.0; 10], 4).is_err());
    }
}
