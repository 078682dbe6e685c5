//! Classic synthetic signals: a piecewise sum of cosines and switching
//! autoregressive processes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::ctxgen::GeneratedSignal;
use crate::error::{Error, Result};
use crate::signal::TimeSeries;

/// One cosine term `amplitude * cos(multiplier * pi * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineTerm {
    pub amplitude: f64,
    /// Angular frequency in units of pi rad/s.
    pub multiplier: f64,
}

const fn term(amplitude: f64, multiplier: f64) -> CosineTerm {
    CosineTerm {
        amplitude,
        multiplier,
    }
}

/// A concatenation of equal-length segments, each a sum of cosines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicsSpec {
    pub segments: Vec<Vec<CosineTerm>>,
    #[serde(default = "default_segment_duration")]
    pub segment_duration_s: f64,
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: f64,
    /// Restart `t` at zero in every segment instead of running it across the signal.
    #[serde(default)]
    pub reset_time_per_segment: bool,
}

fn default_segment_duration() -> f64 {
    5.0
}

fn default_sample_rate() -> f64 {
    256.0
}

impl HarmonicsSpec {
    /// The seven-segment harmonics benchmark: 5 s per segment at 256 Hz.
    pub fn preset() -> Self {
        Self {
            segments: vec![
                vec![term(0.5, 1.0), term(1.5, 4.0), term(4.0, 5.0)],
                vec![term(0.7, 1.0), term(2.1, 4.0), term(5.6, 5.0)],
                vec![term(1.5, 2.0), term(4.0, 8.0)],
                vec![term(1.5, 1.0), term(4.0, 4.0)],
                vec![term(0.5, 1.0), term(1.7, 2.0), term(3.7, 5.0)],
                vec![term(2.3, 3.0), term(7.8, 8.0)],
                vec![term(0.8, 1.0), term(1.0, 3.0), term(3.0, 5.0)],
            ],
            segment_duration_s: default_segment_duration(),
            sample_rate_hz: default_sample_rate(),
            reset_time_per_segment: false,
        }
    }

    fn segment_samples(&self) -> Result<usize> {
        if !(self.sample_rate_hz > 0.0 && self.segment_duration_s > 0.0) {
            return Err(Error::InvalidParameter(
                "segment duration and sample rate must be positive".into(),
            ));
        }
        let n = (self.segment_duration_s * self.sample_rate_hz).round() as usize;
        if n == 0 {
            return Err(Error::InvalidParameter("segments shorter than one sample".into()));
        }
        Ok(n)
    }
}

/// Evaluates the harmonics signal; ground truth sits at segment joins.
pub fn generate_harmonics(spec: &HarmonicsSpec) -> Result<GeneratedSignal> {
    if spec.segments.is_empty() {
        return Err(Error::EmptyInput);
    }
    let seg_len = spec.segment_samples()?;
    let dt = 1.0 / spec.sample_rate_hz;
    let mut x = Vec::with_capacity(seg_len * spec.segments.len());
    for terms in &spec.segments {
        for k in 0..seg_len {
            let i = if spec.reset_time_per_segment { k } else { x.len() };
            let t = i as f64 * dt;
            x.push(
                terms
                    .iter()
                    .map(|c| c.amplitude * (c.multiplier * PI * t).cos())
                    .sum(),
            );
        }
    }
    let n = x.len();
    let positions = (1..spec.segments.len()).map(|s| s * seg_len).collect();
    Ok(GeneratedSignal {
        series: TimeSeries::new(x, spec.sample_rate_hz)?,
        ground_truth: BoundarySet::new(positions, n)?,
        schedule: None,
    })
}

/// `x_t = mean + sum_i theta_i (x_{t-i} - mean) + e_t`, `e_t ~ N(0, noise_std^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub coefficients: Vec<f64>,
    pub noise_std: f64,
    #[serde(default)]
    pub mean: f64,
}

impl ArModel {
    pub fn new(coefficients: Vec<f64>, noise_std: f64) -> Result<Self> {
        let model = Self {
            coefficients,
            noise_std,
            mean: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients.is_empty() {
            return Err(Error::InvalidParameter("AR order must be at least 1".into()));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise_std must be finite and non-negative, got {}",
                self.noise_std
            )));
        }
        if !is_stable(&self.coefficients) {
            return Err(Error::UnstableArModel(format!(
                "coefficients {:?} have a characteristic root on or outside the unit circle",
                self.coefficients
            )));
        }
        Ok(())
    }
}

/// Schur–Cohn stability test via the step-down (reverse Levinson) recursion:
/// the process is stable iff every reflection coefficient has modulus below one.
pub fn is_stable(coefficients: &[f64]) -> bool {
    let mut a = coefficients.to_vec();
    while let Some(&k) = a.last() {
        if !(k.abs() < 1.0) {
            return false;
        }
        let p = a.len();
        let denom = 1.0 - k * k;
        a = (0..p - 1)
            .map(|i| (a[i] + k * a[p - 2 - i]) / denom)
            .collect();
    }
    true
}

/// Fits an AR model by the Yule–Walker equations (biased autocovariance,
/// Levinson–Durbin recursion).
pub fn fit_ar(exemplar: &TimeSeries, order: usize) -> Result<ArModel> {
    if order == 0 {
        return Err(Error::InvalidParameter("AR order must be at least 1".into()));
    }
    let x = exemplar.samples();
    if x.len() <= 2 * order {
        return Err(Error::SignalTooShort {
            needed: 2 * order + 1,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let acov: Vec<f64> = (0..=order)
        .map(|lag| {
            x[lag..]
                .iter()
                .zip(x)
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n
        })
        .collect();
    if !(acov[0] > 0.0) || !acov[0].is_finite() {
        return Err(Error::UnstableArModel(
            "exemplar has zero variance; autocorrelation is degenerate".into(),
        ));
    }

    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut err = acov[0];
    for m in 1..=order {
        let acc = acov[m] - phi.iter().enumerate().map(|(i, p)| p * acov[m - 1 - i]).sum::<f64>();
        let k = acc / err;
        if !(k.abs() < 1.0) {
            return Err(Error::UnstableArModel(format!(
                "reflection coefficient {k} at lag {m}"
            )));
        }
        let prev = phi.clone();
        for i in 0..m - 1 {
            phi[i] = prev[i] - k * prev[m - 2 - i];
        }
        phi.push(k);
        err *= 1.0 - k * k;
    }

    let model = ArModel {
        coefficients: phi,
        noise_std: err.max(0.0).sqrt(),
        mean,
    };
    model.validate()?;
    Ok(model)
}

/// Concatenates one AR segment per state. Each segment starts from zero history
/// and discards a burn-in of `10 * order` samples.
pub fn generate_ar_sequence(
    models: &BTreeMap<String, ArModel>,
    states: &[String],
    segment_duration_s: f64,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<GeneratedSignal> {
    if states.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(segment_duration_s > 0.0 && sample_rate_hz > 0.0) {
        return Err(Error::InvalidParameter(
            "segment duration and sample rate must be positive".into(),
        ));
    }
    let seg_len = (segment_duration_s * sample_rate_hz).round() as usize;
    if seg_len == 0 {
        return Err(Error::InvalidParameter("segments shorter than one sample".into()));
    }
    let resolved: Vec<&ArModel> = states
        .iter()
        .map(|s| models.get(s).ok_or_else(|| Error::MissingModel(s.clone())))
        .collect::<Result<_>>()?;
    for m in &resolved {
        m.validate()?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(seg_len * states.len());
    for model in resolved {
        let p = model.order();
        let noise = Normal::new(0.0, model.noise_std)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let burn_in = 10 * p;
        // centred history, most recent last
        let mut hist = vec![0.0; p];
        for k in 0..burn_in + seg_len {
            let v: f64 = model
                .coefficients
                .iter()
                .zip(hist.iter().rev())
                .map(|(c, h)| c * h)
                .sum::<f64>()
                + noise.sample(&mut rng);
            hist.rotate_left(1);
            hist[p - 1] = v;
            if k >= burn_in {
                x.push(model.mean + v);
            }
        }
    }
    let n = x.len();
    let positions = (1..states.len()).map(|s| s * seg_len).collect();
    Ok(GeneratedSignal {
        series: TimeSeries::new(x, sample_rate_hz)?,
        ground_truth: BoundarySet::new(positions, n)?,
        schedule: None,
    })
}
