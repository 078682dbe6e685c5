//! Synthetic signals from a population of leaky integrate-and-fire neurons.
//!
//! Each neuron receives a Bernoulli spike train whose per-sample probability
//! is `rate * dt`, integrates it with an explicit-Euler leak toward `drive`,
//! and resets to zero on reaching threshold. The output is a weighted sum of
//! all membrane potentials (weights drawn once from N(0, 1)) plus a little
//! white noise. Changing the firing rate changes the spectrum of the output,
//! so a piecewise-constant rate schedule yields known boundaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::signal::TimeSeries;

// RNG stream layout under one master seed.
const WEIGHT_STREAM: u64 = 0;
const OUTPUT_NOISE_STREAM: u64 = 1;
const FIRST_NEURON_STREAM: u64 = 2;

// Neurons are summed in fixed-size chunks so the floating-point reduction
// order does not depend on the thread count.
const NEURON_CHUNK: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    pub v_thresh: f64,
    /// Membrane time constant in seconds.
    pub leak_tau: f64,
    /// Constant intrinsic input (current times resistance).
    pub drive: f64,
    /// Integration step in seconds.
    pub dt: f64,
}

impl LifParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_thresh > 0.0 && self.leak_tau > 0.0 && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "LIF parameters must be positive: v_thresh={}, leak_tau={}, dt={}",
                self.v_thresh, self.leak_tau, self.dt
            )));
        }
        Ok(())
    }
}

/// One piece of a firing-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContextStep {
    pub rate_hz: f64,
    pub duration_s: f64,
}

/// Piecewise-constant firing rates; each step is one ground-truth context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextSchedule {
    pub steps: Vec<ContextStep>,
}

impl ContextSchedule {
    pub fn new(steps: Vec<ContextStep>) -> Self {
        Self { steps }
    }

    /// Equal-duration steps at the given rates.
    pub fn uniform(rates_hz: &[f64], duration_s: f64) -> Self {
        Self::new(
            rates_hz
                .iter()
                .map(|&rate_hz| ContextStep {
                    rate_hz,
                    duration_s,
                })
                .collect(),
        )
    }

    pub fn total_duration_s(&self) -> f64 {
        self.steps.iter().map(|s| s.duration_s).sum()
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::EmptyInput);
        }
        let dt = 1.0 / sample_rate_hz;
        for step in &self.steps {
            if !(step.duration_s > 0.0 && step.duration_s.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "step duration must be positive, got {}",
                    step.duration_s
                )));
            }
            check_rate(step.rate_hz, dt)?;
        }
        let ends = self.step_ends(sample_rate_hz);
        if ends[0] == 0 || ends.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "every schedule step must span at least one sample".into(),
            ));
        }
        Ok(())
    }

    /// Exclusive end sample of each step: `floor(cumulative duration * fs)`.
    pub fn step_ends(&self, sample_rate_hz: f64) -> Vec<usize> {
        let mut cum = 0.0;
        self.steps
            .iter()
            .map(|s| {
                cum += s.duration_s;
                (cum * sample_rate_hz + 1e-9).floor() as usize
            })
            .collect()
    }

    /// Ground-truth boundaries: every step end except the last.
    pub fn boundaries(&self, sample_rate_hz: f64) -> Result<BoundarySet> {
        let ends = self.step_ends(sample_rate_hz);
        let total = *ends.last().ok_or(Error::EmptyInput)?;
        BoundarySet::new(ends[..ends.len() - 1].to_vec(), total)
    }

    /// Per-sample spike probability `rate * dt`.
    fn probabilities(&self, sample_rate_hz: f64) -> Vec<f64> {
        let dt = 1.0 / sample_rate_hz;
        let mut out = Vec::new();
        for (step, end) in self.steps.iter().zip(self.step_ends(sample_rate_hz)) {
            out.resize(end, step.rate_hz * dt);
        }
        out
    }
}

fn check_rate(rate_hz: f64, dt: f64) -> Result<f64> {
    let probability = rate_hz * dt;
    if !(rate_hz >= 0.0) || probability > 1.0 {
        return Err(Error::FiringRateExceedsSampleRate {
            rate_hz,
            dt,
            probability,
        });
    }
    Ok(probability)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub neuron_count: usize,
    pub sample_rate_hz: f64,
    pub v_thresh: f64,
    pub leak_tau_s: f64,
    pub drive: f64,
    /// Mean increment added to the membrane potential by one input spike.
    pub spike_amplitude: f64,
    /// Standard deviation of the per-spike amplitude jitter.
    pub spike_noise_std: f64,
    /// Output noise standard deviation, relative to the clean signal's standard deviation.
    pub output_noise_std: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            neuron_count: 500,
            sample_rate_hz: 256.0,
            v_thresh: 20.0,
            leak_tau_s: 0.05,
            drive: 0.0,
            spike_amplitude: 1.0,
            spike_noise_std: 0.1,
            output_noise_std: 0.01,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn lif(&self) -> LifParams {
        LifParams {
            v_thresh: self.v_thresh,
            leak_tau: self.leak_tau_s,
            drive: self.drive,
            dt: 1.0 / self.sample_rate_hz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.neuron_count == 0 {
            return Err(Error::InvalidParameter("neuron_count must be at least 1".into()));
        }
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidParameter("sample rate must be positive".into()));
        }
        if !(self.spike_noise_std >= 0.0 && self.output_noise_std >= 0.0) {
            return Err(Error::InvalidParameter("noise levels must be non-negative".into()));
        }
        self.lif().validate()
    }

    fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }
}

/// A generated signal with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSignal {
    pub series: TimeSeries,
    pub ground_truth: BoundarySet,
    /// The firing-rate schedule, for signals produced by [`generate`].
    pub schedule: Option<ContextSchedule>,
}

/// Bernoulli spike train with per-sample probability `rate_hz * dt`.
pub fn sample_spike_train<R: Rng + ?Sized>(
    rate_hz: f64,
    n_samples: usize,
    dt: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let p = check_rate(rate_hz, dt)?;
    Ok((0..n_samples).map(|_| rng.random::<f64>() < p).collect())
}

/// Converts a binary spike train into per-sample input increments.
pub fn spike_amplitudes<R: Rng + ?Sized>(
    spikes: &[bool],
    amplitude: f64,
    noise_std: f64,
    rng: &mut R,
) -> Vec<f64> {
    spikes
        .iter()
        .map(|&s| {
            if s {
                amplitude + noise_std * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            }
        })
        .collect()
}

/// Membrane potential of one neuron driven by `input` (increment per sample).
///
/// Per sample: leak `v += dt * (drive - v) / tau`, add the input, then reset to
/// zero if `v >= v_thresh`. The potential starts at zero.
pub fn simulate_lif_lfp(params: &LifParams, input: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    if input.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut state = LifState::new(params);
    Ok(input.iter().map(|&i| state.step(i)).collect())
}

struct LifState {
    v: f64,
    leak: f64,
    drive: f64,
    v_thresh: f64,
}

impl LifState {
    fn new(p: &LifParams) -> Self {
        Self {
            v: 0.0,
            leak: p.dt / p.leak_tau,
            drive: p.drive,
            v_thresh: p.v_thresh,
        }
    }

    #[inline]
    fn step(&mut self, input: f64) -> f64 {
        self.v += self.leak * (self.drive - self.v);
        self.v += input;
        if self.v >= self.v_thresh {
            self.v = 0.0;
        }
        self.v
    }
}

/// Standard-normal weight per neuron.
pub fn draw_weights<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

/// Weighted sum of membrane potentials plus white output noise.
///
/// `output_noise_std` is relative to the standard deviation of the noiseless sum.
pub fn assemble_signal<R: Rng + ?Sized>(
    lfps: &[Vec<f64>],
    weights: &[f64],
    output_noise_std: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let first = lfps.first().ok_or(Error::EmptyInput)?;
    if weights.len() != lfps.len() {
        return Err(Error::LengthMismatch(format!(
            "{} weights for {} potentials",
            weights.len(),
            lfps.len()
        )));
    }
    if lfps.iter().any(|l| l.len() != first.len()) {
        return Err(Error::LengthMismatch("potentials have unequal lengths".into()));
    }
    let mut x = vec![0.0; first.len()];
    for (lfp, &w) in lfps.iter().zip(weights) {
        for (xi, v) in x.iter_mut().zip(lfp) {
            *xi += w * v;
        }
    }
    add_output_noise(&mut x, output_noise_std, rng);
    Ok(x)
}

fn add_output_noise<R: Rng + ?Sized>(x: &mut [f64], relative_std: f64, rng: &mut R) {
    if relative_std <= 0.0 || x.is_empty() {
        return;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        return;
    }
    let noise = Normal::new(0.0, relative_std * sd).expect("finite noise level");
    for xi in x.iter_mut() {
        *xi += noise.sample(rng);
    }
}

/// Generates a signal following `schedule`; a pure function of its arguments.
pub fn generate(schedule: &ContextSchedule, config: &GeneratorConfig) -> Result<GeneratedSignal> {
    config.validate()?;
    schedule.validate(config.sample_rate_hz)?;
    let probabilities = schedule.probabilities(config.sample_rate_hz);
    let n = probabilities.len();
    let lif = config.lif();
    let weights = draw_weights(config.neuron_count, &mut config.stream(WEIGHT_STREAM));

    let chunks: Vec<Vec<f64>> = weights
        .par_chunks(NEURON_CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut partial = vec![0.0; n];
            for (k, &w) in chunk.iter().enumerate() {
                let neuron = (c * NEURON_CHUNK + k) as u64;
                let mut rng = config.stream(FIRST_NEURON_STREAM + neuron);
                let mut state = LifState::new(&lif);
                for (acc, &p) in partial.iter_mut().zip(&probabilities) {
                    let input = if rng.random::<f64>() < p {
                        config.spike_amplitude
                            + config.spike_noise_std * rng.sample::<f64, _>(StandardNormal)
                    } else {
                        0.0
                    };
                    *acc += w * state.step(input);
                }
            }
            partial
        })
        .collect();

    let mut x = vec![0.0; n];
    for partial in &chunks {
        for (xi, v) in x.iter_mut().zip(partial) {
            *xi += v;
        }
    }
    add_output_noise(
        &mut x,
        config.output_noise_std,
        &mut config.stream(OUTPUT_NOISE_STREAM),
    );

    Ok(GeneratedSignal {
        series: TimeSeries::new(x, config.sample_rate_hz)?,
        ground_truth: schedule.boundaries(config.sample_rate_hz)?,
        schedule: Some(schedule.clone()),
    })
}
