//! Adaptive segmentation of sampled signals.
//!
//! The centrepiece is [`ctxseg`], which splits a signal wherever the log
//! spectrum of a sliding test window becomes significantly different from a
//! fixed reference window. Around it sit a spiking-neuron signal generator
//! with known ground truth ([`ctxgen`]), classic synthetic signals
//! ([`synth`]), three contiguous-window baseline segmenters ([`baselines`]),
//! boundary metrics ([`metrics`]) and helpers for turning variable-length
//! segments into fixed-length windows ([`strategies`]).

pub mod baselines;
pub mod boundary;
pub mod ctxgen;
pub mod ctxseg;
pub mod error;
pub mod metrics;
pub mod signal;
pub mod stats;
pub mod strategies;
pub mod synth;

pub use boundary::{segments_from_boundaries, BoundarySet, GroundTruth};
pub use ctxgen::{ContextSchedule, GeneratedSignal, GeneratorConfig, LifParams};
pub use ctxseg::{ctxseg_segment, Ctxseg, CtxsegConfig};
pub use error::{Error, Result};
pub use metrics::EvaluationReport;
pub use signal::{MultiChannelSeries, TaperKind, TimeSeries, WindowView};

/// Boundaries found on one channel plus run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub boundaries: BoundarySet,
    /// Number of window comparisons performed.
    pub comparisons: usize,
    /// Set when the input was too short to segment.
    pub warning: Option<String>,
}

impl Segmentation {
    pub(crate) fn short(signal_length: usize, warning: String) -> Self {
        Self {
            boundaries: BoundarySet::empty(signal_length),
            comparisons: 0,
            warning: Some(warning),
        }
    }
}

/// A single-channel boundary detector.
pub trait Segmenter: Send + Sync {
    fn name(&self) -> &'static str;

    fn segment(&self, signal: &TimeSeries) -> Result<Segmentation>;
}
