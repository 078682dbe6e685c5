//! Turning segmentations into fixed-length windows, and combining channels.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};

/// Fixed-length windows with a given fractional overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedSlicing {
    pub window_samples: usize,
    pub overlap_fraction: f64,
}

impl FixedSlicing {
    pub fn new(window_samples: usize, overlap_fraction: f64) -> Result<Self> {
        let s = Self {
            window_samples,
            overlap_fraction,
        };
        s.stride()?;
        Ok(s)
    }

    /// `round(window * (1 - overlap))`, which must be at least one sample.
    pub fn stride(&self) -> Result<usize> {
        if self.window_samples == 0 {
            return Err(Error::WindowTooShort { min: 1, got: 0 });
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::InvalidParameter(format!(
                "overlap must lie in [0, 1), got {}",
                self.overlap_fraction
            )));
        }
        let stride = (self.window_samples as f64 * (1.0 - self.overlap_fraction)).round() as usize;
        if stride == 0 {
            return Err(Error::InvalidParameter(
                "overlap leaves a stride below one sample".into(),
            ));
        }
        Ok(stride)
    }
}

/// Full windows `[start, start + w)` from 0 in steps of the stride.
///
/// A window longer than the signal gives no slices and a logged warning.
pub fn fixed_slices(signal_length: usize, slicing: &FixedSlicing) -> Result<Vec<(usize, usize)>> {
    let stride = slicing.stride()?;
    let w = slicing.window_samples;
    if w > signal_length {
        log::warn!("window of {w} samples exceeds signal of {signal_length}; no slices");
        return Ok(Vec::new());
    }
    Ok((0..=signal_length - w)
        .step_by(stride)
        .map(|s| (s, s + w))
        .collect())
}

/// Which fixed-length window represents a variable-length segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ExtractionStrategy {
    /// The segment's first window.
    VariableFirst,
    /// A uniformly placed window, reproducible from the seed.
    VariableRandom { seed: u64 },
}

impl fmt::Display for ExtractionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VariableFirst => f.write_str("vf"),
            Self::VariableRandom { .. } => f.write_str("vr"),
        }
    }
}

impl FromStr for ExtractionStrategy {
    type Err = Error;

    /// Parses `vf` or `vr`; the random variant starts with seed 0.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vf" => Ok(Self::VariableFirst),
            "vr" => Ok(Self::VariableRandom { seed: 0 }),
            other => Err(Error::InvalidParameter(format!(
                "unknown extraction strategy {other:?}; expected vf or vr"
            ))),
        }
    }
}

/// One window of length `w` per segment. Segments shorter than `w` are dropped
/// with a warning.
pub fn extract_representative(
    segments: &[(usize, usize)],
    w: usize,
    strategy: ExtractionStrategy,
) -> Vec<(usize, usize)> {
    let mut rng = match strategy {
        ExtractionStrategy::VariableRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        ExtractionStrategy::VariableFirst => None,
    };
    let mut dropped = 0;
    let out = segments
        .iter()
        .filter_map(|&(start, end)| {
            if end < start + w {
                dropped += 1;
                return None;
            }
            let s = match rng.as_mut() {
                Some(r) => r.random_range(start..=end - w),
                None => start,
            };
            Some((s, s + w))
        })
        .collect();
    if dropped > 0 {
        log::warn!("dropped {dropped} segment(s) shorter than {w} samples");
    }
    out
}

/// Boundaries confirmed by at least `min_channels` channels.
///
/// All boundaries are pooled and sorted; neighbours at most `tolerance_samples`
/// apart join one cluster. A cluster survives when it holds boundaries from
/// `min_channels` distinct channels and is represented by its earliest position.
/// Scanning left to right, any survivor closer than `min_segment` to the last
/// kept boundary is then dropped.
pub fn multichannel_vote(
    per_channel: &[BoundarySet],
    min_channels: usize,
    tolerance_samples: usize,
    min_segment: usize,
) -> Result<BoundarySet> {
    let first = per_channel.first().ok_or(Error::EmptyInput)?;
    let n = first.signal_length();
    if per_channel.iter().any(|b| b.signal_length() != n) {
        return Err(Error::LengthMismatch(
            "channels have different signal lengths".into(),
        ));
    }
    if min_channels == 0 {
        return Err(Error::InvalidParameter("min_channels must be at least 1".into()));
    }

    let mut pooled: Vec<(usize, usize)> = per_channel
        .iter()
        .enumerate()
        .flat_map(|(c, b)| b.positions().iter().map(move |&p| (p, c)))
        .collect();
    pooled.sort_unstable();

    let mut voted = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 - pooled[j - 1].0 <= tolerance_samples {
            j += 1;
        }
        let mut channels: Vec<usize> = pooled[i..j].iter().map(|&(_, c)| c).collect();
        channels.sort_unstable();
        channels.dedup();
        if channels.len() >= min_channels {
            voted.push(pooled[i].0);
        }
        i = j;
    }

    let mut kept: Vec<usize> = Vec::with_capacity(voted.len());
    for b in voted {
        if kept.last().is_none_or(|&last| b - last >= min_segment) {
            kept.push(b);
        }
    }
    BoundarySet::new(kept, n)
}
