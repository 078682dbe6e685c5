//! Boundary sets and the segments they induce.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing sample indices in `(0, signal_length)` marking segment starts.
///
/// `p_values` is either empty or holds one diagnostic value per position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoundarySet")]
pub struct BoundarySet {
    signal_length: usize,
    positions: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    p_values: Vec<f64>,
}

/// Ground-truth boundaries share the boundary-set representation.
pub type GroundTruth = BoundarySet;

#[derive(Deserialize)]
struct RawBoundarySet {
    signal_length: usize,
    positions: Vec<usize>,
    #[serde(default)]
    p_values: Vec<f64>,
}

impl TryFrom<RawBoundarySet> for BoundarySet {
    type Error = Error;

    fn try_from(raw: RawBoundarySet) -> Result<Self> {
        BoundarySet::with_p_values(raw.positions, raw.p_values, raw.signal_length)
    }
}

impl BoundarySet {
    pub fn new(positions: Vec<usize>, signal_length: usize) -> Result<Self> {
        Self::with_p_values(positions, Vec::new(), signal_length)
    }

    pub fn with_p_values(
        positions: Vec<usize>,
        p_values: Vec<f64>,
        signal_length: usize,
    ) -> Result<Self> {
        if !p_values.is_empty() && p_values.len() != positions.len() {
            return Err(Error::InvalidBoundaries(format!(
                "{} positions but {} p-values",
                positions.len(),
                p_values.len()
            )));
        }
        if let Some(&p) = positions.iter().find(|&&p| p == 0 || p >= signal_length) {
            return Err(Error::InvalidBoundaries(format!(
                "position {p} outside (0, {signal_length})"
            )));
        }
        if let Some(w) = positions.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBoundaries(format!(
                "positions not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self {
            signal_length,
            positions,
            p_values,
        })
    }

    /// Sorts, deduplicates and drops out-of-range positions.
    pub fn from_unsorted(mut positions: Vec<usize>, signal_length: usize) -> Self {
        positions.retain(|&p| p > 0 && p < signal_length);
        positions.sort_unstable();
        positions.dedup();
        Self {
            signal_length,
            positions,
            p_values: Vec::new(),
        }
    }

    pub fn empty(signal_length: usize) -> Self {
        Self {
            signal_length,
            positions: Vec::new(),
            p_values: Vec::new(),
        }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn signal_length(&self) -> usize {
        self.signal_length
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Half-open segments partitioning `[0, signal_length)`.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        segments_from_boundaries(self)
    }
}

/// Splits `[0, signal_length)` at every boundary position.
pub fn segments_from_boundaries(bs: &BoundarySet) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(bs.len() + 1);
    let mut start = 0;
    for &p in bs.positions() {
        out.push((start, p));
        start = p;
    }
    if bs.signal_length() > 0 {
        out.push((start, bs.signal_length()));
    }
    out
}
