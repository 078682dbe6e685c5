//! Boundary delay, sensitivity and similarity.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySet;
use crate::error::{Error, Result};

/// Per ground-truth boundary: seconds until the first found boundary before the
/// next ground-truth boundary (or the end of the signal), `None` when missed.
pub fn boundary_delay(gt: &BoundarySet, found: &BoundarySet, sample_rate_hz: f64) -> Vec<Option<f64>> {
    let g = gt.positions();
    let f = found.positions();
    g.iter()
        .enumerate()
        .map(|(i, &gi)| {
            let next = g.get(i + 1).copied().unwrap_or(gt.signal_length());
            let k = f.partition_point(|&p| p < gi);
            f.get(k)
                .filter(|&&p| p < next)
                .map(|&p| (p - gi) as f64 / sample_rate_hz)
        })
        .collect()
}

/// Fraction of ground-truth boundaries with a present delay.
pub fn boundary_sensitivity(gt: &BoundarySet, found: &BoundarySet) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::SensitivityUndefined);
    }
    let hits = boundary_delay(gt, found, 1.0)
        .iter()
        .filter(|d| d.is_some())
        .count();
    Ok(hits as f64 / gt.len() as f64)
}

/// Cost of matching two boundaries `d` positions apart (`d <= tolerance`).
pub fn transposition_weight(d: usize, tolerance: usize) -> f64 {
    d as f64 / (tolerance + 1) as f64
}

/// Boundary-edit-distance similarity in `[0, 1]`.
///
/// Boundaries of the two sets may be paired when at most `tolerance` positions
/// apart; a pair costs [`transposition_weight`] (zero for an exact match) and
/// every unpaired boundary costs one addition or deletion. For a pairing with
/// `k` pairs, unpaired count `a` and summed pair cost `t`, the similarity is
/// `1 - (a + t) / (a + k)`. The result is the best value over all pairings;
/// two empty sets score 1.
pub fn boundary_similarity(a: &BoundarySet, b: &BoundarySet, tolerance: usize) -> f64 {
    let x = a.positions();
    let y = b.positions();
    let total = x.len() + y.len();
    if total == 0 {
        return 1.0;
    }
    let min_cost = min_pair_cost_by_count(x, y, tolerance);
    min_cost
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_finite())
        .map(|(k, &t)| {
            let unpaired = (total - 2 * k) as f64;
            1.0 - (unpaired + t) / (unpaired + k as f64)
        })
        .fold(0.0, f64::max)
}

/// `out[k]` is the least summed transposition cost over non-crossing pairings
/// with exactly `k` pairs (infinite if none exists). Uncrossing two pairs never
/// increases their cost or their larger distance, so non-crossing pairings
/// attain the optimum for every `k`.
fn min_pair_cost_by_count(x: &[usize], y: &[usize], tolerance: usize) -> Vec<f64> {
    // iterate over the shorter side in the k dimension
    let kmax = x.len().min(y.len());
    let m = y.len();
    let width = kmax + 1;
    let idx = |j: usize, k: usize| j * width + k;
    let mut prev = vec![f64::INFINITY; (m + 1) * width];
    for j in 0..=m {
        prev[idx(j, 0)] = 0.0;
    }
    let mut cur = prev.clone();
    for &xi in x {
        cur[idx(0, 0)] = 0.0;
        for k in 1..width {
            cur[idx(0, k)] = f64::INFINITY;
        }
        for (j1, &yj) in y.iter().enumerate() {
            let j = j1 + 1;
            let d = xi.abs_diff(yj);
            for k in 0..width {
                let mut best = prev[idx(j, k)].min(cur[idx(j - 1, k)]);
                if k > 0 && d <= tolerance {
                    best = best.min(prev[idx(j - 1, k - 1)] + transposition_weight(d, tolerance));
                }
                cur[idx(j, k)] = best;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (0..width).map(|k| prev[idx(m, k)]).collect()
}

/// One row of evaluation results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub boundary_count: f64,
    pub mean_delay_s: f64,
    pub sensitivity: f64,
    pub similarity: f64,
}

/// Mean delay where every missed boundary that is never followed by a
/// discovery contributes its distance to the end of the signal.
///
/// Missed boundaries that do see a later discovery (credited to a later
/// ground-truth boundary) are left out.
pub fn mean_delay(gt: &BoundarySet, found: &BoundarySet, sample_rate_hz: f64) -> Result<f64> {
    if gt.is_empty() {
        return Err(Error::SensitivityUndefined);
    }
    let last_found = found.positions().last().copied();
    let delays = boundary_delay(gt, found, sample_rate_hz);
    let values: Vec<f64> = gt
        .positions()
        .iter()
        .zip(delays)
        .filter_map(|(&g, d)| match d {
            Some(v) => Some(v),
            None if last_found.is_none_or(|f| f < g) => {
                Some((gt.signal_length() - g) as f64 / sample_rate_hz)
            }
            None => None,
        })
        .collect();
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

pub fn evaluate(
    gt: &BoundarySet,
    found: &BoundarySet,
    sample_rate_hz: f64,
    tolerance_units: usize,
) -> Result<EvaluationReport> {
    if gt.signal_length() != found.signal_length() {
        return Err(Error::LengthMismatch(format!(
            "ground truth covers {} samples, found boundaries {}",
            gt.signal_length(),
            found.signal_length()
        )));
    }
    Ok(EvaluationReport {
        boundary_count: found.len() as f64,
        mean_delay_s: mean_delay(gt, found, sample_rate_hz)?,
        sensitivity: boundary_sensitivity(gt, found)?,
        similarity: boundary_similarity(gt, found, tolerance_units),
    })
}

/// Mean and sample variance of each report field across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub trials: usize,
    pub mean: EvaluationReport,
    pub variance: EvaluationReport,
}

impl EnsembleReport {
    /// Aggregates in the given order, so equal inputs give bit-identical output.
    pub fn from_reports(reports: &[EvaluationReport]) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::EmptyInput);
        }
        let field = |f: fn(&EvaluationReport) -> f64| {
            let n = reports.len() as f64;
            let mean = reports.iter().map(f).sum::<f64>() / n;
            let var = if reports.len() > 1 {
                reports.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (mean, var)
        };
        let (c, cv) = field(|r| r.boundary_count);
        let (d, dv) = field(|r| r.mean_delay_s);
        let (s, sv) = field(|r| r.sensitivity);
        let (m, mv) = field(|r| r.similarity);
        Ok(Self {
            trials: reports.len(),
            mean: EvaluationReport {
                boundary_count: c,
                mean_delay_s: d,
                sensitivity: s,
                similarity: m,
            },
            variance: EvaluationReport {
                boundary_count: cv,
                mean_delay_s: dv,
                sensitivity: sv,
                similarity: mv,
            },
        })
    }
}
