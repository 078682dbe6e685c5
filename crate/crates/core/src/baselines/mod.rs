//! Two-contiguous-window baseline segmenters.
//!
//! All three slide a pair of abutting windows `[n - w, n)` and `[n, n + w)`
//! over the signal and score the candidate boundary `n`:
//!
//! * [`varri`] combines amplitude and first-difference sums, then keeps local
//!   maxima above a block-adaptive threshold.
//! * [`nleo`] compares non-linear energy sums and keeps local maxima.
//! * [`sps`] compares nine band powers with a two-sample Anderson–Darling test.

pub mod nleo;
pub mod sps;
pub mod varri;

pub use nleo::{nleo_distance, nleo_energy, nleo_segment, Nleo, NleoConfig};
pub use sps::{band_powers, sps_segment, Sps, SpsConfig, DEFAULT_SPS_BANDS};
pub use varri::{varri_distance, varri_segment, varri_threshold, Varri, VarriConfig};

/// Local maxima of `g` that are not dominated by a larger peak nearby.
///
/// A candidate is a strict rise followed by a non-rise (`g[n-1] < g[n] >= g[n+1]`)
/// with `g[n] > 0` and, if given, `g[n] > threshold[n]`. Candidates are then
/// visited from tallest to shortest (earlier first on ties) and kept only when
/// no already-kept peak lies within `min_distance` samples.
pub fn pick_peaks(g: &[f64], threshold: Option<&[f64]>, min_distance: usize) -> Vec<usize> {
    let n = g.len();
    if n < 3 {
        return Vec::new();
    }
    let mut candidates: Vec<usize> = (1..n - 1)
        .filter(|&i| g[i] > g[i - 1] && g[i] >= g[i + 1] && g[i] > 0.0)
        .filter(|&i| threshold.is_none_or(|t| g[i] > t[i]))
        .collect();
    candidates.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));

    let mut blocked = vec![false; n];
    let mut kept = Vec::new();
    for i in candidates {
        if blocked[i] {
            continue;
        }
        kept.push(i);
        let lo = i.saturating_sub(min_distance);
        let hi = (i + min_distance).min(n - 1);
        blocked[lo..=hi].iter_mut().for_each(|b| *b = true);
    }
    kept.sort_unstable();
    kept
}

/// Half of an extrema neighbourhood, in samples.
pub(crate) fn extrema_half_width(extrema_window_s: f64, sample_rate_hz: f64) -> usize {
    (extrema_window_s * sample_rate_hz / 2.0).round() as usize
}
