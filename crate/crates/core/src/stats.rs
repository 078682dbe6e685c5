//! Two-sample hypothesis tests used as window distance measures.

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Outcome of a paired t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTTest {
    /// Infinite when the differences are a nonzero constant, NaN when all zero.
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Two-sided paired-samples t-test.
///
/// Identical inputs give `p = 1`; a nonzero constant difference (zero variance)
/// gives `p = 0`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidPairing(format!(
            "samples have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidPairing(format!(
            "need at least 2 pairs, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = a.iter().zip(b).map(|(x, y)| y - x).sum::<f64>() / nf;
    let ss = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let d = y - x - mean;
            d * d
        })
        .sum::<f64>();
    let df = n - 1;

    if ss == 0.0 {
        return Ok(if mean == 0.0 {
            PairedTTest {
                statistic: f64::NAN,
                df,
                p_value: 1.0,
            }
        } else {
            PairedTTest {
                statistic: mean.signum() * f64::INFINITY,
                df,
                p_value: 0.0,
            }
        });
    }

    let se = (ss / (df as f64) / nf).sqrt();
    let t = mean / se;
    Ok(PairedTTest {
        statistic: t,
        df,
        p_value: student_t_two_sided(t, df as f64),
    })
}

/// Two-sided tail probability `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Student's t cumulative distribution function.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df)
        .expect("positive degrees of freedom")
        .cdf(t)
}

/// Outcome of the two-sample Anderson–Darling test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndersonDarling {
    /// Scholz–Stephens `A²_kN` statistic (k = 2).
    pub statistic: f64,
    /// `(A² − 1) / σ_N`, the statistic standardised with its finite-sample variance.
    pub standardized: f64,
    pub p_value: f64,
}

// Asymptotic variance of A² for one degree of freedom: 2(π² − 9)/3.
fn asymptotic_sd() -> f64 {
    (2.0 * (PI * PI - 9.0) / 3.0).sqrt()
}

/// Above this many label splits the p-value falls back to the asymptotic law.
pub const AD_EXACT_SPLIT_LIMIT: u64 = 20_000;

/// Two-sample Anderson–Darling test (Scholz & Stephens, ties allowed).
///
/// When the pooled sample admits at most [`AD_EXACT_SPLIT_LIMIT`] ways of
/// choosing which observations belong to `a`, the p-value is the exact
/// permutation probability `P(A² >= observed)` over all those splits.
/// Otherwise it maps the standardised statistic onto the limiting A² law
/// (mean 1, variance 2(π²−9)/3) and evaluates Marsaglia's approximation of
/// its distribution function. With fewer than four pooled observations the
/// variance is undefined and `standardized` is NaN.
pub fn anderson_darling_2sample(a: &[f64], b: &[f64]) -> Result<AndersonDarling> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidParameter("NaN in Anderson-Darling sample".into()));
    }
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let statistic = ad_statistic_sorted(&values, &labels);

    let n_total = values.len();
    let standardized = if n_total >= 4 {
        (statistic - 1.0) / ad_variance(&[a.len(), b.len()]).sqrt()
    } else {
        f64::NAN
    };
    let p_value = if binomial(n_total as u64, a.len() as u64) <= AD_EXACT_SPLIT_LIMIT {
        ad_exact_p(&values, a.len(), statistic)
    } else {
        let z = 1.0 + standardized * asymptotic_sd();
        (1.0 - ad_asymptotic_cdf(z)).clamp(0.0, 1.0)
    };
    Ok(AndersonDarling {
        statistic,
        standardized,
        p_value,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Share of all `C(N, n_a)` label splits of the sorted pooled values whose
/// statistic reaches `observed`.
fn ad_exact_p(values: &[f64], n_a: usize, observed: f64) -> f64 {
    let n = values.len();
    let threshold = observed - 1e-9 * observed.abs().max(1.0);
    let mut labels = vec![false; n];
    let (mut hits, mut total) = (0u64, 0u64);
    // Gosper's hack over n-bit masks with n_a bits set
    let mut mask: u64 = (1u64 << n_a) - 1;
    let limit = 1u64 << n;
    while mask < limit {
        for (i, l) in labels.iter_mut().enumerate() {
            *l = mask >> i & 1 == 1;
        }
        if ad_statistic_sorted(values, &labels) >= threshold {
            hits += 1;
        }
        total += 1;
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    hits as f64 / total as f64
}

/// `A²_kN` for two samples given the sorted pooled values and, for each, whether
/// it came from the first sample. Uses right-continuous empirical CDFs over the
/// distinct pooled values.
fn ad_statistic_sorted(values: &[f64], in_a: &[bool]) -> f64 {
    let n = values.len() as f64;
    let na_count = in_a.iter().filter(|&&x| x).count();
    let (na, nb) = (na_count as f64, (values.len() - na_count) as f64);
    let (mut ma, mut ip) = (0usize, 0usize);
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    while ip < values.len() {
        let z = values[ip];
        let mut ties = 0usize;
        while ip < values.len() && values[ip] == z {
            ma += usize::from(in_a[ip]);
            ip += 1;
            ties += 1;
        }
        // the largest distinct value contributes nothing (B_j = N)
        if ip == values.len() {
            break;
        }
        let bj = ip as f64;
        let mb = ip - ma;
        let weight = ties as f64 / n / (bj * (n - bj));
        let da = n * ma as f64 - bj * na;
        let db = n * mb as f64 - bj * nb;
        sum_a += weight * da * da;
        sum_b += weight * db * db;
    }
    sum_a / na + sum_b / nb
}

/// Finite-sample variance of `A²_kN` under the null.
fn ad_variance(sizes: &[usize]) -> f64 {
    let k = sizes.len() as f64;
    let n_total: usize = sizes.iter().sum();
    let n = n_total as f64;
    let h_cap: f64 = sizes.iter().map(|&s| 1.0 / s as f64).sum();
    let h: f64 = (1..n_total).map(|i| 1.0 / i as f64).sum();
    let mut g = 0.0;
    for i in 1..n_total.saturating_sub(1) {
        for j in (i + 1)..n_total {
            g += 1.0 / ((n_total - i) as f64 * j as f64);
        }
    }
    let a = (4.0 * g - 6.0) * (k - 1.0) + (10.0 - 6.0 * g) * h_cap;
    let b = (2.0 * g - 4.0) * k * k + 8.0 * h * k + (2.0 * g - 14.0 * h - 4.0) * h_cap - 8.0 * h
        + 4.0 * g
        - 6.0;
    let c = (6.0 * h + 2.0 * g - 2.0) * k * k + (4.0 * h - 4.0 * g + 6.0) * k + (2.0 * h - 6.0) * h_cap
        + 4.0 * h;
    let d = (2.0 * h + 6.0) * k * k - 4.0 * h * k;
    (a * n.powi(3) + b * n * n + c * n + d) / ((n - 1.0) * (n - 2.0) * (n - 3.0))
}

/// Marsaglia & Marsaglia (2004) approximation of the limiting A² distribution function.
pub fn ad_asymptotic_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z < 2.0 {
        (-1.2337141 / z).exp() / z.sqrt()
            * (2.00012
                + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z)
                    * z)
    } else {
        (-(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z)
            .exp())
        .exp()
    }
}
