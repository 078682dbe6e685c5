//! Library results checked against independent reference computations.

use ctxseg_core::metrics::{boundary_delay, boundary_sensitivity, boundary_similarity, mean_delay};
use ctxseg_core::stats::{anderson_darling_2sample, paired_t_test, student_t_two_sided};
use ctxseg_core::BoundarySet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-sided Student-t tail by composite Simpson quadrature of the density in
/// `theta = atan(t)`, normalised by the same quadrature over the half line.
fn t_tail_by_quadrature(t: f64, df: f64) -> f64 {
    let g = |theta: f64| {
        let x = theta.tan();
        let c = theta.cos();
        (1.0 + x * x / df).powf(-(df + 1.0) / 2.0) / (c * c)
    };
    let simpson = |a: f64, b: f64| {
        let n = 20_000;
        let h = (b - a) / n as f64;
        let mut s = g(a) + g(b - 1e-15);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(a + i as f64 * h);
        }
        s * h / 3.0
    };
    let half = std::f64::consts::FRAC_PI_2;
    simpson(t.abs().atan(), half) / simpson(0.0, half)
}

#[test]
fn t_test_matches_quadrature_grid() {
    let mut cases = 0;
    for df in [1.0, 2.0, 5.0, 10.0, 30.0] {
        for t in [0.1, 1.0, 2.5, 4.0] {
            let want = t_tail_by_quadrature(t, df);
            let got = student_t_two_sided(t, df);
            assert!((got - want).abs() < 1e-6, "df {df} t {t}: {got} vs {want}");
            cases += 1;
        }
    }
    assert_eq!(cases, 20);
}

#[test]
fn paired_t_test_end_to_end() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in [3usize, 6, 11, 31] {
        let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.3 * rng.random::<f64>() - 0.1).collect();
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| y - x).collect();
        let m = d.iter().sum::<f64>() / n as f64;
        let sd = (d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let t = m / (sd / (n as f64).sqrt());
        let r = paired_t_test(&a, &b).unwrap();
        assert!((r.statistic - t).abs() < 1e-9);
        assert!((r.p_value - t_tail_by_quadrature(t, (n - 1) as f64)).abs() < 1e-6);
    }
}

/// Anderson–Darling statistic written directly from its definition:
/// `A² = (1/N) sum_i (1/n_i) sum_j l_j (N M_ij - n_i B_j)² / (B_j (N - B_j))`
/// over the distinct pooled values `z_j` except the largest, where `l_j` counts
/// ties at `z_j`, `B_j` pooled values `<= z_j` and `M_ij` those of sample `i`.
fn a2_oracle(a: &[f64], b: &[f64]) -> f64 {
    let mut z: Vec<f64> = a.iter().chain(b).copied().collect();
    z.sort_by(f64::total_cmp);
    z.dedup();
    let n = (a.len() + b.len()) as f64;
    let count_le = |s: &[f64], v: f64| s.iter().filter(|&&x| x <= v).count() as f64;
    let mut out = 0.0;
    for sample in [a, b] {
        let ni = sample.len() as f64;
        let mut acc = 0.0;
        for &zj in &z[..z.len() - 1] {
            let ties = a.iter().chain(b).filter(|&&x| x == zj).count() as f64;
            let bj = count_le(a, zj) + count_le(b, zj);
            let mij = count_le(sample, zj);
            acc += ties * (n * mij - ni * bj).powi(2) / (bj * (n - bj));
        }
        out += acc / ni;
    }
    out / n
}

fn permutation_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let obs = a2_oracle(a, b);
    let (mut hits, mut total) = (0u64, 0u64);
    let mut idx: Vec<usize> = (0..a.len()).collect();
    loop {
        let xa: Vec<f64> = idx.iter().map(|&i| pooled[i]).collect();
        let xb: Vec<f64> = (0..n).filter(|i| !idx.contains(i)).map(|i| pooled[i]).collect();
        if a2_oracle(&xa, &xb) >= obs - 1e-9 * obs.max(1.0) {
            hits += 1;
        }
        total += 1;
        // next combination in lexicographic order
        let k = idx.len();
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    hits as f64 / total as f64
}

#[test]
fn anderson_darling_statistic_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let na = rng.random_range(1..=9);
        let nb = rng.random_range(1..=9);
        // coarse values so ties occur
        let a: Vec<f64> = (0..na).map(|_| f64::from(rng.random_range(0..6u8))).collect();
        let b: Vec<f64> = (0..nb).map(|_| f64::from(rng.random_range(0..6u8))).collect();
        let got = anderson_darling_2sample(&a, &b).unwrap().statistic;
        let want = a2_oracle(&a, &b);
        assert!((got - want).abs() < 1e-9, "{a:?} {b:?}: {got} vs {want}");
    }
}

#[test]
fn anderson_darling_tracks_exact_permutation_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst: f64 = 0.0;
    for na in 2..=9usize {
        for nb in 2..=9usize {
            for shift in [0.0, 0.5, 1.0, 2.0] {
                let a: Vec<f64> = (0..na).map(|_| rng.random::<f64>() * 2.0).collect();
                let b: Vec<f64> = (0..nb).map(|_| rng.random::<f64>() * 2.0 + shift).collect();
                let got = anderson_darling_2sample(&a, &b).unwrap().p_value;
                let want = permutation_p(&a, &b);
                worst = worst.max((got - want).abs());
                assert!(
                    (got - want).abs() <= 0.05,
                    "sizes {na}x{nb}, shift {shift}: {got} vs exact {want}"
                );
            }
        }
    }
    eprintln!("worst |p - p_exact| = {worst:.4}");
}

fn bs(p: &[usize], n: usize) -> BoundarySet {
    BoundarySet::new(p.to_vec(), n).unwrap()
}

#[test]
fn worked_delay_example() {
    // A at 10 s, B at 11 s, one discovery at 11.5 s
    let fs = 256.0;
    let gt = bs(&[2560, 2816], 8960);
    let found = bs(&[2944], 8960);
    let d = boundary_delay(&gt, &found, fs);
    assert_eq!(d, vec![None, Some(0.5)]);
    assert_eq!(boundary_sensitivity(&gt, &found).unwrap(), 0.5);
}

#[test]
fn empty_discovery_delay_is_seventeen_and_a_half() {
    let gt = bs(&[1280, 2560, 3840, 5120, 6400, 7680], 8960);
    let want = [30.0, 25.0, 20.0, 15.0, 10.0, 5.0].iter().sum::<f64>() / 6.0;
    assert_eq!(want, 17.5);
    assert_eq!(mean_delay(&gt, &BoundarySet::empty(8960), 256.0).unwrap(), want);
}

/// Best similarity over every one-to-one pairing, crossings included.
fn similarity_oracle(x: &[usize], y: &[usize], tol: usize) -> f64 {
    let total = x.len() + y.len();
    if total == 0 {
        return 1.0;
    }
    fn rec(i: usize, x: &[usize], y: &[usize], used: &mut Vec<bool>, k: usize, t: f64, tol: usize, best: &mut f64) {
        if i == x.len() {
            let a = (x.len() + y.len() - 2 * k) as f64;
            *best = best.max(1.0 - (a + t) / (a + k as f64));
            return;
        }
        rec(i + 1, x, y, used, k, t, tol, best);
        for j in 0..y.len() {
            let d = x[i].abs_diff(y[j]);
            if !used[j] && d <= tol {
                used[j] = true;
                rec(i + 1, x, y, used, k + 1, t + d as f64 / (tol + 1) as f64, tol, best);
                used[j] = false;
            }
        }
    }
    let mut best = 0.0;
    rec(0, x, y, &mut vec![false; y.len()], 0, 0.0, tol, &mut best);
    best
}

fn subsets_up_to_three(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for a in 1..n {
        out.push(vec![a]);
        for b in a + 1..n {
            out.push(vec![a, b]);
            for c in b + 1..n {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

#[test]
fn similarity_matches_exhaustive_oracle_on_small_signals() {
    let n = 12;
    let sets = subsets_up_to_three(n);
    for tol in [0, 1, 2, 4] {
        for x in &sets {
            for y in &sets {
                let got = boundary_similarity(&bs(x, n), &bs(y, n), tol);
                let want = similarity_oracle(x, y, tol);
                assert!((got - want).abs() < 1e-12, "{x:?} {y:?} tol {tol}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn similarity_matches_exhaustive_oracle_up_to_length_fifty() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20_000 {
        let n = rng.random_range(2..=50);
        let mut draw = || {
            let k = rng.random_range(0..=3usize.min(n - 1));
            let mut v: Vec<usize> = (0..k).map(|_| rng.random_range(1..n)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let x = draw();
        let y = draw();
        let tol = rng.random_range(0..=6);
        let got = boundary_similarity(&bs(&x, n), &bs(&y, n), tol);
        let want = similarity_oracle(&x, &y, tol);
        assert!((got - want).abs() < 1e-12, "{x:?} {y:?} n {n} tol {tol}");
    }
}
