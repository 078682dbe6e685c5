//! Property-based invariants, 1000 generated cases each.

use ctxseg_core::baselines::{nleo_distance, nleo_energy, varri_distance};
use ctxseg_core::ctxgen::{generate, simulate_lif_lfp, ContextStep};
use ctxseg_core::metrics::{boundary_delay, boundary_sensitivity, boundary_similarity};
use ctxseg_core::strategies::{
    extract_representative, fixed_slices, multichannel_vote, ExtractionStrategy, FixedSlicing,
};
use ctxseg_core::{
    ctxseg_segment, BoundarySet, ContextSchedule, CtxsegConfig, GeneratorConfig, LifParams,
    TimeSeries,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

fn boundary_set(max_len: usize) -> impl Strategy<Value = BoundarySet> {
    (2..max_len).prop_flat_map(|n| {
        proptest::collection::vec(1..n, 0..8).prop_map(move |p| BoundarySet::from_unsorted(p, n))
    })
}

/// Piecewise noise whose scale jumps between segments.
fn piecewise_noise(seed: u64, pieces: &[(usize, f64)]) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pieces
        .iter()
        .flat_map(|&(len, scale)| (0..len).map(|_| scale * (rng.random::<f64>() - 0.5)).collect::<Vec<_>>())
        .collect()
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn boundary_sets_are_ordered_and_in_range(
        n in 1usize..500,
        raw in proptest::collection::vec(0usize..600, 0..20),
    ) {
        let bs = BoundarySet::from_unsorted(raw, n);
        let p = bs.positions();
        prop_assert!(p.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(p.iter().all(|&x| x > 0 && x < n));
        prop_assert!(BoundarySet::new(p.to_vec(), n).is_ok());
        let segs = bs.segments();
        prop_assert_eq!(segs.first().map(|s| s.0), Some(0));
        prop_assert_eq!(segs.last().map(|s| s.1), Some(n));
        prop_assert!(segs.windows(2).all(|w| w[0].1 == w[1].0 && w[0].0 < w[0].1));
        let json = serde_json::to_string(&bs).unwrap();
        prop_assert_eq!(serde_json::from_str::<BoundarySet>(&json).unwrap(), bs);
    }

    #[test]
    fn ctxseg_segments_respect_minimum_size(
        seed in any::<u64>(),
        pieces in proptest::collection::vec((40usize..300, 0.1f64..50.0), 1..6),
        w in 4usize..48,
        s in 1usize..6,
        alpha in prop_oneof![Just(0.05), Just(0.01), Just(0.001)],
    ) {
        let x = piecewise_noise(seed, &pieces);
        let n = x.len();
        let ts = TimeSeries::new(x, 256.0).unwrap();
        let seg = ctxseg_segment(&ts, &CtxsegConfig::new(w, s, alpha)).unwrap();
        let p = seg.boundaries.positions();
        if let Some(&first) = p.first() {
            prop_assert!(first >= w + s);
        }
        prop_assert!(p.windows(2).all(|g| g[1] - g[0] > w + s));
        prop_assert!(p.iter().all(|&b| b < n));
        prop_assert!(seg.boundaries.p_values().iter().all(|&pv| pv < alpha));
        prop_assert!(seg.comparisons <= n);
    }

    #[test]
    fn generation_is_a_pure_function_of_its_inputs(
        seed in any::<u64>(),
        steps in proptest::collection::vec((0.0f64..120.0, 0.02f64..0.3), 1..4),
        neurons in 1usize..60,
    ) {
        let schedule = ContextSchedule::new(
            steps.iter().map(|&(rate_hz, duration_s)| ContextStep { rate_hz, duration_s }).collect(),
        );
        let config = GeneratorConfig { neuron_count: neurons, ..GeneratorConfig::with_seed(seed) };
        let a = generate(&schedule, &config).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| generate(&schedule, &config)).unwrap();
        prop_assert_eq!(a.series.samples(), b.series.samples());
        prop_assert_eq!(&a.ground_truth, &b.ground_truth);
        prop_assert_eq!(a.ground_truth.len(), steps.len() - 1);
        let total: f64 = steps.iter().map(|s| s.1).sum();
        prop_assert_eq!(a.series.len(), (total * 256.0 + 1e-9).floor() as usize);
    }

    #[test]
    fn vote_ignores_channel_order(
        channels in proptest::collection::vec(proptest::collection::vec(1usize..400, 0..10), 1..6),
        min_channels in 1usize..4,
        tol in 0usize..5,
        min_segment in 0usize..60,
        rotation in 0usize..6,
    ) {
        let sets: Vec<BoundarySet> = channels.into_iter().map(|p| BoundarySet::from_unsorted(p, 400)).collect();
        let a = multichannel_vote(&sets, min_channels, tol, min_segment).unwrap();
        let mut shuffled = sets.clone();
        shuffled.reverse();
        let k = rotation % shuffled.len();
        shuffled.rotate_left(k);
        let b = multichannel_vote(&shuffled, min_channels, tol, min_segment).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.positions().windows(2).all(|w| w[1] - w[0] >= min_segment.max(1)));
    }

    #[test]
    fn fixed_slices_arithmetic(
        length in 1usize..5000,
        w in 1usize..600,
        overlap in prop_oneof![Just(0.0), Just(0.25), Just(0.5), Just(0.75), 0.0f64..0.9],
    ) {
        let slicing = match FixedSlicing::new(w, overlap) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let stride = slicing.stride().unwrap();
        let slices = fixed_slices(length, &slicing).unwrap();
        if w > length {
            prop_assert!(slices.is_empty());
        } else {
            prop_assert_eq!(slices.len(), (length - w) / stride + 1);
            for (k, &(s, e)) in slices.iter().enumerate() {
                prop_assert_eq!(s, k * stride);
                prop_assert_eq!(e - s, w);
                prop_assert!(e <= length);
            }
            let last = slices.last().unwrap().0;
            prop_assert!(last + stride + w > length);
        }
    }

    #[test]
    fn representatives_lie_inside_segments(
        cuts in proptest::collection::vec(1usize..2000, 0..12),
        w in 1usize..200,
        seed in any::<u64>(),
        random in any::<bool>(),
    ) {
        let segs = BoundarySet::from_unsorted(cuts, 2000).segments();
        let strategy = if random {
            ExtractionStrategy::VariableRandom { seed }
        } else {
            ExtractionStrategy::VariableFirst
        };
        let out = extract_representative(&segs, w, strategy);
        let eligible: Vec<_> = segs.iter().filter(|(s, e)| e - s >= w).collect();
        prop_assert_eq!(out.len(), eligible.len());
        for (&(s, e), &&(ss, se)) in out.iter().zip(&eligible) {
            prop_assert!(s >= ss && e <= se && e - s == w);
            if !random {
                prop_assert_eq!(s, ss);
            }
        }
    }

    #[test]
    fn metric_identities(gt in boundary_set(400), tol in 0usize..20) {
        prop_assert_eq!(boundary_similarity(&gt, &gt, tol), 1.0);
        if !gt.is_empty() {
            prop_assert_eq!(boundary_sensitivity(&gt, &gt).unwrap(), 1.0);
        }
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(
        (a, b) in (2usize..300).prop_flat_map(|n| (
            proptest::collection::vec(1..n, 0..6).prop_map(move |p| BoundarySet::from_unsorted(p, n)),
            proptest::collection::vec(1..n, 0..6).prop_map(move |p| BoundarySet::from_unsorted(p, n)),
        )),
        tol in 0usize..15,
    ) {
        let ab = boundary_similarity(&a, &b, tol);
        let ba = boundary_similarity(&b, &a, tol);
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn spurious_far_boundary_lowers_similarity_only(
        gt in proptest::collection::vec(1usize..500, 1..6),
        tol in 0usize..10,
    ) {
        let n = 2000;
        let gt = BoundarySet::from_unsorted(gt, n);
        let with_extra = BoundarySet::from_unsorted(
            gt.positions().iter().copied().chain([1500]).collect(), n);
        prop_assert!(boundary_similarity(&gt, &with_extra, tol) < 1.0);
        prop_assert_eq!(boundary_sensitivity(&gt, &with_extra).unwrap(), 1.0);
    }

    #[test]
    fn delays_stay_below_ground_truth_spacing(
        gt in boundary_set(600),
        found in proptest::collection::vec(1usize..600, 0..20),
    ) {
        let n = gt.signal_length();
        let found = BoundarySet::from_unsorted(found, n);
        let d = boundary_delay(&gt, &found, 1.0);
        let p = gt.positions();
        for (i, di) in d.iter().enumerate() {
            if let Some(v) = di {
                let next = p.get(i + 1).copied().unwrap_or(n);
                prop_assert!(*v >= 0.0 && *v < (next - p[i]) as f64);
            }
        }
    }

    #[test]
    fn distances_are_translation_covariant(
        seed in any::<u64>(),
        len in 60usize..200,
        w in 2usize..12,
        k in 1usize..20,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..len + k).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let y = &x[k..];
        let gx = varri_distance(&x, w, 1.0, 7.0).unwrap();
        let gy = varri_distance(y, w, 1.0, 7.0).unwrap();
        for n in w..=y.len() - w {
            prop_assert!((gy[n] - gx[n + k]).abs() < 1e-9);
        }
        let hx = nleo_distance(&x, w).unwrap();
        let hy = nleo_distance(y, w).unwrap();
        for n in w + 2..y.len() - w {
            prop_assert!((hy[n] - hx[n + k]).abs() < 1e-9);
        }
    }

    #[test]
    fn nleo_energy_scales_quadratically(
        x in proptest::collection::vec(-10.0f64..10.0, 4..60),
        c in -5.0f64..5.0,
    ) {
        let q = nleo_energy(&x);
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let qc = nleo_energy(&scaled);
        for (a, b) in q.iter().zip(&qc) {
            prop_assert!((b - c * c * a).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn membrane_potential_stays_bounded(
        seed in any::<u64>(),
        amplitude in 0.0f64..40.0,
        rate in 0.0f64..256.0,
        tau in 0.005f64..1.0,
        drive in -5.0f64..30.0,
    ) {
        let params = LifParams { v_thresh: 20.0, leak_tau: tau, drive, dt: 1.0 / 256.0 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input: Vec<f64> = (0..512)
            .map(|_| if rng.random::<f64>() < rate / 256.0 { amplitude } else { 0.0 })
            .collect();
        let v = simulate_lif_lfp(&params, &input).unwrap();
        let leak_step = (params.dt / tau * (drive.abs() + 20.0)).max(0.0);
        prop_assert!(v.iter().all(|&x| x <= params.v_thresh + amplitude + leak_step));
        prop_assert!(v.iter().all(|&x| x < params.v_thresh));
    }
}
