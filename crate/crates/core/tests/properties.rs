//! Randomized invariants of the matching kernels, resampling, tensor
//! batching, NPY serialization, and the statistics helpers.

use proptest::prelude::*;

use efdm::matching::{
    efdm, efdm_in, efdmix_in, hist_match, moment_match, MatchConfig, MatchContext, MatchError,
    MatchOutput, Method, MomentMode, SpatialLayout, TieBreak,
};
use efdm::stats::{equivalent_percent, ks_distance, standardized_linf, summarize};
use efdm::tensorops::{
    apply_channelwise, read_tensor_from, resample_sorted, write_tensor_to, Dtype, FeatureTensor,
    Shape,
};
use efdm::LambdaSpec;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sorted_bits(v: &[f64]) -> Vec<u64> {
    let mut s = v.to_vec();
    s.sort_unstable_by(f64::total_cmp);
    s.iter().map(|t| t.to_bits()).collect()
}

/// Finite samples, optionally quantized to f32 precision and optionally
/// coarsened so ties appear.
fn samples(len: impl Strategy<Value = usize>) -> impl Strategy<Value = Vec<f64>> {
    (len, any::<bool>(), any::<bool>()).prop_flat_map(|(n, ties, narrow)| {
        prop::collection::vec(-1.0e6f64..1.0e6, n).prop_map(move |mut v| {
            for t in v.iter_mut() {
                if ties {
                    *t = (*t / 1.0e5).round() * 1.0e5;
                }
                if narrow {
                    *t = *t as f32 as f64;
                }
            }
            v
        })
    })
}

fn equal_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..200).prop_flat_map(|n| (samples(Just(n)), samples(Just(n))))
}

fn any_tie_break() -> impl Strategy<Value = TieBreak> {
    prop_oneof![
        Just(TieBreak::Quicksort),
        Just(TieBreak::Preserve),
        Just(TieBreak::Random),
        Just(TieBreak::Neighbor),
    ]
}

/// Tie-break strategies that never consult the RNG, so reorderings of
/// independent work cannot change results.
fn deterministic_tie_break() -> impl Strategy<Value = TieBreak> {
    prop_oneof![
        Just(TieBreak::Quicksort),
        Just(TieBreak::Preserve),
        Just(TieBreak::Neighbor),
    ]
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sort matching under any strategy; the neighbor strategy gets a 1-row
/// layout since it needs spatial context.
fn efdm_any(x: &[f64], y: &[f64], tie_break: TieBreak, seed: u64) -> MatchOutput {
    let mut r = rng(seed);
    let mut ctx = MatchContext::new(&mut r).with_tie_break(tie_break);
    if tie_break == TieBreak::Neighbor {
        ctx = ctx.with_layout(SpatialLayout::new(1, x.len()));
    }
    efdm_in(x, y, &mut ctx).unwrap()
}

fn efdmix_any(x: &[f64], y: &[f64], lambda: f64, tie_break: TieBreak, seed: u64) -> MatchOutput {
    let mut r = rng(seed);
    let mut ctx = MatchContext::new(&mut r)
        .with_tie_break(tie_break)
        .with_lambda(lambda);
    if tie_break == TieBreak::Neighbor {
        ctx = ctx.with_layout(SpatialLayout::new(1, x.len()));
    }
    efdmix_in(x, y, &mut ctx).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn efdm_output_is_exactly_the_style_distribution(
        (x, y) in equal_pair(),
        tie_break in any_tie_break(),
        seed in any::<u64>(),
    ) {
        let out = efdm_any(&x, &y, tie_break, seed);
        prop_assert_eq!(sorted_bits(&out.values), sorted_bits(&y));
        prop_assert_eq!(ks_distance(&out.values, &y).unwrap(), 0.0);

        let a = summarize(&out.values).unwrap();
        let b = summarize(&y).unwrap();
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.std.to_bits(), b.std.to_bits());
        prop_assert_eq!(a.skewness.to_bits(), b.skewness.to_bits());
        prop_assert_eq!(a.kurtosis.to_bits(), b.kurtosis.to_bits());
        prop_assert_eq!(a.linf.to_bits(), b.linf.to_bits());
    }

    #[test]
    fn efdm_preserves_rank_order(
        (x, y) in equal_pair(),
        tie_break in any_tie_break(),
        seed in any::<u64>(),
    ) {
        let out = efdm_any(&x, &y, tie_break, seed);
        for i in 0..x.len() {
            for j in 0..x.len() {
                if x[i] < x[j] {
                    prop_assert!(out.values[i] <= out.values[j]);
                }
            }
        }
    }

    #[test]
    fn efdm_agrees_with_hist_match_on_tie_free_input(
        n in 1usize..200,
        seed in any::<u64>(),
    ) {
        // Distinct content values and equal lengths make the quantile map
        // one-to-one, where both constructions give the same answer.
        let mut r = rng(seed);
        let mut x: Vec<f64> = (0..n)
            .map(|i| i as f64 + r.random_range(0.0..0.5))
            .collect();
        x.shuffle(&mut r);
        let y: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let a = efdm(&x, &y, TieBreak::Quicksort, &mut rng(seed)).unwrap();
        let b = hist_match(&x, &y).unwrap();
        let bits = |v: &[f64]| v.iter().map(|t| t.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.values), bits(&b.values));
    }

    #[test]
    fn efdmix_endpoints_are_bitwise(
        (x, y) in equal_pair(),
        tie_break in any_tie_break(),
        seed in any::<u64>(),
    ) {
        let at_one = efdmix_any(&x, &y, 1.0, tie_break, seed);
        let bits = |v: &[f64]| v.iter().map(|t| t.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&at_one.values), bits(&x));

        let at_zero = efdmix_any(&x, &y, 0.0, tie_break, seed);
        let plain = efdm_any(&x, &y, tie_break, seed);
        prop_assert_eq!(bits(&at_zero.values), bits(&plain.values));
    }

    #[test]
    fn efdmix_interpolates_between_content_and_match(
        (x, y) in equal_pair(),
        lambda in 0.0f64..1.0,
        tie_break in any_tie_break(),
        seed in any::<u64>(),
    ) {
        let mixed = efdmix_any(&x, &y, lambda, tie_break, seed);
        let plain = efdm_any(&x, &y, tie_break, seed);
        for (i, xi) in x.iter().enumerate() {
            let expect = lambda * xi + (1.0 - lambda) * plain.values[i];
            let scale = 1.0 + xi.abs().max(plain.values[i].abs());
            prop_assert!((mixed.values[i] - expect).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn moment_match_lands_on_style_moments(
        x in samples(2usize..200),
        y in samples(2usize..200),
    ) {
        let out = moment_match(&x, &y, MomentMode::Both, 0.0).unwrap();
        let got = summarize(&out.values).unwrap();
        let want = summarize(&y).unwrap();
        let sx = summarize(&x).unwrap();
        let tol = |v: f64| 1e-9 * (1.0 + v.abs());
        prop_assert!((got.mean - want.mean).abs() <= tol(want.mean));
        // With epsilon 0 the rescale is exact unless the content collapsed.
        if sx.std > 1e-9 {
            prop_assert!((got.std - want.std).abs() <= tol(want.std));
            // The transform is affine with a nonnegative slope, so shape
            // statistics follow the content, not the style.
            prop_assert!((got.skewness - sx.skewness).abs() <= 1e-6 * (1.0 + sx.skewness.abs()));
        }
    }

    #[test]
    fn hist_match_mean_stays_inside_style_range(
        (x, y) in equal_pair(),
    ) {
        let out = hist_match(&x, &y).unwrap();
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for v in &out.values {
            prop_assert!(*v >= lo && *v <= hi);
            // Every output value is an actual style value.
            prop_assert!(y.iter().any(|t| t.to_bits() == v.to_bits()));
        }
    }

    #[test]
    fn resample_is_sorted_and_bounded(
        y in samples(2usize..200),
        m in 2usize..300,
    ) {
        let out = resample_sorted(&y, m).unwrap();
        prop_assert_eq!(out.len(), m);
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(out[0], lo);
        prop_assert_eq!(out[m - 1], hi);
        for w in out.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn channel_permutation_commutes_with_batch_matching(
        seed in any::<u64>(),
        tie_break in deterministic_tie_break(),
        lambda in 0.0f64..=1.0,
    ) {
        let shape = Shape::new(1, 3, 2, 4);
        let mut r = rng(seed);
        let data = |r: &mut ChaCha8Rng| -> Vec<f64> {
            (0..shape.len()).map(|_| r.random_range(-5.0..5.0)).collect()
        };
        let x = FeatureTensor::new(data(&mut r), shape, Dtype::F64).unwrap();
        let y = FeatureTensor::new(data(&mut r), shape, Dtype::F64).unwrap();

        let cfg = MatchConfig {
            method: Method::Efdmix,
            tie_break,
            lambda: LambdaSpec::Fixed(lambda),
            ..MatchConfig::default()
        };
        let base = apply_channelwise(&x, &y, &cfg, &mut rng(1), false).unwrap();

        // Swap channels 0 and 2 in both tensors; the matched output must be
        // the same rows, swapped the same way.
        let swap = |t: &FeatureTensor| {
            let plane = shape.plane();
            let mut d = t.data().to_vec();
            for i in 0..plane {
                d.swap(i, 2 * plane + i);
            }
            FeatureTensor::new(d, shape, Dtype::F64).unwrap()
        };
        let swapped =
            apply_channelwise(&swap(&x), &swap(&y), &cfg, &mut rng(1), false).unwrap();

        let bits = |v: &[f64]| v.iter().map(|t| t.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(swapped.tensor.row(0, 0)), bits(base.tensor.row(0, 2)));
        prop_assert_eq!(bits(swapped.tensor.row(0, 1)), bits(base.tensor.row(0, 1)));
        prop_assert_eq!(bits(swapped.tensor.row(0, 2)), bits(base.tensor.row(0, 0)));
    }

    #[test]
    fn npy_round_trip_is_bitwise(
        b in 1usize..3, c in 1usize..4, h in 1usize..5, w in 1usize..5,
        narrow in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let shape = Shape::new(b, c, h, w);
        let mut r = rng(seed);
        let data: Vec<f64> = (0..shape.len())
            .map(|_| {
                let v: f64 = r.random_range(-100.0..100.0);
                if narrow { v as f32 as f64 } else { v }
            })
            .collect();
        let dtype = if narrow { Dtype::F32 } else { Dtype::F64 };
        let t = FeatureTensor::new(data, shape, dtype).unwrap();

        let mut buf = Vec::new();
        write_tensor_to(&mut buf, &t).unwrap();
        let back = read_tensor_from(&buf).unwrap();
        prop_assert_eq!(back.shape(), t.shape());
        prop_assert_eq!(back.dtype(), t.dtype());
        let bits = |v: &[f64]| v.iter().map(|t| t.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(back.data()), bits(t.data()));
    }

    #[test]
    fn summary_invariants_hold(v in samples(1usize..300)) {
        let s = summarize(&v).unwrap();
        prop_assert_eq!(s.n, v.len());
        let max_abs = v.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        prop_assert_eq!(s.linf.to_bits(), max_abs.to_bits());
        prop_assert!(s.std >= 0.0);
        if s.std > 0.0 {
            // Fourth standardized moment dominates the square of the second.
            prop_assert!(s.kurtosis >= 1.0 - 1e-9);
            let z: Vec<f64> = v.iter().map(|t| (t - s.mean) / s.std).collect();
            let zs = summarize(&z).unwrap();
            prop_assert!(zs.mean.abs() <= 1e-9);
            prop_assert!((zs.std - 1.0).abs() <= 1e-9);
            prop_assert!((standardized_linf(&v).unwrap() - zs.linf).abs() <= 1e-9 * (1.0 + zs.linf));
        } else {
            prop_assert_eq!(s.skewness, 0.0);
            prop_assert_eq!(s.kurtosis, 0.0);
        }
    }

    #[test]
    fn ks_distance_is_a_bounded_pseudometric(
        (a, b) in equal_pair(),
    ) {
        let d = ks_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ks_distance(&b, &a).unwrap(), d);
    }

    #[test]
    fn equivalent_percent_counts_duplicated_mass(v in samples(1usize..200)) {
        let p = equivalent_percent(&v).unwrap();
        prop_assert!((0.0..=100.0).contains(&p));
        let distinct: std::collections::HashSet<u64> =
            v.iter().map(|t| t.to_bits()).collect();
        if distinct.len() == v.len() {
            prop_assert_eq!(p, 0.0);
        }
        if distinct.len() == 1 && v.len() > 1 {
            prop_assert_eq!(p, 100.0);
        }
    }

    #[test]
    fn length_mismatch_points_at_resampling(
        x in samples(Just(8usize)),
        y in samples(Just(5usize)),
        tie_break in any_tie_break(),
        seed in any::<u64>(),
    ) {
        let err = efdm(&x, &y, tie_break, &mut rng(seed)).err().unwrap();
        let is_mismatch = matches!(err, MatchError::LengthMismatch { x: 8, y: 5 });
        prop_assert!(is_mismatch);
        prop_assert!(err.to_string().contains("resample"));
    }
}
