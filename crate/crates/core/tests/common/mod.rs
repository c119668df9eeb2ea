// SPDX-License-Identifier: MIT OR Apache-2.0

//! Independent oracles and property checks shared by the invariant suite
//! and the acceptance runner.

#![allow(dead_code)]

use npid::{
    aggregate, cusum, detect_bic_detailed, detect_traced, ecdf, hausdorff, norm, replicate_study,
    solution_path, st_likelihood, Aggregator, DetectorConfig, EvalChoice, EvalMode, EvalPoints,
    ExpansionSchedule, ModelId, NormKind, Series, StopRule, StudyOptions,
};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const NORMS: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

pub type Check = Result<(), TestCaseError>;

// ---------------------------------------------------------------------------
// Oracles: straight transcriptions of the definitions, no shared code paths.

pub fn indicators(x: &[f64], u: f64) -> Vec<f64> {
    x.iter().map(|&v| if v <= u { 1.0 } else { 0.0 }).collect()
}

/// Weighted difference of indicator sums on `[s, b]` and `[b+1, e]`, 1-based.
pub fn oracle_cusum_ind(ind: &[f64], s: usize, e: usize, b: usize) -> f64 {
    let (s, e, b) = (s as f64, e as f64, b as f64);
    let n = e - s + 1.0;
    let left: f64 = (s as usize..=b as usize).map(|t| ind[t - 1]).sum();
    let right: f64 = (b as usize + 1..=e as usize).map(|t| ind[t - 1]).sum();
    ((e - b) / ((b - s + 1.0) * n)).sqrt() * left - ((b - s + 1.0) / ((e - b) * n)).sqrt() * right
}

pub fn oracle_cusum(x: &[f64], s: usize, e: usize, b: usize, u: f64) -> f64 {
    oracle_cusum_ind(&indicators(x, u), s, e, b)
}

pub fn oracle_sd(x: &[f64], u: f64) -> f64 {
    let p = indicators(x, u).iter().sum::<f64>() / x.len() as f64;
    if (0.1..=0.9).contains(&p) {
        (p * (1.0 - p)).sqrt()
    } else {
        0.3
    }
}

pub fn oracle_norm(kind: NormKind, y: &[f64]) -> f64 {
    let d = y.len() as f64;
    match kind {
        NormKind::L1 => y.iter().map(|v| v.abs()).sum::<f64>() / d,
        NormKind::L2 => (y.iter().map(|v| v * v).sum::<f64>() / d).sqrt(),
        NormKind::LInf => y.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

pub fn oracle_profile(
    x: &[f64],
    s: usize,
    e: usize,
    kind: NormKind,
    eval: &[f64],
    rescale: bool,
) -> Vec<f64> {
    (s..e)
        .map(|b| {
            let y: Vec<f64> = eval
                .iter()
                .map(|&u| {
                    let c = oracle_cusum(x, s, e, b, u);
                    if rescale {
                        c / oracle_sd(x, u)
                    } else {
                        c
                    }
                })
                .collect();
            oracle_norm(kind, &y)
        })
        .collect()
}

/// Integrated likelihood summed over every `(segment, order statistic)` pair.
pub fn oracle_likelihood(x: &[f64], breakpoints: &[usize]) -> f64 {
    let t = x.len();
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut bounds = vec![0];
    bounds.extend_from_slice(breakpoints);
    bounds.push(t);
    let xlogx = |p: f64| if p > 0.0 { p * p.ln() } else { 0.0 };
    let mut total = 0.0;
    for w in bounds.windows(2) {
        let seg = &x[w[0]..w[1]];
        let n = seg.len() as f64;
        for l in 2..t {
            let u = sorted[l - 1];
            let f = seg.iter().filter(|&&v| v <= u).count() as f64 / n;
            total += n / (l * (t - l)) as f64 * (xlogx(f) + xlogx(1.0 - f));
        }
    }
    t as f64 * total
}

/// Removal order recomputing every triplet each round.
pub fn full_recompute_path(
    series: &Series,
    candidates: &[usize],
    kind: NormKind,
    eval: &EvalPoints,
    rescale: bool,
) -> Vec<usize> {
    let agg = Aggregator::new(series, eval, kind, rescale);
    let mut live = candidates.to_vec();
    let mut removed = Vec::new();
    while !live.is_empty() {
        let scores: Vec<f64> = (0..live.len())
            .map(|j| {
                let prev = if j == 0 { 0 } else { live[j - 1] };
                let next = live.get(j + 1).copied().unwrap_or(series.len());
                agg.at(prev + 1, next, live[j]).unwrap()
            })
            .collect();
        let mut m = 0;
        for j in 1..scores.len() {
            if scores[j] < scores[m] {
                m = j;
            }
        }
        removed.push(live.remove(m));
    }
    removed.reverse();
    removed
}

// ---------------------------------------------------------------------------
// Strategies.

/// Values on a 1/64 grid so that ties occur and increasing maps stay strict.
pub fn series_values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    let coarse = prop::collection::vec(0i32..4, 2..=max_len)
        .prop_map(|v| v.into_iter().map(f64::from).collect::<Vec<_>>());
    let stepped = (
        prop::collection::vec(-256i32..256, 2..=max_len),
        0.0f64..1.0,
        0i32..1024,
    )
        .prop_map(|(v, at, shift)| {
            let cut = (at * v.len() as f64) as usize;
            v.into_iter()
                .enumerate()
                .map(|(i, k)| f64::from(k + if i >= cut { shift } else { 0 }) / 64.0)
                .collect::<Vec<_>>()
        });
    prop_oneof![1 => coarse, 3 => stepped]
}

/// Series plus a valid split `s <= b < e`.
pub fn series_with_split(max_len: usize) -> impl Strategy<Value = (Vec<f64>, usize, usize, usize)> {
    series_values(max_len).prop_flat_map(|x| {
        let t = x.len();
        (Just(x), 1..t).prop_flat_map(move |(x, s)| {
            (Just(x), Just(s), s + 1..=t)
                .prop_flat_map(|(x, s, e)| (Just(x), Just(s), Just(e), s..e))
        })
    })
}

pub fn norm_kind() -> impl Strategy<Value = NormKind> {
    prop::sample::select(NORMS.to_vec())
}

pub fn sorted_candidates(len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(1..len, 0..len.min(12)).prop_map(|s| s.into_iter().collect())
}

fn full_config(kind: NormKind, stop: StopRule) -> DetectorConfig {
    DetectorConfig {
        eval: EvalChoice::Full,
        stop,
        ..DetectorConfig::with_norm(kind)
    }
}

fn series(x: &[f64]) -> Series {
    Series::new(x.to_vec()).unwrap()
}

// ---------------------------------------------------------------------------
// Contrast.

pub fn cusum_complement(x: &[f64], s: usize, e: usize, b: usize) -> Check {
    let data = series(x);
    for &u in x {
        let c = cusum(&data, s, e, b, u).unwrap();
        let comp: Vec<f64> = indicators(x, u).into_iter().map(|v| 1.0 - v).collect();
        let d = oracle_cusum_ind(&comp, s, e, b);
        prop_assert!((c + d).abs() <= 1e-12, "u={u}: {c} vs {d}");
    }
    Ok(())
}

pub fn cusum_rank_dependence(x: &[f64], s: usize, e: usize, b: usize) -> Check {
    let data = series(x);
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    // Every u in [x_(k), x_(k+1)) induces the same indicators.
    for (k, &lo) in sorted.iter().enumerate() {
        let hi = sorted.get(k + 1).copied().unwrap_or(lo + 1.0);
        let mid = lo + (hi - lo) / 2.0;
        prop_assert_eq!(
            cusum(&data, s, e, b, lo).unwrap(),
            cusum(&data, s, e, b, mid).unwrap()
        );
    }
    let below = sorted[0] - 1.0;
    prop_assert_eq!(cusum(&data, s, e, b, below).unwrap(), 0.0);
    Ok(())
}

pub fn profile_matches_oracle(
    x: &[f64],
    s: usize,
    e: usize,
    kind: NormKind,
    rescale: bool,
) -> Check {
    if s >= e {
        return Ok(());
    }
    let data = series(x);
    let eval = EvalPoints::full(&data);
    let fast = aggregate(&data, s, e, kind, &eval, rescale).unwrap();
    let slow = oracle_profile(x, s, e, kind, eval.points(), rescale);
    prop_assert_eq!(fast.values.len(), e - s);
    for (b, (f, o)) in (s..e).zip(fast.values.iter().zip(&slow)) {
        prop_assert!((f - o).abs() <= 1e-12, "b={b}: {f} vs {o}");
        prop_assert!(*f >= 0.0);
    }
    Ok(())
}

pub fn ecdf_monotone(x: &[f64], mut us: Vec<f64>) -> Check {
    us.sort_by(f64::total_cmp);
    let vals: Vec<f64> = us.iter().map(|&u| ecdf(x, u).unwrap()).collect();
    prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    prop_assert_eq!(ecdf(x, max).unwrap(), 1.0);
    Ok(())
}

// ---------------------------------------------------------------------------
// Aggregation.

pub fn norm_dominance(x: &[f64]) -> Check {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let l1 = norm(NormKind::L1, x).unwrap();
    let l2 = norm(NormKind::L2, x).unwrap();
    let li = norm(NormKind::LInf, x).unwrap();
    for v in [l1, l2, li] {
        prop_assert!(v + 1e-12 >= mean, "{v} < mean {mean}");
    }
    prop_assert!(l1 <= l2 + 1e-12 && l2 <= li + 1e-12, "{l1} {l2} {li}");
    for kind in NORMS {
        prop_assert!((norm(kind, x).unwrap() - oracle_norm(kind, x)).abs() <= 1e-12);
    }
    Ok(())
}

/// Strictly increasing maps applied to `x`.
pub fn increasing_maps(x: &[f64]) -> Vec<(&'static str, Vec<f64>)> {
    vec![
        ("exp", x.iter().map(|v| v.exp()).collect()),
        ("affine", x.iter().map(|v| 2.5 * v - 3.0).collect()),
        ("shift", x.iter().map(|v| v + 7.0).collect()),
    ]
}

pub fn profile_rank_invariance(x: &[f64], kind: NormKind, rescale: bool) -> Check {
    let data = series(x);
    let t = x.len();
    let base = aggregate(&data, 1, t, kind, &EvalPoints::full(&data), rescale).unwrap();
    for (name, y) in increasing_maps(x) {
        let g = series(&y);
        let p = aggregate(&g, 1, t, kind, &EvalPoints::full(&g), rescale).unwrap();
        prop_assert_eq!(&p, &base, "{}", name);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Detector.

pub fn detection_invariants(x: &[f64], kind: NormKind, lambda: usize) -> Check {
    let data = series(x);
    let t = x.len();
    let cfg = DetectorConfig {
        lambda,
        ..full_config(kind, StopRule::Threshold)
    };
    let (seg, trace) = detect_traced(&data, &cfg).unwrap();
    let cp = &seg.changepoints;
    prop_assert!(cp.windows(2).all(|w| w[0] < w[1]));
    prop_assert!(cp.iter().all(|&r| (1..t).contains(&r)));
    let zeta = npid::threshold(cfg.constant(), t).unwrap();
    prop_assert!(seg.scores.iter().all(|&v| v > zeta));
    prop_assert_eq!(&detect_traced(&data, &cfg).unwrap().0, &seg);

    let k = ExpansionSchedule::new(t, lambda).unwrap().k;
    prop_assert!(trace.passes <= cp.len() + 1);
    prop_assert!(trace.intervals_scanned <= 2 * k * trace.passes);

    let silenced = DetectorConfig {
        threshold_constant: Some(1e6),
        ..cfg
    };
    prop_assert!(detect_traced(&data, &silenced).unwrap().0.is_empty());
    Ok(())
}

pub fn detect_rank_invariance(x: &[f64], kind: NormKind) -> Check {
    for stop in [StopRule::Threshold, StopRule::Bic] {
        let cfg = full_config(kind, stop);
        let base = npid::segment(&series(x), &cfg).unwrap().changepoints;
        for (name, y) in increasing_maps(x) {
            let got = npid::segment(&series(&y), &cfg).unwrap().changepoints;
            prop_assert_eq!(&got, &base, "{} {:?}", name, stop);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Selector.

pub fn path_invariants(x: &[f64], candidates: &[usize], kind: NormKind, rescale: bool) -> Check {
    let data = series(x);
    let eval = EvalPoints::full(&data);
    let path = solution_path(&data, candidates, kind, &eval, rescale).unwrap();
    let mut sorted = path.ordered.clone();
    sorted.sort_unstable();
    prop_assert_eq!(&sorted, &candidates.to_vec());
    prop_assert_eq!(
        &path.ordered,
        &full_recompute_path(&data, candidates, kind, &eval, rescale)
    );
    Ok(())
}

pub fn likelihood_invariants(x: &[f64], candidates: &[usize]) -> Check {
    let data = series(x);
    let s = st_likelihood(&data, candidates).unwrap();
    prop_assert!(s.is_finite() && s <= 0.0, "{s}");
    let o = oracle_likelihood(x, candidates);
    prop_assert!((s - o).abs() <= 1e-9 * o.abs().max(1.0), "{s} vs {o}");
    Ok(())
}

pub fn bic_invariants(x: &[f64], kind: NormKind) -> Check {
    let cfg = full_config(kind, StopRule::Bic);
    let d = detect_bic_detailed(&series(x), &cfg).unwrap();
    let min = d.bic.scores.iter().copied().fold(f64::INFINITY, f64::min);
    prop_assert_eq!(d.bic.scores[d.bic.chosen_j], min);
    prop_assert!(d.bic.scores[..d.bic.chosen_j].iter().all(|&v| v > min));
    prop_assert!(d
        .bic
        .changepoints
        .iter()
        .all(|c| d.path.ordered.contains(c)));
    prop_assert_eq!(&d.segmentation.changepoints, &d.bic.changepoints);
    Ok(())
}

// ---------------------------------------------------------------------------
// Evaluation.

pub fn hausdorff_invariants(a: &[usize], b: &[usize], n_s: usize) -> Check {
    prop_assert_eq!(hausdorff(a, b, n_s), hausdorff(b, a, n_s));
    if !a.is_empty() && !b.is_empty() {
        prop_assert_eq!(hausdorff(a, b, n_s) == Some(0.0), a == b);
        prop_assert_eq!(hausdorff(a, a, n_s), Some(0.0));
    }
    Ok(())
}

pub fn study_reproducible(base_seed: u64, reps: usize) -> Check {
    let opts = StudyOptions {
        reps,
        base_seed,
        parallel: true,
    };
    let cfg = DetectorConfig::default();
    let a = replicate_study(ModelId::M1, &cfg, &opts).unwrap();
    let b = replicate_study(
        ModelId::M1,
        &cfg,
        &StudyOptions {
            parallel: false,
            ..opts
        },
    )
    .unwrap();
    prop_assert_eq!(a.frequencies.values().sum::<usize>() + a.failures, reps);
    prop_assert_eq!(&a.frequencies, &b.frequencies);
    prop_assert_eq!(a.mean_hausdorff, b.mean_hausdorff);
    let strip = |r: &npid::StudyReport| {
        r.records
            .iter()
            .map(|x| (x.seed, x.estimates.clone(), x.count_error, x.hausdorff))
            .collect::<Vec<_>>()
    };
    prop_assert_eq!(strip(&a), strip(&b));
    Ok(())
}

pub fn eval_points_sorted(x: &[f64]) -> Check {
    let data = series(x);
    let e = EvalPoints::full(&data);
    prop_assert_eq!(e.mode(), EvalMode::FullDataQuantiles);
    prop_assert_eq!(e.len(), x.len());
    prop_assert!(e.points().windows(2).all(|w| w[0] <= w[1]));
    Ok(())
}
