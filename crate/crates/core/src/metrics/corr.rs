//! Rank and product-moment correlations plus a permutation significance test.
//!
//! Degenerate inputs (constant series, too few points) are reported as
//! `None` rather than silently coerced.

use crate::numeric::rng::Rng;

/// Average ranks, 1-based, with ties assigned the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson product-moment correlation; `None` when either series is
/// constant or the series are shorter than 2.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "series length mismatch");
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len(), "series length mismatch");
    if xs.len() < 3 {
        return None;
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Two-sided permutation p-value for `stat_fn` under shuffles of `ys`.
/// Exactly `n_perm` permutations are drawn; the add-one estimator
/// (count + 1) / (n_perm + 1) keeps the p-value off zero.
pub fn permutation_pvalue<F>(
    stat_fn: F,
    xs: &[f64],
    ys: &[f64],
    n_perm: usize,
    rng: &mut Rng,
) -> Option<f64>
where
    F: Fn(&[f64], &[f64]) -> Option<f64>,
{
    let observed = stat_fn(xs, ys)?.abs();
    let mut shuffled = ys.to_vec();
    let mut exceed = 0usize;
    for _ in 0..n_perm {
        rng.shuffle(&mut shuffled);
        if let Some(s) = stat_fn(xs, &shuffled) {
            if s.abs() >= observed {
                exceed += 1;
            }
        }
    }
    Some((exceed + 1) as f64 / (n_perm + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_monotone_pairs() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [10.0, 20.0, 25.0, 40.0, 100.0];
        let down = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(spearman(&xs, &up), Some(1.0));
        assert_eq!(spearman(&xs, &down), Some(-1.0));
    }

    #[test]
    fn spearman_with_ties_matches_naive_oracle() {
        let xs = [1.0, 2.0, 2.0, 3.0, 5.0, 5.0, 5.0, 8.0];
        let ys = [0.1, 0.4, 0.3, 0.3, 0.9, 0.8, 0.8, 1.5];

        // Naive oracle: assign ranks by scanning for equal values.
        fn naive_ranks(v: &[f64]) -> Vec<f64> {
            v.iter()
                .map(|&x| {
                    let below = v.iter().filter(|&&y| y < x).count();
                    let equal = v.iter().filter(|&&y| y == x).count();
                    // positions below+1 ..= below+equal, averaged
                    (2 * below + equal + 1) as f64 / 2.0
                })
                .collect()
        }
        let expected = pearson(&naive_ranks(&xs), &naive_ranks(&ys)).unwrap();
        let got = spearman(&xs, &ys).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn spearman_constant_is_undefined() {
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), None);
    }

    #[test]
    fn pearson_affine_relations() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let up: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_matches_direct_formula_on_random_points() {
        let mut rng = Rng::seeded(77);
        let xs: Vec<f64> = (0..10).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let ys: Vec<f64> = (0..10).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
        let sxx: f64 = xs.iter().map(|a| a * a).sum();
        let syy: f64 = ys.iter().map(|b| b * b).sum();
        let expected =
            (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        assert!((pearson(&xs, &ys).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn permutation_p_small_for_perfect_correlation() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let p = permutation_pvalue(pearson, &xs, &xs, 10_000, &mut Rng::seeded(5)).unwrap();
        assert!(p < 0.001, "p = {p}");
    }

    #[test]
    fn permutation_p_uniformish_under_null() {
        // Independent random pairs: p should exceed 0.05 in at least 90% of
        // seeded trials.
        let mut big = 0;
        let trials = 40;
        for seed in 0..trials {
            let mut data_rng = Rng::seeded(1000 + seed);
            let xs: Vec<f64> = (0..15).map(|_| data_rng.f64()).collect();
            let ys: Vec<f64> = (0..15).map(|_| data_rng.f64()).collect();
            let p = permutation_pvalue(pearson, &xs, &ys, 500, &mut Rng::seeded(seed)).unwrap();
            if p > 0.05 {
                big += 1;
            }
        }
        assert!(big * 10 >= trials * 9, "only {big}/{trials} had p > 0.05");
    }

    #[test]
    fn permutation_count_respected_exactly() {
        use std::cell::Cell;
        let calls = Cell::new(0usize);
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.0, 2.0, 4.0];
        let n_perm = 137;
        let p = permutation_pvalue(
            |a, b| {
                calls.set(calls.get() + 1);
                pearson(a, b)
            },
            &xs,
            &ys,
            n_perm,
            &mut Rng::seeded(2),
        )
        .unwrap();
        // One observed evaluation plus exactly n_perm permuted ones.
        assert_eq!(calls.get(), n_perm + 1);
        // And the denominator shows in the granularity of p.
        let scaled = p * (n_perm + 1) as f64;
        assert!((scaled - scaled.round()).abs() < 1e-9);
    }
}
