//! Sampler for expert topsim distributions of controlled shape.
//!
//! Produces `count` index sets into a sorted topsim pool. Every set keeps
//! the pool's minimum and maximum; set medians sweep evenly across that
//! range; the remaining k-3 members are spaced evenly between the median and
//! the endpoint on the median's heavy side (the minimum when the median lies
//! below the pool mean, the maximum otherwise). Each target snaps to the
//! nearest pool member not already used by the set.

use crate::error::{Error, Result};

/// Nearest unused pool index to `target` by value; ties prefer the lower
/// index.
fn snap(pool: &[f64], used: &[usize], target: f64) -> usize {
    let mut best = None;
    let mut best_d = f64::INFINITY;
    for (i, &v) in pool.iter().enumerate() {
        if used.contains(&i) {
            continue;
        }
        let d = (v - target).abs();
        if d < best_d {
            best_d = d;
            best = Some(i);
        }
    }
    best.expect("pool exhausted")
}

pub fn sample_expert_topsim_distributions(
    pool: &[f64],
    k: usize,
    count: usize,
) -> Result<Vec<Vec<usize>>> {
    if k < 3 {
        return Err(Error::InvalidArgument(
            "distribution shapes need k >= 3 (skew is mechanically 0 for k = 2)".into(),
        ));
    }
    if pool.len() < k {
        return Err(Error::InvalidArgument(format!(
            "pool of {} topsims cannot seat {k} experts",
            pool.len()
        )));
    }
    if count < 2 {
        return Err(Error::InvalidArgument("need count >= 2 medians".into()));
    }
    if pool.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("pool must be sorted ascending".into()));
    }
    let lo = pool[0];
    let hi = pool[pool.len() - 1];
    let mean = pool.iter().sum::<f64>() / pool.len() as f64;

    let mut sets = Vec::with_capacity(count);
    for t in 0..count {
        let mut used = vec![0, pool.len() - 1];
        let median_target = lo + (hi - lo) * t as f64 / (count - 1) as f64;
        let median_idx = snap(pool, &used, median_target);
        used.push(median_idx);

        let median = pool[median_idx];
        let endpoint = if median < mean { lo } else { hi };
        for i in 1..=(k - 3) {
            let target = median + (endpoint - median) * i as f64 / (k - 2) as f64;
            let idx = snap(pool, &used, target);
            used.push(idx);
        }
        used.sort_unstable();
        sets.push(used);
    }
    Ok(sets)
}
