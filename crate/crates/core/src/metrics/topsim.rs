//! Topographic similarity: Spearman correlation between pairwise input
//! distances (Euclidean over one-hot encodings) and pairwise message
//! distances (Levenshtein).

use crate::agents::LanguageTable;
use crate::metrics::corr::spearman;
use crate::metrics::edit::levenshtein;
use crate::numeric::rng::Rng;

fn hamming(a: &[u16], b: &[u16]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Topsim of a language table. Exhaustive over all input pairs when their
/// count fits in `pair_budget`, otherwise a uniform seeded subsample of
/// `pair_budget` pairs. `None` when either distance list is constant (for
/// example a single-message language).
pub fn topsim(table: &LanguageTable, pair_budget: usize, rng: &mut Rng) -> Option<f64> {
    let n = table.entries.len();
    if n < 3 {
        return None;
    }
    let total_pairs = n * (n - 1) / 2;
    let mut d_input = Vec::new();
    let mut d_msg = Vec::new();

    let push_pair = |i: usize, j: usize, d_input: &mut Vec<f64>, d_msg: &mut Vec<f64>| {
        let a = &table.entries[i];
        let b = &table.entries[j];
        // One-hot block encodings differ in 2h coordinates, so the
        // Euclidean distance is sqrt(2 h) exactly.
        d_input.push((2.0 * hamming(&a.input, &b.input) as f64).sqrt());
        d_msg.push(levenshtein(&a.message, &b.message) as f64);
    };

    if total_pairs <= pair_budget {
        for i in 0..n {
            for j in (i + 1)..n {
                push_pair(i, j, &mut d_input, &mut d_msg);
            }
        }
    } else {
        for _ in 0..pair_budget {
            let i = rng.usize_below(n);
            let mut j = rng.usize_below(n - 1);
            if j >= i {
                j += 1;
            }
            push_pair(i, j, &mut d_input, &mut d_msg);
        }
    }
    spearman(&d_input, &d_msg)
}
