//! Positional disentanglement, bag-of-symbols disentanglement, and context
//! independence.
//!
//! The operationalizations used here:
//! * posdis: per message position, the gap between the two largest mutual
//!   informations I(symbol_j; attribute_i), normalized by the symbol entropy
//!   H(symbol_j); positions with zero entropy are skipped; the result is the
//!   mean over remaining positions.
//! * bosdis: the same construction over per-message symbol counts instead of
//!   positions.
//! * context independence: mean over concepts c = (attribute, value) of
//!   p(c | s_c) * p(s_c | c) where s_c maximizes p(c | s), estimated from
//!   symbol-occurrence co-counts. Symbols whose per-message count is
//!   constant carry no information and are excluded; a language with no
//!   informative symbols scores 0.
//!
//! All three lie in [0, 1]. Probabilities come from integer count ratios so
//! exactly-independent tables yield exactly-zero mutual information.

use std::collections::BTreeMap;

use crate::agents::LanguageTable;

/// Shannon entropy (nats) of an empirical count distribution.
fn entropy_of_counts(counts: &BTreeMap<u16, usize>, n: usize) -> f64 {
    counts
        .values()
        .map(|&c| (c as f64 / n as f64) * (n as f64 / c as f64).ln())
        .sum()
}

/// Mutual information (nats) of paired discrete samples.
fn mutual_information(pairs: &[(u16, u16)]) -> f64 {
    let n = pairs.len();
    let mut joint: BTreeMap<(u16, u16), usize> = BTreeMap::new();
    let mut ma: BTreeMap<u16, usize> = BTreeMap::new();
    let mut mb: BTreeMap<u16, usize> = BTreeMap::new();
    for &(a, b) in pairs {
        *joint.entry((a, b)).or_insert(0) += 1;
        *ma.entry(a).or_insert(0) += 1;
        *mb.entry(b).or_insert(0) += 1;
    }
    let mut mi = 0.0;
    for (&(a, b), &c) in &joint {
        // Integer-first ratio keeps independent tables at exactly ln(1) = 0.
        let ratio = (c * n) as f64 / (ma[&a] * mb[&b]) as f64;
        mi += (c as f64 / n as f64) * ratio.ln();
    }
    mi
}

fn top_two_gap(mut mis: Vec<f64>) -> f64 {
    mis.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top1 = mis[0];
    let top2 = if mis.len() > 1 { mis[1] } else { 0.0 };
    top1 - top2
}

pub fn posdis(table: &LanguageTable) -> f64 {
    let n_att = table.meta.n_att;
    let msg_len = table.meta.msg_len;
    let n = table.entries.len();
    if n == 0 {
        return 0.0;
    }
    let mut gaps = Vec::new();
    for j in 0..msg_len {
        let symbols: Vec<u16> = table.entries.iter().map(|e| e.message[j]).collect();
        let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
        for &s in &symbols {
            *counts.entry(s).or_insert(0) += 1;
        }
        let h = entropy_of_counts(&counts, n);
        if h <= 0.0 {
            continue;
        }
        let mis: Vec<f64> = (0..n_att)
            .map(|i| {
                let pairs: Vec<(u16, u16)> = table
                    .entries
                    .iter()
                    .map(|e| (e.message[j], e.input[i]))
                    .collect();
                mutual_information(&pairs)
            })
            .collect();
        gaps.push(top_two_gap(mis) / h);
    }
    if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }
}

/// Per-message occurrence count of each vocabulary symbol.
fn symbol_counts(table: &LanguageTable, symbol: u16) -> Vec<u16> {
    table
        .entries
        .iter()
        .map(|e| e.message.iter().filter(|&&s| s == symbol).count() as u16)
        .collect()
}

pub fn bosdis(table: &LanguageTable) -> f64 {
    let n_att = table.meta.n_att;
    let n = table.entries.len();
    if n == 0 {
        return 0.0;
    }
    let mut gaps = Vec::new();
    for v in 0..table.meta.vocab as u16 {
        let counts_per_msg = symbol_counts(table, v);
        let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
        for &c in &counts_per_msg {
            *counts.entry(c).or_insert(0) += 1;
        }
        let h = entropy_of_counts(&counts, n);
        if h <= 0.0 {
            continue;
        }
        let mis: Vec<f64> = (0..n_att)
            .map(|i| {
                let pairs: Vec<(u16, u16)> = counts_per_msg
                    .iter()
                    .zip(&table.entries)
                    .map(|(&c, e)| (c, e.input[i]))
                    .collect();
                mutual_information(&pairs)
            })
            .collect();
        gaps.push(top_two_gap(mis) / h);
    }
    if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    }
}

pub fn context_independence(table: &LanguageTable) -> f64 {
    let n = table.entries.len();
    if n == 0 {
        return 0.0;
    }
    let informative: Vec<bool> = (0..table.meta.vocab as u16)
        .map(|v| {
            let counts = symbol_counts(table, v);
            counts.iter().any(|&c| c != counts[0])
        })
        .collect();
    if informative.iter().all(|&b| !b) {
        return 0.0;
    }

    // Co-occurrence counts between concepts (attribute index, value) and
    // informative symbol occurrences.
    let mut concept_sym: BTreeMap<(u16, u16), BTreeMap<u16, usize>> = BTreeMap::new();
    let mut sym_total: BTreeMap<u16, usize> = BTreeMap::new();
    for e in &table.entries {
        for (i, &v) in e.input.iter().enumerate() {
            for &s in &e.message {
                if !informative[s as usize] {
                    continue;
                }
                *concept_sym
                    .entry((i as u16, v))
                    .or_default()
                    .entry(s)
                    .or_insert(0) += 1;
                *sym_total.entry(s).or_insert(0) += 1;
            }
        }
    }
    if concept_sym.is_empty() {
        return 0.0;
    }

    let mut total = 0.0;
    let mut n_concepts = 0usize;
    for row in concept_sym.values() {
        let concept_total: usize = row.values().sum();
        // s_c maximizes p(c | s) = count / sym_total[s].
        let mut best_sym = None;
        let mut best_pcs = -1.0;
        for (&s, &c) in row {
            let pcs = c as f64 / sym_total[&s] as f64;
            if pcs > best_pcs {
                best_pcs = pcs;
                best_sym = Some(s);
            }
        }
        let s_c = best_sym.unwrap();
        let psc = row[&s_c] as f64 / concept_total as f64;
        total += best_pcs * psc;
        n_concepts += 1;
    }
    total / n_concepts as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{LanguageEntry, LanguageMeta};
    use crate::data::{enumerate_in_distribution, ObjectSpace};

    fn table_from(
        inputs: Vec<Vec<u16>>,
        messages: Vec<Vec<u16>>,
        n_val: usize,
        vocab: usize,
    ) -> LanguageTable {
        LanguageTable {
            meta: LanguageMeta {
                n_att: inputs[0].len(),
                n_val,
                vocab,
                msg_len: messages[0].len(),
                topsim: None,
            },
            entries: inputs
                .into_iter()
                .zip(messages)
                .map(|(input, message)| LanguageEntry { input, message })
                .collect(),
        }
    }

    fn positional_table(space: &ObjectSpace) -> LanguageTable {
        let inputs = enumerate_in_distribution(space);
        let messages: Vec<Vec<u16>> = inputs.iter().map(|o| o.clone()).collect();
        table_from(inputs, messages, space.n_val, space.n_val)
    }

    #[test]
    fn positional_language_posdis_is_one() {
        let space = ObjectSpace::new(3, 5, 4).unwrap();
        let table = positional_table(&space);
        assert_eq!(posdis(&table), 1.0);
    }

    #[test]
    fn constant_language_scores_zero_everywhere() {
        let space = ObjectSpace::new(2, 3, 2).unwrap();
        let inputs = enumerate_in_distribution(&space);
        let n = inputs.len();
        let table = table_from(inputs, vec![vec![1, 1]; n], 3, 3);
        assert_eq!(posdis(&table), 0.0);
        assert_eq!(bosdis(&table), 0.0);
        assert_eq!(context_independence(&table), 0.0);
    }

    #[test]
    fn metrics_stay_in_unit_interval() {
        let space = ObjectSpace::new(2, 4, 3).unwrap();
        let inputs = enumerate_in_distribution(&space);
        let mut rng = crate::numeric::Rng::seeded(4);
        let messages: Vec<Vec<u16>> = inputs
            .iter()
            .map(|_| (0..5).map(|_| rng.usize_below(4) as u16).collect())
            .collect();
        let table = table_from(inputs, messages, 4, 4);
        for v in [posdis(&table), bosdis(&table), context_independence(&table)] {
            assert!((0.0..=1.0).contains(&v), "metric out of range: {v}");
        }
    }

    #[test]
    fn posdis_matches_hand_computed_mutual_information_oracle() {
        // Two binary attributes; message copies attribute 0 twice. Position
        // 0 and 1 both have I(s; a0) = H(s) = ln 2, I(s; a1) = 0, so
        // posdis = 1. Then corrupt position 1 to be constant: only position
        // 0 counts.
        let inputs = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let messages = vec![vec![0, 0], vec![0, 0], vec![1, 1], vec![1, 1]];
        let t = table_from(inputs.clone(), messages, 2, 2);
        assert_eq!(posdis(&t), 1.0);

        let messages = vec![vec![0, 7], vec![0, 7], vec![1, 7], vec![1, 7]];
        let t = table_from(inputs.clone(), messages, 2, 8);
        assert_eq!(posdis(&t), 1.0);

        // Independent oracle for a mixed case: position 0 = a0 XOR a1 has
        // zero MI with each attribute alone; position 1 = a1 has full MI.
        let messages = vec![vec![0, 0], vec![1, 1], vec![1, 0], vec![0, 1]];
        let t = table_from(inputs, messages, 2, 2);
        // Position 0: gap = 0 - 0; position 1: gap = ln2 - 0, H = ln2.
        // Mean over both positions = 0.5.
        assert!((posdis(&t) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bosdis_detects_order_free_structure() {
        // Symbol 0's count encodes attribute 0; symbol 1 fills the rest.
        // Counts of both symbols are informative about a0 only.
        let inputs = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let messages = vec![
            vec![0, 0, 1],
            vec![0, 0, 1],
            vec![0, 1, 1],
            vec![0, 1, 1],
        ];
        let t = table_from(inputs, messages, 2, 2);
        assert_eq!(bosdis(&t), 1.0);
    }

    #[test]
    fn context_independence_perfect_alignment() {
        // One attribute; symbol = value everywhere: p(c|s_c) = p(s_c|c) = 1.
        let inputs = vec![vec![0], vec![1], vec![2]];
        let messages = vec![vec![0, 0], vec![1, 1], vec![2, 2]];
        let t = table_from(inputs, messages, 3, 3);
        assert_eq!(context_independence(&t), 1.0);
    }
}
