//! Learned expert-weight estimation and its summary statistics.

use serde::{Deserialize, Serialize};

use crate::agents::{Message, SenderParams, UnrollMode};
use crate::data::{encode, Object, ObjectSpace};
use crate::error::Result;

/// Mixture weights over experts (ascending-topsim order) inferred from which
/// expert each training message best matches.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDistribution {
    /// Per-expert share of training inputs (ties split), before
    /// renormalization. Sums with `unmatched` to 1.
    pub raw: Vec<f64>,
    /// Share of inputs whose best expert accuracy did not exceed chance.
    pub unmatched: f64,
    /// Raw weights renormalized over the matched mass; `None` when every
    /// input was unmatched.
    pub normalized: Option<Vec<f64>>,
}

/// Assign each training input to the expert whose message the imitator
/// reproduces best (teacher-forced argmax decoding). Accuracies at or below
/// `chance` leave the input unmatched; exact ties split the input's mass
/// equally among the tied experts.
pub fn expert_weights(
    imitator: &SenderParams,
    space: &ObjectSpace,
    inputs: &[Object],
    expert_messages: &[Vec<Message>],
    chance: f64,
) -> Result<WeightDistribution> {
    let k = expert_messages.len();
    let n = inputs.len();
    let mut raw = vec![0.0; k];
    let mut unmatched = 0.0;
    let share = 1.0 / n as f64;

    for (idx, obj) in inputs.iter().enumerate() {
        let x = encode(space, obj)?;
        let mut accs = Vec::with_capacity(k);
        for msgs in expert_messages {
            let m = &msgs[idx];
            let ro = imitator.unroll(&x, UnrollMode::TeacherForced(m), None)?;
            accs.push(ro.message.per_symbol_accuracy(m)?);
        }
        let best = accs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if best <= chance {
            unmatched += share;
            continue;
        }
        let tied: Vec<usize> = (0..k).filter(|&i| accs[i] == best).collect();
        for &i in &tied {
            raw[i] += share / tied.len() as f64;
        }
    }

    let matched: f64 = raw.iter().sum();
    let normalized = if matched > 0.0 {
        Some(raw.iter().map(|w| w / matched).collect())
    } else {
        None
    };
    Ok(WeightDistribution {
        raw,
        unmatched,
        normalized,
    })
}

/// Shannon entropy of a normalized weight vector, with 0 ln 0 = 0.
pub fn weight_entropy(w: &[f64]) -> f64 {
    -w.iter()
        .filter(|&&wi| wi > 0.0)
        .map(|&wi| wi * wi.ln())
        .sum::<f64>()
}

/// Fisher's moment coefficient of skew with population moments:
/// (1/k) * sum(((w_i - mean) / sigma)^3). `None` when sigma is zero.
pub fn weight_skew(w: &[f64]) -> Option<f64> {
    let k = w.len() as f64;
    let mean = w.iter().sum::<f64>() / k;
    let var = w.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / k;
    if var == 0.0 {
        return None;
    }
    let sigma = var.sqrt();
    Some(
        w.iter()
            .map(|&x| {
                let z = (x - mean) / sigma;
                z * z * z
            })
            .sum::<f64>()
            / k,
    )
}
