//! Forward kernels shared by the evaluation path and the tape.
//!
//! Everything here is plain f64 math on slices. The tape records these same
//! computations and adds hand-derived backward rules; keeping one set of
//! forward kernels means the trained and evaluated networks cannot drift.

use crate::error::{Error, Result};
use crate::numeric::rng::Rng;
use crate::numeric::store::ParamStore;
use crate::numeric::tensor::Tensor;

/// y = W x + b, with shape checking. The unchecked variant is used by the
/// tape after shapes were validated at parameter construction.
pub fn affine(w: &Tensor, b: &Tensor, x: &[f64]) -> Result<Vec<f64>> {
    if w.shape().len() != 2 || w.cols() != x.len() || b.len() != w.rows() {
        return Err(Error::ShapeMismatch {
            op: "affine",
            expected: format!("W[m x {}], b[m]", x.len()),
            got: format!("W{:?}, b[{}]", w.shape(), b.len()),
        });
    }
    Ok(affine_unchecked(w, b, x))
}

pub(crate) fn affine_unchecked(w: &Tensor, b: &Tensor, x: &[f64]) -> Vec<f64> {
    let m = w.rows();
    let n = w.cols();
    let wv = w.values();
    let mut y = b.values().to_vec();
    for i in 0..m {
        let row = &wv[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        y[i] += acc;
    }
    y
}

/// grad_x += W^T g; used by backward passes.
pub(crate) fn add_matvec_transposed(w: &Tensor, g: &[f64], grad_x: &mut [f64]) {
    let m = w.rows();
    let n = w.cols();
    let wv = w.values();
    for i in 0..m {
        let gi = g[i];
        if gi == 0.0 {
            continue;
        }
        let row = &wv[i * n..(i + 1) * n];
        for (gx, a) in grad_x.iter_mut().zip(row) {
            *gx += gi * a;
        }
    }
}

/// grad_w += g x^T (outer product accumulate).
pub(crate) fn add_outer(g: &[f64], x: &[f64], grad_w: &mut Tensor) {
    let n = x.len();
    let gv = grad_w.values_mut();
    for (i, gi) in g.iter().enumerate() {
        if *gi == 0.0 {
            continue;
        }
        let row = &mut gv[i * n..(i + 1) * n];
        for (gw, xj) in row.iter_mut().zip(x) {
            *gw += gi * xj;
        }
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Parameter names of one GRU cell inside a [`ParamStore`].
#[derive(Debug, Clone, Copy)]
pub struct GruNames {
    pub wr: &'static str,
    pub ur: &'static str,
    pub br: &'static str,
    pub wz: &'static str,
    pub uz: &'static str,
    pub bz: &'static str,
    pub wn: &'static str,
    pub un: &'static str,
    pub bun: &'static str,
    pub bwn: &'static str,
}

/// Saved forward state of one GRU step, enough to run the backward rule.
#[derive(Debug, Clone)]
pub struct GruForward {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub n: Vec<f64>,
    /// Hidden-side candidate pre-activation U_n h + b_un (gated by r).
    pub u: Vec<f64>,
    pub h_next: Vec<f64>,
}

/// One GRU step under the convention
///   r = sigmoid(W_r e + U_r h + b_r)
///   z = sigmoid(W_z e + U_z h + b_z)
///   n = tanh(W_n e + r * (U_n h + b_un) + b_wn)
///   h' = (1 - z) * n + z * h
pub fn gru_step(store: &ParamStore, names: &GruNames, e: &[f64], h: &[f64]) -> GruForward {
    let mut ar = affine_unchecked(store.get(names.wr), store.get(names.br), e);
    add_matvec(store.get(names.ur), h, &mut ar);
    let r: Vec<f64> = ar.iter().map(|&a| sigmoid(a)).collect();

    let mut az = affine_unchecked(store.get(names.wz), store.get(names.bz), e);
    add_matvec(store.get(names.uz), h, &mut az);
    let z: Vec<f64> = az.iter().map(|&a| sigmoid(a)).collect();

    let u = affine_unchecked(store.get(names.un), store.get(names.bun), h);
    let mut an = affine_unchecked(store.get(names.wn), store.get(names.bwn), e);
    for i in 0..an.len() {
        an[i] += r[i] * u[i];
    }
    let n: Vec<f64> = an.iter().map(|&a| a.tanh()).collect();

    let h_next: Vec<f64> = (0..n.len())
        .map(|i| (1.0 - z[i]) * n[i] + z[i] * h[i])
        .collect();

    GruForward { r, z, n, u, h_next }
}

fn add_matvec(w: &Tensor, x: &[f64], acc: &mut [f64]) {
    let n = w.cols();
    let wv = w.values();
    for (i, a) in acc.iter_mut().enumerate() {
        let row = &wv[i * n..(i + 1) * n];
        let mut s = 0.0;
        for (wi, xi) in row.iter().zip(x) {
            s += wi * xi;
        }
        *a += s;
    }
}

/// Saved forward state of layer normalization.
#[derive(Debug, Clone)]
pub struct LayerNormForward {
    pub xhat: Vec<f64>,
    pub inv_std: f64,
    pub y: Vec<f64>,
}

/// y = gamma * (x - mean) / sqrt(var + eps) + beta, variance biased (divide
/// by d). Requires d >= 2; a single element has no variance to normalize.
pub fn layer_norm(gamma: &[f64], beta: &[f64], x: &[f64], eps: f64) -> Result<LayerNormForward> {
    let d = x.len();
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "layer_norm needs dimension >= 2, got {d}"
        )));
    }
    let mean = x.iter().sum::<f64>() / d as f64;
    let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
    let inv_std = 1.0 / (var + eps).sqrt();
    let xhat: Vec<f64> = x.iter().map(|&v| (v - mean) * inv_std).collect();
    let y: Vec<f64> = xhat
        .iter()
        .zip(gamma.iter().zip(beta))
        .map(|(&xh, (&g, &b))| g * xh + b)
        .collect();
    Ok(LayerNormForward { xhat, inv_std, y })
}

/// Numerically stable log-softmax via max shift.
pub fn log_softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = z.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    z.iter().map(|&v| v - max - log_sum).collect()
}

/// Shannon entropy (nats) of the distribution given by log-probabilities.
pub fn entropy_from_logp(logp: &[f64]) -> f64 {
    -logp.iter().map(|&l| l.exp() * l).sum::<f64>()
}

pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate() {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

/// Draw an index with probability exp(logp[i]). Errors if the input is not a
/// normalized log-distribution.
pub fn sample_categorical(logp: &[f64], rng: &mut Rng) -> Result<usize> {
    let total: f64 = logp.iter().map(|&l| l.exp()).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "sample_categorical: log-probabilities sum to {total}, not 1"
        )));
    }
    let u = rng.f64();
    let mut cum = 0.0;
    for (i, &l) in logp.iter().enumerate() {
        cum += l.exp();
        if u < cum {
            return Ok(i);
        }
    }
    Ok(logp.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rng::Rng;

    fn tensor(shape: Vec<usize>, values: Vec<f64>) -> Tensor {
        Tensor::new(shape, values).unwrap()
    }

    #[test]
    fn affine_identity() {
        let w = tensor(vec![2, 2], vec![1.0, 0.0, 0.0, 1.0]);
        let b = Tensor::vector(vec![0.0, 0.0]);
        assert_eq!(affine(&w, &b, &[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn affine_zero_weights_returns_bias() {
        let w = Tensor::zeros(vec![2, 3]);
        let b = Tensor::vector(vec![1.0, 2.0]);
        assert_eq!(affine(&w, &b, &[9.0, -4.0, 0.5]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn affine_matches_triple_loop_oracle() {
        let mut rng = Rng::seeded(11);
        let m = 5;
        let n = 3;
        let wv: Vec<f64> = (0..m * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let bv: Vec<f64> = (0..m).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let w = tensor(vec![m, n], wv.clone());
        let b = Tensor::vector(bv.clone());
        let y = affine(&w, &b, &x).unwrap();

        // Independent naive oracle.
        let mut expect = vec![0.0; m];
        for i in 0..m {
            expect[i] = bv[i];
            for j in 0..n {
                expect[i] += wv[i * n + j] * x[j];
            }
        }
        for i in 0..m {
            assert!((y[i] - expect[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_rejects_shape_mismatch() {
        let w = Tensor::zeros(vec![2, 3]);
        let b = Tensor::vector(vec![0.0, 0.0]);
        assert!(affine(&w, &b, &[1.0, 2.0]).is_err());
    }

    fn zero_gru_store(d_e: usize, d_h: usize) -> (ParamStore, GruNames) {
        let names = GruNames {
            wr: "gru.wr",
            ur: "gru.ur",
            br: "gru.br",
            wz: "gru.wz",
            uz: "gru.uz",
            bz: "gru.bz",
            wn: "gru.wn",
            un: "gru.un",
            bun: "gru.bun",
            bwn: "gru.bwn",
        };
        let mut s = ParamStore::new();
        for m in [names.wr, names.wz, names.wn] {
            s.add(m, Tensor::zeros(vec![d_h, d_e]));
        }
        for m in [names.ur, names.uz, names.un] {
            s.add(m, Tensor::zeros(vec![d_h, d_h]));
        }
        for b in [names.br, names.bz, names.bun, names.bwn] {
            s.add(b, Tensor::zeros(vec![d_h]));
        }
        (s, names)
    }

    #[test]
    fn gru_all_zero_params_halves_hidden_state() {
        let (s, names) = zero_gru_store(3, 4);
        let h = vec![1.0, -2.0, 0.5, 4.0];
        let out = gru_step(&s, &names, &[0.0, 0.0, 0.0], &h);
        // z = r = 0.5, candidate = 0, so h' = z * h.
        for i in 0..4 {
            assert!((out.h_next[i] - 0.5 * h[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn gru_output_respects_gate_bounds() {
        let mut rng = Rng::seeded(5);
        let d_e = 3;
        let d_h = 6;
        let (mut s, names) = zero_gru_store(d_e, d_h);
        for name in s.names().to_vec() {
            let t = s.get_mut(name);
            for v in t.values_mut() {
                *v = rng.uniform(-2.0, 2.0);
            }
        }
        let e: Vec<f64> = (0..d_e).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let h: Vec<f64> = (0..d_h).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let h_abs_max = h.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        let out = gru_step(&s, &names, &e, &h);
        for &v in &out.h_next {
            assert!(v.abs() < 1.0 + h_abs_max);
        }
    }

    #[test]
    fn layer_norm_constant_input_is_zeroed() {
        let x = vec![3.0; 8];
        let out = layer_norm(&[1.0; 8], &[0.0; 8], &x, 1e-5).unwrap();
        for &v in &out.y {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn layer_norm_preserves_already_normalized_pair() {
        let out = layer_norm(&[1.0, 1.0], &[0.0, 0.0], &[1.0, -1.0], 1e-12).unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-6);
        assert!((out.y[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn layer_norm_standardizes_random_input() {
        let mut rng = Rng::seeded(9);
        let x: Vec<f64> = (0..8).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let out = layer_norm(&[1.0; 8], &[0.0; 8], &x, 1e-12).unwrap();
        let mean = out.y.iter().sum::<f64>() / 8.0;
        let var = out.y.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / 8.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn layer_norm_rejects_scalar() {
        assert!(layer_norm(&[1.0], &[0.0], &[5.0], 1e-5).is_err());
    }

    #[test]
    fn log_softmax_uniform() {
        let out = log_softmax(&[0.0; 10]);
        for &v in &out {
            assert!((v - (0.1f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn log_softmax_is_stable_under_large_inputs() {
        let out = log_softmax(&[1000.0, 0.0]);
        assert!(out.iter().all(|v| v.is_finite()));
        assert!(out[0].abs() < 1e-9);
    }

    #[test]
    fn log_softmax_matches_naive_formula() {
        let mut rng = Rng::seeded(3);
        let z: Vec<f64> = (0..6).map(|_| rng.uniform(-4.0, 4.0)).collect();
        let out = log_softmax(&z);
        let total: f64 = z.iter().map(|&v| v.exp()).sum();
        for (o, &zi) in out.iter().zip(&z) {
            assert!((o - (zi.exp() / total).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_categorical_point_mass() {
        let mut rng = Rng::seeded(1);
        // log of (~0, 1, ~0)
        let logp = log_softmax(&[-1000.0, 0.0, -1000.0]);
        for _ in 0..50 {
            assert_eq!(sample_categorical(&logp, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn sample_categorical_uniform_frequencies() {
        let mut rng = Rng::seeded(123);
        let logp = log_softmax(&[0.0; 10]);
        let mut counts = [0usize; 10];
        let n = 100_000;
        for _ in 0..n {
            counts[sample_categorical(&logp, &mut rng).unwrap()] += 1;
        }
        for &c in &counts {
            let freq = c as f64 / n as f64;
            assert!((freq - 0.1).abs() < 0.01, "freq {freq}");
        }
    }

    #[test]
    fn sample_categorical_is_deterministic_per_seed() {
        let logp = log_softmax(&[0.3, -0.2, 1.0, 0.0]);
        let draw = |seed| {
            let mut rng = Rng::seeded(seed);
            (0..32)
                .map(|_| sample_categorical(&logp, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(77), draw(77));
    }

    #[test]
    fn sample_categorical_rejects_unnormalized() {
        let mut rng = Rng::seeded(1);
        assert!(sample_categorical(&[-0.1, -0.1], &mut rng).is_err());
    }
}
