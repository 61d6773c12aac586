//! Small reverse-mode tape over vector-valued nodes.
//!
//! Forward values are computed eagerly with the kernels in [`crate::numeric::ops`];
//! each record carries whatever saved state its hand-derived backward rule
//! needs. Parameters are not copied onto the tape: ops reference them by name
//! and the backward pass accumulates straight into the store's gradient
//! tensors. One tape covers one training example; parameters must not change
//! between a forward pass and its backward call.

use crate::numeric::ops::{self, GruNames};
use crate::numeric::store::ParamStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

enum Rec {
    /// Constant input; no gradient flows past it.
    Input,
    /// A parameter vector used directly as a node (tabular policies).
    Param { name: &'static str },
    Affine {
        w: &'static str,
        b: &'static str,
        x: NodeId,
    },
    /// Row lookup in an embedding table.
    Embed { table: &'static str, row: usize },
    Gru {
        names: GruNames,
        e: NodeId,
        h: NodeId,
        r: Vec<f64>,
        z: Vec<f64>,
        n: Vec<f64>,
        u: Vec<f64>,
    },
    LayerNorm {
        gamma: &'static str,
        beta: &'static str,
        x: NodeId,
        xhat: Vec<f64>,
        inv_std: f64,
    },
    LogSoftmax { x: NodeId, probs: Vec<f64> },
    /// Independent log-softmax over consecutive blocks of equal width.
    LogSoftmaxBlocks {
        x: NodeId,
        block: usize,
        probs: Vec<f64>,
    },
    /// Scalar y = x[idx].
    Pick { x: NodeId, idx: usize },
    /// Scalar Shannon entropy of the distribution exp(logp).
    Entropy { logp: NodeId, probs: Vec<f64> },
    /// Scalar weighted sum of scalar nodes.
    SumScaled { terms: Vec<(NodeId, f64)> },
}

pub struct Tape {
    vals: Vec<Vec<f64>>,
    recs: Vec<Rec>,
}

impl Tape {
    pub fn new() -> Self {
        Self {
            vals: Vec::with_capacity(64),
            recs: Vec::with_capacity(64),
        }
    }

    fn push(&mut self, val: Vec<f64>, rec: Rec) -> NodeId {
        let id = NodeId(self.vals.len());
        self.vals.push(val);
        self.recs.push(rec);
        id
    }

    pub fn val(&self, id: NodeId) -> &[f64] {
        &self.vals[id.0]
    }

    pub fn scalar(&self, id: NodeId) -> f64 {
        debug_assert_eq!(self.vals[id.0].len(), 1);
        self.vals[id.0][0]
    }

    pub fn input(&mut self, values: Vec<f64>) -> NodeId {
        self.push(values, Rec::Input)
    }

    pub fn param_vec(&mut self, store: &ParamStore, name: &'static str) -> NodeId {
        self.push(store.get(name).values().to_vec(), Rec::Param { name })
    }

    pub fn affine(
        &mut self,
        store: &ParamStore,
        w: &'static str,
        b: &'static str,
        x: NodeId,
    ) -> NodeId {
        let y = ops::affine_unchecked(store.get(w), store.get(b), self.val(x));
        self.push(y, Rec::Affine { w, b, x })
    }

    pub fn embed(&mut self, store: &ParamStore, table: &'static str, row: usize) -> NodeId {
        let e = store.get(table).row(row).to_vec();
        self.push(e, Rec::Embed { table, row })
    }

    pub fn gru_step(
        &mut self,
        store: &ParamStore,
        names: &GruNames,
        e: NodeId,
        h: NodeId,
    ) -> NodeId {
        let fwd = ops::gru_step(store, names, self.val(e), self.val(h));
        self.push(
            fwd.h_next,
            Rec::Gru {
                names: *names,
                e,
                h,
                r: fwd.r,
                z: fwd.z,
                n: fwd.n,
                u: fwd.u,
            },
        )
    }

    pub fn layer_norm(
        &mut self,
        store: &ParamStore,
        gamma: &'static str,
        beta: &'static str,
        x: NodeId,
        eps: f64,
    ) -> NodeId {
        let fwd = ops::layer_norm(
            store.get(gamma).values(),
            store.get(beta).values(),
            self.val(x),
            eps,
        )
        .expect("layer_norm dimension checked at construction");
        self.push(
            fwd.y,
            Rec::LayerNorm {
                gamma,
                beta,
                x,
                xhat: fwd.xhat,
                inv_std: fwd.inv_std,
            },
        )
    }

    pub fn log_softmax(&mut self, x: NodeId) -> NodeId {
        let y = ops::log_softmax(self.val(x));
        let probs = y.iter().map(|&l| l.exp()).collect();
        self.push(y, Rec::LogSoftmax { x, probs })
    }

    pub fn log_softmax_blocks(&mut self, x: NodeId, n_blocks: usize) -> NodeId {
        let xs = self.val(x);
        assert_eq!(xs.len() % n_blocks, 0, "block count must divide length");
        let block = xs.len() / n_blocks;
        let mut y = Vec::with_capacity(xs.len());
        for b in 0..n_blocks {
            y.extend(ops::log_softmax(&xs[b * block..(b + 1) * block]));
        }
        let probs = y.iter().map(|&l| l.exp()).collect();
        self.push(y, Rec::LogSoftmaxBlocks { x, block, probs })
    }

    pub fn pick(&mut self, x: NodeId, idx: usize) -> NodeId {
        let v = self.val(x)[idx];
        self.push(vec![v], Rec::Pick { x, idx })
    }

    pub fn entropy_from_logp(&mut self, logp: NodeId) -> NodeId {
        let l = self.val(logp);
        let h = ops::entropy_from_logp(l);
        let probs = l.iter().map(|&v| v.exp()).collect();
        self.push(vec![h], Rec::Entropy { logp, probs })
    }

    /// Weighted sum of scalar nodes; the workhorse for assembling losses.
    pub fn sum_scaled(&mut self, terms: &[(NodeId, f64)]) -> NodeId {
        let v = terms
            .iter()
            .map(|&(id, c)| {
                debug_assert_eq!(self.vals[id.0].len(), 1, "sum_scaled needs scalar terms");
                c * self.vals[id.0][0]
            })
            .sum();
        self.push(vec![v], Rec::SumScaled { terms: terms.to_vec() })
    }

    /// Reverse pass from a scalar `loss` node, seeding d(loss)/d(loss) =
    /// `weight`. Gradients accumulate into `store` (mean-over-batch is
    /// achieved by passing weight = 1/batch_size per example).
    pub fn backward(&self, store: &mut ParamStore, loss: NodeId, weight: f64) {
        assert_eq!(self.vals[loss.0].len(), 1, "backward needs a scalar loss");
        let mut grads: Vec<Vec<f64>> = self.vals.iter().map(|v| vec![0.0; v.len()]).collect();
        grads[loss.0][0] = weight;

        for id in (0..=loss.0).rev() {
            if grads[id].iter().all(|&g| g == 0.0) {
                continue;
            }
            // Take this node's gradient out so we can borrow others mutably.
            let g = std::mem::take(&mut grads[id]);
            match &self.recs[id] {
                Rec::Input => {}
                Rec::Param { name } => {
                    add_to(store.grad_mut(name).values_mut(), &g);
                }
                Rec::Affine { w, b, x } => {
                    ops::add_matvec_transposed(store.get(w), &g, &mut grads[x.0]);
                    ops::add_outer(&g, &self.vals[x.0], store.grad_mut(w));
                    for (gb, gi) in store.grad_mut(b).values_mut().iter_mut().zip(&g) {
                        *gb += gi;
                    }
                }
                Rec::Embed { table, row } => {
                    let cols = store.get(table).cols();
                    let gt = store.grad_mut(table).values_mut();
                    for (j, gi) in g.iter().enumerate() {
                        gt[row * cols + j] += gi;
                    }
                }
                Rec::Gru {
                    names,
                    e,
                    h,
                    r,
                    z,
                    n,
                    u,
                } => {
                    let d = g.len();
                    let hv = &self.vals[h.0];
                    let ev = &self.vals[e.0];

                    let mut dn = vec![0.0; d];
                    let mut dz = vec![0.0; d];
                    let mut dh_direct = vec![0.0; d];
                    for i in 0..d {
                        dn[i] = g[i] * (1.0 - z[i]);
                        dz[i] = g[i] * (hv[i] - n[i]);
                        dh_direct[i] = g[i] * z[i];
                    }

                    // Candidate: n = tanh(a_n), a_n = W_n e + r*u + b_wn.
                    let mut dan = vec![0.0; d];
                    let mut dr = vec![0.0; d];
                    let mut du = vec![0.0; d];
                    for i in 0..d {
                        dan[i] = dn[i] * (1.0 - n[i] * n[i]);
                        dr[i] = dan[i] * u[i];
                        du[i] = dan[i] * r[i];
                    }
                    // Gate pre-activations.
                    let mut dar = vec![0.0; d];
                    let mut daz = vec![0.0; d];
                    for i in 0..d {
                        dar[i] = dr[i] * r[i] * (1.0 - r[i]);
                        daz[i] = dz[i] * z[i] * (1.0 - z[i]);
                    }

                    let mut de = vec![0.0; ev.len()];
                    let mut dh = dh_direct;

                    ops::add_outer(&dan, ev, store.grad_mut(names.wn));
                    ops::add_matvec_transposed(store.get(names.wn), &dan, &mut de);
                    add_to(store.grad_mut(names.bwn).values_mut(), &dan);

                    ops::add_outer(&du, hv, store.grad_mut(names.un));
                    ops::add_matvec_transposed(store.get(names.un), &du, &mut dh);
                    add_to(store.grad_mut(names.bun).values_mut(), &du);

                    ops::add_outer(&daz, ev, store.grad_mut(names.wz));
                    ops::add_outer(&daz, hv, store.grad_mut(names.uz));
                    ops::add_matvec_transposed(store.get(names.wz), &daz, &mut de);
                    ops::add_matvec_transposed(store.get(names.uz), &daz, &mut dh);
                    add_to(store.grad_mut(names.bz).values_mut(), &daz);

                    ops::add_outer(&dar, ev, store.grad_mut(names.wr));
                    ops::add_outer(&dar, hv, store.grad_mut(names.ur));
                    ops::add_matvec_transposed(store.get(names.wr), &dar, &mut de);
                    ops::add_matvec_transposed(store.get(names.ur), &dar, &mut dh);
                    add_to(store.grad_mut(names.br).values_mut(), &dar);

                    add_to(&mut grads[e.0], &de);
                    add_to(&mut grads[h.0], &dh);
                }
                Rec::LayerNorm {
                    gamma,
                    beta,
                    x,
                    xhat,
                    inv_std,
                } => {
                    let d = g.len();
                    let gv = store.get(gamma).values().to_vec();
                    // dxhat = g * gamma
                    let dxhat: Vec<f64> = (0..d).map(|i| g[i] * gv[i]).collect();
                    let mean_dxhat = dxhat.iter().sum::<f64>() / d as f64;
                    let mean_dxhat_xhat = dxhat
                        .iter()
                        .zip(xhat)
                        .map(|(&a, &b)| a * b)
                        .sum::<f64>()
                        / d as f64;
                    for i in 0..d {
                        grads[x.0][i] +=
                            inv_std * (dxhat[i] - mean_dxhat - xhat[i] * mean_dxhat_xhat);
                    }
                    let gg = store.grad_mut(gamma).values_mut();
                    for i in 0..d {
                        gg[i] += g[i] * xhat[i];
                    }
                    add_to(store.grad_mut(beta).values_mut(), &g);
                }
                Rec::LogSoftmax { x, probs } => {
                    let gsum: f64 = g.iter().sum();
                    for i in 0..g.len() {
                        grads[x.0][i] += g[i] - probs[i] * gsum;
                    }
                }
                Rec::LogSoftmaxBlocks { x, block, probs } => {
                    for (b, chunk) in g.chunks(*block).enumerate() {
                        let gsum: f64 = chunk.iter().sum();
                        for i in 0..*block {
                            let k = b * block + i;
                            grads[x.0][k] += chunk[i] - probs[k] * gsum;
                        }
                    }
                }
                Rec::Pick { x, idx } => {
                    grads[x.0][*idx] += g[0];
                }
                Rec::Entropy { logp, probs } => {
                    // dH/dl_j = -p_j (l_j + 1)
                    let l = &self.vals[logp.0];
                    for j in 0..l.len() {
                        grads[logp.0][j] += g[0] * (-probs[j] * (l[j] + 1.0));
                    }
                }
                Rec::SumScaled { terms } => {
                    for &(t, c) in terms {
                        grads[t.0][0] += g[0] * c;
                    }
                }
            }
        }
    }
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

fn add_to(acc: &mut [f64], g: &[f64]) {
    for (a, b) in acc.iter_mut().zip(g) {
        *a += b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::tensor::Tensor;

    #[test]
    fn affine_backward_accumulates_exact_gradients() {
        // loss = sum of outputs of y = W x + b; dW = 1 * x^T, db = 1, by hand.
        let mut store = ParamStore::new();
        store.add(
            "w",
            Tensor::new(vec![2, 3], vec![0.5, -1.0, 2.0, 1.5, 0.0, -0.5]).unwrap(),
        );
        store.add("b", Tensor::vector(vec![0.1, -0.2]));

        let mut tape = Tape::new();
        let x = tape.input(vec![1.0, 2.0, 3.0]);
        let y = tape.affine(&store, "w", "b", x);
        let p0 = tape.pick(y, 0);
        let p1 = tape.pick(y, 1);
        let loss = tape.sum_scaled(&[(p0, 1.0), (p1, 1.0)]);
        tape.backward(&mut store, loss, 1.0);

        assert_eq!(
            store.grad("w").values(),
            &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0][..]
        );
        assert_eq!(store.grad("b").values(), &[1.0, 1.0][..]);
    }

    #[test]
    fn backward_weight_scales_gradients() {
        let mut store = ParamStore::new();
        store.add("b", Tensor::vector(vec![0.0, 0.0]));
        store.add("w", Tensor::zeros(vec![2, 2]));

        let mut tape = Tape::new();
        let x = tape.input(vec![1.0, 1.0]);
        let y = tape.affine(&store, "w", "b", x);
        let p = tape.pick(y, 0);
        tape.backward(&mut store, p, 0.25);
        assert_eq!(store.grad("b").values(), &[0.25, 0.0][..]);
    }

    #[test]
    fn entropy_of_uniform_is_log_d() {
        let mut tape = Tape::new();
        let z = tape.input(vec![0.0; 8]);
        let logp = tape.log_softmax(z);
        let h = tape.entropy_from_logp(logp);
        assert!((tape.scalar(h) - (8.0f64).ln()).abs() < 1e-12);
    }
}
