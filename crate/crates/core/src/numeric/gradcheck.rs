//! Finite-difference validation of hand-derived gradients.

use crate::numeric::rng::Rng;
use crate::numeric::store::ParamStore;

/// Result of comparing analytic gradients against central finite differences.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// (param name, flat index) of the worst coordinate.
    pub worst: Option<(String, usize)>,
    pub coords_checked: usize,
    pub tol: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error < self.tol
    }
}

/// Central finite-difference step. Small enough for curvature error, large
/// enough that fp64 rounding stays ~1e-11 on O(1) losses.
pub const FD_STEP: f64 = 1e-5;

/// Check analytic gradients of a deterministic scalar loss.
///
/// `loss_and_grads` must evaluate the loss at the current parameters and
/// leave the full gradient in the store's accumulators; `loss_only` must
/// evaluate the identical loss without touching gradients. Up to
/// `coords_per_param` coordinates are sampled per parameter.
pub fn grad_check<F, G>(
    store: &mut ParamStore,
    mut loss_and_grads: F,
    mut loss_only: G,
    tol: f64,
    coords_per_param: usize,
    rng: &mut Rng,
) -> GradCheckReport
where
    F: FnMut(&mut ParamStore) -> f64,
    G: FnMut(&ParamStore) -> f64,
{
    store.zero_grads();
    let _ = loss_and_grads(store);

    let names: Vec<&'static str> = store.names().to_vec();
    let mut max_rel = 0.0f64;
    let mut worst = None;
    let mut checked = 0usize;

    for name in names {
        let len = store.get(name).len();
        let mut coords: Vec<usize> = (0..len).collect();
        if len > coords_per_param {
            rng.shuffle(&mut coords);
            coords.truncate(coords_per_param);
        }
        for j in coords {
            let analytic = store.grad(name).values()[j];
            let orig = store.get(name).values()[j];

            store.get_mut(name).values_mut()[j] = orig + FD_STEP;
            let plus = loss_only(store);
            store.get_mut(name).values_mut()[j] = orig - FD_STEP;
            let minus = loss_only(store);
            store.get_mut(name).values_mut()[j] = orig;

            let fd = (plus - minus) / (2.0 * FD_STEP);
            let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(1e-6);
            if rel > max_rel {
                max_rel = rel;
                worst = Some((name.to_string(), j));
            }
            checked += 1;
        }
    }
    store.zero_grads();

    GradCheckReport {
        max_rel_error: max_rel,
        worst,
        coords_checked: checked,
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::tape::Tape;
    use crate::numeric::tensor::Tensor;

    #[test]
    fn affine_loss_passes_at_tight_tolerance() {
        let mut rng = Rng::seeded(42);
        let mut store = ParamStore::new();
        store.add_uniform("w", vec![4, 3], 3, 1.0, &mut rng);
        store.add_uniform("b", vec![4], 3, 1.0, &mut rng);
        let x = vec![0.3, -1.2, 0.8];

        let loss_fn = |store: &ParamStore| {
            let mut tape = Tape::new();
            let xn = tape.input(x.clone());
            let y = tape.affine(store, "w", "b", xn);
            let lp = tape.log_softmax(y);
            let p = tape.pick(lp, 2);
            -tape.scalar(p)
        };
        let report = grad_check(
            &mut store,
            |store| {
                let mut tape = Tape::new();
                let xn = tape.input(x.clone());
                let y = tape.affine(store, "w", "b", xn);
                let lp = tape.log_softmax(y);
                let p = tape.pick(lp, 2);
                let loss = tape.sum_scaled(&[(p, -1.0)]);
                tape.backward(store, loss, 1.0);
                tape.scalar(loss)
            },
            loss_fn,
            1e-8,
            64,
            &mut rng,
        );
        assert!(
            report.passed(),
            "max rel error {} at {:?}",
            report.max_rel_error,
            report.worst
        );
    }

    #[test]
    fn report_catches_a_wrong_gradient() {
        let mut store = ParamStore::new();
        store.add("w", Tensor::vector(vec![0.7]));
        let report = grad_check(
            &mut store,
            |store| {
                // Claim d(w^2)/dw = 3w (wrong on purpose).
                let w = store.get("w").values()[0];
                store.grad_mut("w").values_mut()[0] = 3.0 * w;
                w * w
            },
            |store| {
                let w = store.get("w").values()[0];
                w * w
            },
            1e-4,
            8,
            &mut Rng::seeded(1),
        );
        assert!(!report.passed());
    }
}
