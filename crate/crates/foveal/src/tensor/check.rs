//! Gradient verification against central finite differences.

use super::graph::{Graph, NodeId};
use super::params::{ParamId, ParamSet};
use crate::scalar::Scalar;

/// Compares the analytic gradient of `target` against central differences
/// with step `h`, re-running `build` (which must construct the loss graph
/// from the current parameter values) for every perturbed entry.
///
/// Returns max over entries of |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
pub fn finite_diff_check<S: Scalar>(
    params: &mut ParamSet<S>,
    target: ParamId,
    h: f64,
    mut build: impl FnMut(&ParamSet<S>) -> (Graph<S>, NodeId),
) -> f64 {
    assert!(h > 0.0, "finite difference step must be positive");
    params.zero_grads();
    let (mut graph, loss) = build(params);
    graph.backward(loss, params).expect("backward in finite_diff_check");
    let analytic: Vec<f64> = params.grad(target).data().iter().map(|v| v.as_f64()).collect();

    let mut worst = 0.0f64;
    for i in 0..analytic.len() {
        let original = params.value(target).data()[i];
        params.value_mut(target).data_mut()[i] = original + S::of(h);
        let (g_plus, loss_plus) = build(params);
        let up = g_plus.value(loss_plus).data()[0].as_f64();
        params.value_mut(target).data_mut()[i] = original - S::of(h);
        let (g_minus, loss_minus) = build(params);
        let down = g_minus.value(loss_minus).data()[0].as_f64();
        params.value_mut(target).data_mut()[i] = original;

        let numeric = (up - down) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / (analytic[i].abs() + numeric.abs()).max(1e-8);
        if err > worst {
            worst = err;
        }
    }
    worst
}
