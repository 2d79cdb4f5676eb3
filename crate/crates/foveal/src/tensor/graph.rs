//! Tape-based computation graph.
//!
//! Nodes are appended in execution order, so the node list is already a
//! topological order and backward is a single reverse sweep. Parameters live
//! outside the graph in a [`ParamSet`]; a `Param` node copies the value in at
//! record time and routes gradients back out during backward.

use super::params::{ParamId, ParamSet};
use super::{Tensor, TensorError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    Max,
    Avg,
}

enum Op<S: Scalar> {
    Input,
    Param(ParamId),
    StopGradient(NodeId),
    Add(NodeId, NodeId),
    Scale(NodeId, S),
    Clamp { src: NodeId, lo: S, hi: S },
    Reshape(NodeId),
    FullyConnected { input: NodeId, weights: NodeId, bias: NodeId },
    Conv2d { input: NodeId, kernels: NodeId, stride: usize, padding: usize },
    Pool { input: NodeId, kind: PoolKind, window: usize, stride: usize, argmax: Vec<usize> },
    Activation { src: NodeId, kind: Activation },
    Concat { inputs: Vec<NodeId>, axis: usize },
    SoftmaxCrossEntropy { logits: NodeId, labels: Vec<usize>, probs: Tensor<S> },
}

struct Node<S: Scalar> {
    op: Op<S>,
    value: Tensor<S>,
}

pub struct Graph<S: Scalar> {
    nodes: Vec<Node<S>>,
    grads: Vec<Option<Tensor<S>>>,
}

impl<S: Scalar> Default for Graph<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> Graph<S> {
    pub fn new() -> Self {
        Graph { nodes: Vec::new(), grads: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor<S> {
        &self.nodes[id.0].value
    }

    /// Gradient at a node from the most recent backward sweep.
    pub fn grad(&self, id: NodeId) -> Option<&Tensor<S>> {
        self.grads.get(id.0).and_then(|g| g.as_ref())
    }

    /// Node ids this node reads from; leaves return an empty list.
    pub fn parents(&self, id: NodeId) -> Vec<NodeId> {
        match &self.nodes[id.0].op {
            Op::Input | Op::Param(_) => vec![],
            Op::StopGradient(s) | Op::Scale(s, _) | Op::Reshape(s) => vec![*s],
            Op::Clamp { src, .. } | Op::Activation { src, .. } => vec![*src],
            Op::Add(a, b) => vec![*a, *b],
            Op::FullyConnected { input, weights, bias } => vec![*input, *weights, *bias],
            Op::Conv2d { input, kernels, .. } => vec![*input, *kernels],
            Op::Pool { input, .. } => vec![*input],
            Op::Concat { inputs, .. } => inputs.clone(),
            Op::SoftmaxCrossEntropy { logits, .. } => vec![*logits],
        }
    }

    fn push(&mut self, op: Op<S>, value: Tensor<S>) -> NodeId {
        debug_assert!(value.is_finite(), "non-finite forward value");
        self.nodes.push(Node { op, value });
        NodeId(self.nodes.len() - 1)
    }

    pub fn input(&mut self, value: Tensor<S>) -> NodeId {
        self.push(Op::Input, value)
    }

    pub fn param(&mut self, params: &ParamSet<S>, id: ParamId) -> NodeId {
        self.push(Op::Param(id), params.value(id).clone())
    }

    /// Value passes through; gradients stop here.
    pub fn stop_gradient(&mut self, src: NodeId) -> NodeId {
        let value = self.nodes[src.0].value.clone();
        self.push(Op::StopGradient(src), value)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, TensorError> {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if va.shape() != vb.shape() {
            return Err(TensorError::ShapeMismatch { op: "add", left: va.shape().to_vec(), right: vb.shape().to_vec() });
        }
        let mut out = va.clone();
        out.add_assign(vb);
        Ok(self.push(Op::Add(a, b), out))
    }

    pub fn scale(&mut self, src: NodeId, factor: S) -> NodeId {
        let out = self.nodes[src.0].value.map(|v| v * factor);
        self.push(Op::Scale(src, factor), out)
    }

    pub fn clamp(&mut self, src: NodeId, lo: S, hi: S) -> NodeId {
        let out = self.nodes[src.0].value.map(|v| v.min(hi).max(lo));
        self.push(Op::Clamp { src, lo, hi }, out)
    }

    pub fn reshape(&mut self, src: NodeId, shape: &[usize]) -> Result<NodeId, TensorError> {
        let out = self.nodes[src.0].value.clone().reshaped(shape)?;
        Ok(self.push(Op::Reshape(src), out))
    }

    /// out[b,o] = sum_i input[b,i] * weights[i,o] + bias[o]
    pub fn fully_connected(&mut self, input: NodeId, weights: NodeId, bias: NodeId) -> Result<NodeId, TensorError> {
        let x = &self.nodes[input.0].value;
        let w = &self.nodes[weights.0].value;
        let bv = &self.nodes[bias.0].value;
        if x.shape().len() != 2 {
            return Err(TensorError::BadRank { op: "fully_connected input", expected: 2, shape: x.shape().to_vec() });
        }
        if w.shape().len() != 2 || x.shape()[1] != w.shape()[0] {
            return Err(TensorError::ShapeMismatch { op: "fully_connected", left: x.shape().to_vec(), right: w.shape().to_vec() });
        }
        let (batch, in_dim) = (x.shape()[0], x.shape()[1]);
        let out_dim = w.shape()[1];
        if bv.shape() != [out_dim] {
            return Err(TensorError::ShapeMismatch { op: "fully_connected bias", left: bv.shape().to_vec(), right: vec![out_dim] });
        }
        let mut out = Tensor::zeros(&[batch, out_dim]);
        S::gemm(false, false, batch, in_dim, out_dim, x.data(), w.data(), S::zero(), out.data_mut());
        for b in 0..batch {
            let row = &mut out.data_mut()[b * out_dim..(b + 1) * out_dim];
            for (o, v) in row.iter_mut().enumerate() {
                *v += bv.data()[o];
            }
        }
        Ok(self.push(Op::FullyConnected { input, weights, bias }, out))
    }

    /// Cross-correlation with zero padding.
    pub fn conv2d(&mut self, input: NodeId, kernels: NodeId, stride: usize, padding: usize) -> Result<NodeId, TensorError> {
        assert!(stride >= 1, "conv2d stride must be positive");
        let x = &self.nodes[input.0].value;
        let k = &self.nodes[kernels.0].value;
        if x.shape().len() != 4 {
            return Err(TensorError::BadRank { op: "conv2d input", expected: 4, shape: x.shape().to_vec() });
        }
        if k.shape().len() != 4 || k.shape()[1] != x.shape()[1] {
            return Err(TensorError::ShapeMismatch { op: "conv2d", left: x.shape().to_vec(), right: k.shape().to_vec() });
        }
        let [batch, chans, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]];
        let [kout, _, kh, kw] = [k.shape()[0], k.shape()[1], k.shape()[2], k.shape()[3]];
        if kh > h + 2 * padding || kw > w + 2 * padding {
            return Err(TensorError::KernelTooLarge { kh, kw, h: h + 2 * padding, w: w + 2 * padding });
        }
        let oh = (h + 2 * padding - kh) / stride + 1;
        let ow = (w + 2 * padding - kw) / stride + 1;
        let cols_rows = chans * kh * kw;
        let mut cols = vec![S::zero(); cols_rows * oh * ow];
        let mut out = Tensor::zeros(&[batch, kout, oh, ow]);
        for b in 0..batch {
            im2col(x.data(), b, chans, h, w, kh, kw, stride, padding, oh, ow, &mut cols);
            let dst = &mut out.data_mut()[b * kout * oh * ow..(b + 1) * kout * oh * ow];
            S::gemm(false, false, kout, cols_rows, oh * ow, k.data(), &cols, S::zero(), dst);
        }
        Ok(self.push(Op::Conv2d { input, kernels, stride, padding }, out))
    }

    pub fn pool(&mut self, input: NodeId, kind: PoolKind, window: usize, stride: usize) -> Result<NodeId, TensorError> {
        assert!(stride >= 1 && window >= 1, "pool window/stride must be positive");
        let x = &self.nodes[input.0].value;
        if x.shape().len() != 4 {
            return Err(TensorError::BadRank { op: "pool input", expected: 4, shape: x.shape().to_vec() });
        }
        let [batch, chans, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]];
        if window > h || window > w {
            return Err(TensorError::WindowTooLarge { window, h, w });
        }
        let oh = (h - window) / stride + 1;
        let ow = (w - window) / stride + 1;
        let mut out = Tensor::zeros(&[batch, chans, oh, ow]);
        let mut argmax = Vec::new();
        if kind == PoolKind::Max {
            argmax.resize(batch * chans * oh * ow, 0usize);
        }
        let xd = x.data();
        let od = out.data_mut();
        let inv_area = S::of(1.0 / (window * window) as f64);
        for bc in 0..batch * chans {
            let plane = &xd[bc * h * w..(bc + 1) * h * w];
            for oy in 0..oh {
                for ox in 0..ow {
                    let oi = bc * oh * ow + oy * ow + ox;
                    match kind {
                        PoolKind::Max => {
                            let mut best = S::neg_infinity();
                            let mut best_idx = 0usize;
                            for dy in 0..window {
                                for dx in 0..window {
                                    let idx = (oy * stride + dy) * w + ox * stride + dx;
                                    if plane[idx] > best {
                                        best = plane[idx];
                                        best_idx = idx;
                                    }
                                }
                            }
                            od[oi] = best;
                            argmax[oi] = bc * h * w + best_idx;
                        }
                        PoolKind::Avg => {
                            let mut sum = S::zero();
                            for dy in 0..window {
                                for dx in 0..window {
                                    sum += plane[(oy * stride + dy) * w + ox * stride + dx];
                                }
                            }
                            od[oi] = sum * inv_area;
                        }
                    }
                }
            }
        }
        Ok(self.push(Op::Pool { input, kind, window, stride, argmax }, out))
    }

    pub fn activation(&mut self, src: NodeId, kind: Activation) -> NodeId {
        let out = match kind {
            Activation::Relu => self.nodes[src.0].value.map(|v| v.max(S::zero())),
            Activation::Tanh => self.nodes[src.0].value.map(|v| v.tanh()),
        };
        self.push(Op::Activation { src, kind }, out)
    }

    pub fn relu(&mut self, src: NodeId) -> NodeId {
        self.activation(src, Activation::Relu)
    }

    pub fn tanh(&mut self, src: NodeId) -> NodeId {
        self.activation(src, Activation::Tanh)
    }

    pub fn concat(&mut self, inputs: &[NodeId], axis: usize) -> Result<NodeId, TensorError> {
        assert!(!inputs.is_empty(), "concat of zero tensors");
        let first = self.nodes[inputs[0].0].value.shape().to_vec();
        if axis >= first.len() {
            return Err(TensorError::BadRank { op: "concat axis", expected: axis + 1, shape: first });
        }
        let mut axis_total = 0usize;
        for &id in inputs {
            let s = self.nodes[id.0].value.shape();
            if s.len() != first.len()
                || s.iter().enumerate().any(|(d, &v)| d != axis && v != first[d])
            {
                return Err(TensorError::ShapeMismatch { op: "concat", left: first.clone(), right: s.to_vec() });
            }
            axis_total += s[axis];
        }
        let mut out_shape = first.clone();
        out_shape[axis] = axis_total;
        let outer: usize = first[..axis].iter().product();
        let inner: usize = first[axis + 1..].iter().product();
        let mut out = Tensor::zeros(&out_shape);
        let mut offset = 0usize;
        for &id in inputs {
            let src = &self.nodes[id.0].value;
            let src_axis = src.shape()[axis];
            for o in 0..outer {
                let src_start = o * src_axis * inner;
                let dst_start = o * axis_total * inner + offset * inner;
                out.data_mut()[dst_start..dst_start + src_axis * inner]
                    .copy_from_slice(&src.data()[src_start..src_start + src_axis * inner]);
            }
            offset += src_axis;
        }
        Ok(self.push(Op::Concat { inputs: inputs.to_vec(), axis }, out))
    }

    /// Mean over the batch of -log softmax(logits)[label], stabilized by
    /// max-subtraction. Returns the scalar loss node and the probabilities.
    pub fn softmax_cross_entropy(&mut self, logits: NodeId, labels: &[usize]) -> Result<(NodeId, Tensor<S>), TensorError> {
        let z = &self.nodes[logits.0].value;
        if z.shape().len() != 2 {
            return Err(TensorError::BadRank { op: "softmax_cross_entropy logits", expected: 2, shape: z.shape().to_vec() });
        }
        let (batch, classes) = (z.shape()[0], z.shape()[1]);
        if labels.len() != batch {
            return Err(TensorError::ShapeMismatch { op: "softmax_cross_entropy labels", left: vec![batch], right: vec![labels.len()] });
        }
        for &label in labels {
            if label >= classes {
                return Err(TensorError::LabelOutOfRange { label, classes });
            }
        }
        let mut probs = Tensor::zeros(&[batch, classes]);
        let mut loss = S::zero();
        for b in 0..batch {
            let row = &z.data()[b * classes..(b + 1) * classes];
            let mut m = S::neg_infinity();
            for &v in row {
                m = m.max(v);
            }
            let mut denom = S::zero();
            for &v in row {
                denom += (v - m).exp();
            }
            let prow = &mut probs.data_mut()[b * classes..(b + 1) * classes];
            for (p, &v) in prow.iter_mut().zip(row) {
                *p = (v - m).exp() / denom;
            }
            // -log p[label] computed in the stabilized form
            loss += denom.ln() - (row[labels[b]] - m);
        }
        loss /= S::of(batch as f64);
        let node = self.push(
            Op::SoftmaxCrossEntropy { logits, labels: labels.to_vec(), probs: probs.clone() },
            Tensor::scalar(loss),
        );
        Ok((node, probs))
    }

    /// Reverse sweep from a scalar loss; parameter gradients accumulate into
    /// `params` (calling twice without a reset doubles them).
    pub fn backward(&mut self, loss: NodeId, params: &mut ParamSet<S>) -> Result<(), TensorError> {
        let value = &self.nodes[loss.0].value;
        if value.numel() != 1 {
            return Err(TensorError::NonScalarLoss { shape: value.shape().to_vec() });
        }
        let one = Tensor::filled(value.shape(), S::one());
        self.backward_with_seeds(&[(loss, one)], params)
    }

    /// Reverse sweep seeded with explicit output gradients. Each seed tensor
    /// is added to its node's gradient before that node is processed, so a
    /// scalar loss seed and policy-gradient seeds combine in one pass.
    pub fn backward_with_seeds(&mut self, seeds: &[(NodeId, Tensor<S>)], params: &mut ParamSet<S>) -> Result<(), TensorError> {
        let n = self.nodes.len();
        let mut grads: Vec<Option<Tensor<S>>> = (0..n).map(|_| None).collect();
        for (id, seed) in seeds {
            let shape = self.nodes[id.0].value.shape();
            if seed.shape() != shape {
                return Err(TensorError::ShapeMismatch { op: "backward seed", left: seed.shape().to_vec(), right: shape.to_vec() });
            }
            accumulate(&mut grads[id.0], seed, shape);
        }
        for idx in (0..n).rev() {
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(idx, &g, &mut grads, params);
            grads[idx] = Some(g);
        }
        self.grads = grads;
        Ok(())
    }

    fn propagate(&self, idx: usize, g: &Tensor<S>, grads: &mut Vec<Option<Tensor<S>>>, params: &mut ParamSet<S>) {
        match &self.nodes[idx].op {
            Op::Input => {}
            Op::Param(pid) => params.accumulate_grad(*pid, g),
            Op::StopGradient(_) => {}
            Op::Add(a, b) => {
                let shape = self.nodes[a.0].value.shape().to_vec();
                accumulate(&mut grads[a.0], g, &shape);
                accumulate(&mut grads[b.0], g, &shape);
            }
            Op::Scale(src, factor) => {
                let delta = g.map(|v| v * *factor);
                add_grad(grads, src.0, delta, self.nodes[src.0].value.shape());
            }
            Op::Clamp { src, lo, hi } => {
                let x = &self.nodes[src.0].value;
                let mut delta = Tensor::zeros(x.shape());
                for ((d, &xv), &gv) in delta.data_mut().iter_mut().zip(x.data()).zip(g.data()) {
                    if xv > *lo && xv < *hi {
                        *d = gv;
                    }
                }
                add_grad(grads, src.0, delta, x.shape());
            }
            Op::Reshape(src) => {
                let shape = self.nodes[src.0].value.shape().to_vec();
                let delta = g.clone().reshaped(&shape).expect("reshape grad");
                add_grad(grads, src.0, delta, &shape);
            }
            Op::FullyConnected { input, weights, bias } => {
                let x = &self.nodes[input.0].value;
                let w = &self.nodes[weights.0].value;
                let (batch, in_dim) = (x.shape()[0], x.shape()[1]);
                let out_dim = w.shape()[1];
                // dX = g . W^T
                let mut dx = Tensor::zeros(&[batch, in_dim]);
                S::gemm(false, true, batch, out_dim, in_dim, g.data(), w.data(), S::zero(), dx.data_mut());
                add_grad(grads, input.0, dx, x.shape());
                // dW = X^T . g
                let mut dw = Tensor::zeros(&[in_dim, out_dim]);
                S::gemm(true, false, in_dim, batch, out_dim, x.data(), g.data(), S::zero(), dw.data_mut());
                add_grad(grads, weights.0, dw, w.shape());
                // db = column sums of g
                let mut db = Tensor::zeros(&[out_dim]);
                for b in 0..batch {
                    for o in 0..out_dim {
                        db.data_mut()[o] += g.data()[b * out_dim + o];
                    }
                }
                add_grad(grads, bias.0, db, &[out_dim]);
            }
            Op::Conv2d { input, kernels, stride, padding } => {
                let x = &self.nodes[input.0].value;
                let k = &self.nodes[kernels.0].value;
                let [batch, chans, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]];
                let [kout, _, kh, kw] = [k.shape()[0], k.shape()[1], k.shape()[2], k.shape()[3]];
                let (oh, ow) = (g.shape()[2], g.shape()[3]);
                let cols_rows = chans * kh * kw;
                let mut cols = vec![S::zero(); cols_rows * oh * ow];
                let mut dcols = vec![S::zero(); cols_rows * oh * ow];
                let mut dk = Tensor::zeros(k.shape());
                let mut dx = Tensor::zeros(x.shape());
                for b in 0..batch {
                    im2col(x.data(), b, chans, h, w, kh, kw, *stride, *padding, oh, ow, &mut cols);
                    let gb = &g.data()[b * kout * oh * ow..(b + 1) * kout * oh * ow];
                    // dK += g_b . cols^T
                    S::gemm(false, true, kout, oh * ow, cols_rows, gb, &cols, S::one(), dk.data_mut());
                    // dcols = K^T . g_b
                    S::gemm(true, false, cols_rows, kout, oh * ow, k.data(), gb, S::zero(), &mut dcols);
                    col2im(&dcols, b, chans, h, w, kh, kw, *stride, *padding, oh, ow, dx.data_mut());
                }
                add_grad(grads, input.0, dx, x.shape());
                add_grad(grads, kernels.0, dk, k.shape());
            }
            Op::Pool { input, kind, window, stride, argmax } => {
                let x = &self.nodes[input.0].value;
                let [_, _, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]];
                let (oh, ow) = (g.shape()[2], g.shape()[3]);
                let mut dx = Tensor::zeros(x.shape());
                match kind {
                    PoolKind::Max => {
                        for (oi, &src_idx) in argmax.iter().enumerate() {
                            dx.data_mut()[src_idx] += g.data()[oi];
                        }
                    }
                    PoolKind::Avg => {
                        let inv = S::of(1.0 / (window * window) as f64);
                        let planes = x.shape()[0] * x.shape()[1];
                        for bc in 0..planes {
                            for oy in 0..oh {
                                for ox in 0..ow {
                                    let gv = g.data()[bc * oh * ow + oy * ow + ox] * inv;
                                    for dy in 0..*window {
                                        for dxx in 0..*window {
                                            dx.data_mut()[bc * h * w + (oy * stride + dy) * w + ox * stride + dxx] += gv;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                add_grad(grads, input.0, dx, x.shape());
            }
            Op::Activation { src, kind } => {
                let delta = match kind {
                    Activation::Relu => {
                        let x = &self.nodes[src.0].value;
                        let mut d = Tensor::zeros(x.shape());
                        for ((dv, &xv), &gv) in d.data_mut().iter_mut().zip(x.data()).zip(g.data()) {
                            if xv > S::zero() {
                                *dv = gv;
                            }
                        }
                        d
                    }
                    Activation::Tanh => {
                        let y = &self.nodes[idx].value;
                        let mut d = Tensor::zeros(y.shape());
                        for ((dv, &yv), &gv) in d.data_mut().iter_mut().zip(y.data()).zip(g.data()) {
                            *dv = gv * (S::one() - yv * yv);
                        }
                        d
                    }
                };
                let shape = self.nodes[src.0].value.shape().to_vec();
                add_grad(grads, src.0, delta, &shape);
            }
            Op::Concat { inputs, axis } => {
                let out_shape = self.nodes[idx].value.shape().to_vec();
                let outer: usize = out_shape[..*axis].iter().product();
                let inner: usize = out_shape[*axis + 1..].iter().product();
                let axis_total = out_shape[*axis];
                let mut offset = 0usize;
                for &src in inputs {
                    let shape = self.nodes[src.0].value.shape().to_vec();
                    let src_axis = shape[*axis];
                    let mut delta = Tensor::zeros(&shape);
                    for o in 0..outer {
                        let dst_start = o * src_axis * inner;
                        let src_start = o * axis_total * inner + offset * inner;
                        delta.data_mut()[dst_start..dst_start + src_axis * inner]
                            .copy_from_slice(&g.data()[src_start..src_start + src_axis * inner]);
                    }
                    add_grad(grads, src.0, delta, &shape);
                    offset += src_axis;
                }
            }
            Op::SoftmaxCrossEntropy { logits, labels, probs } => {
                let batch = probs.shape()[0];
                let classes = probs.shape()[1];
                let scale = g.data()[0] / S::of(batch as f64);
                let mut delta = probs.clone();
                for (b, &label) in labels.iter().enumerate() {
                    delta.data_mut()[b * classes + label] -= S::one();
                }
                for v in delta.data_mut() {
                    *v *= scale;
                }
                let shape = self.nodes[logits.0].value.shape().to_vec();
                add_grad(grads, logits.0, delta, &shape);
            }
        }
    }
}

fn accumulate<S: Scalar>(slot: &mut Option<Tensor<S>>, delta: &Tensor<S>, shape: &[usize]) {
    match slot {
        Some(t) => t.add_assign(delta),
        None => {
            let mut t = Tensor::zeros(shape);
            t.add_assign(delta);
            *slot = Some(t);
        }
    }
}

fn add_grad<S: Scalar>(grads: &mut [Option<Tensor<S>>], idx: usize, delta: Tensor<S>, shape: &[usize]) {
    match &mut grads[idx] {
        Some(t) => t.add_assign(&delta),
        None => {
            debug_assert_eq!(delta.shape(), shape);
            grads[idx] = Some(delta);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn im2col<S: Scalar>(
    x: &[S], b: usize, chans: usize, h: usize, w: usize, kh: usize, kw: usize,
    stride: usize, padding: usize, oh: usize, ow: usize, cols: &mut [S],
) {
    let hw = oh * ow;
    for c in 0..chans {
        let plane = &x[(b * chans + c) * h * w..(b * chans + c + 1) * h * w];
        for dy in 0..kh {
            for dx in 0..kw {
                let row = &mut cols[((c * kh + dy) * kw + dx) * hw..((c * kh + dy) * kw + dx + 1) * hw];
                for oy in 0..oh {
                    let iy = (oy * stride + dy) as isize - padding as isize;
                    if iy < 0 || iy >= h as isize {
                        row[oy * ow..(oy + 1) * ow].fill(S::zero());
                        continue;
                    }
                    for ox in 0..ow {
                        let ix = (ox * stride + dx) as isize - padding as isize;
                        row[oy * ow + ox] = if ix < 0 || ix >= w as isize {
                            S::zero()
                        } else {
                            plane[iy as usize * w + ix as usize]
                        };
                    }
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn col2im<S: Scalar>(
    dcols: &[S], b: usize, chans: usize, h: usize, w: usize, kh: usize, kw: usize,
    stride: usize, padding: usize, oh: usize, ow: usize, dx: &mut [S],
) {
    let hw = oh * ow;
    for c in 0..chans {
        let plane_start = (b * chans + c) * h * w;
        for dy in 0..kh {
            for dxk in 0..kw {
                let row = &dcols[((c * kh + dy) * kw + dxk) * hw..((c * kh + dy) * kw + dxk + 1) * hw];
                for oy in 0..oh {
                    let iy = (oy * stride + dy) as isize - padding as isize;
                    if iy < 0 || iy >= h as isize {
                        continue;
                    }
                    for ox in 0..ow {
                        let ix = (ox * stride + dxk) as isize - padding as isize;
                        if ix >= 0 && ix < w as isize {
                            dx[plane_start + iy as usize * w + ix as usize] += row[oy * ow + ox];
                        }
                    }
                }
            }
        }
    }
}
