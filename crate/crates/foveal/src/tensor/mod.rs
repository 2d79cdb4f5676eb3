//! Dense tensors and the reverse-mode differentiation engine built on them.

mod check;
mod graph;
mod params;

pub use check::finite_diff_check;
pub use graph::{Activation, Graph, NodeId, PoolKind};
pub use params::{ParamId, ParamSet};

use crate::scalar::Scalar;

/// Errors raised by tensor and graph operations.
#[derive(Debug, thiserror::Error)]
pub enum TensorError {
    #[error("{op}: shape mismatch between {left:?} and {right:?}")]
    ShapeMismatch { op: &'static str, left: Vec<usize>, right: Vec<usize> },
    #[error("{op}: expected rank {expected}, got shape {shape:?}")]
    BadRank { op: &'static str, expected: usize, shape: Vec<usize> },
    #[error("conv2d: kernel {kh}x{kw} larger than padded input {h}x{w}")]
    KernelTooLarge { kh: usize, kw: usize, h: usize, w: usize },
    #[error("pool: window {window} larger than input {h}x{w}")]
    WindowTooLarge { window: usize, h: usize, w: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("backward: loss must be a scalar, got shape {shape:?}")]
    NonScalarLoss { shape: Vec<usize> },
    #[error("reshape: cannot view {from:?} ({from_len} elements) as {to:?} ({to_len} elements)")]
    BadReshape { from: Vec<usize>, from_len: usize, to: Vec<usize>, to_len: usize },
}

/// Dense n-dimensional array, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn from_vec(shape: &[usize], data: Vec<S>) -> Self {
        let numel: usize = shape.iter().product();
        assert_eq!(numel, data.len(), "shape {:?} does not match {} elements", shape, data.len());
        Tensor { shape: shape.to_vec(), data }
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let numel = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![S::zero(); numel] }
    }

    pub fn filled(shape: &[usize], v: S) -> Self {
        let numel = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![v; numel] }
    }

    pub fn scalar(v: S) -> Self {
        Tensor { shape: vec![1], data: vec![v] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    /// Same storage under a new shape (element count must match).
    pub fn reshaped(mut self, shape: &[usize]) -> Result<Self, TensorError> {
        let to_len: usize = shape.iter().product();
        if to_len != self.data.len() {
            return Err(TensorError::BadReshape {
                from: self.shape.clone(),
                from_len: self.data.len(),
                to: shape.to_vec(),
                to_len,
            });
        }
        self.shape = shape.to_vec();
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Tensor { shape: self.shape.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn add_assign(&mut self, other: &Tensor<S>) {
        assert_eq!(self.shape, other.shape, "add_assign shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }

    pub fn fill(&mut self, v: S) {
        self.data.fill(v);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Index of the largest element; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        best
    }

    pub fn min_max(&self) -> (S, S) {
        let mut lo = S::infinity();
        let mut hi = S::neg_infinity();
        for &v in &self.data {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }
}
