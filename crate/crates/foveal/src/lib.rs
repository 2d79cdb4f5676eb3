//! Recurrent visual attention classifier with foveated multi-resolution
//! glimpses, trained by backpropagation plus a policy-gradient update on the
//! glimpse locations.
//!
//! The numeric core is generic over the scalar type; the concrete aliases
//! below are what the binary and most tests use.

pub mod rng;
pub mod scalar;
pub mod tensor;

pub use scalar::Scalar;

/// f64 tensor, the default precision of the artifact.
pub type Tensor64 = tensor::Tensor<f64>;
pub type Tensor32 = tensor::Tensor<f32>;
pub type Graph64 = tensor::Graph<f64>;
pub type ParamSet64 = tensor::ParamSet<f64>;
