//! Named trainable tensors with gradient accumulators.

use std::collections::BTreeMap;

use rand::Rng;

use super::Tensor;
use crate::scalar::Scalar;

/// Handle to one parameter inside a [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) usize);

/// The trainable state of a model: values, accumulated gradients, and a
/// per-parameter stop-gradient flag. Iteration order is insertion order,
/// which keeps optimizer sweeps and checkpoints deterministic.
#[derive(Debug, Clone)]
pub struct ParamSet<S> {
    names: Vec<String>,
    values: Vec<Tensor<S>>,
    grads: Vec<Tensor<S>>,
    frozen: Vec<bool>,
    by_name: BTreeMap<String, usize>,
}

impl<S: Scalar> Default for ParamSet<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> ParamSet<S> {
    pub fn new() -> Self {
        ParamSet { names: Vec::new(), values: Vec::new(), grads: Vec::new(), frozen: Vec::new(), by_name: BTreeMap::new() }
    }

    pub fn add(&mut self, name: &str, value: Tensor<S>) -> ParamId {
        assert!(!self.by_name.contains_key(name), "duplicate parameter {name}");
        let idx = self.values.len();
        self.names.push(name.to_string());
        self.grads.push(Tensor::zeros(value.shape()));
        self.values.push(value);
        self.frozen.push(false);
        self.by_name.insert(name.to_string(), idx);
        ParamId(idx)
    }

    /// Weight init: uniform in +-sqrt(6/(fan_in+fan_out)).
    pub fn glorot_uniform(&mut self, name: &str, shape: &[usize], fan_in: usize, fan_out: usize, rng: &mut impl Rng) -> ParamId {
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let numel: usize = shape.iter().product();
        let data: Vec<S> = (0..numel).map(|_| S::of((rng.gen::<f64>() * 2.0 - 1.0) * bound)).collect();
        self.add(name, Tensor::from_vec(shape, data))
    }

    pub fn zeros(&mut self, name: &str, shape: &[usize]) -> ParamId {
        self.add(name, Tensor::zeros(shape))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn id_of(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied().map(ParamId)
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor<S> {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor<S> {
        &mut self.values[id.0]
    }

    pub fn grad(&self, id: ParamId) -> &Tensor<S> {
        &self.grads[id.0]
    }

    pub fn accumulate_grad(&mut self, id: ParamId, delta: &Tensor<S>) {
        if !self.frozen[id.0] {
            self.grads[id.0].add_assign(delta);
        }
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.fill(S::zero());
        }
    }

    pub fn set_frozen(&mut self, id: ParamId, frozen: bool) {
        self.frozen[id.0] = frozen;
    }

    pub fn is_frozen(&self, id: ParamId) -> bool {
        self.frozen[id.0]
    }

    /// Marks every parameter whose name starts with `prefix` as stop-gradient.
    pub fn freeze_prefix(&mut self, prefix: &str) {
        for (i, name) in self.names.iter().enumerate() {
            if name.starts_with(prefix) {
                self.frozen[i] = true;
            }
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> + '_ {
        (0..self.values.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor<S>)> {
        self.names.iter().map(|n| n.as_str()).zip(self.values.iter())
    }

    /// FNV-1a over names and value bits of parameters under `prefix`.
    /// Bit-exact: any change to any covered value changes the sum.
    pub fn checksum_prefix(&self, prefix: &str) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for (i, name) in self.names.iter().enumerate() {
            if !name.starts_with(prefix) {
                continue;
            }
            eat(name.as_bytes());
            for &v in self.values[i].data() {
                eat(&v.as_f64().to_le_bytes());
            }
        }
        h
    }

    /// Sum over grads of a fixed per-entry function, for audits.
    pub fn grad_abs_sum(&self, id: ParamId) -> f64 {
        self.grads[id.0].data().iter().map(|v| v.as_f64().abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn glorot_bound_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ps = ParamSet::<f64>::new();
        let id = ps.glorot_uniform("w", &[20, 30], 20, 30, &mut rng);
        let bound = (6.0 / 50.0f64).sqrt();
        for &v in ps.value(id).data() {
            assert!(v.abs() <= bound);
        }
    }

    #[test]
    fn frozen_params_ignore_gradients() {
        let mut ps = ParamSet::<f64>::new();
        let id = ps.add("w", Tensor::scalar(1.0));
        ps.set_frozen(id, true);
        ps.accumulate_grad(id, &Tensor::scalar(5.0));
        assert_eq!(ps.grad(id).data()[0], 0.0);
    }

    #[test]
    fn checksum_changes_with_any_value() {
        let mut ps = ParamSet::<f64>::new();
        let id = ps.add("core.w", Tensor::from_vec(&[2], vec![1.0, 2.0]));
        ps.add("other", Tensor::scalar(9.0));
        let before = ps.checksum_prefix("core.");
        ps.value_mut(id).data_mut()[1] += 1e-15;
        assert_ne!(before, ps.checksum_prefix("core."));
        // parameters outside the prefix do not affect it
        let with_other = ps.checksum_prefix("core.");
        let idx = ps.id_of("other").unwrap();
        ps.value_mut(idx).data_mut()[0] = -3.0;
        assert_eq!(with_other, ps.checksum_prefix("core."));
    }
}
