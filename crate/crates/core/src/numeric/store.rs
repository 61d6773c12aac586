//! Named parameter storage with matching gradient accumulators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::rng::Rng;
use crate::numeric::tensor::Tensor;

/// All learnable tensors of one agent plus one gradient accumulator per
/// parameter. Parameter names are compile-time constants so lookups stay
/// cheap and checkpoints stay stable.
#[derive(Debug, Clone)]
pub struct ParamStore {
    names: Vec<&'static str>,
    params: Vec<Tensor>,
    grads: Vec<Tensor>,
    index: BTreeMap<&'static str, usize>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self {
            names: Vec::new(),
            params: Vec::new(),
            grads: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, name: &'static str, tensor: Tensor) {
        assert!(
            !self.index.contains_key(name),
            "duplicate parameter `{name}`"
        );
        self.index.insert(name, self.params.len());
        self.names.push(name);
        self.grads.push(Tensor::zeros(tensor.shape().to_vec()));
        self.params.push(tensor);
    }

    /// Matrix parameter initialized uniform(-a, a) with a = scale / sqrt(fan_in).
    pub fn add_uniform(
        &mut self,
        name: &'static str,
        shape: Vec<usize>,
        fan_in: usize,
        scale: f64,
        rng: &mut Rng,
    ) {
        let a = scale / (fan_in as f64).sqrt();
        let n: usize = shape.iter().product();
        let values = (0..n).map(|_| rng.uniform(-a, a)).collect();
        self.add(name, Tensor::new(shape, values).expect("init values finite"));
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn get(&self, name: &str) -> &Tensor {
        let i = self.index[name];
        &self.params[i]
    }

    pub fn get_mut(&mut self, name: &str) -> &mut Tensor {
        let i = self.index[name];
        &mut self.params[i]
    }

    pub fn grad(&self, name: &str) -> &Tensor {
        let i = self.index[name];
        &self.grads[i]
    }

    pub fn grad_mut(&mut self, name: &str) -> &mut Tensor {
        let i = self.index[name];
        &mut self.grads[i]
    }

    pub fn name_at(&self, i: usize) -> &'static str {
        self.names[i]
    }

    pub fn param_at(&self, i: usize) -> &Tensor {
        &self.params[i]
    }

    pub fn param_at_mut(&mut self, i: usize) -> &mut Tensor {
        &mut self.params[i]
    }

    pub fn grad_at(&self, i: usize) -> &Tensor {
        &self.grads[i]
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar parameters.
    pub fn scalar_count(&self) -> usize {
        self.params.iter().map(Tensor::len).sum()
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.fill(0.0);
        }
    }

    /// Bit-exact equality of all parameter values, in registration order.
    pub fn params_equal(&self, other: &ParamStore) -> bool {
        self.names == other.names
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| a.shape() == b.shape() && a.values() == b.values())
    }

    pub fn checkpoint(&self, meta: CheckpointMeta) -> Checkpoint {
        Checkpoint {
            meta,
            params: self
                .names
                .iter()
                .zip(&self.params)
                .map(|(name, t)| CheckpointParam {
                    name: (*name).to_string(),
                    shape: t.shape().to_vec(),
                    values: t.values().to_vec(),
                })
                .collect(),
        }
    }

    /// Load values from a checkpoint into this store. Every checkpoint entry
    /// must name an existing parameter of identical shape, and every
    /// parameter must be covered.
    pub fn load_checkpoint(&mut self, ckpt: &Checkpoint) -> Result<()> {
        if ckpt.params.len() != self.params.len() {
            return Err(Error::InvalidArgument(format!(
                "checkpoint has {} parameters, store expects {}",
                ckpt.params.len(),
                self.params.len()
            )));
        }
        for p in &ckpt.params {
            let i = *self
                .index
                .get(p.name.as_str())
                .ok_or_else(|| Error::UnknownParam(p.name.clone()))?;
            if self.params[i].shape() != p.shape.as_slice() {
                return Err(Error::ShapeMismatch {
                    op: "load_checkpoint",
                    expected: format!("{:?} for `{}`", self.params[i].shape(), p.name),
                    got: format!("{:?}", p.shape),
                });
            }
            self.params[i] = Tensor::new(p.shape.clone(), p.values.clone())?;
        }
        Ok(())
    }
}

impl Default for ParamStore {
    fn default() -> Self {
        Self::new()
    }
}

/// Human-readable JSON checkpoint: one entry per parameter plus run metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub meta: CheckpointMeta,
    pub params: Vec<CheckpointParam>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub seed: u64,
    pub epoch: usize,
    pub config_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointParam {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

impl Checkpoint {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
