//! Minimal dense numeric substrate: tensors, a reverse-mode tape with
//! hand-derived backward rules, Adam, and finite-difference gradient checks.
//! Everything runs at f64; determinism and grad-check precision outrank raw
//! speed at this scale.

pub mod adam;
pub mod gradcheck;
pub mod ops;
pub mod rng;
pub mod store;
pub mod tape;
pub mod tensor;

pub use adam::AdamState;
pub use gradcheck::{grad_check, GradCheckReport};
pub use ops::{
    affine, argmax, entropy_from_logp, gru_step, layer_norm, log_softmax, sample_categorical,
    GruNames,
};
pub use rng::Rng;
pub use store::{Checkpoint, CheckpointMeta, ParamStore};
pub use tape::{NodeId, Tape};
pub use tensor::Tensor;
