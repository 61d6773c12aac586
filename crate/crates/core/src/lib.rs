//! Emergent-communication laboratory.
//!
//! Trains Sender/Receiver pairs on a reconstruction game over an
//! attribute-value world, trains imitator agents on mixtures of frozen
//! expert languages under supervised and REINFORCE objectives, and measures
//! whether compositional languages are selected.
//!
//! Module map:
//! * [`numeric`] - tensors, reverse-mode tape, Adam, gradient checking.
//! * [`data`] - object space, one-hot encodings, train/generalization/zero-shot splits.
//! * [`agents`] - GRU sender and receiver networks and exported language tables.
//! * [`game`] - reconstruction-game training and expert pretraining.
//! * [`imitation`] - supervised and REINFORCE imitation of expert mixtures.
//! * [`metrics`] - compositionality metrics, expert-weight statistics, correlations.

pub mod agents;
pub mod data;
pub mod error;
pub mod game;
pub mod imitation;
pub mod metrics;
pub mod numeric;

pub use error::{Error, Result};
