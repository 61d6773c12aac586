//! Sender and Receiver networks: single-layer GRUs with LayerNorm applied to
//! the hidden state before the output head (the raw hidden state feeds the
//! recurrence). Agents are deterministic after training: every evaluation
//! path uses argmax decoding and never consumes the RNG.

pub mod language;
pub mod receiver;
pub mod sender;

pub use language::{LanguageEntry, LanguageMeta, LanguageTable, Message};
pub use receiver::ReceiverParams;
pub use sender::{SenderParams, SenderRollout, TapedSenderRollout, UnrollMode};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ops::GruNames;

/// Architecture of one agent pair and its communication channel.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AgentConfig {
    pub n_att: usize,
    pub n_val: usize,
    /// Vocabulary size |V|.
    pub vocab: usize,
    /// Fixed message length L.
    pub msg_len: usize,
    pub d_hidden: usize,
    pub d_embed: usize,
    /// Multiplier on the uniform init bound 1/sqrt(fan_in).
    pub init_scale: f64,
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_att < 1 || self.n_val < 2 {
            return Err(Error::InvalidArgument(
                "need n_att >= 1 and n_val >= 2".into(),
            ));
        }
        if self.vocab < 2 || self.msg_len < 1 {
            return Err(Error::InvalidArgument(
                "need vocab >= 2 and msg_len >= 1".into(),
            ));
        }
        if self.d_hidden < 2 {
            return Err(Error::InvalidArgument(
                "d_hidden must be >= 2 for layer normalization".into(),
            ));
        }
        if self.init_scale <= 0.0 {
            return Err(Error::InvalidArgument("init_scale must be > 0".into()));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.n_att * self.n_val
    }

    pub fn output_dim(&self) -> usize {
        self.n_att * self.n_val
    }

    /// Embedding row reserved for the start-of-sequence token.
    pub fn sos_row(&self) -> usize {
        self.vocab
    }
}

pub(crate) const GRU: GruNames = GruNames {
    wr: "gru.wr",
    ur: "gru.ur",
    br: "gru.br",
    wz: "gru.wz",
    uz: "gru.uz",
    bz: "gru.bz",
    wn: "gru.wn",
    un: "gru.un",
    bun: "gru.bun",
    bwn: "gru.bwn",
};

pub(crate) const LN_EPS: f64 = 1e-5;

pub(crate) const ENC_W: &str = "enc.w";
pub(crate) const ENC_B: &str = "enc.b";
pub(crate) const EMB: &str = "emb";
pub(crate) const LN_G: &str = "ln.g";
pub(crate) const LN_B: &str = "ln.b";
pub(crate) const OUT_W: &str = "out.w";
pub(crate) const OUT_B: &str = "out.b";

pub(crate) fn add_gru_params(
    store: &mut crate::numeric::ParamStore,
    d_embed: usize,
    d_hidden: usize,
    scale: f64,
    rng: &mut crate::numeric::Rng,
) {
    // Matches the usual recurrent init: every GRU tensor drawn with
    // fan_in = d_hidden.
    for w in [GRU.wr, GRU.wz, GRU.wn] {
        store.add_uniform(w, vec![d_hidden, d_embed], d_hidden, scale, rng);
    }
    for u in [GRU.ur, GRU.uz, GRU.un] {
        store.add_uniform(u, vec![d_hidden, d_hidden], d_hidden, scale, rng);
    }
    for b in [GRU.br, GRU.bz, GRU.bun, GRU.bwn] {
        store.add_uniform(b, vec![d_hidden], d_hidden, scale, rng);
    }
}

pub(crate) fn add_layer_norm_params(store: &mut crate::numeric::ParamStore, d_hidden: usize) {
    store.add(
        LN_G,
        crate::numeric::Tensor::new(vec![d_hidden], vec![1.0; d_hidden]).unwrap(),
    );
    store.add(LN_B, crate::numeric::Tensor::zeros(vec![d_hidden]));
}
