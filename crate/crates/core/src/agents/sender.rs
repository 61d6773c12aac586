//! Sender network: input encoder, symbol embedding, GRU, output head.

use crate::agents::language::{LanguageEntry, LanguageMeta, LanguageTable, Message};
use crate::agents::{AgentConfig, EMB, ENC_B, ENC_W, GRU, LN_B, LN_EPS, LN_G, OUT_B, OUT_W};
use crate::data::{encode, Object, ObjectSpace, ObjectVec};
use crate::error::{Error, Result};
use crate::numeric::ops;
use crate::numeric::tape::{NodeId, Tape};
use crate::numeric::{ParamStore, Rng};

/// How the sender is unrolled for `msg_len` timesteps. The first input is
/// always the [SOS] token.
///
/// * `Sample` - next input is the freshly sampled symbol (training unrolls).
/// * `Argmax` - next input is the argmax symbol (deterministic evaluation).
/// * `TeacherForced` - next input is the expert's previous symbol; emissions
///   are argmax, log-probabilities are the imitator's own (supervised
///   imitation and validation).
/// * `TeacherForcedSampled` - expert inputs as above but emissions are
///   sampled (REINFORCE imitation rollouts).
pub enum UnrollMode<'a> {
    Sample,
    Argmax,
    TeacherForced(&'a Message),
    TeacherForcedSampled(&'a Message),
}

impl UnrollMode<'_> {
    fn samples(&self) -> bool {
        matches!(
            self,
            UnrollMode::Sample | UnrollMode::TeacherForcedSampled(_)
        )
    }

    fn forced(&self) -> Option<&Message> {
        match self {
            UnrollMode::TeacherForced(m) | UnrollMode::TeacherForcedSampled(m) => Some(m),
            _ => None,
        }
    }
}

/// One unrolled pass of the sender: the emitted message plus everything the
/// policy losses need.
#[derive(Debug, Clone)]
pub struct SenderRollout {
    pub message: Message,
    /// log pi_j[m_j] of the emitted symbol, per step.
    pub step_logp: Vec<f64>,
    /// Policy entropy per step, in nats.
    pub step_entropy: Vec<f64>,
    /// Full log-distribution per step.
    pub step_logdist: Vec<Vec<f64>>,
}

impl SenderRollout {
    /// H(pi(x)): per-step entropy averaged over the L steps.
    pub fn mean_entropy(&self) -> f64 {
        self.step_entropy.iter().sum::<f64>() / self.step_entropy.len() as f64
    }

    pub fn total_logp(&self) -> f64 {
        self.step_logp.iter().sum()
    }
}

/// Tape handles of a training unroll, for assembling losses.
pub struct TapedSenderRollout {
    pub rollout: SenderRollout,
    /// Scalar node log pi_j[m_j] per step.
    pub picked: Vec<NodeId>,
    /// Scalar entropy node per step.
    pub entropy: Vec<NodeId>,
    /// Full log-distribution node per step.
    pub logdist: Vec<NodeId>,
}

/// All learnable tensors of one sender.
#[derive(Debug, Clone)]
pub struct SenderParams {
    pub cfg: AgentConfig,
    pub store: ParamStore,
}

impl SenderParams {
    pub fn init(cfg: &AgentConfig, rng: &mut Rng) -> Result<Self> {
        cfg.validate()?;
        let mut store = ParamStore::new();
        let in_dim = cfg.input_dim();
        store.add_uniform(ENC_W, vec![cfg.d_hidden, in_dim], in_dim, cfg.init_scale, rng);
        store.add_uniform(ENC_B, vec![cfg.d_hidden], in_dim, cfg.init_scale, rng);
        store.add_uniform(
            EMB,
            vec![cfg.vocab + 1, cfg.d_embed],
            cfg.d_embed,
            cfg.init_scale,
            rng,
        );
        super::add_gru_params(&mut store, cfg.d_embed, cfg.d_hidden, cfg.init_scale, rng);
        super::add_layer_norm_params(&mut store, cfg.d_hidden);
        store.add_uniform(
            OUT_W,
            vec![cfg.vocab, cfg.d_hidden],
            cfg.d_hidden,
            cfg.init_scale,
            rng,
        );
        store.add_uniform(OUT_B, vec![cfg.vocab], cfg.d_hidden, cfg.init_scale, rng);
        Ok(Self { cfg: *cfg, store })
    }

    /// Evaluation unroll; no tape, no gradients.
    pub fn unroll(
        &self,
        x: &ObjectVec,
        mode: UnrollMode,
        rng: Option<&mut Rng>,
    ) -> Result<SenderRollout> {
        unroll_with(&self.cfg, &self.store, x, mode, rng)
    }

    /// Training unroll: identical math recorded on a tape.
    pub fn unroll_on_tape(
        &self,
        tape: &mut Tape,
        x: &ObjectVec,
        mode: UnrollMode,
        rng: Option<&mut Rng>,
    ) -> Result<TapedSenderRollout> {
        unroll_on_tape_with(&self.cfg, &self.store, tape, x, mode, rng)
    }

    /// Argmax message per input; the deterministic exported language.
    pub fn export_language(&self, space: &ObjectSpace, inputs: &[Object]) -> Result<LanguageTable> {
        export_language_with(self, space, inputs)
    }
}

fn check_mode(cfg: &AgentConfig, mode: &UnrollMode, rng: &Option<&mut Rng>) -> Result<()> {
    if let Some(m) = mode.forced() {
        if m.len() != cfg.msg_len {
            return Err(Error::InvalidArgument(format!(
                "teacher message has length {}, expected {}",
                m.len(),
                cfg.msg_len
            )));
        }
    }
    if mode.samples() && rng.is_none() {
        return Err(Error::InvalidArgument(
            "sampling unroll modes need an RNG".into(),
        ));
    }
    Ok(())
}

/// Unroll against an explicit parameter store; lets gradient checks evaluate
/// the same network under perturbed parameters.
pub fn unroll_with(
    cfg: &AgentConfig,
    store: &ParamStore,
    x: &ObjectVec,
    mode: UnrollMode,
    mut rng: Option<&mut Rng>,
) -> Result<SenderRollout> {
    check_mode(cfg, &mode, &rng)?;
    let mut h = ops::affine_unchecked(store.get(ENC_W), store.get(ENC_B), &x.encoding);
    let mut prev = cfg.sos_row();

    let mut message = Vec::with_capacity(cfg.msg_len);
    let mut step_logp = Vec::with_capacity(cfg.msg_len);
    let mut step_entropy = Vec::with_capacity(cfg.msg_len);
    let mut step_logdist = Vec::with_capacity(cfg.msg_len);

    for t in 0..cfg.msg_len {
        let e = store.get(EMB).row(prev);
        let fwd = ops::gru_step(store, &GRU, e, &h);
        h = fwd.h_next;
        let ln = ops::layer_norm(
            store.get(LN_G).values(),
            store.get(LN_B).values(),
            &h,
            LN_EPS,
        )?;
        let logits = ops::affine_unchecked(store.get(OUT_W), store.get(OUT_B), &ln.y);
        let logp = ops::log_softmax(&logits);

        let emitted = if mode.samples() {
            ops::sample_categorical(&logp, rng.as_deref_mut().unwrap())?
        } else {
            ops::argmax(&logp)
        };
        message.push(emitted as u16);
        step_logp.push(logp[emitted]);
        step_entropy.push(ops::entropy_from_logp(&logp));

        prev = match mode.forced() {
            Some(m) => m.symbols()[t] as usize,
            None => emitted,
        };
        step_logdist.push(logp);
    }

    Ok(SenderRollout {
        message: Message(message),
        step_logp,
        step_entropy,
        step_logdist,
    })
}

/// Taped twin of [`unroll_with`].
pub fn unroll_on_tape_with(
    cfg: &AgentConfig,
    store: &ParamStore,
    tape: &mut Tape,
    x: &ObjectVec,
    mode: UnrollMode,
    mut rng: Option<&mut Rng>,
) -> Result<TapedSenderRollout> {
    check_mode(cfg, &mode, &rng)?;
    let xn = tape.input(x.encoding.clone());
    let mut h = tape.affine(store, ENC_W, ENC_B, xn);
    let mut prev = cfg.sos_row();

    let mut message = Vec::with_capacity(cfg.msg_len);
    let mut step_logp = Vec::with_capacity(cfg.msg_len);
    let mut step_entropy = Vec::with_capacity(cfg.msg_len);
    let mut step_logdist = Vec::with_capacity(cfg.msg_len);
    let mut picked = Vec::with_capacity(cfg.msg_len);
    let mut entropy = Vec::with_capacity(cfg.msg_len);
    let mut logdist = Vec::with_capacity(cfg.msg_len);

    for t in 0..cfg.msg_len {
        let e = tape.embed(store, EMB, prev);
        h = tape.gru_step(store, &GRU, e, h);
        let ln = tape.layer_norm(store, LN_G, LN_B, h, LN_EPS);
        let logits = tape.affine(store, OUT_W, OUT_B, ln);
        let logp = tape.log_softmax(logits);

        let emitted = if mode.samples() {
            ops::sample_categorical(tape.val(logp), rng.as_deref_mut().unwrap())?
        } else {
            ops::argmax(tape.val(logp))
        };
        let pick = tape.pick(logp, emitted);
        let ent = tape.entropy_from_logp(logp);

        message.push(emitted as u16);
        step_logp.push(tape.scalar(pick));
        step_entropy.push(tape.scalar(ent));
        step_logdist.push(tape.val(logp).to_vec());
        picked.push(pick);
        entropy.push(ent);
        logdist.push(logp);

        prev = match mode.forced() {
            Some(m) => m.symbols()[t] as usize,
            None => emitted,
        };
    }

    Ok(TapedSenderRollout {
        rollout: SenderRollout {
            message: Message(message),
            step_logp,
            step_entropy,
            step_logdist,
        },
        picked,
        entropy,
        logdist,
    })
}

fn export_language_with(
    sender: &SenderParams,
    space: &ObjectSpace,
    inputs: &[Object],
) -> Result<LanguageTable> {
    let mut entries = Vec::with_capacity(inputs.len());
    for obj in inputs {
        let x = encode(space, obj)?;
        let rollout = sender.unroll(&x, UnrollMode::Argmax, None)?;
        entries.push(LanguageEntry {
            input: obj.clone(),
            message: rollout.message.0,
        });
    }
    Ok(LanguageTable {
        meta: LanguageMeta {
            n_att: space.n_att,
            n_val: space.n_val,
            vocab: sender.cfg.vocab,
            msg_len: sender.cfg.msg_len,
            topsim: None,
        },
        entries,
    })
}
