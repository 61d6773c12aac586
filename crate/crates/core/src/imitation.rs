//! Imitation of frozen expert mixtures.
//!
//! One freshly initialized imitator is trained against the cached
//! input/output tables of k experts, either supervised (cross-entropy
//! against expert symbols under teacher forcing) or by REINFORCE with
//! per-symbol accuracy as the reward and one running-mean baseline per
//! expert. Experts are cached up front and never touched again; their
//! parameters are frozen by construction.

use serde::{Deserialize, Serialize};

use crate::agents::{
    AgentConfig, Message, ReceiverParams, SenderParams, TapedSenderRollout, UnrollMode,
};
use crate::data::{encode, Object, ObjectSpace, ObjectVec};
use crate::error::{Error, Result};
use crate::game::{sender_policy_loss_on_tape, Baseline, ExpertPair};
use crate::numeric::tape::{NodeId, Tape};
use crate::numeric::{ops, AdamState, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(rename = "sv")]
    Supervised,
    #[serde(rename = "rf")]
    Reinforce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sender,
    Receiver,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ImitationConfig {
    pub algorithm: Algorithm,
    pub role: Role,
    /// Entropy coefficient; only meaningful under REINFORCE.
    pub lambda: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Unstable variant kept behind a flag: negative cross-entropy as the
    /// REINFORCE reward instead of per-symbol accuracy.
    #[serde(default)]
    pub negative_ce_reward: bool,
}

impl ImitationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::InvalidArgument("lambda must be >= 0".into()));
        }
        if self.algorithm == Algorithm::Supervised && self.lambda != 0.0 {
            return Err(Error::InvalidArgument(
                "lambda is only used by the REINFORCE objective; set it to 0 for supervised runs"
                    .into(),
            ));
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return Err(Error::InvalidArgument(
                "batch_size and epochs must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Frozen expert data aligned with one input list, sorted ascending by
/// topsim where topsims are known.
#[derive(Debug, Clone)]
pub struct ExpertSet {
    /// messages[expert][input]: argmax message of each expert sender.
    pub messages: Vec<Vec<Message>>,
    /// targets[expert][input]: argmax reconstruction of each expert
    /// receiver on its own sender's message. Required for receiver runs.
    pub receiver_targets: Option<Vec<Vec<Vec<u16>>>>,
    pub topsims: Vec<Option<f64>>,
    pub vocab: usize,
    pub msg_len: usize,
}

/// Selection experiments use 2..=5 experts; ease-of-imitation runs use 1.
pub const MAX_EXPERTS: usize = 5;

impl ExpertSet {
    pub fn new(
        messages: Vec<Vec<Message>>,
        receiver_targets: Option<Vec<Vec<Vec<u16>>>>,
        topsims: Vec<Option<f64>>,
        vocab: usize,
        msg_len: usize,
    ) -> Result<Self> {
        let k = messages.len();
        if k == 0 || k > MAX_EXPERTS {
            return Err(Error::InvalidArgument(format!(
                "expert count {k} outside 1..={MAX_EXPERTS}"
            )));
        }
        if topsims.len() != k {
            return Err(Error::InvalidArgument("one topsim per expert".into()));
        }
        let known: Vec<f64> = topsims.iter().filter_map(|t| *t).collect();
        if known.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(
                "experts must be sorted ascending by topsim".into(),
            ));
        }
        let n_inputs = messages[0].len();
        for msgs in &messages {
            if msgs.len() != n_inputs {
                return Err(Error::InvalidArgument(
                    "every expert must cover the same inputs".into(),
                ));
            }
            for m in msgs {
                if m.len() != msg_len || m.symbols().iter().any(|&s| s as usize >= vocab) {
                    return Err(Error::InvalidArgument(
                        "expert message violates the channel (length or alphabet)".into(),
                    ));
                }
            }
        }
        if let Some(targets) = &receiver_targets {
            if targets.len() != k || targets.iter().any(|t| t.len() != n_inputs) {
                return Err(Error::InvalidArgument(
                    "receiver targets must mirror the message table".into(),
                ));
            }
        }
        Ok(Self {
            messages,
            receiver_targets,
            topsims,
            vocab,
            msg_len,
        })
    }

    /// Cache expert behaviour on `inputs`. Experts are evaluated argmax-only
    /// (deterministic after training) so recomputing per epoch would be
    /// equivalent; caching once is just cheaper.
    pub fn from_pairs(
        pairs: &[&ExpertPair],
        space: &ObjectSpace,
        inputs: &[Object],
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("need at least one expert".into()));
        }
        let vocab = pairs[0].sender.cfg.vocab;
        let msg_len = pairs[0].sender.cfg.msg_len;
        let mut messages = Vec::with_capacity(pairs.len());
        let mut targets = Vec::with_capacity(pairs.len());
        for pair in pairs {
            let mut msgs = Vec::with_capacity(inputs.len());
            let mut outs = Vec::with_capacity(inputs.len());
            for obj in inputs {
                let x = encode(space, obj)?;
                let m = pair.sender.unroll(&x, UnrollMode::Argmax, None)?.message;
                outs.push(pair.receiver.decode(&m)?);
                msgs.push(m);
            }
            messages.push(msgs);
            targets.push(outs);
        }
        Self::new(
            messages,
            Some(targets),
            pairs.iter().map(|p| p.metrics.topsim).collect(),
            vocab,
            msg_len,
        )
    }

    pub fn k(&self) -> usize {
        self.messages.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.messages[0].len()
    }

    /// Chance level for the unmatched-message rule.
    pub fn chance(&self) -> f64 {
        1.0 / self.vocab as f64
    }
}

/// Supervised sender imitation loss for one input: sum over experts and
/// positions of cross-entropy between the expert symbol and the imitator's
/// teacher-forced step distribution.
pub fn sv_sender_imitation_loss_on_tape(
    tape: &mut Tape,
    sender: &SenderParams,
    x: &ObjectVec,
    expert_msgs: &[&Message],
) -> Result<NodeId> {
    sv_sender_imitation_loss_with(tape, &sender.cfg, &sender.store, x, expert_msgs)
}

/// [`sv_sender_imitation_loss_on_tape`] against an explicit store.
pub fn sv_sender_imitation_loss_with(
    tape: &mut Tape,
    cfg: &AgentConfig,
    store: &crate::numeric::ParamStore,
    x: &ObjectVec,
    expert_msgs: &[&Message],
) -> Result<NodeId> {
    let mut terms = Vec::with_capacity(expert_msgs.len() * cfg.msg_len);
    for m in expert_msgs {
        let ro = crate::agents::sender::unroll_on_tape_with(
            cfg,
            store,
            tape,
            x,
            UnrollMode::TeacherForced(m),
            None,
        )?;
        for (t, &sym) in m.symbols().iter().enumerate() {
            let picked = tape.pick(ro.logdist[t], sym as usize);
            terms.push((picked, -1.0));
        }
    }
    Ok(tape.sum_scaled(&terms))
}

/// Per-symbol accuracy reward for a REINFORCE sender rollout.
pub fn rf_sender_reward(rollout_msg: &Message, expert_msg: &Message) -> Result<f64> {
    rollout_msg.per_symbol_accuracy(expert_msg)
}

/// REINFORCE policy loss for one expert's rollout; identical form to the
/// reconstruction-game policy loss, with the baseline keyed by expert.
pub fn rf_sender_policy_loss_on_tape(
    tape: &mut Tape,
    rollout: &TapedSenderRollout,
    reward: f64,
    per_expert_baseline: &mut Baseline,
    lambda: f64,
) -> NodeId {
    sender_policy_loss_on_tape(tape, rollout, reward, per_expert_baseline, lambda)
}

/// REINFORCE mixture loss: per-expert pieces plus their average.
pub struct RfMixtureLoss {
    /// Per-expert losses averaged over the k experts.
    pub loss: NodeId,
    pub per_expert_loss: Vec<NodeId>,
    /// Per-symbol (or per-attribute) sampled accuracy per expert.
    pub sampled_accuracy: Vec<f64>,
}

/// REINFORCE mixture loss for one input: one teacher-forced sampled rollout
/// per expert, per-expert policy losses averaged over the k experts.
pub fn rf_sender_mixture_loss_on_tape(
    tape: &mut Tape,
    sender: &SenderParams,
    x: &ObjectVec,
    expert_msgs: &[&Message],
    baselines: &mut [Baseline],
    lambda: f64,
    negative_ce_reward: bool,
    rng: &mut Rng,
) -> Result<RfMixtureLoss> {
    let k = expert_msgs.len();
    let mut per_expert_loss = Vec::with_capacity(k);
    let mut sampled_accuracy = Vec::with_capacity(k);
    for (i, m) in expert_msgs.iter().enumerate() {
        let ro = sender.unroll_on_tape(tape, x, UnrollMode::TeacherForcedSampled(m), Some(rng))?;
        let acc = rf_sender_reward(&ro.rollout.message, m)?;
        let reward = if negative_ce_reward {
            // Negative mean cross-entropy of the expert symbols under the
            // imitator's step distributions.
            m.symbols()
                .iter()
                .zip(&ro.rollout.step_logdist)
                .map(|(&s, dist)| dist[s as usize])
                .sum::<f64>()
                / m.len() as f64
        } else {
            acc
        };
        let loss = rf_sender_policy_loss_on_tape(tape, &ro, reward, &mut baselines[i], lambda);
        per_expert_loss.push(loss);
        sampled_accuracy.push(acc);
    }
    let terms: Vec<(NodeId, f64)> = per_expert_loss
        .iter()
        .map(|&l| (l, 1.0 / k as f64))
        .collect();
    Ok(RfMixtureLoss {
        loss: tape.sum_scaled(&terms),
        per_expert_loss,
        sampled_accuracy,
    })
}

/// Supervised receiver imitation loss for one input: per-attribute
/// cross-entropy against each expert receiver's hard output, averaged over
/// attributes and experts.
pub fn sv_receiver_imitation_loss_on_tape(
    tape: &mut Tape,
    receiver: &ReceiverParams,
    expert_msgs: &[&Message],
    expert_outputs: &[&[u16]],
) -> Result<NodeId> {
    sv_receiver_imitation_loss_with(
        tape,
        &receiver.cfg,
        &receiver.store,
        expert_msgs,
        expert_outputs,
    )
}

/// [`sv_receiver_imitation_loss_on_tape`] against an explicit store.
pub fn sv_receiver_imitation_loss_with(
    tape: &mut Tape,
    cfg: &AgentConfig,
    store: &crate::numeric::ParamStore,
    expert_msgs: &[&Message],
    expert_outputs: &[&[u16]],
) -> Result<NodeId> {
    let k = expert_msgs.len();
    let n_att = cfg.n_att;
    let n_val = cfg.n_val;
    let mut terms = Vec::with_capacity(k * n_att);
    let coef = -1.0 / (k * n_att) as f64;
    for (m, out) in expert_msgs.iter().zip(expert_outputs) {
        let logp = crate::agents::receiver::forward_on_tape_with(cfg, store, tape, m)?;
        for (b, &t) in out.iter().enumerate() {
            let picked = tape.pick(logp, b * n_val + t as usize);
            terms.push((picked, coef));
        }
    }
    Ok(tape.sum_scaled(&terms))
}

/// Per-attribute accuracy reward for a REINFORCE receiver rollout.
pub fn rf_receiver_reward(sampled: &[u16], expert_output: &[u16]) -> Result<f64> {
    if sampled.len() != expert_output.len() {
        return Err(Error::InvalidArgument(format!(
            "output length mismatch: {} vs {}",
            sampled.len(),
            expert_output.len()
        )));
    }
    let hits = sampled
        .iter()
        .zip(expert_output)
        .filter(|(a, b)| a == b)
        .count();
    Ok(hits as f64 / sampled.len() as f64)
}

/// REINFORCE mixture loss for one input on the receiver side.
pub fn rf_receiver_mixture_loss_on_tape(
    tape: &mut Tape,
    receiver: &ReceiverParams,
    expert_msgs: &[&Message],
    expert_outputs: &[&[u16]],
    baselines: &mut [Baseline],
    lambda: f64,
    rng: &mut Rng,
) -> Result<RfMixtureLoss> {
    let k = expert_msgs.len();
    let n_att = receiver.cfg.n_att;
    let n_val = receiver.cfg.n_val;
    let mut per_expert_loss = Vec::with_capacity(k);
    let mut sampled_accuracy = Vec::with_capacity(k);
    for (i, (m, out)) in expert_msgs.iter().zip(expert_outputs).enumerate() {
        let logp = receiver.forward_on_tape(tape, m)?;
        let mut sampled = Vec::with_capacity(n_att);
        for b in 0..n_att {
            let block = &tape.val(logp)[b * n_val..(b + 1) * n_val];
            sampled.push(ops::sample_categorical(block, rng)? as u16);
        }
        let reward = rf_receiver_reward(&sampled, out)?;
        let advantage = reward - baselines[i].mean();
        baselines[i].observe(reward);

        let mut terms = Vec::with_capacity(n_att + 1);
        for (b, &s) in sampled.iter().enumerate() {
            let picked = tape.pick(logp, b * n_val + s as usize);
            terms.push((picked, -advantage));
        }
        // Entropy over the concatenated blocks is the sum of block
        // entropies; average it over attributes.
        let ent = tape.entropy_from_logp(logp);
        terms.push((ent, -lambda / n_att as f64));
        per_expert_loss.push(tape.sum_scaled(&terms));
        sampled_accuracy.push(reward);
    }
    let terms: Vec<(NodeId, f64)> = per_expert_loss
        .iter()
        .map(|&l| (l, 1.0 / k as f64))
        .collect();
    Ok(RfMixtureLoss {
        loss: tape.sum_scaled(&terms),
        per_expert_loss,
        sampled_accuracy,
    })
}

/// Per-epoch, per-expert validation accuracies (argmax decoding), plus the
/// sampled training accuracy per epoch for REINFORCE runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyCurve {
    pub validation: Vec<Vec<f64>>,
    pub training_sampled: Vec<f64>,
}

impl AccuracyCurve {
    pub fn epochs(&self) -> usize {
        self.validation.len()
    }

    pub fn expert_curve(&self, expert: usize) -> Vec<f64> {
        self.validation.iter().map(|row| row[expert]).collect()
    }
}

/// First 1-indexed epoch at which accuracy reaches `threshold`.
pub fn sample_complexity_t(curve: &[f64], threshold: f64) -> Option<usize> {
    curve.iter().position(|&a| a >= threshold).map(|i| i + 1)
}

/// Mean accuracy over epochs 1..=cutoff (normalized area under the curve).
pub fn speed_of_learning_sol(curve: &[f64], cutoff: usize) -> f64 {
    assert!(cutoff >= 1 && cutoff <= curve.len(), "cutoff out of range");
    curve[..cutoff].iter().sum::<f64>() / cutoff as f64
}

pub enum Imitator {
    Sender(SenderParams),
    Receiver(ReceiverParams),
}

impl Imitator {
    pub fn as_sender(&self) -> Option<&SenderParams> {
        match self {
            Imitator::Sender(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_receiver(&self) -> Option<&ReceiverParams> {
        match self {
            Imitator::Receiver(r) => Some(r),
            _ => None,
        }
    }
}

pub struct ImitationOutcome {
    pub curve: AccuracyCurve,
    pub imitator: Imitator,
}

/// Train one imitator against the expert set. Each epoch presents every
/// training input to all experts and the imitator; per-expert validation
/// accuracy is logged every epoch. Deterministic in `cfg.seed`.
pub fn run_imitation(
    set: &ExpertSet,
    space: &ObjectSpace,
    agent_cfg: &AgentConfig,
    inputs: &[Object],
    cfg: &ImitationConfig,
) -> Result<ImitationOutcome> {
    cfg.validate()?;
    if set.n_inputs() != inputs.len() {
        return Err(Error::InvalidArgument(
            "expert set and input list disagree on length".into(),
        ));
    }
    if cfg.role == Role::Receiver && set.receiver_targets.is_none() {
        return Err(Error::InvalidArgument(
            "receiver imitation needs expert receiver targets".into(),
        ));
    }
    if cfg.batch_size > inputs.len() {
        return Err(Error::InvalidArgument(format!(
            "batch_size {} exceeds training set size {}",
            cfg.batch_size,
            inputs.len()
        )));
    }

    let encoded: Vec<ObjectVec> = inputs
        .iter()
        .map(|o| encode(space, o))
        .collect::<Result<_>>()?;
    let root = Rng::seeded(cfg.seed);
    let mut rng = root.child(2);
    let k = set.k();
    let mut baselines = vec![Baseline::new(); k];

    match cfg.role {
        Role::Sender => {
            let mut imitator = SenderParams::init(agent_cfg, &mut root.child(1))?;
            let mut adam = AdamState::new(&imitator.store, cfg.lr);
            let mut validation = Vec::with_capacity(cfg.epochs);
            let mut training_sampled = Vec::with_capacity(cfg.epochs);

            let mut order: Vec<usize> = (0..encoded.len()).collect();
            for epoch in 1..=cfg.epochs {
                rng.shuffle(&mut order);
                let mut sampled_acc_sum = 0.0;
                let mut sampled_acc_n = 0usize;
                for batch in order.chunks(cfg.batch_size) {
                    let weight = 1.0 / batch.len() as f64;
                    for &i in batch {
                        let x = &encoded[i];
                        let msgs: Vec<&Message> =
                            set.messages.iter().map(|per| &per[i]).collect();
                        let mut tape = Tape::new();
                        let loss = match cfg.algorithm {
                            Algorithm::Supervised => {
                                sv_sender_imitation_loss_on_tape(&mut tape, &imitator, x, &msgs)?
                            }
                            Algorithm::Reinforce => {
                                let mix = rf_sender_mixture_loss_on_tape(
                                    &mut tape,
                                    &imitator,
                                    x,
                                    &msgs,
                                    &mut baselines,
                                    cfg.lambda,
                                    cfg.negative_ce_reward,
                                    &mut rng,
                                )?;
                                sampled_acc_sum += mix.sampled_accuracy.iter().sum::<f64>();
                                sampled_acc_n += mix.sampled_accuracy.len();
                                mix.loss
                            }
                        };
                        let loss_val = tape.scalar(loss);
                        if !loss_val.is_finite() {
                            return Err(Error::NonFinite {
                                context: format!("sender imitation epoch {epoch}"),
                                detail: format!("loss = {loss_val}"),
                            });
                        }
                        tape.backward(&mut imitator.store, loss, weight);
                    }
                    adam.update(&mut imitator.store)?;
                }
                validation.push(sender_validation_accuracy(&imitator, &encoded, set)?);
                if cfg.algorithm == Algorithm::Reinforce {
                    training_sampled.push(sampled_acc_sum / sampled_acc_n.max(1) as f64);
                }
            }
            Ok(ImitationOutcome {
                curve: AccuracyCurve {
                    validation,
                    training_sampled,
                },
                imitator: Imitator::Sender(imitator),
            })
        }
        Role::Receiver => {
            let targets = set.receiver_targets.as_ref().unwrap();
            let mut imitator = ReceiverParams::init(agent_cfg, &mut root.child(1))?;
            let mut adam = AdamState::new(&imitator.store, cfg.lr);
            let mut validation = Vec::with_capacity(cfg.epochs);
            let mut training_sampled = Vec::with_capacity(cfg.epochs);

            let mut order: Vec<usize> = (0..encoded.len()).collect();
            for epoch in 1..=cfg.epochs {
                rng.shuffle(&mut order);
                let mut sampled_acc_sum = 0.0;
                let mut sampled_acc_n = 0usize;
                for batch in order.chunks(cfg.batch_size) {
                    let weight = 1.0 / batch.len() as f64;
                    for &i in batch {
                        let msgs: Vec<&Message> =
                            set.messages.iter().map(|per| &per[i]).collect();
                        let outs: Vec<&[u16]> =
                            targets.iter().map(|per| per[i].as_slice()).collect();
                        let mut tape = Tape::new();
                        let loss = match cfg.algorithm {
                            Algorithm::Supervised => sv_receiver_imitation_loss_on_tape(
                                &mut tape, &imitator, &msgs, &outs,
                            )?,
                            Algorithm::Reinforce => {
                                let mix = rf_receiver_mixture_loss_on_tape(
                                    &mut tape,
                                    &imitator,
                                    &msgs,
                                    &outs,
                                    &mut baselines,
                                    cfg.lambda,
                                    &mut rng,
                                )?;
                                sampled_acc_sum += mix.sampled_accuracy.iter().sum::<f64>();
                                sampled_acc_n += mix.sampled_accuracy.len();
                                mix.loss
                            }
                        };
                        let loss_val = tape.scalar(loss);
                        if !loss_val.is_finite() {
                            return Err(Error::NonFinite {
                                context: format!("receiver imitation epoch {epoch}"),
                                detail: format!("loss = {loss_val}"),
                            });
                        }
                        tape.backward(&mut imitator.store, loss, weight);
                    }
                    adam.update(&mut imitator.store)?;
                }
                validation.push(receiver_validation_accuracy(&imitator, set, targets)?);
                if cfg.algorithm == Algorithm::Reinforce {
                    training_sampled.push(sampled_acc_sum / sampled_acc_n.max(1) as f64);
                }
            }
            Ok(ImitationOutcome {
                curve: AccuracyCurve {
                    validation,
                    training_sampled,
                },
                imitator: Imitator::Receiver(imitator),
            })
        }
    }
}

/// Per-expert mean per-symbol accuracy of the imitator's teacher-forced
/// argmax messages.
pub fn sender_validation_accuracy(
    imitator: &SenderParams,
    encoded: &[ObjectVec],
    set: &ExpertSet,
) -> Result<Vec<f64>> {
    let mut per_expert = Vec::with_capacity(set.k());
    for msgs in &set.messages {
        let mut acc = 0.0;
        for (x, m) in encoded.iter().zip(msgs) {
            let ro = imitator.unroll(x, UnrollMode::TeacherForced(m), None)?;
            acc += ro.message.per_symbol_accuracy(m)?;
        }
        per_expert.push(acc / encoded.len() as f64);
    }
    Ok(per_expert)
}

fn receiver_validation_accuracy(
    imitator: &ReceiverParams,
    set: &ExpertSet,
    targets: &[Vec<Vec<u16>>],
) -> Result<Vec<f64>> {
    let mut per_expert = Vec::with_capacity(set.k());
    for (msgs, outs) in set.messages.iter().zip(targets) {
        let mut acc = 0.0;
        for (m, out) in msgs.iter().zip(outs) {
            let decoded = imitator.decode(m)?;
            acc += rf_receiver_reward(&decoded, out)?;
        }
        per_expert.push(acc / msgs.len() as f64);
    }
    Ok(per_expert)
}
