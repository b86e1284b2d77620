//! Clipped-surrogate PPO update for the actor-critic pair.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rl::net::{Adam, PolicyNet};
use crate::rl::train::RLConfig;

/// One recorded environment step.
#[derive(Debug, Clone)]
pub struct Transition {
    pub state: Vec<f64>,
    /// Chosen candidate block, as a slot index into the free blocks.
    pub action: usize,
    pub log_prob: f64,
    pub value: f64,
    pub local_reward: f64,
    pub done: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Losses {
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
}

/// Loss over one minibatch and its gradient w.r.t. both nets' parameters.
///
/// L = -mean(min(rho A, clip(rho) A)) + value_coef * mean((V - R)^2)
///     - entropy_coef * mean(H)
fn minibatch_loss_and_grad(
    net: &PolicyNet,
    batch: &[(&Transition, f64, f64)], // (transition, advantage, return)
    clip_eps: f64,
    value_coef: f64,
    entropy_coef: f64,
    actor_grad: &mut [f64],
    critic_grad: &mut [f64],
) -> Losses {
    let b = batch.len() as f64;
    let mut losses = Losses::default();
    for (tr, adv, ret) in batch {
        let (logits, actor_acts) = net.actor.forward(&tr.state);
        let logp = PolicyNet::log_softmax(&logits);
        let probs: Vec<f64> = logp.iter().map(|l| l.exp()).collect();
        let rho = (logp[tr.action] - tr.log_prob).exp();

        let surr_raw = rho * adv;
        let surr_clip = rho.clamp(1.0 - clip_eps, 1.0 + clip_eps) * adv;
        let objective = surr_raw.min(surr_clip);
        losses.policy += -objective / b;

        let entropy: f64 = -logp.iter().zip(&probs).map(|(l, p)| l * p).sum::<f64>();
        losses.entropy += entropy / b;

        // d(-objective)/d logp(a) = -rho * adv when the raw surrogate is
        // active, 0 when the clip has flattened it
        let d_obj_d_logpa = if surr_raw <= surr_clip { rho * adv } else { 0.0 };
        let mut d_logits = vec![0.0; logits.len()];
        for j in 0..logits.len() {
            let indicator = if j == tr.action { 1.0 } else { 0.0 };
            // policy term
            d_logits[j] += -d_obj_d_logpa * (indicator - probs[j]) / b;
            // entropy bonus: dH/dl_j = -p_j (log p_j + H)
            d_logits[j] += entropy_coef * probs[j] * (logp[j] + entropy) / b;
        }
        net.actor.backward(&actor_acts, &d_logits, actor_grad);

        let (v_out, critic_acts) = net.critic.forward(&tr.state);
        let v = v_out[0];
        losses.value += (v - ret).powi(2) / b;
        let d_v = value_coef * 2.0 * (v - ret) / b;
        net.critic.backward(&critic_acts, &[d_v], critic_grad);
    }
    losses
}

pub struct PpoOptimizer {
    pub actor_adam: Adam,
    pub critic_adam: Adam,
}

impl PpoOptimizer {
    pub fn new(cfg: &RLConfig, net: &PolicyNet) -> Self {
        PpoOptimizer {
            actor_adam: Adam::new(cfg.learning_rate, net.actor.params.len()),
            critic_adam: Adam::new(cfg.learning_rate, net.critic.params.len()),
        }
    }
}

/// Runs `ppo_epochs` passes of shuffled minibatches over the trajectory.
/// Advantages must already be normalized. On a non-finite loss the
/// parameters are rolled back and the update aborts.
pub fn ppo_update(
    net: &mut PolicyNet,
    opt: &mut PpoOptimizer,
    traj: &[Transition],
    advantages: &[f64],
    returns: &[f64],
    cfg: &RLConfig,
    rng: &mut impl Rng,
) -> Result<Losses> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let snapshot = (net.actor.params.clone(), net.critic.params.clone());
    let mut last = Losses::default();
    let mut indices: Vec<usize> = (0..traj.len()).collect();
    for _ in 0..cfg.ppo_epochs {
        indices.shuffle(rng);
        for chunk in indices.chunks(cfg.minibatch_size) {
            let batch: Vec<(&Transition, f64, f64)> =
                chunk.iter().map(|&i| (&traj[i], advantages[i], returns[i])).collect();
            let mut actor_grad = vec![0.0; net.actor.params.len()];
            let mut critic_grad = vec![0.0; net.critic.params.len()];
            let losses = minibatch_loss_and_grad(
                net,
                &batch,
                cfg.clip_eps,
                cfg.value_coef,
                cfg.entropy_coef,
                &mut actor_grad,
                &mut critic_grad,
            );
            let total =
                losses.policy + cfg.value_coef * losses.value - cfg.entropy_coef * losses.entropy;
            if !total.is_finite() {
                net.actor.params = snapshot.0;
                net.critic.params = snapshot.1;
                return Err(Error::InvalidArgument(format!(
                    "non-finite PPO loss ({total}); parameters rolled back"
                )));
            }
            // clip per net: cost scales make critic gradients orders of
            // magnitude larger, and a joint norm would starve the actor
            clip_norm(&mut actor_grad, 0.5);
            clip_norm(&mut critic_grad, 0.5);
            opt.actor_adam.step(&mut net.actor.params, &actor_grad);
            opt.critic_adam.step(&mut net.critic.params, &critic_grad);
            last = losses;
        }
    }
    Ok(last)
}

fn clip_norm(g: &mut [f64], max_norm: f64) {
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        for v in g.iter_mut() {
            *v *= scale;
        }
    }
}

/// Zero-mean unit-variance normalization; single-sample batches are left
/// untouched.
pub fn normalize_advantages(advantages: &mut [f64]) {
    if advantages.len() < 2 {
        return;
    }
    let n = advantages.len() as f64;
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt().max(1e-8);
    for a in advantages.iter_mut() {
        *a = (*a - mean) / std;
    }
}

/// Total scalar loss over a batch, without touching any parameters.
/// Used for finite-difference checks of the analytic gradients.
pub fn loss_only(
    net: &PolicyNet,
    batch: &[(&Transition, f64, f64)],
    clip_eps: f64,
    value_coef: f64,
    entropy_coef: f64,
) -> f64 {
    let mut ag = vec![0.0; net.actor.params.len()];
    let mut cg = vec![0.0; net.critic.params.len()];
    let l = minibatch_loss_and_grad(net, batch, clip_eps, value_coef, entropy_coef, &mut ag, &mut cg);
    l.policy + value_coef * l.value - entropy_coef * l.entropy
}

/// Gradients of the total loss over a batch, as (actor, critic) vectors.
pub fn grads(
    net: &PolicyNet,
    batch: &[(&Transition, f64, f64)],
    clip_eps: f64,
    value_coef: f64,
    entropy_coef: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut ag = vec![0.0; net.actor.params.len()];
    let mut cg = vec![0.0; net.critic.params.len()];
    minibatch_loss_and_grad(net, batch, clip_eps, value_coef, entropy_coef, &mut ag, &mut cg);
    (ag, cg)
}
