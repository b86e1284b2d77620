//! The epoch loop: r policy steps, s annealing steps from the resulting
//! sequence pair, and the post-SA improvement fed back as the terminal
//! value of the episode.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anneal::{sa_run, SAConfig, SAResult};
use crate::cost;
use crate::error::Result;
use crate::model::{ProblemInstance, SequencePair};
use crate::packer::pack;
use crate::rl::env::Env;
use crate::rl::gae::compute_gae;
use crate::rl::net::PolicyNet;
use crate::rl::ppo::{normalize_advantages, ppo_update, PpoOptimizer, Transition};

/// Orientation of the global reward. `Improvement` rewards the agent when
/// SA lowers the cost (r_g = C(init) - C(final)); `Literal` is the
/// opposite sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalRewardSign {
    Improvement,
    Literal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RLConfig {
    pub epochs: usize,
    pub r_steps: usize,
    pub s_steps: usize,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_eps: f64,
    pub learning_rate: f64,
    pub ppo_epochs: usize,
    pub minibatch_size: usize,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub hidden: usize,
    pub seed: u64,
    pub global_reward_sign: GlobalRewardSign,
}

impl Default for RLConfig {
    fn default() -> Self {
        RLConfig {
            epochs: 10,
            r_steps: 200,
            s_steps: 5000,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_eps: 0.2,
            learning_rate: 3e-4,
            ppo_epochs: 4,
            minibatch_size: 64,
            value_coef: 0.5,
            entropy_coef: 0.01,
            hidden: 128,
            seed: 0,
            global_reward_sign: GlobalRewardSign::Improvement,
        }
    }
}

impl RLConfig {
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidArgument(format!("gamma must be in (0, 1], got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return Err(Error::InvalidArgument(format!("lambda must be in [0, 1], got {}", self.gae_lambda)));
        }
        if self.clip_eps <= 0.0 {
            return Err(Error::InvalidArgument("clip_eps must be > 0".into()));
        }
        if self.r_steps < 1 {
            return Err(Error::InvalidArgument("r_steps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Cost of the sequence pair handed to SA.
    pub init_cost: f64,
    /// Best cost after the SA phase.
    pub post_sa_cost: f64,
    pub global_reward: f64,
    pub mean_local_reward: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub instance: String,
    pub epochs: Vec<EpochRecord>,
}

fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    // splitmix64 over (base, stream, index)
    let mut z = base ^ stream.wrapping_mul(0x9e3779b97f4a7c15) ^ index.wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// One policy rollout of r steps followed by the SA phase. Returns the
/// trajectory, the SA result (None when s_steps = 0), the global reward,
/// and the cost of the SA starting point.
pub fn run_epoch(
    instance: &ProblemInstance,
    net: &PolicyNet,
    cfg: &RLConfig,
    sa_cfg: &SAConfig,
    epoch: usize,
) -> Result<(Vec<Transition>, Option<SAResult>, f64, f64)> {
    cfg.validate()?;
    let mut env = Env::new(instance, derive_seed(cfg.seed, 1, epoch as u64));
    let mut action_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 2, epoch as u64));

    let mut state = env.reset();
    let mut traj = Vec::with_capacity(cfg.r_steps);
    for step in 0..cfg.r_steps {
        let logits = net.actor.output(&state.encoded);
        let logp = PolicyNet::log_softmax(&logits);
        let action = sample_categorical(&logp, &mut action_rng);
        let value = net.value(&state.encoded);
        let (next, local_reward) = env.step(&state, action)?;
        traj.push(Transition {
            state: std::mem::take(&mut state.encoded),
            action,
            log_prob: logp[action],
            value,
            local_reward,
            done: step + 1 == cfg.r_steps,
        });
        state = next;
    }

    let sp_r = state.sp.clone();
    let init_cost = cost::cost(instance, &pack(instance, &sp_r)?)?.total;

    let (sa_result, final_cost) = if cfg.s_steps == 0 {
        (None, init_cost)
    } else {
        let mut sa = sa_cfg.clone();
        sa.steps = cfg.s_steps;
        sa.seed = derive_seed(cfg.seed, 3, epoch as u64);
        let res = sa_run(instance, &sp_r, &sa)?;
        let c = res.best_cost.total;
        (Some(res), c)
    };

    let r_g = match cfg.global_reward_sign {
        GlobalRewardSign::Improvement => init_cost - final_cost,
        GlobalRewardSign::Literal => final_cost - init_cost,
    };
    Ok((traj, sa_result, r_g, init_cost))
}

pub fn sample_categorical(logp: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, l) in logp.iter().enumerate() {
        acc += l.exp();
        if u < acc {
            return i;
        }
    }
    logp.len() - 1
}

/// Reward scales for an instance, measured along a short random swap walk:
/// the RMS per-swap cost change (for local rewards) and the RMS cost level
/// (for the terminal reward), so both land O(1) regardless of cost units.
fn reward_scale(instance: &ProblemInstance, seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 5, 0));
    let ids = instance.free_ids();
    if ids.len() < 2 {
        return Ok((1.0, 1.0));
    }
    let mut sp = crate::model::random_sequence_pair_with(instance, &mut rng);
    let mut prev = cost::cost(instance, &pack(instance, &sp)?)?.total;
    let mut sq_sum = 0.0;
    let mut level_sq_sum = 0.0;
    let probes = 100;
    for _ in 0..probes {
        let a = ids[rng.gen_range(0..ids.len())];
        let b = ids[rng.gen_range(0..ids.len())];
        sp = crate::model::swap_pair(&sp, a, b)?;
        let c = cost::cost(instance, &pack(instance, &sp)?)?.total;
        sq_sum += (c - prev) * (c - prev);
        level_sq_sum += c * c;
        prev = c;
    }
    let rms = (sq_sum / probes as f64).sqrt();
    let level = (level_sq_sum / probes as f64).sqrt();
    Ok((if rms > 0.0 { rms } else { 1.0 }, if level > 0.0 { level } else { 1.0 }))
}

/// Trains a fresh network for cfg.epochs.
pub fn train(
    instance: &ProblemInstance,
    cfg: &RLConfig,
    sa_cfg: &SAConfig,
) -> Result<(PolicyNet, TrainReport)> {
    let net = PolicyNet::new(instance.num_free(), cfg.hidden, cfg.seed);
    train_from(instance, net, 0, cfg, sa_cfg)
}

/// Continues training an existing network; epoch records are numbered
/// from `start_epoch`.
pub fn train_from(
    instance: &ProblemInstance,
    mut net: PolicyNet,
    start_epoch: usize,
    cfg: &RLConfig,
    sa_cfg: &SAConfig,
) -> Result<(PolicyNet, TrainReport)> {
    cfg.validate()?;
    let mut opt = PpoOptimizer::new(cfg, &net);
    let mut report = TrainReport { instance: instance.name.clone(), epochs: Vec::new() };
    // rewards are in cost units (1e7..1e8 on real designs); divide them by
    // per-instance scales so per-step and terminal rewards are O(1) and the
    // critic can act as a usable baseline
    let (scale, terminal_scale) = reward_scale(instance, cfg.seed)?;
    for epoch in start_epoch..start_epoch + cfg.epochs {
        let started = Instant::now();
        let (traj, _, r_g, init_cost) = run_epoch(instance, &net, cfg, sa_cfg, epoch)?;
        let rewards: Vec<f64> = traj.iter().map(|t| t.local_reward / scale).collect();
        let values: Vec<f64> = traj.iter().map(|t| t.value).collect();
        let (mut advantages, returns) =
            compute_gae(&rewards, &values, r_g / terminal_scale, cfg.gamma, cfg.gae_lambda)?;
        normalize_advantages(&mut advantages);
        let mut update_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 4, epoch as u64));
        let losses = ppo_update(&mut net, &mut opt, &traj, &advantages, &returns, cfg, &mut update_rng)?;
        report.epochs.push(EpochRecord {
            epoch,
            init_cost,
            post_sa_cost: init_cost - match cfg.global_reward_sign {
                GlobalRewardSign::Improvement => r_g,
                GlobalRewardSign::Literal => -r_g,
            },
            global_reward: r_g,
            mean_local_reward: traj.iter().map(|t| t.local_reward).sum::<f64>()
                / traj.len() as f64,
            policy_loss: losses.policy,
            value_loss: losses.value,
            entropy: losses.entropy,
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    Ok((net, report))
}

/// Rolls the trained policy for r steps from a fresh reset and returns the
/// resulting sequence pair, the SA starting point.
pub fn rl_init(
    instance: &ProblemInstance,
    net: &PolicyNet,
    r_steps: usize,
    seed: u64,
    greedy: bool,
) -> Result<SequencePair> {
    let mut env = Env::new(instance, derive_seed(seed, 1, 0));
    let mut action_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2, 0));
    let mut state = env.reset();
    for _ in 0..r_steps {
        let logp = PolicyNet::log_softmax(&net.actor.output(&state.encoded));
        let action = if greedy {
            logp.iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap()
        } else {
            sample_categorical(&logp, &mut action_rng)
        };
        let (next, _) = env.step(&state, action)?;
        state = next;
    }
    Ok(state.sp)
}
