//! The cyclic RL/SA trainer: environment, actor-critic nets, GAE, PPO,
//! and the epoch loop.

pub mod env;
pub mod gae;
pub mod net;
pub mod ppo;
pub mod train;

pub use env::{Env, EnvState};
pub use gae::compute_gae;
pub use net::{instance_fingerprint, Adam, Mlp, PolicyNet, SavedNet};
pub use ppo::{normalize_advantages, ppo_update, Losses, PpoOptimizer, Transition};
pub use train::{
    rl_init, run_epoch, train, train_from, EpochRecord, GlobalRewardSign, RLConfig, TrainReport,
};
