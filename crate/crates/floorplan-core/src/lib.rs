//! Sequence-pair floorplacement: packing, cost evaluation, simulated
//! annealing, and a PPO agent that learns to produce good SA
//! initializations, with benchmark ingestion and result emission.

pub mod anneal;
pub mod cost;
pub mod error;
pub mod io;
pub mod model;
pub mod packer;
pub mod rl;

pub use anneal::{auto_temperature, metropolis_accept, propose_move, sa_run, SAConfig, SAResult};
pub use cost::CostBreakdown;
pub use error::{Error, Result};
pub use model::{
    random_sequence_pair, swap_pair, swap_single, Block, BlockKind, CostWeights, Net,
    ProblemInstance, Sequence, SequencePair,
};
pub use packer::{bounding_box, pack, Packing};
