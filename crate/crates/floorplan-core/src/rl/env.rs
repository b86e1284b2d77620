//! The placement environment: states are (sequence pair, input block),
//! actions pick the candidate block to swap with the input block, and the
//! local reward is the cost reduction of that swap.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost;
use crate::error::{Error, Result};
use crate::model::{self, ProblemInstance, SequencePair};
use crate::packer::pack;

#[derive(Debug, Clone)]
pub struct EnvState {
    pub sp: SequencePair,
    /// The input block b_i, as a block id.
    pub input_block: usize,
    /// 3n values in [0, 1]: gamma_plus positions / n, gamma_minus
    /// positions / n, one-hot of the input block. Slot order is ascending
    /// free-block id.
    pub encoded: Vec<f64>,
}

pub struct Env<'a> {
    pub instance: &'a ProblemInstance,
    free_ids: Vec<usize>,
    rng: ChaCha8Rng,
}

impl<'a> Env<'a> {
    pub fn new(instance: &'a ProblemInstance, seed: u64) -> Self {
        Env {
            instance,
            free_ids: instance.free_ids(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn n_free(&self) -> usize {
        self.free_ids.len()
    }

    pub fn slot_of(&self, id: usize) -> usize {
        self.free_ids.binary_search(&id).expect("free-block id")
    }

    pub fn id_of_slot(&self, slot: usize) -> usize {
        self.free_ids[slot]
    }

    pub fn encode(&self, sp: &SequencePair, input_block: usize) -> Vec<f64> {
        let n = self.n_free();
        let mut encoded = vec![0.0; 3 * n];
        for (p, &id) in sp.gamma_plus.iter().enumerate() {
            encoded[self.slot_of(id)] = p as f64 / n as f64;
        }
        for (p, &id) in sp.gamma_minus.iter().enumerate() {
            encoded[n + self.slot_of(id)] = p as f64 / n as f64;
        }
        encoded[2 * n + self.slot_of(input_block)] = 1.0;
        encoded
    }

    /// Fresh random sequence pair and input block.
    pub fn reset(&mut self) -> EnvState {
        let sp = model::random_sequence_pair_with(self.instance, &mut self.rng);
        let input_block = self.free_ids[self.rng.gen_range(0..self.free_ids.len())];
        let encoded = self.encode(&sp, input_block);
        EnvState { sp, input_block, encoded }
    }

    /// Swaps the candidate block (given as a slot index into the free
    /// blocks) with the input block; reward is cost(before) - cost(after).
    pub fn step(&mut self, state: &EnvState, action_slot: usize) -> Result<(EnvState, f64)> {
        if action_slot >= self.free_ids.len() {
            return Err(Error::InvalidArgument(format!(
                "action slot {action_slot} out of range (n = {})",
                self.free_ids.len()
            )));
        }
        let candidate = self.free_ids[action_slot];
        let before = cost::cost(self.instance, &pack(self.instance, &state.sp)?)?.total;
        let sp = model::swap_pair(&state.sp, state.input_block, candidate)?;
        let after = cost::cost(self.instance, &pack(self.instance, &sp)?)?.total;
        let reward = before - after;
        let input_block = self.free_ids[self.rng.gen_range(0..self.free_ids.len())];
        let encoded = self.encode(&sp, input_block);
        Ok((EnvState { sp, input_block, encoded }, reward))
    }
}
