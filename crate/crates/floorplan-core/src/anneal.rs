//! Simulated annealing over sequence pairs with an exponential cooling
//! schedule and Metropolis acceptance on the weighted total cost.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{self, CostBreakdown};
use crate::error::{Error, Result};
use crate::model::{self, ProblemInstance, Sequence, SequencePair};
use crate::packer::pack;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SAConfig {
    pub steps: usize,
    pub t_max: f64,
    pub t_min: f64,
    /// (p_swap_both, p_swap_plus, p_swap_minus), summing to 1.
    pub move_probs: (f64, f64, f64),
    pub rotation_enabled: bool,
    pub seed: u64,
}

impl SAConfig {
    pub fn new(steps: usize, t_max: f64, t_min: f64, seed: u64) -> Self {
        SAConfig {
            steps,
            t_max,
            t_min,
            move_probs: (0.4, 0.3, 0.3),
            rotation_enabled: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 1 {
            return Err(Error::InvalidArgument("SA needs steps >= 1".into()));
        }
        if !(self.t_max >= self.t_min && self.t_min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need t_max >= t_min > 0, got ({}, {})",
                self.t_max, self.t_min
            )));
        }
        let (a, b, c) = self.move_probs;
        if a < 0.0 || b < 0.0 || c < 0.0 || (a + b + c - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "move_probs must be non-negative and sum to 1, got {:?}",
                self.move_probs
            )));
        }
        Ok(())
    }

    /// Temperature at step k of `steps`: exponential decay from t_max
    /// to t_min.
    pub fn temperature(&self, k: usize) -> f64 {
        self.t_max * (self.t_min / self.t_max).powf(k as f64 / self.steps as f64)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SAResult {
    pub best: SequencePair,
    pub best_cost: CostBreakdown,
    /// (step, current total, best-so-far total), sampled every few steps.
    pub trace: Vec<(usize, f64, f64)>,
    pub accepted_moves: usize,
    /// Block ids whose width/height were transposed by accepted rotation
    /// moves (empty unless rotation is enabled).
    pub rotated: Vec<usize>,
}

/// One perturbed neighbor: a double-sequence swap of two random blocks, or
/// a single-sequence positional swap, per the configured move distribution.
pub fn propose_move(sp: &SequencePair, cfg: &SAConfig, rng: &mut impl Rng) -> SequencePair {
    let n = sp.len();
    if n < 2 {
        return sp.clone();
    }
    let (p_both, p_plus, _) = cfg.move_probs;
    let u: f64 = rng.gen();
    if u < p_both {
        let a = sp.gamma_plus[rng.gen_range(0..n)];
        let b = sp.gamma_plus[rng.gen_range(0..n)];
        model::swap_pair(sp, a, b).expect("ids come from the pair itself")
    } else {
        let which = if u < p_both + p_plus { Sequence::GammaPlus } else { Sequence::GammaMinus };
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        model::swap_single(sp, which, i, j).expect("positions are in range")
    }
}

pub fn sa_run(instance: &ProblemInstance, init: &SequencePair, cfg: &SAConfig) -> Result<SAResult> {
    init.validate(instance)?;
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // rotation transposes dimensions on a private copy of the instance,
    // never touching the sequence pair
    let mut inst = instance.clone();
    let mut rotated: Vec<usize> = Vec::new();

    let mut current = init.clone();
    let mut current_cost = cost::cost(&inst, &pack(&inst, &current)?)?;
    let mut best = current.clone();
    let mut best_cost = current_cost;

    let sample_every = (cfg.steps / 200).max(1);
    let mut trace = Vec::new();
    let mut accepted_moves = 0usize;

    for k in 0..cfg.steps {
        let t = cfg.temperature(k);

        let rotate = cfg.rotation_enabled && inst.num_free() >= 1 && rng.gen::<f64>() < 0.1;
        let (candidate, rot_id) = if rotate {
            let free = inst.free_ids();
            let id = free[rng.gen_range(0..free.len())];
            transpose_dims(&mut inst, id);
            (current.clone(), Some(id))
        } else {
            (propose_move(&current, cfg, &mut rng), None)
        };

        let cand_cost = cost::cost(&inst, &pack(&inst, &candidate)?)?;
        let delta = cand_cost.total - current_cost.total;
        let accept = metropolis_accept(delta, t, &mut rng);
        if accept {
            current = candidate;
            current_cost = cand_cost;
            accepted_moves += 1;
            if let Some(id) = rot_id {
                // record net orientation: a second rotation cancels
                if let Some(pos) = rotated.iter().position(|&r| r == id) {
                    rotated.remove(pos);
                } else {
                    rotated.push(id);
                }
            }
            if current_cost.total < best_cost.total {
                best = current.clone();
                best_cost = current_cost;
            }
        } else if let Some(id) = rot_id {
            transpose_dims(&mut inst, id);
        }

        if (k + 1) % sample_every == 0 || k + 1 == cfg.steps {
            trace.push((k + 1, current_cost.total, best_cost.total));
        }
    }

    Ok(SAResult { best, best_cost, trace, accepted_moves, rotated })
}

fn transpose_dims(inst: &mut ProblemInstance, id: usize) {
    let b = &mut inst.blocks[id];
    std::mem::swap(&mut b.width, &mut b.height);
}

/// Metropolis rule: improving moves always accepted, worsening moves with
/// probability exp(-delta / t).
pub fn metropolis_accept(delta: f64, t: f64, rng: &mut impl Rng) -> bool {
    delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp()
}

/// Picks (t_max, t_min) so a median-size worsening move is accepted with
/// probability `target_accept_hi` at the start and `target_accept_lo` at
/// the end of the schedule. Deltas are sampled along a random move walk.
pub fn auto_temperature(
    instance: &ProblemInstance,
    init: &SequencePair,
    target_accept_hi: f64,
    target_accept_lo: f64,
    sample: usize,
    seed: u64,
) -> Result<(f64, f64, bool)> {
    init.validate(instance)?;
    if instance.num_free() < 2 {
        return Ok((1.0, 1e-6, true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SAConfig::new(1, 1.0, 1.0, seed);
    let mut current = init.clone();
    let mut current_total = cost::cost(instance, &pack(instance, &current)?)?.total;
    let mut worsenings: Vec<f64> = Vec::new();
    for _ in 0..sample {
        let cand = propose_move(&current, &cfg, &mut rng);
        let total = cost::cost(instance, &pack(instance, &cand)?)?.total;
        let delta = total - current_total;
        if delta > 0.0 {
            worsenings.push(delta);
        }
        current = cand;
        current_total = total;
    }
    if worsenings.is_empty() {
        return Ok((1.0, 1e-6, true));
    }
    worsenings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = worsenings[worsenings.len() / 2];
    let t_max = median / -target_accept_hi.ln();
    let t_min = median / -target_accept_lo.ln();
    Ok((t_max, t_min, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen_lattice;
    use crate::model::{random_sequence_pair, Block, CostWeights};

    #[test]
    fn near_zero_temperature_rejects_worsening() {
        let inst = gen_lattice(3).unwrap();
        let init = random_sequence_pair(&inst, 5);
        let init_cost = cost::cost(&inst, &pack(&inst, &init).unwrap()).unwrap();
        let mut cfg = SAConfig::new(1, 1e-12, 1e-12, 99);
        cfg.move_probs = (1.0, 0.0, 0.0);
        let res = sa_run(&inst, &init, &cfg).unwrap();
        assert!(res.best_cost.total <= init_cost.total);
    }

    #[test]
    fn one_free_block_degenerates_to_init() {
        let inst = ProblemInstance {
            name: "one".into(),
            blocks: vec![Block::free(0, "b", 2.0, 3.0)],
            nets: vec![],
            weights: CostWeights::new(1.0, 0.0),
        };
        let init = SequencePair { gamma_plus: vec![0], gamma_minus: vec![0] };
        let res = sa_run(&inst, &init, &SAConfig::new(50, 1.0, 0.1, 3)).unwrap();
        assert_eq!(res.best, init);
    }

    #[test]
    fn seeded_determinism() {
        let inst = gen_lattice(3).unwrap();
        let init = random_sequence_pair(&inst, 2);
        let cfg = SAConfig::new(500, 10.0, 0.01, 7);
        let a = sa_run(&inst, &init, &cfg).unwrap();
        let b = sa_run(&inst, &init, &cfg).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.accepted_moves, b.accepted_moves);
    }

    #[test]
    fn best_trace_is_non_increasing() {
        let inst = gen_lattice(4).unwrap();
        let init = random_sequence_pair(&inst, 11);
        let res = sa_run(&inst, &init, &SAConfig::new(2000, 20.0, 0.01, 13)).unwrap();
        for w in res.trace.windows(2) {
            assert!(w[1].2 <= w[0].2);
        }
        // best corresponds to best_cost under pack+cost
        let re = cost::cost(&inst, &pack(&inst, &res.best).unwrap()).unwrap();
        assert_eq!(re.total, res.best_cost.total);
    }

    #[test]
    fn move_prob_shapes() {
        let inst = gen_lattice(3).unwrap();
        let sp = random_sequence_pair(&inst, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);

        let mut cfg = SAConfig::new(1, 1.0, 1.0, 0);
        cfg.move_probs = (0.0, 1.0, 0.0);
        for _ in 0..200 {
            let out = propose_move(&sp, &cfg, &mut rng);
            assert_eq!(out.gamma_minus, sp.gamma_minus);
        }

        cfg.move_probs = (1.0, 0.0, 0.0);
        for _ in 0..200 {
            let out = propose_move(&sp, &cfg, &mut rng);
            // a double swap moves the same two ids in both sequences (or none, if a == b)
            let diff_plus: Vec<usize> = (0..sp.len())
                .filter(|&i| out.gamma_plus[i] != sp.gamma_plus[i])
                .map(|i| sp.gamma_plus[i])
                .collect();
            let diff_minus: Vec<usize> = (0..sp.len())
                .filter(|&i| out.gamma_minus[i] != sp.gamma_minus[i])
                .map(|i| sp.gamma_minus[i])
                .collect();
            assert!(diff_plus.len() <= 2 && diff_minus.len() <= 2);
            let mut a: Vec<_> = diff_plus.clone();
            let mut b: Vec<_> = diff_minus.clone();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rotation_disabled_leaves_dimensions_alone() {
        let inst = gen_lattice(3).unwrap();
        let init = random_sequence_pair(&inst, 0);
        let cfg = SAConfig::new(1000, 5.0, 0.1, 21);
        let res = sa_run(&inst, &init, &cfg).unwrap();
        assert!(res.rotated.is_empty());
    }

    #[test]
    fn auto_temperature_fallback_and_ordering() {
        // single free block: every move has delta 0
        let inst = ProblemInstance {
            name: "one".into(),
            blocks: vec![Block::free(0, "b", 2.0, 3.0)],
            nets: vec![],
            weights: CostWeights::new(1.0, 0.0),
        };
        let init = SequencePair { gamma_plus: vec![0], gamma_minus: vec![0] };
        let (t_max, t_min, warned) = auto_temperature(&inst, &init, 0.98, 0.02, 50, 0).unwrap();
        assert!(warned);
        assert_eq!((t_max, t_min), (1.0, 1e-6));

        let inst = gen_lattice(4).unwrap();
        let init = random_sequence_pair(&inst, 9);
        let (t_max, t_min, warned) = auto_temperature(&inst, &init, 0.98, 0.02, 200, 0).unwrap();
        assert!(!warned);
        assert!(t_max / t_min >= 1.0);
    }

    #[test]
    fn auto_temperature_is_scale_equivariant() {
        // wirelength-only cost: scaling dims by 10 scales temperatures by 10
        let inst = gen_lattice(4).unwrap();
        let init = random_sequence_pair(&inst, 17);
        let (t_max, t_min, _) = auto_temperature(&inst, &init, 0.98, 0.02, 200, 5).unwrap();

        let mut scaled = inst.clone();
        for b in &mut scaled.blocks {
            b.width *= 10.0;
            b.height *= 10.0;
        }
        let (s_max, s_min, _) = auto_temperature(&scaled, &init, 0.98, 0.02, 200, 5).unwrap();
        assert!((s_max / t_max - 10.0).abs() < 1e-6);
        assert!((s_min / t_min - 10.0).abs() < 1e-6);
    }

    #[test]
    fn metropolis_acceptance_rate_matches_exp() {
        // fixed worsening delta at fixed T, 10^4 trials, +-3 sigma binomial
        let delta: f64 = 1.5;
        let t: f64 = 2.0;
        let p = (-delta / t).exp();
        let trials = 10_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let accepted = (0..trials).filter(|_| metropolis_accept(delta, t, &mut rng)).count();
        assert!(metropolis_accept(-0.1, t, &mut rng), "improving moves always accepted");
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        let expected = trials as f64 * p;
        assert!(
            (accepted as f64 - expected).abs() <= 3.0 * sigma,
            "accepted {accepted}, expected {expected:.1} +- {:.1}",
            3.0 * sigma
        );
    }
}
