//! Problem description and the sequence-pair representation.
//!
//! A sequence pair is two permutations of the free-block ids. Block `a`
//! preceding `b` in both sequences means `a` is left of `b` in any packing;
//! `a` after `b` in gamma_plus but before it in gamma_minus means `a` is
//! below `b`. Fixed blocks never appear in the sequences; the packer treats
//! them as obstacles.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Free,
    Fixed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Block {
    pub id: usize,
    pub name: String,
    pub width: f64,
    pub height: f64,
    pub kind: BlockKind,
    /// Lower-left corner, present iff `kind == Fixed`.
    pub fixed_origin: Option<(f64, f64)>,
}

impl Block {
    pub fn free(id: usize, name: impl Into<String>, width: f64, height: f64) -> Self {
        Block {
            id,
            name: name.into(),
            width,
            height,
            kind: BlockKind::Free,
            fixed_origin: None,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.kind == BlockKind::Fixed
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// A net stored as an edge list: every net in this artifact has exactly
/// two members after ingestion (multi-pin YAL nets are decomposed into
/// consecutive-pair edges), but the type allows any >= 2 distinct members
/// and wirelength sums over consecutive pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Net {
    pub id: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostWeights {
    pub w_area: f64,
    pub w_wire: f64,
}

impl CostWeights {
    pub fn new(w_area: f64, w_wire: f64) -> Self {
        CostWeights { w_area, w_wire }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub blocks: Vec<Block>,
    pub nets: Vec<Net>,
    pub weights: CostWeights,
}

impl ProblemInstance {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Ids of free blocks in ascending order.
    pub fn free_ids(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| !b.is_fixed())
            .map(|b| b.id)
            .collect()
    }

    pub fn num_free(&self) -> usize {
        self.blocks.iter().filter(|b| !b.is_fixed()).count()
    }

    pub fn fixed_blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.is_fixed())
    }

    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.blocks.iter().enumerate() {
            if b.id != i {
                return Err(Error::Inconsistency(format!(
                    "block ids must be dense 0..n; found id {} at index {}",
                    b.id, i
                )));
            }
            if !(b.width > 0.0 && b.height > 0.0) {
                return Err(Error::Inconsistency(format!(
                    "block {} has non-positive dimensions",
                    b.name
                )));
            }
            match (b.kind, b.fixed_origin) {
                (BlockKind::Fixed, None) => {
                    return Err(Error::Inconsistency(format!(
                        "fixed block {} lacks an origin",
                        b.name
                    )))
                }
                (BlockKind::Free, Some(_)) => {
                    return Err(Error::Inconsistency(format!(
                        "free block {} carries a fixed origin",
                        b.name
                    )))
                }
                _ => {}
            }
        }
        if self.num_free() == 0 {
            return Err(Error::Inconsistency("no free blocks".into()));
        }
        if !(self.weights.w_area >= 0.0
            && self.weights.w_wire >= 0.0
            && self.weights.w_area + self.weights.w_wire > 0.0)
        {
            return Err(Error::Inconsistency("cost weights must be >= 0, not both zero".into()));
        }
        for net in &self.nets {
            if net.members.len() < 2 {
                return Err(Error::Inconsistency(format!("net {} has < 2 members", net.id)));
            }
            let mut seen = vec![false; self.blocks.len()];
            for &m in &net.members {
                if m >= self.blocks.len() {
                    return Err(Error::Inconsistency(format!(
                        "net {} references unknown block {}",
                        net.id, m
                    )));
                }
                if seen[m] {
                    return Err(Error::Inconsistency(format!(
                        "net {} repeats block {}",
                        net.id, m
                    )));
                }
                seen[m] = true;
            }
        }
        let fixed: Vec<&Block> = self.fixed_blocks().collect();
        for i in 0..fixed.len() {
            for j in i + 1..fixed.len() {
                if rects_overlap(rect_of(fixed[i]), rect_of(fixed[j])) {
                    return Err(Error::Inconsistency(format!(
                        "fixed blocks {} and {} overlap",
                        fixed[i].name, fixed[j].name
                    )));
                }
            }
        }
        Ok(())
    }
}

fn rect_of(b: &Block) -> (f64, f64, f64, f64) {
    let (x, y) = b.fixed_origin.expect("fixed block");
    (x, y, b.width, b.height)
}

/// Open-interval overlap of two axis-aligned rectangles (x, y, w, h).
pub fn rects_overlap(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    a.0 < b.0 + b.2 && b.0 < a.0 + a.2 && a.1 < b.1 + b.3 && b.1 < a.1 + a.3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sequence {
    GammaPlus,
    GammaMinus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePair {
    pub gamma_plus: Vec<usize>,
    pub gamma_minus: Vec<usize>,
}

impl SequencePair {
    pub fn len(&self) -> usize {
        self.gamma_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma_plus.is_empty()
    }

    /// Both sequences must be permutations of exactly the instance's
    /// free-block ids.
    pub fn validate(&self, instance: &ProblemInstance) -> Result<()> {
        let free = instance.free_ids();
        for (label, seq) in [("gamma_plus", &self.gamma_plus), ("gamma_minus", &self.gamma_minus)] {
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            if sorted != free {
                return Err(Error::InvalidArgument(format!(
                    "{label} is not a permutation of the free-block ids"
                )));
            }
        }
        Ok(())
    }

    fn position_in(seq: &[usize], id: usize) -> Option<usize> {
        seq.iter().position(|&x| x == id)
    }
}

/// Two independent uniform random permutations of the free-block ids.
pub fn random_sequence_pair(instance: &ProblemInstance, seed: u64) -> SequencePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_sequence_pair_with(instance, &mut rng)
}

pub fn random_sequence_pair_with(instance: &ProblemInstance, rng: &mut impl rand::Rng) -> SequencePair {
    let free = instance.free_ids();
    let mut gamma_plus = free.clone();
    let mut gamma_minus = free;
    gamma_plus.shuffle(rng);
    gamma_minus.shuffle(rng);
    SequencePair { gamma_plus, gamma_minus }
}

/// Exchange blocks `a` and `b` in both sequences. Involution; `a == b` is
/// the identity.
pub fn swap_pair(sp: &SequencePair, a: usize, b: usize) -> Result<SequencePair> {
    let pa_plus = SequencePair::position_in(&sp.gamma_plus, a)
        .ok_or_else(|| Error::InvalidArgument(format!("block {a} not in sequence pair")))?;
    let pb_plus = SequencePair::position_in(&sp.gamma_plus, b)
        .ok_or_else(|| Error::InvalidArgument(format!("block {b} not in sequence pair")))?;
    let pa_minus = SequencePair::position_in(&sp.gamma_minus, a).expect("validated above");
    let pb_minus = SequencePair::position_in(&sp.gamma_minus, b).expect("validated above");
    let mut out = sp.clone();
    out.gamma_plus.swap(pa_plus, pb_plus);
    out.gamma_minus.swap(pa_minus, pb_minus);
    Ok(out)
}

/// Exchange positions `i` and `j` in one sequence only.
pub fn swap_single(sp: &SequencePair, which: Sequence, i: usize, j: usize) -> Result<SequencePair> {
    let n = sp.len();
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!(
            "positions ({i}, {j}) out of range for length {n}"
        )));
    }
    let mut out = sp.clone();
    match which {
        Sequence::GammaPlus => out.gamma_plus.swap(i, j),
        Sequence::GammaMinus => out.gamma_minus.swap(i, j),
    }
    Ok(out)
}
