//! Sequence pair -> packing. Single O(n^2) pass in gamma_minus order:
//! every left- or below-predecessor of a block precedes it in gamma_minus,
//! so coordinates can be finalized in that order. Fixed blocks are
//! obstacles; a free block overlapping one is displaced rightward or
//! upward, whichever is the shorter shift (ties go right).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{rects_overlap, ProblemInstance, SequencePair};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Packing {
    /// Lower-left corner per block id, for all blocks (free and fixed).
    pub origins: HashMap<usize, (f64, f64)>,
    pub bbox_width: f64,
    pub bbox_height: f64,
}

impl Packing {
    pub fn origin(&self, id: usize) -> (f64, f64) {
        self.origins[&id]
    }
}

/// Extents of the minimal axis-aligned rectangle anchored at the origin
/// containing all blocks. Fixed blocks may sit at negative coordinates,
/// which stretches the box below/left of the origin.
pub fn bounding_box(instance: &ProblemInstance, origins: &HashMap<usize, (f64, f64)>) -> (f64, f64) {
    let mut max_x: f64 = 0.0;
    let mut max_y: f64 = 0.0;
    let mut min_x: f64 = 0.0;
    let mut min_y: f64 = 0.0;
    for b in &instance.blocks {
        let (x, y) = origins[&b.id];
        max_x = max_x.max(x + b.width);
        max_y = max_y.max(y + b.height);
        min_x = min_x.min(x);
        min_y = min_y.min(y);
    }
    (max_x - min_x, max_y - min_y)
}

pub fn pack(instance: &ProblemInstance, sp: &SequencePair) -> Result<Packing> {
    sp.validate(instance)?;
    let n_total = instance.blocks.len();

    // position of each free block in each sequence, by block id
    let mut pos_plus = vec![usize::MAX; n_total];
    let mut pos_minus = vec![usize::MAX; n_total];
    for (p, &id) in sp.gamma_plus.iter().enumerate() {
        pos_plus[id] = p;
    }
    for (p, &id) in sp.gamma_minus.iter().enumerate() {
        pos_minus[id] = p;
    }

    let obstacles: Vec<(f64, f64, f64, f64)> = instance
        .fixed_blocks()
        .map(|b| {
            let (x, y) = b.fixed_origin.expect("fixed block has origin");
            (x, y, b.width, b.height)
        })
        .collect();

    let mut origins: HashMap<usize, (f64, f64)> = HashMap::with_capacity(n_total);
    for b in instance.fixed_blocks() {
        origins.insert(b.id, b.fixed_origin.unwrap());
    }

    let mut placed: Vec<usize> = Vec::with_capacity(sp.len());
    for &b in &sp.gamma_minus {
        let bw = instance.blocks[b].width;
        let bh = instance.blocks[b].height;
        let mut x: f64 = 0.0;
        let mut y: f64 = 0.0;
        for &a in &placed {
            debug_assert!(pos_minus[a] < pos_minus[b]);
            let (ax, ay) = origins[&a];
            if pos_plus[a] < pos_plus[b] {
                // a left of b
                x = x.max(ax + instance.blocks[a].width);
            } else {
                // a below b
                y = y.max(ay + instance.blocks[a].height);
            }
        }
        // displace past any fixed block we landed on
        loop {
            let mut hit = None;
            for &obs in &obstacles {
                if rects_overlap((x, y, bw, bh), obs) {
                    hit = Some(obs);
                    break;
                }
            }
            let Some((ox, oy, ow, oh)) = hit else { break };
            let dx = ox + ow - x;
            let dy = oy + oh - y;
            if dx <= dy {
                x = ox + ow;
            } else {
                y = oy + oh;
            }
        }
        origins.insert(b, (x, y));
        placed.push(b);
    }

    let (bbox_width, bbox_height) = bounding_box(instance, &origins);
    Ok(Packing { origins, bbox_width, bbox_height })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Block, BlockKind, CostWeights};

    fn unit_instance(n: usize) -> ProblemInstance {
        ProblemInstance {
            name: format!("unit{n}"),
            blocks: (0..n).map(|i| Block::free(i, format!("b{i}"), 1.0, 1.0)).collect(),
            nets: vec![],
            weights: CostWeights::new(1.0, 0.0),
        }
    }

    #[test]
    fn both_precede_means_left_of() {
        let inst = unit_instance(2);
        let sp = SequencePair { gamma_plus: vec![0, 1], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        assert_eq!(p.origin(0), (0.0, 0.0));
        assert_eq!(p.origin(1), (1.0, 0.0));
        assert_eq!((p.bbox_width, p.bbox_height), (2.0, 1.0));
    }

    #[test]
    fn reversed_in_plus_means_above() {
        let inst = unit_instance(2);
        let sp = SequencePair { gamma_plus: vec![1, 0], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        assert_eq!(p.origin(0), (0.0, 0.0));
        assert_eq!(p.origin(1), (0.0, 1.0));
        assert_eq!((p.bbox_width, p.bbox_height), (1.0, 2.0));
    }

    #[test]
    fn single_block_bbox() {
        let inst = ProblemInstance {
            name: "one".into(),
            blocks: vec![Block::free(0, "b0", 30.0, 40.0)],
            nets: vec![],
            weights: CostWeights::new(1.0, 0.0),
        };
        let sp = SequencePair { gamma_plus: vec![0], gamma_minus: vec![0] };
        let p = pack(&inst, &sp).unwrap();
        assert_eq!(p.origin(0), (0.0, 0.0));
        assert_eq!((p.bbox_width, p.bbox_height), (30.0, 40.0));
    }

    #[test]
    fn invalid_sp_rejected() {
        let inst = unit_instance(2);
        let sp = SequencePair { gamma_plus: vec![0, 0], gamma_minus: vec![0, 1] };
        assert!(pack(&inst, &sp).is_err());
    }

    #[test]
    fn fixed_block_stays_and_free_dodges() {
        let mut inst = unit_instance(2);
        inst.blocks.push(Block {
            id: 2,
            name: "obs".into(),
            width: 3.0,
            height: 3.0,
            kind: BlockKind::Fixed,
            fixed_origin: Some((0.0, 0.0)),
        });
        let sp = SequencePair { gamma_plus: vec![0, 1], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        assert_eq!(p.origin(2), (0.0, 0.0));
        // both free blocks pushed clear of the 3x3 obstacle at the origin
        for id in [0usize, 1] {
            let (x, y) = p.origin(id);
            assert!(
                !rects_overlap((x, y, 1.0, 1.0), (0.0, 0.0, 3.0, 3.0)),
                "block {id} overlaps the obstacle at ({x}, {y})"
            );
        }
        // pairwise separation still holds
        let (x0, y0) = p.origin(0);
        let (x1, y1) = p.origin(1);
        assert!(!rects_overlap((x0, y0, 1.0, 1.0), (x1, y1, 1.0, 1.0)));
    }

    #[test]
    fn bbox_matches_max_scan_oracle() {
        let inst = unit_instance(6);
        for seed in 0..50u64 {
            let sp = crate::model::random_sequence_pair(&inst, seed);
            let p = pack(&inst, &sp).unwrap();
            let mut mx: f64 = 0.0;
            let mut my: f64 = 0.0;
            for b in &inst.blocks {
                let (x, y) = p.origin(b.id);
                mx = mx.max(x + b.width);
                my = my.max(y + b.height);
            }
            assert_eq!((p.bbox_width, p.bbox_height), (mx, my));
        }
    }
}
