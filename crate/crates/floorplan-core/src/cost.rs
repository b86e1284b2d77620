//! Area, wirelength, and the weighted cost of a packing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::packer::Packing;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub area: f64,
    pub wirelength: f64,
    pub total: f64,
}

/// Bounding-box area of the packing.
pub fn area(p: &Packing) -> f64 {
    p.bbox_width * p.bbox_height
}

/// Sum over nets of Manhattan center-to-center distances between
/// consecutive member pairs.
pub fn wirelength(instance: &ProblemInstance, p: &Packing) -> Result<f64> {
    let mut total = 0.0;
    for net in &instance.nets {
        for pair in net.members.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let ca = center(instance, p, a)?;
            let cb = center(instance, p, b)?;
            total += (ca.0 - cb.0).abs() + (ca.1 - cb.1).abs();
        }
    }
    Ok(total)
}

fn center(instance: &ProblemInstance, p: &Packing, id: usize) -> Result<(f64, f64)> {
    let block = instance
        .blocks
        .get(id)
        .ok_or_else(|| Error::Inconsistency(format!("net references missing block {id}")))?;
    let (x, y) = *p
        .origins
        .get(&id)
        .ok_or_else(|| Error::Inconsistency(format!("packing lacks block {id}")))?;
    Ok((x + block.width / 2.0, y + block.height / 2.0))
}

pub fn cost(instance: &ProblemInstance, p: &Packing) -> Result<CostBreakdown> {
    let a = area(p);
    let w = wirelength(instance, p)?;
    Ok(CostBreakdown {
        area: a,
        wirelength: w,
        total: instance.weights.w_area * a + instance.weights.w_wire * w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_sequence_pair, Block, CostWeights, Net, ProblemInstance};
    use crate::packer::pack;

    fn two_units_one_net(weights: CostWeights) -> ProblemInstance {
        ProblemInstance {
            name: "two".into(),
            blocks: vec![Block::free(0, "a", 1.0, 1.0), Block::free(1, "b", 1.0, 1.0)],
            nets: vec![Net { id: 0, members: vec![0, 1] }],
            weights,
        }
    }

    #[test]
    fn unit_strip_wirelength() {
        let inst = two_units_one_net(CostWeights::new(0.0, 1.0));
        let sp = crate::model::SequencePair { gamma_plus: vec![0, 1], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        assert_eq!(wirelength(&inst, &p).unwrap(), 1.0);
        assert_eq!(area(&p), 2.0);
    }

    #[test]
    fn weighted_total_is_linear() {
        let inst = two_units_one_net(CostWeights::new(1.0, 1.0));
        let sp = crate::model::SequencePair { gamma_plus: vec![0, 1], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        let c = cost(&inst, &p).unwrap();
        assert_eq!(c.total, c.area + c.wirelength);
        assert_eq!(c.total, 3.0);

        // linearity across weight splits
        let mut w1 = inst.clone();
        w1.weights = CostWeights::new(1.0, 0.0);
        let mut w2 = inst.clone();
        w2.weights = CostWeights::new(0.0, 1.0);
        let c1 = cost(&w1, &p).unwrap();
        let c2 = cost(&w2, &p).unwrap();
        assert_eq!(c.total, c1.total + c2.total);
    }

    #[test]
    fn zero_weight_decouples() {
        let inst = two_units_one_net(CostWeights::new(0.0, 1.0));
        let sp = crate::model::SequencePair { gamma_plus: vec![0, 1], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        assert_eq!(cost(&inst, &p).unwrap().total, 1.0);

        let inst2 = two_units_one_net(CostWeights::new(1.0, 0.0));
        assert_eq!(cost(&inst2, &p).unwrap().total, 2.0);
    }

    #[test]
    fn wirelength_is_translation_invariant() {
        let inst = two_units_one_net(CostWeights::new(0.0, 1.0));
        for seed in 0..20u64 {
            let sp = random_sequence_pair(&inst, seed);
            let mut p = pack(&inst, &sp).unwrap();
            let w0 = wirelength(&inst, &p).unwrap();
            let (dx, dy) = (seed as f64 * 3.7, seed as f64 * -1.3);
            for v in p.origins.values_mut() {
                v.0 += dx;
                v.1 += dy;
            }
            let w1 = wirelength(&inst, &p).unwrap();
            assert!((w0 - w1).abs() < 1e-9);
        }
    }

    #[test]
    fn missing_block_in_net_errors() {
        let mut inst = two_units_one_net(CostWeights::new(0.0, 1.0));
        inst.nets[0].members = vec![0, 5];
        let sp = crate::model::SequencePair { gamma_plus: vec![0, 1], gamma_minus: vec![0, 1] };
        let p = pack(&inst, &sp).unwrap();
        assert!(wirelength(&inst, &p).is_err());
    }
}
