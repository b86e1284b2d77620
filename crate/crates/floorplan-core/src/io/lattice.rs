use crate::error::{Error, Result};
use crate::model::{Block, CostWeights, Net, ProblemInstance};

/// n^2 unit blocks on an n-by-n grid. Block i connects to i+1 (unless that
/// would wrap a row) and to i+n. Wirelength-only cost.
pub fn gen_lattice(n: usize) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("lattice side must be >= 2, got {n}")));
    }
    let total = n * n;
    let blocks = (0..total)
        .map(|i| Block::free(i, format!("l{i}"), 1.0, 1.0))
        .collect();
    let mut nets = Vec::with_capacity(2 * n * (n - 1));
    for i in 0..total {
        if i + 1 < total && (i + 1) % n != 0 {
            nets.push(Net { id: nets.len(), members: vec![i, i + 1] });
        }
        if i + n < total {
            nets.push(Net { id: nets.len(), members: vec![i, i + n] });
        }
    }
    Ok(ProblemInstance {
        name: format!("lattice{n}"),
        blocks,
        nets,
        weights: CostWeights::new(0.0, 1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn rejects_n_below_2() {
        assert!(gen_lattice(1).is_err());
        assert!(gen_lattice(0).is_err());
    }

    #[test]
    fn lattice_2_edges() {
        let inst = gen_lattice(2).unwrap();
        assert_eq!(inst.blocks.len(), 4);
        let edges: BTreeSet<(usize, usize)> =
            inst.nets.iter().map(|n| (n.members[0], n.members[1])).collect();
        let expected: BTreeSet<(usize, usize)> =
            [(0, 1), (2, 3), (0, 2), (1, 3)].into_iter().collect();
        assert_eq!(edges, expected);
    }

    #[test]
    fn edge_count_is_2n_n_minus_1() {
        for n in [2usize, 3, 5, 10, 25] {
            let inst = gen_lattice(n).unwrap();
            assert_eq!(inst.blocks.len(), n * n);
            assert_eq!(inst.nets.len(), 2 * n * (n - 1), "n = {n}");
            // degree <= 4
            let mut deg = vec![0usize; n * n];
            for net in &inst.nets {
                deg[net.members[0]] += 1;
                deg[net.members[1]] += 1;
            }
            assert!(deg.iter().all(|&d| d <= 4));
        }
    }

    #[test]
    fn no_row_wrap() {
        let inst = gen_lattice(3).unwrap();
        assert!(!inst.nets.iter().any(|n| n.members == vec![2, 3] || n.members == vec![5, 6]));
    }
}
