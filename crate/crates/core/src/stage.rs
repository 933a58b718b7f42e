//! Linear stages: materializing tree levels top-down (forward) and
//! collapsing product levels bottom-up (backward).
//!
//! A node at level `h` is addressed by its path `(m_1, ..., m_h)` of
//! multiplication indices, stored as the base-`r` number with `m_1` most
//! significant. Block `b` of a `T x T` split is `(b / T, b % T)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fabric::Fabric;
use crate::fmm::{FmmAlgorithm, Side};
use crate::matrix::Matrix;

/// `(row, col, weight)` of one block inside a `T^δ x T^δ` grid.
pub type GridTerm = (usize, usize, i64);

/// All nodes of one tree level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMatrices<V> {
    pub level: u32,
    /// Side length of each node matrix, `N / T^level`.
    pub dim: usize,
    /// `r^level` node matrices in path order.
    pub nodes: Vec<Matrix<V>>,
}

impl<V> LevelMatrices<V> {
    pub fn root(m: Matrix<V>) -> Self {
        LevelMatrices {
            level: 0,
            dim: m.dim(),
            nodes: vec![m],
        }
    }
}

/// Composed coefficients of every `delta`-step path, indexed by path.
pub fn compose_paths(alg: &FmmAlgorithm, side: Side, delta: u32) -> Result<Vec<Vec<GridTerm>>> {
    let t = alg.block_dim;
    let mut paths: Vec<Vec<GridTerm>> = vec![vec![(0, 0, 1)]];
    for _ in 0..delta {
        let mut next = Vec::with_capacity(paths.len() * alg.rank);
        for terms in &paths {
            for m in 0..alg.rank {
                let mut out = Vec::new();
                for &(ro, co, w) in terms {
                    for b in 0..alg.blocks() {
                        let c = alg.side_coeff(side, m, b);
                        if c != 0 {
                            let w = w.checked_mul(c).ok_or(Error::CoefficientOverflow)?;
                            out.push((ro * t + b / t, co * t + b % t, w));
                        }
                    }
                }
                next.push(out);
            }
        }
        paths = next;
    }
    Ok(paths)
}

/// Backward view of the dual composition: for each block `R * T^delta + C`,
/// the `(path, weight)` pairs feeding it.
pub fn collapse_lists(alg: &FmmAlgorithm, delta: u32) -> Result<Vec<Vec<(usize, i64)>>> {
    let side = alg.block_dim.pow(delta);
    let mut lists = vec![Vec::new(); side * side];
    for (path, terms) in compose_paths(alg, Side::Dual, delta)?.into_iter().enumerate() {
        for (r, c, w) in terms {
            lists[r * side + c].push((path, w));
        }
    }
    Ok(lists)
}

/// `size(u)` of every `delta`-step path: the number of summands.
pub fn path_sizes(alg: &FmmAlgorithm, side: Side, delta: u32) -> Vec<u64> {
    let edges = alg.edge_sizes(side);
    let mut sizes = vec![1u64];
    for _ in 0..delta {
        sizes = sizes
            .iter()
            .flat_map(|&s| edges.iter().map(move |&e| s * e))
            .collect();
    }
    sizes
}

/// Summand counts of every output block of a `delta`-step collapse.
pub fn collapse_block_sizes(alg: &FmmAlgorithm, delta: u32) -> Result<Vec<u64>> {
    Ok(collapse_lists(alg, delta)?
        .iter()
        .map(|l| l.len() as u64)
        .collect())
}

/// Root-entry coefficients of the leaf at `path` (0-based indices) of an `l`-level tree.
pub fn leaf_index_weights(
    alg: &FmmAlgorithm,
    side: Side,
    l: u32,
    path: &[usize],
) -> Result<BTreeMap<(usize, usize), i64>> {
    if path.len() != l as usize || path.iter().any(|&m| m >= alg.rank) {
        return Err(Error::ShapeMismatch(alloc::format!(
            "path {path:?} is not a level-{l} path"
        )));
    }
    let t = alg.block_dim;
    let mut terms: BTreeMap<(usize, usize), i64> = BTreeMap::from([((0, 0), 1)]);
    for &m in path {
        let mut next = BTreeMap::new();
        for ((ro, co), w) in terms {
            for b in 0..alg.blocks() {
                let c = alg.side_coeff(side, m, b);
                if c != 0 {
                    let w = w.checked_mul(c).ok_or(Error::CoefficientOverflow)?;
                    next.insert((ro * t + b / t, co * t + b % t), w);
                }
            }
        }
        terms = next;
    }
    Ok(terms)
}

fn step_size(t: usize, delta: u32, dim: usize) -> Result<usize> {
    let span = t
        .checked_pow(delta)
        .filter(|s| dim % s == 0)
        .ok_or(Error::ShapeMismatch(alloc::format!(
            "{dim} is not divisible by {t}^{delta}"
        )))?;
    Ok(span)
}

/// Materializes level `target` from level `prev.level`: every entry of
/// every new node is one weighted sum over its ancestor's entries.
pub fn expand_forward_level<F: Fabric>(
    fabric: &mut F,
    alg: &FmmAlgorithm,
    side: Side,
    prev: &LevelMatrices<F::Value>,
    target: u32,
) -> Result<LevelMatrices<F::Value>> {
    if target <= prev.level {
        return Err(Error::LevelOutOfRange {
            from: prev.level,
            to: target,
            max: prev.level + prev.dim.ilog(alg.block_dim.max(2)),
        });
    }
    let delta = target - prev.level;
    let span = step_size(alg.block_dim, delta, prev.dim).map_err(|_| Error::LevelOutOfRange {
        from: prev.level,
        to: target,
        max: prev.level + prev.dim.ilog(alg.block_dim.max(2)),
    })?;
    let paths = compose_paths(alg, side, delta)?;
    let cdim = prev.dim / span;
    let mut nodes = Vec::with_capacity(prev.nodes.len() * paths.len());
    let mut terms = Vec::new();
    for parent in &prev.nodes {
        for path in &paths {
            nodes.push(Matrix::from_fn(cdim, |x, y| {
                terms.clear();
                terms.extend(
                    path.iter()
                        .map(|&(ro, co, w)| (w, &parent[(ro * cdim + x, co * cdim + y)])),
                );
                fabric.weighted_sum(&terms)
            }));
        }
    }
    Ok(LevelMatrices {
        level: target,
        dim: cdim,
        nodes,
    })
}

/// Assembles level `target` of the product tree from level `next.level`.
pub fn collapse_backward_level<F: Fabric>(
    fabric: &mut F,
    alg: &FmmAlgorithm,
    next: &LevelMatrices<F::Value>,
    target: u32,
) -> Result<LevelMatrices<F::Value>> {
    let out_of_range = Error::LevelOutOfRange {
        from: next.level,
        to: target,
        max: next.level,
    };
    if target >= next.level {
        return Err(out_of_range);
    }
    let delta = next.level - target;
    let fanout = alg.rank.pow(delta);
    if next.nodes.len() % fanout != 0 {
        return Err(out_of_range);
    }
    let span = alg.block_dim.pow(delta);
    let lists = collapse_lists(alg, delta)?;
    let cdim = next.dim;
    let dim = cdim * span;
    let mut nodes = Vec::with_capacity(next.nodes.len() / fanout);
    let mut terms = Vec::new();
    for children in next.nodes.chunks(fanout) {
        nodes.push(Matrix::from_fn(dim, |i, j| {
            let (br, x) = (i / cdim, i % cdim);
            let (bc, y) = (j / cdim, j % cdim);
            terms.clear();
            terms.extend(
                lists[br * span + bc]
                    .iter()
                    .map(|&(path, w)| (w, &children[path][(x, y)])),
            );
            fabric.weighted_sum(&terms)
        }));
    }
    Ok(LevelMatrices {
        level: target,
        dim,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fabric::Evaluator;
    use crate::matrix::IntMatrix;
    use num_bigint::BigInt;

    fn strassen() -> FmmAlgorithm {
        FmmAlgorithm::strassen()
    }

    #[test]
    fn forward_sizes() {
        let alg = strassen();
        assert_eq!(path_sizes(&alg, Side::A, 1), [1, 2, 2, 1, 2, 2, 2]);
        assert_eq!(path_sizes(&alg, Side::A, 2).iter().sum::<u64>(), 144);
        let composed: Vec<u64> = compose_paths(&alg, Side::A, 2)
            .unwrap()
            .iter()
            .map(|p| p.len() as u64)
            .collect();
        assert_eq!(composed, path_sizes(&alg, Side::A, 2));
    }

    #[test]
    fn backward_sizes() {
        let alg = strassen();
        assert_eq!(collapse_block_sizes(&alg, 1).unwrap(), [4, 2, 2, 4]);
        assert_eq!(collapse_block_sizes(&alg, 2).unwrap().iter().sum::<u64>(), 144);
    }

    #[test]
    fn leaf_weights() {
        let alg = strassen();
        let m7 = leaf_index_weights(&alg, Side::A, 1, &[6]).unwrap();
        assert_eq!(m7, BTreeMap::from([((0, 1), 1), ((1, 1), -1)]));
        let m3 = leaf_index_weights(&alg, Side::B, 1, &[2]).unwrap();
        assert_eq!(m3, BTreeMap::from([((0, 0), 1), ((1, 1), 1)]));
        let mut w: Vec<i64> = leaf_index_weights(&alg, Side::A, 2, &[1, 5])
            .unwrap()
            .into_values()
            .collect();
        w.sort();
        assert_eq!(w, [-1, -1, 1, 1]);
        assert!(leaf_index_weights(&alg, Side::A, 2, &[1]).is_err());
    }

    #[test]
    fn forward_values_n2() {
        let alg = strassen();
        let a = IntMatrix::from_i64_rows(&[&[1, 2], &[3, 4]]);
        let root = LevelMatrices::root(a);
        let leaves = expand_forward_level(&mut Evaluator, &alg, Side::A, &root, 1).unwrap();
        assert_eq!(leaves.nodes.len(), 7);
        assert_eq!(leaves.nodes[0][(0, 0)], BigInt::from(1));
        assert_eq!(leaves.nodes[6][(0, 0)], BigInt::from(-2));
        assert!(expand_forward_level(&mut Evaluator, &alg, Side::A, &root, 2).is_err());
        assert!(expand_forward_level(&mut Evaluator, &alg, Side::A, &leaves, 1).is_err());
    }

    #[test]
    fn collapse_identity_n2() {
        let alg = strassen();
        let a = IntMatrix::identity(2);
        let b = IntMatrix::from_i64_rows(&[&[5, 6], &[7, 8]]);
        let la = expand_forward_level(&mut Evaluator, &alg, Side::A, &LevelMatrices::root(a), 1)
            .unwrap();
        let lb = expand_forward_level(&mut Evaluator, &alg, Side::B, &LevelMatrices::root(b.clone()), 1)
            .unwrap();
        let products = LevelMatrices {
            level: 1,
            dim: 1,
            nodes: la
                .nodes
                .iter()
                .zip(&lb.nodes)
                .map(|(x, y)| Matrix::from_fn(1, |_, _| &x[(0, 0)] * &y[(0, 0)]))
                .collect(),
        };
        let c = collapse_backward_level(&mut Evaluator, &alg, &products, 0).unwrap();
        assert_eq!(c.nodes, vec![b]);
    }

    #[test]
    fn overflow_is_reported() {
        let mut alg = strassen();
        alg.a_coeffs[0][0] = i64::MAX;
        assert_eq!(
            compose_paths(&alg, Side::A, 2).unwrap_err(),
            Error::CoefficientOverflow
        );
    }
}
