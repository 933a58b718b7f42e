//! Reference arithmetic used to check circuits.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fmm::FmmAlgorithm;
use crate::matrix::{IntMatrix, Matrix};

/// Definitional product.
pub fn oracle_matmul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!("{} x {}", a.dim(), b.dim())));
    }
    let n = a.dim();
    Ok(Matrix::from_fn(n, |i, j| {
        (0..n).map(|k| &a[(i, k)] * &b[(k, j)]).sum()
    }))
}

fn block(m: &IntMatrix, t: usize, b: usize) -> IntMatrix {
    let s = m.dim() / t;
    let (bi, bj) = (b / t, b % t);
    Matrix::from_fn(s, |i, j| m[(bi * s + i, bj * s + j)].clone())
}

fn combine(blocks: &[IntMatrix], coeffs: impl Fn(usize) -> i64) -> IntMatrix {
    let s = blocks[0].dim();
    Matrix::from_fn(s, |i, j| {
        blocks
            .iter()
            .enumerate()
            .filter(|(k, _)| coeffs(*k) != 0)
            .map(|(k, m)| BigInt::from(coeffs(k)) * &m[(i, j)])
            .sum()
    })
}

fn fast(alg: &FmmAlgorithm, a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let t = alg.block_dim;
    if a.dim() == 1 {
        return Matrix::from_fn(1, |_, _| &a[(0, 0)] * &b[(0, 0)]);
    }
    let ab: Vec<IntMatrix> = (0..alg.blocks()).map(|k| block(a, t, k)).collect();
    let bb: Vec<IntMatrix> = (0..alg.blocks()).map(|k| block(b, t, k)).collect();
    let products: Vec<IntMatrix> = (0..alg.rank)
        .map(|m| {
            let x = combine(&ab, |k| alg.a_coeffs[m][k]);
            let y = combine(&bb, |k| alg.b_coeffs[m][k]);
            fast(alg, &x, &y)
        })
        .collect();
    let cb: Vec<IntMatrix> = (0..alg.blocks())
        .map(|k| combine(&products, |m| alg.c_coeffs[k][m]))
        .collect();
    let s = cb[0].dim();
    Matrix::from_fn(a.dim(), |i, j| cb[(i / s) * t + j / s][(i % s, j % s)].clone())
}

/// Conventional recursive application of `alg`.
pub fn oracle_fast_matmul(alg: &FmmAlgorithm, a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    alg.check_shape()?;
    if a.dim() != b.dim() {
        return Err(Error::ShapeMismatch(format!("{} x {}", a.dim(), b.dim())));
    }
    alg.levels_for(a.dim())?;
    Ok(fast(alg, a, b))
}

pub fn trace_cubed(a: &IntMatrix) -> BigInt {
    let a2 = oracle_matmul(a, a).expect("square");
    let n = a.dim();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| &a2[(i, j)] * &a[(j, i)])
        .sum()
}

/// Checks that `a` is a 0/1 symmetric matrix with zero diagonal.
pub fn check_adjacency(a: &IntMatrix) -> Result<()> {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            let v = &a[(i, j)];
            let ok = (v.is_zero() || v.is_one()) && *v == a[(j, i)] && (i != j || v.is_zero());
            if !ok {
                return Err(Error::NotAdjacency);
            }
        }
    }
    Ok(())
}

/// Triangle count by enumeration.
pub fn oracle_triangles(a: &IntMatrix) -> Result<u64> {
    check_adjacency(a)?;
    let n = a.dim();
    let edge = |i: usize, j: usize| a[(i, j)].is_one();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !edge(i, j) {
                continue;
            }
            for k in j + 1..n {
                if edge(i, k) && edge(j, k) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}
