//! Base bilinear fast matrix-multiplication algorithms.
//!
//! An algorithm multiplies two `T x T` block matrices with `r` products
//! `M_m = (sum_b a[m][b] A_b) * (sum_b b[m][b] B_b)` and recombines them as
//! `C_b = sum_m c[b][m] M_m`. Block `(i, j)` (0-based) has flat index `i * T + j`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Which coefficient family drives a recursion tree.
///
/// `Dual` is the transposed C-side: along the edge for product `m`, block `b`
/// carries weight `c[b][m]`. It drives both the backward product tree and the
/// A-side tree of the trace rearrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
    Dual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmmAlgorithm {
    /// Display name (`"strassen"`, file stem, ...).
    pub name: String,
    /// Base block dimension `T`.
    pub block_dim: usize,
    /// Number of multiplications `r`.
    pub rank: usize,
    /// `rank` rows of `T^2` A-block coefficients.
    pub a_coeffs: Vec<Vec<i64>>,
    /// `rank` rows of `T^2` B-block coefficients.
    pub b_coeffs: Vec<Vec<i64>>,
    /// `T^2` rows of `rank` product coefficients, one row per C block.
    pub c_coeffs: Vec<Vec<i64>>,
}

/// Sparsity-derived parameters of an algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    pub block_dim: usize,
    pub rank: usize,
    pub s_a: u64,
    pub s_b: u64,
    pub s_c: u64,
    /// `max(s_a, s_b, s_c)`.
    pub s: u64,
    /// `r / s_A`
    pub alpha: Ratio<u64>,
    /// `s_A / T^2`
    pub beta: Ratio<u64>,
    /// `r / s_C`
    pub alpha_c: Ratio<u64>,
    /// `s_C / T^2`
    pub beta_c: Ratio<u64>,
    /// `log_beta(1 / alpha)`
    pub gamma: f64,
    /// `log_T r`
    pub omega: f64,
    /// `log_T(alpha beta) / (1 - gamma)`
    pub c_const: f64,
}

pub(crate) fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl DerivedParams {
    pub fn alpha_f64(&self) -> f64 {
        ratio_f64(&self.alpha)
    }

    pub fn beta_f64(&self) -> f64 {
        ratio_f64(&self.beta)
    }

    /// `log_T(alpha beta) = omega - 2`.
    pub fn log_t_alpha_beta(&self) -> f64 {
        libm::log(self.alpha_f64() * self.beta_f64()) / libm::log(self.block_dim as f64)
    }
}

impl FmmAlgorithm {
    /// Strassen's 7-multiplication scheme for 2x2 blocks.
    pub fn strassen() -> Self {
        FmmAlgorithm {
            name: "strassen".to_string(),
            block_dim: 2,
            rank: 7,
            a_coeffs: vec![
                vec![1, 0, 0, 0],
                vec![0, 0, 1, 1],
                vec![1, 0, 0, 1],
                vec![0, 0, 0, 1],
                vec![1, 1, 0, 0],
                vec![-1, 0, 1, 0],
                vec![0, 1, 0, -1],
            ],
            b_coeffs: vec![
                vec![0, 1, 0, -1],
                vec![1, 0, 0, 0],
                vec![1, 0, 0, 1],
                vec![-1, 0, 1, 0],
                vec![0, 0, 0, 1],
                vec![1, 1, 0, 0],
                vec![0, 0, 1, 1],
            ],
            c_coeffs: vec![
                vec![0, 0, 1, 1, -1, 0, 1],
                vec![1, 0, 0, 0, 1, 0, 0],
                vec![0, 1, 0, 1, 0, 0, 0],
                vec![1, -1, 1, 0, 0, 1, 0],
            ],
        }
    }

    /// The definitional `T^3`-multiplication algorithm.
    pub fn naive(block_dim: usize) -> Self {
        let t = block_dim;
        let rank = t * t * t;
        let mut a_coeffs = vec![vec![0; t * t]; rank];
        let mut b_coeffs = vec![vec![0; t * t]; rank];
        let mut c_coeffs = vec![vec![0; rank]; t * t];
        let mut m = 0;
        for i in 0..t {
            for j in 0..t {
                for k in 0..t {
                    a_coeffs[m][i * t + k] = 1;
                    b_coeffs[m][k * t + j] = 1;
                    c_coeffs[i * t + j][m] = 1;
                    m += 1;
                }
            }
        }
        FmmAlgorithm {
            name: format!("naive{rank}"),
            block_dim: t,
            rank,
            a_coeffs,
            b_coeffs,
            c_coeffs,
        }
    }

    pub fn blocks(&self) -> usize {
        self.block_dim * self.block_dim
    }

    /// Checks that coefficient arrays have the shapes implied by `T` and `r`.
    pub fn check_shape(&self) -> Result<()> {
        let t2 = self.blocks();
        if self.block_dim == 0 || self.rank == 0 {
            return Err(Error::DimensionMismatch("T and r must be positive".into()));
        }
        for (name, rows, len, width) in [
            ("a_coeffs", &self.a_coeffs, self.rank, t2),
            ("b_coeffs", &self.b_coeffs, self.rank, t2),
            ("c_coeffs", &self.c_coeffs, t2, self.rank),
        ] {
            if rows.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} rows, expected {len}",
                    rows.len()
                )));
            }
            if let Some(bad) = rows.iter().position(|row| row.len() != width) {
                return Err(Error::DimensionMismatch(format!(
                    "{name}[{bad}] has {} entries, expected {width}",
                    rows[bad].len()
                )));
            }
        }
        Ok(())
    }

    /// Coefficient of block `block` along the tree edge of product `m`.
    pub fn side_coeff(&self, side: Side, m: usize, block: usize) -> i64 {
        match side {
            Side::A => self.a_coeffs[m][block],
            Side::B => self.b_coeffs[m][block],
            Side::Dual => self.c_coeffs[block][m],
        }
    }

    /// Nonzero count of each product's edge on the given side:
    /// `a_i`, `b_i` or `c_i` (number of C expressions using `M_i`).
    pub fn edge_sizes(&self, side: Side) -> Vec<u64> {
        (0..self.rank)
            .map(|m| {
                (0..self.blocks())
                    .filter(|&b| self.side_coeff(side, m, b) != 0)
                    .count() as u64
            })
            .collect()
    }

    /// `c'_j`: number of products appearing in the expression for C block `j`.
    pub fn c_block_sizes(&self) -> Vec<u64> {
        self.c_coeffs
            .iter()
            .map(|row| row.iter().filter(|&&c| c != 0).count() as u64)
            .collect()
    }

    /// Exact bilinear identity check over all `T^6` coefficients.
    pub fn is_valid(&self) -> bool {
        if self.check_shape().is_err() {
            return false;
        }
        let t = self.block_dim;
        for ci in 0..t {
            for cj in 0..t {
                let cb = ci * t + cj;
                for ai in 0..t {
                    for ak in 0..t {
                        for bk in 0..t {
                            for bj in 0..t {
                                let mut coeff: i128 = 0;
                                for m in 0..self.rank {
                                    coeff += i128::from(self.c_coeffs[cb][m])
                                        * i128::from(self.a_coeffs[m][ai * t + ak])
                                        * i128::from(self.b_coeffs[m][bk * t + bj]);
                                }
                                let want = i128::from(ai == ci && ak == bk && bj == cj);
                                if coeff != want {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Sparsities and the schedule constants. Fails when `r <= T^2`.
    pub fn derive_params(&self) -> Result<DerivedParams> {
        self.check_shape()?;
        let t2 = self.blocks() as u64;
        let rank = self.rank as u64;
        if rank <= t2 {
            return Err(Error::ScheduleInapplicable {
                rank: self.rank,
                block_dim: self.block_dim,
            });
        }
        let s_a: u64 = self.edge_sizes(Side::A).iter().sum();
        let s_b: u64 = self.edge_sizes(Side::B).iter().sum();
        let s_c: u64 = self.edge_sizes(Side::Dual).iter().sum();
        if s_a == 0 || s_b == 0 || s_c == 0 {
            return Err(Error::DimensionMismatch(
                "every side needs at least one nonzero coefficient".into(),
            ));
        }
        let alpha = Ratio::new(rank, s_a);
        let beta = Ratio::new(s_a, t2);
        // gamma must lie strictly inside (0, 1); the naive algorithm has alpha = 1
        if alpha >= Ratio::from_integer(1) || beta <= Ratio::from_integer(1) {
            return Err(Error::ScheduleInapplicable {
                rank: self.rank,
                block_dim: self.block_dim,
            });
        }
        let ln_t = libm::log(self.block_dim as f64);
        let (af, bf) = (ratio_f64(&alpha), ratio_f64(&beta));
        let gamma = libm::log(1.0 / af) / libm::log(bf);
        let omega = libm::log(rank as f64) / ln_t;
        let c_const = (libm::log(af * bf) / ln_t) / (1.0 - gamma);
        Ok(DerivedParams {
            block_dim: self.block_dim,
            rank: self.rank,
            s_a,
            s_b,
            s_c,
            s: s_a.max(s_b).max(s_c),
            alpha,
            beta,
            alpha_c: Ratio::new(rank, s_c),
            beta_c: Ratio::new(s_c, t2),
            gamma,
            omega,
            c_const,
        })
    }

    /// `log_T n`, or an error if `n` is not a positive power of `T`.
    pub fn levels_for(&self, n: usize) -> Result<u32> {
        let mut levels = 0;
        let mut size = 1usize;
        while size < n {
            size = size.saturating_mul(self.block_dim);
            levels += 1;
        }
        if size != n || n < self.block_dim {
            return Err(Error::NotPowerOfBase {
                n,
                base: self.block_dim,
            });
        }
        Ok(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strassen_shape_and_counts() {
        let s = FmmAlgorithm::strassen();
        assert_eq!((s.rank, s.block_dim), (7, 2));
        assert_eq!(s.edge_sizes(Side::A), vec![1, 2, 2, 1, 2, 2, 2]);
        assert_eq!(s.edge_sizes(Side::Dual), vec![2, 2, 2, 2, 2, 1, 1]);
        assert_eq!(s.c_block_sizes(), vec![4, 2, 2, 4]);
        assert!(s
            .a_coeffs
            .iter()
            .chain(&s.b_coeffs)
            .chain(&s.c_coeffs)
            .flatten()
            .all(|c| (-1..=1).contains(c)));
    }

    #[test]
    fn validity() {
        assert!(FmmAlgorithm::strassen().is_valid());
        assert!(FmmAlgorithm::naive(2).is_valid());
        assert!(FmmAlgorithm::naive(3).is_valid());
        let mut bad = FmmAlgorithm::strassen();
        bad.c_coeffs[0][6] = -1; // M_7 in C_11
        assert!(!bad.is_valid());
    }

    #[test]
    fn every_single_sign_flip_breaks_strassen() {
        let s = FmmAlgorithm::strassen();
        let flips = |alg: &FmmAlgorithm, which: usize, row: usize, col: usize| {
            let mut alg = alg.clone();
            let rows = match which {
                0 => &mut alg.a_coeffs,
                1 => &mut alg.b_coeffs,
                _ => &mut alg.c_coeffs,
            };
            if rows[row][col] == 0 {
                return None;
            }
            rows[row][col] = -rows[row][col];
            Some(alg)
        };
        let mut checked = 0;
        for which in 0..3 {
            let (rows, cols) = if which < 2 { (7, 4) } else { (4, 7) };
            for row in 0..rows {
                for col in 0..cols {
                    if let Some(alg) = flips(&s, which, row, col) {
                        assert!(!alg.is_valid(), "flip {which}/{row}/{col} still valid");
                        checked += 1;
                    }
                }
            }
        }
        assert_eq!(checked, 36);
    }

    #[test]
    fn strassen_params() {
        let p = FmmAlgorithm::strassen().derive_params().unwrap();
        assert_eq!((p.s_a, p.s_b, p.s_c, p.s), (12, 12, 12, 12));
        assert_eq!(p.alpha, Ratio::new(7, 12));
        assert_eq!(p.beta, Ratio::new(3, 1));
        assert_eq!(p.alpha * p.beta, Ratio::new(7, 4));
        assert!((p.gamma - 0.491).abs() < 1e-3);
        assert!((p.c_const - 1.585).abs() < 5e-3);
        assert!((p.omega - libm::log2(7.0)).abs() < 1e-12);
        let c_blocks: u64 = FmmAlgorithm::strassen().c_block_sizes().iter().sum();
        assert_eq!(c_blocks, p.s_c);
    }

    #[test]
    fn naive_is_rejected_by_schedule_theory() {
        let err = FmmAlgorithm::naive(2).derive_params().unwrap_err();
        assert!(matches!(err, Error::ScheduleInapplicable { rank: 8, .. }));
    }

    #[test]
    fn integer_weights_are_accepted() {
        let mut alg = FmmAlgorithm::strassen();
        alg.a_coeffs[0][0] = 2;
        assert!(alg.check_shape().is_ok());
        assert!(!alg.is_valid());
        assert_eq!(alg.derive_params().unwrap().s_a, 12);
    }

    #[test]
    fn levels() {
        let s = FmmAlgorithm::strassen();
        assert_eq!(s.levels_for(16).unwrap(), 4);
        assert_eq!(s.levels_for(2).unwrap(), 1);
        assert!(s.levels_for(6).is_err());
        assert!(s.levels_for(1).is_err());
    }
}
