//! Small dense matrices of polynomials: determinants, adjoints, Pfaffians,
//! and exact rank of rational matrices by fraction-free elimination.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Polynomial, VariableUniverse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    WrongShape {
        expected: usize,
        rows: usize,
        cols: usize,
    },
}

/// Rectangular grid of polynomial entries over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl SymMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Polynomial,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SymMatrix { rows, cols, entries }
    }

    /// Builds a skew-symmetric matrix from its strict upper triangle, listed
    /// row by row.
    pub fn skew_from_upper(uni: &Arc<VariableUniverse>, n: usize, upper: &[Polynomial]) -> Self {
        assert_eq!(upper.len(), n * (n - 1) / 2, "wrong upper triangle length");
        let mut grid = vec![Polynomial::zero(uni); n * n];
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                grid[i * n + j] = upper[k].clone();
                grid[j * n + i] = upper[k].neg();
                k += 1;
            }
        }
        SymMatrix {
            rows: n,
            cols: n,
            entries: grid,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        SymMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn is_skew(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            if !self.at(i, i).is_zero() {
                return false;
            }
            for j in (i + 1)..self.cols {
                if self.at(i, j).add(self.at(j, i)).is_zero() == false {
                    return false;
                }
            }
        }
        true
    }

    pub fn mat_mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mat_mul");
        let uni = self.entries[0].universe().clone();
        SymMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Polynomial::zero(&uni);
            for k in 0..self.cols {
                acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
            }
            acc
        })
    }

    pub fn mat_vec(&self, v: &[Polynomial]) -> Vec<Polynomial> {
        assert_eq!(self.cols, v.len());
        let uni = self.entries[0].universe().clone();
        (0..self.rows)
            .map(|i| {
                let mut acc = Polynomial::zero(&uni);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> SymMatrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != skip_row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != skip_col).collect();
        SymMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.at(rows[i], cols[j]).clone()
        })
    }

    /// Exact symbolic determinant by cofactor expansion along the first row.
    pub fn determinant(&self) -> Result<Polynomial, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.det_inner())
    }

    fn det_inner(&self) -> Polynomial {
        let uni = self.entries[0].universe().clone();
        match self.rows {
            0 => Polynomial::one(&uni),
            1 => self.at(0, 0).clone(),
            2 => self
                .at(0, 0)
                .mul(self.at(1, 1))
                .sub(&self.at(0, 1).mul(self.at(1, 0))),
            n => {
                let mut acc = Polynomial::zero(&uni);
                for j in 0..n {
                    if self.at(0, j).is_zero() {
                        continue;
                    }
                    let cofactor = self.minor(0, j).det_inner();
                    let signed = if j % 2 == 0 {
                        self.at(0, j).mul(&cofactor)
                    } else {
                        self.at(0, j).mul(&cofactor).neg()
                    };
                    acc = acc.add(&signed);
                }
                acc
            }
        }
    }

    /// Transpose of the cofactor matrix, so that `M * adjoint(M) = det(M) I`.
    pub fn adjoint(&self) -> Result<SymMatrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        Ok(SymMatrix::from_fn(n, n, |i, j| {
            // adj(M)[i][j] = (-1)^{i+j} det(minor_{j,i})
            let c = self.minor(j, i).det_inner();
            if (i + j) % 2 == 0 {
                c
            } else {
                c.neg()
            }
        }))
    }

    /// Pfaffian of an even skew-symmetric matrix by recursive expansion along
    /// the first row; satisfies `Pf(M)^2 = det(M)`.
    pub fn pfaffian(&self) -> Result<Polynomial, MatrixError> {
        if !self.is_skew() {
            return Err(MatrixError::NotSkew);
        }
        if self.rows % 2 != 0 {
            return Err(MatrixError::WrongShape {
                expected: self.rows + 1,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.pf_inner())
    }

    fn pf_inner(&self) -> Polynomial {
        let uni = self.entries[0].universe().clone();
        let n = self.rows;
        if n == 0 {
            return Polynomial::one(&uni);
        }
        let mut acc = Polynomial::zero(&uni);
        for j in 1..n {
            if self.at(0, j).is_zero() {
                continue;
            }
            let rest: Vec<usize> = (1..n).filter(|&k| k != j).collect();
            let sub = SymMatrix::from_fn(n - 2, n - 2, |a, b| self.at(rest[a], rest[b]).clone());
            let term = self.at(0, j).mul(&sub.pf_inner());
            // Expansion sign (-1)^{j+1} with 1-based column index j+1.
            let signed = if j % 2 == 1 { term } else { term.neg() };
            acc = acc.add(&signed);
        }
        acc
    }

    /// The five signed 4x4 Pfaffians of a 5x5 skew matrix:
    /// `Pf_i = (-1)^{i+1} Pf(M with row/column i deleted)`, i = 1..=5.
    pub fn sub_pfaffians_5(&self) -> Result<Vec<Polynomial>, MatrixError> {
        if self.rows != 5 || self.cols != 5 {
            return Err(MatrixError::WrongShape {
                expected: 5,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if !self.is_skew() {
            return Err(MatrixError::NotSkew);
        }
        let mut out = Vec::with_capacity(5);
        for i in 0..5 {
            let pf = self.minor(i, i).pf_inner();
            out.push(if i % 2 == 0 { pf } else { pf.neg() });
        }
        Ok(out)
    }
}

/// Exact rank of a rational matrix by fraction-free (Bareiss) elimination on
/// the denominator-cleared integer matrix.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let lcm = row.iter().fold(BigInt::one(), |acc, x| {
                num_integer::lcm(acc, x.denom().clone())
            });
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();
    let nrows = m.len();
    let mut rank = 0;
    let mut row = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        // Pivot search within the current column.
        let pivot = (row..nrows).find(|&i| !m[i][col].is_zero());
        let Some(p) = pivot else { continue };
        m.swap(row, p);
        for i in (row + 1)..nrows {
            for j in (col + 1)..ncols {
                let num = &m[row][col] * &m[i][j] - &m[i][col] * &m[row][j];
                m[i][j] = num / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        rank += 1;
        row += 1;
        if row == nrows {
            break;
        }
    }
    rank
}

/// Reduced row echelon pivot columns of a rational matrix, for identifying
/// which coordinates a set of linear forms spans.
pub fn pivot_columns(rows: &[Vec<BigRational>]) -> Vec<usize> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for j in col..ncols {
            let v = m[row][j].clone() / inv.clone();
            m[row][j] = v;
        }
        for i in 0..nrows {
            if i != row && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in col..ncols {
                    let v = m[i][j].clone() - factor.clone() * m[row][j].clone();
                    m[i][j] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    pivots
}
