use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{dot, Rational, RationalVector};
use crate::error::{Error, Result};

/// Dense rectangular matrix over the rationals, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    #[serde(with = "super::serde_q::mat")]
    rows: Vec<RationalVector>,
    cols: usize,
}

impl Matrix {
    pub fn new(rows: Vec<RationalVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { rows, cols })
    }

    /// Builds from a nonempty list of rows, taking the width from the first.
    pub fn from_rows(rows: Vec<RationalVector>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(rows, cols)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| super::unit(n, i)).collect();
        Self { rows, cols: n }
    }

    pub fn rows(&self) -> &[RationalVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<RationalVector> {
        self.rows
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, x: &[Rational]) -> RationalVector {
        self.rows.iter().map(|r| dot(r, x)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..other.cols)
                    .map(|j| {
                        r.iter()
                            .zip(&other.rows)
                            .fold(Rational::zero(), |acc, (a, row)| acc + a * &row[j])
                    })
                    .collect()
            })
            .collect();
        Ok(Matrix {
            rows,
            cols: other.cols,
        })
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.nrows();
        if n != self.cols {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.cols,
            });
        }
        let mut a = self.rows.clone();
        let mut inv = Matrix::identity(n).rows;
        for col in 0..n {
            let pivot =
                (col..n)
                    .find(|&r| !a[r][col].is_zero())
                    .ok_or_else(|| Error::RankDeficient {
                        rank: rank(self),
                        expected: n,
                    })?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] /= &p;
                inv[col][j] /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
        Ok(Matrix { rows: inv, cols: n })
    }
}

/// Exact rank. Rows are scaled to integers, then reduced with Bareiss'
/// fraction-free elimination so every intermediate stays integral.
pub fn rank(m: &Matrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    let (nrows, ncols) = (a.len(), m.cols);
    let mut prev = BigInt::one();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pivot) = (r..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pivot);
        for i in r + 1..nrows {
            for j in col + 1..ncols {
                let v = (&a[i][j] * &a[r][col] - &a[i][col] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ints, ratio};

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| ints(r)).collect()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::identity(2)), 2);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
        // Edge directions of the triangle (0,0),(1,0),(0,1).
        assert_eq!(rank(&mat(&[&[1, 0], &[0, 1], &[-1, 1]])), 2);
        assert_eq!(rank(&mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
        assert_eq!(rank(&Matrix::new(vec![], 3).unwrap()), 0);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = Matrix::new(vec![ints(&[1, 2]), ints(&[1])], 2).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn inverse_of_lower_triangular() {
        let l = mat(&[&[1, 0], &[-1, 1]]);
        assert_eq!(l.inverse().unwrap(), mat(&[&[1, 0], &[1, 1]]));
        let l =
            Matrix::from_rows(vec![vec![int(0), ratio(1, 2).unwrap()], ints(&[-1, 1])]).unwrap();
        let prod = l.mul(&l.inverse().unwrap()).unwrap();
        assert_eq!(prod, Matrix::identity(2));
    }

    #[test]
    fn singular_inverse_fails() {
        let err = mat(&[&[1, 2], &[2, 4]]).inverse().unwrap_err();
        assert_eq!(
            err,
            Error::RankDeficient {
                rank: 1,
                expected: 2
            }
        );
    }

    proptest::proptest! {
        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            entries in proptest::collection::vec(-3i64..=3, 12),
            scales in proptest::collection::vec(prop_nonzero(), 4),
            rot in 0usize..4,
        ) {
            let rows: Vec<RationalVector> = entries.chunks(3).map(ints).collect();
            let m = Matrix::from_rows(rows.clone()).unwrap();
            let mut shuffled: Vec<RationalVector> = rows
                .iter()
                .zip(&scales)
                .map(|(r, &(p, q))| crate::arith::scale(r, &ratio(p, q).unwrap()))
                .collect();
            shuffled.rotate_left(rot);
            shuffled.swap(0, 3);
            let n = Matrix::from_rows(shuffled).unwrap();
            proptest::prop_assert_eq!(rank(&m), rank(&n));
        }
    }

    fn prop_nonzero() -> impl proptest::strategy::Strategy<Value = (i64, i64)> {
        use proptest::prelude::*;
        (prop_oneof![-5i64..=-1, 1i64..=5], 1i64..=4)
    }
}
