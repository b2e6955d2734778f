use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{ExactError, Rational};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(ExactError::DimensionMismatch);
        }
        Ok(RatMatrix {
            rows: n_rows,
            cols: n_cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for small integer matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
        .expect("ragged rows")
    }

    pub fn column_vector(values: Vec<Rational>) -> Self {
        RatMatrix {
            rows: values.len(),
            cols: 1,
            entries: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    /// Rows taken in the given order.
    pub fn select_rows(&self, order: &[usize]) -> Self {
        let entries = order
            .iter()
            .flat_map(|&r| self.row(r).iter().cloned())
            .collect();
        RatMatrix {
            rows: order.len(),
            cols: self.cols,
            entries,
        }
    }

    /// Matrix with the row order reversed (left multiplication by the
    /// anti-diagonal reversal matrix).
    pub fn reverse_rows(&self) -> Self {
        let order: Vec<usize> = (0..self.rows).rev().collect();
        self.select_rows(&order)
    }

    pub fn checked_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::DimensionMismatch);
        }
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row-major `f64` snapshot.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(Rational::to_f64).collect()
    }

    /// Solves `self · x = b` exactly (`b` may hold several right-hand-side
    /// columns).
    ///
    /// Each augmented row is scaled to integers and reduced with Bareiss
    /// fraction-free elimination, so every intermediate quantity is an exact
    /// integer; back substitution then runs over the rationals. Pivots are the
    /// first nonzero entry in each column.
    pub fn solve_exact(&self, b: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare);
        }
        if b.rows != self.rows {
            return Err(ExactError::DimensionMismatch);
        }
        let n = self.rows;
        let m = b.cols;
        let width = n + m;

        let mut aug: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row: Vec<&Rational> = self.row(i).iter().chain(b.row(i).iter()).collect();
                let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
            })
            .collect();

        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = (k..n)
                .find(|&r| !aug[r][k].is_zero())
                .ok_or(ExactError::SingularMatrix)?;
            aug.swap(k, pivot);
            let (top, bottom) = aug.split_at_mut(k + 1);
            let pivot_row = &top[k];
            for row in bottom.iter_mut() {
                let factor = row[k].clone();
                for j in k + 1..width {
                    let v = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                    // Bareiss: exact division by the previous pivot.
                    row[j] = v / &prev;
                }
                row[k] = BigInt::zero();
            }
            prev = pivot_row[k].clone();
        }

        let mut x = RatMatrix::zeros(n, m);
        for col in 0..m {
            for i in (0..n).rev() {
                let mut acc = Rational::from_bigint(aug[i][n + col].clone());
                for j in i + 1..n {
                    if !aug[i][j].is_zero() {
                        acc -= Rational::from_bigint(aug[i][j].clone()) * &x[(j, col)];
                    }
                }
                x[(i, col)] = acc / Rational::from_bigint(aug[i][i].clone());
            }
        }
        Ok(x)
    }

    pub fn invert_exact(&self) -> Result<RatMatrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare);
        }
        self.solve_exact(&RatMatrix::identity(self.rows))
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> Result<Rational, ExactError> {
        if !self.is_square() {
            return Err(ExactError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        let mut a = self.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[(r, k)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != k {
                for c in 0..n {
                    a.entries.swap(p * n + c, k * n + c);
                }
                det = -det;
            }
            let pivot = a[(k, k)].clone();
            det *= &pivot;
            for r in k + 1..n {
                if a[(r, k)].is_zero() {
                    continue;
                }
                let f = &a[(r, k)] / &pivot;
                for c in k..n {
                    let v = &f * &a[(k, c)];
                    a[(r, c)] -= v;
                }
            }
        }
        Ok(det)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.entries[r * self.cols + c]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn col(v: &[Rational]) -> RatMatrix {
        RatMatrix::column_vector(v.to_vec())
    }

    #[test]
    fn solve_two_by_two() {
        let a = RatMatrix::from_i64(&[&[1, 1], &[-3, -1]]);
        let x = a.solve_exact(&col(&[q(1, 1), q(0, 1)])).unwrap();
        assert_eq!(x.column(0), vec![q(-1, 2), q(3, 2)]);
    }

    #[test]
    fn solve_identity() {
        let b = col(&[q(5, 1), q(0, 1), q(-2, 1)]);
        assert_eq!(RatMatrix::identity(3).solve_exact(&b).unwrap(), b);
    }

    /// Cramer's rule on the 3x3 system, written out by hand.
    fn cramer3(a: &RatMatrix, b: &[Rational]) -> Vec<Rational> {
        let det3 = |m: [[Rational; 3]; 3]| {
            &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
                - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
                + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
        };
        let get = |r: usize, c: usize, replace: Option<usize>| {
            if Some(c) == replace {
                b[r].clone()
            } else {
                a[(r, c)].clone()
            }
        };
        let build = |replace: Option<usize>| {
            std::array::from_fn(|r| std::array::from_fn(|c| get(r, c, replace)))
        };
        let d = det3(build(None));
        (0..3).map(|i| det3(build(Some(i))) / &d).collect()
    }

    #[test]
    fn solve_symmetric_power_sum_matrix_against_cramer() {
        let a = RatMatrix::from_i64(&[&[1, 1, 1], &[-3, 0, 3], &[7, 1, 7]]);
        let b = [q(1, 1), q(0, 1), q(0, 1)];
        let oracle = cramer3(&a, &b);
        assert_eq!(oracle, vec![q(-1, 12), q(7, 6), q(-1, 12)]);
        assert_eq!(a.solve_exact(&col(&b)).unwrap().column(0), oracle);
    }

    #[test]
    fn inverse_examples() {
        let a = RatMatrix::from_i64(&[&[1, 1], &[-3, -1]]);
        let inv = a.invert_exact().unwrap();
        let expected =
            RatMatrix::from_rows(vec![vec![q(-1, 2), q(-1, 2)], vec![q(3, 2), q(1, 2)]]).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(
            RatMatrix::identity(4).invert_exact().unwrap(),
            RatMatrix::identity(4)
        );
        let diag = RatMatrix::diagonal(&[q(2, 1), q(3, 1)]);
        assert_eq!(
            diag.invert_exact().unwrap(),
            RatMatrix::diagonal(&[q(1, 2), q(1, 3)])
        );
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.invert_exact(), Err(ExactError::SingularMatrix));
        assert_eq!(a.determinant().unwrap(), Rational::zero());
    }

    #[test]
    fn pivoting_needed_when_leading_entry_is_zero() {
        let a = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.invert_exact().unwrap(), a);
        assert_eq!(a.determinant().unwrap(), Rational::from_integer(-1));
    }

    #[test]
    fn dimension_checks() {
        let a = RatMatrix::zeros(2, 3);
        assert_eq!(a.invert_exact(), Err(ExactError::NotSquare));
        let sq = RatMatrix::identity(2);
        assert_eq!(
            sq.solve_exact(&RatMatrix::zeros(3, 1)),
            Err(ExactError::DimensionMismatch)
        );
        assert!(RatMatrix::from_rows(vec![vec![q(1, 1)], vec![]]).is_err());
    }
}
