//! Exact linear algebra over [`Scalar`]: dense square/rectangular matrices and
//! a sparse row reducer used for rank and null-space computations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow = Vec<(usize, Scalar)>;

fn axpy_row(row: &SparseRow, factor: &Scalar, pivot: &SparseRow) -> SparseRow {
    // row - factor * pivot
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        match (row.get(i), pivot.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) if ci == cj => {
                let v = vi - &(factor * vj);
                if !v.is_zero() {
                    out.push((*ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ci, vi)), Some((cj, _))) if ci < cj => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (Some((ci, vi)), None) => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (_, Some((cj, vj))) => {
                out.push((*cj, -(factor * vj)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Incremental Gaussian elimination on sparse rows.
///
/// Rows are kept in echelon form keyed by their leading column, each
/// normalized to a leading 1.
#[derive(Clone, Debug)]
pub struct RowReducer {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

impl RowReducer {
    pub fn new(cols: usize) -> Self {
        RowReducer { cols, pivots: BTreeMap::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Inserts a row; returns `true` when it was independent of earlier rows.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(row.iter().all(|(c, v)| *c < self.cols && !v.is_zero()));
        let mut row = row;
        while let Some((lead, lead_val)) = row.first().cloned() {
            match self.pivots.get(&lead) {
                Some(p) => row = axpy_row(&row, &lead_val, p),
                None => {
                    let inv = lead_val.inv().expect("nonzero lead");
                    let normalized = row.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                    self.pivots.insert(lead, normalized);
                    return true;
                }
            }
        }
        false
    }

    /// Inserts a dense row, dropping zeros.
    pub fn insert_dense(&mut self, row: &[Scalar]) -> bool {
        let sparse = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.clone()))
            .collect();
        self.insert(sparse)
    }

    /// Basis of the right null space `{x : row·x = 0 for every inserted row}`,
    /// one vector per free column, in increasing free-column order.
    pub fn null_space(&self) -> Vec<Vec<Scalar>> {
        // Back-substitute to reduced row echelon form.
        let mut reduced: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let mut k = 1;
            while k < r.len() {
                let (c, v) = r[k].clone();
                if let Some(p) = reduced.get(&c) {
                    r = axpy_row(&r, &v, p);
                    // entry at c is gone; keep k in place
                } else {
                    k += 1;
                }
            }
            reduced.insert(lead, r);
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !reduced.contains_key(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Scalar::zero(); self.cols];
                x[f] = Scalar::one();
                for (&lead, row) in &reduced {
                    if let Some((_, v)) = row.iter().find(|(c, _)| *c == f) {
                        x[lead] = -v;
                    }
                }
                x
            })
            .collect()
    }
}

/// Dense row-major matrix over [`Scalar`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Matrix::from_fn(r, c, |i, j| Scalar::from_i64(rows[i][j]))
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

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Matrix) -> Matrix {
        &(self * other) + &(other * self)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.insert_dense(self.row(i));
        }
        red.rank()
    }

    /// Basis of `{x : Ax = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Scalar>> {
        let mut red = RowReducer::new(self.cols);
        for i in 0..self.rows {
            red.insert_dense(self.row(i));
        }
        red.null_space()
    }

    /// Determinant by fraction-carrying elimination.
    pub fn det(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != col {
                for j in 0..n {
                    let t = a.get(p, j).clone();
                    let u = a.get(col, j).clone();
                    a.set(p, j, u);
                    a.set(col, j, t);
                }
                det = -det;
            }
            let pv = a.get(col, col).clone();
            det = &det * &pv;
            let inv = pv.inv()?;
            for r in col + 1..n {
                let f = a.get(r, col) * &inv;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j) - &(&f * a.get(col, j));
                    a.set(r, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::DivisionByZero)?;
            if p != col {
                for j in 0..n {
                    let (x, y) = (a.get(p, j).clone(), a.get(col, j).clone());
                    a.set(p, j, y);
                    a.set(col, j, x);
                    let (x, y) = (inv.get(p, j).clone(), inv.get(col, j).clone());
                    inv.set(p, j, y);
                    inv.set(col, j, x);
                }
            }
            let pinv = a.get(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j) * &pinv);
                inv.set(col, j, inv.get(col, j) * &pinv);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    a.set(r, j, a.get(r, j) - &(&f * a.get(col, j)));
                    inv.set(r, j, inv.get(r, j) - &(&f * inv.get(col, j)));
                }
            }
        }
        Ok(inv)
    }

    /// Coordinates of `target` in the span of `basis` (all same shape), if any.
    pub fn decompose(target: &Matrix, basis: &[Matrix]) -> Option<Vec<Scalar>> {
        // Solve Σ c_k B_k = T: columns are the flattened basis matrices, with
        // the target appended as an augmented column.
        let k = basis.len();
        let mut red = RowReducer::new(k + 1);
        for e in 0..target.data.len() {
            let mut row: SparseRow = basis
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.data[e].is_zero())
                .map(|(c, b)| (c, b.data[e].clone()))
                .collect();
            if !target.data[e].is_zero() {
                row.push((k, -&target.data[e]));
            }
            if !row.is_empty() {
                red.insert(row);
            }
        }
        // A solution exists iff the augmented column is free; pick the null
        // vector with a 1 there.
        red.null_space().into_iter().find(|v| v[k].is_one()).map(|mut v| {
            v.truncate(k);
            v
        })
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] += &(a * b);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_null_space_of_small_matrix() {
        let a = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.null_space();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(Scalar::is_zero));
    }

    #[test]
    fn det_and_inverse() {
        let a = Matrix::from_i64(&[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        assert_eq!(a.det().unwrap(), Scalar::from_i64(5));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(3));
        let sing = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(sing.det().unwrap().is_zero());
        assert!(sing.inverse().is_err());
    }

    #[test]
    fn decompose_in_span() {
        let b0 = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
        let b1 = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        let t = Matrix::from_i64(&[&[3, -2], &[-2, 0]]);
        let c = Matrix::decompose(&t, &[b0.clone(), b1.clone()]).unwrap();
        assert_eq!(c, vec![Scalar::from_i64(3), Scalar::from_i64(-2)]);
        let outside = Matrix::from_i64(&[&[0, 0], &[0, 1]]);
        assert!(Matrix::decompose(&outside, &[b0, b1]).is_none());
    }

    #[test]
    fn null_space_over_extension_field() {
        // [[1, i], [i, -1]] has rank 1 over Q(i).
        let i = Scalar::i();
        let a = Matrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => Scalar::one(),
            (1, 1) => Scalar::from_i64(-1),
            _ => i.clone(),
        });
        assert_eq!(a.rank(), 1);
        let ns = a.null_space();
        assert!(a.mul_vec(&ns[0]).iter().all(Scalar::is_zero));
    }
}
