//! Linear maps between finite coordinate spaces.
//!
//! Entries live in sorted per-row lists without explicit zeros. Model operators
//! are mode-diagonal, so a 1458x729 block typically carries a few thousand
//! nonzeros; every operation below costs O(nnz) rather than O(rows x cols).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use crate::error::Error;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| S::one()))
    }

    pub fn diagonal(entries: impl IntoIterator<Item = S>) -> Self {
        let data: Vec<Vec<(usize, S)>> = entries
            .into_iter()
            .enumerate()
            .map(|(i, x)| if x.is_zero() { Vec::new() } else { vec![(i, x)] })
            .collect();
        let n = data.len();
        Matrix { rows: n, cols: n, data }
    }

    /// Row-major dense entries.
    pub fn from_dense(rows: usize, cols: usize, entries: Vec<S>) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::Shape {
                context: "dense entries".into(),
                expected: (rows, cols),
                found: (entries.len(), 1),
            });
        }
        let mut data = vec![Vec::new(); rows];
        for (idx, x) in entries.into_iter().enumerate() {
            if !x.is_zero() {
                data[idx / cols].push((idx % cols, x));
            }
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let data = (0..rows)
            .map(|i| (0..cols).filter_map(|j| Some((j, f(i, j))).filter(|(_, x)| !x.is_zero())).collect())
            .collect();
        Matrix { rows, cols, data }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, S)>,
    ) -> Result<Self, Error> {
        let mut data: Vec<Vec<(usize, S)>> = vec![Vec::new(); rows];
        for (i, j, x) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::Shape {
                    context: format!("entry ({i},{j}) outside map"),
                    expected: (rows, cols),
                    found: (i + 1, j + 1),
                });
            }
            data[i].push((j, x));
        }
        for row in &mut data {
            row.sort_by_key(|(j, _)| *j);
            let mut merged: Vec<(usize, S)> = Vec::with_capacity(row.len());
            for (j, x) in row.drain(..) {
                match merged.last_mut() {
                    Some((lj, lx)) if *lj == j => *lx += &x,
                    _ => merged.push((j, x)),
                }
            }
            merged.retain(|(_, x)| !x.is_zero());
            *row = merged;
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut data = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                if !x.is_zero() {
                    data[i].push((j, x.clone()));
                }
            }
        }
        Matrix { rows, cols: columns.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        match self.data[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// Iterates nonzeros in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &S)> + '_ {
        self.data.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn to_dense(&self) -> Vec<S> {
        let mut out = vec![S::zero(); self.rows * self.cols];
        for (i, j, x) in self.triplets() {
            out[i * self.cols + j] = x.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        let mut cols = vec![vec![S::zero(); self.rows]; self.cols];
        for (i, j, x) in self.triplets() {
            cols[j][i] = x.clone();
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, j, x) in self.triplets() {
            data[j].push((i, x.clone()));
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (i, j, x) in self.triplets() {
            data[j].push((i, x.conj()));
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map_entries(&self, mut f: impl FnMut(&S) -> S) -> Self {
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(j, x)| (*j, f(x))).filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_entries(|x| x.mul_ref(c))
    }

    /// Multiplies by `+1` or `-1`.
    pub fn signed(&self, sign: i32) -> Self {
        if sign >= 0 {
            self.clone()
        } else {
            -self
        }
    }

    pub fn checked_mul(&self, rhs: &Matrix<S>) -> Result<Matrix<S>, Error> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                context: "composition".into(),
                expected: (self.cols, rhs.cols),
                found: (rhs.rows, rhs.cols),
            });
        }
        let mut acc: Vec<S> = vec![S::zero(); rhs.cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut seen = vec![false; rhs.cols];
        let data = self
            .data
            .iter()
            .map(|row| {
                for (k, a) in row {
                    for (j, b) in &rhs.data[*k] {
                        if !seen[*j] {
                            seen[*j] = true;
                            touched.push(*j);
                        }
                        acc[*j] += &a.mul_ref(b);
                    }
                }
                touched.sort_unstable();
                let mut out = Vec::with_capacity(touched.len());
                for &j in &touched {
                    seen[j] = false;
                    let x = std::mem::replace(&mut acc[j], S::zero());
                    if !x.is_zero() {
                        out.push((j, x));
                    }
                }
                touched.clear();
                out
            })
            .collect();
        Ok(Matrix { rows: self.rows, cols: rhs.cols, data })
    }

    fn zip_rows(&self, rhs: &Matrix<S>, negate_rhs: bool) -> Result<Matrix<S>, Error> {
        if self.shape() != rhs.shape() {
            return Err(Error::Shape {
                context: if negate_rhs { "difference" } else { "sum" }.into(),
                expected: self.shape(),
                found: rhs.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut ia, mut ib) = (0, 0);
                while ia < a.len() || ib < b.len() {
                    let ja = a.get(ia).map_or(usize::MAX, |e| e.0);
                    let jb = b.get(ib).map_or(usize::MAX, |e| e.0);
                    let (j, x) = if ja < jb {
                        ia += 1;
                        (ja, a[ia - 1].1.clone())
                    } else if jb < ja {
                        ib += 1;
                        let y = b[ib - 1].1.clone();
                        (jb, if negate_rhs { -y } else { y })
                    } else {
                        ia += 1;
                        ib += 1;
                        let mut x = a[ia - 1].1.clone();
                        if negate_rhs {
                            x -= &b[ib - 1].1;
                        } else {
                            x += &b[ib - 1].1;
                        }
                        (ja, x)
                    };
                    if !x.is_zero() {
                        out.push((j, x));
                    }
                }
                out
            })
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn checked_add(&self, rhs: &Matrix<S>) -> Result<Matrix<S>, Error> {
        self.zip_rows(rhs, false)
    }

    pub fn checked_sub(&self, rhs: &Matrix<S>) -> Result<Matrix<S>, Error> {
        self.zip_rows(rhs, true)
    }

    /// Kronecker product `self (x) rhs`.
    pub fn kron(&self, rhs: &Matrix<S>) -> Matrix<S> {
        let mut data = vec![Vec::new(); self.rows * rhs.rows];
        for (i, row) in self.data.iter().enumerate() {
            for (k, rrow) in rhs.data.iter().enumerate() {
                let out = &mut data[i * rhs.rows + k];
                for (j, a) in row {
                    for (l, b) in rrow {
                        let x = a.mul_ref(b);
                        if !x.is_zero() {
                            out.push((j * rhs.cols + l, x));
                        }
                    }
                }
            }
        }
        Matrix { rows: self.rows * rhs.rows, cols: self.cols * rhs.cols, data }
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>, Error> {
        if v.len() != self.cols {
            return Err(Error::Shape {
                context: "vector application".into(),
                expected: (self.cols, 1),
                found: (v.len(), 1),
            });
        }
        Ok(self
            .data
            .iter()
            .map(|row| {
                let mut acc = S::zero();
                for (j, a) in row {
                    acc += &a.mul_ref(&v[*j]);
                }
                acc
            })
            .collect())
    }

    pub fn max_modulus(&self) -> f64 {
        self.triplets().map(|(_, _, x)| x.modulus()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - rhs`, and whether the difference is
    /// exactly the zero map.
    pub fn residual(&self, rhs: &Matrix<S>) -> Result<(f64, bool), Error> {
        let diff = self.checked_sub(rhs)?;
        Ok((diff.max_modulus(), diff.is_zero()))
    }

    /// Equality up to the backend tolerance: exact maps must agree entrywise,
    /// float maps within `tolerance * max(1, largest entry)`.
    pub fn approx_eq(&self, rhs: &Matrix<S>) -> bool {
        match self.residual(rhs) {
            Ok((r, exact)) => {
                exact || r <= S::tolerance() * 1f64.max(self.max_modulus()).max(rhs.max_modulus())
            }
            Err(_) => false,
        }
    }

    /// Submatrix picking the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix<S> {
        let mut col_pos = vec![usize::MAX; self.cols];
        for (k, &j) in cols.iter().enumerate() {
            col_pos[j] = k;
        }
        let data = rows
            .iter()
            .map(|&i| {
                let mut r: Vec<(usize, S)> = self.data[i]
                    .iter()
                    .filter(|(j, _)| col_pos[*j] != usize::MAX)
                    .map(|(j, x)| (col_pos[*j], x.clone()))
                    .collect();
                r.sort_by_key(|(j, _)| *j);
                r
            })
            .collect();
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Converts entries to another backend.
    pub fn convert<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Matrix<T> {
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(j, x)| (*j, f(x))).filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nnz: usize = self.data.iter().map(Vec::len).sum();
        writeln!(f, "Matrix {}x{} ({} nonzeros)", self.rows, self.cols, nnz)?;
        if self.rows * self.cols <= 64 {
            for row in &self.data {
                let mut cells = vec!["0".to_string(); self.cols];
                for (j, x) in row {
                    cells[*j] = format!("{x:?}");
                }
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        }
        Ok(())
    }
}

impl<'a, S: Scalar> Mul<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;

    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.checked_mul(rhs).expect("composition of maps with mismatched inner dimensions")
    }
}

impl<'a, S: Scalar> Add<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;

    fn add(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.checked_add(rhs).expect("sum of maps with different shapes")
    }
}

impl<'a, S: Scalar> Sub<&'a Matrix<S>> for &'a Matrix<S> {
    type Output = Matrix<S>;

    fn sub(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.checked_sub(rhs).expect("difference of maps with different shapes")
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;

    fn neg(self) -> Matrix<S> {
        self.map_entries(|x| -x.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational as Q;
    use num_traits::One;

    fn m(rows: usize, cols: usize, v: &[i64]) -> Matrix<Q> {
        Matrix::from_dense(rows, cols, v.iter().map(|&x| Q::from_integer(x)).collect()).unwrap()
    }

    #[test]
    fn product_and_sum() {
        let a = m(2, 3, &[1, 0, 2, 0, -1, 0]);
        let b = m(3, 2, &[1, 1, 0, 1, 1, 0]);
        assert_eq!(&a * &b, m(2, 2, &[3, 1, 0, -1]));
        assert_eq!(&a + &a, m(2, 3, &[2, 0, 4, 0, -2, 0]));
        assert!((&a - &a).is_zero());
        assert!(a.checked_mul(&a).is_err());
    }

    #[test]
    fn adjoint_conjugates() {
        let i = Q::i();
        let a = Matrix::from_dense(1, 2, vec![i.clone(), Q::one()]).unwrap();
        let adj = a.adjoint();
        assert_eq!(adj.shape(), (2, 1));
        assert_eq!(adj.get(0, 0), -i);
        assert_eq!(adj.adjoint(), a);
    }

    #[test]
    fn kron_shape_and_entries() {
        let a = m(1, 2, &[1, 2]);
        let b = m(2, 1, &[3, 4]);
        let k = a.kron(&b);
        assert_eq!(k, m(2, 2, &[3, 6, 4, 8]));
    }

    #[test]
    fn triplets_merge_and_cancel() {
        let t = vec![(0, 0, Q::one()), (0, 0, -Q::one()), (1, 1, Q::from_integer(2))];
        let a = Matrix::from_triplets(2, 2, t).unwrap();
        assert_eq!(a.nnz(), 1);
        assert!(Matrix::<Q>::from_triplets(1, 1, vec![(1, 0, Q::one())]).is_err());
    }

    #[test]
    fn zero_dimensional_maps_compose() {
        let a: Matrix<Q> = Matrix::zeros(0, 3);
        let b: Matrix<Q> = Matrix::zeros(3, 0);
        assert_eq!((&b * &a).shape(), (3, 3));
        assert_eq!((&a * &b).shape(), (0, 0));
    }
}
