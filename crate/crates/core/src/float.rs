//! SVD-based kernels for the float backend.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::linalg::{DenseBlock, DenseReduction};
use crate::scalar::Scalar;

fn to_nalgebra<T>(block: &DenseBlock<Complex<T>>, min_rows: usize) -> DMatrix<Complex<T>>
where
    T: RealField + Copy,
{
    let rows = block.rows.max(min_rows);
    DMatrix::from_fn(rows, block.cols, |i, j| {
        if i < block.rows {
            block.data[i * block.cols + j]
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

pub(crate) fn spectral_norm<T>(block: &DenseBlock<Complex<T>>) -> f64
where
    T: RealField + Copy + ToPrimitive,
{
    if block.rows == 0 || block.cols == 0 {
        return 0.0;
    }
    let m = to_nalgebra(block, 0);
    m.singular_values().iter().map(|s| s.to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

pub(crate) fn svd_reduce<T>(block: &DenseBlock<Complex<T>>, scale: f64, tol: f64) -> DenseReduction<Complex<T>>
where
    T: RealField + Copy + ToPrimitive,
    Complex<T>: Scalar,
{
    let (rows, cols) = (block.rows, block.cols);
    if rows == 0 || cols == 0 {
        let kernel = (0..cols)
            .map(|j| {
                let mut e = vec![Complex::zero(); cols];
                e[j] = Complex::new(T::one(), T::zero());
                e
            })
            .collect();
        return DenseReduction { rank: 0, kernel, image: Vec::new() };
    }
    // pad to at least `cols` rows so that V is complete
    let m = to_nalgebra(block, cols);
    let svd = m.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let threshold = tol * scale;
    let mut rank = 0;
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    for (k, s) in svd.singular_values.iter().enumerate() {
        let s = s.to_f64().unwrap_or(0.0);
        if s > threshold {
            rank += 1;
            image.push((0..rows).map(|i| u[(i, k)]).collect());
        } else {
            kernel.push((0..cols).map(|j| v_t[(k, j)].conj()).collect());
        }
    }
    DenseReduction { rank, kernel, image }
}

pub(crate) fn svd_solve<T>(
    block: &DenseBlock<Complex<T>>,
    rhs: &[Complex<T>],
    scale: f64,
    tol: f64,
) -> Option<Vec<Complex<T>>>
where
    T: RealField + Copy + ToPrimitive + FromPrimitive,
{
    let (rows, cols) = (block.rows, block.cols);
    if cols == 0 {
        return Some(Vec::new());
    }
    let m = to_nalgebra(block, cols);
    let mut b = DVector::from_element(m.nrows(), Complex::new(T::zero(), T::zero()));
    for (i, x) in rhs.iter().enumerate().take(rows) {
        b[i] = *x;
    }
    let eps = T::from_f64(tol * scale)?;
    let svd = m.svd(true, true);
    let x = svd.solve(&b, eps).ok()?;
    Some(x.iter().copied().collect())
}
