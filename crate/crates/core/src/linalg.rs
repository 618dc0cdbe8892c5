//! Rank, kernel, solve and orthogonal projectors.
//!
//! A map is first split into the connected components of its row/column
//! incidence graph; each component is reduced densely by the backend
//! ([`Scalar::reduce`]). For the float backend the singular-value threshold is
//! global: `tolerance * (largest singular value of the whole map)`.


use crate::error::Error;
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

/// Small dense row-major block handed to the backend kernels.
#[derive(Clone, Debug)]
pub struct DenseBlock<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: Scalar> DenseBlock<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseBlock { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
}

/// Output of a backend reduction of one dense block.
#[derive(Clone, Debug)]
pub struct DenseReduction<S> {
    pub rank: usize,
    /// Kernel basis vectors, each of length `cols`.
    pub kernel: Vec<Vec<S>>,
    /// Column-space basis vectors, each of length `rows`.
    pub image: Vec<Vec<S>>,
}

/// Rank together with kernel and image bases stored as matrix columns.
#[derive(Clone, Debug)]
pub struct RankKernel<S> {
    pub rank: usize,
    /// `cols x (cols - rank)`.
    pub kernel: Matrix<S>,
    /// `rows x rank`.
    pub image: Matrix<S>,
}

struct Component {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the bipartite row/column graph. Isolated rows are
/// dropped; isolated columns come back as components without rows.
fn components<S: Scalar>(a: &Matrix<S>) -> Vec<Component> {
    let (rows, cols) = a.shape();
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    for (i, j, _) in a.triplets() {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, rows + j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut slot = vec![usize::MAX; rows + cols];
    let mut out: Vec<Component> = Vec::new();
    for node in 0..rows + cols {
        let root = find(&mut parent, node);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Component { rows: Vec::new(), cols: Vec::new() });
        }
        let comp = &mut out[slot[root]];
        if node < rows {
            comp.rows.push(node);
        } else {
            comp.cols.push(node - rows);
        }
    }
    out.retain(|c| !c.cols.is_empty());
    out
}

fn dense_of<S: Scalar>(a: &Matrix<S>, comp: &Component) -> DenseBlock<S> {
    let sub = a.select(&comp.rows, &comp.cols);
    DenseBlock { rows: sub.rows(), cols: sub.cols(), data: sub.to_dense() }
}

/// Largest singular value (float backend); `0` for the exact backend.
pub fn spectral_scale<S: Scalar>(a: &Matrix<S>) -> f64 {
    if S::BACKEND == Backend::Exact {
        return 0.0;
    }
    components(a)
        .iter()
        .filter(|c| !c.rows.is_empty())
        .map(|c| S::spectral_norm(&dense_of(a, c)))
        .fold(0.0, f64::max)
}

/// Rank, kernel basis and image basis of `a`. Never fails; empty maps have rank 0.
pub fn rank_kernel<S: Scalar>(a: &Matrix<S>) -> RankKernel<S> {
    let (rows, cols) = a.shape();
    let comps = components(a);
    let scale = spectral_scale(a);
    let mut rank = 0;
    let mut kernel_cols: Vec<Vec<S>> = Vec::new();
    let mut image_cols: Vec<Vec<S>> = Vec::new();
    for comp in &comps {
        if comp.rows.is_empty() {
            for &j in &comp.cols {
                let mut e = vec![S::zero(); cols];
                e[j] = S::one();
                kernel_cols.push(e);
            }
            continue;
        }
        let red = S::reduce(&dense_of(a, comp), scale);
        rank += red.rank;
        for local in red.kernel {
            let mut v = vec![S::zero(); cols];
            for (k, x) in local.into_iter().enumerate() {
                v[comp.cols[k]] = x;
            }
            kernel_cols.push(v);
        }
        for local in red.image {
            let mut v = vec![S::zero(); rows];
            for (k, x) in local.into_iter().enumerate() {
                v[comp.rows[k]] = x;
            }
            image_cols.push(v);
        }
    }
    RankKernel {
        rank,
        kernel: Matrix::from_columns(cols, &kernel_cols),
        image: Matrix::from_columns(rows, &image_cols),
    }
}

pub fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    rank_kernel(a).rank
}

fn norm2<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
}

/// Some `x` with `a x = b` when `b` lies in the image of `a`.
///
/// Float backend: accepted when `|a x - b| <= eps (|a| |x| + |b|)`.
pub fn solve_linear<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Option<Vec<S>>, Error> {
    if b.len() != a.rows() {
        return Err(Error::Shape {
            context: "right-hand side".into(),
            expected: (a.rows(), 1),
            found: (b.len(), 1),
        });
    }
    let scale = spectral_scale(a);
    let mut x = vec![S::zero(); a.cols()];
    for comp in components(a).iter().filter(|c| !c.rows.is_empty()) {
        let local_b: Vec<S> = comp.rows.iter().map(|&i| b[i].clone()).collect();
        let Some(local_x) = S::solve(&dense_of(a, comp), &local_b, scale) else {
            return Ok(None);
        };
        for (k, v) in local_x.into_iter().enumerate() {
            x[comp.cols[k]] = v;
        }
    }
    let ax = a.apply(&x)?;
    let ok = match S::BACKEND {
        Backend::Exact => ax == b,
        Backend::Float => {
            let r: Vec<S> = ax.iter().zip(b).map(|(p, q)| p.clone() - q.clone()).collect();
            norm2(&r) <= S::tolerance() * (scale * norm2(&x) + norm2(b))
        }
    };
    Ok(ok.then_some(x))
}

/// Inverse of a square map, `None` when singular.
pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Option<Matrix<S>> {
    let n = a.rows();
    if a.cols() != n || rank(a) != n {
        return None;
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![S::zero(); n];
        e[j] = S::one();
        cols.push(solve_linear(a, &e).ok()??);
    }
    Some(Matrix::from_columns(n, &cols))
}

/// Orthogonal projector onto the span of the columns of `basis`, with respect
/// to the standard (orthonormal-coordinate) Hermitian pairing.
///
/// Computed as `B (B* B)^-1 B*`, so no square roots are needed.
pub fn orthogonal_projector<S: Scalar>(basis: &Matrix<S>) -> Result<Matrix<S>, Error> {
    let (n, k) = basis.shape();
    if k == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let r = rank(basis);
    if r != k {
        return Err(Error::DegenerateBasis { rank: r, columns: k });
    }
    let adj = basis.adjoint();
    let gram = &adj * basis;
    let gram_inv = inverse(&gram).ok_or(Error::DegenerateBasis { rank: r, columns: k })?;
    Ok(&(basis * &gram_inv) * &adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational as Q;
    use num_complex::Complex64;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn zero_map_has_full_kernel() {
        let rk = rank_kernel(&Matrix::<Q>::zeros(2, 2));
        assert_eq!(rk.rank, 0);
        assert_eq!(rk.kernel.cols(), 2);
    }

    #[test]
    fn identity_is_full_rank() {
        let rk = rank_kernel(&Matrix::<Q>::identity(3));
        assert_eq!(rk.rank, 3);
        assert_eq!(rk.kernel.cols(), 0);
    }

    #[test]
    fn imaginary_mode_multiplier_is_invertible() {
        let a = Matrix::from_dense(1, 1, vec![Q::i()]).unwrap();
        let rk = rank_kernel(&a);
        assert_eq!((rk.rank, rk.kernel.cols()), (1, 0));
    }

    #[test]
    fn empty_maps() {
        let rk = rank_kernel(&Matrix::<Q>::zeros(0, 0));
        assert_eq!((rk.rank, rk.kernel.cols()), (0, 0));
        let rk = rank_kernel(&Matrix::<Q>::zeros(0, 2));
        assert_eq!((rk.rank, rk.kernel.cols()), (0, 2));
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = vec![q(3), Q::ratio(-1, 2), Q::i()];
        assert_eq!(solve_linear(&Matrix::identity(3), &b).unwrap(), Some(b));
    }

    #[test]
    fn solve_zero_map_fails() {
        assert_eq!(solve_linear(&Matrix::<Q>::zeros(1, 1), &[q(1)]).unwrap(), None);
    }

    #[test]
    fn solve_difference_map() {
        let d = Matrix::from_dense(1, 2, vec![q(-1), q(1)]).unwrap();
        let x = solve_linear(&d, &[q(1)]).unwrap().unwrap();
        // any solution will do, (0, 1) is one of them
        assert_eq!(d.apply(&x).unwrap(), vec![q(1)]);
        assert_eq!(d.apply(&[q(0), q(1)]).unwrap(), vec![q(1)]);
    }

    #[test]
    fn solve_dimension_mismatch() {
        assert!(solve_linear(&Matrix::<Q>::identity(2), &[q(1)]).is_err());
    }

    #[test]
    fn projector_examples() {
        let e1 = Matrix::from_columns(2, &[vec![q(1), q(0)]]);
        assert_eq!(orthogonal_projector(&e1).unwrap(), Matrix::diagonal(vec![q(1), q(0)]));
        assert_eq!(orthogonal_projector(&Matrix::<Q>::identity(2)).unwrap(), Matrix::identity(2));
        // (1,1) spans the same line as (1,1)/sqrt 2
        let diag = Matrix::from_columns(2, &[vec![q(1), q(1)]]);
        let half = Q::ratio(1, 2);
        assert_eq!(orthogonal_projector(&diag).unwrap(), Matrix::from_fn(2, 2, |_, _| half.clone()));
    }

    #[test]
    fn projector_float_half() {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let b = Matrix::from_columns(2, &[vec![s, s]]);
        let p = orthogonal_projector(&b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.get(i, j) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn projector_rejects_dependent_columns() {
        let b = Matrix::from_columns(2, &[vec![q(1), q(1)], vec![q(2), q(2)]]);
        assert!(matches!(orthogonal_projector(&b), Err(Error::DegenerateBasis { rank: 1, columns: 2 })));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Matrix::from_dense(2, 2, vec![q(2), Q::i(), q(0), q(1)]).unwrap();
        let inv = inverse(&a).unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2));
        assert!(inverse(&Matrix::<Q>::zeros(2, 2)).is_none());
    }

    #[test]
    fn float_threshold_is_relative() {
        // singular values 1e6 and 1e-6: the second falls below 1e-9 * 1e6
        let a = Matrix::diagonal(vec![Complex64::new(1e6, 0.0), Complex64::new(1e-6, 0.0)]);
        assert_eq!(rank(&a), 1);
        let b = a.scale(&Complex64::new(1e-12, 0.0));
        assert_eq!(rank(&b), 1);
    }

    #[test]
    fn float_kernel_of_wide_map() {
        let a = Matrix::from_dense(1, 3, vec![Complex64::new(1.0, 0.0); 3]).unwrap();
        let rk = rank_kernel(&a);
        assert_eq!((rk.rank, rk.kernel.cols()), (1, 2));
        assert!((&a * &rk.kernel).max_modulus() < 1e-12);
    }
}
