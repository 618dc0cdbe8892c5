//! Bigraded cochain spaces `Omega^{u,v}` (u transverse, v leafwise degree) with
//! the leafwise differential `dF : Omega^{u,v} -> Omega^{u,v+1}`.
//!
//! Every block carries an orthonormal basis, so the L2 pairing of forms is the
//! coordinate Hermitian product and adjoints are conjugate transposes.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct BigradedComplex<S> {
    p: usize,
    q: usize,
    dims: Vec<Vec<usize>>,
    labels: Vec<Vec<Vec<String>>>,
    d_f: Vec<Vec<Matrix<S>>>,
    orthonormal: bool,
}

/// One violated invariant found by [`BigradedComplex::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub invariant: String,
    pub block: (usize, usize),
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at ({},{}): {}", self.invariant, self.block.0, self.block.1, self.detail)
    }
}

impl<S: Scalar> BigradedComplex<S> {
    /// `dims[u][v]` for `u <= q`, `v <= p`; `d_f[u][v]` maps block `(u,v)` to
    /// `(u,v+1)`, and `d_f[u][p]` must be the `0 x dims[u][p]` map. Missing
    /// labels default to `b<index>`.
    pub fn new(
        p: usize,
        q: usize,
        dims: Vec<Vec<usize>>,
        labels: Option<Vec<Vec<Vec<String>>>>,
        d_f: Vec<Vec<Matrix<S>>>,
    ) -> Result<Self, Error> {
        if dims.len() != q + 1 || dims.iter().any(|row| row.len() != p + 1) {
            return Err(Error::InvalidModel(format!("dimension table must be {}x{}", q + 1, p + 1)));
        }
        if d_f.len() != q + 1 || d_f.iter().any(|row| row.len() != p + 1) {
            return Err(Error::InvalidModel(format!("dF table must be {}x{}", q + 1, p + 1)));
        }
        for u in 0..=q {
            for v in 0..=p {
                let target = if v < p { dims[u][v + 1] } else { 0 };
                let expected = (target, dims[u][v]);
                if d_f[u][v].shape() != expected {
                    return Err(Error::Shape {
                        context: format!("dF block ({u},{v})"),
                        expected,
                        found: d_f[u][v].shape(),
                    });
                }
            }
        }
        let labels = match labels {
            Some(l) => l,
            None => dims
                .iter()
                .map(|row| row.iter().map(|&d| (0..d).map(|i| format!("b{i}")).collect()).collect())
                .collect(),
        };
        Ok(BigradedComplex { p, q, dims, labels, d_f, orthonormal: true })
    }

    /// The complex with every block zero-dimensional.
    pub fn empty(p: usize, q: usize) -> Self {
        let dims = vec![vec![0; p + 1]; q + 1];
        let d_f = vec![vec![Matrix::zeros(0, 0); p + 1]; q + 1];
        Self::new(p, q, dims, None, d_f).expect("empty complex is well-formed")
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// Marks the bases as not orthonormal; such complexes fail validation.
    pub fn set_orthonormal(&mut self, flag: bool) {
        self.orthonormal = flag;
    }

    pub fn check_bidegree(&self, u: isize, v: isize) -> Result<(usize, usize), Error> {
        if u < 0 || v < 0 || u as usize > self.q || v as usize > self.p {
            return Err(Error::Bidegree { u, v, p: self.p, q: self.q });
        }
        Ok((u as usize, v as usize))
    }

    /// Block dimension; `0` outside the bigrading range.
    pub fn dim(&self, u: isize, v: isize) -> usize {
        if u < 0 || v < 0 || u as usize > self.q || v as usize > self.p {
            0
        } else {
            self.dims[u as usize][v as usize]
        }
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    pub fn labels(&self, u: usize, v: usize) -> &[String] {
        &self.labels[u][v]
    }

    pub fn all_labels(&self) -> &[Vec<Vec<String>>] {
        &self.labels
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().flatten().sum()
    }

    /// `dF : Omega^{u,v} -> Omega^{u,v+1}`; outside the range this is the zero
    /// map between the (possibly zero-dimensional) neighbouring blocks.
    pub fn d_f(&self, u: isize, v: isize) -> Matrix<S> {
        if u >= 0 && v >= 0 && (u as usize) <= self.q && (v as usize) <= self.p {
            self.d_f[u as usize][v as usize].clone()
        } else {
            Matrix::zeros(self.dim(u, v + 1), self.dim(u, v))
        }
    }

    pub fn d_f_ref(&self, u: usize, v: usize) -> &Matrix<S> {
        &self.d_f[u][v]
    }

    pub fn d_f_blocks(&self) -> &[Vec<Matrix<S>>] {
        &self.d_f
    }

    /// Lists every violated structural invariant; empty means valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if !self.orthonormal {
            out.push(Diagnostic {
                invariant: "orthonormal_basis".into(),
                block: (0, 0),
                detail: "bases must be orthonormal".into(),
            });
        }
        for u in 0..=self.q {
            for v in 0..=self.p {
                if self.labels[u][v].len() != self.dims[u][v] {
                    out.push(Diagnostic {
                        invariant: "label_count".into(),
                        block: (u, v),
                        detail: format!("{} labels for dimension {}", self.labels[u][v].len(), self.dims[u][v]),
                    });
                }
                let target = if v < self.p { self.dims[u][v + 1] } else { 0 };
                if self.d_f[u][v].shape() != (target, self.dims[u][v]) {
                    out.push(Diagnostic {
                        invariant: "block_shape".into(),
                        block: (u, v),
                        detail: format!("dF has shape {:?}", self.d_f[u][v].shape()),
                    });
                    continue;
                }
                if v < self.p {
                    let sq = &self.d_f[u][v + 1] * &self.d_f[u][v];
                    let ok = match S::BACKEND {
                        Backend::Exact => sq.is_zero(),
                        Backend::Float => sq.max_modulus() <= S::tolerance(),
                    };
                    if !ok {
                        out.push(Diagnostic {
                            invariant: "leafwise_d_squared".into(),
                            block: (u, v),
                            detail: format!("|dF dF| = {:.3e}", sq.max_modulus()),
                        });
                    }
                }
            }
        }
        out
    }

    /// Applies the leafwise differential. At `v = p` the result is the empty
    /// form of bidegree `(u, p+1)`.
    pub fn apply_d_f(&self, form: &LeafwiseForm<S>) -> Result<LeafwiseForm<S>, Error> {
        let (u, v) = form.bidegree;
        self.check_bidegree(u as isize, v as isize)?;
        if form.coefficients.len() != self.dims[u][v] {
            return Err(Error::Shape {
                context: format!("form of bidegree ({u},{v})"),
                expected: (self.dims[u][v], 1),
                found: (form.coefficients.len(), 1),
            });
        }
        let coefficients = self.d_f[u][v].apply(&form.coefficients)?;
        Ok(LeafwiseForm { bidegree: (u, v + 1), coefficients })
    }

    /// Rebuilds the complex over another scalar backend.
    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> BigradedComplex<T> {
        BigradedComplex {
            p: self.p,
            q: self.q,
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            d_f: self.d_f.iter().map(|row| row.iter().map(|m| m.convert(f)).collect()).collect(),
            orthonormal: self.orthonormal,
        }
    }

    /// Replaces one dF block, keeping its shape. Used to build perturbed copies.
    pub fn with_d_f_block(mut self, u: usize, v: usize, block: Matrix<S>) -> Result<Self, Error> {
        if block.shape() != self.d_f[u][v].shape() {
            return Err(Error::Shape {
                context: format!("dF block ({u},{v})"),
                expected: self.d_f[u][v].shape(),
                found: block.shape(),
            });
        }
        self.d_f[u][v] = block;
        Ok(self)
    }
}

/// A form of fixed bidegree, stored by its coordinates in the block basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafwiseForm<S> {
    pub bidegree: (usize, usize),
    pub coefficients: Vec<S>,
}

impl<S: Scalar> LeafwiseForm<S> {
    pub fn new(bidegree: (usize, usize), coefficients: Vec<S>) -> Self {
        LeafwiseForm { bidegree, coefficients }
    }

    pub fn zero(complex: &BigradedComplex<S>, u: usize, v: usize) -> Self {
        LeafwiseForm { bidegree: (u, v), coefficients: vec![S::zero(); complex.dim(u as isize, v as isize)] }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    pub fn negated(&self) -> Self {
        LeafwiseForm { bidegree: self.bidegree, coefficients: self.coefficients.iter().map(|x| -x.clone()).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational as Q;

    /// One leaf direction, two vertices and an edge.
    fn segment() -> BigradedComplex<Q> {
        let d = Matrix::from_dense(1, 2, vec![Q::from_integer(-1), Q::from_integer(1)]).unwrap();
        BigradedComplex::new(1, 0, vec![vec![2, 1]], None, vec![vec![d, Matrix::zeros(0, 1)]]).unwrap()
    }

    #[test]
    fn empty_complex_is_valid() {
        assert!(BigradedComplex::<Q>::empty(2, 3).validate().is_empty());
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let bad = Matrix::<Q>::zeros(2, 2);
        let err = BigradedComplex::new(1, 0, vec![vec![2, 1]], None, vec![vec![bad, Matrix::zeros(0, 1)]]);
        assert!(matches!(err, Err(Error::Shape { .. })));
    }

    #[test]
    fn top_degree_maps_to_nothing() {
        let c = segment();
        let phi = LeafwiseForm::new((0, 1), vec![Q::from_integer(5)]);
        let out = c.apply_d_f(&phi).unwrap();
        assert_eq!(out.bidegree, (0, 2));
        assert!(out.coefficients.is_empty());
    }

    #[test]
    fn bidegree_out_of_range() {
        let c = segment();
        let phi = LeafwiseForm::new((1, 0), vec![]);
        assert!(matches!(c.apply_d_f(&phi), Err(Error::Bidegree { .. })));
    }

    #[test]
    fn d_squared_violation_names_block() {
        // p = 2 chain 1 -> 1 -> 1 with both maps the identity
        let one = Matrix::<Q>::identity(1);
        let c = BigradedComplex::new(
            2,
            0,
            vec![vec![1, 1, 1]],
            None,
            vec![vec![one.clone(), one, Matrix::zeros(0, 1)]],
        )
        .unwrap();
        let diag = c.validate();
        assert_eq!(diag.len(), 1);
        assert_eq!(diag[0].invariant, "leafwise_d_squared");
        assert_eq!(diag[0].block, (0, 0));
    }

    #[test]
    fn orthonormal_flag_is_checked() {
        let mut c = segment();
        c.set_orthonormal(false);
        assert_eq!(c.validate()[0].invariant, "orthonormal_basis");
    }
}
