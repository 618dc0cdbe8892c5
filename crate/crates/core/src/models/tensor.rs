//! Tensor products `Omega^{u,v} = A^u (x) B^v` of a graded transverse space `A`
//! with a leaf complex `(B, d_B)` carrying a closed 1-form `omega_B`.
//!
//! `dF = (-1)^u id (x) d_B` and `W = (-1)^u id (x) W_B`. Only the grading of `A`
//! enters; its own differential plays no role for leafwise operators.

use std::sync::Arc;

use crate::complex::{BigradedComplex, LeafwiseForm};
use crate::error::Error;
use crate::matrix::Matrix;
use crate::report::IdentityRecord;
use crate::scalar::Scalar;
use crate::twist::{make_twist, TwistData, TwistedComplex};

#[derive(Clone, Debug, PartialEq)]
pub struct LeafComplex<S> {
    /// `dim B^v`, `v = 0..=p`.
    pub dims: Vec<usize>,
    /// `d_B : B^v -> B^{v+1}`, `v = 0..p`.
    pub d: Vec<Matrix<S>>,
    /// Coefficients of `omega_B` in `B^1`.
    pub omega: Vec<S>,
    /// `W_B : B^v -> B^{v+1}`, wedge by `omega_B`.
    pub w: Vec<Matrix<S>>,
}

impl<S: Scalar> LeafComplex<S> {
    pub fn p(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    /// `B^0 = C^2`, `B^1 = C` on the two endpoints of a segment, `d f = f(v1) - f(v0)`,
    /// and `W f = c f(v0)`.
    pub fn two_point(c: S) -> Self {
        let d = Matrix::from_dense(1, 2, vec![-S::one(), S::one()]).expect("1x2");
        let w = Matrix::from_dense(1, 2, vec![c.clone(), S::zero()]).expect("1x2");
        LeafComplex { dims: vec![2, 1], d: vec![d], omega: vec![c], w: vec![w] }
    }

    fn check(&self) -> Result<(), Error> {
        let p = self.p();
        if self.dims.is_empty() {
            return Err(Error::InvalidLeafComplex("no degrees".into()));
        }
        if self.d.len() != p || self.w.len() != p {
            return Err(Error::InvalidLeafComplex(format!("expected {p} differential and wedge maps")));
        }
        let one = if p > 0 { self.dims[1] } else { 0 };
        if self.omega.len() != one {
            return Err(Error::InvalidLeafComplex(format!("omega has {} coefficients, B^1 has dim {one}", self.omega.len())));
        }
        for v in 0..p {
            let shape = (self.dims[v + 1], self.dims[v]);
            if self.d[v].shape() != shape || self.w[v].shape() != shape {
                return Err(Error::InvalidLeafComplex(format!("map out of degree {v} must be {}x{}", shape.0, shape.1)));
            }
        }
        for v in 0..p.saturating_sub(1) {
            let checks = [
                ("d_B^2", &self.d[v + 1] * &self.d[v]),
                ("W_B^2", &self.w[v + 1] * &self.w[v]),
                ("d_B W_B + W_B d_B", &(&self.d[v + 1] * &self.w[v]) + &(&self.w[v + 1] * &self.d[v])),
            ];
            for (name, m) in checks {
                if !IdentityRecord::vanishes(name, (0, v), &m).pass {
                    return Err(Error::InvalidLeafComplex(format!("{name} != 0 out of degree {v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorModelSpec<S> {
    /// `dim A^u`, `u = 0..=q`.
    pub transverse_dims: Vec<usize>,
    pub leaf: LeafComplex<S>,
}

#[derive(Clone, Debug)]
pub struct TensorModel<S> {
    pub complex: Arc<BigradedComplex<S>>,
    pub twist: TwistData<S>,
}

impl<S: Scalar> TensorModel<S> {
    pub fn twisted(&self) -> Result<TwistedComplex<S>, Error> {
        make_twist(Arc::clone(&self.complex), self.twist.omega.clone(), self.twist.w.clone())
    }
}

pub fn build_tensor_model<S: Scalar>(spec: &TensorModelSpec<S>) -> Result<TensorModel<S>, Error> {
    let leaf = &spec.leaf;
    leaf.check()?;
    if spec.transverse_dims.is_empty() {
        return Err(Error::InvalidModel("transverse space needs at least degree 0".into()));
    }
    let p = leaf.p();
    let q = spec.transverse_dims.len() - 1;
    let dims: Vec<Vec<usize>> =
        spec.transverse_dims.iter().map(|&a| leaf.dims.iter().map(|&b| a * b).collect()).collect();
    let lift = |u: usize, maps: &[Matrix<S>]| -> Vec<Matrix<S>> {
        let a = spec.transverse_dims[u];
        let sign = if u.is_multiple_of(2) { 1 } else { -1 };
        (0..=p)
            .map(|v| {
                if v < p {
                    Matrix::identity(a).kron(&maps[v]).signed(sign)
                } else {
                    Matrix::zeros(0, a * leaf.dims[p])
                }
            })
            .collect()
    };
    let d_f: Vec<Vec<Matrix<S>>> = (0..=q).map(|u| lift(u, &leaf.d)).collect();
    let w: Vec<Vec<Matrix<S>>> = (0..=q).map(|u| lift(u, &leaf.w)).collect();
    let mut labels = Vec::with_capacity(q + 1);
    for u in 0..=q {
        let row: Vec<Vec<String>> = (0..=p)
            .map(|v| {
                (0..spec.transverse_dims[u])
                    .flat_map(|a| (0..leaf.dims[v]).map(move |b| format!("a{u}_{a}(x)b{v}_{b}")))
                    .collect()
            })
            .collect();
        labels.push(row);
    }
    let complex = BigradedComplex::new(p, q, dims, Some(labels), d_f)?;
    // omega = (sum of the A^0 basis) (x) omega_B
    let omega: Vec<S> = if p > 0 {
        (0..spec.transverse_dims[0]).flat_map(|_| leaf.omega.iter().cloned()).collect()
    } else {
        Vec::new()
    };
    let twist = TwistData { omega: LeafwiseForm::new((0, 1), omega), w };
    let model = TensorModel { complex: Arc::new(complex), twist };
    model.twisted()?;
    Ok(model)
}
