//! Harmonic forms, Betti numbers and the Hodge decomposition of a twisted
//! complex.
//!
//! Betti numbers are complex dimensions. For the bundled models, where every
//! operator is defined over the Gaussian rationals, they coincide with the real
//! dimensions of the underlying real complexes.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{orthogonal_projector, rank, rank_kernel};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::twist::TwistedComplex;

/// Basis of `ker Delta^{u,v}`, one column per harmonic form.
pub fn harmonic_basis<S: Scalar>(t: &TwistedComplex<S>, u: isize, v: isize) -> Result<Matrix<S>, Error> {
    let lap = t.laplacian(u, v)?;
    Ok(rank_kernel(&lap).kernel)
}

/// `dim ker Delta^{u,v}`, cross-checked against
/// `dim ker d_omega^{(u,v)} - rank d_omega^{(u,v-1)}`.
pub fn betti<S: Scalar>(t: &TwistedComplex<S>, u: isize, v: isize) -> Result<usize, Error> {
    let harmonic = harmonic_basis(t, u, v)?.cols();
    let rank_nullity = betti_rank_nullity(t, u, v)?;
    if harmonic != rank_nullity {
        return Err(Error::InconsistentBetti { u: u as usize, v: v as usize, harmonic, rank_nullity });
    }
    Ok(harmonic)
}

/// Betti number from ranks alone, never looking at the Laplacian.
pub fn betti_rank_nullity<S: Scalar>(t: &TwistedComplex<S>, u: isize, v: isize) -> Result<usize, Error> {
    t.base().check_bidegree(u, v)?;
    let dim = t.dim(u, v);
    let kernel = dim - rank(&t.d_omega(u, v));
    let image = rank(&t.d_omega(u, v - 1));
    Ok(kernel.saturating_sub(image))
}

/// Betti table `h[u][v]`.
pub fn betti_table<S: Scalar>(t: &TwistedComplex<S>) -> Result<Vec<Vec<usize>>, Error> {
    (0..=t.q() as isize)
        .map(|u| (0..=t.p() as isize).map(|v| betti(t, u, v)).collect())
        .collect()
}

/// Orthogonal projectors onto the harmonic forms, the image of
/// `d_omega` from `(u,v-1)` and the image of `d_omega^*` from `(u,v+1)`.
#[derive(Clone, Debug)]
pub struct HodgeDecomposition<S> {
    pub harmonic: Matrix<S>,
    pub exact: Matrix<S>,
    pub coexact: Matrix<S>,
}

impl<S: Scalar> HodgeDecomposition<S> {
    /// `P_harm + P_im + P_coim - I`.
    pub fn completeness_defect(&self) -> Matrix<S> {
        let n = self.harmonic.rows();
        &(&(&self.harmonic + &self.exact) + &self.coexact) - &Matrix::identity(n)
    }

    /// The three pairwise products `P_a P_b`, `a != b`.
    pub fn cross_products(&self) -> [Matrix<S>; 3] {
        [
            &self.harmonic * &self.exact,
            &self.harmonic * &self.coexact,
            &self.exact * &self.coexact,
        ]
    }
}

pub fn hodge_decompose<S: Scalar>(
    t: &TwistedComplex<S>,
    u: isize,
    v: isize,
) -> Result<HodgeDecomposition<S>, Error> {
    let harmonic = orthogonal_projector(&harmonic_basis(t, u, v)?)?;
    let exact = orthogonal_projector(&rank_kernel(&t.d_omega(u, v - 1)).image)?;
    let coexact = orthogonal_projector(&rank_kernel(&t.adjoint(u, v)?).image)?;
    Ok(HodgeDecomposition { harmonic, exact, coexact })
}

/// Betti numbers of the `omega` and `-omega` twists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeDiamond {
    pub p: usize,
    pub q: usize,
    pub h_plus: Vec<Vec<usize>>,
    pub h_minus: Vec<Vec<usize>>,
}

impl HodgeDiamond {
    pub fn plus(&self, u: usize, v: usize) -> usize {
        self.h_plus[u][v]
    }

    pub fn minus(&self, u: usize, v: usize) -> usize {
        self.h_minus[u][v]
    }
}

/// Computes the diamond; the `-omega` twist is obtained by negating the wedge
/// blocks of `t`.
pub fn hodge_diamond<S: Scalar>(t: &TwistedComplex<S>) -> Result<HodgeDiamond, Error> {
    Ok(HodgeDiamond {
        p: t.p(),
        q: t.q(),
        h_plus: betti_table(t)?,
        h_minus: betti_table(&t.negated())?,
    })
}
