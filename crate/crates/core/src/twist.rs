//! The twisted leafwise differential `d_omega = dF + omega^`, its adjoint and
//! Laplacian.

use std::sync::Arc;

use crate::complex::{BigradedComplex, LeafwiseForm};
use crate::error::Error;
use crate::matrix::Matrix;
use crate::report::{IdentityRecord, Report};
use crate::scalar::Scalar;

/// A leafwise 1-form together with its wedge operators `W[u][v] : (u,v) -> (u,v+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistData<S> {
    pub omega: LeafwiseForm<S>,
    pub w: Vec<Vec<Matrix<S>>>,
}

impl<S: Scalar> TwistData<S> {
    /// `omega = 0` with all wedge blocks zero.
    pub fn zero(base: &BigradedComplex<S>) -> Self {
        let (p, q) = (base.p(), base.q());
        let w = (0..=q)
            .map(|u| {
                (0..=p)
                    .map(|v| Matrix::zeros(base.dim(u as isize, v as isize + 1), base.dim(u as isize, v as isize)))
                    .collect()
            })
            .collect();
        let omega = LeafwiseForm::new((0, 1), vec![S::zero(); base.dim(0, 1)]);
        TwistData { omega, w }
    }

    pub fn negated(&self) -> Self {
        TwistData {
            omega: self.omega.negated(),
            w: self.w.iter().map(|row| row.iter().map(|m| -m).collect()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.omega.is_zero() && self.w.iter().flatten().all(Matrix::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct TwistedComplex<S> {
    base: Arc<BigradedComplex<S>>,
    twist: TwistData<S>,
    d_omega: Vec<Vec<Matrix<S>>>,
}

/// Builds the twisted complex after checking `W^2 = 0`, `dF W + W dF = 0` and
/// `d_omega^2 = 0` on every block.
pub fn make_twist<S: Scalar>(
    base: Arc<BigradedComplex<S>>,
    omega: LeafwiseForm<S>,
    w: Vec<Vec<Matrix<S>>>,
) -> Result<TwistedComplex<S>, Error> {
    let t = TwistedComplex::unchecked(base, TwistData { omega, w })?;
    if let Some(rec) = t.axiom_report().failures().next() {
        let (u, v) = rec.block;
        return Err(match rec.identity.as_str() {
            "twist_square" => Error::TwistNotNilpotent { u, v },
            "twist_closed" => Error::TwistNotClosed { u, v },
            _ => Error::TwistedNotDifferential { u, v },
        });
    }
    Ok(t)
}

impl<S: Scalar> TwistedComplex<S> {
    /// Only shapes are checked; see [`TwistedComplex::axiom_report`].
    pub fn unchecked(base: Arc<BigradedComplex<S>>, twist: TwistData<S>) -> Result<Self, Error> {
        let (p, q) = (base.p(), base.q());
        if twist.omega.bidegree != (0, 1) || twist.omega.coefficients.len() != base.dim(0, 1) {
            return Err(Error::Shape {
                context: "omega (bidegree (0,1))".into(),
                expected: (base.dim(0, 1), 1),
                found: (twist.omega.coefficients.len(), 1),
            });
        }
        if twist.w.len() != q + 1 || twist.w.iter().any(|row| row.len() != p + 1) {
            return Err(Error::InvalidModel(format!("W table must be {}x{}", q + 1, p + 1)));
        }
        let mut d_omega = Vec::with_capacity(q + 1);
        for u in 0..=q {
            let mut row = Vec::with_capacity(p + 1);
            for v in 0..=p {
                let d = base.d_f_ref(u, v);
                let w = &twist.w[u][v];
                if w.shape() != d.shape() {
                    return Err(Error::Shape {
                        context: format!("W block ({u},{v})"),
                        expected: d.shape(),
                        found: w.shape(),
                    });
                }
                row.push(d + w);
            }
            d_omega.push(row);
        }
        Ok(TwistedComplex { base, twist, d_omega })
    }

    /// The untwisted complex, `d_omega = dF`.
    pub fn untwisted(base: Arc<BigradedComplex<S>>) -> Self {
        let twist = TwistData::zero(&base);
        TwistedComplex::unchecked(base, twist).expect("zero twist has matching shapes")
    }

    /// One record per block for `W^2 = 0`, `dF W + W dF = 0` and `d_omega^2 = 0`.
    pub fn axiom_report(&self) -> Report {
        let mut report = Report::new();
        let (p, q) = (self.p(), self.q());
        for u in 0..=q {
            for v in 0..=p {
                let (ui, vi) = (u as isize, v as isize);
                let w0 = self.w(ui, vi);
                let w1 = self.w(ui, vi + 1);
                let d0 = self.base.d_f(ui, vi);
                let d1 = self.base.d_f(ui, vi + 1);
                report.push(IdentityRecord::vanishes("twist_square", (u, v), &(&w1 * &w0)));
                let anti = &(&d1 * &w0) + &(&w1 * &d0);
                report.push(IdentityRecord::vanishes("twist_closed", (u, v), &anti));
                let sq = &self.d_omega(ui, vi + 1) * &self.d_omega(ui, vi);
                report.push(IdentityRecord::vanishes("twisted_d_squared", (u, v), &sq));
            }
        }
        report
    }

    pub fn base(&self) -> &Arc<BigradedComplex<S>> {
        &self.base
    }

    pub fn twist(&self) -> &TwistData<S> {
        &self.twist
    }

    pub fn omega(&self) -> &LeafwiseForm<S> {
        &self.twist.omega
    }

    pub fn p(&self) -> usize {
        self.base.p()
    }

    pub fn q(&self) -> usize {
        self.base.q()
    }

    pub fn dim(&self, u: isize, v: isize) -> usize {
        self.base.dim(u, v)
    }

    /// Same base with `omega` replaced by `-omega`.
    pub fn negated(&self) -> Self {
        let twist = self.twist.negated();
        let d_omega = (0..=self.q())
            .map(|u| (0..=self.p()).map(|v| self.base.d_f_ref(u, v) + &twist.w[u][v]).collect())
            .collect();
        TwistedComplex { base: Arc::clone(&self.base), twist, d_omega }
    }

    /// True when both complexes are twists of the same leafwise complex.
    pub fn same_base(&self, other: &TwistedComplex<S>) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base
    }

    fn in_range(&self, u: isize, v: isize) -> bool {
        u >= 0 && v >= 0 && u as usize <= self.q() && v as usize <= self.p()
    }

    /// Wedge by omega, `(u,v) -> (u,v+1)`; zero outside the range.
    pub fn w(&self, u: isize, v: isize) -> Matrix<S> {
        if self.in_range(u, v) {
            self.twist.w[u as usize][v as usize].clone()
        } else {
            Matrix::zeros(self.dim(u, v + 1), self.dim(u, v))
        }
    }

    /// Interior product by omega, the adjoint of wedge: `(u,v+1) -> (u,v)`.
    pub fn interior(&self, u: isize, v: isize) -> Matrix<S> {
        self.w(u, v).adjoint()
    }

    /// `d_omega : (u,v) -> (u,v+1)`; zero outside the range.
    pub fn d_omega(&self, u: isize, v: isize) -> Matrix<S> {
        if self.in_range(u, v) {
            self.d_omega[u as usize][v as usize].clone()
        } else {
            Matrix::zeros(self.dim(u, v + 1), self.dim(u, v))
        }
    }

    pub fn d_omega_ref(&self, u: usize, v: usize) -> &Matrix<S> {
        &self.d_omega[u][v]
    }

    /// Adjoint of `d_omega` on block `(u,v)`, a map `(u,v+1) -> (u,v)`. Bases are
    /// orthonormal, so this is the conjugate transpose, and equals
    /// `dF^* + omega-interior`.
    pub fn adjoint(&self, u: isize, v: isize) -> Result<Matrix<S>, Error> {
        self.base.check_bidegree(u, v)?;
        Ok(self.d_omega[u as usize][v as usize].adjoint())
    }

    /// `d_omega^* d_omega + d_omega d_omega^*` on block `(u,v)`.
    pub fn laplacian(&self, u: isize, v: isize) -> Result<Matrix<S>, Error> {
        self.base.check_bidegree(u, v)?;
        let up = self.d_omega(u, v);
        let down = self.d_omega(u, v - 1);
        Ok(&(&up.adjoint() * &up) + &(&down * &down.adjoint()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational as Q;
    use num_traits::{One, Zero};

    /// Two vertices and one edge; W(f) = c f(v0).
    fn segment(c: i64) -> (Arc<BigradedComplex<Q>>, Vec<Vec<Matrix<Q>>>) {
        let d = Matrix::from_dense(1, 2, vec![Q::from_integer(-1), Q::from_integer(1)]).unwrap();
        let base = BigradedComplex::new(1, 0, vec![vec![2, 1]], None, vec![vec![d, Matrix::zeros(0, 1)]]).unwrap();
        let w = Matrix::from_dense(1, 2, vec![Q::from_integer(c), Q::zero()]).unwrap();
        (Arc::new(base), vec![vec![w, Matrix::zeros(0, 1)]])
    }


    #[test]
    fn zero_twist_is_base() {
        let (base, _) = segment(0);
        let t = TwistedComplex::untwisted(Arc::clone(&base));
        assert_eq!(t.d_omega(0, 0), base.d_f(0, 0));
        assert!(t.axiom_report().all_pass());
    }

    #[test]
    fn adjoint_is_involution() {
        let (base, w) = segment(3);
        let t = make_twist(base, LeafwiseForm::new((0, 1), vec![Q::from_integer(3)]), w).unwrap();
        assert_eq!(t.adjoint(0, 0).unwrap().adjoint(), t.d_omega(0, 0));
        assert!(t.adjoint(1, 0).is_err());
    }

    #[test]
    fn scalar_twist_adjoint_conjugates() {
        // p=1, q=0, one mode: d on functions is 0, omega = c dx acts by c
        let c = Q::new(Q::ratio(2, 1).re, Q::ratio(1, 3).re);
        let base = BigradedComplex::new(
            1,
            0,
            vec![vec![1, 1]],
            None,
            vec![vec![Matrix::zeros(1, 1), Matrix::zeros(0, 1)]],
        )
        .unwrap();
        let w = vec![vec![Matrix::diagonal([c.clone()]), Matrix::zeros(0, 1)]];
        let t = make_twist(Arc::new(base), LeafwiseForm::new((0, 1), vec![c.clone()]), w).unwrap();
        assert_eq!(t.adjoint(0, 0).unwrap().get(0, 0), c.conj());
    }

    #[test]
    fn non_nilpotent_wedge_rejected() {
        let one = Matrix::<Q>::identity(1);
        let base = BigradedComplex::new(
            2,
            0,
            vec![vec![1, 1, 1]],
            None,
            vec![vec![Matrix::zeros(1, 1), Matrix::zeros(1, 1), Matrix::zeros(0, 1)]],
        )
        .unwrap();
        let w = vec![vec![one.clone(), one, Matrix::zeros(0, 1)]];
        let err = make_twist(Arc::new(base), LeafwiseForm::new((0, 1), vec![Q::one()]), w);
        assert!(matches!(err, Err(Error::TwistNotNilpotent { u: 0, v: 0 })));
    }


    #[test]
    fn laplacian_commutes_with_differential() {
        let (base, w) = segment(1);
        let t = make_twist(base, LeafwiseForm::new((0, 1), vec![Q::one()]), w).unwrap();
        let lhs = &t.laplacian(0, 1).unwrap() * &t.d_omega(0, 0);
        let rhs = &t.d_omega(0, 0) * &t.laplacian(0, 0).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn negation_flips_wedge_only() {
        let (base, w) = segment(2);
        let t = make_twist(base, LeafwiseForm::new((0, 1), vec![Q::from_integer(2)]), w).unwrap();
        let n = t.negated();
        assert!(t.same_base(&n));
        assert_eq!(n.w(0, 0), -&t.w(0, 0));
        assert_eq!(n.omega().coefficients[0], Q::from_integer(-2));
    }
}
