//! Chain maps between twisted complexes, the maps they induce on harmonic
//! representatives, and the leafwise exactness test for the twisting form.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{BigradedComplex, LeafwiseForm};
use crate::error::Error;
use crate::hodge::{betti, harmonic_basis};
use crate::linalg::{inverse, orthogonal_projector, rank, solve_linear};
use crate::matrix::Matrix;
use crate::report::{IdentityRecord, Report};
use crate::scalar::Scalar;
use crate::twist::{TwistData, TwistedComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphismKind {
    /// Invertible intertwiner between two twists, as produced by a gauge change.
    Gauge,
    /// Pullback along a foliated map.
    Pullback,
    General,
}

/// A verified chain map `F : (Omega, d_source) -> (Omega', d_target)`.
#[derive(Clone, Debug)]
pub struct ComplexMorphism<S> {
    source: TwistedComplex<S>,
    target: TwistedComplex<S>,
    blocks: Vec<Vec<Matrix<S>>>,
    kind: MorphismKind,
    pub description: Option<String>,
}

fn block_or_zero<S: Scalar>(blocks: &[Vec<Matrix<S>>], rows: usize, cols: usize, u: isize, v: isize) -> Matrix<S> {
    if u >= 0 && v >= 0 && (u as usize) < blocks.len() && (v as usize) < blocks[u as usize].len() {
        blocks[u as usize][v as usize].clone()
    } else {
        Matrix::zeros(rows, cols)
    }
}

fn check_block_shapes<S: Scalar>(
    blocks: &[Vec<Matrix<S>>],
    source: &TwistedComplex<S>,
    target: &TwistedComplex<S>,
) -> Result<(), Error> {
    let (p, q) = (source.p(), source.q());
    if target.p() != p || target.q() != q {
        return Err(Error::InvalidModel("source and target have different (p,q)".into()));
    }
    if blocks.len() != q + 1 || blocks.iter().any(|row| row.len() != p + 1) {
        return Err(Error::InvalidModel(format!("morphism table must be {}x{}", q + 1, p + 1)));
    }
    for u in 0..=q {
        for v in 0..=p {
            let expected = (target.dim(u as isize, v as isize), source.dim(u as isize, v as isize));
            if blocks[u][v].shape() != expected {
                return Err(Error::Shape { context: format!("morphism block ({u},{v})"), expected, found: blocks[u][v].shape() });
            }
        }
    }
    Ok(())
}

/// `F d_source - d_target F` on block `(u,v)`, a map `(u,v) -> (u,v+1)`.
fn intertwining_defect<S: Scalar>(
    blocks: &[Vec<Matrix<S>>],
    source: &TwistedComplex<S>,
    target: &TwistedComplex<S>,
    u: usize,
    v: usize,
) -> Matrix<S> {
    let (ui, vi) = (u as isize, v as isize);
    let next = block_or_zero(blocks, target.dim(ui, vi + 1), source.dim(ui, vi + 1), ui, vi + 1);
    &(&next * &source.d_omega(ui, vi)) - &(&target.d_omega(ui, vi) * &blocks[u][v])
}

/// Accepts `blocks` as a chain map from `source` to `target`.
pub fn verify_morphism<S: Scalar>(
    blocks: Vec<Vec<Matrix<S>>>,
    source: &TwistedComplex<S>,
    target: &TwistedComplex<S>,
    kind: MorphismKind,
) -> Result<ComplexMorphism<S>, Error> {
    check_block_shapes(&blocks, source, target)?;
    for u in 0..=source.q() {
        for v in 0..=source.p() {
            let defect = intertwining_defect(&blocks, source, target, u, v);
            if !IdentityRecord::vanishes("intertwining", (u, v), &defect).pass {
                return Err(Error::NotIntertwining { u, v });
            }
        }
    }
    Ok(ComplexMorphism { source: source.clone(), target: target.clone(), blocks, kind, description: None })
}

/// Checks that `U` is invertible on every block and `U d_omega = d_theta U`, and
/// that the two Betti tables agree.
pub fn verify_intertwiner<S: Scalar>(
    u_blocks: Vec<Vec<Matrix<S>>>,
    source: &TwistedComplex<S>,
    target: &TwistedComplex<S>,
) -> Result<ComplexMorphism<S>, Error> {
    check_block_shapes(&u_blocks, source, target)?;
    for (u, row) in u_blocks.iter().enumerate() {
        for (v, m) in row.iter().enumerate() {
            if m.rows() != m.cols() || rank(m) != m.cols() {
                return Err(Error::NotInvertible { u, v });
            }
        }
    }
    let m = verify_morphism(u_blocks, source, target, MorphismKind::Gauge)?;
    for u in 0..=source.q() {
        for v in 0..=source.p() {
            let (a, b) = (betti(source, u as isize, v as isize)?, betti(target, u as isize, v as isize)?);
            if a != b {
                return Err(Error::BettiMismatch { u, v, source_betti: a, target_betti: b });
            }
        }
    }
    Ok(m)
}

/// Transports a twisted complex along invertible block maps `U`: the result has
/// `dF' = U dF U^-1`, `W' = U W U^-1` and `omega' = U omega`, so `U` intertwines
/// the two twisted differentials by construction.
pub fn conjugated_twist<S: Scalar>(
    t: &TwistedComplex<S>,
    u_blocks: &[Vec<Matrix<S>>],
) -> Result<TwistedComplex<S>, Error> {
    check_block_shapes(u_blocks, t, t)?;
    let (p, q) = (t.p(), t.q());
    let mut inverses = Vec::with_capacity(q + 1);
    for (u, row) in u_blocks.iter().enumerate() {
        let mut inv_row = Vec::with_capacity(p + 1);
        for (v, m) in row.iter().enumerate() {
            inv_row.push(inverse(m).ok_or(Error::NotInvertible { u, v })?);
        }
        inverses.push(inv_row);
    }
    let base = t.base();
    let conj = |u: usize, v: usize, m: &Matrix<S>| -> Matrix<S> {
        let next = block_or_zero(u_blocks, 0, 0, u as isize, v as isize + 1);
        let next = if v < p { next } else { Matrix::zeros(0, 0) };
        &(&next * m) * &inverses[u][v]
    };
    let d_f = (0..=q).map(|u| (0..=p).map(|v| conj(u, v, base.d_f_ref(u, v))).collect()).collect();
    let w = (0..=q).map(|u| (0..=p).map(|v| conj(u, v, &t.twist().w[u][v])).collect()).collect();
    let new_base = BigradedComplex::new(p, q, base.dims().to_vec(), Some(base.all_labels().to_vec()), d_f)?;
    let omega = if p > 0 { u_blocks[0][1].apply(&t.omega().coefficients)? } else { Vec::new() };
    TwistedComplex::unchecked(Arc::new(new_base), TwistData { omega: LeafwiseForm::new((0, 1), omega), w })
}

impl<S: Scalar> ComplexMorphism<S> {
    pub fn identity(t: &TwistedComplex<S>) -> Self {
        let blocks = (0..=t.q())
            .map(|u| (0..=t.p()).map(|v| Matrix::identity(t.dim(u as isize, v as isize))).collect())
            .collect();
        ComplexMorphism { source: t.clone(), target: t.clone(), blocks, kind: MorphismKind::General, description: None }
    }

    pub fn source(&self) -> &TwistedComplex<S> {
        &self.source
    }

    pub fn target(&self) -> &TwistedComplex<S> {
        &self.target
    }

    pub fn kind(&self) -> MorphismKind {
        self.kind
    }

    pub fn block(&self, u: usize, v: usize) -> &Matrix<S> {
        &self.blocks[u][v]
    }

    pub fn blocks(&self) -> &[Vec<Matrix<S>>] {
        &self.blocks
    }

    /// Per-block intertwining residuals, for reporting.
    pub fn intertwining_report(&self) -> Report {
        let mut report = Report::new();
        for u in 0..=self.source.q() {
            for v in 0..=self.source.p() {
                let defect = intertwining_defect(&self.blocks, &self.source, &self.target, u, v);
                report.push(IdentityRecord::vanishes("intertwining", (u, v), &defect));
            }
        }
        report
    }
}

fn same_complex<S: Scalar>(a: &TwistedComplex<S>, b: &TwistedComplex<S>) -> bool {
    a.same_base(b) && a.twist() == b.twist()
}

/// `second o first`.
pub fn compose<S: Scalar>(second: &ComplexMorphism<S>, first: &ComplexMorphism<S>) -> Result<ComplexMorphism<S>, Error> {
    if !same_complex(&first.target, &second.source) {
        return Err(Error::MismatchedBases);
    }
    let blocks = second
        .blocks
        .iter()
        .zip(&first.blocks)
        .map(|(r2, r1)| r2.iter().zip(r1).map(|(b, a)| b * a).collect())
        .collect();
    Ok(ComplexMorphism {
        source: first.source.clone(),
        target: second.target.clone(),
        blocks,
        kind: if first.kind == second.kind { first.kind } else { MorphismKind::General },
        description: None,
    })
}

/// Coordinates of `P_harm(map h)` in the target harmonic basis, for each
/// source harmonic basis vector `h`.
fn harmonic_coordinates<S: Scalar>(
    map: &Matrix<S>,
    source: &TwistedComplex<S>,
    target: &TwistedComplex<S>,
    u: isize,
    v: isize,
) -> Result<Matrix<S>, Error> {
    let hs = harmonic_basis(source, u, v)?;
    let ht = harmonic_basis(target, u, v)?;
    let projected = &(&orthogonal_projector(&ht)? * map) * &hs;
    let mut cols = Vec::with_capacity(hs.cols());
    for j in 0..projected.cols() {
        let x = solve_linear(&ht, &projected.column(j))?
            .ok_or_else(|| Error::InvalidModel(format!("projection outside harmonic span on block ({u},{v})")))?;
        cols.push(x);
    }
    Ok(Matrix::from_columns(ht.cols(), &cols))
}

/// The induced map `H^{u,v}(source) -> H^{u,v}(target)` in the harmonic bases
/// returned by [`harmonic_basis`].
pub fn induced_map<S: Scalar>(m: &ComplexMorphism<S>, u: isize, v: isize) -> Result<Matrix<S>, Error> {
    m.source.base().check_bidegree(u, v)?;
    harmonic_coordinates(&m.blocks[u as usize][v as usize], &m.source, &m.target, u, v)
}

/// Compares `induced(f)` with `induced(h o g)` on every block; `h` is an
/// invertible degree-preserving block map on the target.
pub fn verify_homotopy_factor<S: Scalar>(
    f: &ComplexMorphism<S>,
    g: &ComplexMorphism<S>,
    h: &[Vec<Matrix<S>>],
) -> Result<Report, Error> {
    if !same_complex(&f.source, &g.source) || !same_complex(&f.target, &g.target) {
        return Err(Error::MismatchedBases);
    }
    check_block_shapes(h, &f.target, &f.target)?;
    let mut report = Report::new();
    for u in 0..=f.source.q() {
        for v in 0..=f.source.p() {
            if rank(&h[u][v]) != h[u][v].cols() {
                return Err(Error::NotInvertible { u, v });
            }
            let (ui, vi) = (u as isize, v as isize);
            let lhs = induced_map(f, ui, vi)?;
            let hg = &h[u][v] * &g.blocks[u][v];
            let rhs = harmonic_coordinates(&hg, &g.source, &g.target, ui, vi)?;
            report.push(IdentityRecord::compare("homotopy_factor", (u, v), &lhs, &rhs));
        }
    }
    Ok(report)
}

/// Result of testing whether `omega = dF g` for some function `g`.
#[derive(Clone, Debug)]
pub struct LeafwiseExactness<S> {
    pub primitive: Option<LeafwiseForm<S>>,
    /// `h^{0,0}_omega`.
    pub h00: usize,
}

impl<S> LeafwiseExactness<S> {
    /// Degree-zero criterion: a primitive exists exactly when `h^{0,0}_omega != 0`.
    pub fn criterion_holds(&self) -> bool {
        self.primitive.is_some() == (self.h00 != 0)
    }
}

/// Some `g` in `Omega^{0,0}` with `dF g = omega`, if one exists.
pub fn is_leafwise_exact<S: Scalar>(t: &TwistedComplex<S>) -> Result<Option<LeafwiseForm<S>>, Error> {
    let d = t.base().d_f(0, 0);
    Ok(solve_linear(&d, &t.omega().coefficients)?.map(|g| LeafwiseForm::new((0, 0), g)))
}

/// [`is_leafwise_exact`] together with `h^{0,0}_omega`.
pub fn leafwise_exactness<S: Scalar>(t: &TwistedComplex<S>) -> Result<LeafwiseExactness<S>, Error> {
    Ok(LeafwiseExactness { primitive: is_leafwise_exact(t)?, h00: betti(t, 0, 0)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianRational as Q;
    use crate::twist::make_twist;
    use num_traits::{One, Zero};

    fn segment(c: i64) -> TwistedComplex<Q> {
        let d = Matrix::from_dense(1, 2, vec![-Q::one(), Q::one()]).unwrap();
        let base = BigradedComplex::new(1, 0, vec![vec![2, 1]], None, vec![vec![d, Matrix::zeros(0, 1)]]).unwrap();
        let w = Matrix::from_dense(1, 2, vec![Q::from_integer(c), Q::zero()]).unwrap();
        make_twist(Arc::new(base), LeafwiseForm::new((0, 1), vec![Q::from_integer(c)]), vec![vec![w, Matrix::zeros(0, 1)]])
            .unwrap()
    }

    #[test]
    fn identity_induces_identity() {
        let t = segment(0);
        let id = ComplexMorphism::identity(&t);
        assert_eq!(induced_map(&id, 0, 0).unwrap(), Matrix::identity(1));
        assert_eq!(induced_map(&id, 0, 1).unwrap().shape(), (0, 0));
    }

    #[test]
    fn two_point_primitive_exists() {
        for c in [0, 3] {
            let e = leafwise_exactness(&segment(c)).unwrap();
            assert!(e.primitive.is_some());
            assert!(e.criterion_holds());
        }
    }

    #[test]
    fn singular_intertwiner_rejected() {
        let t = segment(1);
        let u = vec![vec![Matrix::diagonal([Q::one(), Q::zero()]), Matrix::identity(1)]];
        assert!(matches!(verify_intertwiner(u, &t, &t), Err(Error::NotInvertible { u: 0, v: 0 })));
    }

    #[test]
    fn conjugated_twist_is_intertwined() {
        let t = segment(1);
        let u = vec![vec![Matrix::diagonal([Q::from_integer(2), Q::ratio(1, 3)]), Matrix::diagonal([Q::from_integer(-5)])]];
        let target = conjugated_twist(&t, &u).unwrap();
        assert!(target.axiom_report().all_pass());
        let m = verify_intertwiner(u, &t, &target).unwrap();
        assert_eq!(rank(&induced_map(&m, 0, 0).unwrap()), 1);
    }

    #[test]
    fn non_intertwining_rejected() {
        let t = segment(0);
        let u = vec![vec![Matrix::diagonal([Q::one(), Q::from_integer(2)]), Matrix::identity(1)]];
        assert!(matches!(verify_intertwiner(u, &t, &t), Err(Error::NotIntertwining { u: 0, v: 0 })));
    }

    #[test]
    fn negation_vs_identity_fails_on_cohomology() {
        let t = segment(0);
        let id = ComplexMorphism::identity(&t);
        let neg_blocks = id.blocks().iter().map(|r| r.iter().map(|m| -m).collect()).collect();
        let neg = verify_morphism(neg_blocks, &t, &t, MorphismKind::General).unwrap();
        let h = ComplexMorphism::identity(&t).blocks().to_vec();
        let report = verify_homotopy_factor(&id, &neg, &h).unwrap();
        assert!(!report.records[0].pass);
        assert!(report.records[1].pass);
        assert!(verify_homotopy_factor(&id, &id, &h).unwrap().all_pass());
    }
}
