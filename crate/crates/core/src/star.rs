//! Leafwise, transverse and full Hodge stars, and the sign identities relating
//! them to the twisted operators.
//!
//! `star_f : (u,v) -> (u,p-v)`, `star_perp : (u,v) -> (q-u,v)` and
//! `star_full : (u,v) -> (q-u,p-v)`. In every identity below the codifferential
//! on block `(u,v)` is `dF^* : (u,v) -> (u,v-1)` and the interior product is
//! `omega-interior = W^* : (u,v) -> (u,v-1)`.

use serde::{Deserialize, Serialize};

use crate::complex::BigradedComplex;
use crate::error::Error;
use crate::hodge::{harmonic_basis, HodgeDiamond};
use crate::matrix::Matrix;
use crate::report::{IdentityRecord, Report};
use crate::scalar::Scalar;
use crate::twist::TwistedComplex;

/// Positions of the volume forms: `leaf_volume` indexes block `(0,p)`,
/// `transverse_volume` indexes block `(q,0)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orientation {
    pub leaf_volume: usize,
    pub transverse_volume: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarOperators<S> {
    p: usize,
    q: usize,
    dims: Vec<Vec<usize>>,
    star_f: Vec<Vec<Matrix<S>>>,
    star_perp: Vec<Vec<Matrix<S>>>,
    star_full: Vec<Vec<Matrix<S>>>,
    orientation: Orientation,
}

/// `(-1)^e`.
pub fn parity_sign(e: usize) -> i32 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn grid<S: Scalar>(
    base: &BigradedComplex<S>,
    blocks: Vec<Vec<Matrix<S>>>,
    name: &str,
    target: impl Fn(usize, usize) -> (usize, usize),
) -> Result<Vec<Vec<Matrix<S>>>, Error> {
    let (p, q) = (base.p(), base.q());
    if blocks.len() != q + 1 || blocks.iter().any(|row| row.len() != p + 1) {
        return Err(Error::InvalidModel(format!("{name} table must be {}x{}", q + 1, p + 1)));
    }
    for u in 0..=q {
        for v in 0..=p {
            let (tu, tv) = target(u, v);
            let expected = (base.dim(tu as isize, tv as isize), base.dim(u as isize, v as isize));
            if blocks[u][v].shape() != expected {
                return Err(Error::Shape {
                    context: format!("{name} block ({u},{v})"),
                    expected,
                    found: blocks[u][v].shape(),
                });
            }
        }
    }
    Ok(blocks)
}

impl<S: Scalar> StarOperators<S> {
    /// Checks shapes only. A missing `star_full` is derived from the
    /// factorization `star_full = (-1)^{(q-u)v} star_perp star_f`.
    pub fn unchecked(
        base: &BigradedComplex<S>,
        star_f: Vec<Vec<Matrix<S>>>,
        star_perp: Vec<Vec<Matrix<S>>>,
        star_full: Option<Vec<Vec<Matrix<S>>>>,
        orientation: Orientation,
    ) -> Result<Self, Error> {
        let (p, q) = (base.p(), base.q());
        let star_f = grid(base, star_f, "starF", |u, v| (u, p - v))?;
        let star_perp = grid(base, star_perp, "starPerp", |u, v| (q - u, v))?;
        let star_full = match star_full {
            Some(blocks) => grid(base, blocks, "starFull", |u, v| (q - u, p - v))?,
            None => (0..=q)
                .map(|u| {
                    (0..=p)
                        .map(|v| (&star_perp[u][p - v] * &star_f[u][v]).signed(parity_sign((q - u) * v)))
                        .collect()
                })
                .collect(),
        };
        if base.dim(0, p as isize) > 0 && orientation.leaf_volume >= base.dim(0, p as isize) {
            return Err(Error::InvalidModel(format!(
                "leaf volume index {} outside block (0,{p})",
                orientation.leaf_volume
            )));
        }
        if base.dim(q as isize, 0) > 0 && orientation.transverse_volume >= base.dim(q as isize, 0) {
            return Err(Error::InvalidModel(format!(
                "transverse volume index {} outside block ({q},0)",
                orientation.transverse_volume
            )));
        }
        Ok(StarOperators { p, q, dims: base.dims().to_vec(), star_f, star_perp, star_full, orientation })
    }

    /// Like [`StarOperators::unchecked`], then rejects the first violated
    /// invariant of [`StarOperators::invariant_report`].
    pub fn from_blocks(
        base: &BigradedComplex<S>,
        star_f: Vec<Vec<Matrix<S>>>,
        star_perp: Vec<Vec<Matrix<S>>>,
        star_full: Option<Vec<Vec<Matrix<S>>>>,
        orientation: Orientation,
    ) -> Result<Self, Error> {
        let stars = Self::unchecked(base, star_f, star_perp, star_full, orientation)?;
        if let Some(rec) = stars.invariant_report().failures().next() {
            return Err(Error::StarInvariant { identity: rec.identity.clone(), u: rec.block.0, v: rec.block.1 });
        }
        Ok(stars)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn dim(&self, u: isize, v: isize) -> usize {
        if u < 0 || v < 0 || u as usize > self.q || v as usize > self.p {
            0
        } else {
            self.dims[u as usize][v as usize]
        }
    }

    fn in_range(&self, u: isize, v: isize) -> bool {
        u >= 0 && v >= 0 && u as usize <= self.q && v as usize <= self.p
    }

    pub fn star_f(&self, u: isize, v: isize) -> Matrix<S> {
        if self.in_range(u, v) {
            self.star_f[u as usize][v as usize].clone()
        } else {
            Matrix::zeros(self.dim(u, self.p as isize - v), self.dim(u, v))
        }
    }

    pub fn star_perp(&self, u: isize, v: isize) -> Matrix<S> {
        if self.in_range(u, v) {
            self.star_perp[u as usize][v as usize].clone()
        } else {
            Matrix::zeros(self.dim(self.q as isize - u, v), self.dim(u, v))
        }
    }

    pub fn star_full(&self, u: isize, v: isize) -> Matrix<S> {
        if self.in_range(u, v) {
            self.star_full[u as usize][v as usize].clone()
        } else {
            Matrix::zeros(self.dim(self.q as isize - u, self.p as isize - v), self.dim(u, v))
        }
    }

    pub fn star_f_blocks(&self) -> &[Vec<Matrix<S>>] {
        &self.star_f
    }

    pub fn star_perp_blocks(&self) -> &[Vec<Matrix<S>>] {
        &self.star_perp
    }

    pub fn star_full_blocks(&self) -> &[Vec<Matrix<S>>] {
        &self.star_full
    }

    /// Replaces one leaf-star block (same shape required).
    pub fn with_star_f_block(mut self, u: usize, v: usize, block: Matrix<S>) -> Result<Self, Error> {
        if block.shape() != self.star_f[u][v].shape() {
            return Err(Error::Shape {
                context: format!("starF block ({u},{v})"),
                expected: self.star_f[u][v].shape(),
                found: block.shape(),
            });
        }
        self.star_f[u][v] = block;
        Ok(self)
    }

    /// Converts every block to another backend.
    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> StarOperators<T> {
        let conv = |g: &Vec<Vec<Matrix<S>>>| g.iter().map(|row| row.iter().map(|m| m.convert(f)).collect()).collect();
        StarOperators {
            p: self.p,
            q: self.q,
            dims: self.dims.clone(),
            star_f: conv(&self.star_f),
            star_perp: conv(&self.star_perp),
            star_full: conv(&self.star_full),
            orientation: self.orientation,
        }
    }

    /// Factorization, squares and isometry of the three stars, per block.
    pub fn invariant_report(&self) -> Report {
        let (p, q) = (self.p, self.q);
        let n = p + q;
        let mut report = Report::new();
        for u in 0..=q {
            for v in 0..=p {
                let (ui, vi) = (u as isize, v as isize);
                let (pi, qi) = (p as isize, q as isize);
                let k = u + v;
                let id = Matrix::<S>::identity(self.dims[u][v]);
                let product = (&self.star_perp(ui, pi - vi) * &self.star_f(ui, vi)).signed(parity_sign((q - u) * v));
                report.push(IdentityRecord::compare("star_factorization", (u, v), &self.star_full(ui, vi), &product));
                let sq = &self.star_full(qi - ui, pi - vi) * &self.star_full(ui, vi);
                report.push(IdentityRecord::compare(
                    "star_square",
                    (u, v),
                    &sq,
                    &id.signed(parity_sign(k * (n + 1))),
                ));
                report.push(IdentityRecord::compare(
                    "star_square_closed_manifold",
                    (u, v),
                    &sq,
                    &id.signed(parity_sign(k * (n - k))),
                ));
                let f = self.star_f(ui, vi);
                report.push(IdentityRecord::compare(
                    "leaf_star_square",
                    (u, v),
                    &(&self.star_f(ui, pi - vi) * &f),
                    &id.signed(parity_sign(v * (p - v))),
                ));
                let t = self.star_perp(ui, vi);
                report.push(IdentityRecord::compare(
                    "transverse_star_square",
                    (u, v),
                    &(&self.star_perp(qi - ui, vi) * &t),
                    &id.signed(parity_sign(u * (q - u))),
                ));
                report.push(IdentityRecord::compare("leaf_star_isometry", (u, v), &(&f.adjoint() * &f), &id));
                report.push(IdentityRecord::compare("transverse_star_isometry", (u, v), &(&t.adjoint() * &t), &id));
            }
        }
        report
    }
}

fn check_same_shape<S: Scalar>(stars: &StarOperators<S>, base: &BigradedComplex<S>) -> Result<(), Error> {
    if stars.p != base.p() || stars.q != base.q() || stars.dims != base.dims() {
        return Err(Error::MismatchedBases);
    }
    Ok(())
}

/// Star formulas for `dF^*` and `omega-interior`, and the commutation rules
/// between the stars and `dF`, `dF^*`, `omega^`, `omega-interior`.
pub fn check_sign_identities<S: Scalar>(stars: &StarOperators<S>, t: &TwistedComplex<S>) -> Result<Report, Error> {
    let base = t.base();
    check_same_shape(stars, base)?;
    let (p, q) = (t.p() as isize, t.q() as isize);
    let n = (p + q) as usize;
    let sf = |u: isize, v: isize| stars.star_f(u, v);
    let s = |u: isize, v: isize| stars.star_full(u, v);
    let d = |u: isize, v: isize| base.d_f(u, v);
    let wedge = |u: isize, v: isize| t.w(u, v);
    // codifferential and interior product on block (u,v)
    let ds = |u: isize, v: isize| base.d_f(u, v - 1).adjoint();
    let int = |u: isize, v: isize| t.w(u, v - 1).adjoint();
    let mut report = Report::new();
    for u in 0..=q {
        for v in 0..=p {
            let block = (u as usize, v as usize);
            let (uu, vv) = block;
            let (pu, k) = (p as usize, uu + vv);
            let codiff_leaf = (&(&sf(u, p - v + 1) * &d(u, p - v)) * &sf(u, v)).signed(parity_sign(pu * (vv + 1) + 1));
            if u == 0 {
                let codiff_leafwise =
                    (&(&sf(0, p - v + 1) * &d(0, p - v)) * &sf(0, v)).signed(parity_sign(pu * vv + pu + 1));
                report.push(IdentityRecord::compare("leafwise_codifferential_star", block, &ds(0, v), &codiff_leafwise));
                let interior_leafwise =
                    (&(&sf(0, p - v + 1) * &wedge(0, p - v)) * &sf(0, v)).signed(parity_sign(pu * vv + pu));
                report.push(IdentityRecord::compare("leafwise_interior_star", block, &int(0, v), &interior_leafwise));
                report.push(IdentityRecord::compare(
                    "codifferential_formulas_agree",
                    block,
                    &codiff_leafwise,
                    &codiff_leaf,
                ));
            }
            let interior_leaf = (&(&sf(u, p - v + 1) * &wedge(u, p - v)) * &sf(u, v)).signed(parity_sign(pu * (vv + 1)));
            report.push(IdentityRecord::compare("interior_star_formula", block, &int(u, v), &interior_leaf));
            report.push(IdentityRecord::compare("codifferential_star_formula", block, &ds(u, v), &codiff_leaf));

            report.push(IdentityRecord::compare(
                "interior_after_leaf_star",
                block,
                &(&int(u, p - v) * &sf(u, v)),
                &(&sf(u, v + 1) * &wedge(u, v)).signed(parity_sign(vv)),
            ));
            report.push(IdentityRecord::compare(
                "leaf_star_after_interior",
                block,
                &(&sf(u, v - 1) * &int(u, v)),
                &(&wedge(u, p - v) * &sf(u, v)).signed(parity_sign(vv + 1)),
            ));
            report.push(IdentityRecord::compare(
                "leaf_star_after_codifferential",
                block,
                &(&sf(u, v - 1) * &ds(u, v)),
                &(&d(u, p - v) * &sf(u, v)).signed(parity_sign(vv)),
            ));
            report.push(IdentityRecord::compare(
                "codifferential_after_leaf_star",
                block,
                &(&ds(u, p - v) * &sf(u, v)),
                &(&sf(u, v + 1) * &d(u, v)).signed(parity_sign(vv + 1)),
            ));

            let (cu, cv) = (q - u, p - v);
            report.push(IdentityRecord::compare(
                "codifferential_full_star_formula",
                block,
                &ds(u, v),
                &(&(&s(cu, cv + 1) * &d(cu, cv)) * &s(u, v)).signed(parity_sign(n * (k + 1) + 1)),
            ));
            report.push(IdentityRecord::compare(
                "interior_full_star_formula",
                block,
                &int(u, v),
                &(&(&s(cu, cv + 1) * &wedge(cu, cv)) * &s(u, v)).signed(parity_sign(n * (k + 1))),
            ));
            report.push(IdentityRecord::compare(
                "interior_after_full_star",
                block,
                &(&int(cu, cv) * &s(u, v)),
                &(&s(u, v + 1) * &wedge(u, v)).signed(parity_sign(k)),
            ));
            report.push(IdentityRecord::compare(
                "full_star_after_interior",
                block,
                &(&s(u, v - 1) * &int(u, v)),
                &(&wedge(cu, cv) * &s(u, v)).signed(parity_sign(k + 1)),
            ));
            report.push(IdentityRecord::compare(
                "full_star_after_codifferential",
                block,
                &(&s(u, v - 1) * &ds(u, v)),
                &(&d(cu, cv) * &s(u, v)).signed(parity_sign(k)),
            ));
            report.push(IdentityRecord::compare(
                "codifferential_after_full_star",
                block,
                &(&ds(cu, cv) * &s(u, v)),
                &(&s(u, v + 1) * &d(u, v)).signed(parity_sign(k + 1)),
            ));
        }
    }
    Ok(report)
}

/// Conjugation of the twisted Laplacians by the three stars. `t_plus` and
/// `t_minus` must be the `omega` and `-omega` twists of one base.
///
/// The transverse star commutes with `Delta_omega` with sign `+1`; see
/// [`check_transverse_conjugation`] for other sign conventions.
pub fn check_laplacian_conjugations<S: Scalar>(
    t_plus: &TwistedComplex<S>,
    t_minus: &TwistedComplex<S>,
    stars: &StarOperators<S>,
) -> Result<Report, Error> {
    if !t_plus.same_base(t_minus) {
        return Err(Error::MismatchedBases);
    }
    check_same_shape(stars, t_plus.base())?;
    let (p, q) = (t_plus.p() as isize, t_plus.q() as isize);
    let mut report = Report::new();
    for u in 0..=q {
        for v in 0..=p {
            let block = (u as usize, v as usize);
            let lap_plus = t_plus.laplacian(u, v)?;
            let sf = stars.star_f(u, v);
            let leaf_lhs = &sf * &lap_plus;
            let leaf_rhs = &t_minus.laplacian(u, p - v)? * &sf;
            if u == 0 {
                report.push(IdentityRecord::compare("leaf_star_laplacian_leafwise", block, &leaf_lhs, &leaf_rhs));
            }
            report.push(IdentityRecord::compare("leaf_star_laplacian", block, &leaf_lhs, &leaf_rhs));
            let s = stars.star_full(u, v);
            report.push(IdentityRecord::compare(
                "full_star_laplacian",
                block,
                &(&s * &lap_plus),
                &(&t_minus.laplacian(q - u, p - v)? * &s),
            ));
        }
    }
    report.extend(check_transverse_conjugation(t_plus, stars, "transverse_star_laplacian", |_, _, _, _| 1)?);
    report.records.sort_by_key(|r| r.block);
    Ok(report)
}

/// `star_perp Delta^{u,v}_omega = sign(p,q,u,v) Delta^{q-u,v}_omega star_perp` on every block.
pub fn check_transverse_conjugation<S: Scalar>(
    t: &TwistedComplex<S>,
    stars: &StarOperators<S>,
    name: &str,
    sign: impl Fn(usize, usize, usize, usize) -> i32,
) -> Result<Report, Error> {
    check_same_shape(stars, t.base())?;
    let (p, q) = (t.p(), t.q());
    let mut report = Report::new();
    for u in 0..=q {
        for v in 0..=p {
            let (ui, vi) = (u as isize, v as isize);
            let sp = stars.star_perp(ui, vi);
            let lhs = &sp * &t.laplacian(ui, vi)?;
            let rhs = (&t.laplacian(q as isize - ui, vi)? * &sp).signed(sign(p, q, u, v));
            report.push(IdentityRecord::compare(name, (u, v), &lhs, &rhs));
        }
    }
    Ok(report)
}

/// The leaf star carries `omega`-harmonic forms of degree `(u,v)` to
/// `-omega`-harmonic forms of degree `(u,p-v)`: checks `Delta_{-omega} star_f h = 0`
/// for each harmonic basis vector `h` and that both harmonic spaces have equal
/// dimension.
pub fn check_harmonic_transport<S: Scalar>(
    t_plus: &TwistedComplex<S>,
    t_minus: &TwistedComplex<S>,
    stars: &StarOperators<S>,
) -> Result<Report, Error> {
    if !t_plus.same_base(t_minus) {
        return Err(Error::MismatchedBases);
    }
    check_same_shape(stars, t_plus.base())?;
    let (p, q) = (t_plus.p() as isize, t_plus.q() as isize);
    let mut report = Report::new();
    for u in 0..=q {
        for v in 0..=p {
            let block = (u as usize, v as usize);
            let h = harmonic_basis(t_plus, u, v)?;
            let image = &(&t_minus.laplacian(u, p - v)? * &stars.star_f(u, v)) * &h;
            report.push(IdentityRecord::vanishes("leaf_star_harmonic_transport", block, &image));
            let target = harmonic_basis(t_minus, u, p - v)?;
            report.push(IdentityRecord::counts("leaf_star_harmonic_dimension", block, h.cols(), target.cols()));
        }
    }
    Ok(report)
}

/// The three diamond equalities for every `(u,v)`, for `omega` and, with the
/// roles of the two tables exchanged, for `-omega`.
pub fn check_diamond_symmetries(d: &HodgeDiamond) -> Report {
    let (p, q) = (d.p, d.q);
    let mut report = Report::new();
    for (suffix, a, b) in [("", &d.h_plus, &d.h_minus), ("_minus", &d.h_minus, &d.h_plus)] {
        for u in 0..=q {
            for v in 0..=p {
                let h = a[u][v];
                report.push(IdentityRecord::counts(format!("full_duality{suffix}"), (u, v), h, b[q - u][p - v]));
                report.push(IdentityRecord::counts(format!("leaf_duality{suffix}"), (u, v), h, b[u][p - v]));
                report.push(IdentityRecord::counts(format!("transverse_symmetry{suffix}"), (u, v), h, a[q - u][v]));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert_eq!(parity_sign(0), 1);
        assert_eq!(parity_sign(3), -1);
    }

    #[test]
    fn zero_diamond_is_symmetric() {
        let d = HodgeDiamond { p: 2, q: 3, h_plus: vec![vec![0; 3]; 4], h_minus: vec![vec![0; 3]; 4] };
        assert!(check_diamond_symmetries(&d).all_pass());
    }

    #[test]
    fn bumped_entry_names_its_partners() {
        let mut d = HodgeDiamond { p: 2, q: 3, h_plus: vec![vec![1; 3]; 4], h_minus: vec![vec![1; 3]; 4] };
        d.h_plus[0][0] += 1;
        let report = check_diamond_symmetries(&d);
        let failed: Vec<(String, (usize, usize))> =
            report.failures().map(|r| (r.identity.clone(), r.block)).collect();
        for expected in [
            ("full_duality", (0, 0)),
            ("leaf_duality", (0, 0)),
            ("transverse_symmetry", (0, 0)),
            ("transverse_symmetry", (3, 0)),
            ("full_duality_minus", (3, 2)),
            ("leaf_duality_minus", (0, 2)),
        ] {
            assert!(failed.contains(&(expected.0.to_string(), expected.1)), "{expected:?} missing");
        }
        assert_eq!(failed.len(), 6);
    }
}
