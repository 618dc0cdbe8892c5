//! Truncated Fourier model of the product foliation of `T^{p+q}` by the
//! `p`-tori spanned by the first `p` coordinates.
//!
//! Coordinates are `x_1..x_p` along the leaves and `y_1..y_q` across them. A
//! basis form of bidegree `(u,v)` is `e_k dy_I ^ dx_J` with `|I| = u`,
//! `|J| = v` and mode `k` in `{-K..K}^{p+q}` (leaf components first). Bases are
//! ordered mode-major, then `I`, then `J`, each subset list in lexicographic
//! order. The volume form is `dy_1 ^ .. ^ dy_q ^ dx_1 ^ .. ^ dx_p`.
//!
//! `dF` acts on mode `k` by wedge with `i k_leaf` (the `2 pi` is absorbed into
//! the frequencies) and `W` by wedge with `omega = sum c_j dx_j`; both carry the
//! sign `(-1)^u` from moving past `dy_I`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::complex::{BigradedComplex, LeafwiseForm};
use crate::error::Error;
use crate::gaussian::GaussianRational;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::star::{Orientation, StarOperators};
use crate::twist::{make_twist, TwistData, TwistedComplex};

#[derive(Clone, Debug, PartialEq)]
pub struct TorusModelSpec {
    pub p: usize,
    pub q: usize,
    /// Fourier truncation radius.
    pub k: usize,
    /// Coefficients of `omega` along `dx_1..dx_p`.
    pub c: Vec<BigRational>,
    /// Builds the stars for the leaf orientation `-dx_1 ^ .. ^ dx_p`.
    pub reverse_leaf_orientation: bool,
}

impl TorusModelSpec {
    pub fn new(p: usize, q: usize, k: i64, c: Vec<BigRational>) -> Result<Self, Error> {
        if k < 0 {
            return Err(Error::InvalidModel(format!("truncation radius K = {k} is negative")));
        }
        if c.len() != p {
            return Err(Error::InvalidModel(format!("{} twist coefficients for p = {p}", c.len())));
        }
        Ok(TorusModelSpec { p, q, k: k as usize, c, reverse_leaf_orientation: false })
    }

    /// `c = 0`.
    pub fn untwisted(p: usize, q: usize, k: usize) -> Self {
        TorusModelSpec { p, q, k, c: vec![BigRational::zero(); p], reverse_leaf_orientation: false }
    }

    pub fn with_integer_twist(p: usize, q: usize, k: usize, c: &[i64]) -> Self {
        let mut c: Vec<BigRational> = c.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        c.resize(p, BigRational::zero());
        TorusModelSpec { p, q, k, c, reverse_leaf_orientation: false }
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.k + 1).pow(self.n() as u32)
    }

    /// `C(q,u) C(p,v) (2K+1)^{p+q}`.
    pub fn block_dim(&self, u: usize, v: usize) -> usize {
        binomial(self.q, u) * binomial(self.p, v) * self.mode_count()
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Subsets of `0..m` of size `r` as bitmasks, in lexicographic order.
pub(crate) fn subsets(m: usize, r: usize) -> Vec<u32> {
    let mut out = Vec::new();
    fn rec(start: usize, m: usize, r: usize, mask: u32, out: &mut Vec<u32>) {
        if r == 0 {
            out.push(mask);
            return;
        }
        for i in start..m {
            if m - i >= r {
                rec(i + 1, m, r - 1, mask | (1 << i), out);
            }
        }
    }
    rec(0, m, r, 0, &mut out);
    out
}

/// Sign of `dx_j ^ dx_J = sign * dx_{J + j}`.
fn insertion_sign(j: usize, mask: u32) -> i32 {
    if (mask & ((1u32 << j) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of the shuffle `(S, S^c)` of `0..m`: `(-1)^{#{a in S, b not in S, a > b}}`.
pub(crate) fn shuffle_sign(mask: u32, m: usize) -> i32 {
    let mut inversions = 0;
    for a in 0..m {
        if mask & (1 << a) != 0 {
            inversions += (0..a).filter(|&b| mask & (1 << b) == 0).count();
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

fn complement(mask: u32, m: usize) -> u32 {
    !mask & ((1u32 << m) - 1)
}

/// Mode vectors in lexicographic order, leaf components first.
pub fn modes(spec: &TorusModelSpec) -> Vec<Vec<i64>> {
    let n = spec.n();
    let k = spec.k as i64;
    let side = 2 * spec.k + 1;
    (0..spec.mode_count())
        .map(|mut idx| {
            let mut m = vec![0; n];
            for slot in m.iter_mut().rev() {
                *slot = (idx % side) as i64 - k;
                idx /= side;
            }
            m
        })
        .collect()
}

fn monomial_label(i_mask: u32, j_mask: u32, q: usize, p: usize) -> String {
    let mut parts: Vec<String> = (0..q).filter(|a| i_mask & (1 << a) != 0).map(|a| format!("dy{}", a + 1)).collect();
    parts.extend((0..p).filter(|a| j_mask & (1 << a) != 0).map(|a| format!("dx{}", a + 1)));
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("^")
    }
}

/// Indexing of the blocks `(u,v)`.
struct Layout {
    p: usize,
    n_modes: usize,
    i_sets: Vec<Vec<u32>>,
    j_sets: Vec<Vec<u32>>,
    i_pos: Vec<usize>,
    j_pos: Vec<usize>,
}

impl Layout {
    fn new(spec: &TorusModelSpec) -> Self {
        let i_sets: Vec<Vec<u32>> = (0..=spec.q).map(|u| subsets(spec.q, u)).collect();
        let j_sets: Vec<Vec<u32>> = (0..=spec.p).map(|v| subsets(spec.p, v)).collect();
        let mut i_pos = vec![0; 1 << spec.q];
        for set in &i_sets {
            for (k, &m) in set.iter().enumerate() {
                i_pos[m as usize] = k;
            }
        }
        let mut j_pos = vec![0; 1 << spec.p];
        for set in &j_sets {
            for (k, &m) in set.iter().enumerate() {
                j_pos[m as usize] = k;
            }
        }
        Layout { p: spec.p, n_modes: spec.mode_count(), i_sets, j_sets, i_pos, j_pos }
    }

    fn dim(&self, u: usize, v: usize) -> usize {
        self.n_modes * self.i_sets[u].len() * self.j_sets[v].len()
    }

    fn index(&self, mode: usize, i_mask: u32, j_mask: u32) -> usize {
        let u = i_mask.count_ones() as usize;
        let v = j_mask.count_ones() as usize;
        (mode * self.i_sets[u].len() + self.i_pos[i_mask as usize]) * self.j_sets[v].len() + self.j_pos[j_mask as usize]
    }

    /// Every basis element of block `(u,v)` as `(row, mode, I, J)`.
    fn basis(&self, u: usize, v: usize) -> impl Iterator<Item = (usize, usize, u32, u32)> + '_ {
        (0..self.n_modes).flat_map(move |m| {
            self.i_sets[u].iter().flat_map(move |&i| {
                self.j_sets[v].iter().map(move |&j| (self.index(m, i, j), m, i, j))
            })
        })
    }

    /// Wedge with the leaf 1-form whose `dx_j` coefficient on mode `m` is
    /// `coef(m, j)`, including the `(-1)^u` sign.
    fn leaf_wedge<S: Scalar>(&self, u: usize, v: usize, coef: impl Fn(usize, usize) -> S) -> Matrix<S> {
        let (rows, cols) = (if v < self.p { self.dim(u, v + 1) } else { 0 }, self.dim(u, v));
        if v == self.p {
            return Matrix::zeros(rows, cols);
        }
        let transverse = if u.is_multiple_of(2) { 1 } else { -1 };
        let mut triplets = Vec::new();
        for (col, m, i, j_mask) in self.basis(u, v) {
            for j in (0..self.p).filter(|&j| j_mask & (1 << j) == 0) {
                let c = coef(m, j);
                if c.is_zero() {
                    continue;
                }
                let sign = transverse * insertion_sign(j, j_mask);
                let row = self.index(m, i, j_mask | (1 << j));
                triplets.push((row, col, if sign > 0 { c } else { -c }));
            }
        }
        Matrix::from_triplets(rows, cols, triplets).expect("indices in range")
    }

    fn signed_permutation<S: Scalar>(
        &self,
        rows: usize,
        cols: usize,
        entries: impl Iterator<Item = (usize, usize, i32)>,
    ) -> Matrix<S> {
        let t = entries.map(|(r, c, s)| (r, c, S::from_i64(s as i64)));
        Matrix::from_triplets(rows, cols, t).expect("indices in range")
    }
}

#[derive(Clone, Debug)]
pub struct TorusModel<S> {
    pub spec: TorusModelSpec,
    pub complex: Arc<BigradedComplex<S>>,
    pub stars: StarOperators<S>,
    pub twist: TwistData<S>,
}

impl<S: Scalar> TorusModel<S> {
    /// The twisted complex for `omega`, with all axioms checked.
    pub fn twisted(&self) -> Result<TwistedComplex<S>, Error> {
        make_twist(Arc::clone(&self.complex), self.twist.omega.clone(), self.twist.w.clone())
    }

    pub fn untwisted(&self) -> TwistedComplex<S> {
        TwistedComplex::untwisted(Arc::clone(&self.complex))
    }

    pub fn modes(&self) -> Vec<Vec<i64>> {
        modes(&self.spec)
    }

    /// Translation by a quarter period along leaf direction `j`: mode `k` is
    /// multiplied by `i^{k_j}`.
    pub fn leaf_translation(&self, j: usize) -> Result<Vec<Vec<Matrix<S>>>, Error> {
        if j >= self.spec.p {
            return Err(Error::InvalidModel(format!("leaf direction {j} with p = {}", self.spec.p)));
        }
        Ok(self.mode_phase(j))
    }

    /// Translation by a quarter period along transverse direction `j`.
    pub fn transverse_translation(&self, j: usize) -> Result<Vec<Vec<Matrix<S>>>, Error> {
        if j >= self.spec.q {
            return Err(Error::InvalidModel(format!("transverse direction {j} with q = {}", self.spec.q)));
        }
        Ok(self.mode_phase(self.spec.p + j))
    }

    fn mode_phase(&self, axis: usize) -> Vec<Vec<Matrix<S>>> {
        let layout = Layout::new(&self.spec);
        let modes = self.modes();
        let phases: Vec<S> =
            modes.iter().map(|k| S::from_gaussian(&GaussianRational::from_integer(1).times_i_pow(k[axis]))).collect();
        (0..=self.spec.q)
            .map(|u| {
                (0..=self.spec.p)
                    .map(|v| Matrix::diagonal(layout.basis(u, v).map(|(_, m, _, _)| phases[m].clone())))
                    .collect()
            })
            .collect()
    }
}

/// Builds the complex, its stars and the wedge operators of `omega`.
pub fn build_torus_model<S: Scalar>(spec: &TorusModelSpec) -> Result<TorusModel<S>, Error> {
    if spec.c.len() != spec.p {
        return Err(Error::InvalidModel(format!("{} twist coefficients for p = {}", spec.c.len(), spec.p)));
    }
    if spec.p > 16 || spec.q > 16 {
        return Err(Error::InvalidModel("at most 16 leaf and 16 transverse directions".into()));
    }
    let (p, q) = (spec.p, spec.q);
    let layout = Layout::new(spec);
    let modes = modes(spec);
    let ik: Vec<Vec<S>> = modes
        .iter()
        .map(|k| k[..p].iter().map(|&x| S::from_gaussian(&GaussianRational::from_integer(x).times_i_pow(1))).collect())
        .collect();
    let c: Vec<S> = spec.c.iter().map(|x| S::from_gaussian(&GaussianRational::real(x.clone()))).collect();

    let dims: Vec<Vec<usize>> = (0..=q).map(|u| (0..=p).map(|v| layout.dim(u, v)).collect()).collect();
    let mut labels = vec![vec![Vec::new(); p + 1]; q + 1];
    for u in 0..=q {
        for v in 0..=p {
            let mut l = vec![String::new(); layout.dim(u, v)];
            for (row, m, i, j) in layout.basis(u, v) {
                let k: Vec<String> = modes[m].iter().map(i64::to_string).collect();
                l[row] = format!("e({}) {}", k.join(","), monomial_label(i, j, q, p));
            }
            labels[u][v] = l;
        }
    }
    let d_f: Vec<Vec<Matrix<S>>> =
        (0..=q).map(|u| (0..=p).map(|v| layout.leaf_wedge(u, v, |m, j| ik[m][j].clone())).collect()).collect();
    let w: Vec<Vec<Matrix<S>>> =
        (0..=q).map(|u| (0..=p).map(|v| layout.leaf_wedge(u, v, |_, j| c[j].clone())).collect()).collect();
    let complex = BigradedComplex::new(p, q, dims, Some(labels), d_f)?;

    // omega = sum c_j e_0 dx_j
    let zero_mode = modes.iter().position(|k| k.iter().all(|&x| x == 0)).expect("zero mode present");
    let mut omega = vec![S::zero(); layout.dim(0, 1.min(p))];
    if p > 0 {
        for j in 0..p {
            omega[layout.index(zero_mode, 0, 1 << j)] = c[j].clone();
        }
    } else {
        omega.clear();
    }
    let twist = TwistData { omega: LeafwiseForm::new((0, 1), omega), w };

    let leaf_sign = if spec.reverse_leaf_orientation { -1 } else { 1 };
    let star_f: Vec<Vec<Matrix<S>>> = (0..=q)
        .map(|u| {
            (0..=p)
                .map(|v| {
                    let entries = layout.basis(u, v).map(|(col, m, i, j)| {
                        let row = layout.index(m, i, complement(j, p));
                        (row, col, leaf_sign * shuffle_sign(j, p))
                    });
                    layout.signed_permutation(layout.dim(u, p - v), layout.dim(u, v), entries)
                })
                .collect()
        })
        .collect();
    let star_perp: Vec<Vec<Matrix<S>>> = (0..=q)
        .map(|u| {
            (0..=p)
                .map(|v| {
                    let entries = layout.basis(u, v).map(|(col, m, i, j)| {
                        (layout.index(m, complement(i, q), j), col, shuffle_sign(i, q))
                    });
                    layout.signed_permutation(layout.dim(q - u, v), layout.dim(u, v), entries)
                })
                .collect()
        })
        .collect();
    // the genuine n-dimensional monomial star, with dy before dx
    let star_full: Vec<Vec<Matrix<S>>> = (0..=q)
        .map(|u| {
            (0..=p)
                .map(|v| {
                    let entries = layout.basis(u, v).map(|(col, m, i, j)| {
                        let s = i | (j << q);
                        let row = layout.index(m, complement(i, q), complement(j, p));
                        (row, col, leaf_sign * shuffle_sign(s, p + q))
                    });
                    layout.signed_permutation(layout.dim(q - u, p - v), layout.dim(u, v), entries)
                })
                .collect()
        })
        .collect();
    let orientation = Orientation {
        leaf_volume: layout.index(zero_mode, 0, complement(0, p)),
        transverse_volume: layout.index(zero_mode, complement(0, q), 0),
    };
    let stars = StarOperators::from_blocks(&complex, star_f, star_perp, Some(star_full), orientation)?;
    Ok(TorusModel { spec: spec.clone(), complex: Arc::new(complex), stars, twist })
}
