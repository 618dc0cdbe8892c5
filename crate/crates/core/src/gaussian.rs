//! Exact Gaussian rationals `a + b i` with `a, b` in Q, and fraction-free elimination.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::{DenseBlock, DenseReduction};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`, real.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplication by `i^k`.
    pub fn times_i_pow(&self, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => self.clone(),
            1 => GaussianRational { re: -self.im.clone(), im: self.re.clone() },
            2 => -self.clone(),
            _ => GaussianRational { re: self.im.clone(), im: -self.re.clone() },
        }
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        GaussianRational { re: &self.re / &n, im: -(&self.im / &n) }
    }
}

/// Parses `3`, `-1/2` or a finite decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(num, den);
    Some(if negative { -value } else { value })
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -self.im.clone())
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::default()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::from_integer(1)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::real(&self.re * &rhs.re);
        }
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        if rhs.im.is_zero() {
            assert!(!rhs.re.is_zero(), "division by zero Gaussian rational");
            return GaussianRational { re: &self.re / &rhs.re, im: &self.im / &rhs.re };
        }
        self * &rhs.inv()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

// Gaussian integers, used only inside the elimination below.
#[derive(Clone, PartialEq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn one() -> Self {
        GaussInt { re: BigInt::one(), im: BigInt::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, rhs: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    fn sub(&self, rhs: &GaussInt) -> GaussInt {
        GaussInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }

    /// Division known to be exact in Z[i].
    fn div_exact(&self, rhs: &GaussInt) -> GaussInt {
        let n = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        let re = &self.re * &rhs.re + &self.im * &rhs.im;
        let im = &self.im * &rhs.re - &self.re * &rhs.im;
        debug_assert!(re.is_multiple_of(&n) && im.is_multiple_of(&n), "inexact Bareiss division");
        GaussInt { re: re / &n, im: im / n }
    }

    fn to_rational(&self) -> GaussianRational {
        GaussianRational {
            re: BigRational::from_integer(self.re.clone()),
            im: BigRational::from_integer(self.im.clone()),
        }
    }
}

/// Scales a row of Gaussian rationals by the lcm of its denominators.
fn integral_row(row: &[GaussianRational]) -> Vec<GaussInt> {
    let mut lcm = BigInt::one();
    for x in row {
        lcm = lcm.lcm(x.re.denom());
        lcm = lcm.lcm(x.im.denom());
    }
    row.iter()
        .map(|x| GaussInt {
            re: (x.re.numer() * &lcm) / x.re.denom(),
            im: (x.im.numer() * &lcm) / x.im.denom(),
        })
        .collect()
}

/// Bareiss elimination of `rows` over Z[i], pivoting only in the first
/// `pivot_cols` columns. Returns the pivot column of each echelon row.
fn bareiss(rows: &mut [Vec<GaussInt>], pivot_cols: usize) -> Vec<usize> {
    let n_rows = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut prev = GaussInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == n_rows {
            break;
        }
        let Some(p) = (r..n_rows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (top, rest) = rows.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..width {
                let t = pivot.mul(&row[j]).sub(&lead.mul(&pivot_row[j]));
                row[j] = t.div_exact(&prev);
            }
            row[c] = GaussInt { re: BigInt::zero(), im: BigInt::zero() };
        }
        prev = pivot.clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn back_substitute(
    echelon: &[Vec<GaussInt>],
    pivots: &[usize],
    cols: usize,
    mut x: Vec<GaussianRational>,
    rhs: Option<usize>,
) -> Vec<GaussianRational> {
    for (r, &pc) in pivots.iter().enumerate().rev() {
        let row = &echelon[r];
        let mut acc = match rhs {
            Some(k) => row[k].to_rational(),
            None => GaussianRational::zero(),
        };
        for j in pc + 1..cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= &(&row[j].to_rational() * &x[j]);
            }
        }
        x[pc] = &acc / &row[pc].to_rational();
    }
    x
}

pub(crate) fn fraction_free_reduce(block: &DenseBlock<GaussianRational>) -> DenseReduction<GaussianRational> {
    let (rows, cols) = (block.rows, block.cols);
    let mut work: Vec<Vec<GaussInt>> = (0..rows).map(|i| integral_row(block.row(i))).collect();
    let pivots = bareiss(&mut work, cols);
    let rank = pivots.len();

    let mut kernel = Vec::with_capacity(cols - rank);
    let mut is_pivot = vec![false; cols];
    for &pc in &pivots {
        is_pivot[pc] = true;
    }
    for free in (0..cols).filter(|&j| !is_pivot[j]) {
        let mut x = vec![GaussianRational::zero(); cols];
        x[free] = GaussianRational::one();
        kernel.push(back_substitute(&work, &pivots, cols, x, None));
    }
    let image = pivots.iter().map(|&pc| block.column(pc)).collect();
    DenseReduction { rank, kernel, image }
}

pub(crate) fn fraction_free_solve(
    block: &DenseBlock<GaussianRational>,
    rhs: &[GaussianRational],
) -> Option<Vec<GaussianRational>> {
    let (rows, cols) = (block.rows, block.cols);
    let mut work: Vec<Vec<GaussInt>> = (0..rows)
        .map(|i| {
            let mut row = block.row(i).to_vec();
            row.push(rhs[i].clone());
            integral_row(&row)
        })
        .collect();
    let pivots = bareiss(&mut work, cols);
    if work[pivots.len()..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let x = vec![GaussianRational::zero(); cols];
    Some(back_substitute(&work, &pivots, cols, x, Some(cols)))
}
