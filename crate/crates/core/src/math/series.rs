//! Dense truncated power series in two formal variables with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A power series `sum a_ij x^i y^j` kept for `i <= max_i`, `j <= max_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBivariateSeries {
    max_i: usize,
    max_j: usize,
    coeff: Vec<Complex64>,
}

impl TruncatedBivariateSeries {
    pub fn zero(max_i: usize, max_j: usize) -> Self {
        Self {
            max_i,
            max_j,
            coeff: vec![Complex64::new(0.0, 0.0); (max_i + 1) * (max_j + 1)],
        }
    }

    /// The constant series `c`.
    pub fn constant(max_i: usize, max_j: usize, c: Complex64) -> Self {
        let mut s = Self::zero(max_i, max_j);
        s.coeff[0] = c;
        s
    }

    pub fn one(max_i: usize, max_j: usize) -> Self {
        Self::constant(max_i, max_j, Complex64::new(1.0, 0.0))
    }

    /// `c0 + cx * x + cy * y + cxy * x y`, truncated.
    pub fn bilinear(
        max_i: usize,
        max_j: usize,
        c0: Complex64,
        cx: Complex64,
        cy: Complex64,
        cxy: Complex64,
    ) -> Self {
        let mut s = Self::constant(max_i, max_j, c0);
        if max_i >= 1 {
            s.set(1, 0, cx);
        }
        if max_j >= 1 {
            s.set(0, 1, cy);
        }
        if max_i >= 1 && max_j >= 1 {
            s.set(1, 1, cxy);
        }
        s
    }

    pub fn max_i(&self) -> usize {
        self.max_i
    }

    pub fn max_j(&self) -> usize {
        self.max_j
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.max_j + 1) + j
    }

    fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.coeff[k] = v;
    }

    fn get(&self, i: usize, j: usize) -> Complex64 {
        self.coeff[self.idx(i, j)]
    }

    /// Coefficient of `x^i y^j`.
    pub fn coefficient(&self, i: usize, j: usize) -> Result<Complex64> {
        if i > self.max_i || j > self.max_j {
            return Err(Error::SeriesIndex {
                i,
                j,
                max_i: self.max_i,
                max_j: self.max_j,
            });
        }
        Ok(self.get(i, j))
    }

    /// Builds a series from a coefficient function.
    pub fn from_fn(
        max_i: usize,
        max_j: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut s = Self::zero(max_i, max_j);
        for i in 0..=max_i {
            for j in 0..=max_j {
                s.set(i, j, f(i, j));
            }
        }
        s
    }

    fn truncated(&self, max_i: usize, max_j: usize) -> Self {
        Self::from_fn(max_i, max_j, |i, j| self.get(i, j))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            max_i: self.max_i,
            max_j: self.max_j,
            coeff: self.coeff.iter().map(|&v| v * c).collect(),
        }
    }

    /// Product truncated to the smaller of the two orders in each variable.
    pub fn product(&self, other: &Self) -> Self {
        let mi = self.max_i.min(other.max_i);
        let mj = self.max_j.min(other.max_j);
        let mut out = Self::zero(mi, mj);
        for i in 0..=mi {
            for j in 0..=mj {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..=i {
                    for b in 0..=j {
                        acc += self.get(a, b) * other.get(i - a, j - b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff[0]
    }

    /// `exp(s)`. The constant part is exponentiated exactly and the rest
    /// is summed as a finite Taylor series of the nilpotent remainder.
    pub fn exp(&self) -> Self {
        let c = self.constant_term();
        let mut rest = self.clone();
        rest.coeff[0] = Complex64::new(0.0, 0.0);
        let order = self.max_i + self.max_j;
        let mut term = Self::one(self.max_i, self.max_j);
        let mut acc = Self::one(self.max_i, self.max_j);
        for k in 1..=order {
            term = term
                .product(&rest)
                .scale(Complex64::new(1.0 / k as f64, 0.0));
            acc = &acc + &term;
        }
        acc.scale(c.exp())
    }

    /// `s^p` for any integer `p`. Negative powers need an invertible constant term.
    pub fn powi(&self, p: i32) -> Result<Self> {
        let c = self.constant_term();
        if p < 0 && c.norm() == 0.0 {
            return Err(Error::invalid(
                "series",
                "negative power of a series with zero constant term",
            ));
        }
        if p >= 0 {
            let mut acc = Self::one(self.max_i, self.max_j);
            let mut base = self.clone();
            let mut e = p as u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.product(&base);
                }
                base = base.product(&base);
                e >>= 1;
            }
            return Ok(acc);
        }
        // s^p = c^p (1 + u)^p with u = s/c - 1 nilpotent: binomial series
        let mut u = self.scale(c.inv());
        u.coeff[0] = Complex64::new(0.0, 0.0);
        let order = self.max_i + self.max_j;
        let mut acc = Self::one(self.max_i, self.max_j);
        let mut term = Self::one(self.max_i, self.max_j);
        let pf = p as f64;
        for k in 1..=order {
            let kf = k as f64;
            term = term
                .product(&u)
                .scale(Complex64::new((pf - kf + 1.0) / kf, 0.0));
            acc = &acc + &term;
        }
        Ok(acc.scale(c.powi(p)))
    }

    pub fn recip(&self) -> Result<Self> {
        self.powi(-1)
    }
}

impl Add for &TruncatedBivariateSeries {
    type Output = TruncatedBivariateSeries;

    fn add(self, rhs: Self) -> TruncatedBivariateSeries {
        let mi = self.max_i.min(rhs.max_i);
        let mj = self.max_j.min(rhs.max_j);
        TruncatedBivariateSeries::from_fn(mi, mj, |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl Sub for &TruncatedBivariateSeries {
    type Output = TruncatedBivariateSeries;

    fn sub(self, rhs: Self) -> TruncatedBivariateSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedBivariateSeries {
    type Output = TruncatedBivariateSeries;

    fn neg(self) -> TruncatedBivariateSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &TruncatedBivariateSeries {
    type Output = TruncatedBivariateSeries;

    fn mul(self, rhs: Self) -> TruncatedBivariateSeries {
        self.product(rhs)
    }
}

/// Free-function form of [`TruncatedBivariateSeries::product`].
pub fn series_product(
    a: &TruncatedBivariateSeries,
    b: &TruncatedBivariateSeries,
) -> TruncatedBivariateSeries {
    a.product(b)
}

/// Free-function form of [`TruncatedBivariateSeries::coefficient`].
pub fn series_coefficient(a: &TruncatedBivariateSeries, i: usize, j: usize) -> Result<Complex64> {
    a.coefficient(i, j)
}

impl TruncatedBivariateSeries {
    /// Restricts the series to smaller orders.
    pub fn truncate(&self, max_i: usize, max_j: usize) -> Self {
        self.truncated(max_i.min(self.max_i), max_j.min(self.max_j))
    }
}
