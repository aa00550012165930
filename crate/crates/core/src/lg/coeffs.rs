use std::f64::consts::PI;

use num_complex::Complex64;

use super::LGIndex;
use crate::error::{Error, Result};
use crate::math::series::TruncatedBivariateSeries;
use crate::math::special::factorial;

/// Expansion coefficients of the displaced overlap
/// `W_{m,n}(K) = e^{i(l_m - l_n) phi} sum_j c_j y^{j/2} e^{-y}`, `y = K^2 a / 8`,
/// `a = w0^2 (1 + t^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffRow {
    pub m: LGIndex,
    pub n: LGIndex,
    pub t: f64,
    coeffs: Vec<Complex64>,
}

impl CoeffRow {
    /// `c_j` for `j = 0..=max_j`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_j`, zero beyond the stored support.
    pub fn get(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn max_j(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates `W_{m,n}(K, phi)` for waist `w0`.
    pub fn evaluate(&self, k: f64, phi: f64, w0: f64) -> Complex64 {
        let a = w0 * w0 * (1.0 + self.t * self.t);
        let y = k * k * a / 8.0;
        let sy = y.sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = 1.0;
        for c in &self.coeffs {
            acc += c * pow;
            pow *= sy;
        }
        let dl = (self.m.l - self.n.l) as f64;
        acc * (-y).exp() * Complex64::from_polar(1.0, dl * phi)
    }
}

/// Coefficients `c_{m,n,j}(t)` by formal-series extraction in `d_m`, `d_n`.
pub fn c_coefficients(m: LGIndex, n: LGIndex, t: f64) -> Result<CoeffRow> {
    m.check_guard()?;
    n.check_guard()?;
    if !t.is_finite() {
        return Err(Error::invalid("t", "must be finite"));
    }
    let (rm, rn) = (m.r, n.r);
    let (lm, ln) = (m.abs_l(), n.abs_l());
    let nu = (m.l - n.l).unsigned_abs() as usize;
    let big_m = (lm + ln - nu) / 2;
    let psi = t.atan();
    let b = Complex64::from_polar(1.0, 2.0 * psi);
    let binv = b.conj();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);

    let one_minus_dm_b = TruncatedBivariateSeries::bilinear(rm, rn, one, -b, zero, zero);
    let one_minus_dn_binv = TruncatedBivariateSeries::bilinear(rm, rn, one, zero, -binv, zero);
    let one_minus_dmdn = TruncatedBivariateSeries::bilinear(rm, rn, one, zero, zero, -one);
    let numer =
        TruncatedBivariateSeries::bilinear(rm, rn, zero, -b, -binv, Complex64::new(2.0, 0.0));
    let d = numer.product(&one_minus_dmdn.recip()?);
    let kmax = rm + rn;
    let mut d_pows = Vec::with_capacity(kmax + 1);
    d_pows.push(TruncatedBivariateSeries::one(rm, rn));
    for k in 1..=kmax {
        let next = d_pows[k - 1].product(&d);
        d_pows.push(next);
    }

    let jmax = lm + ln + 2 * kmax;
    let mut coeffs = vec![zero; jmax + 1];
    let i_pow = Complex64::new(0.0, 1.0).powu((lm + ln) as u32);
    for s in 0..=big_m {
        let f = one_minus_dm_b
            .powi((ln - s) as i32)?
            .product(&one_minus_dn_binv.powi((lm - s) as i32)?)
            .product(&one_minus_dmdn.powi(-((lm + ln - s + 1) as i32))?);
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        let pref = i_pow
            * (sign * factorial(lm) * factorial(ln)
                / (factorial(lm - s) * factorial(ln - s) * factorial(s)));
        for (k, dk) in d_pows.iter().enumerate() {
            let ksign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let c = dk.product(&f).coefficient(rm, rn)? * (ksign / factorial(k));
            coeffs[lm + ln - 2 * s + 2 * k] += pref * c;
        }
    }
    let norm =
        (factorial(rm) / factorial(rm + lm)).sqrt() * (factorial(rn) / factorial(rn + ln)).sqrt();
    let gouy = Complex64::from_polar(norm, psi * (lm as f64 - ln as f64));
    for c in &mut coeffs {
        *c *= gouy;
    }
    Ok(CoeffRow { m, n, t, coeffs })
}

/// `W_{m,n}(K, phi, z) = int G_m(K1, z) G_n^*(K1 - K, z) d^2K1 / 4 pi^2`
/// from the coefficient expansion.
pub fn overlap_w(
    m: LGIndex,
    n: LGIndex,
    k: f64,
    phi: f64,
    z: f64,
    w0: f64,
    lambda: f64,
) -> Result<Complex64> {
    let t = z * lambda / (PI * w0 * w0);
    Ok(c_coefficients(m, n, t)?.evaluate(k, phi, w0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::special::laguerre;

    fn laguerre_coeffs(r: usize, alpha: usize) -> Vec<f64> {
        // L_r^a(x) = sum_i (-1)^i C(r+a, r-i) x^i / i!
        (0..=r)
            .map(|i| {
                let binom = factorial(r + alpha) / (factorial(r - i) * factorial(alpha + i));
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom / factorial(i)
            })
            .collect()
    }

    // Hankel-transform closed form at the waist w0 sqrt(1+t^2), times the
    // Gouy phase e^{i psi (N_m - N_n)}.
    fn w_hankel(m: LGIndex, n: LGIndex, k: f64, phi: f64, t: f64, w0: f64) -> Complex64 {
        let a = w0 * w0 * (1.0 + t * t);
        let y = k * k * a / 8.0;
        let nu = (m.l - n.l).unsigned_abs() as usize;
        let big_m = (m.abs_l() + n.abs_l() - nu) / 2;
        let pa = laguerre_coeffs(m.r, m.abs_l());
        let pb = laguerre_coeffs(n.r, n.abs_l());
        let mut prod = vec![0.0; pa.len() + pb.len() - 1];
        for (i, x) in pa.iter().enumerate() {
            for (j, z) in pb.iter().enumerate() {
                prod[i + j] += x * z;
            }
        }
        let mut s = 0.0;
        for (p, c) in prod.iter().enumerate() {
            let ap = c * 2f64.powi(p as i32);
            let kk = big_m + p;
            s += ap * factorial(kk) * (8.0 * y).powf(nu as f64 / 2.0)
                / (2f64.powi(nu as i32 + 1) * 2f64.powi((nu + kk + 1) as i32))
                * laguerre(kk, nu as f64, y);
        }
        let nm = super::super::amplitude::lg_norm(m);
        let nn = super::super::amplitude::lg_norm(n);
        let psi = t.atan();
        Complex64::new(0.0, 1.0).powu(nu as u32)
            * (2.0 * PI * nm * nn * s * (-y).exp())
            * Complex64::from_polar(1.0, (m.l - n.l) as f64 * phi)
            * Complex64::from_polar(1.0, psi * (m.order() as f64 - n.order() as f64))
    }

    fn small_modes() -> Vec<LGIndex> {
        let mut v = Vec::new();
        for r in 0..=2 {
            for l in -2..=2 {
                v.push(LGIndex::new(r, l));
            }
        }
        v
    }

    #[test]
    fn gaussian_row() {
        for t in [0.0, 0.5, 3.0] {
            let row = c_coefficients(LGIndex::GAUSSIAN, LGIndex::GAUSSIAN, t).unwrap();
            assert_eq!(row.max_j(), 0);
            assert!((row.get(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn agrees_with_hankel_closed_form() {
        let w0 = 1.0;
        for &t in &[0.0, 0.37, 1.0] {
            for m in small_modes() {
                for n in small_modes() {
                    let row = c_coefficients(m, n, t).unwrap();
                    for &k in &[0.4, 1.3, 3.1] {
                        let a = row.evaluate(k, 0.3, w0);
                        let b = w_hankel(m, n, k, 0.3, t, w0);
                        assert!(
                            (a - b).norm() <= 1e-10 * b.norm().max(1.0),
                            "{m} {n} t={t} K={k}: {a} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn parity_and_support() {
        for m in small_modes() {
            for n in small_modes() {
                let row = c_coefficients(m, n, 0.6).unwrap();
                let bound = 2 * (m.r + n.r) + m.abs_l() + n.abs_l();
                assert_eq!(row.max_j(), bound);
                let parity = (m.abs_l() + n.abs_l()) % 2;
                for (j, c) in row.coeffs().iter().enumerate() {
                    if j % 2 != parity {
                        assert_eq!(*c, Complex64::new(0.0, 0.0), "{m} {n} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn orthonormal_at_zero_displacement() {
        for m in small_modes() {
            for n in small_modes() {
                let w = overlap_w(m, n, 0.0, 0.0, 123.0, 0.1, 1e-6).unwrap();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((w - Complex64::new(want, 0.0)).norm() < 1e-12, "{m} {n}");
            }
        }
    }

    #[test]
    fn gouy_phase_identity() {
        for m in small_modes() {
            for n in small_modes() {
                let c0 = c_coefficients(m, n, 0.0).unwrap();
                let t = 0.83;
                let ct = c_coefficients(m, n, t).unwrap();
                let ph =
                    Complex64::from_polar(1.0, t.atan() * (m.order() as f64 - n.order() as f64));
                for j in 0..=c0.max_j() {
                    assert!((ct.get(j) - c0.get(j) * ph).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gaussian_overlap_closed_form() {
        let (w0, lam, z) = (0.1, 1.55e-6, 5e3);
        let t = z * lam / (PI * w0 * w0);
        let k = 17.0;
        let w = overlap_w(LGIndex::GAUSSIAN, LGIndex::GAUSSIAN, k, 1.0, z, w0, lam).unwrap();
        let want = (-k * k * w0 * w0 * (1.0 + t * t) / 8.0).exp();
        assert!((w - Complex64::new(want, 0.0)).norm() < 1e-15);
    }
}
