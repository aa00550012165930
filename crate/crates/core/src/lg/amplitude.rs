use std::f64::consts::PI;

use num_complex::Complex64;

use super::LGIndex;
use crate::error::Result;
use crate::math::series::TruncatedBivariateSeries;
use crate::math::special::factorial;

/// `sqrt(r! 2^{|l|+1} / (pi (r+|l|)!))`.
pub(crate) fn lg_norm(idx: LGIndex) -> f64 {
    let (r, al) = (idx.r, idx.abs_l());
    (factorial(r) * 2f64.powi(al as i32 + 1) / (PI * factorial(r + al))).sqrt()
}

/// Momentum-space amplitude `G_{r,l}(K, phi)` at normalized distance
/// `t = z / z_R`, normalized so that `int |G|^2 d^2K / 4 pi^2 = 1`.
///
/// The Fourier-transformed generating function
/// `pi/(1+d) exp[i pi kappa p/(1+d) - pi^2 k~^2 ((1-d)/(1+d) - i t)]`,
/// with `k~ = w0 K / 2 pi` and `kappa = k~ e^{+-i phi}`, is expanded as a
/// series in `d` and `p`; the `d^r p^{|l|}` coefficient gives the mode.
pub fn lg_momentum_amplitude(idx: LGIndex, k: f64, phi: f64, t: f64, w0: f64) -> Result<Complex64> {
    idx.check_guard()?;
    let (r, al) = (idx.r, idx.abs_l());
    let kt = w0 * k / (2.0 * PI);
    let sign = if idx.l >= 0 { 1.0 } else { -1.0 };
    let kappa = Complex64::from_polar(kt, sign * phi);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // variables: i <-> d, j <-> p
    let one_plus_d = TruncatedBivariateSeries::bilinear(r, al, one, one, zero, zero);
    let inv = one_plus_d.recip()?;
    let one_minus_d = TruncatedBivariateSeries::bilinear(r, al, one, -one, zero, zero);
    let p = TruncatedBivariateSeries::bilinear(r, al, zero, zero, one, zero);
    let phase = p.product(&inv).scale(Complex64::new(0.0, PI) * kappa);
    let ratio = one_minus_d.product(&inv);
    let shifted = &ratio - &TruncatedBivariateSeries::constant(r, al, Complex64::new(0.0, t));
    let exponent = &phase - &shifted.scale(Complex64::new(PI * PI * kt * kt, 0.0));
    let gen = inv.product(&exponent.exp()).scale(Complex64::new(PI, 0.0));
    let coeff = gen.coefficient(r, al)?;
    Ok(coeff * (w0 * lg_norm(idx) * factorial(al)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::quadrature::{integrate_adaptive, AdaptiveOptions};
    use crate::math::special::laguerre;

    // Closed form: w0 N pi (i pi k~)^{|l|} e^{il phi} (-1)^r L_r^{|l|}(2Y) e^{-Y} e^{iYt}, Y = pi^2 k~^2
    fn closed_form(idx: LGIndex, k: f64, phi: f64, t: f64, w0: f64) -> Complex64 {
        let kt = w0 * k / (2.0 * PI);
        let y = PI * PI * kt * kt;
        let al = idx.abs_l();
        let sign = if idx.r % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, PI * kt).powu(al as u32)
            * Complex64::from_polar(1.0, idx.l as f64 * phi + y * t)
            * (w0 * lg_norm(idx) * PI * sign * laguerre(idx.r, al as f64, 2.0 * y) * (-y).exp())
    }

    #[test]
    fn gaussian_at_origin() {
        let w0 = 1.0;
        let g = lg_momentum_amplitude(LGIndex::GAUSSIAN, 0.0, 0.0, 0.0, w0).unwrap();
        let want = PI * (2.0 / PI).sqrt();
        assert!((g - Complex64::new(want, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn matches_laguerre_closed_form() {
        let w0 = 0.13;
        for r in 0..=4 {
            for l in -4..=4 {
                let idx = LGIndex::new(r, l);
                for &(kw, phi, t) in &[(0.3, 0.2, 0.0), (2.1, -1.0, 0.5), (4.0, 2.5, 1.7)] {
                    let k = kw / w0;
                    let a = lg_momentum_amplitude(idx, k, phi, t, w0).unwrap();
                    let b = closed_form(idx, k, phi, t, w0);
                    assert!(
                        (a - b).norm() <= 1e-11 * b.norm().max(1e-3 * w0),
                        "{idx} {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn azimuthal_phase() {
        let idx = LGIndex::new(1, -2);
        let a = lg_momentum_amplitude(idx, 7.0, 0.4, 0.3, 0.2).unwrap();
        let b = lg_momentum_amplitude(idx, 7.0, 0.4 + 0.9, 0.3, 0.2).unwrap();
        assert!((b - a * Complex64::from_polar(1.0, -2.0 * 0.9)).norm() < 1e-13);
    }

    #[test]
    fn unit_norm() {
        let w0 = 0.5;
        for (r, l) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let idx = LGIndex::new(r, l);
            let v = integrate_adaptive(
                |k| {
                    let g = lg_momentum_amplitude(idx, k, 0.0, 0.4, w0).unwrap();
                    k * g.norm_sqr() * 2.0 * PI / (4.0 * PI * PI)
                },
                0.0,
                40.0 / w0,
                AdaptiveOptions {
                    rel_tol: 1e-10,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!((v - 1.0).abs() < 1e-6, "({r},{l}): {v}");
        }
    }

    #[test]
    fn guard() {
        assert!(lg_momentum_amplitude(LGIndex::new(9, 0), 1.0, 0.0, 0.0, 1.0).is_err());
    }
}
