//! Real special functions: Hermite polynomials, Hermite functions, Gamma.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest Hermite order accepted by [`hermite_poly`] and [`hermite_function`].
pub const MAX_HERMITE_ORDER: usize = 64;

/// Arguments of [`gamma_fn`] are limited to `|x| <= GAMMA_ARG_LIMIT`.
pub const GAMMA_ARG_LIMIT: f64 = 50.0;

const POLE_DISTANCE: f64 = 1e-9;

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence
/// `H_{n+1} = 2x H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            min: 0,
            max: MAX_HERMITE_ORDER,
        });
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Orthonormal Hermite function without its Gaussian factor:
/// `pi^{-1/4} (2^n n!)^{-1/2} H_n(x)`.
///
/// Evaluated with the normalized recurrence so that large `n` does not
/// overflow; multiply by `exp(-x^2/2)` to get the full Hermite function.
pub fn hermite_function(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            min: 0,
            max: MAX_HERMITE_ORDER,
        });
    }
    Ok(hermite_functions(n, x)[n])
}

/// All normalized Hermite values `0..=n_max` at `x` (see [`hermite_function`]).
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let h0 = PI.powf(-0.25);
    out.push(h0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * h0);
    for k in 2..=n_max {
        let kf = k as f64;
        let next = (2.0 / kf).sqrt() * x * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(next);
    }
    out
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_gamma(x: f64) -> f64 {
    // valid for x >= 0.5
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Gamma function for real arguments, `|x| <= 50`, away from the poles.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > GAMMA_ARG_LIMIT {
        return Err(Error::Domain {
            what: "gamma",
            value: x,
        });
    }
    if x <= 0.0 && (x - x.round()).abs() < POLE_DISTANCE {
        return Err(Error::Domain {
            what: "gamma",
            value: x,
        });
    }
    if x < 0.5 {
        // reflection
        Ok(PI / ((PI * x).sin() * lanczos_gamma(1.0 - x)))
    } else {
        Ok(lanczos_gamma(x))
    }
}

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Generalized Laguerre polynomial `L_n^alpha(x)` by recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite_poly(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_poly(2, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn hermite_five_matches_monomials() {
        // H_5 = 32x^5 - 160x^3 + 120x
        let x: f64 = 0.5;
        let direct = 32.0 * x.powi(5) - 160.0 * x.powi(3) + 120.0 * x;
        assert!((hermite_poly(5, x).unwrap() - direct).abs() < 1e-12);
        assert!((direct - 41.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_guard() {
        assert!(hermite_poly(64, 0.1).is_ok());
        assert!(matches!(
            hermite_poly(65, 0.1),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn hermite_functions_match_polynomials() {
        for n in 0..20 {
            for &x in &[-2.5, -0.3, 0.0, 1.1, 3.9] {
                let norm = PI.powf(-0.25) / (2f64.powi(n as i32) * factorial(n)).sqrt();
                let want = norm * hermite_poly(n, x).unwrap();
                let got = hermite_function(n, x).unwrap();
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        let big = gamma_fn(21.0).unwrap();
        assert!((big / factorial(20) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_reflection_value() {
        // Gamma(-5/6) = pi / (sin(-5pi/6) Gamma(11/6)), with Gamma(11/6) = (5/6) Gamma(5/6)
        let g = gamma_fn(-5.0 / 6.0).unwrap();
        assert!((g - -6.679_579_202_136_282).abs() < 1e-12, "{g}");
    }

    #[test]
    fn gamma_poles_rejected() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
        assert!(gamma_fn(-3.0 + 1e-10).is_err());
        assert!(gamma_fn(60.0).is_err());
        assert!(gamma_fn(-2.5).is_ok());
    }

    #[test]
    fn laguerre_small() {
        // L_2^1(x) = (x^2 - 6x + 6)/2
        let x = 0.7;
        assert!((laguerre(2, 1.0, x) - (x * x - 6.0 * x + 6.0) / 2.0).abs() < 1e-14);
    }
}
