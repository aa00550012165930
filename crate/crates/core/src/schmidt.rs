//! Double-Gaussian biphoton source and its Schmidt decomposition.
//!
//! All bandwidths and frequencies are angular (rad/s). The joint spectral
//! amplitude `exp(-(w1+w2-wp)^2/2sa^2 - (w1-w2)^2/2sb^2)` factorizes into
//! Hermite-Gaussian modes `f_n` centred at `wp/2` with weights `lambda_n`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::special::{hermite_functions, MAX_HERMITE_ORDER};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Highest eigenvalue index accepted by [`schmidt_eigenvalue`].
pub const MAX_EIGEN_INDEX: usize = 200;

/// Pump coherence and phase-matching bandwidths plus the pump frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiphotonSpec {
    sigma_a: f64,
    sigma_b: f64,
    omega_p: f64,
}

impl BiphotonSpec {
    pub fn new(sigma_a: f64, sigma_b: f64, omega_p: f64) -> Result<Self> {
        for (name, v) in [
            ("sigma_a", sigma_a),
            ("sigma_b", sigma_b),
            ("omega_p", omega_p),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self {
            sigma_a,
            sigma_b,
            omega_p,
        })
    }

    /// Degenerate source whose signal and idler are centred on `wavelength`
    /// (m), so that `omega_p / 2 = 2 pi c / wavelength`.
    pub fn at_wavelength(sigma_a: f64, sigma_b: f64, wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid("wavelength", "must be positive"));
        }
        Self::new(sigma_a, sigma_b, 4.0 * PI * SPEED_OF_LIGHT / wavelength)
    }

    /// The default mid-infrared source: 10 and 80 (x 1e12 rad/s) at 3.95 um.
    pub fn mid_infrared() -> Self {
        Self::at_wavelength(10e12, 80e12, 3.95e-6).expect("valid defaults")
    }

    pub fn sigma_a(&self) -> f64 {
        self.sigma_a
    }

    pub fn sigma_b(&self) -> f64 {
        self.sigma_b
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    /// Degenerate centre frequency `omega_p / 2`.
    pub fn omega_center(&self) -> f64 {
        0.5 * self.omega_p
    }

    /// `b = 2 / (sigma_a sigma_b)`, in s^2.
    pub fn b(&self) -> f64 {
        2.0 / (self.sigma_a * self.sigma_b)
    }

    /// Frequency corresponding to a dimensionless Hermite coordinate `x`.
    pub fn omega_at(&self, x: f64) -> f64 {
        self.omega_center() + x / self.b().sqrt()
    }

    /// Wavelength of angular frequency `omega`.
    pub fn wavelength_of(omega: f64) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / omega
    }

    /// `((sigma_a - sigma_b) / (sigma_a + sigma_b))^2`, the eigenvalue ratio.
    pub fn eigen_ratio(&self) -> f64 {
        let q = (self.sigma_a - self.sigma_b) / (self.sigma_a + self.sigma_b);
        q * q
    }
}

/// `lambda_n = 4 sa sb (sa - sb)^{2n} / (sa + sb)^{2(n+1)}`.
pub fn schmidt_eigenvalue(spec: &BiphotonSpec, n: usize) -> Result<f64> {
    if n > MAX_EIGEN_INDEX {
        return Err(Error::UnsupportedOrder {
            order: n,
            min: 0,
            max: MAX_EIGEN_INDEX,
        });
    }
    let (a, b) = (spec.sigma_a, spec.sigma_b);
    let lead = 4.0 * a * b / ((a + b) * (a + b));
    Ok(lead * spec.eigen_ratio().powi(n as i32))
}

/// Schmidt number `K = (sa^2 + sb^2) / (2 sa sb)`.
pub fn schmidt_number(spec: &BiphotonSpec) -> f64 {
    let (a, b) = (spec.sigma_a, spec.sigma_b);
    (a * a + b * b) / (2.0 * a * b)
}

/// Schmidt mode `f_n(omega)`, normalized so that `int f_m f_n d omega = delta_mn`.
pub fn mode_amplitude(spec: &BiphotonSpec, n: usize, omega: f64) -> Result<f64> {
    if n > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order: n,
            min: 0,
            max: MAX_HERMITE_ORDER,
        });
    }
    let b = spec.b();
    let x = b.sqrt() * (omega - spec.omega_center());
    // hermite_functions already carries pi^{-1/4} (2^n n!)^{-1/2}
    Ok(b.powf(0.25) * (-0.5 * x * x).exp() * hermite_functions(n, x)[n])
}

/// The source state truncated to modes `0..=N` and renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSource {
    spec: BiphotonSpec,
    max_mode: usize,
    weights: Vec<f64>,
    discarded_mass: f64,
}

impl TruncatedSource {
    pub fn spec(&self) -> &BiphotonSpec {
        &self.spec
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// Rescaled amplitudes `c sqrt(lambda_n)`; their squares sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Probability mass `1 - sum_{n<=N} lambda_n` removed by the truncation.
    pub fn discarded_mass(&self) -> f64 {
        self.discarded_mass
    }

    /// Amplitude normalization constant `(sum_{n<=N} lambda_n)^{-1/2}`.
    pub fn prefactor(&self) -> f64 {
        (1.0 - self.discarded_mass).powf(-0.5)
    }
}

pub fn truncated_source(spec: &BiphotonSpec, max_mode: usize) -> Result<TruncatedSource> {
    if max_mode > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder {
            order: max_mode,
            min: 0,
            max: MAX_HERMITE_ORDER,
        });
    }
    let lambdas = (0..=max_mode)
        .map(|n| schmidt_eigenvalue(spec, n))
        .collect::<Result<Vec<_>>>()?;
    // the kept mass is a finite geometric sum, so the complement is exact:
    // 1 - sum_{n<=N} lambda_n = q^{N+1}
    let discarded_mass = spec.eigen_ratio().powi(max_mode as i32 + 1);
    let kept: f64 = lambdas.iter().sum();
    let weights = lambdas.iter().map(|l| (l / kept).sqrt()).collect();
    Ok(TruncatedSource {
        spec: *spec,
        max_mode,
        weights,
        discarded_mass,
    })
}
