//! Refractive-index turbulence along a horizontal link over a curved Earth.
//!
//! Provides the von Karman spectrum, the scalar decay strengths `l(z)` that
//! set the pure-decay rate of the fundamental Gaussian beam, their
//! two-frequency generalization, and path-integrated exponents.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::math::quadrature::{integrate_adaptive, AdaptiveOptions};
use crate::schmidt::SPEED_OF_LIGHT;

pub const EARTH_RADIUS: f64 = 6.371e6;
pub const CN2_MIN: f64 = 1e-19;
pub const CN2_MAX: f64 = 1e-11;

/// `0.033 (2 pi)^3`, the von Karman amplitude.
pub const VON_KARMAN_AMPLITUDE: f64 = 0.033 * 8.0 * PI * PI * PI;

/// `L_T lambda^2 kappa_0^{5/3} / C_n^2 = 0.6 * 0.033 * (2 pi)^4 ≈ 30.86`.
pub const LT_CONSTANT: f64 = 0.6 * 0.033 * 16.0 * PI * PI * PI * PI;

/// Geometry of a horizontal link and the transmitted beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    path_length: f64,
    transmitter_height: f64,
    receiver_height: f64,
    earth_radius: f64,
    waist: f64,
    wavelength: f64,
}

impl LinkGeometry {
    pub fn new(
        path_length: f64,
        transmitter_height: f64,
        receiver_height: f64,
        waist: f64,
        wavelength: f64,
    ) -> Result<Self> {
        Self::with_earth_radius(
            path_length,
            transmitter_height,
            receiver_height,
            waist,
            wavelength,
            EARTH_RADIUS,
        )
    }

    pub fn with_earth_radius(
        path_length: f64,
        transmitter_height: f64,
        receiver_height: f64,
        waist: f64,
        wavelength: f64,
        earth_radius: f64,
    ) -> Result<Self> {
        let checks = [
            ("path_length", path_length),
            ("transmitter_height", transmitter_height),
            ("receiver_height", receiver_height),
            ("waist", waist),
            ("wavelength", wavelength),
            ("earth_radius", earth_radius),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self {
            path_length,
            transmitter_height,
            receiver_height,
            earth_radius,
            waist,
            wavelength,
        })
    }

    /// The 30 km, 19 m / 19 m link at 3.95 um with the given waist.
    pub fn coastal_link(waist: f64) -> Self {
        Self::new(30e3, 19.0, 19.0, waist, 3.95e-6).expect("valid defaults")
    }

    pub fn path_length(&self) -> f64 {
        self.path_length
    }

    pub fn transmitter_height(&self) -> f64 {
        self.transmitter_height
    }

    pub fn receiver_height(&self) -> f64 {
        self.receiver_height
    }

    pub fn earth_radius(&self) -> f64 {
        self.earth_radius
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn with_waist(mut self, waist: f64) -> Result<Self> {
        if !(waist.is_finite() && waist > 0.0) {
            return Err(Error::invalid("waist", "must be positive"));
        }
        self.waist = waist;
        Ok(self)
    }

    pub fn with_path_length(mut self, path_length: f64) -> Result<Self> {
        if !(path_length.is_finite() && path_length > 0.0) {
            return Err(Error::invalid("path_length", "must be positive"));
        }
        self.path_length = path_length;
        Ok(self)
    }

    /// Rayleigh range `pi w0^2 / lambda`.
    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    fn check_z(&self, z: f64) -> Result<()> {
        if !(0.0..=self.path_length).contains(&z) {
            return Err(Error::OutsidePath {
                z,
                path_length: self.path_length,
            });
        }
        Ok(())
    }
}

/// Height above the sea surface of the straight line of sight at distance
/// `z` from the transmitter. `z` is measured along the ground arc.
pub fn path_height(geom: &LinkGeometry, z: f64) -> Result<f64> {
    geom.check_z(z)?;
    let r = geom.earth_radius;
    let theta = geom.path_length / r;
    let (ra, rb) = (r + geom.transmitter_height, r + geom.receiver_height);
    let a = (0.0, ra);
    let b = (rb * theta.sin(), rb * theta.cos());
    // parametrize the chord by the central angle of the ground point
    let phi = z / r;
    let (s, c) = phi.sin_cos();
    // intersection of the ray at angle phi with the chord a + t (b - a)
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let denom = s * dy - c * dx;
    let t = -(s * a.1 - c * a.0) / denom;
    let px = a.0 + t * dx;
    let py = a.1 + t * dy;
    Ok((px * px + py * py).sqrt() - r)
}

/// A refractive-index structure constant profile.
#[derive(Debug, Clone, PartialEq)]
pub enum TurbulenceProfile {
    Constant(f64),
    /// `(height_m, cn2)` rows with strictly increasing heights.
    Tabulated(Vec<(f64, f64)>),
}

fn check_cn2(v: f64) -> Result<()> {
    if !(CN2_MIN..=CN2_MAX).contains(&v) {
        return Err(Error::invalid(
            "cn2",
            format!("{v:e} is outside [{CN2_MIN:e}, {CN2_MAX:e}]"),
        ));
    }
    Ok(())
}

impl TurbulenceProfile {
    pub fn constant(cn2: f64) -> Result<Self> {
        check_cn2(cn2)?;
        Ok(Self::Constant(cn2))
    }

    pub fn tabulated(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::EmptyProfile);
        }
        if rows[0].0 <= 0.0 {
            return Err(Error::invalid("profile", "heights must be positive"));
        }
        for w in rows.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid(
                    "profile",
                    "heights must be strictly increasing",
                ));
            }
        }
        for &(_, v) in &rows {
            check_cn2(v)?;
        }
        Ok(Self::Tabulated(rows))
    }

    /// Reads a `height_m,cn2` CSV table with a header row.
    pub fn from_csv_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text, path)
    }

    pub fn from_csv_str(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, reason: String| Error::ProfileParse {
            path: PathBuf::from(origin),
            line,
            reason,
        };
        let mut rows = Vec::new();
        let mut saw_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !saw_header {
                saw_header = true;
                let cols: Vec<_> = trimmed.split(',').map(str::trim).collect();
                if cols != ["height_m", "cn2"] {
                    return Err(err(
                        line,
                        format!("expected header `height_m,cn2`, found `{trimmed}`"),
                    ));
                }
                continue;
            }
            let cols: Vec<_> = trimmed.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(err(
                    line,
                    format!("expected 2 columns, found {}", cols.len()),
                ));
            }
            let h: f64 = cols[0]
                .parse()
                .map_err(|_| err(line, format!("bad height `{}`", cols[0])))?;
            let v: f64 = cols[1]
                .parse()
                .map_err(|_| err(line, format!("bad cn2 `{}`", cols[1])))?;
            if !(CN2_MIN..=CN2_MAX).contains(&v) {
                return Err(err(
                    line,
                    format!("cn2 {v:e} outside [{CN2_MIN:e}, {CN2_MAX:e}]"),
                ));
            }
            if !(h > 0.0) {
                return Err(err(line, format!("height {h} must be positive")));
            }
            if let Some(&(prev, _)) = rows.last() {
                if h <= prev {
                    return Err(err(line, "heights must be strictly increasing".into()));
                }
            }
            rows.push((h, v));
        }
        if rows.len() < 2 {
            return Err(Error::EmptyProfile);
        }
        Ok(Self::Tabulated(rows))
    }

    /// `C_n^2` at height `h`, interpolating `log C_n^2` linearly in
    /// `log h` (a power law between rows) and clamping beyond the table.
    pub fn at_height(&self, h: f64) -> Result<f64> {
        match self {
            Self::Constant(v) => Ok(*v),
            Self::Tabulated(rows) => {
                if rows.is_empty() {
                    return Err(Error::EmptyProfile);
                }
                let first = rows[0];
                let last = rows[rows.len() - 1];
                if h <= first.0 {
                    return Ok(first.1);
                }
                if h >= last.0 {
                    return Ok(last.1);
                }
                let k = rows.partition_point(|r| r.0 <= h);
                let (h0, v0) = rows[k - 1];
                let (h1, v1) = rows[k];
                let t = (h / h0).ln() / (h1 / h0).ln();
                Ok((v0.ln() * (1.0 - t) + v1.ln() * t).exp())
            }
        }
    }

    /// Largest `C_n^2` value present in the profile.
    pub fn max_cn2(&self) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Tabulated(rows) => rows.iter().map(|r| r.1).fold(0.0, f64::max),
        }
    }
}

/// `C_n^2` at distance `z` along the link.
pub fn cn2_at(profile: &TurbulenceProfile, geom: &LinkGeometry, z: f64) -> Result<f64> {
    match profile {
        TurbulenceProfile::Constant(v) => {
            geom.check_z(z)?;
            Ok(*v)
        }
        TurbulenceProfile::Tabulated(_) => profile.at_height(path_height(geom, z)?),
    }
}

/// Outer-scale wavenumber of the von Karman spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumParams {
    kappa_0: f64,
}

impl SpectrumParams {
    pub fn new(kappa_0: f64) -> Result<Self> {
        if !(kappa_0.is_finite() && kappa_0 > 0.0) {
            return Err(Error::invalid("kappa_0", "must be positive"));
        }
        Ok(Self { kappa_0 })
    }

    pub fn kappa_0(&self) -> f64 {
        self.kappa_0
    }
}

/// `0.033 (2 pi)^3 C_n^2 / (K^2 + kappa_0^2)^{11/6}`.
pub fn vonkarman_psd(k: f64, cn2: f64, sp: &SpectrumParams) -> f64 {
    let k0 = sp.kappa_0;
    VON_KARMAN_AMPLITUDE * cn2 * (k * k + k0 * k0).powf(-11.0 / 6.0)
}

/// Zero-separation structure term `k1 k2 int Phi d^2K / 4 pi^2` in 1/m.
pub fn big_l_t(lambda1: f64, lambda2: f64, cn2: f64, sp: &SpectrumParams) -> f64 {
    LT_CONSTANT * cn2 / (lambda1 * lambda2) * sp.kappa_0.powf(-5.0 / 3.0)
}

/// Decay density `C_n^2 lambda^{-2} w0^{5/3} (1 + (lambda z / pi w0^2)^2)^{5/6}`.
pub fn l_strength(z: f64, cn2: f64, lambda: f64, w0: f64) -> f64 {
    let t = lambda * z / (PI * w0 * w0);
    cn2 / (lambda * lambda) * w0.powf(5.0 / 3.0) * (1.0 + t * t).powf(5.0 / 6.0)
}

/// Two-frequency decay density, reducing to [`l_strength`] when `w1 = w2`.
pub fn l_cross(z: f64, omega1: f64, omega2: f64, cn2: f64, w0: f64) -> f64 {
    let l1 = 2.0 * PI * SPEED_OF_LIGHT / omega1;
    let l2 = 2.0 * PI * SPEED_OF_LIGHT / omega2;
    let zr = PI * w0 * w0;
    let t1 = l1 * z / zr;
    let t2 = l2 * z / zr;
    cn2 / (l1 * l2) * w0.powf(5.0 / 3.0) * (1.0 + 0.5 * t1 * t1 + 0.5 * t2 * t2).powf(5.0 / 6.0)
}

/// Fried parameter `r0 = 0.185 (lambda^2 / (C_n^2 z))^{3/5}`.
pub fn fried_parameter(lambda: f64, cn2: f64, z: f64) -> f64 {
    0.185 * (lambda * lambda / (cn2 * z)).powf(0.6)
}

/// What the decay density is evaluated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayMode {
    /// A single wavelength (m).
    Single(f64),
    /// A frequency pair (rad/s).
    Cross(f64, f64),
}

/// `int_0^{z_f} l(z) dz` with `C_n^2(z)` taken from the profile.
pub fn integrated_l(
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    mode: DecayMode,
) -> Result<f64> {
    integrated_l_to(profile, geom, mode, geom.path_length())
}

/// Same as [`integrated_l`] but stopping at `z_end <= z_f`.
pub fn integrated_l_to(
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    mode: DecayMode,
    z_end: f64,
) -> Result<f64> {
    geom.check_z(z_end)?;
    let w0 = geom.waist();
    let density = |z: f64, cn2: f64| match mode {
        DecayMode::Single(lambda) => l_strength(z, cn2, lambda, w0),
        DecayMode::Cross(o1, o2) => l_cross(z, o1, o2, cn2, w0),
    };
    let opts = AdaptiveOptions {
        rel_tol: 1e-8,
        abs_tol: 0.0,
        max_intervals: 4000,
    };
    match profile {
        TurbulenceProfile::Constant(cn2) => {
            integrate_adaptive(|z| density(z, *cn2), 0.0, z_end, opts)
        }
        TurbulenceProfile::Tabulated(_) => {
            let mut failure = None;
            let v = integrate_adaptive(
                |z| match cn2_at(profile, geom, z) {
                    Ok(c) => density(z, c),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                0.0,
                z_end,
                opts,
            )?;
            match failure {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
    }
}

/// Transmission `exp(-alpha z)` for an extinction coefficient in 1/km.
pub fn extinction_factor(alpha_per_km: f64, z: f64) -> f64 {
    (-alpha_per_km * z / 1e3).exp()
}

/// Waist that minimizes `l(z)` at fixed `z`: `(lambda z / pi)^{1/2}`.
pub fn optimal_waist(lambda: f64, z: f64) -> f64 {
    (lambda * z / PI).sqrt()
}
