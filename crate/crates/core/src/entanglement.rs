//! Two-photon temporal-mode states sent through turbulent channels.
//!
//! States live on the product basis `|f_a>|f_b>`, `a, b < M`, ordered with
//! the first photon major: index `a * M + b`. Each photon is mapped by the
//! one-photon channel tensor of the kernel, so both photons see independent
//! copies of the same channel unless the single-sided switch is set.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{channel_tensor, ChannelKernel};
use crate::error::{Error, Result};
use crate::ipe::hermitian_eigenvalues;

/// Largest single-photon mode count `M` (the channel tensor has `M^4` entries).
pub const MAX_PAIR_MODES: usize = 14;

/// `sum psi_ab |f_a>|f_b>` with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonState {
    modes: usize,
    coeffs: Vec<Complex64>,
}

impl TwoPhotonState {
    /// Wraps row-major `M x M` coefficients, which must have unit norm.
    pub fn new(modes: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_modes(modes)?;
        if coeffs.len() != modes * modes {
            return Err(Error::invalid(
                "coeffs",
                format!("expected {} entries", modes * modes),
            ));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("coeffs", format!("norm^2 is {norm}, not 1")));
        }
        Ok(Self { modes, coeffs })
    }

    /// `(|f_m f_m> + |f_n f_n>) / sqrt 2`, or `|f_m f_m>` when `m == n`.
    pub fn bell(m: usize, n: usize, modes: usize) -> Result<Self> {
        Self::correlated(&[m, n], modes)
    }

    /// Equal superposition of `|f_k f_k>` over distinct `ks`.
    pub fn correlated(ks: &[usize], modes: usize) -> Result<Self> {
        check_modes(modes)?;
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        ks.dedup();
        if ks.is_empty() {
            return Err(Error::invalid("modes", "need at least one mode"));
        }
        let amp = 1.0 / (ks.len() as f64).sqrt();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); modes * modes];
        for &k in &ks {
            if k >= modes {
                return Err(Error::invalid(
                    "modes",
                    format!("mode {k} outside 0..{modes}"),
                ));
            }
            coeffs[k * modes + k] = Complex64::new(amp, 0.0);
        }
        Ok(Self { modes, coeffs })
    }

    /// `|f_a>|f_b>`.
    pub fn product(a: usize, b: usize, modes: usize) -> Result<Self> {
        check_modes(modes)?;
        if a >= modes || b >= modes {
            return Err(Error::invalid("modes", "mode outside basis"));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); modes * modes];
        coeffs[a * modes + b] = Complex64::new(1.0, 0.0);
        Ok(Self { modes, coeffs })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `|psi><psi|`.
    pub fn density(&self) -> TwoPhotonDensity {
        let d = self.coeffs.len();
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in self.coeffs.iter().enumerate() {
                data[i * d + j] = a * b.conj();
            }
        }
        TwoPhotonDensity {
            modes: self.modes,
            data,
        }
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_PAIR_MODES {
        return Err(Error::DimensionGuard {
            dim: modes,
            limit: MAX_PAIR_MODES,
        });
    }
    Ok(())
}

/// Density over the `M^2`-dimensional product basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonDensity {
    modes: usize,
    data: Vec<Complex64>,
}

impl TwoPhotonDensity {
    pub fn from_data(modes: usize, data: Vec<Complex64>) -> Result<Self> {
        check_modes(modes)?;
        let d = modes * modes;
        if data.len() != d * d {
            return Err(Error::InvalidDensity(format!("expected {} entries", d * d)));
        }
        Ok(Self { modes, data })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes * self.modes
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// `<a1 a2| rho |b1 b2>`.
    pub fn get(&self, a1: usize, a2: usize, b1: usize, b2: usize) -> Complex64 {
        let m = self.modes;
        self.data[(a1 * m + a2) * self.dim() + b1 * m + b2]
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.data, self.dim())
    }

    /// Transpose over the second photon.
    pub fn partial_transpose(&self) -> Self {
        let m = self.modes;
        let d = self.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for a1 in 0..m {
            for a2 in 0..m {
                for b1 in 0..m {
                    for b2 in 0..m {
                        data[(a1 * m + b2) * d + b1 * m + a2] =
                            self.data[(a1 * m + a2) * d + b1 * m + b2];
                    }
                }
            }
        }
        Self { modes: m, data }
    }

    fn scaled(mut self, s: f64) -> Self {
        self.data.iter_mut().for_each(|x| *x *= s);
        self
    }
}

/// A propagated pair: the normalized density and the transmitted mass.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutput {
    pub density: TwoPhotonDensity,
    /// Trace before normalization.
    pub mass: f64,
}

/// Sends both photons (or only the first) through independent copies of
/// the kernel's channel and projects onto modes `0..M`.
pub fn propagate_pair(
    state: &TwoPhotonState,
    kernel: &ChannelKernel,
    single_sided: bool,
) -> Result<PairOutput> {
    let m = state.modes();
    let c = channel_tensor(kernel, m)?;
    let rho = state.density();
    let out = apply_pair_tensor(&rho, &c, single_sided);
    let mass = out.trace();
    if mass <= 0.0 {
        return Err(Error::InvalidDensity("no transmitted mass".into()));
    }
    Ok(PairOutput {
        density: out.scaled(1.0 / mass),
        mass,
    })
}

/// `out[u1 u2, v1 v2] = sum C[u1,v1,a1,b1] C[u2,v2,a2,b2] rho[a1 a2, b1 b2]`.
fn apply_pair_tensor(rho: &TwoPhotonDensity, c: &[f64], single_sided: bool) -> TwoPhotonDensity {
    let m = rho.modes();
    let d = m * m;
    let ci = |u: usize, v: usize, a: usize, b: usize| c[((u * m + v) * m + a) * m + b];
    // second photon first: x[a1, b1, u2, v2]
    let mut x = vec![Complex64::new(0.0, 0.0); d * d];
    for a1 in 0..m {
        for b1 in 0..m {
            for u2 in 0..m {
                for v2 in 0..m {
                    let val = if single_sided {
                        rho.get(a1, u2, b1, v2)
                    } else {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for a2 in 0..m {
                            for b2 in 0..m {
                                acc += rho.get(a1, a2, b1, b2) * ci(u2, v2, a2, b2);
                            }
                        }
                        acc
                    };
                    x[((a1 * m + b1) * m + u2) * m + v2] = val;
                }
            }
        }
    }
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    for u1 in 0..m {
        for v1 in 0..m {
            for u2 in 0..m {
                for v2 in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a1 in 0..m {
                        for b1 in 0..m {
                            acc += ci(u1, v1, a1, b1) * x[((a1 * m + b1) * m + u2) * m + v2];
                        }
                    }
                    data[(u1 * m + u2) * d + v1 * m + v2] = acc;
                }
            }
        }
    }
    TwoPhotonDensity { modes: m, data }
}

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose.
pub fn negativity(rho: &TwoPhotonDensity) -> Result<f64> {
    let ev = rho.partial_transpose().eigenvalues()?;
    Ok(ev.iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
}

/// `E_N = log2(2 N + 1)`.
pub fn log_negativity(rho: &TwoPhotonDensity) -> Result<f64> {
    Ok((2.0 * negativity(rho)? + 1.0).log2())
}

/// `<psi| rho |psi>`.
pub fn fidelity_to_input(rho: &TwoPhotonDensity, psi: &TwoPhotonState) -> f64 {
    let d = rho.dim();
    let c = psi.coeffs();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        if c[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..d {
            acc += c[i].conj() * rho.data[i * d + j] * c[j];
        }
    }
    acc.re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub en_initial: f64,
    pub en_final: f64,
    pub fidelity: f64,
    /// `n == m`: the input collapses to a product state.
    pub degenerate: bool,
}

/// Propagates `(|f_m f_m> + |f_n f_n>)/sqrt 2` for each `n` in `0..=n_max`.
pub fn robustness_scan(
    kernel: &ChannelKernel,
    m: usize,
    n_max: usize,
    modes: usize,
    single_sided: bool,
) -> Result<Vec<ScanRow>> {
    if m >= modes || n_max >= modes {
        return Err(Error::invalid(
            "modes",
            "scan modes must lie inside the basis",
        ));
    }
    let c = channel_tensor(kernel, modes)?;
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let psi = TwoPhotonState::bell(m, n, modes)?;
            let rho0 = psi.density();
            let out = apply_pair_tensor(&rho0, &c, single_sided);
            let mass = out.trace();
            let out = out.scaled(1.0 / mass);
            Ok(ScanRow {
                n,
                en_initial: log_negativity(&rho0)?,
                en_final: log_negativity(&out)?,
                fidelity: fidelity_to_input(&out, &psi),
                degenerate: n == m,
            })
        })
        .collect()
}

/// Writes `n,EN_initial,EN_final,fidelity,degenerate_flag` rows.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,EN_initial,EN_final,fidelity,degenerate_flag")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.n, r.en_initial, r.en_final, r.fidelity, r.degenerate as u8
        )?;
    }
    Ok(())
}
