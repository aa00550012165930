use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::coeffs::{c_coefficients, CoeffRow};
use super::{LGIndex, ModeBasis};
use crate::error::Result;
use crate::math::special::gamma_fn;
use crate::schmidt::SPEED_OF_LIGHT;
use crate::turbulence::{big_l_t, l_cross, l_strength, SpectrumParams};

/// `0.033 * 16 pi^4 * 2^{-8/3}`: the von Karman amplitude after the radial
/// integral, printed as 8.1 in the rounded form.
pub const COUPLING_PREFACTOR: f64 = 8.100_032_440_161_131;

/// `-COUPLING_PREFACTOR * Gamma(-5/6)`: the decay rate of the fundamental
/// mode in units of `l(z)`.
pub const PURE_DECAY_CONSTANT: f64 = 54.104_808_223_929_49;

/// Exact coupling prefactor (see [`COUPLING_PREFACTOR`]).
pub fn coupling_prefactor() -> f64 {
    0.033 * 16.0 * PI.powi(4) * 2f64.powf(-8.0 / 3.0)
}

/// Frequencies carried by the two indices of a density-matrix element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequencies {
    /// A single wavelength in metres.
    Single(f64),
    /// Angular frequencies (rad/s) of the row and column indices.
    Pair(f64, f64),
}

impl Frequencies {
    /// Wavelengths (m) of the row and column indices.
    pub fn wavelengths(&self) -> (f64, f64) {
        match *self {
            Frequencies::Single(l) => (l, l),
            Frequencies::Pair(o1, o2) => (
                2.0 * PI * SPEED_OF_LIGHT / o1,
                2.0 * PI * SPEED_OF_LIGHT / o2,
            ),
        }
    }

    /// Normalized distances `t_i = lambda_i z / (pi w0^2)`.
    pub fn normalized_distances(&self, z: f64, w0: f64) -> (f64, f64) {
        let (l1, l2) = self.wavelengths();
        let zr = PI * w0 * w0;
        (l1 * z / zr, l2 * z / zr)
    }

    /// Decay strength `l(z)` for these frequencies.
    pub fn strength(&self, z: f64, cn2: f64, w0: f64) -> f64 {
        match *self {
            Frequencies::Single(l) => l_strength(z, cn2, l, w0),
            Frequencies::Pair(o1, o2) => l_cross(z, o1, o2, cn2, w0),
        }
    }
}

/// `g_J = 2^{-J/2} Gamma(J/2 - 5/6)` for `J = 0..=j_max`.
pub(crate) fn gamma_weights(j_max: usize) -> Result<Vec<f64>> {
    (0..=j_max)
        .map(|j| Ok(2f64.powf(-(j as f64) / 2.0) * gamma_fn(j as f64 / 2.0 - 5.0 / 6.0)?))
        .collect()
}

/// `sum_{j1,j2} g_{j1+j2} s1^{j1} s2^{j2} c1_{j1} conj(c2_{j2})` where
/// `s_i = (a_i / a_bar)^{1/2}`.
fn gamma_sum(c1: &[Complex64], c2: &[Complex64], s1: f64, s2: f64, g: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut p1 = 1.0;
    for (j1, a) in c1.iter().enumerate() {
        let mut inner = Complex64::new(0.0, 0.0);
        let mut p2 = 1.0;
        for (j2, b) in c2.iter().enumerate() {
            inner += b.conj() * (g[j1 + j2] * p2);
            p2 *= s2;
        }
        acc += a * inner * p1;
        p1 *= s1;
    }
    acc
}

fn ratios(t1: f64, t2: f64) -> (f64, f64) {
    let a1 = 1.0 + t1 * t1;
    let a2 = 1.0 + t2 * t2;
    let abar = 0.5 * (a1 + a2);
    ((a1 / abar).sqrt(), (a2 / abar).sqrt())
}

/// Turbulence coupling `L_{m,n,u,v}(z)` in the limit of an infinite outer
/// scale.
///
/// Returns the finite part `L - delta_mu delta_nv L_T`; pass `spectrum` to
/// add the (outer-scale dependent) `L_T` term back.
#[allow(clippy::too_many_arguments)]
pub fn coupling_l(
    m: LGIndex,
    n: LGIndex,
    u: LGIndex,
    v: LGIndex,
    z: f64,
    cn2: f64,
    w0: f64,
    freq: Frequencies,
    spectrum: Option<&SpectrumParams>,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    if m.l - u.l == n.l - v.l {
        let (t1, t2) = freq.normalized_distances(z, w0);
        let row1 = c_coefficients(m, u, t1)?;
        let row2 = c_coefficients(n, v, t2)?;
        let g = gamma_weights(row1.max_j() + row2.max_j())?;
        let (s1, s2) = ratios(t1, t2);
        let sum = gamma_sum(row1.coeffs(), row2.coeffs(), s1, s2, &g);
        total += sum * (COUPLING_PREFACTOR * freq.strength(z, cn2, w0));
    }
    if let Some(sp) = spectrum {
        if m == u && n == v {
            let (l1, l2) = freq.wavelengths();
            total += big_l_t(l1, l2, cn2, sp);
        }
    }
    Ok(total)
}

/// Free-space coupling `S_{m,n} = (i/2k) <m|K^2|n>` for Rayleigh range `z_r`.
///
/// Nonzero only for equal `l` and radial indices differing by at most one:
/// `i(1+|l|+2r)/2z_R` on the diagonal and `i((1+|l|+r)(1+r))^{1/2}/2z_R`
/// for `r = min(r_m, r_n)` off it. Purely imaginary.
pub fn free_prop_s(m: LGIndex, n: LGIndex, z_r: f64) -> Complex64 {
    if m.l != n.l {
        return Complex64::new(0.0, 0.0);
    }
    let al = m.abs_l() as f64;
    if m.r == n.r {
        return Complex64::new(0.0, (1.0 + al + 2.0 * m.r as f64) / (2.0 * z_r));
    }
    if m.r.abs_diff(n.r) == 1 {
        let r = m.r.min(n.r) as f64;
        return Complex64::new(0.0, ((1.0 + al + r) * (1.0 + r)).sqrt() / (2.0 * z_r));
    }
    Complex64::new(0.0, 0.0)
}

/// One stored tensor element `L_{m,n,u,v}` with basis positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEntry {
    pub m: u32,
    pub n: u32,
    pub u: u32,
    pub v: u32,
    pub value: Complex64,
}

/// Pairs `(m, u)` sharing `l_m - l_u`, with their `t = 0` coefficient rows.
#[derive(Debug, Clone)]
struct PairGroup {
    pairs: Vec<(u32, u32)>,
    rows: Vec<CoeffRow>,
    // Gouy order difference N_m - N_u
    orders: Vec<i32>,
}

/// Selection-rule structure of the coupling tensor on a basis plus the
/// `t = 0` coefficient rows, from which the tensor at any distance and
/// frequency pair is assembled.
#[derive(Debug, Clone)]
pub struct CouplingStructure {
    basis: ModeBasis,
    groups: Vec<PairGroup>,
    gamma: Vec<f64>,
    nnz: usize,
}

impl CouplingStructure {
    pub fn new(basis: &ModeBasis) -> Result<Self> {
        let modes = basis.modes();
        let n = basis.cutoff() as i32;
        let mut groups = Vec::new();
        let mut max_j = 0;
        for dl in -2 * n..=2 * n {
            let mut pairs = Vec::new();
            for (i, m) in modes.iter().enumerate() {
                for (k, u) in modes.iter().enumerate() {
                    if m.l - u.l == dl {
                        pairs.push((i as u32, k as u32));
                    }
                }
            }
            let rows: Vec<CoeffRow> = pairs
                .par_iter()
                .map(|&(i, k)| c_coefficients(modes[i as usize], modes[k as usize], 0.0))
                .collect::<Result<_>>()?;
            for r in &rows {
                max_j = max_j.max(r.max_j());
            }
            let orders = pairs
                .iter()
                .map(|&(i, k)| modes[i as usize].order() as i32 - modes[k as usize].order() as i32)
                .collect();
            groups.push(PairGroup {
                pairs,
                rows,
                orders,
            });
        }
        let nnz = groups.iter().map(|g| g.pairs.len() * g.pairs.len()).sum();
        Ok(Self {
            basis: basis.clone(),
            groups,
            gamma: gamma_weights(2 * max_j)?,
            nnz,
        })
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    /// Number of selection-rule-allowed entries.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// Index quadruples `(m, n, u, v)` in storage order.
    pub fn indices(&self) -> Vec<[u32; 4]> {
        let mut out = Vec::with_capacity(self.nnz);
        for g in &self.groups {
            for &(m, u) in &g.pairs {
                for &(n, v) in &g.pairs {
                    out.push([m, n, u, v]);
                }
            }
        }
        out
    }

    /// Gouy phase index `N_m - N_u - N_n + N_v` per entry, in storage order.
    pub fn phase_indices(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity(self.nnz);
        for g in &self.groups {
            for &q1 in &g.orders {
                for &q2 in &g.orders {
                    out.push(q1 - q2);
                }
            }
        }
        out
    }

    /// Finite-part values per unit strength, `L~ / l(z)`, at normalized
    /// distances `t1` (row index) and `t2` (column index), in storage order.
    pub fn unit_values(&self, t1: f64, t2: f64) -> Vec<Complex64> {
        let (s1, s2) = ratios(t1, t2);
        let (psi1, psi2) = (t1.atan(), t2.atan());
        let hermitian = t1 == t2;
        let mut out = Vec::with_capacity(self.nnz);
        for g in &self.groups {
            let np = g.pairs.len();
            // h_{p, j1} = sum_{j2} g_{j1+j2} s2^{j2} conj(c_{p, j2})
            let hs: Vec<Vec<Complex64>> = g
                .rows
                .iter()
                .map(|row| {
                    let len = self.gamma.len() - row.max_j();
                    (0..len)
                        .map(|j1| {
                            let mut acc = Complex64::new(0.0, 0.0);
                            let mut p2 = 1.0;
                            for (j2, c) in row.coeffs().iter().enumerate() {
                                acc += c.conj() * (self.gamma[j1 + j2] * p2);
                                p2 *= s2;
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
            let ph1: Vec<Complex64> = g
                .orders
                .iter()
                .map(|&q| Complex64::from_polar(COUPLING_PREFACTOR, psi1 * q as f64))
                .collect();
            let ph2: Vec<Complex64> = g
                .orders
                .iter()
                .map(|&q| Complex64::from_polar(1.0, -psi2 * q as f64))
                .collect();
            let block: Vec<Complex64> = (0..np * np)
                .into_par_iter()
                .map(|k| {
                    let (a, b) = (k / np, k % np);
                    let row = &g.rows[a];
                    let h = &hs[b];
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut p1 = 1.0;
                    for (j1, c) in row.coeffs().iter().enumerate() {
                        acc += c * h[j1] * p1;
                        p1 *= s1;
                    }
                    acc * (ph1[a] * ph2[b])
                })
                .collect();
            let start = out.len();
            out.extend(block);
            if hermitian {
                // enforce L_{m,n,u,v} = conj(L_{n,m,v,u}) bit-exactly
                let blk = &mut out[start..];
                for a in 0..np {
                    blk[a * np + a].im = 0.0;
                    for b in a + 1..np {
                        blk[b * np + a] = blk[a * np + b].conj();
                    }
                }
            }
        }
        out
    }
}

/// The assembled coupling tensor at one distance.
#[derive(Debug, Clone)]
pub struct CouplingTensor {
    basis: ModeBasis,
    entries: Vec<TensorEntry>,
    l_t: Option<f64>,
    z: f64,
    strength: f64,
}

impl CouplingTensor {
    /// Assembles every selection-rule-allowed entry at distance `z`.
    pub fn assemble(
        basis: &ModeBasis,
        z: f64,
        cn2: f64,
        w0: f64,
        freq: Frequencies,
        spectrum: Option<&SpectrumParams>,
    ) -> Result<Self> {
        let structure = CouplingStructure::new(basis)?;
        Self::from_structure(&structure, z, cn2, w0, freq, spectrum)
    }

    pub fn from_structure(
        structure: &CouplingStructure,
        z: f64,
        cn2: f64,
        w0: f64,
        freq: Frequencies,
        spectrum: Option<&SpectrumParams>,
    ) -> Result<Self> {
        let (t1, t2) = freq.normalized_distances(z, w0);
        let strength = freq.strength(z, cn2, w0);
        let values = structure.unit_values(t1, t2);
        let entries = structure
            .indices()
            .into_iter()
            .zip(values)
            .map(|([m, n, u, v], val)| TensorEntry {
                m,
                n,
                u,
                v,
                value: val * strength,
            })
            .collect();
        let l_t = spectrum.map(|sp| {
            let (l1, l2) = freq.wavelengths();
            big_l_t(l1, l2, cn2, sp)
        });
        Ok(Self {
            basis: structure.basis.clone(),
            entries,
            l_t,
            z,
            strength,
        })
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    /// Finite-part entries (without the `L_T` term).
    pub fn entries(&self) -> &[TensorEntry] {
        &self.entries
    }

    pub fn l_t(&self) -> Option<f64> {
        self.l_t
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// `l(z)` used to scale the entries.
    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// `L_{m,n,u,v}` including the `L_T` term when a spectrum was given.
    pub fn get(&self, m: LGIndex, n: LGIndex, u: LGIndex, v: LGIndex) -> Result<Complex64> {
        let b = &self.basis;
        let key = [
            b.position(m)?,
            b.position(n)?,
            b.position(u)?,
            b.position(v)?,
        ]
        .map(|x| x as u32);
        let mut val = self
            .entries
            .iter()
            .find(|e| [e.m, e.n, e.u, e.v] == key)
            .map(|e| e.value)
            .unwrap_or_default();
        if m == u && n == v {
            val += self.l_t.unwrap_or(0.0);
        }
        Ok(val)
    }

    /// Writes `lm,rm,ln,rn,lu,ru,lv,rv,re_per_m,im_per_m` rows (finite part, plus
    /// `L_T` on the diagonal when known).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "lm,rm,ln,rn,lu,ru,lv,rv,re_per_m,im_per_m")?;
        let modes = self.basis.modes();
        for e in &self.entries {
            let (m, n, u, v) = (
                modes[e.m as usize],
                modes[e.n as usize],
                modes[e.u as usize],
                modes[e.v as usize],
            );
            let mut val = e.value;
            if e.m == e.u && e.n == e.v {
                val += self.l_t.unwrap_or(0.0);
            }
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{:.12e},{:.12e}",
                m.l, m.r, n.l, n.r, u.l, u.r, v.l, v.r, val.re, val.im
            )?;
        }
        Ok(())
    }
}
