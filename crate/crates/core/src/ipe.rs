//! Integration of the truncated turbulence master equation for the LG-mode
//! density matrix.
//!
//! Two truncations of the same infinite system are offered. The direct one
//! keeps `d rho_uv = sum L_{mnuv} rho_mn - L_T rho_uv` restricted to the
//! basis; the Lindblad one replaces the `L_T` counter term by the
//! anticommutator with the basis-restricted `Gamma`. Both agree in the
//! untruncated limit and bracket the fundamental-mode probability from
//! below and above. `L_T` cancels identically in both, so only the finite
//! part of the coupling tensor enters.
//!
//! With `L_{mnuv}` pairing `W_{mu} W*_{nv}`, the jump operator is `V = W^T`
//! and `Gamma = V^dagger V` has entries `Gamma_nm = sum_u L_{mnuu}`. This
//! makes the truncated Lindblad map trace preserving and completely positive
//! for every cutoff.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lg::{CouplingStructure, Frequencies, LGIndex, ModeBasis, PURE_DECAY_CONSTANT};
use crate::turbulence::{cn2_at, integrated_l_to, DecayMode, LinkGeometry, TurbulenceProfile};

/// Largest vectorized dimension `D^2` accepted by the solver (`N <= 5`).
pub const MAX_VECTORIZED_DIM: usize = 8192;

pub const MIN_STEPS: usize = 16;

/// Trace agreement demanded between `steps` and `2 * steps` integrations.
pub const STEP_DOUBLING_TOL: f64 = 1e-8;

/// A density matrix over an LG basis, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: ModeBasis,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|m><m|`.
    pub fn pure(basis: &ModeBasis, mode: LGIndex) -> Result<Self> {
        let d = basis.len();
        let p = basis.position(mode)?;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        data[p * d + p] = Complex64::new(1.0, 0.0);
        Ok(Self {
            basis: basis.clone(),
            data,
        })
    }

    /// Wraps row-major data of size `D x D`.
    pub fn from_data(basis: &ModeBasis, data: Vec<Complex64>) -> Result<Self> {
        let d = basis.len();
        if data.len() != d * d {
            return Err(Error::InvalidDensity(format!(
                "expected {} entries, got {}",
                d * d,
                data.len()
            )));
        }
        Ok(Self {
            basis: basis.clone(),
            data,
        })
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.data[u * self.dim() + v]
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// `max |rho - rho^dagger|`.
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

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.data, self.dim())
    }

    /// Checks Hermiticity (1e-12), positivity (-1e-9) and trace (<= 1 + 1e-9).
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12 {
            return Err(Error::InvalidDensity(format!("not Hermitian: {herm:e}")));
        }
        let tr = self.trace();
        if tr.re > 1.0 + 1e-9 {
            return Err(Error::InvalidDensity(format!(
                "trace {} exceeds one",
                tr.re
            )));
        }
        let min = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if min < -1e-9 {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::InvalidDensity("basis mismatch".into()));
        }
        Ok(Self {
            basis: self.basis.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * alpha + b * beta)
                .collect(),
        })
    }
}

/// `rho <- (rho + rho^dagger) / 2` in place.
fn symmetrize(rho: &mut [Complex64], d: usize) {
    for i in 0..d {
        rho[i * d + i].im = 0.0;
        for j in i + 1..d {
            let avg = 0.5 * (rho[i * d + j] + rho[j * d + i].conj());
            rho[i * d + j] = avg;
            rho[j * d + i] = avg.conj();
        }
    }
}

pub(crate) fn hermitian_eigenvalues(data: &[Complex64], d: usize) -> Result<Vec<f64>> {
    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| {
        0.5 * (data[i * d + j] + data[j * d + i].conj())
    });
    // The implicit QR sweep occasionally breaks down into NaN on matrices
    // with many exactly-zero rows; a rescaled copy takes a different path.
    for scale in [1.0, 3.0, 1.0 / 7.0] {
        let Some(eig) = nalgebra::SymmetricEigen::try_new(m.scale(scale), 1e-14, 10_000) else {
            continue;
        };
        if eig.eigenvalues.iter().all(|v| v.is_finite()) {
            let mut vals: Vec<f64> = eig.eigenvalues.iter().map(|v| v / scale).collect();
            vals.sort_by(f64::total_cmp);
            return Ok(vals);
        }
    }
    Err(Error::Eigen)
}

/// Probability of the fundamental Gaussian mode, `Re rho_{00,00}`.
pub fn lowest_mode_probability(rho: &DensityMatrix) -> Result<f64> {
    let p = rho.basis().position(LGIndex::GAUSSIAN)?;
    let v = rho.get(p, p);
    if v.im.abs() > 1e-10 {
        return Err(Error::InvalidDensity(format!(
            "fundamental population has imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// Which truncation of the infinite system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagationScheme {
    /// `d rho_uv = sum_{m,n in B} L~_{mnuv} rho_mn`.
    TruncatedExact,
    /// `d rho = L~(rho) - (Gamma rho + rho Gamma) / 2`, `Gamma_nm = sum_{u in B} L~_{mnuu}`.
    LindbladTruncated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cutoff: usize,
    pub scheme: PropagationScheme,
    /// Fixed RK4 steps over the whole path.
    pub steps: usize,
    /// Repeat with twice the steps and require trace agreement.
    pub check_convergence: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cutoff: 4,
            scheme: PropagationScheme::TruncatedExact,
            steps: 256,
            check_convergence: true,
        }
    }
}

impl SolverConfig {
    pub fn new(cutoff: usize, scheme: PropagationScheme) -> Self {
        Self {
            cutoff,
            scheme,
            ..Self::default()
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS {
            return Err(Error::invalid(
                "steps",
                format!("must be at least {MIN_STEPS}"),
            ));
        }
        let d = (2 * self.cutoff + 1) * (self.cutoff + 1);
        if d * d > MAX_VECTORIZED_DIM {
            return Err(Error::DimensionGuard {
                dim: d * d,
                limit: MAX_VECTORIZED_DIM,
            });
        }
        Ok(())
    }
}

/// A sparse superoperator over row-major vectorized density matrices
/// (index `u * D + v`).
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Superoperator {
    /// Density-matrix dimension `D`; the operator acts on `D^2` vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(row, col, value)` triplets; duplicates are summed.
    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim * self.dim];
        for &(r, c, v) in &self.entries {
            out[r] += v * x[c];
        }
        out
    }

    /// Dense `D^2 x D^2` matrix, row-major.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim * self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for &(r, c, v) in &self.entries {
            out[r * n + c] += v;
        }
        out
    }
}

/// Coupling data for one propagation.
///
/// At a single wavelength `L~(z) = l(z) e^{i psi(z) q} L~(0)` with an
/// integer `q` per entry, so the scatter only needs a phase table per
/// distance. The generator then also preserves Hermiticity and only the
/// upper triangle of `d rho` is accumulated.
struct Generator {
    dim: usize,
    scheme: PropagationScheme,
    w0: f64,
    freq: Frequencies,
    idx: Vec<[u32; 4]>,
    // entry positions with u == v, which build Gamma
    gamma_entries: Vec<usize>,
    kind: GeneratorKind,
}

enum GeneratorKind {
    Single {
        unit: Vec<Complex64>,
        // q + qmax per entry
        phase: Vec<u8>,
        qmax: i32,
        // entries with u <= v: (u * D + v, m * D + n, unit value, phase slot)
        upper: Vec<(u32, u32, Complex64, u8)>,
    },
    Cross {
        structure: CouplingStructure,
        // (u * D + v, m * D + n) per entry
        flat: Vec<(u32, u32)>,
    },
}

/// `L~` at one distance, in the form the scatter needs.
struct Snapshot {
    table: Vec<Complex64>,
    values: Vec<Complex64>,
    // nonzero (row, col, value) of Gamma
    gamma: Vec<(usize, usize, Complex64)>,
}

impl Generator {
    fn new(
        basis: &ModeBasis,
        freq: Frequencies,
        w0: f64,
        scheme: PropagationScheme,
    ) -> Result<Self> {
        let d = basis.len();
        if d * d > MAX_VECTORIZED_DIM {
            return Err(Error::DimensionGuard {
                dim: d * d,
                limit: MAX_VECTORIZED_DIM,
            });
        }
        let structure = CouplingStructure::new(basis)?;
        let idx = structure.indices();
        let gamma_entries = idx
            .iter()
            .enumerate()
            .filter(|(_, e)| e[2] == e[3])
            .map(|(i, _)| i)
            .collect();
        let freq = match freq {
            Frequencies::Pair(o1, o2) if o1 == o2 => Frequencies::Single(freq.wavelengths().0),
            f => f,
        };
        let flat = |e: &[u32; 4]| (e[2] * d as u32 + e[3], e[0] * d as u32 + e[1]);
        let kind = match freq {
            Frequencies::Single(_) => {
                let unit = structure.unit_values(0.0, 0.0);
                let q = structure.phase_indices();
                let qmax = q.iter().map(|x| x.abs()).max().unwrap_or(0);
                if qmax > 127 {
                    return Err(Error::invalid("cutoff", "Gouy phase range too large"));
                }
                let phase: Vec<u8> = q.iter().map(|x| (x + qmax) as u8).collect();
                let upper = idx
                    .iter()
                    .zip(unit.iter().zip(&phase))
                    .filter(|(e, _)| e[2] <= e[3])
                    .map(|(e, (&v, &p))| {
                        let (row, col) = flat(e);
                        (row, col, v, p)
                    })
                    .collect();
                GeneratorKind::Single {
                    unit,
                    phase,
                    qmax,
                    upper,
                }
            }
            Frequencies::Pair(..) => GeneratorKind::Cross {
                flat: idx.iter().map(flat).collect(),
                structure,
            },
        };
        Ok(Self {
            dim: d,
            scheme,
            w0,
            freq,
            idx,
            gamma_entries,
            kind,
        })
    }

    fn hermitian(&self) -> bool {
        matches!(self.kind, GeneratorKind::Single { .. })
    }

    fn snapshot(&self, z: f64, cn2: f64) -> Snapshot {
        let strength = self.freq.strength(z, cn2, self.w0);
        let (t1, t2) = self.freq.normalized_distances(z, self.w0);
        let mut snap = Snapshot {
            table: Vec::new(),
            values: Vec::new(),
            gamma: Vec::new(),
        };
        match &self.kind {
            GeneratorKind::Single { qmax, .. } => {
                let psi = t1.atan();
                snap.table = (-qmax..=*qmax)
                    .map(|q| Complex64::from_polar(strength, psi * q as f64))
                    .collect();
            }
            GeneratorKind::Cross { structure, .. } => {
                snap.values = structure
                    .unit_values(t1, t2)
                    .into_iter()
                    .map(|v| v * strength)
                    .collect();
            }
        }
        if self.scheme == PropagationScheme::LindbladTruncated {
            snap.gamma = self.gamma(&snap);
        }
        snap
    }

    fn value(&self, snap: &Snapshot, i: usize) -> Complex64 {
        match &self.kind {
            GeneratorKind::Single { unit, phase, .. } => unit[i] * snap.table[phase[i] as usize],
            GeneratorKind::Cross { .. } => snap.values[i],
        }
    }

    /// Every finite-part value in storage order.
    fn values(&self, snap: &Snapshot) -> Vec<Complex64> {
        (0..self.idx.len()).map(|i| self.value(snap, i)).collect()
    }

    /// Nonzero entries of `Gamma_{n,m} = sum_u L~_{m,n,u,u}`.
    fn gamma(&self, snap: &Snapshot) -> Vec<(usize, usize, Complex64)> {
        let d = self.dim;
        let mut g = vec![Complex64::new(0.0, 0.0); d * d];
        for &i in &self.gamma_entries {
            let e = self.idx[i];
            g[e[1] as usize * d + e[0] as usize] += self.value(snap, i);
        }
        g.into_iter()
            .enumerate()
            .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
            .map(|(k, v)| (k / d, k % d, v))
            .collect()
    }

    /// `d rho / dz`.
    fn derivative(&self, snap: &Snapshot, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        match &self.kind {
            GeneratorKind::Single { upper, .. } => {
                for &(row, col, v, p) in upper {
                    out[row as usize] += v * snap.table[p as usize] * rho[col as usize];
                }
                for i in 0..d {
                    for j in 0..i {
                        out[i * d + j] = out[j * d + i].conj();
                    }
                }
            }
            GeneratorKind::Cross { flat, .. } => {
                for (&(row, col), v) in flat.iter().zip(&snap.values) {
                    out[row as usize] += v * rho[col as usize];
                }
            }
        }
        if self.scheme == PropagationScheme::LindbladTruncated {
            // -(Gamma rho + rho Gamma) / 2
            for &(a, b, g) in &snap.gamma {
                let g = 0.5 * g;
                for w in 0..d {
                    out[a * d + w] -= g * rho[b * d + w];
                    out[w * d + b] -= rho[w * d + a] * g;
                }
            }
        }
    }
}

/// `R(z)` over vectorized density matrices for the given scheme.
pub fn assemble_superoperator(
    basis: &ModeBasis,
    z: f64,
    cn2: f64,
    w0: f64,
    freq: Frequencies,
    scheme: PropagationScheme,
) -> Result<Superoperator> {
    let gen = Generator::new(basis, freq, w0, scheme)?;
    let d = basis.len();
    let snap = gen.snapshot(z, cn2);
    let values = gen.values(&snap);
    let mut entries: Vec<(usize, usize, Complex64)> = gen
        .idx
        .iter()
        .zip(&values)
        .map(|(e, &v)| {
            let (m, n, u, w) = (e[0] as usize, e[1] as usize, e[2] as usize, e[3] as usize);
            (u * d + w, m * d + n, v)
        })
        .collect();
    if scheme == PropagationScheme::LindbladTruncated {
        // (Gamma rho)_{aw} = Gamma_{ab} rho_{bw}; (rho Gamma)_{wb} = rho_{wa} Gamma_{ab}
        for &(a, b, g) in &snap.gamma {
            for w in 0..d {
                entries.push((a * d + w, b * d + w, -0.5 * g));
                entries.push((w * d + b, w * d + a, -0.5 * g));
            }
        }
    }
    entries.retain(|e| e.2 != Complex64::new(0.0, 0.0));
    Ok(Superoperator { dim: d, entries })
}

struct Integrator<'a> {
    gen: Generator,
    profile: &'a TurbulenceProfile,
    geom: &'a LinkGeometry,
}

impl Integrator<'_> {
    fn cn2(&self, z: f64) -> Result<f64> {
        match self.profile {
            TurbulenceProfile::Constant(v) => Ok(*v),
            _ => cn2_at(
                self.profile,
                self.geom,
                z.clamp(0.0, self.geom.path_length()),
            ),
        }
    }

    /// RK4 over `[0, z_f]`, recording the state after every `record_every` steps.
    fn run(
        &self,
        rho0: &[Complex64],
        steps: usize,
        record_every: usize,
    ) -> Result<Vec<(f64, Vec<Complex64>)>> {
        let zf = self.geom.path_length();
        let h = zf / steps as f64;
        let n = rho0.len();
        let d = self.gen.dim;
        let mut rho = rho0.to_vec();
        let mut k1 = vec![Complex64::new(0.0, 0.0); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut tmp = k1.clone();
        let mut out = vec![(0.0, rho.clone())];
        let mut snap = self.gen.snapshot(0.0, self.cn2(0.0)?);
        for step in 0..steps {
            let z = step as f64 * h;
            self.gen.derivative(&snap, &rho, &mut k1);
            snap = self.gen.snapshot(z + 0.5 * h, self.cn2(z + 0.5 * h)?);
            for i in 0..n {
                tmp[i] = rho[i] + k1[i] * (0.5 * h);
            }
            self.gen.derivative(&snap, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = rho[i] + k2[i] * (0.5 * h);
            }
            self.gen.derivative(&snap, &tmp, &mut k3);
            snap = self.gen.snapshot(z + h, self.cn2(z + h)?);
            for i in 0..n {
                tmp[i] = rho[i] + k3[i] * h;
            }
            self.gen.derivative(&snap, &tmp, &mut k4);
            for i in 0..n {
                rho[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            if self.gen.hermitian() {
                symmetrize(&mut rho, d);
            }
            if (step + 1) % record_every == 0 {
                out.push(((step + 1) as f64 * h, rho.clone()));
            }
        }
        Ok(out)
    }
}

fn trace_of(rho: &[Complex64], d: usize) -> Complex64 {
    (0..d).map(|i| rho[i * d + i]).sum()
}

/// Density matrix at `z_f` for a single wavelength (the geometry's).
pub fn propagate(
    rho0: &DensityMatrix,
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    config: &SolverConfig,
) -> Result<DensityMatrix> {
    propagate_frequencies(
        rho0,
        profile,
        geom,
        config,
        Frequencies::Single(geom.wavelength()),
    )
}

/// Density matrix at `z_f` where the row index carries the first frequency
/// and the column index the second.
pub fn propagate_frequencies(
    rho0: &DensityMatrix,
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    config: &SolverConfig,
    freq: Frequencies,
) -> Result<DensityMatrix> {
    let traj = propagate_checkpoints(rho0, profile, geom, config, freq, 1)?;
    Ok(traj.into_iter().last().expect("non-empty").1)
}

/// States at `checkpoints + 1` evenly spaced distances including `z = 0`
/// and `z_f`. `config.steps` must be a multiple of `checkpoints`.
pub fn propagate_checkpoints(
    rho0: &DensityMatrix,
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    config: &SolverConfig,
    freq: Frequencies,
    checkpoints: usize,
) -> Result<Vec<(f64, DensityMatrix)>> {
    config.validate()?;
    if checkpoints == 0 || config.steps % checkpoints != 0 {
        return Err(Error::invalid("checkpoints", "must divide the step count"));
    }
    let basis = rho0.basis();
    if basis.cutoff() != config.cutoff {
        return Err(Error::invalid(
            "cutoff",
            "density basis does not match solver cutoff",
        ));
    }
    let integ = Integrator {
        gen: Generator::new(basis, freq, geom.waist(), config.scheme)?,
        profile,
        geom,
    };
    let record = config.steps / checkpoints;
    let coarse = integ.run(rho0.data(), config.steps, record)?;
    let result = if config.check_convergence {
        let fine = integ.run(rho0.data(), 2 * config.steps, 2 * record)?;
        let d = basis.len();
        let tc = trace_of(&coarse.last().expect("non-empty").1, d);
        let tf = trace_of(&fine.last().expect("non-empty").1, d);
        if !((tc - tf).norm() <= STEP_DOUBLING_TOL) {
            return Err(Error::NonConvergence {
                coarse: tc.re,
                fine: tf.re,
            });
        }
        fine
    } else {
        coarse
    };
    // Neither scheme can gain trace, so growth means the step is unstable.
    let start = trace_of(rho0.data(), basis.len()).norm();
    let last = trace_of(&result.last().expect("non-empty").1, basis.len());
    if !(last.norm() <= start * (1.0 + 1e-6) + 1e-12) {
        return Err(Error::NonConvergence {
            coarse: last.re,
            fine: last.re,
        });
    }
    result
        .into_iter()
        .map(|(z, data)| Ok((z, DensityMatrix::from_data(basis, data)?)))
        .collect()
}

/// Pure-decay probability `exp(-54.10 int l dz)` of the fundamental mode.
pub fn analytic_decay(
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    mode: DecayMode,
) -> Result<f64> {
    analytic_decay_to(profile, geom, mode, geom.path_length())
}

/// [`analytic_decay`] evaluated at an intermediate distance.
pub fn analytic_decay_to(
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    mode: DecayMode,
    z: f64,
) -> Result<f64> {
    Ok((-PURE_DECAY_CONSTANT * integrated_l_to(profile, geom, mode, z)?).exp())
}

/// How the transmitted waist is chosen for each distance in a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaistRule {
    Fixed(f64),
    /// `w0 = fraction * (lambda z / pi)^{1/2}`.
    ScaledOptimum(f64),
}

impl WaistRule {
    pub fn waist(&self, lambda: f64, z: f64) -> f64 {
        match *self {
            WaistRule::Fixed(w) => w,
            WaistRule::ScaledOptimum(f) => f * crate::turbulence::optimal_waist(lambda, z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub cn2: f64,
    pub z: f64,
    pub waist: f64,
    pub probability: f64,
}

/// Fundamental-mode probability over a grid of constant `C_n^2` values and
/// distances, using the pure-decay law.
pub fn distance_sweep(
    cn2_values: &[f64],
    geom: &LinkGeometry,
    rule: WaistRule,
    distances: &[f64],
) -> Result<Vec<SweepPoint>> {
    let lambda = geom.wavelength();
    let mut out = Vec::with_capacity(cn2_values.len() * distances.len());
    for &cn2 in cn2_values {
        let profile = TurbulenceProfile::constant(cn2)?;
        for &z in distances {
            let waist = rule.waist(lambda, z);
            let g = geom.with_path_length(z)?.with_waist(waist)?;
            let p = analytic_decay(&profile, &g, DecayMode::Single(lambda))?;
            out.push(SweepPoint {
                cn2,
                z,
                waist,
                probability: p,
            });
        }
    }
    Ok(out)
}
