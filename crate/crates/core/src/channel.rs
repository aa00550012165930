//! Two-frequency decay kernel and the temporal-mode channel it induces.
//!
//! The kernel `P(w1, w2)` is sampled on the Gauss-Hermite grid of the
//! biphoton's Schmidt modes, `w_i = w_c + x_i / sqrt(b)`. On that grid
//! `int f_m(w) f_n(w) g(w) dw = sum_i w_i h_m(x_i) h_n(x_i) g(w_i)`, so every
//! mode projection is a small weighted sum.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ipe::{propagate_frequencies, DensityMatrix, PropagationScheme, SolverConfig};
use crate::lg::{Frequencies, LGIndex, ModeBasis, PURE_DECAY_CONSTANT};
use crate::math::{gauss_hermite_rule, hermite_functions};
use crate::schmidt::BiphotonSpec;
use crate::turbulence::{
    extinction_factor, integrated_l, DecayMode, LinkGeometry, TurbulenceProfile,
};

pub const MAX_GRID_ORDER: usize = 64;

/// Largest grid on which the kernel may be built from full propagations.
pub const MAX_FULL_IPE_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFidelity {
    /// Pure decay, `exp(-54.10 int l(w1, w2, z) dz)`.
    Analytic,
    /// The fundamental-mode element of a cross-frequency density matrix
    /// propagated with the given cutoff and scheme.
    FullIpe {
        cutoff: usize,
        scheme: PropagationScheme,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Gauss-Hermite order of the frequency grid.
    pub order: usize,
    pub fidelity: KernelFidelity,
    /// Extinction coefficient in 1/km.
    pub extinction_per_km: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            order: 48,
            fidelity: KernelFidelity::Analytic,
            extinction_per_km: 0.0,
        }
    }
}

/// `P(w1, w2)` on the Schmidt-mode frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelKernel {
    spec: BiphotonSpec,
    fidelity: KernelFidelity,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    omegas: Vec<f64>,
    p: Vec<f64>,
    // h_k(x_i) for k = 0..=order / 2, row per node
    hermite: Vec<Vec<f64>>,
}

impl ChannelKernel {
    pub fn spec(&self) -> &BiphotonSpec {
        &self.spec
    }

    pub fn fidelity(&self) -> KernelFidelity {
        self.fidelity
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Grid frequencies in rad/s.
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.order() + j]
    }

    /// Highest mode index the grid resolves.
    pub fn max_mode(&self) -> usize {
        self.order() / 2
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n > self.max_mode() {
            return Err(Error::UnderResolved {
                mode: n,
                order: self.order(),
            });
        }
        Ok(())
    }

    /// `sqrt(w_i) h_n(x_i)`: the mode sampled so that sums are integrals.
    fn mode_vector(&self, n: usize) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.hermite)
            .map(|(w, h)| w.sqrt() * h[n])
            .collect()
    }

    /// `int int f_a(w1) f_b(w1) P(w1, w2) f_c(w2) f_d(w2)`.
    fn quad_form(&self, ab: &[f64], cd: &[f64]) -> f64 {
        let k = self.order();
        let mut acc = 0.0;
        for i in 0..k {
            if ab[i] == 0.0 {
                continue;
            }
            let row = &self.p[i * k..(i + 1) * k];
            let inner: f64 = row.iter().zip(cd).map(|(p, c)| p * c).sum();
            acc += ab[i] * inner;
        }
        acc
    }

    /// Writes `omega1_Trad_s,omega2_Trad_s,P` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "omega1_Trad_s,omega2_Trad_s,P")?;
        for (i, o1) in self.omegas.iter().enumerate() {
            for (j, o2) in self.omegas.iter().enumerate() {
                writeln!(w, "{},{},{}", o1 / 1e12, o2 / 1e12, self.p(i, j))?;
            }
        }
        Ok(())
    }
}

/// Builds the decay kernel for a biphoton source over a link.
pub fn channel_kernel(
    spec: &BiphotonSpec,
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    options: &KernelOptions,
) -> Result<ChannelKernel> {
    let order = options.order;
    if order > MAX_GRID_ORDER {
        return Err(Error::UnsupportedOrder {
            order,
            min: 2,
            max: MAX_GRID_ORDER,
        });
    }
    if let KernelFidelity::FullIpe { .. } = options.fidelity {
        if order > MAX_FULL_IPE_ORDER {
            return Err(Error::UnsupportedOrder {
                order,
                min: 2,
                max: MAX_FULL_IPE_ORDER,
            });
        }
    }
    if !(options.extinction_per_km >= 0.0 && options.extinction_per_km.is_finite()) {
        return Err(Error::invalid(
            "extinction",
            "must be finite and non-negative",
        ));
    }
    let rule = gauss_hermite_rule(order)?;
    let nodes = rule.nodes().to_vec();
    let weights = rule.weights().to_vec();
    let omegas: Vec<f64> = nodes.iter().map(|&x| spec.omega_at(x)).collect();
    let hermite = nodes
        .iter()
        .map(|&x| hermite_functions(order / 2, x))
        .collect();
    let ext = extinction_factor(options.extinction_per_km, geom.path_length());

    let pairs: Vec<(usize, usize)> = (0..order)
        .flat_map(|i| (i..order).map(move |j| (i, j)))
        .collect();
    let upper: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            pair_decay(profile, geom, omegas[i], omegas[j], options.fidelity).map(|p| p * ext)
        })
        .collect::<Result<_>>()?;
    let mut p = vec![0.0; order * order];
    for (&(i, j), v) in pairs.iter().zip(upper) {
        p[i * order + j] = v;
        p[j * order + i] = v;
    }
    Ok(ChannelKernel {
        spec: *spec,
        fidelity: options.fidelity,
        nodes,
        weights,
        omegas,
        p,
        hermite,
    })
}

fn pair_decay(
    profile: &TurbulenceProfile,
    geom: &LinkGeometry,
    o1: f64,
    o2: f64,
    fidelity: KernelFidelity,
) -> Result<f64> {
    match fidelity {
        KernelFidelity::Analytic => Ok((-PURE_DECAY_CONSTANT
            * integrated_l(profile, geom, DecayMode::Cross(o1, o2))?)
        .exp()),
        KernelFidelity::FullIpe { cutoff, scheme } => {
            let basis = ModeBasis::new(cutoff)?;
            let rho0 = DensityMatrix::pure(&basis, LGIndex::GAUSSIAN)?;
            let config = SolverConfig::new(cutoff, scheme);
            let rho =
                propagate_frequencies(&rho0, profile, geom, &config, Frequencies::Pair(o1, o2))?;
            let g = basis.gaussian_position();
            Ok(rho.get(g, g).re)
        }
    }
}

/// Total trace `T_n = int P(w, w) |f_n(w)|^2 dw` of Schmidt mode `n`.
pub fn mode_trace(kernel: &ChannelKernel, n: usize) -> Result<f64> {
    kernel.check_mode(n)?;
    Ok((0..kernel.order())
        .map(|i| kernel.weights[i] * kernel.hermite[i][n].powi(2) * kernel.p(i, i))
        .sum())
}

/// Probabilities `S_{n,m}` of receiving mode `m` when mode `n` is sent,
/// normalized by the trace `T_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMatrix {
    size: usize,
    entries: Vec<f64>,
    traces: Vec<f64>,
}

impl TransmissionMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[n * self.size + m]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.entries[n * self.size..(n + 1) * self.size]
    }

    pub fn trace(&self, n: usize) -> f64 {
        self.traces[n]
    }

    pub fn traces(&self) -> &[f64] {
        &self.traces
    }

    /// Probability of leaving the modes `0..=N` from input `n`.
    pub fn leakage(&self, n: usize) -> f64 {
        1.0 - self.row(n).iter().sum::<f64>()
    }

    /// Writes `n,m,S` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,m,S")?;
        for n in 0..self.size {
            for m in 0..self.size {
                writeln!(w, "{n},{m},{}", self.get(n, m))?;
            }
        }
        Ok(())
    }

    /// Writes `n,T` rows.
    pub fn write_traces_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_traces_csv(&self.traces, w)
    }
}

/// Writes `n,T` rows for a list of mode traces.
pub fn write_traces_csv<W: Write>(traces: &[f64], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,T")?;
    for (n, t) in traces.iter().enumerate() {
        writeln!(w, "{n},{t}")?;
    }
    Ok(())
}

/// `S_{n,m} = (1/T_n) int int P(w1, w2) f_m(w1) f_m(w2) f_n(w1) f_n(w2)`
/// for `n, m = 0..=N`.
pub fn transmission_matrix(kernel: &ChannelKernel, n_max: usize) -> Result<TransmissionMatrix> {
    kernel.check_mode(n_max)?;
    let size = n_max + 1;
    let modes: Vec<Vec<f64>> = (0..size).map(|n| kernel.mode_vector(n)).collect();
    let mut entries = vec![0.0; size * size];
    let mut traces = Vec::with_capacity(size);
    for n in 0..size {
        let t = mode_trace(kernel, n)?;
        traces.push(t);
        for m in 0..size {
            let g: Vec<f64> = modes[n].iter().zip(&modes[m]).map(|(a, b)| a * b).collect();
            entries[n * size + m] = kernel.quad_form(&g, &g) / t;
        }
    }
    Ok(TransmissionMatrix {
        size,
        entries,
        traces,
    })
}

/// Output of one photon sent in a single Schmidt mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleOutput {
    pub size: usize,
    /// Real symmetric density over modes `0..=N`, row-major.
    pub density: Vec<f64>,
    /// Probability outside the represented modes.
    pub leakage: f64,
}

impl SingleOutput {
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.density[u * self.size + v]
    }
}

/// `M_uv = (1/T_n) int int f_u(w1) f_n(w1) P(w1, w2) f_n(w2) f_v(w2)`.
pub fn apply_channel_single(
    kernel: &ChannelKernel,
    n: usize,
    n_max: usize,
) -> Result<SingleOutput> {
    kernel.check_mode(n.max(n_max))?;
    let size = n_max + 1;
    let t = mode_trace(kernel, n)?;
    let fin = kernel.mode_vector(n);
    let prods: Vec<Vec<f64>> = (0..size)
        .map(|u| {
            kernel
                .mode_vector(u)
                .iter()
                .zip(&fin)
                .map(|(a, b)| a * b)
                .collect()
        })
        .collect();
    let mut density = vec![0.0; size * size];
    for u in 0..size {
        for v in u..size {
            let val = kernel.quad_form(&prods[u], &prods[v]) / t;
            density[u * size + v] = val;
            density[v * size + u] = val;
        }
    }
    let leakage = 1.0 - (0..size).map(|u| density[u * size + u]).sum::<f64>();
    Ok(SingleOutput {
        size,
        density,
        leakage,
    })
}

/// One-photon channel tensor
/// `C[u,v,m,n] = int int f_u(w1) f_m(w1) P(w1, w2) f_n(w2) f_v(w2)`
/// over modes `0..M`, stored with `u` slowest.
pub fn channel_tensor(kernel: &ChannelKernel, modes: usize) -> Result<Vec<f64>> {
    if modes == 0 {
        return Err(Error::invalid("modes", "must be positive"));
    }
    kernel.check_mode(modes - 1)?;
    let k = kernel.order();
    let vecs: Vec<Vec<f64>> = (0..modes).map(|n| kernel.mode_vector(n)).collect();
    // prod[a][b][i] = f_a(x_i) f_b(x_i) w_i
    let prod: Vec<Vec<f64>> = (0..modes * modes)
        .map(|ab| {
            let (a, b) = (ab / modes, ab % modes);
            (0..k).map(|i| vecs[a][i] * vecs[b][i]).collect()
        })
        .collect();
    // P applied once per (n, v) pair
    let p_cols: Vec<Vec<f64>> = prod
        .iter()
        .map(|g| {
            (0..k)
                .map(|i| (0..k).map(|j| kernel.p(i, j) * g[j]).sum())
                .collect()
        })
        .collect();
    let m4 = modes * modes * modes * modes;
    let mut out = vec![0.0; m4];
    for u in 0..modes {
        for v in 0..modes {
            for m in 0..modes {
                for n in 0..modes {
                    let left = &prod[u * modes + m];
                    let right = &p_cols[n * modes + v];
                    out[((u * modes + v) * modes + m) * modes + n] =
                        left.iter().zip(right).map(|(a, b)| a * b).sum();
                }
            }
        }
    }
    Ok(out)
}
