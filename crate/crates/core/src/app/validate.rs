//! Cross-checks between closed forms and independent numerical oracles.

use std::f64::consts::PI;

use crate::error::Result;
use crate::ipe::{
    analytic_decay, lowest_mode_probability, propagate, DensityMatrix, PropagationScheme,
    SolverConfig,
};
use crate::lg::oracle::{coupling_l_extrapolated, coupling_l_numeric, free_prop_s_numeric};
use crate::lg::{coupling_l, free_prop_s, Frequencies, LGIndex, ModeBasis, PURE_DECAY_CONSTANT};
use crate::math::gamma_fn;
use crate::schmidt::{schmidt_eigenvalue, MAX_EIGEN_INDEX};
use crate::turbulence::{big_l_t, DecayMode, SpectrumParams, LT_CONSTANT};

use super::RunConfig;

/// One comparison. `pass` is `|value - reference| <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            reference,
            tolerance,
            pass: (value - reference).abs() <= tolerance,
        }
    }
}

/// Runs every check at the configured wavelength and waist. A zero `C_n^2`
/// is replaced by `1e-16` for the coupling checks, which are linear in it.
pub fn run_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let lambda = cfg.wavelength();
    let w0 = cfg.waist();
    let cn2 = if cfg.turbulence.cn2 > 0.0 {
        cfg.turbulence.cn2
    } else {
        1e-16
    };
    let freq = Frequencies::Single(lambda);
    let zr = PI * w0 * w0 / lambda;
    let mut out = Vec::new();

    out.push(Check::new(
        "decay_constant",
        -8.1 * gamma_fn(-5.0 / 6.0)?,
        54.1,
        0.1,
    ));
    out.push(Check::new(
        "decay_constant_stored",
        PURE_DECAY_CONSTANT,
        -8.1 * gamma_fn(-5.0 / 6.0)?,
        1e-2,
    ));

    let sp = SpectrumParams::new(1e-4 / w0)?;
    let g = LGIndex::GAUSSIAN;
    let o = coupling_l_numeric(g, g, g, g, 0.0, cn2, w0, freq, &sp)?;
    let lt = big_l_t(lambda, lambda, cn2, &sp);
    out.push(Check::new("lt_oracle_ratio", o.l_t / lt, 1.0, 1e-3));
    out.push(Check::new("lt_constant", LT_CONSTANT, 30.86, 0.01));

    let tuples = [
        (g, g, g, g),
        (LGIndex::new(1, 0), g, g, g),
        (LGIndex::new(0, 1), g, g, LGIndex::new(0, -1)),
        (
            LGIndex::new(1, 1),
            LGIndex::new(2, -1),
            g,
            LGIndex::new(1, -2),
        ),
    ];
    let mut worst: f64 = 0.0;
    for z in [0.0, zr] {
        for (m, n, u, v) in tuples {
            let a = coupling_l(m, n, u, v, z, cn2, w0, freq, None)?;
            let b = coupling_l_extrapolated(m, n, u, v, z, cn2, w0, freq)?;
            worst = worst.max((a - b).norm() / a.norm());
        }
    }
    out.push(Check::new("coupling_oracle_rel_err", worst, 0.0, 1e-3));

    let mut worst: f64 = 0.0;
    for (r1, r2, l) in [(0, 0, 0), (0, 1, 0), (1, 1, 1), (1, 2, -1), (0, 2, 0)] {
        let (m, n) = (LGIndex::new(r1, l), LGIndex::new(r2, l));
        let a = free_prop_s(m, n, zr);
        let b = free_prop_s_numeric(m, n, w0, lambda, 0.0)?;
        worst = worst.max((a - b).norm() * zr);
    }
    out.push(Check::new("free_prop_oracle_err", worst, 0.0, 1e-6));

    let spec = cfg.biphoton()?;
    let total: f64 = (0..=MAX_EIGEN_INDEX)
        .map(|n| schmidt_eigenvalue(&spec, n))
        .sum::<Result<f64>>()?;
    out.push(Check::new("schmidt_sum", total, 1.0, 1e-6));

    let geom = cfg.geometry()?;
    let profile = cfg.profile()?;
    let basis = ModeBasis::new(0)?;
    let rho = propagate(
        &DensityMatrix::pure(&basis, g)?,
        &profile,
        &geom,
        &SolverConfig::new(0, PropagationScheme::TruncatedExact).with_steps(1024),
    )?;
    let p = lowest_mode_probability(&rho)?;
    out.push(Check::new(
        "fundamental_solver_vs_closed_form",
        p,
        analytic_decay(&profile, &geom, DecayMode::Single(lambda))?,
        1e-8,
    ));
    Ok(out)
}
