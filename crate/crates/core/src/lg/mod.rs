//! Laguerre-Gaussian modes and their turbulence couplings.
//!
//! Modes are labelled by a radial index `r >= 0` and an azimuthal index `l`.
//! The momentum-space amplitudes are obtained from a generating function by
//! formal-series coefficient extraction; the same machinery yields the
//! displaced overlaps `W_{m,n}(K)` as a finite expansion
//! `sum_j c_j (K^2 a / 8)^{j/2} exp(-K^2 a / 8)`, which turns the turbulence
//! coupling integral into a finite sum of Gamma functions.

mod amplitude;
mod coeffs;
mod coupling;
pub mod oracle;

use std::fmt;

use crate::error::{Error, Result};

pub use amplitude::lg_momentum_amplitude;
pub use coeffs::{c_coefficients, overlap_w, CoeffRow};
pub use coupling::{
    coupling_l, coupling_prefactor, free_prop_s, CouplingStructure, CouplingTensor, Frequencies,
    TensorEntry, PURE_DECAY_CONSTANT,
};

/// Largest `r` or `|l|` accepted by the series-based mode functions.
pub const MAX_MODE_INDEX: usize = 8;

/// A Laguerre-Gaussian mode label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LGIndex {
    pub r: usize,
    pub l: i32,
}

impl LGIndex {
    pub const GAUSSIAN: LGIndex = LGIndex { r: 0, l: 0 };

    pub fn new(r: usize, l: i32) -> Self {
        Self { r, l }
    }

    pub fn abs_l(&self) -> usize {
        self.l.unsigned_abs() as usize
    }

    /// Mode order `2r + |l|`, which sets the Gouy phase.
    pub fn order(&self) -> usize {
        2 * self.r + self.abs_l()
    }

    pub(crate) fn check_guard(&self) -> Result<()> {
        if self.r > MAX_MODE_INDEX || self.abs_l() > MAX_MODE_INDEX {
            return Err(Error::IndexGuard {
                what: format!("(r={}, l={})", self.r, self.l),
                limit: MAX_MODE_INDEX,
            });
        }
        Ok(())
    }
}

impl fmt::Display for LGIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, l={})", self.r, self.l)
    }
}

/// All modes with `|l| <= N` and `r <= N`, ordered by `l` then `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeBasis {
    cutoff: usize,
    modes: Vec<LGIndex>,
}

impl ModeBasis {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff > MAX_MODE_INDEX {
            return Err(Error::IndexGuard {
                what: format!("cutoff {cutoff}"),
                limit: MAX_MODE_INDEX,
            });
        }
        let n = cutoff as i32;
        let mut modes = Vec::with_capacity((2 * cutoff + 1) * (cutoff + 1));
        for l in -n..=n {
            for r in 0..=cutoff {
                modes.push(LGIndex::new(r, l));
            }
        }
        Ok(Self { cutoff, modes })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> &[LGIndex] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Position of a mode in the basis.
    pub fn position(&self, idx: LGIndex) -> Result<usize> {
        let n = self.cutoff as i32;
        if idx.l.abs() > n || idx.r > self.cutoff {
            return Err(Error::ModeAbsent { r: idx.r, l: idx.l });
        }
        Ok((idx.l + n) as usize * (self.cutoff + 1) + idx.r)
    }

    /// Position of the fundamental Gaussian mode.
    pub fn gaussian_position(&self) -> usize {
        self.position(LGIndex::GAUSSIAN).expect("always present")
    }
}
