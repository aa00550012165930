//! Photon and photon-pair propagation through turbulent free-space links in
//! a Laguerre-Gaussian spatial basis and a Schmidt temporal-mode basis.
//!
//! The layers build on each other:
//!
//! * [`math`] holds special functions, quadrature rules and truncated
//!   bivariate power series.
//! * [`schmidt`] describes the biphoton source and its Schmidt modes.
//! * [`turbulence`] describes the link, the refractive-index profile and the
//!   decay strengths derived from the von Karman spectrum.
//! * [`lg`] computes LG-mode overlaps and the turbulence coupling tensor in
//!   closed form, with brute-force oracles in [`lg::oracle`].
//! * [`ipe`] integrates the truncated master equation for the LG density
//!   matrix.
//! * [`channel`] builds the two-frequency decay kernel and the temporal-mode
//!   transmission matrix.
//! * [`entanglement`] propagates photon pairs and measures what is left of
//!   their entanglement.
//! * [`app`] is the configuration and command layer behind the binary.

pub mod app;
pub mod channel;
pub mod entanglement;
pub mod error;
pub mod ipe;
pub mod lg;
pub mod math;
pub mod schmidt;
pub mod turbulence;

pub use error::{Error, Result};
