//! Fundamental-mode probability from the truncated propagation equation and
//! its Lindblad-completed variant for growing mode cutoffs. The two schemes
//! bracket the untruncated answer from below and above.
//!
//! ```text
//! cargo run --release --example cutoff_bracketing -- 4
//! ```

use std::f64::consts::PI;

use turbulink::ipe::{
    lowest_mode_probability, propagate_checkpoints, DensityMatrix, PropagationScheme, SolverConfig,
};
use turbulink::lg::{Frequencies, LGIndex, ModeBasis};
use turbulink::turbulence::{integrated_l, DecayMode, LinkGeometry, TurbulenceProfile};

fn main() -> turbulink::Result<()> {
    let max_cutoff: usize = std::env::args()
        .nth(1)
        .map_or(3, |a| a.parse().expect("cutoff"));
    let lambda = 3.95e-6;
    let zr = 10e3;
    let w0 = (zr * lambda / PI).sqrt();
    let geom = LinkGeometry::new(zr, 19.0, 19.0, w0, lambda)?;

    // scale C_n^2 so that the integrated strength reaches 0.1 at the receiver
    let unit = integrated_l(
        &TurbulenceProfile::Constant(1.0),
        &geom,
        DecayMode::Single(lambda),
    )?;
    let profile = TurbulenceProfile::Constant(0.1 / unit);
    println!("C_n^2 = {:.3e} m^-2/3, w0 = {:.4} m", 0.1 / unit, w0);

    let checkpoints = 4;
    print!("{:>3} {:>9}", "N", "scheme");
    for k in 0..=checkpoints {
        print!("  l_I={:<5.3}", 0.1 * k as f64 / checkpoints as f64);
    }
    println!();
    for n in 0..=max_cutoff {
        let basis = ModeBasis::new(n)?;
        let rho0 = DensityMatrix::pure(&basis, LGIndex::GAUSSIAN)?;
        for (name, scheme) in [
            ("exact", PropagationScheme::TruncatedExact),
            ("lindblad", PropagationScheme::LindbladTruncated),
        ] {
            let traj = propagate_checkpoints(
                &rho0,
                &profile,
                &geom,
                &SolverConfig::new(n, scheme),
                Frequencies::Single(lambda),
                checkpoints,
            )?;
            print!("{n:>3} {name:>9}");
            for (_, rho) in &traj {
                print!("  {:<10.5}", lowest_mode_probability(rho)?);
            }
            println!();
        }
    }
    Ok(())
}
