//! Log-negativity of two-mode and three-mode entangled pairs after one
//! photon (or both) crosses the turbulent link.

use turbulink::channel::{channel_kernel, KernelOptions};
use turbulink::entanglement::{log_negativity, propagate_pair, robustness_scan, TwoPhotonState};
use turbulink::schmidt::BiphotonSpec;
use turbulink::turbulence::{LinkGeometry, TurbulenceProfile};

const MODES: usize = 12;

fn main() -> turbulink::Result<()> {
    let kernel = channel_kernel(
        &BiphotonSpec::mid_infrared(),
        &TurbulenceProfile::Constant(1e-16),
        &LinkGeometry::coastal_link(0.1457),
        &KernelOptions::default(),
    )?;

    println!("(|0> |n> + |n> |0>)/sqrt 2, both photons transmitted");
    for row in robustness_scan(&kernel, 0, 10, MODES, false)? {
        println!(
            "  n = {:2}  E_N {:.4} -> {:.4}  fidelity {:.5}{}",
            row.n,
            row.en_initial,
            row.en_final,
            row.fidelity,
            if row.degenerate {
                "  (product input)"
            } else {
                ""
            }
        );
    }

    println!("\nthree-mode superpositions");
    for ks in [[0, 1, 2], [0, 2, 4], [1, 3, 5], [3, 4, 5]] {
        let psi = TwoPhotonState::correlated(&ks, MODES)?;
        let both = propagate_pair(&psi, &kernel, false)?;
        let one = propagate_pair(&psi, &kernel, true)?;
        println!(
            "  {ks:?}: E_N {:.4}, after the link {:.4} (both) / {:.4} (one)",
            log_negativity(&psi.density())?,
            log_negativity(&both.density)?,
            log_negativity(&one.density)?
        );
    }
    Ok(())
}
