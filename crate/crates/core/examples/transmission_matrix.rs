//! Temporal-mode transmission matrix of a 30 km coastal link and the total
//! throughput of each Schmidt mode.

use turbulink::channel::{channel_kernel, mode_trace, transmission_matrix, KernelOptions};
use turbulink::schmidt::BiphotonSpec;
use turbulink::turbulence::{LinkGeometry, TurbulenceProfile};

fn main() -> turbulink::Result<()> {
    let cn2: f64 = std::env::args()
        .nth(1)
        .map_or(1e-15, |a| a.parse().expect("C_n^2"));
    let kernel = channel_kernel(
        &BiphotonSpec::mid_infrared(),
        &TurbulenceProfile::Constant(cn2),
        &LinkGeometry::coastal_link(0.1457),
        &KernelOptions::default(),
    )?;

    let s = transmission_matrix(&kernel, 3)?;
    println!("S (row: sent mode, column: received mode), C_n^2 = {cn2:.0e}");
    for n in 0..s.size() {
        let row: Vec<String> = s.row(n).iter().map(|x| format!("{x:.4}")).collect();
        println!("  [{}]  leakage {:.2e}", row.join(" "), s.leakage(n));
    }

    println!("\nmode traces");
    for n in 0..=10 {
        let t = mode_trace(&kernel, n)?;
        println!("  T_{n:<2} = {t:.4e}  ({:.1} dB)", 10.0 * t.log10());
    }
    Ok(())
}
