//! Fundamental-mode survival probability against the transmitted waist, and
//! link length against turbulence strength with a distance-matched waist.

use turbulink::ipe::{analytic_decay, distance_sweep, WaistRule};
use turbulink::turbulence::{
    fried_parameter, optimal_waist, DecayMode, LinkGeometry, TurbulenceProfile,
};

const LAMBDA: f64 = 3.95e-6;

fn main() -> turbulink::Result<()> {
    let z = 30e3;
    println!(
        "diffraction-matched waist at {} km: {:.4} m",
        z / 1e3,
        optimal_waist(LAMBDA, z)
    );

    for cn2 in [1e-17, 1e-16, 1e-15] {
        let profile = TurbulenceProfile::constant(cn2)?;
        let mut best = (0.0, 0.0);
        for i in 0..=250 {
            let w = 0.02 + 0.001 * i as f64;
            let p = analytic_decay(
                &profile,
                &LinkGeometry::coastal_link(w),
                DecayMode::Single(LAMBDA),
            )?;
            if p > best.1 {
                best = (w, p);
            }
        }
        println!(
            "C_n^2 = {cn2:.0e}: r0 = {:.3} m, best w0 = {:.3} m, P = {:.4}",
            fried_parameter(LAMBDA, cn2, z),
            best.0,
            best.1
        );
    }

    let geom = LinkGeometry::coastal_link(0.1457);
    let distances: Vec<f64> = (1..=10).map(|k| 5e3 * k as f64).collect();
    let points = distance_sweep(
        &[1e-16, 1e-15],
        &geom,
        WaistRule::ScaledOptimum(0.75),
        &distances,
    )?;
    println!("\n cn2      z_km   w0_m    P");
    for p in points {
        println!(
            "{:.0e}  {:5.1}  {:.4}  {:.3e}",
            p.cn2,
            p.z / 1e3,
            p.waist,
            p.probability
        );
    }
    Ok(())
}
