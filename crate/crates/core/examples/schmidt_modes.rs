//! Schmidt decomposition of the down-converted pair and the cost of keeping
//! only the first few temporal modes.
//!
//! ```text
//! cargo run --example schmidt_modes -- 10 80
//! ```

use turbulink::schmidt::{
    mode_amplitude, schmidt_eigenvalue, schmidt_number, truncated_source, BiphotonSpec,
};

fn main() -> turbulink::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("bandwidths in units of 10^12 rad/s"))
        .collect();
    let (sa, sb) = match args[..] {
        [a, b] => (a * 1e12, b * 1e12),
        _ => (10e12, 80e12),
    };
    let spec = BiphotonSpec::at_wavelength(sa, sb, 3.95e-6)?;

    println!("sigma_a = {:.1e} rad/s, sigma_b = {:.1e} rad/s", sa, sb);
    println!("eigenvalue ratio mu = {:.4}", spec.eigen_ratio());
    println!("Schmidt number K = {:.3}", schmidt_number(&spec));
    for n in 0..6 {
        println!("  lambda_{n} = {:.4}", schmidt_eigenvalue(&spec, n)?);
    }

    for cut in [1, 3, 5, 10] {
        let src = truncated_source(&spec, cut)?;
        println!(
            "keeping n <= {cut:2}: discarded {:5.2}%",
            100.0 * src.discarded_mass()
        );
    }

    // first three temporal mode functions across the grid
    let oc = spec.omega_center();
    let width = 1.0 / spec.b().sqrt();
    println!("\n x      f_0        f_1        f_2");
    for i in -4..=4 {
        let x = i as f64 * 0.75;
        let omega = oc + x * width;
        let f: Vec<f64> = (0..3)
            .map(|n| mode_amplitude(&spec, n, omega))
            .collect::<turbulink::Result<_>>()?;
        println!("{x:5.2}  {:+.3e} {:+.3e} {:+.3e}", f[0], f[1], f[2]);
    }
    Ok(())
}
