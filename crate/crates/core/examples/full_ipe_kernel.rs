//! Two-frequency decay kernel from the closed-form pure-decay law against
//! the same kernel obtained by integrating the cross-frequency propagation
//! equation in a truncated mode basis.

use std::time::Instant;

use turbulink::channel::{channel_kernel, transmission_matrix, KernelFidelity, KernelOptions};
use turbulink::ipe::PropagationScheme;
use turbulink::schmidt::BiphotonSpec;
use turbulink::turbulence::{LinkGeometry, TurbulenceProfile};

fn main() -> turbulink::Result<()> {
    let spec = BiphotonSpec::mid_infrared();
    let geom = LinkGeometry::coastal_link(0.1457);
    let profile = TurbulenceProfile::Constant(1e-17);
    let order = 8;

    let mut kernels = Vec::new();
    for fidelity in [
        KernelFidelity::Analytic,
        KernelFidelity::FullIpe {
            cutoff: 1,
            scheme: PropagationScheme::TruncatedExact,
        },
    ] {
        let start = Instant::now();
        let k = channel_kernel(
            &spec,
            &profile,
            &geom,
            &KernelOptions {
                order,
                fidelity,
                ..KernelOptions::default()
            },
        )?;
        println!("{fidelity:?}: {:.2} s", start.elapsed().as_secs_f64());
        kernels.push(k);
    }

    let mut worst: f64 = 0.0;
    for i in 0..order {
        for j in 0..order {
            let (a, b) = (kernels[0].p(i, j), kernels[1].p(i, j));
            worst = worst.max((a - b).abs() / a);
        }
    }
    println!("largest relative kernel difference: {:.3}%", 100.0 * worst);

    for k in &kernels {
        let s = transmission_matrix(k, 1)?;
        println!(
            "{:?}: S00 = {:.5}, S01 = {:.5}",
            k.fidelity(),
            s.get(0, 0),
            s.get(0, 1)
        );
    }
    Ok(())
}
