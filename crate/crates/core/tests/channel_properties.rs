use turbulink::channel::{
    channel_kernel, transmission_matrix, ChannelKernel, KernelFidelity, KernelOptions,
};
use turbulink::ipe::{analytic_decay, PropagationScheme};
use turbulink::schmidt::BiphotonSpec;
use turbulink::turbulence::{DecayMode, LinkGeometry, TurbulenceProfile};

fn kernel(cn2: f64, order: usize, fidelity: KernelFidelity) -> ChannelKernel {
    channel_kernel(
        &BiphotonSpec::mid_infrared(),
        &TurbulenceProfile::Constant(cn2),
        &LinkGeometry::coastal_link(0.1457),
        &KernelOptions {
            order,
            fidelity,
            ..KernelOptions::default()
        },
    )
    .unwrap()
}

#[test]
fn kernel_is_a_symmetric_probability_table() {
    let k = kernel(1e-15, 32, KernelFidelity::Analytic);
    for i in 0..32 {
        for j in 0..32 {
            assert_eq!(k.p(i, j), k.p(j, i));
            assert!(k.p(i, j) > 0.0 && k.p(i, j) <= 1.0);
        }
    }
}

#[test]
fn diagonal_is_the_single_frequency_decay() {
    let k = kernel(1e-15, 24, KernelFidelity::Analytic);
    let profile = TurbulenceProfile::Constant(1e-15);
    for (i, &omega) in k.omegas().iter().enumerate() {
        let lambda = BiphotonSpec::wavelength_of(omega);
        let geom = LinkGeometry::new(30e3, 19.0, 19.0, 0.1457, lambda).unwrap();
        let p = analytic_decay(&profile, &geom, DecayMode::Single(lambda)).unwrap();
        assert!((k.p(i, i) / p - 1.0).abs() < 1e-9, "node {i}");
    }
}

#[test]
fn rows_conserve_probability_with_leakage() {
    let s = transmission_matrix(&kernel(1e-15, 48, KernelFidelity::Analytic), 3).unwrap();
    for n in 0..4 {
        let total: f64 = s.row(n).iter().sum::<f64>() + s.leakage(n);
        assert!((total - 1.0).abs() < 1e-6);
    }
}

#[test]
fn grid_refinement_is_stable() {
    let coarse = transmission_matrix(&kernel(1e-15, 32, KernelFidelity::Analytic), 3).unwrap();
    let fine = transmission_matrix(&kernel(1e-15, 64, KernelFidelity::Analytic), 3).unwrap();
    for n in 0..4 {
        for m in 0..4 {
            assert!((coarse.get(n, m) - fine.get(n, m)).abs() < 1e-4);
        }
    }
}

// Scattering back into the fundamental mode is absent from the pure-decay
// law, so the propagated kernel sits above it; in weak turbulence the two
// coincide.
#[test]
fn propagated_kernel_against_pure_decay() {
    let full = KernelFidelity::FullIpe {
        cutoff: 1,
        scheme: PropagationScheme::TruncatedExact,
    };
    let excess = |cn2| -> Vec<f64> {
        let a = kernel(cn2, 6, KernelFidelity::Analytic);
        let b = kernel(cn2, 6, full);
        (0..36)
            .map(|k| b.p(k / 6, k % 6) / a.p(k / 6, k % 6) - 1.0)
            .collect()
    };
    let moderate = excess(1e-16);
    assert!(moderate.iter().all(|&r| r > 0.0), "{moderate:?}");
    let weak = excess(1e-18);
    assert!(weak.iter().all(|r| r.abs() < 0.02), "{weak:?}");
}
