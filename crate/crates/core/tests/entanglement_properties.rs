use num_complex::Complex64;
use proptest::prelude::*;
use turbulink::channel::{channel_kernel, channel_tensor, ChannelKernel, KernelOptions};
use turbulink::entanglement::{
    log_negativity, propagate_pair, robustness_scan, TwoPhotonDensity, TwoPhotonState,
};
use turbulink::schmidt::BiphotonSpec;
use turbulink::turbulence::{LinkGeometry, TurbulenceProfile};

fn kernel(cn2: f64, order: usize) -> ChannelKernel {
    channel_kernel(
        &BiphotonSpec::mid_infrared(),
        &TurbulenceProfile::Constant(cn2),
        &LinkGeometry::coastal_link(0.1457),
        &KernelOptions {
            order,
            ..KernelOptions::default()
        },
    )
    .unwrap()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// `sum_k p_k |a_k><a_k| (x) |b_k><b_k|` on `m` modes per photon.
fn product_mixture(m: usize, terms: &[(f64, Vec<f64>, Vec<f64>)]) -> TwoPhotonDensity {
    let d = m * m;
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    let total: f64 = terms.iter().map(|t| t.0).sum();
    for (p, a, b) in terms {
        let (a, b) = (unit(a), unit(b));
        for a1 in 0..m {
            for a2 in 0..m {
                for b1 in 0..m {
                    for b2 in 0..m {
                        data[(a1 * m + a2) * d + b1 * m + b2] +=
                            p / total * a[a1] * a[b1] * b[a2] * b[b2];
                    }
                }
            }
        }
    }
    TwoPhotonDensity::from_data(m, data).unwrap()
}

#[test]
fn channel_tensor_exchange_symmetry() {
    let m = 6;
    let c = channel_tensor(&kernel(1e-15, 32), m).unwrap();
    let at = |u: usize, v: usize, a: usize, b: usize| c[((u * m + v) * m + a) * m + b];
    for u in 0..m {
        for v in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let x = at(u, v, a, b);
                    assert!((x - at(v, u, b, a)).abs() <= 1e-14, "{u}{v}{a}{b}");
                    assert!((x - at(a, v, u, b)).abs() <= 1e-14, "{u}{v}{a}{b}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn separable_mixtures_have_no_negativity(
        terms in prop::collection::vec(
            (
                0.05f64..1.0,
                prop::collection::vec(-1.0f64..1.0, 4),
                prop::collection::vec(-1.0f64..1.0, 4),
            ),
            1..4,
        ),
    ) {
        prop_assume!(terms.iter().all(|(_, a, b)| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-3 && b.iter().map(|x| x * x).sum::<f64>() > 1e-3
        }));
        let rho = product_mixture(4, &terms);
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(log_negativity(&rho).unwrap() < 1e-9);
    }
}

#[test]
fn vacuum_link_leaves_the_state_alone() {
    let k = kernel(0.0, 32);
    let psi = TwoPhotonState::bell(0, 1, 6).unwrap();
    for single_sided in [false, true] {
        let out = propagate_pair(&psi, &k, single_sided).unwrap();
        assert!((out.mass - 1.0).abs() < 1e-10);
        let ev = out.density.eigenvalues().unwrap();
        assert!(ev.iter().all(|&e| e >= -1e-9), "{ev:?}");
        assert!((log_negativity(&out.density).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn turbulence_does_not_create_much_entanglement() {
    let k = kernel(1e-15, 48);
    let rows = robustness_scan(&k, 0, 8, 12, false).unwrap();
    for r in &rows {
        assert!(r.en_final <= r.en_initial + 0.05, "{r:?}");
        assert!(r.fidelity > 0.0 && r.fidelity <= 1.0 + 1e-9, "{r:?}");
    }
}

#[test]
fn even_superpositions_outlast_consecutive_ones() {
    let k = kernel(1e-15, 48);
    let en = |ks: &[usize]| {
        let psi = TwoPhotonState::correlated(ks, 12).unwrap();
        log_negativity(&propagate_pair(&psi, &k, false).unwrap().density).unwrap()
    };
    let (even, consecutive) = (en(&[0, 2, 4]), en(&[0, 1, 2]));
    assert!(even > consecutive, "{even} vs {consecutive}");
}
