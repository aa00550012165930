use std::f64::consts::PI;

use num_complex::Complex64;
use turbulink::lg::{coupling_l, CouplingTensor, Frequencies, LGIndex, ModeBasis};

const LAMBDA: f64 = 3.95e-6;
const W0: f64 = 0.1457;

#[test]
fn selection_rule_over_all_small_tuples() {
    let basis = ModeBasis::new(2).unwrap();
    let modes = basis.modes();
    for freq in [
        Frequencies::Single(LAMBDA),
        Frequencies::Pair(4.7e14, 4.8e14),
    ] {
        for &m in modes {
            for &n in modes {
                for &u in modes {
                    for &v in modes {
                        let l = coupling_l(m, n, u, v, 2e4, 1e-15, W0, freq, None).unwrap();
                        if m.l - u.l != n.l - v.l {
                            assert_eq!(l, Complex64::new(0.0, 0.0), "{m}{n}{u}{v}");
                        }
                    }
                }
            }
        }
    }
}

// Completeness makes sum_n L_{n,n,m,u} vanish (finite part) only in the
// untruncated basis. The residual must shrink as the cutoff grows.
#[test]
fn trace_identity_converges_with_cutoff() {
    let f = Frequencies::Single(LAMBDA);
    let g = LGIndex::GAUSSIAN;
    let z = PI * W0 * W0 / LAMBDA;
    let scale = coupling_l(g, g, g, g, z, 1e-16, W0, f, None)
        .unwrap()
        .norm();
    let pairs = [
        (g, g),
        (LGIndex::new(1, 0), LGIndex::new(1, 0)),
        (LGIndex::new(0, 1), LGIndex::new(1, 1)),
        (g, LGIndex::new(1, 0)),
    ];
    let mut last = f64::INFINITY;
    for cutoff in 1..=8 {
        let basis = ModeBasis::new(cutoff).unwrap();
        let mut worst: f64 = 0.0;
        for (m, u) in pairs {
            let s: Complex64 = basis
                .modes()
                .iter()
                .map(|&n| coupling_l(n, n, m, u, z, 1e-16, W0, f, None).unwrap())
                .sum();
            worst = worst.max(s.norm() / scale);
        }
        assert!(worst < last, "cutoff {cutoff}: {worst} after {last}");
        last = worst;
    }
    assert!(last < 0.025, "{last}");
}

#[test]
fn neighbouring_transitions_dominate() {
    let basis = ModeBasis::new(2).unwrap();
    let tensor =
        CouplingTensor::assemble(&basis, 3e4, 1e-15, W0, Frequencies::Single(LAMBDA), None)
            .unwrap();
    let g = LGIndex::GAUSSIAN;
    let rate = |u: LGIndex| tensor.get(g, g, u, u).unwrap().norm();
    let neighbour = rate(LGIndex::new(0, 1));
    for &u in basis.modes() {
        if u.abs_l() >= 2 {
            assert!(rate(u) < neighbour / 20.0, "{u}");
        }
    }
    let l0 = tensor.get(g, g, g, g).unwrap().norm();
    for e in tensor.entries() {
        let (m, u) = (basis.modes()[e.m as usize], basis.modes()[e.u as usize]);
        if (m.l - u.l).abs() >= 2 {
            assert!(e.value.norm() < 0.1 * l0);
        }
    }
}
