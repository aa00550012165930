use std::f64::consts::PI;

use proptest::prelude::*;
use turbulink::schmidt::SPEED_OF_LIGHT;
use turbulink::turbulence::{l_cross, l_strength, optimal_waist, path_height, LinkGeometry};

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-9 * (a + b) {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decay_density_minimized_at_diffraction_waist(
        lambda_um in 0.5f64..12.0,
        z_km in 0.5f64..100.0,
    ) {
        let (lambda, z) = (lambda_um * 1e-6, z_km * 1e3);
        let w = optimal_waist(lambda, z);
        let found = golden_min(|w0| l_strength(z, 1e-15, lambda, w0), w / 20.0, w * 20.0);
        prop_assert!((found / w - 1.0).abs() < 1e-3, "{} vs {}", found, w);
    }

    #[test]
    fn equal_frequencies_reduce_to_single(omega in 1e14f64..2e15, z in 0.0f64..1e5, w0 in 0.01f64..0.5) {
        let lambda = 2.0 * PI * SPEED_OF_LIGHT / omega;
        let (a, b) = (l_cross(z, omega, omega, 1e-15, w0), l_strength(z, 1e-15, lambda, w0));
        prop_assert!((a / b - 1.0).abs() < 1e-13, "{} vs {}", a, b);
    }

    #[test]
    fn path_height_convex_and_symmetric(
        length_km in 1.0f64..200.0,
        h in 1.0f64..500.0,
        f in 0.0f64..1.0,
    ) {
        let geom = LinkGeometry::new(length_km * 1e3, h, h, 0.1, 1.55e-6).unwrap();
        let l = geom.path_length();
        let z = f * l;
        let a = path_height(&geom, z).unwrap();
        let b = path_height(&geom, l - z).unwrap();
        prop_assert!((a - b).abs() <= 1e-6 * h.max(1.0));
        // the chord sags towards the surface mid-path
        let dz = 0.01 * l;
        prop_assume!(z > dz && z < l - dz);
        let left = path_height(&geom, z - dz).unwrap();
        let right = path_height(&geom, z + dz).unwrap();
        prop_assert!(2.0 * a <= left + right + 1e-9 * h);
    }
}
