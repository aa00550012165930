//! Compare the closed-form couplings with direct quadrature of the
//! von Karman-weighted overlap integrals.

use std::f64::consts::PI;

use turbulink::lg::oracle::{coupling_l_extrapolated, coupling_l_numeric};
use turbulink::lg::{coupling_l, Frequencies, LGIndex};
use turbulink::turbulence::SpectrumParams;

fn main() -> turbulink::Result<()> {
    let (lambda, w0, cn2) = (3.95e-6, 0.1457, 1e-16);
    let f = Frequencies::Single(lambda);
    let zr = PI * w0 * w0 / lambda;
    let g = LGIndex::GAUSSIAN;
    let tuples = [
        (g, g, g, g),
        (g, g, LGIndex::new(0, 1), LGIndex::new(0, 1)),
        (LGIndex::new(1, 0), g, g, g),
        (LGIndex::new(0, 2), g, g, LGIndex::new(0, -2)),
        (
            LGIndex::new(1, 1),
            LGIndex::new(2, -1),
            g,
            LGIndex::new(1, -2),
        ),
    ];
    println!(
        "{:>4} {:>8} {:>10} {:>10} {:>10}",
        "t", "tuple", "kappa 1e-4", "1e-7", "extrap."
    );
    for t in [0.0, 1.0] {
        for (i, &(m, n, u, v)) in tuples.iter().enumerate() {
            let exact = coupling_l(m, n, u, v, t * zr, cn2, w0, f, None)?;
            let rel = |k0w0: f64| -> turbulink::Result<f64> {
                let sp = SpectrumParams::new(k0w0 / w0)?;
                let o = coupling_l_numeric(m, n, u, v, t * zr, cn2, w0, f, &sp)?;
                Ok((o.finite_part(m == u && n == v) - exact).norm() / exact.norm())
            };
            let ex = coupling_l_extrapolated(m, n, u, v, t * zr, cn2, w0, f)?;
            println!(
                "{t:4.1} {i:>8} {:10.2e} {:10.2e} {:10.2e}",
                rel(1e-4)?,
                rel(1e-7)?,
                (ex - exact).norm() / exact.norm()
            );
        }
    }
    Ok(())
}
