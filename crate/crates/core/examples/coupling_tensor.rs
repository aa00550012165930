//! Inspect the turbulence coupling tensor in a small Laguerre-Gaussian basis
//! and dump it as CSV.

use std::f64::consts::PI;

use turbulink::lg::{coupling_l, CouplingTensor, Frequencies, LGIndex, ModeBasis};

fn main() -> turbulink::Result<()> {
    let (lambda, w0, cn2) = (3.95e-6, 0.1457, 1e-15);
    let zr = PI * w0 * w0 / lambda;
    let basis = ModeBasis::new(2)?;
    let tensor = CouplingTensor::assemble(&basis, zr, cn2, w0, Frequencies::Single(lambda), None)?;
    println!(
        "{} modes, {} allowed entries (of {}), z = z_R = {:.1} km",
        basis.len(),
        tensor.entries().len(),
        basis.len().pow(4),
        zr / 1e3
    );

    let g = LGIndex::GAUSSIAN;
    let show = |label: &str, m, n, u, v| -> turbulink::Result<()> {
        let l = coupling_l(m, n, u, v, zr, cn2, w0, Frequencies::Single(lambda), None)?;
        println!("{label:28} {:+.4e} {:+.4e}i  1/m", l.re, l.im);
        Ok(())
    };
    show("L(00,00,00,00) decay", g, g, g, g)?;
    show(
        "L(00,00,(0,1),(0,1)) feed",
        g,
        g,
        LGIndex::new(0, 1),
        LGIndex::new(0, 1),
    )?;
    show(
        "L(00,00,(1,0),(1,0)) feed",
        g,
        g,
        LGIndex::new(1, 0),
        LGIndex::new(1, 0),
    )?;
    show(
        "L(00,00,(0,1),(0,-1)) zero",
        g,
        g,
        LGIndex::new(0, 1),
        LGIndex::new(0, -1),
    )?;

    let path = std::env::temp_dir().join("coupling.csv");
    tensor.write_csv(std::fs::File::create(&path)?)?;
    println!("wrote {}", path.display());
    Ok(())
}
