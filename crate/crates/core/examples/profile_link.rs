//! A slant link through a height-dependent turbulence profile read from CSV.

use std::path::Path;

use turbulink::ipe::{analytic_decay, analytic_decay_to};
use turbulink::turbulence::{
    cn2_at, integrated_l, path_height, DecayMode, LinkGeometry, TurbulenceProfile,
};

const PROFILE: &str = "\
height_m,cn2
5,2e-14
20,6e-15
100,1.5e-15
500,4e-16
2000,8e-17
";

fn main() -> turbulink::Result<()> {
    let profile = TurbulenceProfile::from_csv_str(PROFILE, Path::new("inline"))?;
    let lambda = 1.55e-6;
    // ground station at 10 m to a mast at 400 m over 20 km
    let geom = LinkGeometry::new(20e3, 10.0, 400.0, 0.05, lambda)?;

    println!(" z_km  h_m      C_n^2      P(z)");
    for k in 0..=10 {
        let z = geom.path_length() * k as f64 / 10.0;
        println!(
            "{:5.1} {:6.1}  {:.3e}  {:.4}",
            z / 1e3,
            path_height(&geom, z)?,
            cn2_at(&profile, &geom, z)?,
            analytic_decay_to(&profile, &geom, DecayMode::Single(lambda), z)?
        );
    }
    println!(
        "int l dz = {:.4e}, P(z_f) = {:.4}",
        integrated_l(&profile, &geom, DecayMode::Single(lambda))?,
        analytic_decay(&profile, &geom, DecayMode::Single(lambda))?
    );
    Ok(())
}
