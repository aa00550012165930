//! Drive the command layer from code: load a TOML run description, sweep
//! two keys, and write the table that `turbulink sweep beam` would produce.

use turbulink::app::{parse_config_str, run_sweep, Target};

const CONFIG: &str = r#"
[link]
distance_m = 30000.0
wavelength_um = 3.95

[turbulence]
cn2 = 1e-16

[[sweep.axes]]
key = "link.waist_m"
start = 0.08
stop = 0.22
count = 8

[[sweep.axes]]
key = "turbulence.cn2"
values = [1e-16, 5e-16]
"#;

fn main() -> turbulink::Result<()> {
    let cfg = parse_config_str(CONFIG)?;
    cfg.validate()?;
    let table = run_sweep(&cfg, Target::Beam)?;
    print!("{}", table.to_csv());
    Ok(())
}
