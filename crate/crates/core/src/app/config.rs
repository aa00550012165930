//! Run configuration: a TOML document of nested tables, every key optional.
//!
//! ```toml
//! [link]
//! distance_m = 30000.0
//! wavelength_um = 3.95
//! waist_m = 0.1457
//!
//! [turbulence]
//! cn2 = 1e-15
//!
//! [[sweep.axes]]
//! key = "link.waist_m"
//! start = 0.05
//! stop = 0.30
//! count = 26
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{KernelFidelity, KernelOptions};
use crate::error::{Error, Result};
use crate::ipe::{PropagationScheme, SolverConfig};
use crate::schmidt::BiphotonSpec;
use crate::turbulence::{
    optimal_waist, LinkGeometry, TurbulenceProfile, CN2_MAX, CN2_MIN, EARTH_RADIUS,
};

/// Largest number of points a sweep may expand to.
pub const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub link: LinkConfig,
    pub turbulence: TurbulenceConfig,
    pub source: SourceConfig,
    pub solver: SolverSection,
    pub coupling: CouplingConfig,
    pub channel: ChannelConfig,
    pub entangle: EntangleConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaistRuleName {
    /// Use `waist_m` as given.
    Fixed,
    /// `waist_scale * (lambda z / pi)^{1/2}`.
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub distance_m: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub wavelength_um: f64,
    pub waist_m: f64,
    pub waist_rule: WaistRuleName,
    pub waist_scale: f64,
    pub earth_radius_m: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            distance_m: 30e3,
            tx_height_m: 19.0,
            rx_height_m: 19.0,
            wavelength_um: 3.95,
            waist_m: 0.1457,
            waist_rule: WaistRuleName::Fixed,
            waist_scale: 0.75,
            earth_radius_m: EARTH_RADIUS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TurbulenceConfig {
    /// Constant structure constant in m^{-2/3}; zero switches turbulence off.
    pub cn2: f64,
    /// CSV profile `height_m,cn2`; overrides `cn2` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<PathBuf>,
    pub extinction_per_km: f64,
}

impl Default for TurbulenceConfig {
    fn default() -> Self {
        Self {
            cn2: 1e-15,
            profile: None,
            extinction_per_km: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    /// Pump bandwidth in 10^12 rad/s.
    pub sigma_a_trad_s: f64,
    /// Phase-matching bandwidth in 10^12 rad/s.
    pub sigma_b_trad_s: f64,
    /// Highest Schmidt mode kept when truncating.
    pub max_mode: usize,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            sigma_a_trad_s: 10.0,
            sigma_b_trad_s: 80.0,
            max_mode: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Exact,
    Lindblad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub cutoff: usize,
    pub scheme: SchemeName,
    pub steps: usize,
    pub check_convergence: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            cutoff: d.cutoff,
            scheme: SchemeName::Exact,
            steps: d.steps,
            check_convergence: d.check_convergence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingConfig {
    /// Distance at which the tensor is dumped; the link end when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityName {
    Analytic,
    FullIpe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub grid_order: usize,
    pub fidelity: FidelityName,
    /// Transmission matrix over modes `0..=matrix_max_mode`.
    pub matrix_max_mode: usize,
    /// Mode traces for `0..=trace_max_mode`.
    pub trace_max_mode: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            grid_order: KernelOptions::default().order,
            fidelity: FidelityName::Analytic,
            matrix_max_mode: 3,
            trace_max_mode: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntangleConfig {
    pub fixed_mode: usize,
    pub max_mode: usize,
    pub modes: usize,
    pub single_sided: bool,
}

impl Default for EntangleConfig {
    fn default() -> Self {
        Self {
            fixed_mode: 0,
            max_mode: 10,
            modes: 12,
            single_sided: false,
        }
    }
}

/// One sweep axis: explicit `values`, or `count` points from `start` to
/// `stop` (geometric when `log` is set).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Axis {
    pub key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub log: bool,
}

impl Axis {
    /// Axis values in ascending order.
    pub fn points(&self) -> Result<Vec<f64>> {
        let bad = |reason: &str| Error::Range {
            key: format!("sweep.axes.{}", self.key),
            reason: reason.into(),
        };
        let mut v = match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if n == 0 {
                    return Err(bad("count must be positive"));
                }
                if self.log && (a <= 0.0 || b <= 0.0) {
                    return Err(bad("log axes need positive bounds"));
                }
                if n == 1 {
                    vec![a]
                } else {
                    let span = (n - 1) as f64;
                    (0..n)
                        .map(|i| {
                            let (wa, wb) = ((n - 1 - i) as f64, i as f64);
                            if self.log {
                                10f64.powf((a.log10() * wa + b.log10() * wb) / span)
                            } else {
                                (a * wa + b * wb) / span
                            }
                        })
                        .collect()
                }
            }
            _ => {
                return Err(bad(
                    "give either `values` or all of `start`, `stop`, `count`",
                ))
            }
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(bad("values must be finite and non-empty"));
        }
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Reserved; every computation is deterministic.
    pub seed: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn range(key: &str, reason: impl Into<String>) -> Error {
    Error::Range {
        key: key.into(),
        reason: reason.into(),
    }
}

fn check(key: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v >= lo && v <= hi) {
        return Err(range(key, format!("{v} not in [{lo}, {hi}]")));
    }
    Ok(())
}

impl RunConfig {
    /// Range-checks every physical value and the referenced files.
    pub fn validate(&self) -> Result<()> {
        let l = &self.link;
        check("link.wavelength_um", l.wavelength_um, 0.3, 15.0)?;
        check("link.distance_m", l.distance_m, 1e-3, 500e3)?;
        check("link.tx_height_m", l.tx_height_m, 0.0, 1e5)?;
        check("link.rx_height_m", l.rx_height_m, 0.0, 1e5)?;
        check("link.waist_m", l.waist_m, 1e-4, 10.0)?;
        check("link.waist_scale", l.waist_scale, 1e-3, 100.0)?;
        check("link.earth_radius_m", l.earth_radius_m, 1e3, 1e9)?;
        let t = &self.turbulence;
        if t.cn2 != 0.0 {
            check("turbulence.cn2", t.cn2, CN2_MIN, CN2_MAX)?;
        }
        if let Some(p) = &t.profile {
            if !p.is_file() {
                return Err(range(
                    "turbulence.profile",
                    format!("{} does not exist", p.display()),
                ));
            }
        }
        check(
            "turbulence.extinction_per_km",
            t.extinction_per_km,
            0.0,
            100.0,
        )?;
        let s = &self.source;
        check("source.sigma_a_trad_s", s.sigma_a_trad_s, 1e-3, 1e4)?;
        check("source.sigma_b_trad_s", s.sigma_b_trad_s, 1e-3, 1e4)?;
        if s.max_mode > 64 {
            return Err(range("source.max_mode", "at most 64"));
        }
        self.solver_config()
            .validate()
            .map_err(|e| range("solver", e.to_string()))?;
        let c = &self.channel;
        check("channel.grid_order", c.grid_order as f64, 2.0, 64.0)?;
        if c.matrix_max_mode > c.grid_order / 2 {
            return Err(range(
                "channel.matrix_max_mode",
                "not resolved by channel.grid_order",
            ));
        }
        if c.trace_max_mode > c.grid_order / 2 {
            return Err(range(
                "channel.trace_max_mode",
                "not resolved by channel.grid_order",
            ));
        }
        let e = &self.entangle;
        check("entangle.modes", e.modes as f64, 1.0, 14.0)?;
        if e.fixed_mode >= e.modes || e.max_mode >= e.modes {
            return Err(range(
                "entangle.max_mode",
                "scan modes must be below entangle.modes",
            ));
        }
        if let Some(z) = self.coupling.z_m {
            check("coupling.z_m", z, 0.0, l.distance_m)?;
        }
        for a in &self.sweep.axes {
            a.points()?;
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        self.link.wavelength_um * 1e-6
    }

    /// Transmitted waist after applying the waist rule.
    pub fn waist(&self) -> f64 {
        match self.link.waist_rule {
            WaistRuleName::Fixed => self.link.waist_m,
            WaistRuleName::Scaled => {
                self.link.waist_scale * optimal_waist(self.wavelength(), self.link.distance_m)
            }
        }
    }

    pub fn geometry(&self) -> Result<LinkGeometry> {
        let l = &self.link;
        LinkGeometry::with_earth_radius(
            l.distance_m,
            l.tx_height_m,
            l.rx_height_m,
            self.waist(),
            self.wavelength(),
            l.earth_radius_m,
        )
    }

    pub fn profile(&self) -> Result<TurbulenceProfile> {
        match &self.turbulence.profile {
            Some(p) => TurbulenceProfile::from_csv_file(p),
            None if self.turbulence.cn2 == 0.0 => Ok(TurbulenceProfile::Constant(0.0)),
            None => TurbulenceProfile::constant(self.turbulence.cn2),
        }
    }

    pub fn biphoton(&self) -> Result<BiphotonSpec> {
        BiphotonSpec::at_wavelength(
            self.source.sigma_a_trad_s * 1e12,
            self.source.sigma_b_trad_s * 1e12,
            self.wavelength(),
        )
    }

    pub fn scheme(&self) -> PropagationScheme {
        match self.solver.scheme {
            SchemeName::Exact => PropagationScheme::TruncatedExact,
            SchemeName::Lindblad => PropagationScheme::LindbladTruncated,
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cutoff: self.solver.cutoff,
            scheme: self.scheme(),
            steps: self.solver.steps,
            check_convergence: self.solver.check_convergence,
        }
    }

    pub fn kernel_options(&self) -> KernelOptions {
        KernelOptions {
            order: self.channel.grid_order,
            fidelity: match self.channel.fidelity {
                FidelityName::Analytic => KernelFidelity::Analytic,
                FidelityName::FullIpe => KernelFidelity::FullIpe {
                    cutoff: self.solver.cutoff,
                    scheme: self.scheme(),
                },
            },
            extinction_per_km: self.turbulence.extinction_per_km,
        }
    }

    /// Serializes back to the TOML format accepted by [`parse_config_str`].
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Applies `key=value` overrides such as `link.waist_m=0.2`.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut table = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for o in overrides {
            let o = o.as_ref();
            let (key, raw) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not key=value")))?;
            set_path(&mut table, key.trim(), parse_value(raw.trim()))?;
        }
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("override: {}", e.message())))?;
        Ok(cfg)
    }

    /// Sets one numeric key, as a sweep axis does.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let mut table = toml::Table::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        set_path(&mut table, key, toml::Value::Float(value))?;
        table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("`{key}`: {}", e.message())))
    }
}

fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Replaces the value at a dotted path, coercing numbers to the existing
/// key's integer or float type. Optional keys absent from the table are
/// created.
fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let unknown = || Error::Config(format!("unknown key `{key}`"));
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().ok_or_else(unknown)?;
    let mut cur = table;
    for p in parents {
        cur = cur
            .get_mut(*p)
            .and_then(|v| v.as_table_mut())
            .ok_or_else(unknown)?;
    }
    let value = match (cur.get(*last), value) {
        (Some(toml::Value::Integer(_)), toml::Value::Float(f)) if f.fract() == 0.0 => {
            toml::Value::Integer(f as i64)
        }
        (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Parses and validates a configuration file. Relative profile paths are
/// resolved against the file's directory.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_document(&text, &path.display().to_string())?;
    if let Some(p) = &cfg.turbulence.profile {
        if p.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.turbulence.profile = Some(base.join(p));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let cfg = parse_document(text, "<config>")?;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_document(text: &str, origin: &str) -> Result<RunConfig> {
    toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        Error::Config(format!("{origin}:{line}:{col}: {}", e.message().trim()))
    })
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_coastal_link() {
        let cfg = parse_config_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.link.distance_m, 30e3);
        assert_eq!(cfg.waist(), 0.1457);
        assert_eq!(cfg.solver.cutoff, 4);
        assert_eq!(cfg.channel.grid_order, 48);
        assert_eq!(cfg.entangle.modes, 12);
    }

    #[test]
    fn range_violation_names_key() {
        let err = parse_config_str("[link]\nwavelength_um = -1\n").unwrap_err();
        match err {
            Error::Range { key, .. } => assert!(key.contains("wavelength")),
            e => panic!("{e}"),
        }
        assert!(parse_config_str("[turbulence]\ncn2 = 1e-9\n").is_err());
        assert!(parse_config_str("[link]\ndistance_m = 6e5\n").is_err());
        assert!(parse_config_str("[turbulence]\ncn2 = 0.0\n").is_ok());
    }

    #[test]
    fn parse_error_has_line_and_column() {
        let err = parse_config_str("[link]\ndistance_m = 1000.0\nwaist_m = oops\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("<config>:3:11:"), "{msg}");
        let err = parse_config_str("[link]\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().starts_with("<config>:2:1:"), "{err}");
    }

    #[test]
    fn default_round_trips() {
        let text = "[link]\nwavelength_um = 3.95\ndistance_m = 30000.0\nwaist_m = 0.1457\n\
                    [turbulence]\ncn2 = 1e-15\n[source]\nsigma_a_trad_s = 10.0\nsigma_b_trad_s = 80.0\n";
        let cfg = parse_config_str(text).unwrap();
        let again = parse_config_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.to_toml().unwrap(), again.to_toml().unwrap());
    }

    #[test]
    fn overrides_coerce_types() {
        let cfg = RunConfig::default()
            .with_overrides(&[
                "solver.cutoff=2",
                "link.waist_m=1",
                "solver.scheme=lindblad",
            ])
            .unwrap();
        assert_eq!(cfg.solver.cutoff, 2);
        assert_eq!(cfg.link.waist_m, 1.0);
        assert_eq!(cfg.solver.scheme, SchemeName::Lindblad);
        assert!(RunConfig::default()
            .with_overrides(&["link.nope=1"])
            .is_err());
        assert!(RunConfig::default()
            .with_overrides(&["link.waist_m"])
            .is_err());
        let cfg = RunConfig::default()
            .with_value("coupling.z_m", 5e3)
            .unwrap();
        assert_eq!(cfg.coupling.z_m, Some(5e3));
        assert_eq!(
            RunConfig::default()
                .with_value("channel.grid_order", 16.0)
                .unwrap()
                .channel
                .grid_order,
            16
        );
    }

    #[test]
    fn axis_points() {
        let a = Axis {
            key: "link.waist_m".into(),
            start: Some(0.3),
            stop: Some(0.1),
            count: Some(3),
            ..Axis::default()
        };
        let p = a.points().unwrap();
        assert_eq!(p.len(), 3);
        assert!((p[0] - 0.1).abs() < 1e-15 && (p[1] - 0.2).abs() < 1e-15);
        let g = Axis {
            key: "turbulence.cn2".into(),
            start: Some(1e-17),
            stop: Some(1e-13),
            count: Some(5),
            log: true,
            ..Axis::default()
        };
        let p = g.points().unwrap();
        assert_eq!(p[2], 1e-15);
        let w = Axis {
            key: "link.waist_m".into(),
            start: Some(0.08),
            stop: Some(0.22),
            count: Some(8),
            ..Axis::default()
        };
        assert_eq!(w.points().unwrap()[7], 0.22);
        assert!(Axis {
            key: "x".into(),
            ..Axis::default()
        }
        .points()
        .is_err());
    }

    #[test]
    fn scaled_waist_rule() {
        let cfg = RunConfig::default()
            .with_overrides(&["link.waist_rule=\"scaled\"", "link.distance_m=1e4"])
            .unwrap();
        let want = 0.75 * (3.95e-6 * 1e4 / std::f64::consts::PI).sqrt();
        assert!((cfg.waist() - want).abs() < 1e-15);
    }

    #[test]
    fn missing_profile_rejected() {
        let err = parse_config_str("[turbulence]\nprofile = \"/nonexistent/p.csv\"\n").unwrap_err();
        assert!(matches!(err, Error::Range { ref key, .. } if key == "turbulence.profile"));
    }
}
