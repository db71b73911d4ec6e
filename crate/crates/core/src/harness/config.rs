//! `key=value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dark::DarkSolitonParams;
use crate::bright::BrightSolitonParams;
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::ode::Stepper;
use crate::pde::stable_dt_limit;
use crate::profile::make_inverse_square;

/// Minimum distance between the soliton and either edge of the domain.
pub const EDGE_MARGIN: f64 = 30.0;

pub const DEFAULT_DT_PDE: f64 = 5e-4;
pub const DEFAULT_DT_ODE: f64 = 1e-3;
pub const DEFAULT_X_MIN: f64 = -150.0;
pub const DEFAULT_X_MAX: f64 = 150.0;
pub const DEFAULT_N_POINTS: usize = 4097;
/// PDE steps between samples; 200 × 5e-4 = 0.1 time units.
pub const DEFAULT_SAMPLE_INTERVAL: usize = 200;

const KEYS: &[&str] = &[
    "mode",
    "C",
    "D",
    "A0",
    "x0_0",
    "eta0",
    "xi0",
    "zeta0",
    "phi0",
    "t_max",
    "dt_pde",
    "dt_ode",
    "x_min",
    "x_max",
    "n_points",
    "stepper",
    "tiers",
    "sample_interval",
    "out_path",
];

const DARK_ONLY: &[&str] = &["A0", "x0_0"];
const BRIGHT_ONLY: &[&str] = &["eta0", "xi0", "zeta0", "phi0"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Dark,
    Bright,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dark" => Ok(Mode::Dark),
            "bright" => Ok(Mode::Bright),
            other => Err(Error::config(format!("unknown mode '{other}' (dark | bright)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Dark => "dark",
            Mode::Bright => "bright",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    Pde,
    OdeFull,
    OdeTaylor,
    Eom,
    EomA,
}

impl Tier {
    pub const ALL: [Tier; 5] = [Tier::Pde, Tier::OdeFull, Tier::OdeTaylor, Tier::Eom, Tier::EomA];

    pub fn name(self) -> &'static str {
        match self {
            Tier::Pde => "pde",
            Tier::OdeFull => "ode-full",
            Tier::OdeTaylor => "ode-taylor",
            Tier::Eom => "eom",
            Tier::EomA => "eom-a",
        }
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tier::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::config(format!("unknown tier '{s}'")))
    }
}

/// Initial soliton parameters for either mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    Dark { a0: f64, x0: f64 },
    Bright { eta0: f64, xi0: f64, zeta0: f64, phi0: f64 },
}

impl Initial {
    pub fn center(&self) -> f64 {
        match *self {
            Initial::Dark { x0, .. } => x0,
            Initial::Bright { zeta0, .. } => zeta0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub c: f64,
    pub d: f64,
    pub initial: Initial,
    pub t_max: f64,
    pub dt_pde: f64,
    pub dt_ode: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub stepper: Stepper,
    pub tiers: Vec<Tier>,
    pub sample_interval: usize,
    pub out_path: PathBuf,
}

/// Raw `key=value` pairs, before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    /// Parses the text form; `#` starts a comment, blank lines are skipped.
    pub fn parse(source: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in source.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::config(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(ConfigMap { entries })
    }

    /// Replaces (or adds) one key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::config(format!("unknown key '{key}'")));
        }
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::config(format!("missing key '{key}'")))?;
        parse_value(key, raw)
    }

    fn optional<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            Some(raw) => parse_value(key, raw),
            None => Ok(default),
        }
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let mode: Mode = self.required("mode")?;
        let foreign = match mode {
            Mode::Dark => BRIGHT_ONLY,
            Mode::Bright => DARK_ONLY,
        };
        if let Some(k) = foreign.iter().find(|k| self.entries.contains_key(**k)) {
            return Err(Error::config(format!("key '{k}' does not apply to {mode} runs")));
        }
        let initial = match mode {
            Mode::Dark => Initial::Dark {
                a0: self.required("A0")?,
                x0: self.required("x0_0")?,
            },
            Mode::Bright => Initial::Bright {
                eta0: self.required("eta0")?,
                xi0: self.required("xi0")?,
                zeta0: self.required("zeta0")?,
                phi0: self.optional("phi0", 0.0)?,
            },
        };
        let tiers = match self.get("tiers") {
            Some(raw) => parse_tiers(raw)?,
            None => default_tiers(mode),
        };
        let stepper = match self.get("stepper") {
            Some(raw) => raw.parse()?,
            None => Stepper::Rk4,
        };
        let config = ExperimentConfig {
            mode,
            c: self.required("C")?,
            d: self.required("D")?,
            initial,
            t_max: self.required("t_max")?,
            dt_pde: self.optional("dt_pde", DEFAULT_DT_PDE)?,
            dt_ode: self.optional("dt_ode", DEFAULT_DT_ODE)?,
            x_min: self.optional("x_min", DEFAULT_X_MIN)?,
            x_max: self.optional("x_max", DEFAULT_X_MAX)?,
            n_points: self.optional("n_points", DEFAULT_N_POINTS)?,
            stepper,
            tiers,
            sample_interval: self.optional("sample_interval", DEFAULT_SAMPLE_INTERVAL)?,
            out_path: PathBuf::from(self.get("out_path").unwrap_or("run.csv")),
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::config(format!("key '{key}': cannot parse '{raw}'")))
}

fn parse_tiers(raw: &str) -> Result<Vec<Tier>> {
    let mut tiers: Vec<Tier> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    tiers.sort();
    tiers.dedup();
    if tiers.is_empty() {
        return Err(Error::config("tiers must name at least one tier"));
    }
    Ok(tiers)
}

fn default_tiers(mode: Mode) -> Vec<Tier> {
    match mode {
        Mode::Dark => Tier::ALL.to_vec(),
        Mode::Bright => vec![Tier::Pde, Tier::OdeFull, Tier::OdeTaylor, Tier::Eom],
    }
}

/// Parses and validates a configuration file's text.
pub fn parse_config(source: &str) -> Result<ExperimentConfig> {
    ConfigMap::parse(source)?.build()
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<SpatialGrid> {
        SpatialGrid::new(self.x_min, self.x_max, self.n_points)
    }

    pub fn has(&self, tier: Tier) -> bool {
        self.tiers.contains(&tier)
    }

    /// Time between output rows.
    pub fn sample_period(&self) -> f64 {
        self.sample_interval as f64 * self.dt_pde
    }

    /// `floor(t_max / sample_period) + 1`.
    pub fn row_count(&self) -> usize {
        (self.t_max / self.sample_period() + 1e-9).floor() as usize + 1
    }

    /// ODE steps between output rows.
    pub fn ode_stride(&self) -> usize {
        (self.sample_period() / self.dt_ode).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        make_inverse_square(self.c, self.d, &grid)?;
        for (name, v) in [("t_max", self.t_max), ("dt_pde", self.dt_pde), ("dt_ode", self.dt_ode)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.sample_interval == 0 {
            return Err(Error::config("sample_interval must be at least 1"));
        }
        if self.sample_period() > self.t_max {
            return Err(Error::config("sample period exceeds t_max"));
        }
        match self.initial {
            Initial::Dark { a0, x0 } => {
                DarkSolitonParams::new(a0, x0)?;
            }
            Initial::Bright { eta0, xi0, zeta0, phi0 } => {
                BrightSolitonParams::new(eta0, xi0, zeta0, phi0)?;
                if self.has(Tier::EomA) {
                    return Err(Error::config("tier eom-a exists only for dark solitons"));
                }
            }
        }
        let center = self.initial.center();
        if center - self.x_min < EDGE_MARGIN || self.x_max - center < EDGE_MARGIN {
            return Err(Error::config(format!(
                "soliton start {center} is closer than {EDGE_MARGIN} to the domain edges"
            )));
        }
        if self.has(Tier::Pde) {
            let bound = stable_dt_limit(self.stepper, grid.dx());
            if self.dt_pde > bound {
                return Err(Error::config(format!(
                    "dt_pde = {} exceeds the {} stability bound {bound:.3e}",
                    self.dt_pde, self.stepper
                )));
            }
        }
        if self.tiers.iter().any(|t| *t != Tier::Pde) {
            let ratio = self.sample_period() / self.dt_ode;
            if (ratio - ratio.round()).abs() > 1e-6 * ratio || ratio.round() < 1.0 {
                return Err(Error::config(format!(
                    "sample period {} is not a multiple of dt_ode = {}",
                    self.sample_period(),
                    self.dt_ode
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form, parseable by [`parse_config`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode={}", self.mode);
        let _ = writeln!(s, "C={}", self.c);
        let _ = writeln!(s, "D={}", self.d);
        match self.initial {
            Initial::Dark { a0, x0 } => {
                let _ = writeln!(s, "A0={a0}");
                let _ = writeln!(s, "x0_0={x0}");
            }
            Initial::Bright { eta0, xi0, zeta0, phi0 } => {
                let _ = writeln!(s, "eta0={eta0}");
                let _ = writeln!(s, "xi0={xi0}");
                let _ = writeln!(s, "zeta0={zeta0}");
                let _ = writeln!(s, "phi0={phi0}");
            }
        }
        let _ = writeln!(s, "t_max={}", self.t_max);
        let _ = writeln!(s, "dt_pde={}", self.dt_pde);
        let _ = writeln!(s, "dt_ode={}", self.dt_ode);
        let _ = writeln!(s, "x_min={}", self.x_min);
        let _ = writeln!(s, "x_max={}", self.x_max);
        let _ = writeln!(s, "n_points={}", self.n_points);
        let _ = writeln!(s, "stepper={}", self.stepper);
        let tiers: Vec<&str> = self.tiers.iter().map(|t| t.name()).collect();
        let _ = writeln!(s, "tiers={}", tiers.join(","));
        let _ = writeln!(s, "sample_interval={}", self.sample_interval);
        let _ = writeln!(s, "out_path={}", self.out_path.display());
        s
    }
}
