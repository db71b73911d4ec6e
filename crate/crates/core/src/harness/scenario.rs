//! Named parameter sweeps.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::config::{
    ExperimentConfig, Initial, Mode, Tier, DEFAULT_DT_ODE, DEFAULT_DT_PDE, DEFAULT_N_POINTS,
    DEFAULT_SAMPLE_INTERVAL, DEFAULT_X_MAX, DEFAULT_X_MIN,
};
use crate::ode::Stepper;

pub const SCENARIOS: [&str; 4] = ["dark-accel", "dark-compare", "bright-accel", "bright-compare"];

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_D: f64 = -200.0;
pub const DARK_T_MAX: f64 = 100.0;
pub const BRIGHT_T_MAX: f64 = 50.0;
pub const BRIGHT_ETA0: f64 = 0.5;

fn base(mode: Mode, initial: Initial, t_max: f64, tiers: &[Tier], out_path: std::path::PathBuf) -> ExperimentConfig {
    ExperimentConfig {
        mode,
        c: DEFAULT_C,
        d: DEFAULT_D,
        initial,
        t_max,
        dt_pde: DEFAULT_DT_PDE,
        dt_ode: DEFAULT_DT_ODE,
        x_min: DEFAULT_X_MIN,
        x_max: DEFAULT_X_MAX,
        n_points: DEFAULT_N_POINTS,
        stepper: Stepper::Rk4,
        tiers: tiers.to_vec(),
        sample_interval: DEFAULT_SAMPLE_INTERVAL,
        out_path,
    }
}

pub fn dark_config(a0: f64, tiers: &[Tier]) -> ExperimentConfig {
    base(Mode::Dark, Initial::Dark { a0, x0: 0.0 }, DARK_T_MAX, tiers, "dark.csv".into())
}

pub fn bright_config(xi0: f64, tiers: &[Tier]) -> ExperimentConfig {
    let initial = Initial::Bright {
        eta0: BRIGHT_ETA0,
        xi0,
        zeta0: 0.0,
        phi0: 0.0,
    };
    base(Mode::Bright, initial, BRIGHT_T_MAX, tiers, "bright.csv".into())
}

/// The runs of a named scenario, with output files `<name>_<index>.csv` in `out_dir`.
pub fn scenario(name: &str, out_dir: &Path) -> Result<Vec<ExperimentConfig>> {
    let mut runs = match name {
        "dark-accel" => [0.0, 0.25, 0.5]
            .map(|a| dark_config(a, &[Tier::Pde, Tier::OdeFull]))
            .to_vec(),
        "dark-compare" => [0.0, 0.5]
            .map(|a| dark_config(a, &[Tier::Pde, Tier::OdeFull, Tier::Eom, Tier::EomA]))
            .to_vec(),
        "bright-accel" => [0.0, 0.25, 0.5]
            .map(|xi| bright_config(xi, &[Tier::Pde, Tier::OdeFull]))
            .to_vec(),
        "bright-compare" => [0.0, 0.5]
            .map(|xi| bright_config(xi, &[Tier::Pde, Tier::OdeFull, Tier::Eom]))
            .to_vec(),
        other => {
            return Err(Error::config(format!(
                "unknown scenario '{other}' (expected one of {})",
                SCENARIOS.join(", ")
            )))
        }
    };
    for (k, run) in runs.iter_mut().enumerate() {
        run.out_path = out_dir.join(format!("{name}_{k}.csv"));
    }
    Ok(runs)
}
