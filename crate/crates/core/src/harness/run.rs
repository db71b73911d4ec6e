//! Runs every requested tier of one experiment on a shared sample axis.

use crate::bright::{
    self, amplitude_estimate, bright_ansatz, bright_eom_rhs, bright_rhs_full, bright_rhs_taylor,
    density_peak, extract_center_bright_windowed, BrightSolitonParams,
};
use crate::dark::{
    dark_ansatz, dark_eom_a_rhs, dark_eom_rhs, dark_rhs_full, dark_rhs_taylor, density_minimum,
    depth_estimate, DarkSolitonParams,
};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, SpatialGrid};
use crate::harness::config::{ExperimentConfig, Initial, Mode, Tier, EDGE_MARGIN};
use crate::ode::{integrate, OdeTrajectory};
use crate::pde::{evolve_with, EvolutionProblem, Schedule, Variant};
use crate::profile::{make_inverse_square, InhomogeneityProfile};

/// Half-width of the window whose edges give the background around a dark soliton.
pub const DARK_DEPTH_HALF_WIDTH: f64 = 10.0;
/// Half-width of the window used for the center integrals of a bright soliton.
pub const BRIGHT_EXTRACTION_HALF_WIDTH: f64 = 25.0;

/// A sampled series for one tier: the center plus one auxiliary parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct TierSeries {
    pub center: Vec<f64>,
    /// `A` for dark runs, `η` for bright runs; absent for the EOM tiers.
    pub aux: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeSeries {
    pub center: Vec<f64>,
    /// Depth `A` (dark) or amplitude `η` (bright) measured from the field.
    pub aux: Vec<f64>,
    /// Conserved norm at each sample.
    pub norm: Vec<f64>,
    pub max_norm_drift: f64,
    pub norm_drift_warning: bool,
}

/// All series of one run, aligned on `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    pub pde: Option<PdeSeries>,
    pub ode_full: Option<TierSeries>,
    pub ode_taylor: Option<TierSeries>,
    pub eom: Option<TierSeries>,
    pub eom_a: Option<TierSeries>,
}

impl RunRecord {
    pub fn center(&self, tier: Tier) -> Option<&[f64]> {
        match tier {
            Tier::Pde => self.pde.as_ref().map(|p| p.center.as_slice()),
            Tier::OdeFull => self.ode_full.as_ref().map(|s| s.center.as_slice()),
            Tier::OdeTaylor => self.ode_taylor.as_ref().map(|s| s.center.as_slice()),
            Tier::Eom => self.eom.as_ref().map(|s| s.center.as_slice()),
            Tier::EomA => self.eom_a.as_ref().map(|s| s.center.as_slice()),
        }
    }

    /// `x0_tier - x0_pde` per sample, when both series exist.
    pub fn delta(&self, tier: Tier) -> Option<Vec<f64>> {
        let pde = self.center(Tier::Pde)?;
        let other = self.center(tier)?;
        Some(other.iter().zip(pde).map(|(a, b)| a - b).collect())
    }

    pub fn max_abs_delta(&self, tier: Tier) -> Option<f64> {
        self.delta(tier)
            .map(|d| d.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
    }

    /// Auxiliary reduced-model series: the full ODE when present, else the Taylor ODE.
    pub fn aux_ode(&self) -> Option<&[f64]> {
        self.ode_full
            .as_ref()
            .and_then(|s| s.aux.as_deref())
            .or_else(|| self.ode_taylor.as_ref().and_then(|s| s.aux.as_deref()))
    }
}

/// Everything a tier needs besides its equations.
struct Setup<'a> {
    config: &'a ExperimentConfig,
    grid: SpatialGrid,
    profile: InhomogeneityProfile,
    t_end: f64,
    rows: usize,
}

impl Setup<'_> {
    fn times(&self) -> Vec<f64> {
        let period = self.config.sample_period();
        (0..self.rows).map(|k| k as f64 * period).collect()
    }

    /// Picks the states at the row times from a trajectory on the `dt_ode` axis.
    fn subsample<const N: usize>(&self, trajectory: &OdeTrajectory<N>) -> Vec<[f64; N]> {
        let stride = self.config.ode_stride();
        (0..self.rows).map(|k| trajectory.states()[k * stride]).collect()
    }
}

/// Runs all tiers listed in the configuration.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let grid = config.grid()?;
    let profile = make_inverse_square(config.c, config.d, &grid)?;
    let rows = config.row_count();
    let setup = Setup {
        config,
        grid,
        profile,
        t_end: (rows - 1) as f64 * config.sample_period(),
        rows,
    };
    let mut record = RunRecord {
        config: config.clone(),
        times: setup.times(),
        pde: None,
        ode_full: None,
        ode_taylor: None,
        eom: None,
        eom_a: None,
    };
    for &tier in &config.tiers {
        match tier {
            Tier::Pde => record.pde = Some(run_pde(&setup)?),
            Tier::OdeFull => record.ode_full = Some(run_ode(&setup, true)?),
            Tier::OdeTaylor => record.ode_taylor = Some(run_ode(&setup, false)?),
            Tier::Eom => record.eom = Some(run_eom(&setup, false)?),
            Tier::EomA => record.eom_a = Some(run_eom(&setup, true)?),
        }
    }
    Ok(record)
}

fn check_edges(center: f64, grid: &SpatialGrid, t: f64) -> Result<()> {
    if center - grid.x_min() < EDGE_MARGIN || grid.x_max() - center < EDGE_MARGIN {
        return Err(Error::range(format!(
            "soliton at x = {center:.3} came within {EDGE_MARGIN} of the domain edge at t = {t}"
        )));
    }
    Ok(())
}

/// Center and depth `A` of a dark soliton in a transformed field.
///
/// The center is the refined density minimum, which is `x0` exactly for the
/// ansatz. The integral center of [`extract_center_dark`] picks up the density
/// step that the initial reshaping radiates across the soliton.
///
/// [`extract_center_dark`]: crate::dark::extract_center_dark
pub fn measure_dark(field: &ComplexField) -> Result<(f64, f64)> {
    let (center, _) = density_minimum(field);
    let depth = depth_estimate(field, center, DARK_DEPTH_HALF_WIDTH)?;
    Ok((center, depth))
}

/// Center and amplitude `η` of a bright soliton in a transformed field.
pub fn measure_bright(field: &ComplexField) -> Result<(f64, f64)> {
    let guess = density_peak(field);
    let h = BRIGHT_EXTRACTION_HALF_WIDTH;
    let center = extract_center_bright_windowed(field, guess, h)?;
    let eta = amplitude_estimate(field, guess, h)?;
    Ok((center, eta))
}

fn run_pde(setup: &Setup) -> Result<PdeSeries> {
    let config = setup.config;
    let (variant, u0) = match config.initial {
        Initial::Dark { a0, x0 } => (
            Variant::TransformedDarkRotated,
            dark_ansatz(&DarkSolitonParams::new(a0, x0)?, &setup.grid),
        ),
        Initial::Bright { eta0, xi0, zeta0, phi0 } => (
            Variant::TransformedBright,
            bright_ansatz(&BrightSolitonParams::new(eta0, xi0, zeta0, phi0)?, &setup.grid)?,
        ),
    };
    let problem = EvolutionProblem::new(variant, setup.profile.clone(), setup.grid)?;
    let schedule = Schedule::new(0.0, setup.t_end, config.dt_pde, config.sample_interval)
        .with_stepper(config.stepper);
    let mut center = Vec::with_capacity(setup.rows);
    let mut aux = Vec::with_capacity(setup.rows);
    let summary = evolve_with(&problem, &u0, schedule, |t, field| {
        let (x, a) = match config.mode {
            Mode::Dark => measure_dark(field)?,
            Mode::Bright => measure_bright(field)?,
        };
        check_edges(x, &setup.grid, t)?;
        center.push(x);
        aux.push(a);
        Ok(())
    })?;
    Ok(PdeSeries {
        center,
        aux,
        norm: summary.conserved.iter().map(|c| c.norm).collect(),
        max_norm_drift: summary.max_norm_drift,
        norm_drift_warning: summary.norm_drift_warning,
    })
}

fn run_ode(setup: &Setup, full: bool) -> Result<TierSeries> {
    let config = setup.config;
    let (profile, grid) = (&setup.profile, &setup.grid);
    match config.initial {
        Initial::Dark { a0, x0 } => {
            let rhs = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
                let p = DarkSolitonParams::new(y[0], y[1])?;
                let (da, dx) = if full {
                    dark_rhs_full(&p, profile, grid)?
                } else {
                    dark_rhs_taylor(&p, profile)?
                };
                Ok([da, dx])
            };
            let tr = integrate(config.stepper, &rhs, [a0, x0], 0.0, setup.t_end, config.dt_ode)?;
            let states = setup.subsample(&tr);
            Ok(TierSeries {
                center: states.iter().map(|s| s[1]).collect(),
                aux: Some(states.iter().map(|s| s[0]).collect()),
            })
        }
        Initial::Bright { eta0, xi0, zeta0, phi0 } => {
            // The reduced bright system lives in τ = t/2.
            let (tau_end, dtau) = (0.5 * setup.t_end, 0.5 * config.dt_ode);
            let states: Vec<[f64; 2]> = if full {
                let rhs = |_t: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
                    bright_rhs_full(&BrightSolitonParams::new(y[0], y[1], y[2], y[3])?, profile, grid)
                };
                let tr = integrate(config.stepper, &rhs, [eta0, xi0, zeta0, phi0], 0.0, tau_end, dtau)?;
                setup
                    .subsample(&bright::to_lab_frame(tr))
                    .iter()
                    .map(|s| [s[0], s[2]])
                    .collect()
            } else {
                let rhs = |_t: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
                    bright_rhs_taylor(&BrightSolitonParams::new(y[0], y[1], y[2], 0.0)?, profile)
                };
                let tr = integrate(config.stepper, &rhs, [eta0, xi0, zeta0], 0.0, tau_end, dtau)?;
                setup
                    .subsample(&bright::to_lab_frame(tr))
                    .iter()
                    .map(|s| [s[0], s[2]])
                    .collect()
            };
            Ok(TierSeries {
                center: states.iter().map(|s| s[1]).collect(),
                aux: Some(states.iter().map(|s| s[0]).collect()),
            })
        }
    }
}

fn run_eom(setup: &Setup, simplified: bool) -> Result<TierSeries> {
    let config = setup.config;
    let (c, d) = (config.c, config.d);
    let tr = match config.initial {
        Initial::Dark { a0, x0 } => {
            let rhs = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
                let acc = if simplified {
                    dark_eom_a_rhs(y[0], c, d)?
                } else {
                    dark_eom_rhs(y[0], y[1], c, d)?
                };
                Ok([y[1], acc])
            };
            integrate(config.stepper, &rhs, [x0, a0], 0.0, setup.t_end, config.dt_ode)?
        }
        Initial::Bright { eta0, xi0, zeta0, .. } => {
            if simplified {
                return Err(Error::config("tier eom-a exists only for dark solitons"));
            }
            let rhs = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
                Ok([y[1], bright_eom_rhs(y[0], eta0, zeta0, c, d)?])
            };
            let v0 = bright::lab_velocity(-4.0 * xi0);
            integrate(config.stepper, &rhs, [zeta0, v0], 0.0, setup.t_end, config.dt_ode)?
        }
    };
    Ok(TierSeries {
        center: setup.subsample(&tr).iter().map(|s| s[0]).collect(),
        aux: None,
    })
}
