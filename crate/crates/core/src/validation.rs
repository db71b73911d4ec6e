//! Acceptance criteria, shared by `gpsol validate` and the acceptance test target.
//!
//! Each criterion returns a [`CriterionResult`]; PDE runs used by several
//! criteria are computed once per [`Campaign`].

use std::fmt;
use std::sync::OnceLock;

use crate::bright::{
    bright_ansatz, bright_eom_rhs, bright_effective_potential, bright_rhs_full, bright_rhs_taylor,
    BrightSolitonParams,
};
use crate::dark::{
    dark_ansatz, dark_hamilton_equations, dark_hamiltonian, dark_rhs_full, dark_rhs_taylor,
    DarkParticleState, DarkSolitonParams,
};
use crate::error::Result;
use crate::grid::{ComplexField, SpatialGrid};
use crate::harness::config::{DEFAULT_DT_PDE, DEFAULT_N_POINTS, DEFAULT_X_MAX, DEFAULT_X_MIN};
use crate::harness::run::{measure_dark, run_experiment, RunRecord};
use crate::harness::scenario::{bright_config, dark_config, BRIGHT_ETA0, DEFAULT_C, DEFAULT_D};
use crate::harness::Tier;
use crate::ode::{abm4_integrate, integrate, rk4_integrate, Stepper};
use crate::pde::{evolve_with, EvolutionProblem, Schedule, Variant};
use crate::profile::make_inverse_square;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

fn outcome(id: usize, name: &'static str, check: Result<(bool, String)>) -> CriterionResult {
    let (passed, detail) = check.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

/// Time window for the dark tier comparisons.
const DARK_COMPARE_T: f64 = 100.0;
/// The A = 0.5 dark soliton turns near t ≈ 144, so its run is longer.
const DARK_TURN_T: f64 = 200.0;

/// Lazily computed PDE runs shared between criteria.
#[derive(Default)]
pub struct Campaign {
    dark: [OnceLock<std::result::Result<RunRecord, String>>; 3],
    bright: [OnceLock<std::result::Result<RunRecord, String>>; 3],
}

const DARK_A: [f64; 3] = [0.0, 0.25, 0.5];
const BRIGHT_XI: [f64; 3] = [0.0, 0.25, 0.5];

impl Campaign {
    pub fn new() -> Self {
        Self::default()
    }

    fn dark(&self, k: usize) -> Result<&RunRecord> {
        self.dark[k]
            .get_or_init(|| {
                let mut c = dark_config(DARK_A[k], &[Tier::Pde, Tier::OdeFull, Tier::Eom, Tier::EomA]);
                if k == 2 {
                    c.t_max = DARK_TURN_T;
                }
                run_experiment(&c).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| crate::Error::Range(e.clone()))
    }

    fn bright(&self, k: usize) -> Result<&RunRecord> {
        self.bright[k]
            .get_or_init(|| {
                let c = bright_config(BRIGHT_XI[k], &[Tier::Pde, Tier::OdeFull, Tier::Eom]);
                run_experiment(&c).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| crate::Error::Range(e.clone()))
    }
}

/// Number of leading samples with `t <= t_end`.
fn upto(record: &RunRecord, t_end: f64) -> usize {
    record.times.iter().take_while(|t| **t <= t_end + 1e-9).count()
}

fn max_abs_delta(record: &RunRecord, tier: Tier, n: usize) -> f64 {
    let d = record.delta(tier).expect("tier present in campaign run");
    d[..n].iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn norm_drift(record: &RunRecord, n: usize) -> f64 {
    let norm = &record.pde.as_ref().expect("campaign runs include the PDE").norm[..n];
    norm.iter().fold(0.0, |m, v| m.max(((v - norm[0]) / norm[0]).abs()))
}

/// Least-squares `x(t) ≈ c0 + c1 t + c2 t²`; returns the acceleration `2 c2`.
pub fn quadratic_acceleration(t: &[f64], x: &[f64]) -> f64 {
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for (&ti, &xi) in t.iter().zip(x) {
        let p = [1.0, ti, ti * ti];
        for r in 0..3 {
            rhs[r] += p[r] * xi;
            for c in 0..3 {
                m[r][c] += p[r] * p[c];
            }
        }
    }
    // Cramer's rule for the 3×3 normal equations.
    let det = |a: &[[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let mut m2 = m;
    for r in 0..3 {
        m2[r][2] = rhs[r];
    }
    2.0 * det(&m2) / det(&m)
}

fn reference_grid() -> Result<SpatialGrid> {
    SpatialGrid::new(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_N_POINTS)
}

/// 1: Ψ-frame and u-frame evolutions agree in modulus.
pub fn transformation_equivalence() -> CriterionResult {
    outcome(1, "transformation equivalence", (|| {
        let grid = reference_grid()?;
        let profile = make_inverse_square(DEFAULT_C, DEFAULT_D, &grid)?;
        let u0 = bright_ansatz(&BrightSolitonParams::new(BRIGHT_ETA0, 0.25, 0.0, 0.0)?, &grid)?;
        let h: Vec<f64> = grid.points().map(|x| profile.inv_sqrt_g(x)).collect();
        let psi0 = ComplexField::new(grid, u0.values().iter().zip(&h).map(|(u, h)| u * *h).collect())?;
        let schedule = Schedule::new(0.0, 10.0, DEFAULT_DT_PDE, 1000);
        let mut u_snaps = Vec::new();
        let transformed = EvolutionProblem::new(Variant::TransformedBright, profile.clone(), grid)?;
        evolve_with(&transformed, &u0, schedule, |_, f| {
            u_snaps.push(f.clone());
            Ok(())
        })?;
        let original = EvolutionProblem::original_psi(-1.0, profile, grid)?;
        let mut worst: f64 = 0.0;
        let mut k = 0;
        let summary = evolve_with(&original, &psi0, schedule, |_, psi| {
            for ((p, u), h) in psi.values().iter().zip(u_snaps[k].values()).zip(&h) {
                worst = worst.max((p.norm() - u.norm() * h).abs());
            }
            k += 1;
            Ok(())
        })?;
        Ok((
            worst <= 1e-4,
            format!(
                "max ||Ψ| - |u|/√g| = {worst:.3e} (tol 1e-4), Ψ-frame norm drift {:.1e}",
                summary.max_norm_drift
            ),
        ))
    })())
}

/// 2: without inhomogeneity the solitons are exact.
pub fn unperturbed_exactness() -> CriterionResult {
    outcome(2, "unperturbed exactness", (|| {
        let grid = reference_grid()?;
        let flat = make_inverse_square(0.0, 1.0, &grid)?;
        let schedule = Schedule::new(0.0, 20.0, DEFAULT_DT_PDE, 200);

        let dark = EvolutionProblem::new(Variant::TransformedDarkRotated, flat.clone(), grid)?;
        let a = 0.25;
        let mut center_err: f64 = 0.0;
        evolve_with(&dark, &dark_ansatz(&DarkSolitonParams::new(a, 0.0)?, &grid), schedule, |t, f| {
            center_err = center_err.max((measure_dark(f)?.0 - a * t).abs());
            Ok(())
        })?;

        let bright = EvolutionProblem::new(Variant::TransformedBright, flat, grid)?;
        let b0 = bright_ansatz(&BrightSolitonParams::new(BRIGHT_ETA0, 0.0, 0.0, 0.0)?, &grid)?;
        let mut shape_err: f64 = 0.0;
        evolve_with(&bright, &b0, schedule, |_, f| {
            for (u, v) in f.values().iter().zip(b0.values()) {
                shape_err = shape_err.max((u.norm() - v.norm()).abs());
            }
            Ok(())
        })?;
        Ok((
            center_err <= 1e-2 && shape_err <= 1e-4,
            format!(
                "dark center error {center_err:.2e} (tol 1e-2), bright shape error {shape_err:.2e} (tol 1e-4)"
            ),
        ))
    })())
}

/// 3: the dark soliton starts accelerating at -1/300 toward negative x.
pub fn dark_initial_acceleration(campaign: &Campaign) -> CriterionResult {
    outcome(3, "dark initial acceleration", (|| {
        let r = campaign.dark(0)?;
        let n = upto(r, 10.0);
        let x = r.center(Tier::Pde).expect("pde");
        let acc = quadratic_acceleration(&r.times[..n], &x[..n]);
        let expected = -1.0 / 300.0;
        let end = x[upto(r, DARK_COMPARE_T) - 1];
        let rel = (acc - expected).abs() / expected.abs();
        Ok((
            rel <= 0.1 && x[n - 1] < 0.0 && end < 0.0,
            format!("fitted x0'' = {acc:.4e} vs {expected:.4e} ({:.1}% off, tol 10%), x0(100) = {end:.3}", 100.0 * rel),
        ))
    })())
}

/// 4: moving dark solitons reach a turning point.
pub fn dark_turning_points(campaign: &Campaign) -> CriterionResult {
    outcome(4, "dark turning points", (|| {
        let mut ok = true;
        let mut parts = Vec::new();
        for k in [1, 2] {
            let r = campaign.dark(k)?;
            let x = r.center(Tier::Pde).expect("pde");
            let (kmax, xmax) = x
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let last = *x.last().expect("samples");
            let turned = kmax > 0 && kmax + 1 < x.len() && last < xmax - 0.1;
            ok &= turned;
            parts.push(format!(
                "A={}: max x0 = {xmax:.3} at t = {:.1}, x0({}) = {last:.3}",
                DARK_A[k],
                r.times[kmax],
                r.times.last().expect("samples")
            ));
        }
        Ok((ok, parts.join("; ")))
    })())
}

/// 5: ODE and EOM stay within one unit of the PDE while the soliton moves at least ten.
pub fn dark_tier_agreement(campaign: &Campaign) -> CriterionResult {
    outcome(5, "dark tier agreement", (|| {
        let mut ok = true;
        let mut parts = Vec::new();
        for k in [0, 2] {
            let r = campaign.dark(k)?;
            let n = upto(r, DARK_COMPARE_T);
            let x = r.center(Tier::Pde).expect("pde");
            let disp = (x[n - 1] - x[0]).abs();
            let full = max_abs_delta(r, Tier::OdeFull, n);
            let eom = max_abs_delta(r, Tier::Eom, n);
            let ratio = full.max(eom) / full.min(eom);
            ok &= full <= 1.0 && eom <= 1.0 && disp >= 10.0 && ratio <= 2.0;
            parts.push(format!(
                "A={}: |Δ| ode-full {full:.3}, eom {eom:.3}, ratio {ratio:.3}, displacement {disp:.2}",
                DARK_A[k]
            ));
        }
        Ok((ok, parts.join("; ")))
    })())
}

/// 6: dropping the velocity factor hurts more for a moving soliton.
pub fn eom_a_degradation(campaign: &Campaign) -> CriterionResult {
    outcome(6, "EOM_a degradation ordering", (|| {
        let r0 = campaign.dark(0)?;
        let r2 = campaign.dark(2)?;
        let d0 = max_abs_delta(r0, Tier::EomA, upto(r0, DARK_COMPARE_T));
        let d2 = max_abs_delta(r2, Tier::EomA, upto(r2, DARK_COMPARE_T));
        Ok((d2 > d0, format!("max |Δ eom-a|: A=0.5 {d2:.3} vs A=0 {d0:.3}")))
    })())
}

/// 7: the bright soliton starts accelerating at +1/300 toward positive x.
pub fn bright_initial_acceleration(campaign: &Campaign) -> CriterionResult {
    outcome(7, "bright initial acceleration", (|| {
        let r = campaign.bright(0)?;
        let n = upto(r, 10.0);
        let x = r.center(Tier::Pde).expect("pde");
        let acc = quadratic_acceleration(&r.times[..n], &x[..n]);
        let expected = 1.0 / 300.0;
        let rel = (acc - expected).abs() / expected;
        let end = *x.last().expect("samples");
        Ok((
            rel <= 0.1 && x[n - 1] > 0.0 && end > 0.0,
            format!("fitted ζ'' = {acc:.4e} vs {expected:.4e} ({:.1}% off, tol 10%), ζ(50) = {end:.3}", 100.0 * rel),
        ))
    })())
}

/// 8: EOM deviates at least as much as the full ODE; a fast soliton deviates much more.
pub fn bright_difference_ordering(campaign: &Campaign) -> CriterionResult {
    outcome(8, "bright difference ordering", (|| {
        let slow = campaign.bright(0)?;
        let fast = campaign.bright(2)?;
        let (n0, n2) = (slow.times.len(), fast.times.len());
        let (full0, eom0) = (max_abs_delta(slow, Tier::OdeFull, n0), max_abs_delta(slow, Tier::Eom, n0));
        let (full2, eom2) = (max_abs_delta(fast, Tier::OdeFull, n2), max_abs_delta(fast, Tier::Eom, n2));
        let ordered = eom0 >= full0;
        let growth = (full2 / full0).min(eom2 / eom0);
        Ok((
            ordered && growth >= 3.0,
            format!(
                "ξ=0: |Δ| eom {eom0:.3e} {} ode-full {full0:.3e}; ξ=0.5/ξ=0 growth {growth:.2} (need ≥ 3)",
                if ordered { ">=" } else { "<" }
            ),
        ))
    })())
}

/// 9: conserved quantities of the PDE and of the particle models.
pub fn conservation_suite(campaign: &Campaign) -> CriterionResult {
    outcome(9, "conservation suite", (|| {
        let mut worst_norm: f64 = 0.0;
        for k in 0..3 {
            let r = campaign.dark(k)?;
            worst_norm = worst_norm.max(norm_drift(r, upto(r, DARK_COMPARE_T)));
            let r = campaign.bright(k)?;
            worst_norm = worst_norm.max(norm_drift(r, r.times.len()));
        }

        let (c, d) = (DEFAULT_C, DEFAULT_D);
        let s0 = DarkParticleState::from_velocity(0.0, 0.5, 1.0, c, d)?;
        let hamilton = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
            let (dx, dp) = dark_hamilton_equations(&DarkParticleState { x0: y[0], p: y[1], mu: 1.0 }, c, d)?;
            Ok([dx, dp])
        };
        let tr = rk4_integrate(&hamilton, [s0.x0, s0.p], 0.0, 100.0, 1e-3)?;
        let h0 = dark_hamiltonian(&s0, c, d)?;
        let mut dark_drift: f64 = 0.0;
        for y in tr.states() {
            let h = dark_hamiltonian(&DarkParticleState { x0: y[0], p: y[1], mu: 1.0 }, c, d)?;
            dark_drift = dark_drift.max(((h - h0) / h0).abs());
        }

        let eta0 = BRIGHT_ETA0;
        let eom = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> { Ok([y[1], bright_eom_rhs(y[0], eta0, 0.0, c, d)?]) };
        let tr = rk4_integrate(&eom, [0.0, -1.0], 0.0, 100.0, 1e-3)?;
        let energy = |y: &[f64; 2]| -> Result<f64> { Ok(0.5 * y[1] * y[1] + bright_effective_potential(y[0], eta0, 0.0, c, d)?) };
        let e0 = energy(&tr.states()[0])?;
        let mut bright_drift: f64 = 0.0;
        for y in tr.states() {
            bright_drift = bright_drift.max(((energy(y)? - e0) / e0).abs());
        }
        Ok((
            worst_norm <= 1e-6 && dark_drift <= 1e-8 && bright_drift <= 1e-8,
            format!(
                "norm drift {worst_norm:.2e} (tol 1e-6), dark H drift {dark_drift:.2e}, bright EOM energy drift {bright_drift:.2e} (tol 1e-8)"
            ),
        ))
    })())
}

fn relative_gap(full: f64, taylor: f64) -> f64 {
    if taylor == 0.0 {
        full.abs()
    } else {
        ((full - taylor) / taylor).abs()
    }
}

/// 10: quadrature rates agree with their Taylor expansion at the origin.
pub fn quadrature_vs_taylor() -> CriterionResult {
    outcome(10, "quadrature vs Taylor", (|| {
        let grid = reference_grid()?;
        let profile = make_inverse_square(DEFAULT_C, DEFAULT_D, &grid)?;
        let mut worst: f64 = 0.0;
        for a in DARK_A {
            let p = DarkSolitonParams::new(a, 0.0)?;
            let (fa, fx) = dark_rhs_full(&p, &profile, &grid)?;
            let (ta, tx) = dark_rhs_taylor(&p, &profile)?;
            worst = worst.max(relative_gap(fa, ta)).max(relative_gap(fx, tx));
        }
        for eta in [0.25, 0.5] {
            let p = BrightSolitonParams::new(eta, 0.25, 0.0, 0.0)?;
            let full = bright_rhs_full(&p, &profile, &grid)?;
            let taylor = bright_rhs_taylor(&p, &profile)?;
            for i in 0..3 {
                worst = worst.max(relative_gap(full[i], taylor[i]));
            }
        }
        Ok((worst <= 1e-3, format!("max relative gap {worst:.2e} (tol 1e-3)")))
    })())
}

/// 11: `η (Cζ + D)²` is a first integral of the Taylor bright system.
pub fn bright_invariant() -> CriterionResult {
    outcome(11, "bright amplitude invariant", (|| {
        let grid = reference_grid()?;
        let profile = make_inverse_square(DEFAULT_C, DEFAULT_D, &grid)?;
        let rhs = |_t: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
            bright_rhs_taylor(&BrightSolitonParams::new(y[0], y[1], y[2], 0.0)?, &profile)
        };
        let invariant = |y: &[f64; 3]| y[0] * (DEFAULT_C * y[2] + DEFAULT_D).powi(2);
        let mut worst: f64 = 0.0;
        for xi in BRIGHT_XI {
            let tr = rk4_integrate(&rhs, [BRIGHT_ETA0, xi, 0.0], 0.0, 25.0, 5e-4)?;
            let i0 = invariant(&tr.states()[0]);
            for y in tr.states() {
                worst = worst.max(((invariant(y) - i0) / i0).abs());
            }
        }
        Ok((worst <= 1e-10, format!("max relative change {worst:.2e} (tol 1e-10)")))
    })())
}

/// 12: RK4 and ABM4 agree on the parameter ODEs and both converge at fourth order.
pub fn integrator_cross_check() -> CriterionResult {
    outcome(12, "integrator cross-check", (|| {
        let grid = reference_grid()?;
        let profile = make_inverse_square(DEFAULT_C, DEFAULT_D, &grid)?;
        let rhs = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
            let (da, dx) = dark_rhs_full(&DarkSolitonParams::new(y[0], y[1])?, &profile, &grid)?;
            Ok([da, dx])
        };
        let rk = rk4_integrate(&rhs, [0.25, 0.0], 0.0, 50.0, 1e-3)?;
        let abm = abm4_integrate(&rhs, [0.25, 0.0], 0.0, 50.0, 1e-3)?;
        let gap = rk
            .states()
            .iter()
            .zip(abm.states())
            .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
            .fold(0.0, f64::max);

        let decay = |_t: f64, y: &[f64; 1]| -> Result<[f64; 1]> { Ok([-y[0]]) };
        let exact = (-1.0f64).exp();
        let mut orders = Vec::new();
        for stepper in [Stepper::Rk4, Stepper::Abm4] {
            let err = |dt: f64| -> Result<f64> { Ok((integrate(stepper, &decay, [1.0], 0.0, 1.0, dt)?.last()[0] - exact).abs()) };
            orders.push((err(0.02)? / err(0.01)?).log2());
        }
        let converges = orders.iter().all(|p| *p >= 3.8);
        Ok((
            gap <= 1e-8 && converges,
            format!(
                "max |RK4 - ABM4| = {gap:.2e} (tol 1e-8), observed orders rk4 {:.2}, abm4 {:.2}",
                orders[0], orders[1]
            ),
        ))
    })())
}

/// Runs every criterion in order, calling `report` as each one finishes.
pub fn run_all(mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let campaign = Campaign::new();
    let checks: [&dyn Fn() -> CriterionResult; 12] = [
        &transformation_equivalence,
        &unperturbed_exactness,
        &|| dark_initial_acceleration(&campaign),
        &|| dark_turning_points(&campaign),
        &|| dark_tier_agreement(&campaign),
        &|| eom_a_degradation(&campaign),
        &|| bright_initial_acceleration(&campaign),
        &|| bright_difference_ordering(&campaign),
        &|| conservation_suite(&campaign),
        &quadrature_vs_taylor,
        &bright_invariant,
        &integrator_cross_check,
    ];
    checks
        .iter()
        .map(|check| {
            let r = check();
            report(&r);
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fit_recovers_acceleration() {
        let t: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let x: Vec<f64> = t.iter().map(|t| 0.3 - 0.2 * t - t * t / 600.0).collect();
        assert!((quadratic_acceleration(&t, &x) + 1.0 / 300.0).abs() < 1e-12);
    }

    #[test]
    fn cheap_criteria_pass() {
        for r in [quadrature_vs_taylor(), bright_invariant(), integrator_cross_check()] {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn result_line_format() {
        let r = outcome(7, "demo", Ok((false, "x".into())));
        assert_eq!(r.to_string(), "[FAIL]  7 demo: x");
    }
}
