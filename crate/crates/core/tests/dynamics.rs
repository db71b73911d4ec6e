//! End-to-end properties of the PDE and reduced models on short runs.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use gpsol::bright::{bright_ansatz, bright_rhs_taylor, BrightSolitonParams};
use gpsol::dark::{dark_hamilton_equations, dark_hamiltonian, DarkParticleState};
use gpsol::harness::{parse_config, run_experiment, Tier};
use gpsol::ode::{abm4_integrate, rk4_integrate, Stepper};
use gpsol::pde::{evolve, EvolutionProblem, Schedule, Variant};
use gpsol::{make_inverse_square, SpatialGrid};

#[test]
fn pde_steppers_agree() {
    let grid = SpatialGrid::new(-60.0, 60.0, 1025).unwrap();
    let profile = make_inverse_square(1.0, -200.0, &grid).unwrap();
    let problem = EvolutionProblem::new(Variant::TransformedBright, profile, grid).unwrap();
    let u0 = bright_ansatz(&BrightSolitonParams::new(0.5, 0.25, 0.0, 0.0).unwrap(), &grid).unwrap();
    let schedule = Schedule::new(0.0, 2.0, 1e-3, 2000);
    let rk = evolve(&problem, &u0, schedule).unwrap();
    let abm = evolve(&problem, &u0, schedule.with_stepper(Stepper::Abm4)).unwrap();
    let gap = rk.snapshots.last().unwrap().max_abs_diff(abm.snapshots.last().unwrap());
    assert!(gap < 1e-6, "gap {gap:e}");
    assert!(rk.max_norm_drift < 1e-7 && abm.max_norm_drift < 1e-7, "{} {}", rk.max_norm_drift, abm.max_norm_drift);
}

#[test]
fn short_dark_pde_follows_reduced_models() {
    let c = parse_config(
        "mode=dark\nC=1\nD=-200\nA0=0.5\nx0_0=0\nt_max=2\ntiers=pde,ode-full,ode-taylor,eom\n",
    )
    .unwrap();
    let r = run_experiment(&c).unwrap();
    for tier in [Tier::OdeFull, Tier::OdeTaylor, Tier::Eom] {
        assert!(r.max_abs_delta(tier).unwrap() < 2e-2, "{tier:?}");
    }
    let depth = &r.pde.as_ref().unwrap().aux;
    assert_abs_diff_eq!(depth[0], 0.5, epsilon = 1e-6);
    assert!(depth.last().unwrap() < &0.5);
}

#[test]
fn bright_turning_follows_particle_energy() {
    // E = v²/2 + V(ζ) with V(0) = -1/6: ξ0 = 0.25 is bound and turns near ζ ≈ -83,
    // ξ0 = 0.5 has E = 1/3 > 0 and keeps moving left.
    let grid = SpatialGrid::new(-150.0, 150.0, 4097).unwrap();
    let profile = make_inverse_square(1.0, -200.0, &grid).unwrap();
    let rhs = |_t: f64, y: &[f64; 3]| bright_rhs_taylor(&BrightSolitonParams::new(y[0], y[1], y[2], 0.0)?, &profile);
    let lowest = |xi0: f64| {
        let tr = rk4_integrate(&rhs, [0.5, xi0, 0.0], 0.0, 400.0, 1e-2).unwrap();
        let zeta: Vec<f64> = tr.states().iter().map(|s| s[2]).collect();
        let (k, zmin) = zeta.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &z)| if z < a.1 { (i, z) } else { a });
        (k, zmin, zeta.len())
    };
    let (k, zmin, n) = lowest(0.25);
    assert!(k > 0 && k + 1 < n, "no interior minimum");
    assert!((zmin + 82.8).abs() < 0.5, "turning point {zmin}");
    let (k, _, n) = lowest(0.5);
    assert_eq!(k + 1, n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dark_hamiltonian_is_conserved(x0 in -50.0f64..50.0, v in -0.8f64..0.8, mu in 0.1f64..5.0) {
        let (c, d) = (1.0, -200.0);
        let s0 = DarkParticleState::from_velocity(x0, v, mu, c, d).unwrap();
        let f = |_t: f64, y: &[f64; 2]| {
            let (a, b) = dark_hamilton_equations(&DarkParticleState { x0: y[0], p: y[1], mu }, c, d)?;
            Ok([a, b])
        };
        let tr = abm4_integrate(&f, [s0.x0, s0.p], 0.0, 20.0, 1e-2).unwrap();
        let h0 = dark_hamiltonian(&s0, c, d).unwrap();
        let end = tr.last();
        let h1 = dark_hamiltonian(&DarkParticleState { x0: end[0], p: end[1], mu }, c, d).unwrap();
        prop_assert!(((h1 - h0) / h0).abs() < 1e-9);
    }

    #[test]
    fn csv_rows_match_sample_count(t_max in 0.1f64..3.0, interval in 1usize..400) {
        let text = format!(
            "mode=bright\nC=1\nD=-200\neta0=0.5\nxi0=0.1\nzeta0=0\nt_max={t_max}\ndt_ode=5e-4\nsample_interval={interval}\ntiers=eom\n"
        );
        if let Ok(c) = parse_config(&text) {
            let r = run_experiment(&c).unwrap();
            let expected = (t_max / (interval as f64 * 5e-4) + 1e-9).floor() as usize + 1;
            prop_assert_eq!(r.times.len(), expected);
        }
    }
}
