//! Bright solitons of the attractive condensate.
//!
//! With `τ = t/2` the transformed equation becomes `i u_τ + u_xx + 2|u|²u = 2P`, and
//! all parameter ODEs here are written in `τ`. The particle model ([`bright_eom_rhs`])
//! is in lab time `t`; [`to_lab_frame`] relabels `τ` trajectories for comparison
//! with the PDE.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, ComplexField, SpatialGrid};
use crate::ode::OdeTrajectory;
use crate::profile::{InhomogeneityProfile, ProfileKind};

/// Quadrature half-width in units of the soliton width `1/(2η)`.
pub const WINDOW_WIDTHS: f64 = 17.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightSolitonParams {
    pub eta: f64,
    pub xi: f64,
    pub zeta: f64,
    pub phi: f64,
}

impl BrightSolitonParams {
    pub fn new(eta: f64, xi: f64, zeta: f64, phi: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::parameter(format!("bright soliton needs eta > 0, got {eta}")));
        }
        if !(xi.is_finite() && zeta.is_finite() && phi.is_finite()) {
            return Err(Error::parameter("bright soliton parameters must be finite"));
        }
        Ok(BrightSolitonParams { eta, xi, zeta, phi })
    }

    pub fn width(&self) -> f64 {
        0.5 / self.eta
    }
}

/// Lab time and the rescaled time `τ = t/2` of the bright-soliton equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameClock {
    pub t: f64,
    pub tau: f64,
}

impl FrameClock {
    pub fn from_lab(t: f64) -> Self {
        FrameClock { t, tau: 0.5 * t }
    }

    pub fn from_tau(tau: f64) -> Self {
        FrameClock { t: 2.0 * tau, tau }
    }
}

/// `dζ/dt` from `dζ/dτ`.
pub fn lab_velocity(dzeta_dtau: f64) -> f64 {
    0.5 * dzeta_dtau
}

/// Relabels a `τ` trajectory onto lab time `t = 2τ`.
pub fn to_lab_frame<const N: usize>(trajectory: OdeTrajectory<N>) -> OdeTrajectory<N> {
    trajectory.rescale_time(2.0)
}

/// Relabels a lab-time trajectory onto `τ = t/2`.
pub fn to_tau_frame<const N: usize>(trajectory: OdeTrajectory<N>) -> OdeTrajectory<N> {
    trajectory.rescale_time(0.5)
}

/// `u = 2iη exp(-2iξx - iΦ) sech(2η(x - ζ))`.
pub fn bright_ansatz(params: &BrightSolitonParams, grid: &SpatialGrid) -> Result<ComplexField> {
    let p = BrightSolitonParams::new(params.eta, params.xi, params.zeta, params.phi)?;
    Ok(ComplexField::from_fn(*grid, |x| {
        let envelope = 2.0 * p.eta / (2.0 * p.eta * (x - p.zeta)).cosh();
        Complex64::new(0.0, envelope) * Complex64::new(0.0, -2.0 * p.xi * x - p.phi).exp()
    }))
}

/// `(dη/dτ, dξ/dτ, dζ/dτ, dΦ/dτ)` from the integral perturbation theory.
///
/// The phase rate is returned for logging only; it never feeds the other three.
pub fn bright_rhs_full(
    params: &BrightSolitonParams,
    profile: &InhomogeneityProfile,
    grid: &SpatialGrid,
) -> Result<[f64; 4]> {
    let BrightSolitonParams { eta, xi, zeta, .. } = *params;
    let free = [0.0, 0.0, -4.0 * xi, 4.0 * (xi * xi - eta * eta)];
    if profile.kind() == ProfileKind::Homogeneous {
        return Ok(free);
    }
    let range = grid.window(zeta, WINDOW_WIDTHS * params.width())?;
    let (lo, hi) = (grid.x(range.start), grid.x(range.end - 1));
    if !(profile.contains(lo) && profile.contains(hi)) {
        return Err(Error::range(format!(
            "soliton window [{lo:.4}, {hi:.4}] reaches the singularity of g"
        )));
    }
    let l = |x: f64| profile.gradient_coefficient(x);
    let sech2 = |x: f64| 1.0 / (2.0 * eta * (x - zeta)).cosh().powi(2);
    let tanh = |x: f64| (2.0 * eta * (x - zeta)).tanh();

    let i_eta = grid::simpson_window(grid, range.clone(), |x| l(x) * sech2(x));
    let i_xi = grid::simpson_window(grid, range.clone(), |x| l(x) * tanh(x).powi(2) * sech2(x));
    let i_zeta = grid::simpson_window(grid, range.clone(), |x| l(x) * (x - zeta) * sech2(x));
    // The phase bracket carries a bare x rather than x - ζ.
    let i_phi = grid::simpson_window(grid, range.clone(), |x| {
        l(x) * sech2(x) * tanh(x) * (1.0 - 2.0 * eta * x * tanh(x))
    });

    let mut rates = [
        8.0 * eta * eta * xi * i_eta,
        8.0 * eta.powi(3) * i_xi,
        free[2] + 8.0 * eta * xi * i_zeta,
        free[3] + 8.0 * eta * eta * i_phi,
    ];
    if profile.has_potential_term() {
        let k = |x: f64| profile.curvature_coefficient(x);
        let k_xi = grid::simpson_window(grid, range.clone(), |x| k(x) * tanh(x) * sech2(x));
        let k_phi = grid::simpson_window(grid, range, |x| {
            k(x) * sech2(x) * (1.0 - 2.0 * eta * x * tanh(x))
        });
        rates[1] -= 2.0 * eta * eta * k_xi;
        rates[3] -= 2.0 * eta * k_phi;
    }
    Ok(rates)
}

/// `(dη/dτ, dξ/dτ, dζ/dτ)` with the profile Taylor-expanded around `ζ`.
pub fn bright_rhs_taylor(params: &BrightSolitonParams, profile: &InhomogeneityProfile) -> Result<[f64; 3]> {
    let BrightSolitonParams { eta, xi, zeta, .. } = *params;
    if !profile.contains(zeta) {
        return Err(Error::range(format!("zeta = {zeta} is outside the profile's validity interval")));
    }
    let l = profile.gradient_coefficient(zeta);
    Ok([8.0 * eta * xi * l, 8.0 / 3.0 * eta * eta * l, -4.0 * xi])
}

fn shifted(zeta: f64, c: f64, d: f64) -> Result<f64> {
    let w = c * zeta + d;
    if w == 0.0 || !w.is_finite() {
        return Err(Error::range(format!("C zeta + D vanishes at zeta = {zeta}")));
    }
    Ok(w)
}

/// `η = η0 (Cζ0 + D)² / (Cζ + D)²`, the first integral of the Taylor system.
pub fn eta_closed_form(eta0: f64, zeta0: f64, zeta: f64, c: f64, d: f64) -> Result<f64> {
    let w0 = shifted(zeta0, c, d)?;
    let w = shifted(zeta, c, d)?;
    Ok(eta0 * (w0 / w).powi(2))
}

/// Lab-time EOM `ζ'' = -(8/3) C η0² (Cζ0 + D)⁴ / (Cζ + D)⁵`.
pub fn bright_eom_rhs(zeta: f64, eta0: f64, zeta0: f64, c: f64, d: f64) -> Result<f64> {
    let w0 = shifted(zeta0, c, d)?;
    let w = shifted(zeta, c, d)?;
    Ok(-8.0 / 3.0 * c * eta0 * eta0 * w0.powi(4) / w.powi(5))
}

/// Potential of [`bright_eom_rhs`]: `V = -(2/3) η0² (Cζ0 + D)⁴ / (Cζ + D)⁴`, so that
/// `ζ'' = -∂ζ V`.
pub fn bright_effective_potential(zeta: f64, eta0: f64, zeta0: f64, c: f64, d: f64) -> Result<f64> {
    let w0 = shifted(zeta0, c, d)?;
    let w = shifted(zeta, c, d)?;
    Ok(-2.0 / 3.0 * eta0 * eta0 * (w0 / w).powi(4))
}

/// `ζ = ∫x|u|² dx / ∫|u|² dx` over the whole grid.
pub fn extract_center_bright(field: &ComplexField) -> Result<f64> {
    let n = field.grid().len();
    center_of_mass(field, 0..n)
}

/// As [`extract_center_bright`] but restricted to `center ± half_width`.
pub fn extract_center_bright_windowed(field: &ComplexField, center: f64, half_width: f64) -> Result<f64> {
    let range = field.grid().window(center, half_width)?;
    center_of_mass(field, range)
}

fn center_of_mass(field: &ComplexField, range: std::ops::Range<usize>) -> Result<f64> {
    let grid = field.grid();
    let rho: Vec<f64> = field.values()[range.clone()].iter().map(|z| z.norm_sqr()).collect();
    let moment: Vec<f64> = rho.iter().zip(range).map(|(r, k)| r * grid.x(k)).collect();
    let norm = grid::simpson(&rho, grid.dx());
    if !(norm >= 1e-8) {
        return Err(Error::Extraction(format!("field norm {norm:e} is too small")));
    }
    Ok(grid::simpson(&moment, grid.dx()) / norm)
}

/// Amplitude estimate `η = ∫|u|²/4` over `center ± half_width`.
pub fn amplitude_estimate(field: &ComplexField, center: f64, half_width: f64) -> Result<f64> {
    let grid = field.grid();
    let range = grid.window(center, half_width)?;
    let rho: Vec<f64> = field.values()[range].iter().map(|z| z.norm_sqr()).collect();
    Ok(0.25 * grid::simpson(&rho, grid.dx()))
}

/// Location of the density maximum.
pub fn density_peak(field: &ComplexField) -> f64 {
    let (k, _) = field
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, z)| {
            let r = z.norm_sqr();
            if r > acc.1 {
                (i, r)
            } else {
                acc
            }
        });
    field.grid().x(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::rk4_integrate;
    use crate::profile::make_inverse_square;
    use approx::assert_abs_diff_eq;

    fn reference_grid() -> SpatialGrid {
        SpatialGrid::new(-150.0, 150.0, 4097).unwrap()
    }

    fn default_profile() -> InhomogeneityProfile {
        make_inverse_square(1.0, -200.0, &reference_grid()).unwrap()
    }

    fn params(eta: f64, xi: f64, zeta: f64) -> BrightSolitonParams {
        BrightSolitonParams::new(eta, xi, zeta, 0.0).unwrap()
    }

    #[test]
    fn ansatz_envelope() {
        let g = SpatialGrid::new(-40.0, 40.0, 8001).unwrap();
        let u = bright_ansatz(&params(0.5, 0.3, 0.0), &g).unwrap();
        assert_abs_diff_eq!(u.values()[g.nearest_index(0.0)].norm(), 1.0, epsilon = 1e-14);
        let half = 2f64.acosh() / (2.0 * 0.5);
        let env = |x: f64| 2.0 * 0.5 / (2.0 * 0.5 * x).cosh();
        assert_abs_diff_eq!(env(half), 0.5, epsilon = 1e-14);
        let rho = u.density();
        assert_abs_diff_eq!(grid::integrate(&rho, &g), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn ansatz_is_imaginary_without_phase() {
        let g = SpatialGrid::new(-20.0, 20.0, 401).unwrap();
        let u = bright_ansatz(&params(0.7, 0.0, 1.0), &g).unwrap();
        assert!(u.values().iter().all(|z| z.re == 0.0 && z.im > 0.0));
        assert!(bright_ansatz(&BrightSolitonParams { eta: 0.0, xi: 0.0, zeta: 0.0, phi: 0.0 }, &g).is_err());
    }

    #[test]
    fn full_rhs_homogeneous() {
        let h = InhomogeneityProfile::homogeneous(1.0).unwrap();
        let r = bright_rhs_full(&params(0.5, 0.2, 3.0), &h, &reference_grid()).unwrap();
        assert_eq!(r, [0.0, 0.0, -0.8, 4.0 * (0.04 - 0.25)]);
    }

    #[test]
    fn full_rhs_inverse_square() {
        let p = default_profile();
        let g = reference_grid();
        let r = bright_rhs_full(&params(0.5, 0.0, 0.0), &p, &g).unwrap();
        assert_eq!(r[0], 0.0);
        assert_abs_diff_eq!(r[1], -1.0 / 300.0, epsilon = 1e-5);
        let r = bright_rhs_full(&params(0.5, 0.25, 0.0), &p, &g).unwrap();
        assert!((r[2] + 1.0).abs() <= 5e-3);
    }

    #[test]
    fn taylor_rhs_values() {
        let p = default_profile();
        let r = bright_rhs_taylor(&params(0.5, 0.0, 0.0), &p).unwrap();
        assert_eq!(r[0], 0.0);
        assert_abs_diff_eq!(r[1], -1.0 / 300.0, epsilon = 1e-16);
        assert_eq!(r[2], 0.0);
        assert_eq!(bright_rhs_taylor(&params(0.5, 0.25, 0.0), &p).unwrap()[2], -1.0);
        let h = InhomogeneityProfile::homogeneous(1.0).unwrap();
        assert_eq!(bright_rhs_taylor(&params(0.5, 0.3, 0.0), &h).unwrap(), [0.0, 0.0, -1.2]);
    }

    #[test]
    fn closed_form_amplitude() {
        assert_eq!(eta_closed_form(0.5, 7.0, 7.0, 1.0, -200.0).unwrap(), 0.5);
        assert_abs_diff_eq!(
            eta_closed_form(0.5, 0.0, -100.0, 1.0, -200.0).unwrap(),
            0.5 * 40000.0 / 90000.0,
            epsilon = 1e-15
        );
        assert!(eta_closed_form(0.5, 0.0, 200.0, 1.0, -200.0).is_err());
    }

    #[test]
    fn closed_form_is_invariant_of_taylor_flow() {
        let p = default_profile();
        let sys = |_t: f64, y: &[f64; 3]| {
            bright_rhs_taylor(&BrightSolitonParams::new(y[0], y[1], y[2], 0.0)?, &p)
        };
        let tr = rk4_integrate(&sys, [0.5, 0.5, 0.0], 0.0, 25.0, 5e-4).unwrap();
        let inv = |s: &[f64; 3]| s[0] * (s[2] - 200.0).powi(2);
        let i0 = inv(&tr.states()[0]);
        for s in tr.states() {
            assert!((inv(s) - i0).abs() <= 1e-10 * i0);
        }
    }

    #[test]
    fn eom_and_potential() {
        assert_abs_diff_eq!(bright_eom_rhs(0.0, 0.5, 0.0, 1.0, -200.0).unwrap(), 1.0 / 300.0, epsilon = 1e-16);
        assert_abs_diff_eq!(
            bright_effective_potential(0.0, 0.5, 0.0, 1.0, -200.0).unwrap().abs(),
            1.0 / 6.0,
            epsilon = 1e-16
        );
        for z in [-60.0, -5.0, 0.0, 33.0] {
            let h = 1e-4;
            let grad = (bright_effective_potential(z + h, 0.5, 0.0, 1.0, -200.0).unwrap()
                - bright_effective_potential(z - h, 0.5, 0.0, 1.0, -200.0).unwrap())
                / (2.0 * h);
            let acc = bright_eom_rhs(z, 0.5, 0.0, 1.0, -200.0).unwrap();
            assert!((acc + grad).abs() <= 1e-10, "z = {z}: {acc} vs {}", -grad);
        }
    }

    #[test]
    fn eom_is_taylor_system_in_lab_time() {
        // ζ_tt = ¼ ζ_ττ = -ξ_τ with η from the closed form
        let p = default_profile();
        for z in [-40.0, 0.0, 25.0] {
            let eta = eta_closed_form(0.5, 0.0, z, 1.0, -200.0).unwrap();
            let r = bright_rhs_taylor(&params(eta, 0.1, z), &p).unwrap();
            let acc = bright_eom_rhs(z, 0.5, 0.0, 1.0, -200.0).unwrap();
            assert_abs_diff_eq!(acc, -r[1], epsilon = 1e-15);
        }
    }

    #[test]
    fn centers() {
        let g = reference_grid();
        let u = bright_ansatz(&params(0.5, 0.1, -5.0), &g).unwrap();
        assert_abs_diff_eq!(extract_center_bright(&u).unwrap(), -5.0, epsilon = 1e-8);
        assert_abs_diff_eq!(extract_center_bright_windowed(&u, -5.0, 30.0).unwrap(), -5.0, epsilon = 1e-8);
        assert!(extract_center_bright(&ComplexField::zeros(g)).is_err());
        let humps = ComplexField::from_fn(g, |x| {
            Complex64::new(1.0 / (x - 4.0).cosh() + 1.0 / (x + 4.0).cosh(), 0.0)
        });
        assert!(extract_center_bright(&humps).unwrap().abs() <= 1e-10);
        assert_abs_diff_eq!(amplitude_estimate(&u, -5.0, 30.0).unwrap(), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn frame_conversion() {
        assert_eq!(lab_velocity(-4.0 * 0.25), -0.5);
        let c = FrameClock::from_lab(3.0);
        assert_eq!(c.tau, 1.5);
        assert_eq!(FrameClock::from_tau(c.tau), c);
        let zero = |_t: f64, _y: &[f64; 1]| Ok([0.0]);
        let tau = rk4_integrate(&zero, [1.0], 0.0, 2.0, 1.0).unwrap();
        let lab = to_lab_frame(tau.clone());
        assert_eq!(lab.times().collect::<Vec<_>>(), vec![0.0, 2.0, 4.0]);
        assert_eq!(to_tau_frame(lab), tau);
    }
}
