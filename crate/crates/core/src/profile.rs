//! The spatially varying interaction coefficient `g(x)` and the perturbation
//! `P[u; x]` it produces once `Ψ = u / √g` is substituted into the GP equation.
//!
//! Writing `h = 1/√g`, the transformed equation picks up
//!
//! * a multiplicative term `Ṽ_eff(x) = -h''/(2h)`, and
//! * a non-potential term `-(h'/h) ∂x u`.
//!
//! For the inverse-square family `g = 1/(D + Cx)²` the first vanishes identically and
//! `h'/h = C/(D + Cx)`, whatever the sign of `D + Cx`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, ComplexField, SpatialGrid};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Analytic description of a sign-definite `g(x)` supplied by the caller.
///
/// All four callables must agree with each other; the library never differentiates
/// sampled data.
#[derive(Clone)]
pub struct GenericProfile {
    pub g: ScalarFn,
    pub inv_sqrt_g: ScalarFn,
    pub d_inv_sqrt_g: ScalarFn,
    pub d2_inv_sqrt_g: ScalarFn,
}

#[derive(Clone)]
enum Kind {
    InverseSquare { c: f64, d: f64 },
    Homogeneous { g: f64 },
    Generic(GenericProfile),
}

/// Interaction coefficient with its validity interval `(lo, hi)` (open).
#[derive(Clone)]
pub struct InhomogeneityProfile {
    kind: Kind,
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    InverseSquare,
    Homogeneous,
    Generic,
}

impl fmt::Debug for InhomogeneityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::InverseSquare { c, d } => f
                .debug_struct("InverseSquare")
                .field("c", c)
                .field("d", d)
                .field("validity", &(self.lo, self.hi))
                .finish(),
            Kind::Homogeneous { g } => f.debug_struct("Homogeneous").field("g", g).finish(),
            Kind::Generic(_) => f
                .debug_struct("Generic")
                .field("validity", &(self.lo, self.hi))
                .finish(),
        }
    }
}

/// `g(x) = 1/(D + Cx)²`, validated against `domain`.
///
/// The validity interval is the half-line on the domain's side of `x_sing = -D/C`.
pub fn make_inverse_square(c: f64, d: f64, domain: &SpatialGrid) -> Result<InhomogeneityProfile> {
    if !(c.is_finite() && d.is_finite()) {
        return Err(Error::config("C and D must be finite"));
    }
    if c == 0.0 && d == 0.0 {
        return Err(Error::config("C and D cannot both be zero"));
    }
    let (lo, hi) = if c == 0.0 {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        let x_sing = -d / c;
        if x_sing >= domain.x_min() && x_sing <= domain.x_max() {
            return Err(Error::Singularity {
                x_sing,
                x_min: domain.x_min(),
                x_max: domain.x_max(),
            });
        }
        if x_sing > domain.x_max() {
            (f64::NEG_INFINITY, x_sing)
        } else {
            (x_sing, f64::INFINITY)
        }
    };
    Ok(InhomogeneityProfile {
        kind: Kind::InverseSquare { c, d },
        lo,
        hi,
    })
}

impl InhomogeneityProfile {
    pub fn homogeneous(g: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::config(format!("homogeneous g must be positive, got {g}")));
        }
        Ok(InhomogeneityProfile {
            kind: Kind::Homogeneous { g },
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        })
    }

    /// Generic profile valid on the open interval `(lo, hi)`.
    pub fn generic(profile: GenericProfile, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::config(format!("empty validity interval ({lo}, {hi})")));
        }
        Ok(InhomogeneityProfile {
            kind: Kind::Generic(profile),
            lo,
            hi,
        })
    }

    pub fn kind(&self) -> ProfileKind {
        match self.kind {
            Kind::InverseSquare { .. } => ProfileKind::InverseSquare,
            Kind::Homogeneous { .. } => ProfileKind::Homogeneous,
            Kind::Generic(_) => ProfileKind::Generic,
        }
    }

    /// `(C, D)` for the inverse-square family.
    pub fn coefficients(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::InverseSquare { c, d } => Some((c, d)),
            _ => None,
        }
    }

    pub fn validity(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// Whether `Ṽ_eff` can be non-zero for this profile.
    pub fn has_potential_term(&self) -> bool {
        matches!(self.kind, Kind::Generic(_))
    }

    pub fn g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::InverseSquare { c, d } => {
                let w = d + c * x;
                1.0 / (w * w)
            }
            Kind::Homogeneous { g } => *g,
            Kind::Generic(p) => (p.g)(x),
        }
    }

    /// `1/√g`; equals `|D + Cx|` for the inverse-square family.
    pub fn inv_sqrt_g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::InverseSquare { c, d } => (d + c * x).abs(),
            Kind::Homogeneous { g } => 1.0 / g.sqrt(),
            Kind::Generic(p) => (p.inv_sqrt_g)(x),
        }
    }

    /// `√g ∂x(1/√g)`, the coefficient of the non-potential term.
    pub fn gradient_coefficient(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::InverseSquare { c, d } => c / (d + c * x),
            Kind::Homogeneous { .. } => 0.0,
            Kind::Generic(p) => (p.d_inv_sqrt_g)(x) / (p.inv_sqrt_g)(x),
        }
    }

    /// `√g ∂²x(1/√g)`.
    pub fn curvature_coefficient(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::InverseSquare { .. } | Kind::Homogeneous { .. } => 0.0,
            Kind::Generic(p) => (p.d2_inv_sqrt_g)(x) / (p.inv_sqrt_g)(x),
        }
    }

    /// `Ṽ_eff(x) = -½ √g ∂²x(1/√g)`.
    pub fn effective_potential(&self, x: f64) -> f64 {
        -0.5 * self.curvature_coefficient(x)
    }

    /// `√g ∂²x(1/g)`. With `h = 1/√g`, `∂²(h²) = 2h'² + 2hh''`.
    pub fn sqrt_g_d2_inv_g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::InverseSquare { c, d } => 2.0 * c * c / (d + c * x).abs(),
            Kind::Homogeneous { .. } => 0.0,
            Kind::Generic(p) => {
                let h = (p.inv_sqrt_g)(x);
                let h1 = (p.d_inv_sqrt_g)(x);
                let h2 = (p.d2_inv_sqrt_g)(x);
                2.0 * (h1 * h1 + h * h2) / h
            }
        }
    }

    /// Checks that the whole grid lies inside the validity interval with `g > 0`.
    pub fn check_grid(&self, grid: &SpatialGrid) -> Result<()> {
        if !(self.contains(grid.x_min()) && self.contains(grid.x_max())) {
            let x_sing = if grid.x_max() >= self.hi { self.hi } else { self.lo };
            return Err(Error::Singularity {
                x_sing,
                x_min: grid.x_min(),
                x_max: grid.x_max(),
            });
        }
        if let Kind::Generic(_) = self.kind {
            for x in grid.points() {
                let g = self.g(x);
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::config(format!("g({x}) = {g} is not positive")));
                }
            }
        }
        Ok(())
    }

    /// Samples of `√g ∂x(1/√g)` on the grid.
    pub fn sample_gradient_coefficient(&self, grid: &SpatialGrid) -> Vec<f64> {
        grid.points().map(|x| self.gradient_coefficient(x)).collect()
    }

    /// Samples of `1/g` on the grid, the weight of the transformed norm.
    pub fn sample_inv_g(&self, grid: &SpatialGrid) -> Vec<f64> {
        grid.points()
            .map(|x| {
                let h = self.inv_sqrt_g(x);
                h * h
            })
            .collect()
    }
}

/// `Ṽ_eff` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivePotentialTerm {
    pub values: Vec<f64>,
}

pub fn effective_potential_term(
    profile: &InhomogeneityProfile,
    grid: &SpatialGrid,
) -> Result<EffectivePotentialTerm> {
    profile.check_grid(grid)?;
    let values = if profile.has_potential_term() {
        grid.points().map(|x| profile.effective_potential(x)).collect()
    } else {
        vec![0.0; grid.len()]
    };
    Ok(EffectivePotentialTerm { values })
}

/// `P[u; x] = Ṽ_eff u - (√g ∂x(1/√g)) ∂x u` on the field's grid.
///
/// The potential part is skipped for profiles where it vanishes identically.
pub fn apply_perturbation(profile: &InhomogeneityProfile, u: &ComplexField) -> Result<ComplexField> {
    let grid = *u.grid();
    profile.check_grid(&grid)?;
    let du = grid::derivative1(u);
    let mut out: Vec<Complex64> = grid
        .points()
        .zip(du.values())
        .map(|(x, d)| -d * profile.gradient_coefficient(x))
        .collect();
    if profile.has_potential_term() {
        for ((o, x), v) in out.iter_mut().zip(grid.points()).zip(u.values()) {
            *o += v * profile.effective_potential(x);
        }
    }
    ComplexField::new(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference_grid() -> SpatialGrid {
        SpatialGrid::new(-150.0, 150.0, 4097).unwrap()
    }

    fn exponential_profile() -> InhomogeneityProfile {
        // g = e^{2x}, 1/√g = e^{-x}
        InhomogeneityProfile::generic(
            GenericProfile {
                g: Arc::new(|x: f64| (2.0 * x).exp()),
                inv_sqrt_g: Arc::new(|x: f64| (-x).exp()),
                d_inv_sqrt_g: Arc::new(|x: f64| -(-x).exp()),
                d2_inv_sqrt_g: Arc::new(|x: f64| (-x).exp()),
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
        )
        .unwrap()
    }

    #[test]
    fn default_profile_value_at_origin() {
        let p = make_inverse_square(1.0, -200.0, &reference_grid()).unwrap();
        assert_abs_diff_eq!(p.g(0.0), 2.5e-5, epsilon = 1e-18);
        assert_eq!(p.validity(), (f64::NEG_INFINITY, 200.0));
    }

    #[test]
    fn inverse_square_has_no_potential() {
        let grid = reference_grid();
        let p = make_inverse_square(1.0, -200.0, &grid).unwrap();
        let v = effective_potential_term(&p, &grid).unwrap();
        assert!(v.values.iter().all(|&x| x == 0.0));
        assert!(grid.points().all(|x| p.effective_potential(x) == 0.0));
    }

    #[test]
    fn singularity_inside_domain_is_rejected() {
        let bad = SpatialGrid::new(0.0, 300.0, 4097).unwrap();
        let err = make_inverse_square(1.0, -200.0, &bad).unwrap_err();
        assert!(matches!(err, Error::Singularity { x_sing, .. } if x_sing == 200.0));
        assert_eq!(err.exit_code(), 4);
        assert!(make_inverse_square(0.0, 0.0, &reference_grid()).is_err());
    }

    #[test]
    fn singular_grid_rejected_by_perturbation() {
        let p = make_inverse_square(1.0, -200.0, &reference_grid()).unwrap();
        let wide = SpatialGrid::new(100.0, 300.0, 257).unwrap();
        let u = ComplexField::from_fn(wide, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(apply_perturbation(&p, &u), Err(Error::Singularity { .. })));
    }

    #[test]
    fn perturbation_of_constant_field() {
        let grid = reference_grid();
        let p = make_inverse_square(1.0, -200.0, &grid).unwrap();
        let u = ComplexField::from_fn(grid, |_| Complex64::new(0.3, -0.7));
        let out = apply_perturbation(&p, &u).unwrap();
        assert!(out.values().iter().all(|z| z.norm() < 1e-12));

        // generic profile: P = Ṽ u = -u/2
        let small = SpatialGrid::new(-2.0, 2.0, 65).unwrap();
        let e = exponential_profile();
        let c = ComplexField::from_fn(small, |_| Complex64::new(2.0, 1.0));
        for z in apply_perturbation(&e, &c).unwrap().values() {
            assert_abs_diff_eq!(z.re, -1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(z.im, -0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn homogeneous_perturbation_vanishes() {
        let grid = SpatialGrid::new(-20.0, 20.0, 801).unwrap();
        let p = InhomogeneityProfile::homogeneous(1.0).unwrap();
        let u = ComplexField::from_fn(grid, |x| Complex64::new(x.tanh(), 0.25));
        assert!(apply_perturbation(&p, &u).unwrap().values().iter().all(|z| z.norm() == 0.0));
        let c0 = make_inverse_square(0.0, 1.0, &grid).unwrap();
        assert!(apply_perturbation(&c0, &u).unwrap().values().iter().all(|z| z.norm() == 0.0));
        let v = effective_potential_term(&p, &grid).unwrap();
        assert!(v.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn plane_wave_perturbation_at_origin() {
        let grid = SpatialGrid::new(-10.0, 10.0, 2001).unwrap();
        let p = make_inverse_square(1.0, -200.0, &grid).unwrap();
        let u = ComplexField::from_fn(grid, |x| Complex64::new(0.0, x).exp());
        let out = apply_perturbation(&p, &u).unwrap();
        let mid = grid.nearest_index(0.0);
        assert_eq!(grid.x(mid), 0.0);
        let z = out.values()[mid];
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(z.im, 1.0 / 200.0, epsilon = 1e-10);
    }

    #[test]
    fn exponential_profile_has_constant_potential() {
        let grid = SpatialGrid::new(-3.0, 3.0, 129).unwrap();
        let v = effective_potential_term(&exponential_profile(), &grid).unwrap();
        for x in v.values {
            assert_abs_diff_eq!(x, -0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn gradient_coefficient_is_branch_free() {
        for (c, d) in [(1.0, -200.0), (1.0, 200.0), (-0.5, 30.0), (2.0, -1.0)] {
            let p = InhomogeneityProfile {
                kind: Kind::InverseSquare { c, d },
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            };
            for x in [-350.0, -3.0, 0.0, 7.5, 150.0] {
                let w: f64 = d + c * x;
                if w == 0.0 {
                    continue;
                }
                assert_eq!(p.gradient_coefficient(x), c / w);
                // Same product through the |w| route.
                let via_abs = (c * w.signum()) / w.abs();
                assert!((p.gradient_coefficient(x) - via_abs).abs() <= 1e-15 * via_abs.abs());
            }
        }
    }

    #[test]
    fn declared_derivatives_match_numerical_ones() {
        // g = 1/(2 + sin x)^2 through the generic path
        let p = InhomogeneityProfile::generic(
            GenericProfile {
                g: Arc::new(|x: f64| 1.0 / (2.0 + x.sin()).powi(2)),
                inv_sqrt_g: Arc::new(|x: f64| 2.0 + x.sin()),
                d_inv_sqrt_g: Arc::new(f64::cos),
                d2_inv_sqrt_g: Arc::new(|x: f64| -x.sin()),
            },
            f64::NEG_INFINITY,
            f64::INFINITY,
        )
        .unwrap();
        let err_at = |n: usize| {
            let grid = SpatialGrid::new(-4.0, 4.0, n).unwrap();
            let h: Vec<f64> = grid.points().map(|x| p.inv_sqrt_g(x)).collect();
            let mut d = vec![0.0; n];
            grid::d1_into(&h, grid.dx(), &mut d);
            grid.points()
                .zip(&d)
                .map(|(x, v)| (v / p.inv_sqrt_g(x) - p.gradient_coefficient(x)).abs())
                .fold(0.0, f64::max)
        };
        let coarse = err_at(129);
        let fine = err_at(257);
        assert!(fine < 1e-6);
        assert!(coarse / fine >= 12.0);
        // inverse-square: numerical d/dx |w| against C sign(w)
        let grid = reference_grid();
        let sq = make_inverse_square(1.0, -200.0, &grid).unwrap();
        let h: Vec<f64> = grid.points().map(|x| sq.inv_sqrt_g(x)).collect();
        let mut d = vec![0.0; h.len()];
        grid::d1_into(&h, grid.dx(), &mut d);
        for (x, v) in grid.points().zip(&d) {
            assert_abs_diff_eq!(v / sq.inv_sqrt_g(x), sq.gradient_coefficient(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_square_perturbation_has_no_potential_path() {
        let grid = SpatialGrid::new(-50.0, 50.0, 1025).unwrap();
        let p = make_inverse_square(1.0, -200.0, &grid).unwrap();
        let u = ComplexField::from_fn(grid, |x| Complex64::new(x.tanh(), 0.3 / x.cosh()));
        let out = apply_perturbation(&p, &u).unwrap();
        let du = grid::derivative1(&u);
        for ((o, d), x) in out.values().iter().zip(du.values()).zip(grid.points()) {
            assert_eq!(*o, -d * (1.0 / (-200.0 + x)));
        }
    }
}
