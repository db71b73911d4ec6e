//! Fixed-step RK4 and fourth-order Adams-Bashforth-Moulton (PECE) integrators for
//! small parameter systems.

use crate::error::{Error, Result};

/// Right-hand side `y' = f(t, y)` of an `N`-dimensional system.
pub trait OdeSystem<const N: usize> {
    fn derivative(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    fn derivative(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]> {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stepper {
    Rk4,
    Abm4,
}

impl std::str::FromStr for Stepper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Stepper::Rk4),
            "abm4" => Ok(Stepper::Abm4),
            other => Err(Error::config(format!("unknown stepper '{other}' (rk4 | abm4)"))),
        }
    }
}

impl std::fmt::Display for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stepper::Rk4 => "rk4",
            Stepper::Abm4 => "abm4",
        })
    }
}

/// States on the uniform time axis `t0 + k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory<const N: usize> {
    t0: f64,
    dt: f64,
    states: Vec<[f64; N]>,
}

impl<const N: usize> OdeTrajectory<N> {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.states.len()).map(move |k| self.time(k))
    }

    pub fn states(&self) -> &[[f64; N]] {
        &self.states
    }

    pub fn last(&self) -> &[f64; N] {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// Relabels the time axis by `t -> scale * t`.
    pub fn rescale_time(self, scale: f64) -> Self {
        OdeTrajectory {
            t0: self.t0 * scale,
            dt: self.dt * scale,
            states: self.states,
        }
    }
}

/// Number of `dt` steps spanning `[t0, t1]`; the span has to be a whole number of steps.
pub fn step_count(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::config(format!("time step must be positive, got {dt}")));
    }
    if !(t1 > t0) {
        return Err(Error::config(format!("empty time interval [{t0}, {t1}]")));
    }
    let ratio = (t1 - t0) / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-6 * ratio.max(1.0) {
        return Err(Error::config(format!(
            "interval length {} is not a multiple of dt = {dt}",
            t1 - t0
        )));
    }
    Ok(n as usize)
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

fn check_finite<const N: usize>(y: &[f64; N], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Instability {
            time: t,
            reason: "non-finite ODE state".into(),
        })
    }
}

fn rk4_step<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    dt: f64,
) -> Result<[f64; N]> {
    let k2 = sys.derivative(t + 0.5 * dt, &axpy(y, 0.5 * dt, k1))?;
    let k3 = sys.derivative(t + 0.5 * dt, &axpy(y, 0.5 * dt, &k2))?;
    let k4 = sys.derivative(t + dt, &axpy(y, dt, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Classical fourth-order Runge-Kutta.
pub fn rk4_integrate<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<OdeTrajectory<N>> {
    let steps = step_count(t0, t1, dt)?;
    check_finite(&y0, t0)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(y0);
    let mut y = y0;
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let f = sys.derivative(t, &y)?;
        y = rk4_step(sys, t, &y, &f, dt)?;
        check_finite(&y, t + dt)?;
        states.push(y);
    }
    Ok(OdeTrajectory { t0, dt, states })
}

/// Adams-Bashforth-Moulton of order four in PECE form; the first three steps are
/// taken with RK4.
pub fn abm4_integrate<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<OdeTrajectory<N>> {
    let steps = step_count(t0, t1, dt)?;
    check_finite(&y0, t0)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(y0);
    // f_n, f_{n-1}, f_{n-2}, f_{n-3}
    let mut hist: [[f64; N]; 4] = [[0.0; N]; 4];
    let mut y = y0;
    let mut f = sys.derivative(t0, &y)?;
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        hist.rotate_right(1);
        hist[0] = f;
        if k < 3 {
            y = rk4_step(sys, t, &y, &f, dt)?;
        } else {
            let mut pred = y;
            for i in 0..N {
                pred[i] += dt / 24.0
                    * (55.0 * hist[0][i] - 59.0 * hist[1][i] + 37.0 * hist[2][i]
                        - 9.0 * hist[3][i]);
            }
            let fp = sys.derivative(t + dt, &pred)?;
            for i in 0..N {
                y[i] += dt / 24.0
                    * (9.0 * fp[i] + 19.0 * hist[0][i] - 5.0 * hist[1][i] + hist[2][i]);
            }
        }
        check_finite(&y, t + dt)?;
        f = sys.derivative(t + dt, &y)?;
        states.push(y);
    }
    Ok(OdeTrajectory { t0, dt, states })
}

pub fn integrate<S: OdeSystem<N>, const N: usize>(
    stepper: Stepper,
    sys: &S,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<OdeTrajectory<N>> {
    match stepper {
        Stepper::Rk4 => rk4_integrate(sys, y0, t0, t1, dt),
        Stepper::Abm4 => abm4_integrate(sys, y0, t0, t1, dt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn decay(_t: f64, y: &[f64; 1]) -> Result<[f64; 1]> {
        Ok([-y[0]])
    }

    fn oscillator(_t: f64, y: &[f64; 2]) -> Result<[f64; 2]> {
        Ok([y[1], -y[0]])
    }

    #[test]
    fn rk4_exponential_decay() {
        let tr = rk4_integrate(&decay, [1.0], 0.0, 1.0, 1e-3).unwrap();
        assert_eq!(tr.len(), 1001);
        assert_abs_diff_eq!(tr.last()[0], (-1.0f64).exp(), epsilon = 1e-9);
        assert_abs_diff_eq!(tr.last()[0], 0.3678794, epsilon = 1e-7);
    }

    #[test]
    fn abm4_exponential_decay() {
        let tr = abm4_integrate(&decay, [1.0], 0.0, 1.0, 1e-3).unwrap();
        assert_abs_diff_eq!(tr.last()[0], (-1.0f64).exp(), epsilon = 1e-8);
    }

    #[test]
    fn zero_rhs_is_constant() {
        let zero = |_t: f64, _y: &[f64; 3]| Ok([0.0; 3]);
        for stepper in [Stepper::Rk4, Stepper::Abm4] {
            let tr = integrate(stepper, &zero, [1.0, -2.0, 3.5], 0.0, 2.0, 0.1).unwrap();
            assert!(tr.states().iter().all(|s| *s == [1.0, -2.0, 3.5]));
        }
    }

    #[test]
    fn oscillator_energy_drift() {
        let tr = rk4_integrate(&oscillator, [1.0, 0.0], 0.0, 100.0, 1e-3).unwrap();
        let e0 = 0.5;
        let drift = tr
            .states()
            .iter()
            .map(|s| ((0.5 * (s[0] * s[0] + s[1] * s[1])) - e0).abs() / e0)
            .fold(0.0, f64::max);
        assert!(drift <= 1e-8, "drift {drift}");
    }

    #[test]
    fn fourth_order_convergence() {
        let exact = (-1.0f64).exp();
        for stepper in [Stepper::Rk4, Stepper::Abm4] {
            let err = |dt: f64| {
                (integrate(stepper, &decay, [1.0], 0.0, 1.0, dt).unwrap().last()[0] - exact).abs()
            };
            let ratio = err(0.02) / err(0.01);
            assert!(ratio >= 12.0, "{stepper}: ratio {ratio}");
        }
    }

    #[test]
    fn deterministic() {
        for stepper in [Stepper::Rk4, Stepper::Abm4] {
            let a = integrate(stepper, &oscillator, [0.3, 0.1], 0.0, 5.0, 1e-2).unwrap();
            let b = integrate(stepper, &oscillator, [0.3, 0.1], 0.0, 5.0, 1e-2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn blow_up_reports_failure_time() {
        let blow = |_t: f64, y: &[f64; 1]| Ok([y[0] * y[0]]);
        let err = rk4_integrate(&blow, [1.0], 0.0, 2.0, 1e-2).unwrap_err();
        match err {
            Error::Instability { time, .. } => assert!(time > 0.9 && time <= 1.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(rk4_integrate(&decay, [1.0], 0.0, 1.0, 0.0).is_err());
        assert!(rk4_integrate(&decay, [1.0], 1.0, 0.0, 0.1).is_err());
        assert!(rk4_integrate(&decay, [1.0], 0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn rescaled_time_axis() {
        let tr = rk4_integrate(&decay, [1.0], 0.0, 1.0, 0.5).unwrap().rescale_time(2.0);
        assert_eq!(tr.times().collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
    }
}
