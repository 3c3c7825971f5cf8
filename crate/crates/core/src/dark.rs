//! Dark states of the nonlinear systems.
//!
//! The nonlinear lambda system has a single dark point for every pair of
//! Rabi frequencies. The nonlinear tripod has a two-parameter manifold of
//! dark states; a trajectory on it is described by `(u1, u2)` with
//!
//! ```text
//! psi_a0  = sqrt(4 c u2)
//! psi_g10 =  u1 sin(theta) - u2 cos(theta)
//! psi_g20 = -u1 cos(theta) - u2 sin(theta)
//! ```
//!
//! where `tan(theta) = dump2 / dump1` and
//! `c = dump1 / (4 pump cos(theta)) = sqrt(dump1^2 + dump2^2) / (4 pump)`.
//! In the adiabatic limit the parameters obey
//!
//! ```text
//! u1' + theta' u2 = 0
//! u2' (1 + c / u2) - theta' u1 + c' = 0
//! ```
//!
//! The second equation is solved here as `u2' = u2 (theta' u1 - c') / (u2 + c)`,
//! which stays regular as `u2 -> 0`. Early in a counter-intuitive sequence
//! `c` is astronomically large and `u2 ~ 1 / (4c)` is correspondingly tiny.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ode::{integrate_dense, DenseSolution, IntegrationOptions};
use crate::pulse::{Geometry, PulseSchedule};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Dark-state amplitudes at one time. `psi` is in the variant's storage order
/// with the excited amplitude exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DarkStateSample {
    pub t: f64,
    pub psi: Vec<C64>,
    /// Manifold parameters `(u1, u2)` for the nonlinear tripod.
    pub manifold: Option<(f64, f64)>,
}

impl DarkStateSample {
    pub fn psi_a0(&self) -> C64 {
        self.psi[0]
    }
}

/// Dark point `(psi_a0, psi_g0)` of the nonlinear lambda system, with
/// `psi_a0 = sqrt(2 d / (d + eff))`, `psi_g0 = -2 p / (d + eff)` and
/// `eff = sqrt(d^2 + 8 p^2)`.
pub fn dark_point_nonlinear_lambda(pump: f64, dump: f64) -> Result<(f64, f64)> {
    let m = pump.max(dump);
    if !(m > 0.0 && m.is_finite()) || pump < 0.0 || dump < 0.0 {
        return Err(Error::DegeneratePulse {
            total: pump.hypot(dump),
            floor: 0.0,
        });
    }
    let (p, d) = (pump / m, dump / m);
    let denom = d + (d * d + 8.0 * p * p).sqrt();
    Ok(((2.0 * d / denom).sqrt(), -2.0 * p / denom))
}

pub fn dark_state_nonlinear_lambda(pump: f64, dump: f64) -> Result<DarkStateSample> {
    dark_state_nonlinear_lambda_at(pump, dump, f64::NAN)
}

fn dark_state_nonlinear_lambda_at(pump: f64, dump: f64, t: f64) -> Result<DarkStateSample> {
    let (a, g) = dark_point_nonlinear_lambda(pump, dump)?;
    Ok(DarkStateSample {
        t,
        psi: vec![C64::from(a), ZERO, C64::from(g)],
        manifold: None,
    })
}

/// Nonlinear lambda dark state for the pulses of `schedule` at `t`.
pub fn nonlinear_lambda_dark_state(schedule: &PulseSchedule, t: f64) -> Result<DarkStateSample> {
    let r = schedule.rabi(t);
    dark_state_nonlinear_lambda_at(r.pump, r.dump1, t)
}

/// Time-dependent coefficients of the manifold equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldCoefficients {
    /// `c = delta_p / (4 cos(theta))` with `delta_p = dump1 / pump`.
    pub c: f64,
    pub c_rate: f64,
    pub theta: f64,
    pub theta_rate: f64,
}

/// Starting point of a manifold trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManifoldStart {
    pub t0: f64,
    pub u1: f64,
    pub u2: f64,
    /// Ratio of `u2` to the unnormalized guess `cos(theta) / delta_p`.
    pub rescale: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct DarkManifold<'a> {
    schedule: &'a PulseSchedule,
}

impl<'a> DarkManifold<'a> {
    pub fn new(schedule: &'a PulseSchedule) -> Result<Self> {
        if schedule.geometry() != Geometry::Tripod {
            return Err(Error::InvalidParameter(
                "dark-state manifold needs tripod pulses".into(),
            ));
        }
        Ok(Self { schedule })
    }

    pub fn coefficients(&self, t: f64) -> Result<ManifoldCoefficients> {
        if self.schedule.pump.amplitude == 0.0 {
            return Err(Error::ManifoldSingularity {
                t,
                reason: "pump pulse is identically zero".into(),
            });
        }
        if self.schedule.dump1.amplitude == 0.0 {
            return Err(Error::ManifoldSingularity {
                t,
                reason: "cos(theta) = 0: dump1 is identically zero".into(),
            });
        }
        let (ln_ratio, rate) = self.schedule.ln_dump_over_pump(t);
        let c = 0.25 * ln_ratio.exp();
        if !c.is_finite() {
            return Err(Error::ManifoldSingularity {
                t,
                reason: format!("coefficient overflow, ln c = {ln_ratio}"),
            });
        }
        let (theta, theta_rate) = self.schedule.dark_angle(t);
        Ok(ManifoldCoefficients {
            c,
            c_rate: c * rate,
            theta,
            theta_rate,
        })
    }

    /// `(u1', u2')` at `t`.
    pub fn rhs(&self, t: f64, u1: f64, u2: f64) -> Result<(f64, f64)> {
        if u2 < 0.0 || !u2.is_finite() || !u1.is_finite() {
            return Err(Error::ManifoldSingularity {
                t,
                reason: format!("u2 = {u2} left the manifold"),
            });
        }
        let k = self.coefficients(t)?;
        let du1 = -k.theta_rate * u2;
        let du2 = u2 * (k.theta_rate * u1 - k.c_rate) / (u2 + k.c);
        Ok((du1, du2))
    }

    pub fn state(&self, t: f64, u1: f64, u2: f64) -> Result<DarkStateSample> {
        if u2 < 0.0 || !u2.is_finite() {
            return Err(Error::ManifoldSingularity {
                t,
                reason: format!("u2 = {u2} < 0"),
            });
        }
        let k = self.coefficients(t)?;
        let (s, c) = k.theta.sin_cos();
        let a0 = (4.0 * k.c * u2).sqrt();
        Ok(DarkStateSample {
            t,
            psi: vec![
                C64::from(a0),
                ZERO,
                C64::from(u1 * s - u2 * c),
                C64::from(-u1 * c - u2 * s),
            ],
            manifold: Some((u1, u2)),
        })
    }

    /// Start with all population in `a`: `u1 = 0` and `u2` solving
    /// `4 c u2 + 2 u2^2 = 1`, i.e. the guess `u2 = cos(theta)/delta_p = 1/(4c)`
    /// rescaled so the weighted norm is exactly one.
    pub fn initial(&self, t0: f64) -> Result<ManifoldStart> {
        let c = self.coefficients(t0)?.c;
        let u2 = 2.0 / (4.0 * c + (16.0 * c * c + 8.0).sqrt());
        Ok(ManifoldStart {
            t0,
            u1: 0.0,
            u2,
            rescale: 4.0 * c * u2,
        })
    }

    pub fn solve(&self, opts: &IntegrationOptions) -> Result<ManifoldSolution<'a>> {
        let start = self.initial(opts.t0)?;
        let dense = integrate_dense(
            |t, u: &[f64], du: &mut [f64]| {
                let (a, b) = self.rhs(t, u[0], u[1])?;
                du[0] = a;
                du[1] = b;
                Ok(())
            },
            &[start.u1, start.u2],
            opts,
        )?;
        Ok(ManifoldSolution {
            manifold: *self,
            start,
            dense,
        })
    }
}

/// Integrated manifold trajectory with dense evaluation.
#[derive(Clone, Debug)]
pub struct ManifoldSolution<'a> {
    manifold: DarkManifold<'a>,
    pub start: ManifoldStart,
    pub dense: DenseSolution<f64>,
}

impl ManifoldSolution<'_> {
    pub fn params(&self, t: f64) -> (f64, f64) {
        let u = self.dense.eval(t);
        (u[0], u[1].max(0.0))
    }

    pub fn sample(&self, t: f64) -> Result<DarkStateSample> {
        let (u1, u2) = self.params(t);
        self.manifold.state(t, u1, u2)
    }
}
