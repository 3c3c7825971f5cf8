//! Gaussian control pulses, mixing angles and the nonadiabatic couplings
//! between the bright and dark combinations of ground states.
//!
//! Ratios of Rabi frequencies are evaluated in log space. Far in the pulse
//! tails the individual frequencies are many orders of magnitude below their
//! peaks, but the angles and couplings built from their ratios stay well
//! defined, so none of the schedule-based functions need a magnitude floor.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute floor on the total Rabi frequency for the value-based mixing
/// angle functions. Below it the squares underflow and the ratios are 0/0.
pub const RABI_FLOOR: f64 = 1e-150;

/// `amplitude * exp(-(t - center)^2 / width^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPulse {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl GaussianPulse {
    pub fn new(amplitude: f64, center: f64, width: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pulse amplitude must be finite and non-negative, got {amplitude}"
            )));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pulse width must be positive, got {width}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("pulse center must be finite".into()));
        }
        Ok(Self {
            amplitude,
            center,
            width,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.amplitude * (-x * x).exp()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.log_rate(t) * self.eval(t)
    }

    /// Natural log of the pulse value; `-inf` for a zero-amplitude pulse.
    pub fn ln_eval(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.amplitude.ln() - x * x
    }

    /// Logarithmic derivative `d ln(Omega)/dt = -2 (t - center) / width^2`.
    pub fn log_rate(&self, t: f64) -> f64 {
        -2.0 * (t - self.center) / (self.width * self.width)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Lambda,
    Tripod,
}

impl Geometry {
    pub fn dim(self) -> usize {
        match self {
            Geometry::Lambda => 3,
            Geometry::Tripod => 4,
        }
    }

    /// Number of identically zero Jacobian eigenvalues (dark directions).
    pub fn zero_modes(self) -> usize {
        match self {
            Geometry::Lambda => 1,
            Geometry::Tripod => 2,
        }
    }
}

/// Instantaneous Rabi frequencies. For the lambda geometry `dump1` is the
/// single dump pulse and `dump2` is always zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rabi {
    pub pump: f64,
    pub dump1: f64,
    pub dump2: f64,
}

impl Rabi {
    pub fn sum_sq(&self) -> f64 {
        self.pump * self.pump + self.dump1 * self.dump1 + self.dump2 * self.dump2
    }

    pub fn total(&self) -> f64 {
        self.pump.hypot(self.dump1).hypot(self.dump2)
    }

    /// Combined dump frequency `sqrt(dump1^2 + dump2^2)`.
    pub fn dump_total(&self) -> f64 {
        self.dump1.hypot(self.dump2)
    }
}

/// Pulse sequence for one system. All pulses share one width.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    geometry: Geometry,
    pub pump: GaussianPulse,
    pub dump1: GaussianPulse,
    pub dump2: Option<GaussianPulse>,
}

const WIDTH_TOL: f64 = 1e-12;

impl PulseSchedule {
    pub fn lambda(pump: GaussianPulse, dump: GaussianPulse) -> Result<Self> {
        check_width(&[pump, dump])?;
        Ok(Self {
            geometry: Geometry::Lambda,
            pump,
            dump1: dump,
            dump2: None,
        })
    }

    pub fn tripod(pump: GaussianPulse, dump1: GaussianPulse, dump2: GaussianPulse) -> Result<Self> {
        check_width(&[pump, dump1, dump2])?;
        Ok(Self {
            geometry: Geometry::Tripod,
            pump,
            dump1,
            dump2: Some(dump2),
        })
    }

    /// Pump and dump with common peak `omega0`.
    pub fn gaussian_lambda(omega0: f64, t_pump: f64, t_dump: f64, width: f64) -> Result<Self> {
        Self::lambda(
            GaussianPulse::new(omega0, t_pump, width)?,
            GaussianPulse::new(omega0, t_dump, width)?,
        )
    }

    /// Pump of peak `omega0` and dumps of peaks `k1 * omega0`, `k2 * omega0`.
    #[allow(clippy::too_many_arguments)]
    pub fn gaussian_tripod(
        omega0: f64,
        k1: f64,
        k2: f64,
        t_pump: f64,
        t_dump1: f64,
        t_dump2: f64,
        width: f64,
    ) -> Result<Self> {
        Self::tripod(
            GaussianPulse::new(omega0, t_pump, width)?,
            GaussianPulse::new(k1 * omega0, t_dump1, width)?,
            GaussianPulse::new(k2 * omega0, t_dump2, width)?,
        )
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn width(&self) -> f64 {
        self.pump.width
    }

    pub fn pulses(&self) -> impl Iterator<Item = &GaussianPulse> {
        [Some(&self.pump), Some(&self.dump1), self.dump2.as_ref()]
            .into_iter()
            .flatten()
    }

    pub fn peak(&self) -> f64 {
        self.pulses().map(|p| p.amplitude).fold(0.0, f64::max)
    }

    pub fn latest_center(&self) -> f64 {
        self.pulses().map(|p| p.center).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rabi(&self, t: f64) -> Rabi {
        Rabi {
            pump: self.pump.eval(t),
            dump1: self.dump1.eval(t),
            dump2: self.dump2.map_or(0.0, |p| p.eval(t)),
        }
    }

    pub fn rabi_rate(&self, t: f64) -> Rabi {
        Rabi {
            pump: self.pump.derivative(t),
            dump1: self.dump1.derivative(t),
            dump2: self.dump2.map_or(0.0, |p| p.derivative(t)),
        }
    }

    fn logs(&self, t: f64) -> [f64; 3] {
        [
            self.pump.ln_eval(t),
            self.dump1.ln_eval(t),
            self.dump2.map_or(f64::NEG_INFINITY, |p| p.ln_eval(t)),
        ]
    }

    fn log_rates(&self, t: f64) -> [f64; 3] {
        [
            self.pump.log_rate(t),
            self.dump1.log_rate(t),
            self.dump2.map_or(0.0, |p| p.log_rate(t)),
        ]
    }

    /// Mixing angles at time `t`, evaluated from log-space ratios.
    pub fn mixing(&self, t: f64) -> Result<MixingAngles> {
        let [lp, l1, l2] = self.logs(t);
        let total = self.rabi(t).total();
        let m = lp.max(l1);
        let (theta, ln_pd) = if m == f64::NEG_INFINITY {
            (0.0, f64::NEG_INFINITY)
        } else {
            let a = (lp - m).exp();
            let b = (l1 - m).exp();
            (a.atan2(b), m + a.hypot(b).ln())
        };
        let phi = if ln_pd == f64::NEG_INFINITY {
            if l2 == f64::NEG_INFINITY {
                return Err(Error::DegeneratePulse { total, floor: 0.0 });
            }
            std::f64::consts::FRAC_PI_2
        } else if l2 > ln_pd {
            (1.0f64).atan2((ln_pd - l2).exp())
        } else {
            (l2 - ln_pd).exp().atan()
        };
        Ok(MixingAngles {
            total,
            phi,
            theta_bright: theta,
            gimbal: ln_pd == f64::NEG_INFINITY,
        })
    }

    /// Time derivatives (per unit laboratory time) of `phi` and `theta_bright`.
    pub fn mixing_rates(&self, t: f64) -> Result<(f64, f64)> {
        let ang = self.mixing(t)?;
        let [rp, r1, r2] = self.log_rates(t);
        let (st, ct) = ang.theta_bright.sin_cos();
        let (sp, cp) = ang.phi.sin_cos();
        let theta_dot = if ang.gimbal { 0.0 } else { st * ct * (rp - r1) };
        let phi_dot = sp * cp * (r2 - (st * st * rp + ct * ct * r1));
        Ok((phi_dot, theta_dot))
    }

    /// Angle `theta_dark` with `tan(theta_dark) = dump2 / dump1` used by the
    /// nonlinear tripod dark-state manifold, and its time derivative.
    pub fn dark_angle(&self, t: f64) -> (f64, f64) {
        let [_, l1, l2] = self.logs(t);
        let [_, r1, r2] = self.log_rates(t);
        let m = l1.max(l2);
        if m == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        let theta = (l2 - m).exp().atan2((l1 - m).exp());
        let (s, c) = theta.sin_cos();
        (theta, s * c * (r2 - r1))
    }

    /// `ln(sqrt(dump1^2 + dump2^2) / pump)` and its time derivative.
    pub fn ln_dump_over_pump(&self, t: f64) -> (f64, f64) {
        let [lp, l1, l2] = self.logs(t);
        let [rp, r1, r2] = self.log_rates(t);
        let m = l1.max(l2);
        if m == f64::NEG_INFINITY {
            return (f64::NEG_INFINITY, 0.0);
        }
        let a = (l1 - m).exp();
        let b = (l2 - m).exp();
        let n2 = a * a + b * b;
        let ln_d = m + 0.5 * n2.ln();
        let rate_d = (a * a * r1 + b * b * r2) / n2;
        (ln_d - lp, rate_d - rp)
    }

    /// Nonadiabatic couplings of the bright/dark basis with derivatives taken
    /// in dimensionless time `t / T`.
    pub fn alphas(&self, t: f64) -> Result<Alphas> {
        let ang = self.mixing(t)?;
        let (phi_dot, theta_dot) = self.mixing_rates(t)?;
        let w = self.width();
        let xi = ang.xi_matrix();
        let xi_dot = xi_rate_matrix(ang.phi, ang.theta_bright, w * phi_dot, w * theta_dot);
        let contract = |j: usize, k: usize| -> C64 {
            let s: f64 = (0..4).map(|m| xi_dot[j][m] * xi[k][m]).sum();
            C64::new(0.0, s)
        };
        Ok(match self.geometry {
            Geometry::Lambda => Alphas::Lambda(contract(0, 2)),
            Geometry::Tripod => Alphas::Tripod {
                a13: contract(0, 2),
                a14: contract(0, 3),
                a34: contract(2, 3),
            },
        })
    }
}

fn check_width(pulses: &[GaussianPulse]) -> Result<()> {
    let w = pulses[0].width;
    if pulses.iter().any(|p| (p.width - w).abs() > WIDTH_TOL * w) {
        return Err(Error::InvalidParameter("all pulses must share one width".into()));
    }
    Ok(())
}

/// Angles of the bright/dark transformation.
///
/// `pump = total cos(phi) sin(theta_bright)`, `dump1 = total cos(phi) cos(theta_bright)`,
/// `dump2 = total sin(phi)`. For the lambda geometry `phi = 0` and
/// `xi_p = sin(theta_bright)`, `xi_d = cos(theta_bright)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingAngles {
    pub total: f64,
    pub phi: f64,
    pub theta_bright: f64,
    /// Set when `cos(phi) = 0`; `theta_bright` is then fixed to zero.
    pub gimbal: bool,
}

impl MixingAngles {
    /// Real orthogonal transformation over `(a, e, g1, g2)` whose rows are
    /// the bright state, the excited state and the two dark states.
    pub fn xi_matrix(&self) -> [[f64; 4]; 4] {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta_bright.sin_cos();
        [
            [cp * st, 0.0, cp * ct, sp],
            [0.0, 1.0, 0.0, 0.0],
            [ct, 0.0, -st, 0.0],
            [sp * st, 0.0, sp * ct, -cp],
        ]
    }

    /// Unit coupling vector `(xi_p, xi_d1, xi_d2)`.
    pub fn unit(&self) -> [f64; 3] {
        let x = self.xi_matrix();
        [x[0][0], x[0][2], x[0][3]]
    }
}

/// Time derivative of [`MixingAngles::xi_matrix`] given the angle rates.
pub fn xi_rate_matrix(phi: f64, theta: f64, phi_dot: f64, theta_dot: f64) -> [[f64; 4]; 4] {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    [
        [
            -sp * phi_dot * st + cp * ct * theta_dot,
            0.0,
            -sp * phi_dot * ct - cp * st * theta_dot,
            cp * phi_dot,
        ],
        [0.0; 4],
        [-st * theta_dot, 0.0, -ct * theta_dot, 0.0],
        [
            cp * phi_dot * st + sp * ct * theta_dot,
            0.0,
            cp * phi_dot * ct - sp * st * theta_dot,
            sp * phi_dot,
        ],
    ]
}

/// Lambda mixing: total frequency and the normalized couplings `xi_p`, `xi_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaMixing {
    pub total: f64,
    pub xi_p: f64,
    pub xi_d: f64,
}

pub fn mixing_angles_lambda(pump: f64, dump: f64) -> Result<LambdaMixing> {
    let total = pump.hypot(dump);
    if !(total > RABI_FLOOR) {
        return Err(Error::DegeneratePulse {
            total,
            floor: RABI_FLOOR,
        });
    }
    Ok(LambdaMixing {
        total,
        xi_p: pump / total,
        xi_d: dump / total,
    })
}

pub fn mixing_angles_tripod(pump: f64, dump1: f64, dump2: f64) -> Result<MixingAngles> {
    let total = pump.hypot(dump1).hypot(dump2);
    if !(total > RABI_FLOOR) {
        return Err(Error::DegeneratePulse {
            total,
            floor: RABI_FLOOR,
        });
    }
    let rho = pump.hypot(dump1);
    let gimbal = rho == 0.0;
    let theta_bright = if gimbal { 0.0 } else { pump.atan2(dump1) };
    Ok(MixingAngles {
        total,
        phi: dump2.atan2(rho),
        theta_bright,
        gimbal,
    })
}

/// Couplings between the bright and dark amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alphas {
    Lambda(C64),
    Tripod { a13: C64, a14: C64, a34: C64 },
}

impl Alphas {
    /// The single lambda coupling, or `a13` for a tripod.
    pub fn primary(&self) -> C64 {
        match *self {
            Alphas::Lambda(a) => a,
            Alphas::Tripod { a13, .. } => a13,
        }
    }
}

pub fn alpha_couplings(schedule: &PulseSchedule, t: f64) -> Result<Alphas> {
    schedule.alphas(t)
}
