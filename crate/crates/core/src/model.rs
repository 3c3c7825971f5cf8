//! Equations of motion, normalization and linearization of the four systems.
//!
//! State ordering is `(a, e, g)` for lambda and `(a, e, g1, g2)` for tripod
//! systems. The linear systems follow the Schrödinger form
//! `i psi' = H psi`; the nonlinear (atom–molecule) systems are the mean-field
//! equations where the pump couples a pair of `a` particles to one `e`
//! molecule and all molecular couplings carry a factor one half.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pulse::{Geometry, PulseSchedule, Rabi};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    LinearLambda,
    LinearTripod,
    NonlinearLambda,
    NonlinearTripod,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::LinearLambda,
        Variant::LinearTripod,
        Variant::NonlinearLambda,
        Variant::NonlinearTripod,
    ];

    pub fn geometry(self) -> Geometry {
        match self {
            Variant::LinearLambda | Variant::NonlinearLambda => Geometry::Lambda,
            Variant::LinearTripod | Variant::NonlinearTripod => Geometry::Tripod,
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, Variant::LinearLambda | Variant::LinearTripod)
    }

    pub fn dim(self) -> usize {
        self.geometry().dim()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::LinearLambda => "linear-lambda",
            Variant::LinearTripod => "linear-tripod",
            Variant::NonlinearLambda => "nonlinear-lambda",
            Variant::NonlinearTripod => "nonlinear-tripod",
        }
    }

    /// Names of the state components in storage order.
    pub fn components(self) -> &'static [&'static str] {
        match self.geometry() {
            Geometry::Lambda => &["a", "e", "g"],
            Geometry::Tripod => &["a", "e", "g1", "g2"],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant `{s}`")))
    }
}

/// A system variant together with its loss rate and one-photon detuning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct System {
    pub variant: Variant,
    pub gamma: f64,
    pub detuning: f64,
}

impl System {
    pub fn new(variant: Variant, gamma: f64, detuning: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("loss rate must be >= 0, got {gamma}")));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter("detuning must be finite".into()));
        }
        Ok(Self {
            variant,
            gamma,
            detuning,
        })
    }

    pub fn dim(&self) -> usize {
        self.variant.dim()
    }

    pub fn geometry(&self) -> Geometry {
        self.variant.geometry()
    }

    /// `delta + i gamma`.
    pub fn complex_detuning(&self) -> C64 {
        C64::new(self.detuning, self.gamma)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// Time derivative of the state for the given Rabi frequencies.
    pub fn rhs(&self, rabi: &Rabi, psi: &[C64], out: &mut [C64]) -> Result<()> {
        self.check_dim(psi.len())?;
        self.check_dim(out.len())?;
        let z = self.complex_detuning();
        let e = psi[1];
        let (p, d1, d2) = (rabi.pump, rabi.dump1, rabi.dump2);
        // out holds i psi' first, then is multiplied by -i
        match self.variant {
            Variant::LinearLambda => {
                out[0] = e * p;
                out[1] = -z * e + psi[0] * p + psi[2] * d1;
                out[2] = e * d1;
            }
            Variant::LinearTripod => {
                out[0] = e * p;
                out[1] = -z * e + psi[0] * p + psi[2] * d1 + psi[3] * d2;
                out[2] = e * d1;
                out[3] = e * d2;
            }
            Variant::NonlinearLambda => {
                let a = psi[0];
                out[0] = a.conj() * e * p;
                out[1] = -z * e + (a * a * p + psi[2] * d1) * 0.5;
                out[2] = e * (0.5 * d1);
            }
            Variant::NonlinearTripod => {
                let a = psi[0];
                out[0] = a.conj() * e * p;
                out[1] = -z * e + (a * a * p + psi[2] * d1 + psi[3] * d2) * 0.5;
                out[2] = e * (0.5 * d1);
                out[3] = e * (0.5 * d2);
            }
        }
        for v in out.iter_mut() {
            *v *= -I;
        }
        Ok(())
    }

    pub fn rhs_at(&self, schedule: &PulseSchedule, t: f64, psi: &[C64], out: &mut [C64]) -> Result<()> {
        self.rhs(&schedule.rabi(t), psi, out)
    }

    /// Weight of each component in the conserved norm: 1 for the linear
    /// systems, 2 for the molecular levels of the nonlinear systems.
    pub fn weights(&self) -> &'static [f64] {
        match self.variant {
            Variant::LinearLambda => &[1.0, 1.0, 1.0],
            Variant::LinearTripod => &[1.0, 1.0, 1.0, 1.0],
            Variant::NonlinearLambda => &[1.0, 2.0, 2.0],
            Variant::NonlinearTripod => &[1.0, 2.0, 2.0, 2.0],
        }
    }

    /// Weighted populations, one per component.
    pub fn populations(&self, psi: &[C64]) -> Result<Vec<f64>> {
        self.check_dim(psi.len())?;
        Ok(psi.iter().zip(self.weights()).map(|(v, w)| w * v.norm_sqr()).collect())
    }

    pub fn total_norm(&self, psi: &[C64]) -> Result<f64> {
        Ok(self.populations(psi)?.iter().sum())
    }

    /// Matrix `M` of the linearized equations `i dpsi' = M dpsi`. For the
    /// nonlinear systems the pump entries carry the dark-state amplitude
    /// `psi_a0`.
    pub fn linearization(&self, rabi: &Rabi, psi_a0: Option<C64>) -> Result<Linearization> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        let (pump_ae, pump_ea, half) = if self.variant.is_linear() {
            (C64::from(rabi.pump), C64::from(rabi.pump), 1.0)
        } else {
            let a0 = psi_a0.ok_or(Error::MissingDarkState)?;
            (a0.conj() * rabi.pump, a0 * rabi.pump, 0.5)
        };
        m[(0, 1)] = pump_ae;
        m[(1, 0)] = pump_ea;
        m[(1, 1)] = -self.complex_detuning();
        m[(1, 2)] = C64::from(half * rabi.dump1);
        m[(2, 1)] = C64::from(half * rabi.dump1);
        if n == 4 {
            m[(1, 3)] = C64::from(half * rabi.dump2);
            m[(3, 1)] = C64::from(half * rabi.dump2);
        }
        Ok(Linearization { m })
    }
}

/// Linearization matrix `M` and Jacobian `A = -i M`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearization {
    pub m: DMatrix<C64>,
}

impl Linearization {
    pub fn jacobian(&self) -> DMatrix<C64> {
        self.m.map(|v| -I * v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn rabi(p: f64, d1: f64, d2: f64) -> Rabi {
        Rabi {
            pump: p,
            dump1: d1,
            dump2: d2,
        }
    }

    #[test]
    fn linear_lambda_rhs_example() {
        let s = System::new(Variant::LinearLambda, 2.0, 0.0).unwrap();
        let mut out = [ZERO; 3];
        s.rhs(&rabi(5.0, 1.7, 0.0), &[c(1.0), ZERO, ZERO], &mut out).unwrap();
        assert_eq!(out, [ZERO, C64::new(0.0, -5.0), ZERO]);
    }

    #[test]
    fn nonlinear_lambda_rhs_example() {
        let s = System::new(Variant::NonlinearLambda, 2.0, 0.0).unwrap();
        let mut out = [ZERO; 3];
        s.rhs(&rabi(4.0, 0.0, 0.0), &[c(1.0), ZERO, ZERO], &mut out).unwrap();
        assert_eq!(out[1], C64::new(0.0, -2.0));
        assert_eq!(out[0], ZERO);
    }

    #[test]
    fn zero_state_is_fixed() {
        for v in Variant::ALL {
            let s = System::new(v, 2.0, 0.3).unwrap();
            let psi = vec![ZERO; s.dim()];
            let mut out = vec![c(9.0); s.dim()];
            s.rhs(&rabi(3.0, 2.0, 1.0), &psi, &mut out).unwrap();
            assert!(out.iter().all(|v| *v == ZERO));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let s = System::new(Variant::LinearTripod, 1.0, 0.0).unwrap();
        let mut out = [ZERO; 3];
        assert!(matches!(
            s.rhs(&rabi(1.0, 1.0, 1.0), &[ZERO; 3], &mut out),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn norm_examples() {
        let nl = System::new(Variant::NonlinearLambda, 0.0, 0.0).unwrap();
        assert_eq!(nl.total_norm(&[c(1.0), ZERO, ZERO]).unwrap(), 1.0);
        assert!((nl.total_norm(&[ZERO, ZERO, c(0.5f64.sqrt())]).unwrap() - 1.0).abs() < 1e-15);
        let lt = System::new(Variant::LinearTripod, 0.0, 0.0).unwrap();
        assert_eq!(lt.total_norm(&[c(0.5); 4]).unwrap(), 1.0);
    }

    #[test]
    fn norm_rate_matches_loss() {
        // d/dt norm = -2 gamma w_e |psi_e|^2
        let psi = [
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.25),
            C64::new(0.4, -0.3),
            C64::new(0.1, 0.2),
        ];
        for v in Variant::ALL {
            let s = System::new(v, 1.3, 0.4).unwrap();
            let psi = &psi[..s.dim()];
            let mut d = vec![ZERO; s.dim()];
            s.rhs(&rabi(2.0, 1.5, 0.7), psi, &mut d).unwrap();
            let rate: f64 = psi
                .iter()
                .zip(&d)
                .zip(s.weights())
                .map(|((p, dp), w)| 2.0 * w * (p.conj() * dp).re)
                .sum();
            let want = -2.0 * s.gamma * s.weights()[1] * psi[1].norm_sqr();
            assert!((rate - want).abs() < 1e-14, "{v}: {rate} vs {want}");
        }
    }

    #[test]
    fn linearization_examples() {
        let s = System::new(Variant::LinearLambda, 2.0, 0.0).unwrap();
        let m = s.linearization(&rabi(3.0, 4.0, 0.0), None).unwrap().m;
        assert_eq!([m[(1, 0)], m[(1, 1)], m[(1, 2)]], [c(3.0), C64::new(0.0, -2.0), c(4.0)]);
        assert_eq!(m, m.transpose());

        let s = System::new(Variant::NonlinearLambda, 2.0, 0.0).unwrap();
        assert!(matches!(
            s.linearization(&rabi(3.0, 4.0, 0.0), None),
            Err(Error::MissingDarkState)
        ));
        let m = s.linearization(&rabi(3.0, 4.0, 0.0), Some(c(1.0))).unwrap().m;
        assert_eq!([m[(0, 1)], m[(1, 0)], m[(1, 2)]], [c(3.0), c(3.0), c(2.0)]);
        let m = s
            .linearization(&rabi(3.0, 4.0, 0.0), Some(C64::new(0.6, 0.8)))
            .unwrap()
            .m;
        assert_eq!(m[(0, 1)], m[(1, 0)].conj());

        let s = System::new(Variant::NonlinearTripod, 2.0, 0.5).unwrap();
        let m = s.linearization(&rabi(0.0, 0.0, 0.0), Some(c(1.0))).unwrap().m;
        let nonzero: Vec<_> = m.iter().filter(|v| **v != ZERO).collect();
        assert_eq!(nonzero, vec![&C64::new(-0.5, -2.0)]);
    }

    #[test]
    fn linear_m_is_hamiltonian() {
        // i psi' = M psi for the linear systems
        let s = System::new(Variant::LinearTripod, 2.0, 0.3).unwrap();
        let r = rabi(1.1, 2.2, 3.3);
        let psi = [
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.25),
            C64::new(0.4, -0.3),
            C64::new(0.1, 0.2),
        ];
        let mut d = [ZERO; 4];
        s.rhs(&r, &psi, &mut d).unwrap();
        let m = s.linearization(&r, None).unwrap();
        let a = m.jacobian();
        for i in 0..4 {
            let v: C64 = (0..4).map(|j| a[(i, j)] * psi[j]).sum();
            assert!((v - d[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("triangle".parse::<Variant>().is_err());
    }
}
