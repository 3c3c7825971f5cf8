//! Fixed-step classical Runge–Kutta integration of small real or complex
//! systems with sampled and dense output.

use std::ops::{Add, Mul};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Upper bound on the number of steps of a single integration.
pub const MAX_STEPS: f64 = 1e8;

/// Field the integrator can work over.
pub trait Scalar: Copy + Add<Output = Self> + Mul<f64, Output = Self> + Default {
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for C64 {
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub step: f64,
    /// Output samples per unit time. The sample spacing is rounded to a
    /// whole number of steps; the last point is always emitted.
    pub stride: f64,
    pub t0: f64,
    pub t_end: f64,
}

impl IntegrationOptions {
    pub fn new(t0: f64, t_end: f64, step: f64) -> Self {
        Self {
            step,
            stride: 100.0,
            t0,
            t_end,
        }
    }

    pub fn with_stride(mut self, stride: f64) -> Self {
        self.stride = stride;
        self
    }

    /// Number of steps and the adjusted step that lands exactly on `t_end`.
    pub fn grid(&self) -> Result<(usize, f64)> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !(self.t_end > self.t0) {
            return Err(Error::InvalidParameter(format!(
                "window [{}, {}] is empty",
                self.t0, self.t_end
            )));
        }
        let steps = ((self.t_end - self.t0) / self.step).ceil();
        if steps > MAX_STEPS {
            return Err(Error::StepLimit {
                steps,
                limit: MAX_STEPS,
            });
        }
        let n = steps.max(1.0) as usize;
        Ok((n, (self.t_end - self.t0) / n as f64))
    }

    fn every(&self, h: f64) -> usize {
        if !(self.stride > 0.0) {
            return 1;
        }
        ((1.0 / (self.stride * h)).round() as usize).max(1)
    }
}

/// Sampled solution of an integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<f64>,
    pub states: Vec<Vec<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[T])> {
        Some((*self.times.last()?, self.states.last()?.as_slice()))
    }
}

fn axpy<T: Scalar>(out: &mut [T], y: &[T], k: &[T], a: f64) {
    for ((o, &yi), &ki) in out.iter_mut().zip(y).zip(k) {
        *o = yi + ki * a;
    }
}

/// One classical fourth-order Runge–Kutta step in place.
pub fn rk4_step<T, F>(rhs: &mut F, t: f64, y: &mut [T], h: f64, scratch: &mut [Vec<T>; 5]) -> Result<()>
where
    T: Scalar,
    F: FnMut(f64, &[T], &mut [T]) -> Result<()>,
{
    let [k1, k2, k3, k4, tmp] = scratch;
    rhs(t, y, k1)?;
    axpy(tmp, y, k1, 0.5 * h);
    rhs(t + 0.5 * h, tmp, k2)?;
    axpy(tmp, y, k2, 0.5 * h);
    rhs(t + 0.5 * h, tmp, k3)?;
    axpy(tmp, y, k3, h);
    rhs(t + h, tmp, k4)?;
    let h6 = h / 6.0;
    for i in 0..y.len() {
        y[i] = y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * h6;
    }
    Ok(())
}

fn check_finite<T: Scalar>(t: f64, y: &[T]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Singularity {
            t,
            reason: "state became non-finite".into(),
        })
    }
}

/// Integrates `y' = rhs(t, y)` over the option window.
///
/// The right-hand side writes the derivative into its output slice and may
/// fail; the failure is returned unchanged.
pub fn integrate<T, F>(mut rhs: F, y0: &[T], opts: &IntegrationOptions) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: FnMut(f64, &[T], &mut [T]) -> Result<()>,
{
    let (n, h) = opts.grid()?;
    check_finite(opts.t0, y0)?;
    let every = opts.every(h);
    let dim = y0.len();
    let mut scratch: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::default(); dim]);
    let mut y = y0.to_vec();
    let mut out = Trajectory {
        times: vec![opts.t0],
        states: vec![y.clone()],
    };
    for i in 0..n {
        let t = opts.t0 + i as f64 * h;
        rk4_step(&mut rhs, t, &mut y, h, &mut scratch)?;
        let t_next = if i + 1 == n {
            opts.t_end
        } else {
            opts.t0 + (i + 1) as f64 * h
        };
        check_finite(t_next, &y)?;
        if (i + 1) % every == 0 || i + 1 == n {
            out.times.push(t_next);
            out.states.push(y.clone());
        }
    }
    Ok(out)
}

/// Solution stored at every step together with its derivative, evaluated
/// between steps by cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct DenseSolution<T> {
    t0: f64,
    h: f64,
    states: Vec<Vec<T>>,
    derivs: Vec<Vec<T>>,
}

pub fn integrate_dense<T, F>(mut rhs: F, y0: &[T], opts: &IntegrationOptions) -> Result<DenseSolution<T>>
where
    T: Scalar,
    F: FnMut(f64, &[T], &mut [T]) -> Result<()>,
{
    let (n, h) = opts.grid()?;
    check_finite(opts.t0, y0)?;
    let dim = y0.len();
    let mut scratch: [Vec<T>; 5] = std::array::from_fn(|_| vec![T::default(); dim]);
    let mut y = y0.to_vec();
    let mut states = Vec::with_capacity(n + 1);
    let mut derivs = Vec::with_capacity(n + 1);
    let mut d = vec![T::default(); dim];
    for i in 0..=n {
        let t = opts.t0 + i as f64 * h;
        rhs(t, &y, &mut d)?;
        states.push(y.clone());
        derivs.push(d.clone());
        if i < n {
            rk4_step(&mut rhs, t, &mut y, h, &mut scratch)?;
            check_finite(t + h, &y)?;
        }
    }
    Ok(DenseSolution {
        t0: opts.t0,
        h,
        states,
        derivs,
    })
}

impl<T: Scalar> DenseSolution<T> {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h * (self.states.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, &[T])> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| (self.t0 + i as f64 * self.h, s.as_slice()))
    }

    /// State at `t`, clamped to the integration window.
    pub fn eval(&self, t: f64) -> Vec<T> {
        let last = self.states.len() - 1;
        let x = ((t - self.t0) / self.h).clamp(0.0, last as f64);
        let i = (x.floor() as usize).min(last.saturating_sub(1));
        if last == 0 {
            return self.states[0].clone();
        }
        let s = x - i as f64;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        let (y0, y1, d0, d1) = (
            &self.states[i],
            &self.states[i + 1],
            &self.derivs[i],
            &self.derivs[i + 1],
        );
        (0..y0.len())
            .map(|k| y0[k] * h00 + d0[k] * (h10 * self.h) + y1[k] * h01 + d1[k] * (h11 * self.h))
            .collect()
    }
}
