//! Bright/dark variables and adiabatic elimination.
//!
//! Linear systems are rewritten in the bright/dark basis of the mixing
//! matrix, in dimensionless time `s = t / T`:
//!
//! ```text
//! i B'  = T Omega e + sum_k alpha_Bk D_k
//! i e'  = T Omega B - T z e
//! i D_j = alpha_Bj^* B + sum_k alpha_jk D_k
//! ```
//!
//! with `z = delta + i gamma`. Setting `e' = 0` gives `e = Omega B / z`;
//! setting `B' = 0` in what remains gives `B = -z / (T Omega^2) sum_k alpha_Bk D_k`.
//! For the nonlinear systems only the excited amplitude is eliminated,
//! `e = (pump a^2 + sum_k dump_k g_k) / (2 z)`, in laboratory time.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{System, Variant};
use crate::ode::{integrate, IntegrationOptions, Trajectory, MAX_STEPS};
use crate::pulse::{Alphas, Geometry, PulseSchedule, RABI_FLOOR};
use crate::series::TimeSeries;
use crate::spectral::{stage_boundaries, DarkStateMode, StageBoundaries};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionLevel {
    Full,
    MinusExcited,
    /// Linear systems only.
    MinusExcitedAndBright,
}

impl ReductionLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ReductionLevel::Full => "full",
            ReductionLevel::MinusExcited => "minus-excited",
            ReductionLevel::MinusExcitedAndBright => "minus-bright",
        }
    }

    pub fn supports(self, variant: Variant) -> bool {
        self != ReductionLevel::MinusExcitedAndBright || variant.is_linear()
    }
}

impl fmt::Display for ReductionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReductionLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ReductionLevel::Full),
            "minus-excited" => Ok(ReductionLevel::MinusExcited),
            "minus-bright" | "minus-excited-and-bright" => Ok(ReductionLevel::MinusExcitedAndBright),
            _ => Err(Error::Config(format!("unknown reduction level `{s}`"))),
        }
    }
}

fn require_linear(system: &System) -> Result<()> {
    if system.variant.is_linear() {
        Ok(())
    } else {
        Err(Error::NonlinearVariant)
    }
}

fn require_geometry(system: &System, schedule: &PulseSchedule) -> Result<()> {
    if system.geometry() != schedule.geometry() {
        return Err(Error::InvalidParameter(format!(
            "{} system needs {:?} pulses",
            system.variant,
            system.geometry()
        )));
    }
    Ok(())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn nonzero_detuning(system: &System) -> Result<C64> {
    let z = system.complex_detuning();
    if z == ZERO {
        return Err(Error::SingularElimination);
    }
    Ok(z)
}

/// Mixing rows restricted to the geometry: `(B, e, D)` over `(a, e, g)` or
/// `(B, e, D1, D2)` over `(a, e, g1, g2)`.
fn xi(schedule: &PulseSchedule, t: f64) -> Result<Vec<[f64; 4]>> {
    let m = schedule.mixing(t)?.xi_matrix();
    Ok(match schedule.geometry() {
        Geometry::Lambda => m[..3].to_vec(),
        Geometry::Tripod => m.to_vec(),
    })
}

/// Bare amplitudes to `(B, e, D)` or `(B, e, D1, D2)`.
pub fn to_bright_dark(system: &System, schedule: &PulseSchedule, t: f64, psi: &[C64]) -> Result<Vec<C64>> {
    require_linear(system)?;
    require_geometry(system, schedule)?;
    check_len(system.dim(), psi.len())?;
    let x = xi(schedule, t)?;
    Ok(x.iter()
        .map(|row| psi.iter().zip(row).map(|(p, w)| p * w).sum())
        .collect())
}

pub fn from_bright_dark(system: &System, schedule: &PulseSchedule, t: f64, bd: &[C64]) -> Result<Vec<C64>> {
    require_linear(system)?;
    require_geometry(system, schedule)?;
    check_len(system.dim(), bd.len())?;
    let x = xi(schedule, t)?;
    let n = bd.len();
    Ok((0..n).map(|m| (0..n).map(|j| bd[j] * x[j][m]).sum()).collect())
}

/// Everything the bright/dark equations need at one time.
#[derive(Clone, Copy, Debug)]
struct Couplings {
    /// `T Omega`.
    t_omega: f64,
    /// `alpha_B1, alpha_B2, alpha_12`; lambda uses only the first.
    a_b1: C64,
    a_b2: C64,
    a_12: C64,
}

impl Couplings {
    fn at(schedule: &PulseSchedule, t: f64) -> Result<Self> {
        let omega = schedule.rabi(t).total();
        let t_omega = schedule.width() * omega;
        Ok(match schedule.alphas(t)? {
            Alphas::Lambda(a) => Couplings {
                t_omega,
                a_b1: a,
                a_b2: ZERO,
                a_12: ZERO,
            },
            Alphas::Tripod { a13, a14, a34 } => Couplings {
                t_omega,
                a_b1: a13,
                a_b2: a14,
                a_12: a34,
            },
        })
    }

    /// `T Omega^2 / z` written as `(T Omega)^2 / (T z)`.
    fn bright_rate(&self, tz: C64) -> C64 {
        self.t_omega * self.t_omega / tz
    }

    fn checked_omega(&self, t: f64) -> Result<()> {
        if !(self.t_omega > RABI_FLOOR) {
            return Err(Error::Singularity {
                t,
                reason: "total Rabi frequency vanishes".into(),
            });
        }
        Ok(())
    }
}

/// Derivative with respect to `s = t / T` of the bright/dark state at
/// laboratory time `t`.
pub fn rhs_bright_dark(system: &System, schedule: &PulseSchedule, t: f64, state: &[C64]) -> Result<Vec<C64>> {
    require_linear(system)?;
    require_geometry(system, schedule)?;
    let mut out = vec![ZERO; system.dim()];
    bright_dark_into(system, schedule, t, state, &mut out)?;
    Ok(out)
}

fn bright_dark_into(system: &System, schedule: &PulseSchedule, t: f64, y: &[C64], dy: &mut [C64]) -> Result<()> {
    check_len(system.dim(), y.len())?;
    let k = Couplings::at(schedule, t)?;
    let tz = schedule.width() * system.complex_detuning();
    let (b, e) = (y[0], y[1]);
    let d1 = y[2];
    let d2 = y.get(3).copied().unwrap_or(ZERO);
    dy[0] = -I * (k.t_omega * e + k.a_b1 * d1 + k.a_b2 * d2);
    dy[1] = -I * (k.t_omega * b - tz * e);
    dy[2] = -I * (k.a_b1.conj() * b + k.a_12 * d2);
    if y.len() == 4 {
        dy[3] = -I * (k.a_b2.conj() * b + k.a_12.conj() * d1);
    }
    Ok(())
}

/// Derivative of a reduced state together with the amplitude that was
/// eliminated to obtain it.
#[derive(Clone, Debug, PartialEq)]
pub struct Elimination {
    pub derivative: Vec<C64>,
    pub reconstructed: C64,
}

/// Excited state eliminated. Linear systems take `(B, D)` or `(B, D1, D2)`
/// and return `d/ds`; nonlinear systems take `(a, g)` or `(a, g1, g2)` and
/// return `d/dt`.
pub fn eliminate_excited(system: &System, schedule: &PulseSchedule, t: f64, state: &[C64]) -> Result<Elimination> {
    require_geometry(system, schedule)?;
    let mut derivative = vec![ZERO; system.dim() - 1];
    let reconstructed = if system.variant.is_linear() {
        linear_minus_excited(system, schedule, t, state, &mut derivative)?
    } else {
        nonlinear_minus_excited(system, schedule, t, state, &mut derivative)?
    };
    Ok(Elimination {
        derivative,
        reconstructed,
    })
}

fn linear_minus_excited(system: &System, schedule: &PulseSchedule, t: f64, y: &[C64], dy: &mut [C64]) -> Result<C64> {
    check_len(system.dim() - 1, y.len())?;
    let z = nonzero_detuning(system)?;
    let w = schedule.width();
    let k = Couplings::at(schedule, t)?;
    let (b, d1) = (y[0], y[1]);
    let d2 = y.get(2).copied().unwrap_or(ZERO);
    dy[0] = -I * (k.bright_rate(w * z) * b + k.a_b1 * d1 + k.a_b2 * d2);
    dy[1] = -I * (k.a_b1.conj() * b + k.a_12 * d2);
    if y.len() == 3 {
        dy[2] = -I * (k.a_b2.conj() * b + k.a_12.conj() * d1);
    }
    Ok(k.t_omega / (w * z) * b)
}

fn nonlinear_minus_excited(
    system: &System,
    schedule: &PulseSchedule,
    t: f64,
    y: &[C64],
    dy: &mut [C64],
) -> Result<C64> {
    check_len(system.dim() - 1, y.len())?;
    let z = nonzero_detuning(system)?;
    let e = nonlinear_excited(schedule, t, y, z);
    let r = schedule.rabi(t);
    dy[0] = -I * r.pump * y[0].conj() * e;
    dy[1] = -I * 0.5 * r.dump1 * e;
    if y.len() == 3 {
        dy[2] = -I * 0.5 * r.dump2 * e;
    }
    Ok(e)
}

fn nonlinear_excited(schedule: &PulseSchedule, t: f64, y: &[C64], z: C64) -> C64 {
    let r = schedule.rabi(t);
    let drive = r.pump * y[0] * y[0] + r.dump1 * y[1] + r.dump2 * y.get(2).copied().unwrap_or(ZERO);
    drive / (2.0 * z)
}

/// Bright state eliminated from the linear reduced system: takes `(D)` or
/// `(D1, D2)` and returns `d/ds`. With `leading_order` the tripod keeps only
/// the dark-dark coupling.
pub fn eliminate_bright(
    system: &System,
    schedule: &PulseSchedule,
    t: f64,
    state: &[C64],
    leading_order: bool,
) -> Result<Elimination> {
    require_linear(system)?;
    require_geometry(system, schedule)?;
    let mut derivative = vec![ZERO; system.dim() - 2];
    let reconstructed = linear_minus_bright(system, schedule, t, state, leading_order, &mut derivative)?;
    Ok(Elimination {
        derivative,
        reconstructed,
    })
}

fn linear_minus_bright(
    system: &System,
    schedule: &PulseSchedule,
    t: f64,
    y: &[C64],
    leading_order: bool,
    dy: &mut [C64],
) -> Result<C64> {
    check_len(system.dim() - 2, y.len())?;
    let z = nonzero_detuning(system)?;
    let w = schedule.width();
    let k = Couplings::at(schedule, t)?;
    k.checked_omega(t)?;
    // z / (T Omega^2)
    let pre = w * z / (k.t_omega * k.t_omega);
    let d1 = y[0];
    let d2 = y.get(1).copied().unwrap_or(ZERO);
    let b = -pre * (k.a_b1 * d1 + k.a_b2 * d2);
    let scale = if leading_order { ZERO } else { C64::from(1.0) };
    dy[0] = -I * (scale * k.a_b1.conj() * b + k.a_12 * d2);
    if y.len() == 2 {
        dy[1] = -I * (scale * k.a_b2.conj() * b + k.a_12.conj() * d1);
    }
    Ok(b)
}

/// A system written in the variables kept at one reduction level.
struct LevelModel<'a> {
    system: System,
    schedule: &'a PulseSchedule,
    level: ReductionLevel,
    leading_order: bool,
}

impl LevelModel<'_> {
    /// Laboratory time per unit of model time.
    fn time_unit(&self) -> f64 {
        if self.level != ReductionLevel::Full && self.system.variant.is_linear() {
            self.schedule.width()
        } else {
            1.0
        }
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) -> Result<()> {
        let (sys, s) = (&self.system, self.schedule);
        match (self.level, sys.variant.is_linear()) {
            (ReductionLevel::Full, _) => sys.rhs_at(s, t, y, dy),
            (ReductionLevel::MinusExcited, true) => linear_minus_excited(sys, s, t, y, dy).map(drop),
            (ReductionLevel::MinusExcited, false) => nonlinear_minus_excited(sys, s, t, y, dy).map(drop),
            (ReductionLevel::MinusExcitedAndBright, _) => {
                linear_minus_bright(sys, s, t, y, self.leading_order, dy).map(drop)
            }
        }
    }

    /// Bare amplitudes with the eliminated ones reconstructed.
    fn bare(&self, t: f64, y: &[C64]) -> Result<Vec<C64>> {
        let (sys, s) = (&self.system, self.schedule);
        let mut scratch = vec![ZERO; y.len()];
        match (self.level, sys.variant.is_linear()) {
            (ReductionLevel::Full, _) => Ok(y.to_vec()),
            (ReductionLevel::MinusExcited, true) => {
                let e = linear_minus_excited(sys, s, t, y, &mut scratch)?;
                let mut bd = y.to_vec();
                bd.insert(1, e);
                from_bright_dark(sys, s, t, &bd)
            }
            (ReductionLevel::MinusExcited, false) => {
                let e = nonlinear_minus_excited(sys, s, t, y, &mut scratch)?;
                let mut psi = y.to_vec();
                psi.insert(1, e);
                Ok(psi)
            }
            (ReductionLevel::MinusExcitedAndBright, _) => {
                let b = linear_minus_bright(sys, s, t, y, self.leading_order, &mut scratch)?;
                let z = nonzero_detuning(sys)?;
                let e = s.rabi(t).total() / z * b;
                let mut bd = vec![b, e];
                bd.extend_from_slice(y);
                from_bright_dark(sys, s, t, &bd)
            }
        }
    }

    /// Upper estimate of the fastest decay rate per unit laboratory time.
    fn rate(&self, t: f64) -> Result<f64> {
        let r = self.schedule.rabi(t);
        let z = self.system.complex_detuning().norm();
        Ok(match self.level {
            ReductionLevel::Full => 0.0,
            ReductionLevel::MinusExcited => r.sum_sq() / z,
            ReductionLevel::MinusExcitedAndBright => {
                let k = Couplings::at(self.schedule, t)?;
                let a2 = k.a_b1.norm_sqr() + k.a_b2.norm_sqr();
                let w = self.schedule.width();
                if a2 == 0.0 {
                    0.0
                } else {
                    a2 * z / (w * w * r.sum_sq())
                }
            }
        })
    }

    /// The requested step, shortened so that `step * rate <= 1` on the window.
    fn stable_step(&self, window: (f64, f64), step: f64) -> Result<f64> {
        const PROBES: usize = 2000;
        let mut worst: f64 = 0.0;
        for i in 0..=PROBES {
            let t = window.0 + (window.1 - window.0) * i as f64 / PROBES as f64;
            worst = worst.max(self.rate(t)?);
        }
        let h = if worst * step > 1.0 { 1.0 / worst } else { step };
        let steps = (window.1 - window.0) / h;
        if !steps.is_finite() || steps > MAX_STEPS {
            return Err(Error::StepLimit {
                steps,
                limit: MAX_STEPS,
            });
        }
        Ok(h)
    }

    /// Integrates over a laboratory-time window and returns laboratory times.
    fn run(&self, y0: &[C64], window: (f64, f64), step: f64, stride: f64) -> Result<(Trajectory<C64>, f64)> {
        let h = self.stable_step(window, step)?;
        let u = self.time_unit();
        let opts = IntegrationOptions::new(window.0 / u, window.1 / u, h / u).with_stride(stride * u);
        let mut tr = integrate(|s, y: &[C64], dy: &mut [C64]| self.rhs(s * u, y, dy), y0, &opts)?;
        for t in &mut tr.times {
            *t *= u;
        }
        Ok((tr, h))
    }
}

/// Options of a reduction chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainOptions {
    pub window: (f64, f64),
    /// Laboratory-time step; reduced levels shorten it where they are stiff.
    pub step: f64,
    /// Output samples per unit laboratory time.
    pub stride: f64,
    /// Keep only the dark-dark coupling after eliminating the bright state.
    pub leading_order: bool,
    /// Integrate the bright-eliminated level over the whole window instead
    /// of between the stage boundaries.
    pub full_window: bool,
}

impl ChainOptions {
    pub fn new(window: (f64, f64), step: f64) -> Self {
        Self {
            window,
            step,
            stride: 100.0,
            leading_order: false,
            full_window: false,
        }
    }
}

/// One level of a chain in bare populations.
#[derive(Clone, Debug)]
pub struct LevelRun {
    pub level: ReductionLevel,
    pub series: TimeSeries,
    /// Bare amplitudes at the sample times.
    pub states: Vec<Vec<C64>>,
    pub window: (f64, f64),
    /// Largest step actually used.
    pub step: f64,
    /// Weighted norm dropped when projecting onto the retained variables.
    pub discarded_norm: f64,
}

#[derive(Clone, Debug)]
pub struct ChainRun {
    pub runs: Vec<LevelRun>,
    pub boundaries: Option<StageBoundaries>,
}

impl ChainRun {
    pub fn level(&self, level: ReductionLevel) -> Option<&LevelRun> {
        self.runs.iter().find(|r| r.level == level)
    }
}

/// Population channel names for a variant: bare components, then bright
/// and dark ones for linear systems, then `norm`.
pub fn population_channels(variant: Variant) -> Vec<String> {
    let mut ch: Vec<String> = variant.components().iter().map(|c| format!("P{c}")).collect();
    if variant.is_linear() {
        ch.push("PB".into());
        match variant.geometry() {
            Geometry::Lambda => ch.push("PD".into()),
            Geometry::Tripod => ch.extend(["PD1".into(), "PD2".into()]),
        }
    }
    ch.push("norm".into());
    ch
}

/// Population row for bare amplitudes `psi` at `t`.
pub fn population_row(system: &System, schedule: &PulseSchedule, t: f64, psi: &[C64]) -> Result<Vec<f64>> {
    let mut row = system.populations(psi)?;
    let norm: f64 = row.iter().sum();
    if system.variant.is_linear() {
        let bd = to_bright_dark(system, schedule, t, psi)?;
        row.push(bd[0].norm_sqr());
        row.extend(bd[2..].iter().map(|v| v.norm_sqr()));
    }
    row.push(norm);
    Ok(row)
}

fn level_run(model: &LevelModel, tr: Trajectory<C64>, h: f64, discarded_norm: f64) -> Result<LevelRun> {
    let sys = &model.system;
    let mut series = TimeSeries::new(population_channels(sys.variant));
    let mut states = Vec::with_capacity(tr.len());
    for (t, y) in tr.times.iter().zip(&tr.states) {
        let psi = model.bare(*t, y)?;
        series.push(*t, population_row(sys, model.schedule, *t, &psi)?)?;
        states.push(psi);
    }
    let window = series.window().unwrap_or((f64::NAN, f64::NAN));
    Ok(LevelRun {
        level: model.level,
        series,
        states,
        window,
        step: h,
        discarded_norm,
    })
}

/// Integrates the requested levels from the bare initial state `psi0`.
///
/// The excited-eliminated level starts at the window start with the excited
/// amplitude projected out. The bright-eliminated level starts at the first
/// stage boundary from the excited-eliminated solution with the bright
/// amplitude projected out, and stops at the second; with
/// `full_window` it starts from `psi0` at the window start instead.
pub fn reduction_chain_run(
    system: &System,
    schedule: &PulseSchedule,
    psi0: &[C64],
    levels: &[ReductionLevel],
    opts: &ChainOptions,
) -> Result<ChainRun> {
    require_geometry(system, schedule)?;
    check_len(system.dim(), psi0.len())?;
    for l in levels {
        if !l.supports(system.variant) {
            return Err(Error::Config(format!("level `{l}` is only defined for linear systems")));
        }
        if *l != ReductionLevel::Full {
            nonzero_detuning(system)?;
        }
    }
    let model = |level| LevelModel {
        system: *system,
        schedule,
        level,
        leading_order: opts.leading_order,
    };
    let (t0, t_end) = opts.window;
    let wants = |l| levels.contains(&l);
    let bright = wants(ReductionLevel::MinusExcitedAndBright);
    let boundaries = if bright && !opts.full_window {
        Some(stage_boundaries(
            system,
            schedule,
            opts.window,
            DarkStateMode::Manifold,
            opts.step,
        )?)
    } else {
        None
    };

    let mut runs = Vec::new();
    for &level in levels {
        let m = model(level);
        let run = match level {
            ReductionLevel::Full => {
                let (tr, h) = m.run(psi0, opts.window, opts.step, opts.stride)?;
                level_run(&m, tr, h, 0.0)?
            }
            ReductionLevel::MinusExcited => {
                let (y0, lost) = project_excited(system, schedule, t0, psi0)?;
                let (tr, h) = m.run(&y0, opts.window, opts.step, opts.stride)?;
                level_run(&m, tr, h, lost)?
            }
            ReductionLevel::MinusExcitedAndBright => {
                let (start, y_start) = match boundaries {
                    None => {
                        let bd = to_bright_dark(system, schedule, t0, psi0)?;
                        (t0, bd)
                    }
                    Some(b) => {
                        let me = model(ReductionLevel::MinusExcited);
                        let (y0, _) = project_excited(system, schedule, t0, psi0)?;
                        let (tr, _) = me.run(&y0, (t0, b.t1), opts.step, opts.stride)?;
                        let (_, y1) = tr.last().ok_or(Error::InvalidParameter("empty handoff run".into()))?;
                        let mut bd = y1.to_vec();
                        bd.insert(1, ZERO);
                        (b.t1, bd)
                    }
                };
                let stop = boundaries.map_or(t_end, |b| b.t2);
                let lost = y_start[0].norm_sqr() + y_start[1].norm_sqr();
                let (tr, h) = m.run(&y_start[2..], (start, stop), opts.step, opts.stride)?;
                level_run(&m, tr, h, lost)?
            }
        };
        runs.push(run);
    }
    Ok(ChainRun { runs, boundaries })
}

/// Reduced initial state with the excited amplitude dropped and the weighted
/// norm that was dropped with it.
fn project_excited(system: &System, schedule: &PulseSchedule, t0: f64, psi0: &[C64]) -> Result<(Vec<C64>, f64)> {
    let mut y = if system.variant.is_linear() {
        to_bright_dark(system, schedule, t0, psi0)?
    } else {
        psi0.to_vec()
    };
    let e = y.remove(1);
    Ok((y, system.weights()[1] * e.norm_sqr()))
}
