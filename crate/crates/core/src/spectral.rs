//! Eigenvalues of the linearized dynamics and of the reduced systems.
//!
//! With `lambda = -i omega`, every variant has one (lambda geometry) or two
//! (tripod geometry) identically zero `omega`, and the remaining pair solves
//! `omega^2 + b omega + c = 0` with `b = delta + i gamma`. The discriminant
//! `D = b^2 - 4c` decides whether the two decaying modes share the rate
//! `gamma / 2` (`D > 0` for zero detuning) or split towards `0` and `gamma`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::dark::{nonlinear_lambda_dark_state, DarkManifold, ManifoldSolution};
use crate::error::{Error, Result};
use crate::model::{System, Variant};
use crate::ode::{integrate_dense, DenseSolution, IntegrationOptions};
use crate::pulse::{Alphas, PulseSchedule, Rabi, RABI_FLOOR};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients of `omega^2 + b omega + c = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticCoefficients {
    pub b: C64,
    pub c: C64,
}

impl QuadraticCoefficients {
    pub fn discriminant(&self) -> C64 {
        self.b * self.b - 4.0 * self.c
    }

    pub fn residual(&self, omega: C64) -> C64 {
        omega * omega + self.b * omega + self.c
    }
}

/// `c` for the variant. Nonlinear variants need the dark-state amplitude
/// `psi_a0`.
pub fn characteristic_coeffs(system: &System, rabi: &Rabi, psi_a0: Option<C64>) -> Result<QuadraticCoefficients> {
    let dumps = rabi.dump1 * rabi.dump1 + rabi.dump2 * rabi.dump2;
    let c = if system.variant.is_linear() {
        -(dumps + rabi.pump * rabi.pump)
    } else {
        let a = psi_a0.ok_or(Error::MissingDarkState)?.norm_sqr();
        -(dumps + 4.0 * rabi.pump * rabi.pump * a) / 4.0
    };
    Ok(QuadraticCoefficients {
        b: system.complex_detuning(),
        c: C64::from(c),
    })
}

/// Roots `(-b + sqrt(D)) / 2` and `(-b - sqrt(D)) / 2` with the principal
/// square root.
pub fn solve_characteristic(q: &QuadraticCoefficients) -> (C64, C64) {
    let s = q.discriminant().sqrt();
    ((-q.b + s) * 0.5, (-q.b - s) * 0.5)
}

/// Where the nonlinear dark-state amplitude comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DarkStateMode {
    /// Closed form for the lambda system, manifold integration for the tripod.
    #[default]
    Manifold,
    /// `psi_a0` replaced by `psi_a` of the integrated full system.
    Substitution,
}

impl DarkStateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DarkStateMode::Manifold => "manifold",
            DarkStateMode::Substitution => "substitution",
        }
    }
}

impl std::str::FromStr for DarkStateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "manifold" => Ok(DarkStateMode::Manifold),
            "substitution" => Ok(DarkStateMode::Substitution),
            _ => Err(Error::Config(format!("unknown dark-state mode `{s}`"))),
        }
    }
}

enum Source<'a> {
    Linear,
    LambdaPoint,
    Manifold(ManifoldSolution<'a>),
    Full(DenseSolution<C64>),
}

/// Time-dependent `psi_a0` for a variant, prepared once over a window.
pub struct DarkAmplitude<'a> {
    schedule: &'a PulseSchedule,
    source: Source<'a>,
}

impl<'a> DarkAmplitude<'a> {
    /// Integrations (manifold or full system) start at `opts.t0` with all
    /// population in `a`.
    pub fn prepare(
        system: &System,
        schedule: &'a PulseSchedule,
        mode: DarkStateMode,
        opts: &IntegrationOptions,
    ) -> Result<Self> {
        check_geometry(system, schedule)?;
        let source = match (system.variant, mode) {
            (v, _) if v.is_linear() => Source::Linear,
            (Variant::NonlinearLambda, DarkStateMode::Manifold) => Source::LambdaPoint,
            (_, DarkStateMode::Manifold) => Source::Manifold(DarkManifold::new(schedule)?.solve(opts)?),
            (_, DarkStateMode::Substitution) => {
                let mut psi0 = vec![ZERO; system.dim()];
                psi0[0] = C64::from(1.0);
                let sys = *system;
                Source::Full(integrate_dense(
                    |t, y: &[C64], dy: &mut [C64]| sys.rhs_at(schedule, t, y, dy),
                    &psi0,
                    opts,
                )?)
            }
        };
        Ok(Self { schedule, source })
    }

    pub fn psi_a0(&self, t: f64) -> Result<Option<C64>> {
        Ok(match &self.source {
            Source::Linear => None,
            Source::LambdaPoint => Some(nonlinear_lambda_dark_state(self.schedule, t)?.psi_a0()),
            Source::Manifold(sol) => Some(sol.sample(t)?.psi_a0()),
            Source::Full(sol) => Some(sol.eval(t)[0]),
        })
    }
}

fn check_geometry(system: &System, schedule: &PulseSchedule) -> Result<()> {
    if system.geometry() != schedule.geometry() {
        return Err(Error::InvalidParameter(format!(
            "{} system needs {:?} pulses",
            system.variant,
            system.geometry()
        )));
    }
    Ok(())
}

/// Eigenvalues at one time: the forced zeros first, then the two labeled
/// roots of the quadratic.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSample {
    pub t: f64,
    pub eigenvalues: Vec<C64>,
    pub zero_modes: usize,
    pub discriminant: C64,
}

impl EigenSample {
    pub fn branches(&self) -> (C64, C64) {
        (self.eigenvalues[self.zero_modes], self.eigenvalues[self.zero_modes + 1])
    }
}

/// Closed-form eigenvalues `lambda = -i omega` at `t`, unlabeled.
pub fn eigen_sample(system: &System, schedule: &PulseSchedule, t: f64, psi_a0: Option<C64>) -> Result<EigenSample> {
    let q = characteristic_coeffs(system, &schedule.rabi(t), psi_a0)?;
    let (wp, wm) = solve_characteristic(&q);
    let zero_modes = system.geometry().zero_modes();
    let mut eigenvalues = vec![ZERO; zero_modes];
    eigenvalues.push(-I * wp);
    eigenvalues.push(-I * wm);
    Ok(EigenSample {
        t,
        eigenvalues,
        zero_modes,
        discriminant: q.discriminant(),
    })
}

/// Eigenvalues on `n` evenly spaced times of `[t0, t1]`, labeled by
/// continuity. The first sample is ordered by decreasing real part; later
/// samples keep the pairing closest to the previous one, and at exact
/// degeneracy the previous order is kept.
pub fn eigen_trace(
    system: &System,
    schedule: &PulseSchedule,
    window: (f64, f64),
    n: usize,
    mode: DarkStateMode,
    step: f64,
) -> Result<Vec<EigenSample>> {
    let dark = DarkAmplitude::prepare(
        system,
        schedule,
        mode,
        &IntegrationOptions::new(window.0, window.1, step),
    )?;
    let times = linspace(window.0, window.1, n);
    let mut out: Vec<EigenSample> = Vec::with_capacity(times.len());
    for t in times {
        let mut s = eigen_sample(system, schedule, t, dark.psi_a0(t)?)?;
        let k = s.zero_modes;
        let swap = match out.last() {
            None => s.eigenvalues[k].re < s.eigenvalues[k + 1].re,
            Some(prev) => {
                let (p0, p1) = prev.branches();
                let (a, b) = s.branches();
                let keep = (a - p0).norm() + (b - p1).norm();
                let cross = (a - p1).norm() + (b - p0).norm();
                cross < keep
            }
        };
        if swap {
            s.eigenvalues.swap(k, k + 1);
        }
        out.push(s);
    }
    Ok(out)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Times bounding the interval on which `Re D > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageBoundaries {
    pub t1: f64,
    pub t2: f64,
}

pub const BOUNDARY_SCAN_POINTS: usize = 2000;
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Roots of a scalar function that changes sign exactly twice on the window,
/// from a coarse scan followed by bisection. The function must be positive
/// between the two roots.
pub fn bracket_two_roots<F>(mut f: F, window: (f64, f64)) -> Result<StageBoundaries>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(Error::InvalidParameter(format!("empty scan window [{t0}, {t1}]")));
    }
    let grid = linspace(t0, t1, BOUNDARY_SCAN_POINTS);
    let mut prev = (grid[0], f(grid[0])? > 0.0);
    let mut brackets = Vec::new();
    for &t in &grid[1..] {
        let pos = f(t)? > 0.0;
        if pos != prev.1 {
            brackets.push((prev.0, t));
        }
        prev = (t, pos);
    }
    match brackets.len() {
        0 => return Err(Error::NoCrossing { t0, t1 }),
        2 => {}
        count => return Err(Error::TooManyCrossings { count, t0, t1 }),
    }
    let mut roots = [0.0; 2];
    for (root, &(mut lo, mut hi)) in roots.iter_mut().zip(&brackets) {
        let lo_pos = f(lo)? > 0.0;
        while hi - lo > BOUNDARY_TOL {
            let mid = 0.5 * (lo + hi);
            if (f(mid)? > 0.0) == lo_pos {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        *root = 0.5 * (lo + hi);
    }
    let b = StageBoundaries {
        t1: roots[0],
        t2: roots[1],
    };
    if f(0.5 * (b.t1 + b.t2))? <= 0.0 {
        return Err(Error::Singularity {
            t: 0.5 * (b.t1 + b.t2),
            reason: "discriminant is negative between its two zeros".into(),
        });
    }
    Ok(b)
}

/// Zeros of `Re D(t)` on the window.
pub fn stage_boundaries(
    system: &System,
    schedule: &PulseSchedule,
    window: (f64, f64),
    mode: DarkStateMode,
    step: f64,
) -> Result<StageBoundaries> {
    let dark = DarkAmplitude::prepare(
        system,
        schedule,
        mode,
        &IntegrationOptions::new(window.0, window.1, step),
    )?;
    bracket_two_roots(
        |t| {
            let q = characteristic_coeffs(system, &schedule.rabi(t), dark.psi_a0(t)?)?;
            Ok(q.discriminant().re)
        },
        window,
    )
}

/// Eigenvalues `lambda` (dimensionless time) of the bright/dark lambda system
/// with the excited state eliminated, and their discriminant
/// `D2 = -(h^2 + 4 |alpha|^2)` with `h = T Omega^2 / (delta + i gamma)`. For
/// zero detuning `D2 = T^2 Omega^4 / gamma^2 - 4 |alpha|^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reduced2d {
    pub lambda: (C64, C64),
    pub d2: C64,
    pub h: C64,
    pub alpha: C64,
}

pub fn reduced_lambda_2d_eigenvalues(schedule: &PulseSchedule, t: f64, gamma: f64, detuning: f64) -> Result<Reduced2d> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reduced eigenvalues need gamma > 0, got {gamma}"
        )));
    }
    let z = C64::new(detuning, gamma);
    let w = schedule.width();
    let omega2 = schedule.rabi(t).sum_sq();
    let alpha = schedule.alphas(t)?.primary();
    let h = w * omega2 / z;
    let d2 = -(h * h + 4.0 * alpha.norm_sqr());
    // omega = (h +- sqrt(-d2)) / 2, lambda = -i omega
    let s = (-d2).sqrt();
    let lambda = (-I * (h + s) * 0.5, -I * (h - s) * 0.5);
    Ok(Reduced2d { lambda, d2, h, alpha })
}

/// Zeros of `Re D2(t)`, where the two eigenvalues of the reduced lambda
/// system split.
pub fn reduced_lambda_2d_boundaries(
    schedule: &PulseSchedule,
    gamma: f64,
    detuning: f64,
    window: (f64, f64),
) -> Result<StageBoundaries> {
    bracket_two_roots(
        |t| Ok(reduced_lambda_2d_eigenvalues(schedule, t, gamma, detuning)?.d2.re),
        window,
    )
}

fn reduced_prefactor(schedule: &PulseSchedule, t: f64, gamma: f64, detuning: f64) -> Result<C64> {
    let z = C64::new(detuning, gamma);
    if z == ZERO {
        return Err(Error::SingularElimination);
    }
    let r = schedule.rabi(t);
    let total = r.total();
    if !(total > RABI_FLOOR) {
        return Err(Error::DegeneratePulse {
            total,
            floor: RABI_FLOOR,
        });
    }
    Ok(z / (schedule.width() * r.sum_sq()))
}

/// Rate of the dark amplitude once both the excited and bright states are
/// eliminated: `lambda = i |alpha|^2 z / (T Omega^2)`, i.e.
/// `-|alpha|^2 gamma / (T Omega^2)` at zero detuning.
pub fn reduced_lambda_1d_eigenvalue(schedule: &PulseSchedule, t: f64, gamma: f64, detuning: f64) -> Result<C64> {
    let k = reduced_prefactor(schedule, t, gamma, detuning)?;
    let alpha = schedule.alphas(t)?.primary();
    Ok(I * alpha.norm_sqr() * k)
}

/// Tripod dark-subspace Hamiltonian `H2 = H2_0 + z / (T Omega^2) H2_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedTripod2d {
    pub h2: Matrix2<C64>,
    pub h2_0: Matrix2<C64>,
    pub h2_1: Matrix2<C64>,
    /// `z / (T Omega^2)`.
    pub prefactor: C64,
    pub lambda: (C64, C64),
}

impl ReducedTripod2d {
    /// `|z / (T Omega^2)| |alpha13|^2 / |alpha34|`: the size of the
    /// correction relative to the leading coupling.
    pub fn correction_ratio(&self) -> f64 {
        (self.prefactor * self.h2_1[(0, 0)]).norm() / self.h2_0[(0, 1)].norm()
    }
}

pub fn reduced_tripod_2d_matrix(
    schedule: &PulseSchedule,
    t: f64,
    gamma: f64,
    detuning: f64,
) -> Result<ReducedTripod2d> {
    let k = reduced_prefactor(schedule, t, gamma, detuning)?;
    let Alphas::Tripod { a13, a14, a34 } = schedule.alphas(t)? else {
        return Err(Error::InvalidParameter(
            "reduced tripod matrix needs tripod pulses".into(),
        ));
    };
    let h2_0 = Matrix2::new(ZERO, a34, a34.conj(), ZERO);
    let h2_1 = -Matrix2::new(
        a13.norm_sqr().into(),
        a13.conj() * a14,
        a14.conj() * a13,
        a14.norm_sqr().into(),
    );
    let h2 = h2_0 + h2_1 * k;
    let (wp, wm) = eig2(&h2);
    Ok(ReducedTripod2d {
        h2,
        h2_0,
        h2_1,
        prefactor: k,
        lambda: (-I * wp, -I * wm),
    })
}

/// Closed-form eigenvalues of a 2x2 matrix.
pub fn eig2(m: &Matrix2<C64>) -> (C64, C64) {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let s = (tr * tr - 4.0 * det).sqrt();
    ((tr + s) * 0.5, (tr - s) * 0.5)
}

/// Decaying pair for nonzero detuning and the separation of its real parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetuningSplit {
    /// `lambda3` has the larger real part when `Im D >= 0`.
    pub lambda: (C64, C64),
    /// `|D|^(1/2) sin(arg(D) / 2)`.
    pub exact: f64,
    /// `Im D / (2 sqrt(Re D))`; `None` when `Re D <= 0`.
    pub approx: Option<f64>,
}

pub fn detuning_splitting(q: &QuadraticCoefficients) -> DetuningSplit {
    let d = q.discriminant();
    let (wp, wm) = solve_characteristic(q);
    let exact = d.norm().sqrt() * (0.5 * d.arg()).sin();
    let approx = (d.re > 0.0).then(|| d.im / (2.0 * d.re.sqrt()));
    DetuningSplit {
        lambda: (-I * wp, -I * wm),
        exact,
        approx,
    }
}

/// Eigenvalues `lambda = -i omega` of the linearization matrix from a Schur
/// decomposition.
pub fn numeric_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    let w = m.clone().eigenvalues().ok_or_else(|| Error::Singularity {
        t: f64::NAN,
        reason: "Schur decomposition did not converge".into(),
    })?;
    Ok(w.iter().map(|w| -I * w).collect())
}

/// Largest distance between the closed-form eigenvalues and the numeric
/// ones after greedy nearest matching.
pub fn eigen_mismatch(closed: &[C64], numeric: &[C64]) -> f64 {
    let mut pool: Vec<C64> = numeric.to_vec();
    let mut worst: f64 = 0.0;
    for a in closed {
        let (idx, d) = pool
            .iter()
            .enumerate()
            .map(|(i, b)| (i, (a - b).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if idx == usize::MAX {
            return f64::INFINITY;
        }
        pool.swap_remove(idx);
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dark::dark_point_nonlinear_lambda;

    fn q(b: C64, c: f64) -> QuadraticCoefficients {
        QuadraticCoefficients { b, c: C64::from(c) }
    }

    fn fig2() -> PulseSchedule {
        PulseSchedule::gaussian_lambda(10.0, 3.8, 3.0, 1.0).unwrap()
    }

    fn fig4() -> PulseSchedule {
        PulseSchedule::gaussian_tripod(60.0, 0.75, 5.0, 10.7, 10.0, 8.5, 1.0).unwrap()
    }

    fn sys(v: Variant) -> System {
        System::new(v, 2.0, 0.0).unwrap()
    }

    #[test]
    fn coefficient_examples() {
        let r = Rabi {
            pump: 3.0,
            dump1: 4.0,
            dump2: 0.0,
        };
        let k = characteristic_coeffs(&sys(Variant::LinearLambda), &r, None).unwrap();
        assert_eq!(k.b, C64::new(0.0, 2.0));
        assert_eq!(k.c, C64::from(-25.0));
        let r = Rabi {
            pump: 3.0,
            dump1: 4.0,
            dump2: 0.0,
        };
        let k = characteristic_coeffs(&sys(Variant::NonlinearLambda), &r, Some(C64::from(1.0))).unwrap();
        assert_eq!(k.c, C64::from(-13.0));
        let zero = Rabi {
            pump: 0.0,
            dump1: 0.0,
            dump2: 0.0,
        };
        for v in Variant::ALL {
            let k = characteristic_coeffs(&sys(v), &zero, Some(C64::from(0.3))).unwrap();
            assert_eq!(k.c, ZERO);
        }
        assert!(matches!(
            characteristic_coeffs(&sys(Variant::NonlinearTripod), &r, None),
            Err(Error::MissingDarkState)
        ));
        let r = Rabi {
            pump: 1.0,
            dump1: 2.0,
            dump2: 3.0,
        };
        let k = characteristic_coeffs(&sys(Variant::LinearTripod), &r, None).unwrap();
        assert_eq!(k.c, C64::from(-14.0));
        let k = characteristic_coeffs(&sys(Variant::NonlinearTripod), &r, Some(C64::new(0.0, 0.5))).unwrap();
        assert_eq!(k.c, C64::from(-(4.0 + 9.0 + 1.0) / 4.0));
    }

    #[test]
    fn root_examples() {
        let (a, b) = solve_characteristic(&q(C64::new(0.0, 2.0), 0.0));
        assert_eq!((a, b), (ZERO, C64::new(0.0, -2.0)));

        let k = q(C64::new(0.0, 2.0), -25.0);
        let (a, b) = solve_characteristic(&k);
        for w in [a, b] {
            assert!(k.residual(w).norm() <= 1e-12 * 25.0);
            assert_eq!((-I * w).re, -1.0);
            assert_eq!(w.re.abs(), 96f64.sqrt() / 2.0);
        }

        let k = q(C64::new(0.0, 2.0), -0.25);
        let (a, b) = solve_characteristic(&k);
        assert_eq!((a.re, b.re), (0.0, 0.0));
        let (la, lb) = ((-I * a).re, (-I * b).re);
        assert!((la - (-1.0 + 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((lb - (-1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!(k.residual(a).norm() < 1e-12 && k.residual(b).norm() < 1e-12);
    }

    #[test]
    fn fig2_plateau_and_tails() {
        let s = fig2();
        let sy = sys(Variant::LinearLambda);
        let b = stage_boundaries(&sy, &s, (0.0, 8.0), DarkStateMode::Manifold, 1e-3).unwrap();
        let mid = eigen_sample(&sy, &s, 0.5 * (b.t1 + b.t2), None).unwrap();
        assert_eq!(mid.eigenvalues[0], ZERO);
        let (x, y) = mid.branches();
        assert_eq!((x.re, y.re), (-1.0, -1.0));
        // far tails: one mode undamped, one damped at gamma
        let tail = eigen_sample(&sy, &s, -20.0, None).unwrap();
        let mut re: Vec<f64> = tail.eigenvalues.iter().map(|l| l.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-6 && re[1].abs() < 1e-6 && re[2] == 0.0);
    }

    #[test]
    fn boundary_errors() {
        let weak = PulseSchedule::gaussian_lambda(0.5, 3.8, 3.0, 1.0).unwrap();
        assert!(matches!(
            stage_boundaries(
                &sys(Variant::LinearLambda),
                &weak,
                (0.0, 8.0),
                DarkStateMode::Manifold,
                1e-3
            ),
            Err(Error::NoCrossing { .. })
        ));
        // two well separated pairs of sign changes
        let r = bracket_two_roots(|t| Ok((t * 3.0).sin()), (0.1, 8.0));
        assert!(matches!(r, Err(Error::TooManyCrossings { .. })));
        let r = bracket_two_roots(|t| Ok(1.0 - (t - 2.0) * (t - 2.0)), (0.0, 4.0)).unwrap();
        assert!((r.t1 - 1.0).abs() < 1e-9 && (r.t2 - 3.0).abs() < 1e-9);
    }

    #[test]
    fn trace_labels_continuously() {
        let tr = eigen_trace(
            &sys(Variant::LinearLambda),
            &fig2(),
            (0.0, 8.0),
            801,
            DarkStateMode::Manifold,
            1e-3,
        )
        .unwrap();
        assert!(tr.iter().all(|s| s.zero_modes == 1 && s.eigenvalues[0] == ZERO));
        // the first sample is seeded by decreasing real part
        let (a, b) = tr[0].branches();
        assert!(a.re >= b.re);
        // away from the exceptional points each branch moves smoothly
        for w in tr.windows(3) {
            let d = w[1].discriminant;
            if d.re.abs() < 1.0 {
                continue;
            }
            for k in 1..3 {
                let j1 = (w[1].eigenvalues[k] - w[0].eigenvalues[k]).norm();
                let j2 = (w[2].eigenvalues[k] - w[1].eigenvalues[k]).norm();
                assert!(j2 <= 10.0 * j1 + 1e-9, "t={} {j1} {j2}", w[1].t);
            }
        }
    }

    #[test]
    fn closed_forms_match_schur() {
        let lam = fig2();
        let tri = fig4();
        for v in Variant::ALL {
            let sy = sys(v);
            let s = if v.geometry() == crate::pulse::Geometry::Lambda {
                &lam
            } else {
                &tri
            };
            let win = if v.geometry() == crate::pulse::Geometry::Lambda {
                (0.0, 8.0)
            } else {
                (0.0, 20.0)
            };
            let dark = DarkAmplitude::prepare(
                &sy,
                s,
                DarkStateMode::Manifold,
                &IntegrationOptions::new(win.0, win.1, 1e-3),
            )
            .unwrap();
            for t in linspace(win.0, win.1, 200) {
                let a0 = dark.psi_a0(t).unwrap();
                let closed = eigen_sample(&sy, s, t, a0).unwrap();
                let m = sy.linearization(&s.rabi(t), a0).unwrap().m;
                let numeric = numeric_eigenvalues(&m).unwrap();
                let scale = m.norm().max(1.0);
                let e = eigen_mismatch(&closed.eigenvalues, &numeric);
                assert!(e <= 1e-8 * scale, "{v} t={t}: {e}");
            }
        }
    }

    #[test]
    fn lambda_dark_amplitude_from_closed_form() {
        let s = PulseSchedule::gaussian_lambda(300.0, 3.8, 3.0, 1.0).unwrap();
        let sy = sys(Variant::NonlinearLambda);
        let d = DarkAmplitude::prepare(
            &sy,
            &s,
            DarkStateMode::Manifold,
            &IntegrationOptions::new(0.0, 8.0, 1e-3),
        )
        .unwrap();
        let r = s.rabi(3.4);
        let (a, _) = dark_point_nonlinear_lambda(r.pump, r.dump1).unwrap();
        assert_eq!(d.psi_a0(3.4).unwrap(), Some(C64::from(a)));
    }

    #[test]
    fn reduced_lambda_examples() {
        // coincident pulses: alpha vanishes
        let s = PulseSchedule::gaussian_lambda(10.0, 3.0, 3.0, 1.0).unwrap();
        for t in [1.0, 3.0, 4.5] {
            let r = reduced_lambda_2d_eigenvalues(&s, t, 2.0, 0.0).unwrap();
            let big = s.rabi(t).sum_sq() / 2.0;
            assert_eq!(r.alpha, ZERO);
            let (mut a, mut b) = r.lambda;
            if a.norm() > b.norm() {
                std::mem::swap(&mut a, &mut b);
            }
            assert!(a.norm() < 1e-12 * big && (b.re + big).abs() < 1e-12 * big, "{a} {b}");
            assert_eq!(reduced_lambda_1d_eigenvalue(&s, t, 2.0, 0.0).unwrap(), ZERO);
        }
        assert!(reduced_lambda_2d_eigenvalues(&s, 1.0, 0.0, 0.0).is_err());

        // substitute back into det(H - i lambda) = 0
        let s = fig2();
        for t in [1.0, 2.5, 4.0, 6.0] {
            let r = reduced_lambda_2d_eigenvalues(&s, t, 2.0, 0.0).unwrap();
            for l in [r.lambda.0, r.lambda.1] {
                let w = I * l;
                let res = w * w - r.h * w - r.alpha.norm_sqr();
                let scale = r.h.norm_sqr() + r.alpha.norm_sqr();
                assert!(res.norm() <= 1e-10 * scale.max(1.0), "{res}");
            }
            assert_eq!(r.d2.im, 0.0);
            let omega2 = s.rabi(t).sum_sq();
            assert!((r.d2.re - (omega2 * omega2 / 4.0 - 4.0 * r.alpha.norm_sqr())).abs() <= 1e-12 * omega2 * omega2);
        }
    }

    #[test]
    fn reduced_lambda_1d_matches_alpha_recomputation() {
        let s = fig2();
        let t = 3.4;
        let l = reduced_lambda_1d_eigenvalue(&s, t, 2.0, 0.0).unwrap();
        // alpha = i T theta' with tan(theta) = pump / dump
        let h = 1e-5;
        let th = |t: f64| {
            let r = s.rabi(t);
            r.pump.atan2(r.dump1)
        };
        let theta_dot = (th(t + h) - th(t - h)) / (2.0 * h);
        let expected = -theta_dot * theta_dot * 2.0 / s.rabi(t).sum_sq();
        assert!(l.im == 0.0 && l.re < 0.0);
        assert!((l.re - expected).abs() <= 1e-8 * expected.abs(), "{l} {expected}");
        assert!(l.re.abs() < 0.1);
    }

    #[test]
    fn reduced_tripod_structure() {
        let s = fig4();
        for t in [7.0, 9.0, 11.0, 12.5] {
            let r = reduced_tripod_2d_matrix(&s, t, 2.0, 0.0).unwrap();
            // H2_1 is minus a Gram matrix
            assert!((r.h2_1 - r.h2_1.adjoint()).norm() < 1e-14);
            let (e1, e2) = eig2(&r.h2_1);
            assert!(e1.re <= 1e-12 && e2.re <= 1e-12);
            assert!((r.h2 - (r.h2_0 + r.h2_1 * r.prefactor)).norm() == 0.0);
            let (w1, w2) = eig2(&r.h2);
            assert_eq!(r.lambda, (-I * w1, -I * w2));
        }
        // leading order only: purely imaginary pair +-|alpha34|
        let r = reduced_tripod_2d_matrix(&s, 9.0, 2.0, 0.0).unwrap();
        let (w1, w2) = eig2(&r.h2_0);
        let a34 = r.h2_0[(0, 1)].norm();
        assert!((w1.re - a34).abs() < 1e-14 && (w2.re + a34).abs() < 1e-14);
        assert!((-I * w1).re.abs() < 1e-14);
    }

    #[test]
    fn tripod_correction_overtakes_leading_term_before_t2() {
        let s = fig4();
        let b = stage_boundaries(
            &sys(Variant::LinearTripod),
            &s,
            (0.0, 20.0),
            DarkStateMode::Manifold,
            1e-3,
        )
        .unwrap();
        let ratio = |t| reduced_tripod_2d_matrix(&s, t, 2.0, 0.0).unwrap().correction_ratio();
        let mid = 0.5 * (b.t1 + b.t2);
        assert!(ratio(mid) < 1.0);
        let crossed = linspace(mid, b.t2, 400).into_iter().any(|t| ratio(t) > 1.0);
        assert!(crossed);
    }

    #[test]
    fn splitting_examples() {
        // zero detuning inside the D > 0 region: no split
        let k = q(C64::new(0.0, 2.0), -25.0);
        let d = detuning_splitting(&k);
        assert_eq!(d.exact, 0.0);
        assert_eq!(d.approx, Some(0.0));
        assert_eq!(d.lambda.0.re, d.lambda.1.re);
        // no loss: equal real parts for any detuning
        let d = detuning_splitting(&q(C64::new(0.7, 0.0), -25.0));
        assert!(d.lambda.0.re.abs() < 1e-14 && d.lambda.1.re.abs() < 1e-14);
        // Re D <= 0: approximate form is undefined
        let d = detuning_splitting(&q(C64::new(0.2, 2.0), -0.25));
        assert!(d.approx.is_none());
        // the split is the separation of the real parts
        let d = detuning_splitting(&q(C64::new(0.2, 2.0), -25.0));
        assert!((d.lambda.0.re - d.lambda.1.re - d.exact).abs() < 1e-14);
        assert!((d.lambda.0.re + d.lambda.1.re + 2.0).abs() < 1e-14);
    }

    #[test]
    fn schur_handles_complex_matrices() {
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, C64::from(3.0), C64::from(3.0), C64::new(0.0, -2.0)]);
        let w = numeric_eigenvalues(&m).unwrap();
        let k = q(C64::new(0.0, 2.0), -9.0);
        let (a, b) = solve_characteristic(&k);
        assert!(eigen_mismatch(&[-I * a, -I * b], &w) < 1e-12);
    }
}
