use num_complex::Complex64 as C64;
use proptest::prelude::*;
use stirap::dark::dark_point_nonlinear_lambda;
use stirap::experiment::{preset, ScenarioConfig, PRESETS};
use stirap::model::{System, Variant};
use stirap::pulse::{PulseSchedule, Rabi};
use stirap::reduction::{from_bright_dark, to_bright_dark};
use stirap::spectral::{
    characteristic_coeffs, eig2, numeric_eigenvalues, reduced_tripod_2d_matrix, solve_characteristic,
};

fn c64() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn fig4() -> PulseSchedule {
    PulseSchedule::gaussian_tripod(60.0, 0.75, 5.0, 10.7, 10.0, 8.5, 1.0).unwrap()
}

proptest! {
    #[test]
    fn bright_dark_transform_is_orthogonal(psi in prop::collection::vec(c64(), 4), t in 4.0..16.0f64) {
        let sys = System::new(Variant::LinearTripod, 2.0, 0.0).unwrap();
        let s = fig4();
        let bd = to_bright_dark(&sys, &s, t, &psi).unwrap();
        let n = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((n(&bd) - n(&psi)).abs() <= 1e-12);
        let back = from_bright_dark(&sys, &s, t, &bd).unwrap();
        for (a, b) in back.iter().zip(&psi) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn characteristic_roots_satisfy_vieta(
        pump in 0.0..300.0f64, d1 in 0.0..300.0f64, d2 in 0.0..300.0f64,
        gamma in 0.0..5.0f64, detuning in -2.0..2.0f64, a in 0.05..1.0f64,
        nonlinear in any::<bool>(),
    ) {
        let v = if nonlinear { Variant::NonlinearTripod } else { Variant::LinearTripod };
        let sys = System::new(v, gamma, detuning).unwrap();
        let q = characteristic_coeffs(&sys, &Rabi { pump, dump1: d1, dump2: d2 }, Some(C64::from(a))).unwrap();
        let (wp, wm) = solve_characteristic(&q);
        prop_assert!((wp + wm + q.b).norm() <= 1e-10 * q.b.norm().max(1.0));
        prop_assert!((wp * wm - q.c).norm() <= 1e-10 * q.c.norm().max(1.0));
    }

    #[test]
    fn tripod_correction_is_negative_semidefinite(t in 2.0..18.0f64) {
        let r = reduced_tripod_2d_matrix(&fig4(), t, 2.0, 0.0).unwrap();
        let h = r.h2_1;
        prop_assert!((h - h.adjoint()).norm() <= 1e-12 * h.norm().max(1e-300));
        let (e1, e2) = eig2(&h);
        let tol = 1e-10 * h.norm();
        prop_assert!(e1.re <= tol && e2.re <= tol && e1.im.abs() <= tol && e2.im.abs() <= tol);
    }

    #[test]
    fn eig2_agrees_with_schur(m in prop::collection::vec(c64(), 4)) {
        let mat = nalgebra::Matrix2::new(m[0], m[1], m[2], m[3]);
        let (a, b) = eig2(&mat);
        // numeric_eigenvalues returns -i w
        let num: Vec<C64> = numeric_eigenvalues(&nalgebra::DMatrix::from_row_slice(2, 2, &m)).unwrap()
            .into_iter().map(|l| l * C64::i()).collect();
        let d = ((a - num[0]).norm() + (b - num[1]).norm()).min((a - num[1]).norm() + (b - num[0]).norm());
        prop_assert!(d <= 1e-7, "{a} {b} {num:?}");
    }

    #[test]
    fn lambda_dark_point_is_dark_and_normalized(pump in 1e-3..300.0f64, dump in 1e-3..300.0f64) {
        let (a, g) = dark_point_nonlinear_lambda(pump, dump).unwrap();
        prop_assert!((pump * a * a + dump * g).abs() <= 1e-12 * pump.max(dump));
        prop_assert!((a * a + 2.0 * g * g - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn config_text_round_trips(
        idx in 0..PRESETS.len(), gamma in 0.1..5.0f64, detuning in -1.0..1.0f64,
        t0 in -2.0..2.0f64, span in 1.0..30.0f64, step in 1e-5..1e-2f64,
    ) {
        let mut c = preset(PRESETS[idx].0).unwrap();
        c.gamma = gamma;
        c.detuning = detuning;
        c.window = (t0, t0 + span);
        c.step = step;
        let back = ScenarioConfig::parse(&c.to_config_text(), "mem").unwrap();
        prop_assert_eq!(back, c);
    }
}
