use ghzmeter::correlator::{build_quad, expectations, CorrelationTensor};
use ghzmeter::functional::{acin_closed_form, eval_i, w_reduced_i, BOUND_TOL};
use ghzmeter::linalg::{spin_observable, vector_dot_sigma, ComplexMatrix, Direction, OrthoFrame, C64};
use ghzmeter::optimizer::{maximize_i, FrameAngles, OptimizerConfig};
use ghzmeter::states::{haar_random_pure, make_acin, make_w, AcinParams};
use proptest::prelude::*;

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI).prop_map(|(t, p)| Direction::from_spherical(t, p))
}

fn frame_angles() -> impl Strategy<Value = FrameAngles> {
    prop::array::uniform3(-10.0f64..10.0).prop_map(|a| FrameAngles::from_slice(&a))
}

fn acin_params() -> impl Strategy<Value = AcinParams> {
    (prop::array::uniform5(0.0f64..1.0), 0.0..=std::f64::consts::PI).prop_filter_map("zero vector", |(l, phi)| {
        let n = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-3).then(|| AcinParams::new(l.map(|x| x / n), phi).ok()).flatten()
    })
}

proptest! {
    #[test]
    fn spin_observable_squares_to_identity(n in direction()) {
        let s = spin_observable(&n);
        prop_assert!((&s * &s).approx_eq(&ComplexMatrix::identity(2), 1e-12));
        prop_assert!(s.is_hermitian());
    }

    #[test]
    fn pauli_product_rule(a in direction(), b in direction()) {
        // σ_a σ_b = (a·b)𝟙 + i(a×b)·σ
        let lhs = &spin_observable(&a) * &spin_observable(&b);
        let rhs = &ComplexMatrix::identity(2).scale_re(a.dot(&b))
            + &vector_dot_sigma(&a.cross(&b)).scale(C64::new(0.0, 1.0));
        prop_assert!(lhs.approx_eq(&rhs, 1e-12));
        let anti = spin_observable(&a).anticommutator(&spin_observable(&b));
        prop_assert!(anti.approx_eq(&ComplexMatrix::identity(2).scale_re(2.0 * a.dot(&b)), 1e-12));
    }

    #[test]
    fn correlators_bounded(seed in any::<u64>(), n1 in direction(), n2 in direction()) {
        let state = haar_random_pure(2, seed).unwrap();
        let frame = OrthoFrame::new(n1, n2);
        let e = expectations(&build_quad(&frame), &state).unwrap();
        for x in e.as_array() {
            prop_assert!(x.abs() <= 1.0 + 1e-12);
        }
        prop_assert!(e.functional().abs() <= 2.0 + BOUND_TOL);
    }

    #[test]
    fn tensor_matches_matrix_path(seed in any::<u64>(), n1 in direction(), n2 in direction()) {
        let state = haar_random_pure(2, seed).unwrap();
        let frame = OrthoFrame::new(n1, n2);
        let direct = eval_i(&state, &frame).unwrap();
        let fast = CorrelationTensor::from_state(&state).unwrap().quad(&frame);
        prop_assert!((direct.value - fast.functional()).abs() < 1e-12);
    }

    #[test]
    fn acin_closed_form_matches_direct(p in acin_params()) {
        let direct = eval_i(&make_acin(&p), &OrthoFrame::xy()).unwrap().value;
        prop_assert!((direct - acin_closed_form(&p)).abs() < 1e-12);
    }

    #[test]
    fn w_reduction_matches_direct(angles in frame_angles()) {
        let frame = angles.frame();
        let (a3, b3) = (frame.n1.components()[2], frame.n2.components()[2]);
        let reduced = w_reduced_i(a3, b3).unwrap();
        let direct = eval_i(&make_w(), &frame).unwrap().value;
        prop_assert!((reduced - direct).abs() < 1e-12, "reduced {reduced} direct {direct}");
    }

    #[test]
    fn euler_frames_are_orthonormal(angles in frame_angles()) {
        let frame = angles.frame();
        prop_assert!(frame.c.abs() < 1e-12);
        prop_assert!(frame.consistency_residual() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn optimizer_is_deterministic(state_seed in any::<u64>(), seed in any::<u64>()) {
        let state = haar_random_pure(2, state_seed).unwrap();
        let config = OptimizerConfig::new(12, seed);
        prop_assert_eq!(maximize_i(&state, &config).unwrap(), maximize_i(&state, &config).unwrap());
    }

    #[test]
    fn more_restarts_never_worse(state_seed in any::<u64>(), seed in any::<u64>()) {
        let state = haar_random_pure(2, state_seed).unwrap();
        let few = maximize_i(&state, &OptimizerConfig::new(5, seed)).unwrap();
        let many = maximize_i(&state, &OptimizerConfig::new(20, seed)).unwrap();
        prop_assert!(many.best_value >= few.best_value);
    }

    #[test]
    fn optimum_certifies_user_frames(state_seed in any::<u64>(), angles in frame_angles()) {
        let state = haar_random_pure(2, state_seed).unwrap();
        let r = maximize_i(&state, &OptimizerConfig::new(30, 0)).unwrap();
        let at_best = eval_i(&state, &r.best_frame).unwrap().modulus;
        prop_assert!((at_best - r.best_value).abs() < 1e-9);
        let user = eval_i(&state, &angles.frame()).unwrap().modulus;
        prop_assert!(r.best_value >= user - 1e-9);
    }
}
