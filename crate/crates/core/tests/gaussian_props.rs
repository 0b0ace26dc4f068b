use git_channel::channel::AttenuatorChannel;
use git_channel::gaussian::{
    apply_attenuator, average_fidelity, classical_fidelity_bound, coherent_overlap, coherent_overlap_fidelity,
    make_state, two_mode_verdict, StateKind,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = AttenuatorChannel> {
    (0.0..=1.0f64, 0.0..1e3f64, -3.2..3.2f64).prop_map(|(eta, n, phi)| AttenuatorChannel::new(eta, n, phi).unwrap())
}

fn state() -> impl Strategy<Value = StateKind> {
    prop_oneof![
        Just(StateKind::Vacuum),
        (0.0..100.0f64).prop_map(|n| StateKind::Thermal { n }),
        (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(re, im)| StateKind::Coherent { alpha: Complex64::new(re, im) }),
        (0.0..2.5f64).prop_map(|r| StateKind::TwoModeSqueezed { r }),
    ]
}

proptest! {
    #[test]
    fn attenuated_states_stay_physical(kind in state(), ch in channel()) {
        let s = make_state(kind).unwrap();
        let out = apply_attenuator(&s, 0, &ch).unwrap();
        let nu = out.symplectic_eigenvalues().unwrap();
        prop_assert!(nu.iter().all(|&v| v >= 0.5 * (1.0 - 1e-9)), "{nu:?}");
    }

    #[test]
    fn attenuators_compose(e1 in 0.0..=1.0f64, n1 in 0.0..50.0f64, e2 in 0.0..=1.0f64, n2 in 0.0..50.0f64, r in 0.0..1.5f64) {
        let a = AttenuatorChannel::new(e1, n1, 0.0).unwrap();
        let b = AttenuatorChannel::new(e2, n2, 0.0).unwrap();
        let eta = e1 * e2;
        let noise = e2 * (1.0 - e1) * n1 + (1.0 - e2) * n2;
        let n = if eta < 1.0 { noise / (1.0 - eta) } else { 0.0 };
        let combined = AttenuatorChannel::new(eta, n, 0.0).unwrap();
        let s = make_state(StateKind::TwoModeSqueezed { r }).unwrap();
        let twice = apply_attenuator(&apply_attenuator(&s, 1, &a).unwrap(), 1, &b).unwrap();
        let once = apply_attenuator(&s, 1, &combined).unwrap();
        let scale = 1.0 + once.covariance().max_abs();
        prop_assert!(twice.covariance().sub(once.covariance()).unwrap().max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn entangled_iff_above_boundary(eta in 0.0..=1.0f64, n in 0.0..100.0f64, r in 0.1..2.0f64) {
        let boundary = eta - (1.0 - eta) * n;
        // Away from the boundary, where the verdict is insensitive to round-off.
        prop_assume!(boundary.abs() > 1e-6);
        let ch = AttenuatorChannel::new(eta, n, 0.4).unwrap();
        let s = make_state(StateKind::TwoModeSqueezed { r }).unwrap();
        let v = two_mode_verdict(&apply_attenuator(&s, 1, &ch).unwrap(), 0, 1).unwrap();
        prop_assert_eq!(v.entangled, boundary > 0.0);
        prop_assert_eq!(v.entangled, v.log_negativity > 0.0);
    }

    #[test]
    fn fidelities_are_probabilities(ch in channel(), re in -10.0..10.0f64, im in -10.0..10.0f64, n_in in 0.0..1e3f64) {
        let alpha = Complex64::new(re, im);
        let f = coherent_overlap_fidelity(&ch, alpha);
        prop_assert!(f > 0.0 && f <= 1.0, "{}", f);
        let out = apply_attenuator(&make_state(StateKind::Coherent { alpha }).unwrap(), 0, &ch).unwrap();
        let g = coherent_overlap(&out, 0, alpha * Complex64::from_polar(1.0, ch.phi)).unwrap();
        prop_assert!(g > 0.0 && g <= 1.0 + 1e-12, "{}", g);
        let avg = average_fidelity(&ch, n_in);
        prop_assert!(avg > 0.0 && avg <= 1.0);
        let bound = classical_fidelity_bound(n_in);
        prop_assert!((0.5..=1.0).contains(&bound));
    }
}
