use isosho_core::{estimation, measures, states, susy, DeformationParameter, OscillatorState, QuadratureRule};
use proptest::prelude::*;

fn lambda_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![-0.7..0.0f64, 0.0..1.0f64, (0.0..3.0f64).prop_map(|e| 10f64.powf(e))]
}

fn temperature_strategy() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![Just(None), (0.2..0.6f64).prop_map(Some)]
}

fn state(l: f64, t: Option<f64>) -> OscillatorState {
    OscillatorState::new(DeformationParameter::new(l).unwrap(), t, Default::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigenfunctions_are_normalized(l in lambda_strategy(), n in 0usize..10) {
        let lam = DeformationParameter::new(l).unwrap();
        let rule = QuadratureRule::trapezoid(susy::support_half_width(n, 12.0).ceil(), 1.0 / 64.0).unwrap();
        let norm = rule.apply(|x| susy::wavefunction(n, lam, x).unwrap().powi(2));
        prop_assert!((norm - 1.0).abs() < 1e-9, "n={} lambda={} norm={}", n, l, norm);
    }

    #[test]
    fn uncertainty_relation_holds(l in lambda_strategy(), t in temperature_strategy()) {
        let m = measures::quadrature_moments(&state(l, t)).unwrap();
        prop_assert!(m.covariance().determinant() >= 0.25 - 1e-9);
    }

    #[test]
    fn photon_distribution_is_a_probability(l in lambda_strategy(), t in temperature_strategy()) {
        let d = states::photon_distribution(&state(l, t)).unwrap();
        prop_assert!(d.probabilities.iter().all(|&p| p >= 0.0));
        prop_assert!((d.total() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn non_gaussianity_is_nonnegative(l in lambda_strategy(), t in temperature_strategy()) {
        let d = measures::nong_delta(&state(l, t)).unwrap();
        prop_assert!(d.value >= 0.0);
    }

    #[test]
    fn position_information_never_exceeds_qfi(l in lambda_strategy(), t in temperature_strategy()) {
        let st = state(l, t);
        let f = estimation::classical_fi(&st).unwrap().value;
        let h = estimation::qfi(&st).unwrap().value;
        prop_assert!(f >= 0.0 && f <= h * (1.0 + 1e-6), "F={} H={}", f, h);
    }

    #[test]
    fn gibbs_weights_are_normalized(t in 0.05..5.0f64) {
        let w = states::gibbs_weights(t, 0).unwrap();
        let total: f64 = w.probabilities.iter().sum::<f64>() + w.tail;
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(w.probabilities.windows(2).all(|p| p[1] <= p[0]));
    }
}
