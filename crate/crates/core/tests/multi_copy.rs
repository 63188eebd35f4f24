use entbound::error::MeasureError;
use entbound::measures::{e_w, multi_copy, tensor_power, Measure, MAX_COPIES};
use entbound::sdp::SolverConfig;
use entbound::states::{antisym_state, max_entangled, rho_alpha, sigma_r};

#[test]
fn ew_is_additive_across_families() {
    let cfg = SolverConfig::default();
    let a = sigma_r(0.5).unwrap();
    let b = rho_alpha(0.5).unwrap();
    let joint = e_w(&a.tensor(&b), &cfg).unwrap().value_log2;
    let split = e_w(&a, &cfg).unwrap().value_log2 + e_w(&b, &cfg).unwrap().value_log2;
    assert!((joint - split).abs() < 1e-5, "{joint} vs {split}");
}

#[test]
fn two_copies_of_rho_alpha() {
    let cfg = SolverConfig::default();
    let rho = rho_alpha(0.5).unwrap();
    let r = multi_copy(Measure::EW, &rho, 2, &cfg).unwrap();
    assert!((r.value_log2 - 2.0 * 1.5f64.log2()).abs() < 1e-5);
    let n = multi_copy(Measure::LogNegativity, &rho, 2, &cfg).unwrap();
    assert!((n.value_log2 - 2.0 * (5.0f64 / 3.0).log2()).abs() < 1e-9);
}

#[test]
fn two_copy_deterministic_rate_reaches_twice_the_single_copy() {
    let cfg = SolverConfig::default();
    let rho = rho_alpha(0.5).unwrap();
    let r = multi_copy(Measure::DetDistill, &rho, 2, &cfg).unwrap();
    assert!(
        r.value_log2 >= 2.0 * 1.5f64.log2() - 1e-5,
        "{}",
        r.value_log2
    );
    assert!(r.value_log2 <= 2.0 * 1.5f64.log2() + 1e-5);
}

#[test]
fn copy_limits() {
    let s = antisym_state();
    assert!(matches!(
        tensor_power(&s, MAX_COPIES + 1),
        Err(MeasureError::Domain(_))
    ));
    // 3⊗3 twice is 81 dimensional, three times is over the cap.
    assert_eq!(tensor_power(&s, 2).unwrap().dim(), 81);
    assert!(tensor_power(&s, 3).is_err());
    let phi = max_entangled(2).unwrap();
    assert_eq!(tensor_power(&phi, 3).unwrap().dim(), 64);
}
