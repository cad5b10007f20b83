//! Mixture-identity verifications for the extended reciprocal families.

use rlasso::ext::{
    bartlett_fejer_check, rbridge_mixing_check, reciprocal_mixture_check, ReciprocalFamily,
};

#[test]
fn rbridge_mixing_reference_cases() {
    // (alpha, lambda) reference cases; the alpha = 1 case doubles as an
    // IDE-vs-double-Pareto scale-mixture identity check.
    for (alpha, lambda) in [(1.0, 1.0), (2.0, 1.0), (0.5, 3.0)] {
        let err = rbridge_mixing_check(lambda, alpha).unwrap();
        assert!(err < 1e-6, "alpha {alpha} lambda {lambda}: max deviation {err:.3e}");
    }
}

#[test]
fn rbridge_mixing_parameter_grid() {
    for alpha in [0.5, 1.0, 2.0] {
        for lambda in [0.5, 1.0, 3.0] {
            let err = rbridge_mixing_check(lambda, alpha).unwrap();
            assert!(err < 1e-6, "alpha {alpha} lambda {lambda}: max deviation {err:.3e}");
        }
    }
}

#[test]
fn student_mixture_reference() {
    let err = reciprocal_mixture_check(ReciprocalFamily::StudentT { v: 3.0, lambda: 1.0 }).unwrap();
    assert!(err < 1e-5, "max deviation {err:.3e}");
}

#[test]
fn gdp_mixture_reference() {
    let err = reciprocal_mixture_check(ReciprocalFamily::Gdp { tau: 1.0, alpha: 2.0 }).unwrap();
    assert!(err < 1e-5, "max deviation {err:.3e}");
}

#[test]
fn mixture_parameter_grids() {
    for v in [1.0, 3.0, 8.0] {
        for lambda in [0.5, 1.0, 2.0] {
            let err = reciprocal_mixture_check(ReciprocalFamily::StudentT { v, lambda }).unwrap();
            assert!(err < 1e-5, "StudentT({v}, {lambda}): {err:.3e}");
        }
    }
    for tau in [0.5, 1.0, 2.0] {
        for alpha in [0.5, 1.0, 2.0] {
            let err = reciprocal_mixture_check(ReciprocalFamily::Gdp { tau, alpha }).unwrap();
            assert!(err < 1e-5, "Gdp({tau}, {alpha}): {err:.3e}");
        }
    }
    for tau in [0.5, 1.0, 2.0] {
        let err = reciprocal_mixture_check(ReciprocalFamily::HorseshoeLike { tau }).unwrap();
        assert!(err < 1e-5, "HorseshoeLike({tau}): {err:.3e}");
    }
}

#[test]
fn bartlett_fejer_reference_cases() {
    // alpha = 1: the mixture collapses to one gamma component and must match
    // the inverse double exponential; alpha = 0.5 exercises both components.
    let err = bartlett_fejer_check(1.0, 1.0).unwrap();
    assert!(err < 1e-5, "alpha 1: max deviation {err:.3e}");
    let err = bartlett_fejer_check(1.0, 0.5).unwrap();
    assert!(err < 1e-5, "alpha 0.5: max deviation {err:.3e}");
}

#[test]
fn bartlett_fejer_parameter_grid() {
    for lambda in [0.5, 1.0, 2.0] {
        for alpha in [0.25, 0.5, 1.0] {
            let err = bartlett_fejer_check(lambda, alpha).unwrap();
            assert!(err < 1e-5, "lambda {lambda} alpha {alpha}: {err:.3e}");
        }
    }
}

#[test]
fn checks_reject_bad_parameters() {
    assert!(rbridge_mixing_check(-1.0, 1.0).is_err());
    assert!(rbridge_mixing_check(1.0, 0.0).is_err());
    assert!(reciprocal_mixture_check(ReciprocalFamily::StudentT { v: 0.0, lambda: 1.0 }).is_err());
    assert!(reciprocal_mixture_check(ReciprocalFamily::Gdp { tau: 1.0, alpha: -2.0 }).is_err());
    assert!(reciprocal_mixture_check(ReciprocalFamily::HorseshoeLike { tau: 0.0 }).is_err());
    assert!(bartlett_fejer_check(1.0, 1.5).is_err());
    assert!(bartlett_fejer_check(0.0, 0.5).is_err());
}
