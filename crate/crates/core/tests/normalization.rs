mod common;

use common::*;
use zeromodes::normalization::{
    classify_mode, classify_profile, classify_superposition, norm_quadrature, unit_normalized, QuadOptions,
    CLASSIFY_QUAD_TOL,
};
use zeromodes::{Branch, CouplingParams, Endpoint, NormValue, ProfileSpec, QuadOutcome, Sign};

fn a_profile(f56: f64, ft56: f64, n: f64) -> ProfileSpec {
    ProfileSpec::new(CouplingParams::new(f56, ft56, 0.0, 0.0, 0.0, n, 1.0).unwrap(), Branch::A, Sign::Plus)
}

#[test]
fn divergent_endpoints_agree_between_methods() {
    for (spec, endpoint) in [
        (a_profile(1.0, 0.5, -2.0), Endpoint::Origin),
        (a_profile(0.5, 0.0, 3.0), Endpoint::Infinity),
        (a_profile(-1.0, -1.0, -2.0), Endpoint::Both),
    ] {
        let rep = classify_profile(&spec, CLASSIFY_QUAD_TOL, &QuadOptions::default()).unwrap();
        assert_eq!(rep.closed_form, NormValue::Divergent { endpoint });
        assert_eq!(rep.quadrature, QuadOutcome::Divergent { endpoint });
        assert!(rep.agree && !rep.window_verdict);
    }
}

#[test]
fn secular_profiles_are_classified_consistently() {
    // D = 0 with ftp != 0 keeps the secular log term in both branches
    let c = CouplingParams::new(0.8, 0.6, 0.5, 0.5, -0.5, 1.0, 1.3).unwrap();
    for sign in Sign::BOTH {
        let (a, b) = classify_mode(&c, sign).unwrap();
        for rep in [a, b] {
            assert!(rep.agree, "{rep:?}");
            assert_eq!(rep.window_verdict, rep.closed_form.is_finite());
        }
    }
}

#[test]
fn unit_normalized_profile_has_unit_norm() {
    let c = CouplingParams::new(0.7, 0.9, 0.3, 0.4, 0.2, 1.0, 0.8).unwrap();
    for br in [Branch::A, Branch::B] {
        for sign in Sign::BOTH {
            let spec = ProfileSpec::new(c, br, sign);
            match unit_normalized(&spec) {
                Some(unit) => {
                    let q = norm_quadrature(&unit, 1e-11).unwrap().value().unwrap();
                    assert!((q - 1.0).abs() < 1e-9, "{q}");
                }
                None => assert!(!norm_quadrature(&spec, 1e-10).unwrap().is_finite()),
            }
        }
    }
}

#[test]
fn superposition_follows_the_dominant_branch() {
    let c = CouplingParams::new(0.7, 0.9, 0.3, 0.4, 0.2, 2.0, 1.0).unwrap();
    let plus = ProfileSpec::new(c, Branch::A, Sign::Plus);
    let minus = ProfileSpec::new(c, Branch::A, Sign::Minus);
    let rep = classify_superposition(&plus, &minus).unwrap();
    let dominant = if rep.dominant == Sign::Plus { &rep.plus } else { &rep.minus };
    assert_eq!(rep.normalizable, dominant.is_finite());
    assert!(classify_superposition(&plus, &plus).is_err());
    let other = ProfileSpec::new(c, Branch::B, Sign::Minus);
    assert!(classify_superposition(&plus, &other).is_err());
}

#[test]
fn complex_alpha_norm_matches_real_part_twin() {
    // D < 0: alpha is imaginary, so the norm equals the mixing-free profile's
    let c = CouplingParams::new(0.6, 0.7, 0.0, 1.0, -1.0, 0.0, 1.0).unwrap();
    let spec = ProfileSpec::new(c, Branch::A, Sign::Plus);
    assert!(spec.mode.alpha.re.abs() < 1e-15 && spec.mode.alpha.im != 0.0);
    let twin = spec.with_mode(spec.mode.with_alpha(c64(0.0)));
    let (x, y) = (
        norm_quadrature(&spec, 1e-11).unwrap().value().unwrap(),
        norm_quadrature(&twin, 1e-11).unwrap().value().unwrap(),
    );
    assert!((x - y).abs() < 1e-9 * x);
}
