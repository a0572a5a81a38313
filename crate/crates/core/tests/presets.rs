use htheta::kfield::FieldId;
use htheta::lattice::{compute_g1, compute_g2};
use htheta::presets::{
    bracket_to_characteristic, default_suite, make_preset, prop_half_parametrization, run_case, run_paper_suite, Check,
    PresetName, PresetParams, SuiteCase, DEFAULT_SEED,
};
use htheta::theta::ThetaParams;
use htheta::Error;
use serde_json::json;

#[test]
fn names_round_trip() {
    for name in PresetName::ALL {
        assert_eq!(name.as_str().parse::<PresetName>().unwrap(), name);
        assert_eq!(name.to_string().to_uppercase().parse::<PresetName>().unwrap(), name);
    }
    assert!(matches!("cubic".parse::<PresetName>(), Err(Error::Parse(_))));
}

#[test]
fn invalid_parameters_are_rejected() {
    let bad = [
        (PresetName::JacobiIdentity, PresetParams::with_g(2)),
        (PresetName::CubicD3, PresetParams { d: Some(1), ..Default::default() }),
        (PresetName::QuarticD1, PresetParams { d: Some(3), ..Default::default() }),
        (
            PresetName::QuarticD1Zero,
            PresetParams { alpha: Some(json!([["1/2", "0", "0", "0"]])), ..Default::default() },
        ),
        (
            PresetName::RiemannQuad,
            PresetParams { g: Some(1), alpha: Some(json!([["1/3", "0"]])), ..Default::default() },
        ),
        (PresetName::CubicD3, PresetParams { alpha: Some(json!([["1/2", "0"]])), ..Default::default() }),
        (PresetName::PropHalfGeneral, PresetParams { d: Some(4), ..Default::default() }),
        (PresetName::Matsumoto, PresetParams::with_g(0)),
    ];
    for (name, params) in bad {
        assert!(make_preset(name, &params).is_err(), "{name} {params:?}");
    }
}

#[test]
fn computed_groups_match_expected_orders() {
    for case in default_suite() {
        let preset = make_preset(case.preset, &case.params).unwrap();
        let Some(rp) = preset.relation() else { continue };
        let (g1, g2) = (compute_g1(rp.spec.g, &rp.spec.t).unwrap(), compute_g2(rp.spec.g, &rp.spec.t).unwrap());
        assert_eq!(Some(g1.order), rp.expected.order_g1, "{} {:?}", case.preset, case.params);
        assert_eq!(Some(g2.order), rp.expected.order_g2, "{} {:?}", case.preset, case.params);
        // G2 is trivial exactly when T⁻¹ is integral
        assert_eq!(g2.is_trivial(), rp.spec.t.inverse().unwrap().is_integral());
    }
}

#[test]
fn printed_parametrisation_of_g1() {
    for (d, matches) in [(1, true), (3, true), (2, false), (7, false)] {
        let r = prop_half_parametrization(FieldId::new(d).unwrap(), 1).unwrap();
        assert_eq!(r.statement_matches, matches, "d = {d}: {r:?}");
        let preset =
            make_preset(PresetName::PropHalfGeneral, &PresetParams { d: Some(d), ..Default::default() }).unwrap();
        assert_eq!(preset.warnings.is_empty(), matches);
    }
}

#[test]
fn corollaries_include_bracket_displays() {
    for name in [PresetName::CubicD3Cor1, PresetName::CubicD3Cor2, PresetName::QuarticD1Zero] {
        let p = make_preset(name, &PresetParams::default()).unwrap();
        assert_eq!(p.checks.iter().filter(|c| matches!(c, Check::Identity(_))).count(), 1, "{name}");
    }
    let k3 = FieldId::new(3).unwrap();
    let a = bracket_to_characteristic(&[[1, 2], [0, 1]], 3, k3).unwrap();
    // 3·ρ1/3 and √−3·ρ2/√−3 are integral, so 3a is integral
    assert!(a.scale_rational(&htheta::kfield::rational::int(3)).is_integral());
}

#[test]
fn matsumoto_warns_only_for_nonzero_b() {
    let plain = make_preset(PresetName::Matsumoto, &PresetParams::with_g(1)).unwrap();
    assert!(plain.warnings.is_empty());
    let with_b = PresetParams { g: Some(1), beta: Some(json!([["1/2", "0"]])), ..Default::default() };
    assert_eq!(make_preset(PresetName::Matsumoto, &with_b).unwrap().warnings.len(), 1);
}

#[test]
fn jacobi_case_passes() {
    let case = SuiteCase::new(PresetName::JacobiIdentity, PresetParams::with_g(1));
    let records = run_case(&case, &ThetaParams::default(), DEFAULT_SEED).unwrap();
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r.pass() && r.report.residual_rel < 1e-10));
}

#[test]
fn suite_output_formats() {
    let cases = vec![
        SuiteCase::new(PresetName::HalfFormulas, PresetParams::with_g(1)),
        SuiteCase::new(PresetName::PropHalfGeneral, PresetParams { d: Some(7), ..Default::default() }),
    ];
    let report = run_paper_suite(&cases, &ThetaParams::default(), DEFAULT_SEED).unwrap();
    assert!(report.all_pass());
    let csv = report.to_csv();
    assert!(csv.starts_with("preset,g,d,order_G1,residual_rel,seconds\n"));
    assert_eq!(csv.lines().count(), report.records.len() + 1);
    let text = report.to_json().to_string();
    assert!(!text.contains("seconds"));
    let again = run_paper_suite(&cases, &ThetaParams::default(), DEFAULT_SEED).unwrap();
    assert_eq!(again.to_json().to_string(), text);
}
