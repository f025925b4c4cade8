//! Golden reports and trace facts of the bundled ABS models.

use std::collections::BTreeSet;

use swpn_core::engine::{back_reasoning, run_feared_scenario_analysis, AnalysisConfig};
use swpn_core::models::{load_bundled, BundledName};
use swpn_core::report::render_report;
use swpn_core::state::BifurcationKind;
use swpn_core::{validate_net, Bound};

fn golden(name: BundledName) -> &'static str {
    match name {
        BundledName::AbsCommon => include_str!("../models/golden/abs-common.json"),
        BundledName::AbsOptional => include_str!("../models/golden/abs-optional.json"),
        BundledName::AbsComposed => include_str!("../models/golden/abs-composed.json"),
        BundledName::AbsOld => include_str!("../models/golden/abs-old.json"),
    }
}

#[test]
fn reports_match_golden_files() {
    for name in BundledName::ALL {
        let net = load_bundled(name).unwrap();
        let config = swpn_core::models::bundled_document(name).unwrap().analysis_config();
        let report = run_feared_scenario_analysis(&net, &config).unwrap();
        assert_eq!(render_report(&net, &report), golden(name), "{name}");
    }
}

#[test]
fn composed_model_is_valid_with_wheel_invariant() {
    let net = load_bundled(BundledName::AbsComposed).unwrap();
    assert!(validate_net(&net).is_empty());
    let inv = &net.invariants[0];
    let sum: u32 = inv.places.iter().map(|p| net.place(*p).initial).sum();
    assert_eq!(sum, 1);
}

#[test]
fn stopwatch_limits_are_thirteen() {
    let net = load_bundled(BundledName::AbsComposed).unwrap();
    assert_eq!(net.stopwatches.len(), 4);
    assert!(net.stopwatches.iter().all(|w| w.alpha_max == Bound::finite(13)));
}

#[test]
fn composed_conditioners_cover_both_blocks() {
    let net = load_bundled(BundledName::AbsComposed).unwrap();
    let got: BTreeSet<String> = back_reasoning(&net, net.p("common.ED"), 40)
        .unwrap()
        .into_iter()
        .map(|p| net.place(p).id.clone())
        .collect();
    let want: BTreeSet<String> =
        ["common.stop-piston", "common.stop-software", "optional.stop-act", "optional.stop-vlv"]
            .into_iter()
            .map(String::from)
            .collect();
    assert_eq!(got, want);
}

#[test]
fn every_composed_scenario_is_a_resumption_bifurcation() {
    let net = load_bundled(BundledName::AbsComposed).unwrap();
    let report = run_feared_scenario_analysis(&net, &AnalysisConfig::default()).unwrap();
    let watches: Vec<String> = report
        .scenarios
        .iter()
        .map(|s| {
            let b = s.bifurcation.unwrap();
            assert_eq!(b.kind, BifurcationKind::Bif2);
            net.stopwatch(b.stopwatch.unwrap()).id.clone()
        })
        .collect();
    assert_eq!(watches, ["common.piston", "common.software", "optional.actuator", "optional.valve"]);
}

#[test]
fn alpha_override_from_config() {
    let net = load_bundled(BundledName::AbsComposed).unwrap();
    let config = AnalysisConfig { alpha_max: Some(Bound::finite(20)), ..AnalysisConfig::default() };
    let report = run_feared_scenario_analysis(&net, &config).unwrap();
    assert_eq!(report.scenarios.len(), 4);
    assert!(report.scenarios.iter().all(|s| s.condition.unwrap().render(&net).ends_with("> 20")));
}
