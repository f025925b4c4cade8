//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::Rng;
use swpn_core::dsl::{parse_model, serialize_model};
use swpn_core::engine::{
    back_reasoning, run_feared_scenario_analysis, run_observed, specify_transition, AnalysisConfig, AnalysisReport,
    Ordinals,
};
use swpn_core::models::{bundled_document, load_bundled, BundledName};
use swpn_core::oracle::{minimal_event_sets, oracle_explore};
use swpn_core::report::render_report;
use swpn_core::state::BifurcationKind;
use swpn_core::{fire_transition, invert_net, AnalysisState, Bound, EventId, SwpnNet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn composed() -> SwpnNet {
    load_bundled(BundledName::AbsComposed).unwrap()
}

fn analyze(net: &SwpnNet) -> Result<AnalysisReport, String> {
    run_feared_scenario_analysis(net, &AnalysisConfig::default()).map_err(|e| e.to_string())
}

/// Renumbers `e<k>` and `f<k>` names by order of first appearance.
struct Renamer(BTreeMap<String, String>, [usize; 2]);

impl Renamer {
    fn new() -> Self {
        Renamer(BTreeMap::new(), [0, 0])
    }

    fn name(&mut self, s: &str) -> String {
        let slot = match s.as_bytes() {
            [b'e', rest @ ..] if !rest.is_empty() && rest.iter().all(u8::is_ascii_digit) => 0,
            [b'f', rest @ ..] if !rest.is_empty() && rest.iter().all(u8::is_ascii_digit) => 1,
            _ => return s.to_string(),
        };
        if let Some(n) = self.0.get(s) {
            return n.clone();
        }
        self.1[slot] += 1;
        let n = format!("{}{}", ["e", "f"][slot], self.1[slot]);
        self.0.insert(s.to_string(), n.clone());
        n
    }
}

type Listing = (BTreeSet<String>, BTreeSet<(String, String)>, BTreeSet<(String, String)>);

fn normalize(events: &[&str], arcs: &[(&str, &str)], enriched: &[(&str, &str)]) -> Listing {
    let mut r = Renamer::new();
    let enriched = enriched.iter().map(|(e, p)| (r.name(e), p.to_string())).collect();
    let events = events.iter().map(|e| r.name(e)).collect();
    let arcs = arcs.iter().map(|(a, b)| (r.name(a), r.name(b))).collect();
    (events, arcs, enriched)
}

fn listing(net: &SwpnNet, report: &AnalysisReport, index: usize) -> Listing {
    let s = &report.scenarios[index];
    let events = s.order.rendered_events(net);
    let arcs = s.order.rendered_arcs(net);
    let enriched: Vec<(String, String)> =
        s.order.enriched.iter().map(|t| (t.producer.render(net), net.place(t.place).id.clone())).collect();
    normalize(
        &events.iter().map(String::as_str).collect::<Vec<_>>(),
        &arcs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
        &enriched.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
    )
}

fn bif2_watch(net: &SwpnNet, report: &AnalysisReport, index: usize) -> Option<String> {
    let b = report.scenarios[index].bifurcation?;
    let w = b.stopwatch.filter(|_| b.kind == BifurcationKind::Bif2)?;
    Some(net.stopwatch(w).id.clone())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let net = composed();
    let report = analyze(&net)?;
    let elapsed = start.elapsed();
    ensure(report.scenarios.len() == 4, || format!("{} scenarios", report.scenarios.len()))?;
    let first = normalize(
        &["i", "t11", "t6"],
        &[("i", "t11"), ("t11", "t6"), ("t6", "f2")],
        &[("e1", "P2")],
    );
    let second = normalize(
        &["i", "t2", "t3", "t31", "t6"],
        &[("i", "t2"), ("t2", "t3"), ("t3", "t31"), ("t31", "t6"), ("t6", "f4")],
        &[("e3", "P2")],
    );
    let strip = |(e, a, l): Listing| -> Listing {
        let local = |s: String| s.rsplit('.').next().unwrap().to_string();
        (e, a, l.into_iter().map(|(x, p)| (x, local(p))).collect())
    };
    ensure(strip(listing(&net, &report, 0)) == first, || format!("scenario 1 = {:?}", listing(&net, &report, 0)))?;
    ensure(strip(listing(&net, &report, 1)) == second, || format!("scenario 2 = {:?}", listing(&net, &report, 1)))?;
    let watches: Vec<Option<String>> = (0..4).map(|i| bif2_watch(&net, &report, i)).collect();
    let want = ["common.piston", "common.software", "optional.actuator", "optional.valve"];
    ensure(watches.iter().zip(want).all(|(w, x)| w.as_deref() == Some(x)), || format!("bifurcations {watches:?}"))?;
    let sets: Vec<BTreeSet<String>> =
        (2..4).map(|i| report.scenarios[i].order.rendered_events(&net).into_iter().collect()).collect();
    let expect = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    ensure(sets[0] == expect(&["i", "t2", "t3", "t4", "t5", "t11", "t6"]), || format!("actuator {:?}", sets[0]))?;
    ensure(sets[1] == expect(&["i", "t2", "t3", "t4", "t5", "t13", "t22", "t6"]), || format!("valve {:?}", sets[1]))?;
    within(Duration::from_secs(1), elapsed)?;
    Ok(format!("4 scenarios in {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let net = load_bundled(BundledName::AbsOld).unwrap();
    let report = analyze(&net)?;
    let elapsed = start.elapsed();
    ensure(report.scenarios.is_empty(), || format!("{} scenarios", report.scenarios.len()))?;
    within(Duration::from_secs(1), elapsed)?;
    Ok(format!("0 scenarios in {elapsed:?}"))
}

fn conditioner_ids(net: &SwpnNet) -> Result<BTreeSet<String>, String> {
    let target = net.feared_places().into_iter().next().ok_or("no feared place")?;
    let set = back_reasoning(net, target, 64).map_err(|e| e.to_string())?;
    Ok(set.into_iter().map(|p| net.place(p).id.clone()).collect())
}

fn criterion_3() -> Outcome {
    let common = conditioner_ids(&load_bundled(BundledName::AbsCommon).unwrap())?;
    let optional = conditioner_ids(&load_bundled(BundledName::AbsOptional).unwrap())?;
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    ensure(common == set(&["stop-piston", "stop-software"]), || format!("common {common:?}"))?;
    ensure(optional == set(&["stop-act", "stop-vlv"]), || format!("optional {optional:?}"))?;
    Ok(format!("common {common:?}, optional {optional:?}"))
}

fn criterion_4() -> Outcome {
    let net = load_bundled(BundledName::AbsCommon).unwrap();
    let start = AnalysisState::initial(&net, [net.p("piston")]);
    let stopped = fire_transition(&start, &net, net.t("t11")).map_err(|e| e.to_string())?;
    let branches = specify_transition(&net, &stopped, net.t("t12"), &[net.t("t6")], &mut Ordinals::default())
        .map_err(|e| e.to_string())?;
    let within_branch = branches.within.ok_or("no normal branch")?;
    let (_, feared) = branches.exceeded.first().ok_or("no feared branch")?;
    let normal_events = within_branch.render_events(&net);
    let feared_events = feared.render_events(&net);
    let normal_cond = within_branch.condition.map(|c| c.render(&net));
    let feared_cond = feared.condition.map(|c| c.render(&net));
    ensure(normal_events == ["i", "t11", "t12"], || format!("normal branch {normal_events:?}"))?;
    ensure(normal_cond.as_deref() == Some("alpha(piston) <= 13"), || format!("normal condition {normal_cond:?}"))?;
    ensure(feared_events == ["i", "t11", "t6"], || format!("feared branch {feared_events:?}"))?;
    ensure(feared_cond.as_deref() == Some("alpha(piston) > 13"), || format!("feared condition {feared_cond:?}"))?;

    let unbounded = composed().with_alpha_max(Bound::Infinite);
    let report = analyze(&unbounded)?;
    ensure(report.scenarios.is_empty(), || format!("alpha inf: {} scenarios", report.scenarios.len()))?;
    let traces = oracle_explore(&unbounded, Ratio::from_integer(40), Ratio::from_integer(1)).map_err(|e| e.to_string())?;
    ensure(traces.is_empty(), || format!("alpha inf: oracle found {} traces", traces.len()))?;
    Ok("normal {i,t11,t12} under alpha <= 13, feared {i,t11,t6} under alpha > 13, none for inf".into())
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let net = composed();
    let report = analyze(&net)?;
    let traces = oracle_explore(&net, Ratio::from_integer(40), Ratio::from_integer(1)).map_err(|e| e.to_string())?;
    for (i, s) in report.scenarios.iter().enumerate() {
        let witnessed = traces.iter().any(|t| {
            t.linearizes(&s.order.events, &s.order.arcs)
                && s.condition.is_none_or(|c| t.suspensions.get(&c.stopwatch).is_some_and(|d| c.holds_for(*d)))
        });
        ensure(witnessed, || format!("S{} has no witnessing timed trace", i + 1))?;
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(30), elapsed)?;
    Ok(format!("{} scenarios witnessed by {} traces in {elapsed:?}", report.scenarios.len(), traces.len()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(20_240_601);
    let mut nonempty = 0;
    let cases = 40;
    for case in 0..cases {
        let net = common::random_swpn(&mut rng);
        let traces = oracle_explore(&net, Ratio::from_integer(30), Ratio::from_integer(1)).map_err(|e| e.to_string())?;
        let oracle = minimal_event_sets(&traces);
        let report = analyze(&net)?;
        let engine: BTreeSet<BTreeSet<EventId>> =
            report.scenarios.iter().map(|s| s.order.events.iter().copied().collect()).collect();
        ensure(oracle == engine, || format!("case {case}: oracle {} sets, engine {} sets", oracle.len(), engine.len()))?;
        nonempty += usize::from(!engine.is_empty());
    }
    let elapsed = start.elapsed();
    within(Duration::from_secs(60), elapsed)?;
    Ok(format!("{cases} random nets agree ({nonempty} with scenarios) in {elapsed:?}"))
}

fn criterion_7() -> Outcome {
    let mut rng = common::rng(77);
    for case in 0..100 {
        let net = common::random_structure(&mut rng);
        ensure(invert_net(&invert_net(&net)) == net, || format!("involution fails on net {case}"))?;
    }
    let net = composed();
    let mut visited = 0;
    let mut broken = 0;
    run_observed(&net, &AnalysisConfig::default(), &mut |state, class| {
        visited += 1;
        broken += usize::from(!common::partition_holds(&net, state, class));
    })
    .map_err(|e| e.to_string())?;
    ensure(broken == 0, || format!("partition broken on {broken} of {visited} states"))?;
    for name in BundledName::ALL {
        ensure(common::coherence_matches_invariants(&load_bundled(name).unwrap()), || format!("coherence on {name}"))?;
    }
    for _ in 0..50 {
        ensure(common::coherence_matches_invariants(&common::random_swpn(&mut rng)), || "coherence on random net".into())?;
    }
    let first = analyze(&net)?;
    ensure(first.scenarios.iter().all(|s| s.order.is_acyclic() && s.order.sources() == [EventId::Initial]), || {
        "cyclic scenario".into()
    })?;
    let second = analyze(&net)?;
    ensure(render_report(&net, &first) == render_report(&net, &second), || "reports differ between runs".into())?;
    Ok(format!("involution x100, partition on {visited} states, coherence, DAG, determinism"))
}

const SOUP: &[&str] = &[
    "net", "place", "trans", "arc", "->", "{", "}", "interval=[1,2]", "interval=[5,2]", "interval=[", "kind=stop",
    "kind=feared", "watch=w", "init=1", "invariant", "+", "=", "1", "normal", "analysis", "target=ED", "\n", "#",
];

fn fuzz_input(rng: &mut rand::rngs::StdRng) -> String {
    match rng.gen_range(0..3) {
        0 => (0..rng.gen_range(0..200)).map(|_| char::from_u32(rng.gen_range(0..0x800)).unwrap_or('?')).collect(),
        1 => (0..rng.gen_range(0..60)).map(|_| SOUP[rng.gen_range(0..SOUP.len())]).collect::<Vec<_>>().join(" "),
        _ => {
            let src = BundledName::AbsComposed.source();
            let mut at = rng.gen_range(0..src.len());
            while !src.is_char_boundary(at) {
                at -= 1;
            }
            let end = (at + rng.gen_range(0..20)).min(src.len());
            let noise: String = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(b' '..=b'~') as char).collect();
            format!("{}{noise}{}", &src[..at], &src[end..])
        }
    }
}

fn criterion_8() -> Outcome {
    for name in BundledName::ALL {
        let doc = bundled_document(name).map_err(|e| e.to_string())?;
        let again = parse_model(&serialize_model(&doc)).into_result().map_err(|d| format!("{name}: {d:?}"))?;
        ensure(again == doc, || format!("round trip differs on {name}"))?;
    }
    let mut rng = common::rng(8);
    let mut diagnostics = 0;
    for case in 0..1000 {
        let src = fuzz_input(&mut rng);
        let lines: Vec<usize> = src.split('\n').map(|l| l.chars().count()).collect();
        let result = panic::catch_unwind(|| parse_model(&src)).map_err(|_| format!("parser crashed on case {case}"))?;
        for d in &result.diagnostics {
            let inside = d.line >= 1 && d.line <= lines.len() && d.column >= 1 && d.column <= lines[d.line - 1] + 1;
            ensure(inside, || format!("case {case}: diagnostic {d} outside the text"))?;
        }
        ensure(result.document.is_some() || !result.diagnostics.is_empty(), || format!("case {case}: no document, no diagnostic"))?;
        diagnostics += result.diagnostics.len();
    }
    Ok(format!("round trip on 4 models, 1000 fuzz cases, {diagnostics} positioned diagnostics"))
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 8] = [
        ("four-scenario reproduction", criterion_1),
        ("negative regression", criterion_2),
        ("conditioner states", criterion_3),
        ("alpha case split", criterion_4),
        ("oracle soundness", criterion_5),
        ("oracle completeness", criterion_6),
        ("property suites", criterion_7),
        ("parser", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
