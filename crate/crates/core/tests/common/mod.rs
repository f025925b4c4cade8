//! Random 1-safe stopwatch nets shared by the property and acceptance tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use swpn_core::{Bound, NetBuilder, PlaceKind, SwpnNet, TimeInterval, TransitionKind};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn normal_interval(rng: &mut StdRng) -> TimeInterval {
    TimeInterval::closed(rng.gen_range(0..=1), rng.gen_range(2..=3))
}

/// A token flowing down a chain of normal places, with optional branch
/// conflicts, stop/resume pairs whose suspension feeds a feared transition,
/// feared transitions opposed by the chain, and an unopposed terminal feared
/// transition. Feared transitions also consume the environment place `ctx`
/// (invariant `ctx + F = 1`). At most 8 places and 8 transitions.
pub fn random_swpn(rng: &mut StdRng) -> SwpnNet {
    let mut places = 3; // ctx, F, p0
    let mut transitions = 0;
    let mut b = NetBuilder::new("random")
        .place("ctx", PlaceKind::Normal, 1)
        .place("F", PlaceKind::Feared, 0)
        .place("p0", PlaceKind::Normal, 1)
        .invariant(&["ctx", "F"], 1);
    let mut normal = vec!["ctx".to_string(), "p0".to_string()];
    let chain_len = rng.gen_range(1..=3);
    for i in 0..chain_len {
        let (from, to) = (format!("p{i}"), format!("p{}", i + 1));
        b = b.place(&to, PlaceKind::Normal, 0);
        let a = format!("a{i}");
        b = b.transition(&a, normal_interval(rng), TransitionKind::Normal).arc(&from, &a).arc(&a, &to);
        normal.push(to);
        places += 1;
        transitions += 1;
    }
    let mut chain: Vec<usize> = (0..=chain_len).collect();
    chain.shuffle(rng);
    let mut feared_count = 0;
    let budget_ok = |places: usize, transitions: usize, dp: usize, dt: usize| places + dp <= 8 && transitions + dt <= 8;

    // Branch conflict towards a dead-end place.
    if rng.gen_bool(0.4) && budget_ok(places, transitions, 1, 1) {
        let i = rng.gen_range(0..chain_len);
        b = b
            .place("q", PlaceKind::Normal, 0)
            .transition("b", normal_interval(rng), TransitionKind::Normal)
            .arc(&format!("p{i}"), "b")
            .arc("b", "q");
        normal.push("q".into());
        places += 1;
        transitions += 1;
    }
    let mut suspended = Vec::new();
    for &i in chain.iter().take(rng.gen_range(1..=2)) {
        if !budget_ok(places, transitions, 1, 3) {
            break;
        }
        let (p, s, w) = (format!("p{i}"), format!("s{i}"), format!("w{i}"));
        let (stop, resume, f) = (format!("stop{i}"), format!("resume{i}"), format!("f{i}"));
        let alpha = match rng.gen_range(0..4) {
            3 => Bound::Infinite,
            k => Bound::finite(k + 1),
        };
        let m = *[1, 2, 4].choose(rng).expect("non-empty");
        b = b
            .place(&s, PlaceKind::Suspension, 0)
            .stopwatch(&w, alpha)
            .transition_full(&stop, None, normal_interval(rng), TransitionKind::Stop, Some(&w))
            .transition_full(&resume, None, TimeInterval::closed(m, m + 2), TransitionKind::Resume, Some(&w))
            .transition(&f, TimeInterval::unbounded(0), TransitionKind::Feared)
            .arc(&p, &stop)
            .arc(&stop, &s)
            .arc(&s, &resume)
            .arc(&resume, &p)
            .arc(&s, &f)
            .arc("ctx", &f)
            .arc(&f, "F");
        places += 1;
        transitions += 3;
        feared_count += 1;
        suspended.push(i);
    }
    // Feared transition racing the chain (never wins) or waiting at its end.
    if budget_ok(places, transitions, 0, 1) && rng.gen_bool(0.5) {
        let i = rng.gen_range(0..=chain_len);
        let g = "g";
        b = b
            .transition(g, TimeInterval::unbounded(0), TransitionKind::Feared)
            .arc(&format!("p{i}"), g)
            .arc("ctx", g)
            .arc(g, "F");
        feared_count += 1;
    }
    if feared_count == 0 {
        let last = format!("p{chain_len}");
        b = b.transition("h", TimeInterval::unbounded(0), TransitionKind::Feared).arc(&last, "h").arc("ctx", "h").arc("h", "F");
    }
    let refs: Vec<&str> = normal.iter().map(String::as_str).collect();
    b.normal(&refs).build().expect("generated nets are valid")
}

/// Arbitrary structure for purely structural properties.
pub fn random_structure(rng: &mut StdRng) -> SwpnNet {
    let np = rng.gen_range(1..=8);
    let nt = rng.gen_range(0..=8);
    let mut b = NetBuilder::new("structure");
    for p in 0..np {
        b = b.place(&format!("p{p}"), PlaceKind::Normal, rng.gen_range(0..=1));
    }
    for t in 0..nt {
        let id = format!("t{t}");
        b = b.transition(&id, normal_interval(rng), TransitionKind::Normal);
        for p in 0..np {
            match rng.gen_range(0..4) {
                0 => b = b.arc(&format!("p{p}"), &id),
                1 => b = b.arc(&id, &format!("p{p}")),
                _ => {}
            }
        }
    }
    let normal: Vec<String> = (0..np).map(|p| format!("p{p}")).collect();
    let refs: Vec<&str> = normal.iter().map(String::as_str).collect();
    b.normal(&refs).build().expect("valid structure")
}

use std::collections::BTreeSet;

use swpn_core::engine::TransitionClassification;
use swpn_core::event::{EventId, Token, TokenSet};
use swpn_core::state::AnalysisState;
use swpn_core::{fireable, partially_fireable, PlaceIdx};

/// The four classes are pairwise disjoint and cover the fireable and
/// partially fireable transitions outside the prohibited set.
pub fn partition_holds(net: &SwpnNet, state: &AnalysisState, c: &TransitionClassification) -> bool {
    let classes = [&c.tfscec, &c.tpfsc, &c.tfcpf, &c.tpfc];
    let total: usize = classes.iter().map(|s| s.len()).sum();
    let union: BTreeSet<_> = classes.iter().flat_map(|s| s.iter().copied()).collect();
    let expected: BTreeSet<_> = fireable(net, &state.tokens)
        .union(&partially_fireable(net, &state.tokens))
        .copied()
        .filter(|t| !state.prohibited.contains(t))
        .collect();
    total == union.len() && union == expected
}

/// Every subset of the invariant places, checked against an independent sum.
pub fn coherence_matches_invariants(net: &SwpnNet) -> bool {
    let places: Vec<PlaceIdx> = net.invariants.iter().flat_map(|i| i.places.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    assert!(places.len() < 16);
    (0u32..1 << places.len()).all(|mask| {
        let chosen: Vec<PlaceIdx> = places.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, p)| *p).collect();
        let tokens = TokenSet::from_tokens(chosen.iter().map(|p| Token::new(EventId::Initial, *p))).unwrap();
        let violates = net.invariants.iter().any(|i| i.places.iter().filter(|p| chosen.contains(p)).count() as u32 > i.constant);
        swpn_core::engine::coherence_check(net, &tokens) == !violates
    })
}
