//! Forward reasoning from the initial tokens towards the feared places.

use std::collections::{BTreeMap, BTreeSet};

use crate::event::EventId;
use crate::net::{fireable, in_conflict, sort_transitions, PlaceIdx, SwpnNet, TransIdx, TransitionKind};
use crate::state::{
    check_transition, fire_transition, AlphaCondition, AlphaRelation, AlphaVerdict, AnalysisState, Bifurcation,
    BifurcationKind, StopwatchStatus,
};
use crate::time::Bound;

use super::enrich::{enrich_marking_max, enrich_marking_min};
use super::{
    is_feared, Context, ContextStack, EngineError, Ordinals, PartialOrder, Scenario, TransitionClassification,
};

/// Splits the fireable and partially fireable transitions of a branch by
/// conflict. Prohibited transitions are left out.
pub fn classify_transitions(net: &SwpnNet, state: &AnalysisState) -> TransitionClassification {
    let tokens = &state.tokens;
    let fire: BTreeSet<TransIdx> =
        fireable(net, tokens).into_iter().filter(|t| !state.prohibited.contains(t)).collect();
    let partial: BTreeSet<TransIdx> = crate::net::partially_fireable(net, tokens);
    let mut out = TransitionClassification::default();
    for t in &fire {
        if partial.iter().any(|p| in_conflict(net, tokens, *t, *p)) {
            out.tfcpf.insert(*t);
        } else {
            out.tfscec.insert(*t);
        }
    }
    for p in &partial {
        if fire.iter().chain(partial.iter()).any(|u| in_conflict(net, tokens, *p, *u)) {
            out.tpfc.insert(*p);
        } else {
            out.tpfsc.insert(*p);
        }
    }
    out
}

/// Saves the branch in which `t` is not fired.
pub fn memorize_context(stack: &mut ContextStack, state: &AnalysisState, t: TransIdx) {
    let mut snapshot = state.clone();
    snapshot.prohibited.insert(t);
    stack.push(Context { step_counter: state.depth as u32, snapshot });
}

/// Kind of the bifurcation that `feared` is involved in on this branch, if any.
pub fn classify_bifurcation(net: &SwpnNet, state: &AnalysisState, feared: TransIdx) -> Option<Bifurcation> {
    let tokens = &state.tokens;
    let enabled = fireable(net, tokens);
    let competitors: Vec<TransIdx> = sort_transitions(
        net,
        &enabled
            .iter()
            .copied()
            .filter(|u| !is_feared(net, *u) && in_conflict(net, tokens, feared, *u))
            .collect::<Vec<_>>(),
    );
    let resume = competitors.iter().copied().find(|r| {
        let tr = net.transition(*r);
        tr.kind == TransitionKind::Resume
            && tr.stopwatch.is_some_and(|w| state.stopwatch(w) == StopwatchStatus::Running)
    });
    if let Some(r) = resume {
        return Some(Bifurcation {
            kind: BifurcationKind::Bif2,
            normal_branch: r,
            feared_branch: feared,
            stopwatch: net.transition(r).stopwatch,
        });
    }
    competitors
        .iter()
        .copied()
        .find(|u| net.transition(*u).kind != TransitionKind::Resume)
        .map(|t| Bifurcation { kind: BifurcationKind::Bif1, normal_branch: t, feared_branch: feared, stopwatch: None })
}

/// The two sides of a resumption bifurcation.
#[derive(Debug, Clone, Default)]
pub struct SpecifiedBranches {
    /// The suspended task resumes within its limit.
    pub within: Option<AnalysisState>,
    /// The suspension outlives its limit and a feared transition fires instead.
    pub exceeded: Vec<(TransIdx, AnalysisState)>,
}

/// Splits a branch at the Resume transition `resume`, competing with the
/// feared transitions `feared`, according to the stopwatch limit.
pub fn specify_transition(
    net: &SwpnNet,
    state: &AnalysisState,
    resume: TransIdx,
    feared: &[TransIdx],
    ordinals: &mut Ordinals,
) -> Result<SpecifiedBranches, EngineError> {
    let tr = net.transition(resume);
    let watch = tr.stopwatch.expect("resume transitions carry a stopwatch");
    let alpha_max = net.stopwatch(watch).alpha_max;
    let verdict = check_transition(state.stopwatch(watch), tr.interval.min, alpha_max)?;
    let mut out = SpecifiedBranches::default();

    if verdict != AlphaVerdict::Exceeded {
        let mut within = fire_transition(state, net, resume)?;
        if alpha_max != Bound::Infinite {
            within.condition =
                Some(AlphaCondition { stopwatch: watch, relation: AlphaRelation::AtMost, bound: alpha_max });
        }
        out.within = Some(within);
    }
    if verdict != AlphaVerdict::WithinBound {
        for f in feared {
            let Ok(mut branch) = enrich_marking_min(net, state, *f, ordinals) else {
                continue;
            };
            branch.stopwatches.insert(watch, StopwatchStatus::BranchedOver);
            branch.prohibited.insert(resume);
            let mut fired = fire_transition(&branch, net, *f)?;
            fired.condition =
                Some(AlphaCondition { stopwatch: watch, relation: AlphaRelation::Exceeds, bound: alpha_max });
            fired.bifurcation = Some(Bifurcation {
                kind: BifurcationKind::Bif2,
                normal_branch: resume,
                feared_branch: *f,
                stopwatch: Some(watch),
            });
            out.exceeded.push((*f, fired));
        }
        if verdict == AlphaVerdict::Exceeded && out.exceeded.is_empty() {
            return Err(EngineError::NoAlternative(tr.id.clone()));
        }
    }
    Ok(out)
}

/// Turns a finished branch into a partial order. With `closing`, only the
/// causal past of that event is kept. Each maximal event gets its own sink.
pub fn build_partial_order(state: &AnalysisState, closing: Option<EventId>, ordinals: &mut Ordinals) -> PartialOrder {
    let kept: BTreeSet<EventId> = match closing {
        None => state.events.iter().copied().collect(),
        Some(last) => {
            let mut past = BTreeSet::from([EventId::Initial, last]);
            let mut frontier = vec![last];
            while let Some(e) = frontier.pop() {
                for (a, _) in state.arcs.iter().filter(|(_, b)| *b == e) {
                    if past.insert(*a) {
                        frontier.push(*a);
                    }
                }
            }
            past
        }
    };
    let events: Vec<EventId> = state.events.iter().copied().filter(|e| kept.contains(e)).collect();
    let mut arcs: BTreeSet<(EventId, EventId)> =
        state.arcs.iter().copied().filter(|(a, b)| kept.contains(a) && kept.contains(b)).collect();
    let maximal: Vec<EventId> = events.iter().copied().filter(|e| !arcs.iter().any(|(a, _)| a == e)).collect();
    for e in maximal {
        arcs.insert((e, ordinals.sink()));
    }
    let enriched = state.enrichment_uses.iter().filter(|(_, e)| kept.contains(e)).map(|(tok, _)| *tok).collect();
    PartialOrder { events, arcs, enriched }
}

/// Forward reasoning over every branch. Returns the scenarios in canonical
/// order.
pub fn front_reasoning(
    net: &SwpnNet,
    conditioners: &BTreeSet<PlaceIdx>,
    depth_limit: usize,
) -> Result<Vec<Scenario>, EngineError> {
    front_reasoning_observed(net, conditioners, depth_limit, &mut |_, _| {}).map(|(s, _)| s)
}

/// [`front_reasoning`] calling `observer` on every classified state; also
/// returns the number of explored branches.
pub fn front_reasoning_observed(
    net: &SwpnNet,
    conditioners: &BTreeSet<PlaceIdx>,
    depth_limit: usize,
    observer: &mut dyn FnMut(&AnalysisState, &TransitionClassification),
) -> Result<(Vec<Scenario>, usize), EngineError> {
    let environment = net.environment_places();
    let relevant_feared = net
        .trans_indices()
        .filter(|t| is_feared(net, *t) && net.pre(*t).iter().any(|p| conditioners.contains(p)))
        .collect();
    let start: BTreeSet<PlaceIdx> =
        net.initial_places().into_iter().filter(|p| !environment.contains(p)).collect();
    let mut explorer = Explorer {
        net,
        environment,
        relevant_feared,
        depth_limit,
        ordinals: Ordinals::default(),
        stack: ContextStack::new(),
        found: Vec::new(),
        explored: 0,
    };
    explorer.stack.push(Context { snapshot: AnalysisState::initial(net, start), step_counter: 0 });
    while let Some(ctx) = explorer.stack.pop() {
        explorer.explored += 1;
        explorer.run_branch(ctx.snapshot, observer)?;
    }

    let mut unique: BTreeMap<_, Scenario> = BTreeMap::new();
    for s in explorer.found {
        unique.entry(s.shape_key(net)).or_insert(s);
    }
    let mut scenarios: Vec<Scenario> = unique.into_values().collect();
    scenarios.sort_by_key(|s| (s.order.events.len(), s.order.rendered_events(net)));
    Ok((scenarios, explorer.explored))
}

struct Explorer<'a> {
    net: &'a SwpnNet,
    environment: BTreeSet<PlaceIdx>,
    relevant_feared: BTreeSet<TransIdx>,
    depth_limit: usize,
    ordinals: Ordinals,
    stack: ContextStack,
    found: Vec<Scenario>,
    explored: usize,
}

impl Explorer<'_> {
    fn run_branch(
        &mut self,
        mut state: AnalysisState,
        observer: &mut dyn FnMut(&AnalysisState, &TransitionClassification),
    ) -> Result<(), EngineError> {
        let net = self.net;
        loop {
            if state.depth > self.depth_limit {
                return Err(EngineError::Nonterminating { limit: self.depth_limit });
            }
            if let Some(place) = state.feared_marked(net) {
                self.finish_feared(&state, place);
                return Ok(());
            }
            if state.revisited {
                build_partial_order(&state, None, &mut self.ordinals);
                return Ok(());
            }
            observer(&state, &classify_transitions(net, &state));

            let tokens = &state.tokens;
            let enabled = fireable(net, tokens);
            let usable: Vec<TransIdx> = enabled
                .iter()
                .copied()
                .filter(|t| !state.prohibited.contains(t))
                .filter(|t| !is_feared(net, *t) || self.relevant_feared.contains(t))
                .collect();
            let feared: Vec<TransIdx> = self
                .relevant_feared
                .iter()
                .copied()
                .filter(|f| !state.prohibited.contains(f) && self.can_become_fireable(&state, *f))
                .collect();

            // Resumption against a feared transition.
            let resumptions = sort_transitions(
                net,
                &usable
                    .iter()
                    .copied()
                    .filter(|r| {
                        let tr = net.transition(*r);
                        tr.kind == TransitionKind::Resume
                            && tr.stopwatch.is_some_and(|w| state.stopwatch(w) == StopwatchStatus::Running)
                    })
                    .collect::<Vec<_>>(),
            );
            if let Some((r, rivals)) = resumptions.iter().find_map(|r| {
                let rivals: Vec<TransIdx> =
                    feared.iter().copied().filter(|f| in_conflict(net, tokens, *r, *f)).collect();
                (!rivals.is_empty()).then_some((*r, rivals))
            }) {
                let branches = specify_transition(net, &state, r, &rivals, &mut self.ordinals)?;
                for (_, b) in branches.exceeded.into_iter().rev() {
                    self.stack.push(Context { step_counter: b.depth as u32, snapshot: b });
                }
                match branches.within {
                    Some(next) => {
                        state = next;
                        continue;
                    }
                    None => return Ok(()),
                }
            }

            // Normal functioning against a feared transition: normal has priority.
            let competitor_of = |f: TransIdx| -> Vec<TransIdx> {
                enabled
                    .iter()
                    .copied()
                    .filter(|u| {
                        !is_feared(net, *u)
                            && net.transition(*u).kind != TransitionKind::Resume
                            && in_conflict(net, tokens, f, *u)
                    })
                    .collect()
            };
            let mut unopposed = Vec::new();
            let mut priority = None;
            for f in &feared {
                let rivals = competitor_of(*f);
                if rivals.is_empty() {
                    unopposed.push(*f);
                } else if priority.is_none() {
                    let free: Vec<TransIdx> =
                        rivals.iter().copied().filter(|u| !state.prohibited.contains(u)).collect();
                    if let Some(t) = sort_transitions(net, &free).first() {
                        priority = Some(*t);
                    }
                }
            }
            if let Some(t) = priority {
                let partners: BTreeSet<TransIdx> = feared
                    .iter()
                    .copied()
                    .filter(|f| in_conflict(net, tokens, t, *f) && !enabled.contains(f))
                    .collect();
                if let Ok(enriched) = enrich_marking_max(net, &state, &partners, &mut self.ordinals) {
                    state = enriched;
                }
                let tokens = &state.tokens;
                if usable.iter().any(|u| !is_feared(net, *u) && in_conflict(net, tokens, t, *u)) {
                    memorize_context(&mut self.stack, &state, t);
                }
                state = fire_transition(&state, net, t)?;
                continue;
            }

            // Feared transition with nothing in its way.
            if let Some(f) = unopposed.first().copied() {
                let enriched = enrich_marking_min(net, &state, f, &mut self.ordinals);
                if let Ok(enriched) = enriched {
                    if usable.iter().any(|u| *u != f) {
                        memorize_context(&mut self.stack, &enriched, f);
                    }
                    state = fire_transition(&enriched, net, f)?;
                    continue;
                }
            }

            // Ordinary progress.
            let ordinary: Vec<TransIdx> = usable.iter().copied().filter(|t| !is_feared(net, *t)).collect();
            let Some(&t) = sort_transitions(net, &ordinary).first() else {
                build_partial_order(&state, None, &mut self.ordinals);
                return Ok(());
            };
            if ordinary.iter().any(|u| in_conflict(net, tokens, t, *u)) {
                memorize_context(&mut self.stack, &state, t);
            }
            state = fire_transition(&state, net, t)?;
        }
    }

    /// Enabled, or enabled after injecting tokens into environment places.
    fn can_become_fireable(&self, state: &AnalysisState, f: TransIdx) -> bool {
        let pre = self.net.pre(f);
        let marked = pre.iter().filter(|p| state.tokens.is_marked(**p)).count();
        marked > 0 && pre.iter().all(|p| state.tokens.is_marked(*p) || self.environment.contains(p))
    }

    fn finish_feared(&mut self, state: &AnalysisState, place: PlaceIdx) {
        let producer = state.tokens.get(place).expect("feared place is marked").producer;
        let order = build_partial_order(state, Some(producer), &mut self.ordinals);
        self.found.push(Scenario {
            order,
            condition: state.condition,
            bifurcation: state.bifurcation,
            feared_place: place,
        });
    }
}
