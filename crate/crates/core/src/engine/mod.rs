//! The four-step feared-scenario method: identify normal states, identify
//! targets, reason backwards to the conditioner states, then reason forwards
//! through bifurcations to extract partial-order scenarios.

mod backward;
mod enrich;
mod front;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::event::{EventId, Token};
use crate::net::{validate_net, NetDiagnostic, PlaceIdx, PlaceKind, SwpnNet, TransIdx};
use crate::state::{AlphaCondition, AnalysisState, Bifurcation, CheckError, FireError};
use crate::time::Bound;

pub use backward::back_reasoning;
pub use enrich::{coherence_check, enrich_marking_max, enrich_marking_min};
pub use front::{
    build_partial_order, classify_bifurcation, classify_transitions, front_reasoning, front_reasoning_observed,
    memorize_context, specify_transition, SpecifiedBranches,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("the model declares no normal places")]
    EmptyNormalSet,
    #[error("no feared place and no extra target")]
    NoTarget,
    #[error("unknown place '{0}'")]
    UnknownPlace(String),
    #[error("exploration exceeded the depth limit of {limit} firings per branch")]
    Nonterminating { limit: usize },
    #[error("enrichment of {place} violates a declared place invariant")]
    IncoherentEnrichment { place: String },
    #[error("suspension of {0} exceeds its limit but no alternative transition exists")]
    NoAlternative(String),
    #[error("invalid net: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNet(Vec<NetDiagnostic>),
    #[error(transparent)]
    Fire(#[from] FireError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Global enrichment and sink counters of one analysis run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordinals {
    pub next_enrichment: u32,
    pub next_sink: u32,
}

impl Default for Ordinals {
    fn default() -> Self {
        Self { next_enrichment: 1, next_sink: 1 }
    }
}

impl Ordinals {
    pub fn enrichment(&mut self) -> EventId {
        let e = EventId::Enrichment(self.next_enrichment);
        self.next_enrichment += 1;
        e
    }

    pub fn sink(&mut self) -> EventId {
        let f = EventId::Sink(self.next_sink);
        self.next_sink += 1;
        f
    }
}

/// A pending branch snapshot.
#[derive(Debug, Clone)]
pub struct Context {
    pub snapshot: AnalysisState,
    pub step_counter: u32,
}

/// LIFO store of pending contexts.
#[derive(Debug, Clone, Default)]
pub struct ContextStack {
    pending: Vec<Context>,
}

impl ContextStack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, context: Context) {
        self.pending.push(context);
    }

    pub fn pop(&mut self) -> Option<Context> {
        self.pending.pop()
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn peek(&self) -> Option<&Context> {
        self.pending.last()
    }
}

/// `TfscEc`, `Tpfsc`, `Tfcpf` and `Tpfc` for one marking.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionClassification {
    /// Fireable, not in conflict with a partially fireable transition.
    pub tfscec: BTreeSet<TransIdx>,
    /// Partially fireable, not in conflict.
    pub tpfsc: BTreeSet<TransIdx>,
    /// Fireable, in conflict with a partially fireable transition.
    pub tfcpf: BTreeSet<TransIdx>,
    /// Partially fireable, in conflict with another transition.
    pub tpfc: BTreeSet<TransIdx>,
}

/// Events and precedence arcs of one branch, closed by sink events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrder {
    /// Non-sink events in ascending order.
    pub events: Vec<EventId>,
    pub arcs: BTreeSet<(EventId, EventId)>,
    pub enriched: Vec<Token>,
}

impl PartialOrder {
    pub fn rendered_events(&self, net: &SwpnNet) -> Vec<String> {
        self.events.iter().map(|e| e.render(net)).collect()
    }

    pub fn rendered_arcs(&self, net: &SwpnNet) -> Vec<(String, String)> {
        self.arcs.iter().map(|(a, b)| (a.render(net), b.render(net))).collect()
    }

    /// True when the arcs admit a topological order.
    pub fn is_acyclic(&self) -> bool {
        let mut nodes: BTreeSet<EventId> = self.events.iter().copied().collect();
        nodes.extend(self.arcs.iter().flat_map(|(a, b)| [*a, *b]));
        let mut remaining = self.arcs.clone();
        let mut alive = nodes;
        loop {
            let sources: Vec<EventId> =
                alive.iter().copied().filter(|n| !remaining.iter().any(|(_, b)| b == n)).collect();
            if sources.is_empty() {
                return alive.is_empty();
            }
            for s in sources {
                alive.remove(&s);
                remaining.retain(|(a, _)| *a != s);
            }
        }
    }

    /// Events without a predecessor among the non-sink events.
    pub fn sources(&self) -> Vec<EventId> {
        self.events.iter().copied().filter(|e| !self.arcs.iter().any(|(_, b)| b == e)).collect()
    }
}

/// An extracted feared scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub order: PartialOrder,
    pub condition: Option<AlphaCondition>,
    pub bifurcation: Option<Bifurcation>,
    pub feared_place: PlaceIdx,
}

/// Events, arcs, enriched places, condition and bifurcation as text.
pub(crate) type ShapeKey = (Vec<String>, Vec<(String, String)>, Vec<String>, String, String);

impl Scenario {
    /// The feared transition firing that closes the scenario.
    pub fn feared_event(&self, net: &SwpnNet) -> Option<EventId> {
        self.order
            .events
            .iter()
            .rev()
            .copied()
            .find(|e| e.transition().is_some_and(|t| net.post(t).contains(&self.feared_place)))
    }

    /// Structural identity, ignoring enrichment and sink ordinals.
    pub(crate) fn shape_key(&self, net: &SwpnNet) -> ShapeKey {
        let strip = |e: &EventId| match e {
            EventId::Sink(_) => "f".to_string(),
            EventId::Enrichment(_) => "e".to_string(),
            other => other.render(net),
        };
        let mut arcs: Vec<(String, String)> = self.order.arcs.iter().map(|(a, b)| (strip(a), strip(b))).collect();
        arcs.sort();
        let mut enriched: Vec<String> = self.order.enriched.iter().map(|t| net.place(t.place).id.clone()).collect();
        enriched.sort();
        (
            self.order.events.iter().map(|e| e.render(net)).collect(),
            arcs,
            enriched,
            self.condition.map(|c| c.render(net)).unwrap_or_default(),
            self.bifurcation
                .map(|b| format!("{}:{:?}:{}:{}", b.kind.name(), b.stopwatch, b.normal_branch.0, b.feared_branch.0))
                .unwrap_or_default(),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisConfig {
    /// Target place reported as the main feared state; defaults to the first feared place.
    pub target: Option<String>,
    /// Places causally related to the feared state, analysed as extra targets.
    pub extra_targets: Vec<String>,
    /// Overrides every stopwatch limit.
    pub alpha_max: Option<Bound>,
    /// Maximum firings per branch; defaults to twice the number of transitions.
    pub depth_limit: Option<usize>,
}

impl AnalysisConfig {
    pub fn depth_limit_for(&self, net: &SwpnNet) -> usize {
        self.depth_limit.unwrap_or(2 * net.transitions.len()).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub model: String,
    pub target: PlaceIdx,
    pub targets: BTreeSet<PlaceIdx>,
    pub conditioners: BTreeSet<PlaceIdx>,
    pub scenarios: Vec<Scenario>,
    pub explored_contexts: usize,
}

/// Step 1: the declared normal places.
pub fn identify_normal_states(net: &SwpnNet) -> Result<BTreeSet<PlaceIdx>, EngineError> {
    if net.normal_places.is_empty() {
        return Err(EngineError::EmptyNormalSet);
    }
    Ok(net.normal_places.clone())
}

/// Step 2: feared places plus the user-supplied related states.
pub fn identify_targets(net: &SwpnNet, extra: &BTreeSet<PlaceIdx>) -> Result<BTreeSet<PlaceIdx>, EngineError> {
    let mut targets = net.feared_places();
    targets.extend(extra.iter().copied());
    if targets.is_empty() {
        return Err(EngineError::NoTarget);
    }
    Ok(targets)
}

fn resolve(net: &SwpnNet, id: &str) -> Result<PlaceIdx, EngineError> {
    net.place_idx(id).ok_or_else(|| EngineError::UnknownPlace(id.to_string()))
}

/// Runs the whole method on a net and returns the canonical report.
pub fn run_feared_scenario_analysis(net: &SwpnNet, config: &AnalysisConfig) -> Result<AnalysisReport, EngineError> {
    run_observed(net, config, &mut |_, _| {})
}

/// Same as [`run_feared_scenario_analysis`], calling `observer` on every state
/// classified during the forward reasoning.
pub fn run_observed(
    net: &SwpnNet,
    config: &AnalysisConfig,
    observer: &mut dyn FnMut(&AnalysisState, &TransitionClassification),
) -> Result<AnalysisReport, EngineError> {
    let diags = validate_net(net);
    if !diags.is_empty() {
        return Err(EngineError::InvalidNet(diags));
    }
    let owned;
    let net = match config.alpha_max {
        Some(bound) => {
            owned = net.with_alpha_max(bound);
            &owned
        }
        None => net,
    };
    identify_normal_states(net)?;
    let extra = config.extra_targets.iter().map(|id| resolve(net, id)).collect::<Result<BTreeSet<_>, _>>()?;
    let targets = identify_targets(net, &extra)?;
    let target = match &config.target {
        Some(id) => resolve(net, id)?,
        None => net
            .feared_places()
            .into_iter()
            .next()
            .or_else(|| targets.iter().next().copied())
            .ok_or(EngineError::NoTarget)?,
    };
    let depth_limit = config.depth_limit_for(net);
    let mut conditioners = BTreeSet::new();
    for t in &targets {
        conditioners.extend(back_reasoning(net, *t, depth_limit)?);
    }
    let (scenarios, explored_contexts) = front_reasoning_observed(net, &conditioners, depth_limit, observer)?;
    Ok(AnalysisReport {
        model: net.name.clone(),
        target,
        targets,
        conditioners,
        scenarios,
        explored_contexts,
    })
}

pub(crate) fn is_feared(net: &SwpnNet, t: TransIdx) -> bool {
    net.transition(t).kind == crate::net::TransitionKind::Feared
}

pub(crate) fn is_halting_place(net: &SwpnNet, p: PlaceIdx) -> bool {
    net.normal_places.contains(&p) || net.place(p).kind == PlaceKind::Suspension
}
