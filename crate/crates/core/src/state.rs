//! Exploration-branch state and the firing rule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::event::{EventId, Token, TokenSet};
use crate::net::{PlaceIdx, PlaceKind, SwpnNet, TransIdx, TransitionKind, WatchIdx};
use crate::time::{Bound, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StopwatchStatus {
    Inactive,
    Running,
    /// The branch assumed the suspension outlived its limit.
    BranchedOver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlphaRelation {
    AtMost,
    Exceeds,
}

/// `alpha(w) <= bound` or `alpha(w) > bound` on a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlphaCondition {
    pub stopwatch: WatchIdx,
    pub relation: AlphaRelation,
    pub bound: Bound,
}

impl AlphaCondition {
    pub fn render(&self, net: &SwpnNet) -> String {
        let op = match self.relation {
            AlphaRelation::AtMost => "<=",
            AlphaRelation::Exceeds => ">",
        };
        format!("alpha({}) {op} {}", net.stopwatch(self.stopwatch).id, self.bound)
    }

    /// Whether a measured suspension duration satisfies the condition.
    pub fn holds_for(&self, duration: Time) -> bool {
        match (self.relation, self.bound) {
            (AlphaRelation::AtMost, Bound::Infinite) => true,
            (AlphaRelation::AtMost, Bound::Finite(b)) => duration <= b,
            (AlphaRelation::Exceeds, Bound::Infinite) => false,
            (AlphaRelation::Exceeds, Bound::Finite(b)) => duration > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BifurcationKind {
    /// Normal functioning against a feared-path transition.
    Bif1,
    /// Resumption of a suspended task against a feared-path transition.
    Bif2,
}

impl BifurcationKind {
    pub fn name(&self) -> &'static str {
        match self {
            BifurcationKind::Bif1 => "BIF1",
            BifurcationKind::Bif2 => "BIF2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bifurcation {
    pub kind: BifurcationKind,
    pub normal_branch: TransIdx,
    pub feared_branch: TransIdx,
    pub stopwatch: Option<WatchIdx>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("transition {0} is prohibited on this branch")]
    Prohibited(String),
    #[error("firing {transition} would put a second token in {place}")]
    Unsafe { transition: String, place: String },
}

/// One exploration branch of the front or back reasoning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisState {
    /// Current tokens `L_c`.
    pub tokens: TokenSet,
    /// Prohibited transitions `L_int`.
    pub prohibited: BTreeSet<TransIdx>,
    /// Events `E` in firing order.
    pub events: Vec<EventId>,
    /// Precedence arcs `A`.
    pub arcs: BTreeSet<(EventId, EventId)>,
    /// Enriched tokens `L_e`.
    pub enriched: Vec<Token>,
    /// Which event consumed each enriched token.
    pub enrichment_uses: Vec<(Token, EventId)>,
    pub stopwatches: BTreeMap<WatchIdx, StopwatchStatus>,
    /// Normal non-initial places visited `L_nni`.
    pub visited_normal: Vec<PlaceIdx>,
    pub condition: Option<AlphaCondition>,
    pub bifurcation: Option<Bifurcation>,
    /// Initial token places `L_i`.
    pub initial_places: BTreeSet<PlaceIdx>,
    pub occurrences: BTreeMap<TransIdx, u32>,
    /// Markings (ignoring enrichment tokens) seen so far on this branch.
    pub history: BTreeSet<Vec<PlaceIdx>>,
    /// Set when the last firing led back to a marking already in `history`.
    pub revisited: bool,
    pub depth: usize,
}

impl AnalysisState {
    /// Branch start with one `(i, p)` token per given place.
    pub fn initial(net: &SwpnNet, places: impl IntoIterator<Item = PlaceIdx>) -> Self {
        let places: BTreeSet<PlaceIdx> = places.into_iter().collect();
        let tokens = TokenSet::from_tokens(places.iter().map(|p| Token::new(EventId::Initial, *p)))
            .expect("distinct places");
        let stopwatches = (0..net.stopwatches.len()).map(|i| (WatchIdx(i), StopwatchStatus::Inactive)).collect();
        let mut state = Self {
            tokens,
            prohibited: BTreeSet::new(),
            events: vec![EventId::Initial],
            arcs: BTreeSet::new(),
            enriched: Vec::new(),
            enrichment_uses: Vec::new(),
            stopwatches,
            visited_normal: Vec::new(),
            condition: None,
            bifurcation: None,
            initial_places: places,
            occurrences: BTreeMap::new(),
            history: BTreeSet::new(),
            revisited: false,
            depth: 0,
        };
        state.history.insert(state.marking_key());
        state
    }

    /// Places holding a token not produced by an enrichment.
    pub fn marking_key(&self) -> Vec<PlaceIdx> {
        self.tokens.iter().filter(|t| !t.producer.is_enrichment()).map(|t| t.place).collect()
    }

    pub fn feared_marked(&self, net: &SwpnNet) -> Option<PlaceIdx> {
        self.tokens.places().find(|p| net.place(*p).kind == PlaceKind::Feared)
    }

    pub fn stopwatch(&self, w: WatchIdx) -> StopwatchStatus {
        self.stopwatches.get(&w).copied().unwrap_or(StopwatchStatus::Inactive)
    }

    pub fn render_events(&self, net: &SwpnNet) -> Vec<String> {
        self.events.iter().map(|e| e.render(net)).collect()
    }
}

impl fmt::Display for AnalysisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E={:?} Lc=#{} Lint=#{}", self.events, self.tokens.len(), self.prohibited.len())
    }
}

/// Fires `t`: consumes its input tokens (recording precedence arcs), produces
/// its output tokens, and updates the stopwatch of Stop/Resume transitions.
pub fn fire_transition(state: &AnalysisState, net: &SwpnNet, t: TransIdx) -> Result<AnalysisState, FireError> {
    let tr = net.transition(t);
    if state.prohibited.contains(&t) {
        return Err(FireError::Prohibited(tr.id.clone()));
    }
    if !tr.pre.iter().all(|p| state.tokens.is_marked(*p)) {
        return Err(FireError::NotEnabled(tr.id.clone()));
    }
    let mut next = state.clone();
    let occurrence = next.occurrences.get(&t).copied().unwrap_or(0) + 1;
    next.occurrences.insert(t, occurrence);
    let event = EventId::firing(t, occurrence);
    next.events.push(event);

    for p in &tr.pre {
        let token = next.tokens.remove(*p).expect("checked above");
        if token.producer.is_enrichment() {
            next.enrichment_uses.push((token, event));
        } else {
            next.arcs.insert((token.producer, event));
        }
    }
    for p in &tr.post {
        if next.tokens.insert(Token::new(event, *p)).is_err() {
            return Err(FireError::Unsafe { transition: tr.id.clone(), place: net.place(*p).id.clone() });
        }
        if net.place(*p).kind == PlaceKind::Normal && !next.initial_places.contains(p) {
            next.visited_normal.push(*p);
        }
    }
    if let Some(w) = tr.stopwatch {
        match tr.kind {
            TransitionKind::Stop => {
                next.stopwatches.insert(w, StopwatchStatus::Running);
            }
            TransitionKind::Resume => {
                next.stopwatches.insert(w, StopwatchStatus::Inactive);
            }
            _ => {}
        }
    }
    // A prohibition lasts while the prohibited transition stays enabled.
    next.prohibited.retain(|u| net.pre(*u).iter().all(|p| next.tokens.is_marked(*p)));
    next.depth += 1;
    next.revisited = !next.history.insert(next.marking_key());
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaVerdict {
    WithinBound,
    Exceeded,
    /// The suspension duration is unconstrained around the limit.
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("stopwatch is not running")]
    StopwatchInactive,
}

/// Compares the symbolic suspension duration of a running stopwatch with its
/// limit. The duration is at least `min_suspension` (the earliest repair) and
/// otherwise unconstrained.
pub fn check_transition(
    status: StopwatchStatus,
    min_suspension: Time,
    alpha_max: Bound,
) -> Result<AlphaVerdict, CheckError> {
    if status != StopwatchStatus::Running {
        return Err(CheckError::StopwatchInactive);
    }
    Ok(match alpha_max {
        Bound::Infinite => AlphaVerdict::WithinBound,
        Bound::Finite(limit) if min_suspension > limit => AlphaVerdict::Exceeded,
        Bound::Finite(_) => AlphaVerdict::Both,
    })
}
