//! Stopwatch Petri net structure and its structural operations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::event::TokenSet;
use crate::time::{Bound, TimeInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceIdx(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransIdx(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WatchIdx(pub usize);

/// Place colour in the model figures: white, blue and red.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceKind {
    Normal,
    Suspension,
    Feared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransitionKind {
    Normal,
    Stop,
    Resume,
    Feared,
    Call,
}

impl PlaceKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            PlaceKind::Normal => "normal",
            PlaceKind::Suspension => "suspension",
            PlaceKind::Feared => "feared",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "normal" => PlaceKind::Normal,
            "suspension" => PlaceKind::Suspension,
            "feared" => PlaceKind::Feared,
            _ => return None,
        })
    }
}

impl TransitionKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            TransitionKind::Normal => "normal",
            TransitionKind::Stop => "stop",
            TransitionKind::Resume => "resume",
            TransitionKind::Feared => "feared",
            TransitionKind::Call => "call",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "normal" => TransitionKind::Normal,
            "stop" => TransitionKind::Stop,
            "resume" => TransitionKind::Resume,
            "feared" => TransitionKind::Feared,
            "call" => TransitionKind::Call,
            _ => return None,
        })
    }

    pub fn needs_stopwatch(&self) -> bool {
        matches!(self, TransitionKind::Stop | TransitionKind::Resume)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub kind: PlaceKind,
    pub initial: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    /// Observable name used when rendering events; defaults to the id.
    pub label: Option<String>,
    pub interval: TimeInterval,
    pub kind: TransitionKind,
    pub stopwatch: Option<WatchIdx>,
    pub pre: Vec<PlaceIdx>,
    pub post: Vec<PlaceIdx>,
}

impl Transition {
    pub fn display_name(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwatchSpec {
    pub id: String,
    pub alpha_max: Bound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceInvariant {
    pub places: Vec<PlaceIdx>,
    pub constant: u32,
}

/// An immutable stopwatch Petri net.
#[derive(Debug, Clone)]
pub struct SwpnNet {
    pub name: String,
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
    pub stopwatches: Vec<StopwatchSpec>,
    pub invariants: Vec<PlaceInvariant>,
    pub normal_places: BTreeSet<PlaceIdx>,
    place_index: HashMap<String, PlaceIdx>,
    trans_index: HashMap<String, TransIdx>,
    watch_index: HashMap<String, WatchIdx>,
}

/// Structural equality ignores the lookup tables.
impl PartialEq for SwpnNet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.places == other.places
            && self.transitions == other.transitions
            && self.stopwatches == other.stopwatches
            && self.invariants == other.invariants
            && self.normal_places == other.normal_places
    }
}

impl Eq for SwpnNet {}

impl SwpnNet {
    pub fn from_parts(
        name: impl Into<String>,
        places: Vec<Place>,
        transitions: Vec<Transition>,
        stopwatches: Vec<StopwatchSpec>,
        invariants: Vec<PlaceInvariant>,
        normal_places: BTreeSet<PlaceIdx>,
    ) -> Self {
        // First declaration wins on duplicates; validate_net reports them.
        let mut place_index = HashMap::new();
        for (i, p) in places.iter().enumerate() {
            place_index.entry(p.id.clone()).or_insert(PlaceIdx(i));
        }
        let mut trans_index = HashMap::new();
        for (i, t) in transitions.iter().enumerate() {
            trans_index.entry(t.id.clone()).or_insert(TransIdx(i));
        }
        let mut watch_index = HashMap::new();
        for (i, w) in stopwatches.iter().enumerate() {
            watch_index.entry(w.id.clone()).or_insert(WatchIdx(i));
        }
        Self {
            name: name.into(),
            places,
            transitions,
            stopwatches,
            invariants,
            normal_places,
            place_index,
            trans_index,
            watch_index,
        }
    }

    pub fn place(&self, idx: PlaceIdx) -> &Place {
        &self.places[idx.0]
    }

    pub fn transition(&self, idx: TransIdx) -> &Transition {
        &self.transitions[idx.0]
    }

    pub fn stopwatch(&self, idx: WatchIdx) -> &StopwatchSpec {
        &self.stopwatches[idx.0]
    }

    pub fn place_idx(&self, id: &str) -> Option<PlaceIdx> {
        self.place_index.get(id).copied()
    }

    pub fn trans_idx(&self, id: &str) -> Option<TransIdx> {
        self.trans_index.get(id).copied()
    }

    pub fn watch_idx(&self, id: &str) -> Option<WatchIdx> {
        self.watch_index.get(id).copied()
    }

    /// Looks up a place and panics when it does not exist.
    pub fn p(&self, id: &str) -> PlaceIdx {
        self.place_idx(id).unwrap_or_else(|| panic!("no place '{id}' in net {}", self.name))
    }

    /// Looks up a transition and panics when it does not exist.
    pub fn t(&self, id: &str) -> TransIdx {
        self.trans_idx(id).unwrap_or_else(|| panic!("no transition '{id}' in net {}", self.name))
    }

    pub fn place_indices(&self) -> impl Iterator<Item = PlaceIdx> {
        (0..self.places.len()).map(PlaceIdx)
    }

    pub fn trans_indices(&self) -> impl Iterator<Item = TransIdx> {
        (0..self.transitions.len()).map(TransIdx)
    }

    pub fn pre(&self, t: TransIdx) -> &[PlaceIdx] {
        &self.transitions[t.0].pre
    }

    pub fn post(&self, t: TransIdx) -> &[PlaceIdx] {
        &self.transitions[t.0].post
    }

    /// Transitions that consume from `p`.
    pub fn consumers(&self, p: PlaceIdx) -> Vec<TransIdx> {
        self.trans_indices().filter(|t| self.pre(*t).contains(&p)).collect()
    }

    /// Transitions that produce into `p`.
    pub fn producers(&self, p: PlaceIdx) -> Vec<TransIdx> {
        self.trans_indices().filter(|t| self.post(*t).contains(&p)).collect()
    }

    pub fn initial_places(&self) -> BTreeSet<PlaceIdx> {
        self.place_indices().filter(|p| self.place(*p).initial > 0).collect()
    }

    pub fn feared_places(&self) -> BTreeSet<PlaceIdx> {
        self.place_indices().filter(|p| self.place(*p).kind == PlaceKind::Feared).collect()
    }

    /// Places that only condition feared transitions: initially marked,
    /// never produced, and consumed exclusively by Feared-kind transitions.
    /// Their tokens are supplied by marking enrichment during the analysis.
    pub fn environment_places(&self) -> BTreeSet<PlaceIdx> {
        self.place_indices()
            .filter(|p| {
                let consumers = self.consumers(*p);
                self.place(*p).initial > 0
                    && self.producers(*p).is_empty()
                    && !consumers.is_empty()
                    && consumers.iter().all(|t| self.transition(*t).kind == TransitionKind::Feared)
            })
            .collect()
    }

    /// Resume transition paired with `watch`, if any.
    pub fn resume_of(&self, watch: WatchIdx) -> Option<TransIdx> {
        self.trans_indices().find(|t| {
            let tr = self.transition(*t);
            tr.kind == TransitionKind::Resume && tr.stopwatch == Some(watch)
        })
    }

    /// Copy of the net with every stopwatch limit replaced.
    pub fn with_alpha_max(&self, alpha_max: Bound) -> SwpnNet {
        let mut net = self.clone();
        for w in &mut net.stopwatches {
            w.alpha_max = alpha_max;
        }
        net
    }

    /// Removes every Suspension place, every Stop/Resume transition, and every
    /// transition that consumed from a removed place (its enabling condition is
    /// no longer represented). Stopwatches disappear with their transitions.
    pub fn without_suspension(&self) -> SwpnNet {
        let removed_places: BTreeSet<PlaceIdx> = self
            .place_indices()
            .filter(|p| self.place(*p).kind == PlaceKind::Suspension)
            .collect();
        let keep_trans: Vec<TransIdx> = self
            .trans_indices()
            .filter(|t| {
                let tr = self.transition(*t);
                !tr.kind.needs_stopwatch() && !tr.pre.iter().any(|p| removed_places.contains(p))
            })
            .collect();

        let mut place_map = BTreeMap::new();
        let mut places = Vec::new();
        for p in self.place_indices().filter(|p| !removed_places.contains(p)) {
            place_map.insert(p, PlaceIdx(places.len()));
            places.push(self.place(p).clone());
        }
        let remap = |ps: &[PlaceIdx]| -> Vec<PlaceIdx> {
            ps.iter().filter_map(|p| place_map.get(p).copied()).collect()
        };
        let transitions = keep_trans
            .iter()
            .map(|t| {
                let tr = self.transition(*t);
                Transition {
                    stopwatch: None,
                    pre: remap(&tr.pre),
                    post: remap(&tr.post),
                    ..tr.clone()
                }
            })
            .collect();
        let invariants = self
            .invariants
            .iter()
            .filter(|inv| inv.places.iter().all(|p| place_map.contains_key(p)))
            .map(|inv| PlaceInvariant { places: remap(&inv.places), constant: inv.constant })
            .collect();
        let normal = self.normal_places.iter().filter_map(|p| place_map.get(p).copied()).collect();
        SwpnNet::from_parts(format!("{}-old", self.name), places, transitions, Vec::new(), invariants, normal)
    }
}

/// A structural problem found by [`validate_net`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetDiagnostic {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for NetDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

fn diag(subject: impl Into<String>, message: impl Into<String>) -> NetDiagnostic {
    NetDiagnostic { subject: subject.into(), message: message.into() }
}

/// Checks every structural invariant and returns one diagnostic per violation.
pub fn validate_net(net: &SwpnNet) -> Vec<NetDiagnostic> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for p in &net.places {
        if !seen.insert(p.id.as_str()) {
            out.push(diag(&p.id, "duplicate id"));
        }
        if p.initial > 1 {
            out.push(diag(&p.id, format!("initial marking {} is not 0 or 1", p.initial)));
        }
        if p.kind == PlaceKind::Feared && p.initial != 0 {
            out.push(diag(&p.id, "feared place must be initially unmarked"));
        }
    }
    for t in &net.transitions {
        if !seen.insert(t.id.as_str()) {
            out.push(diag(&t.id, "duplicate id"));
        }
        if !t.interval.is_well_formed() {
            out.push(diag(&t.id, format!("interval {} has min exceeding max", t.interval)));
        }
        match (t.kind.needs_stopwatch(), t.stopwatch) {
            (true, None) => out.push(diag(&t.id, format!("{} transition without a stopwatch", t.kind.keyword()))),
            (false, Some(_)) => out.push(diag(&t.id, "only stop and resume transitions carry a stopwatch")),
            _ => {}
        }
        if let Some(w) = t.stopwatch {
            if w.0 >= net.stopwatches.len() {
                out.push(diag(&t.id, "unknown stopwatch"));
            }
        }
        for (label, arcs) in [("input", &t.pre), ("output", &t.post)] {
            let mut arc_seen = BTreeSet::new();
            for p in arcs.iter() {
                if p.0 >= net.places.len() {
                    out.push(diag(&t.id, format!("{label} arc to missing place #{}", p.0)));
                } else if !arc_seen.insert(*p) {
                    out.push(diag(&t.id, format!("duplicate {label} arc with {}", net.place(*p).id)));
                }
            }
        }
    }
    let mut watch_ids = BTreeSet::new();
    for (i, w) in net.stopwatches.iter().enumerate() {
        if !watch_ids.insert(w.id.as_str()) {
            out.push(diag(&w.id, "duplicate stopwatch id"));
        }
        let users = |kind| {
            net.transitions
                .iter()
                .filter(|t| t.kind == kind && t.stopwatch == Some(WatchIdx(i)))
                .count()
        };
        let (stops, resumes) = (users(TransitionKind::Stop), users(TransitionKind::Resume));
        if stops != 1 || resumes != 1 {
            out.push(diag(
                &w.id,
                format!("stopwatch needs exactly one stop and one resume transition (found {stops} and {resumes})"),
            ));
        }
    }
    for inv in &net.invariants {
        if inv.places.iter().any(|p| p.0 >= net.places.len()) {
            out.push(diag("invariant", "refers to a missing place"));
            continue;
        }
        let sum: u32 = inv.places.iter().map(|p| net.place(*p).initial).sum();
        if sum != inv.constant {
            let names: Vec<&str> = inv.places.iter().map(|p| net.place(*p).id.as_str()).collect();
            out.push(diag(
                format!("invariant {}", names.join(" + ")),
                format!("initial marking sums to {sum}, expected {}", inv.constant),
            ));
        }
    }
    for p in &net.normal_places {
        match net.places.get(p.0) {
            None => out.push(diag("normal", format!("missing place #{}", p.0))),
            Some(place) if place.kind != PlaceKind::Normal => {
                out.push(diag(&place.id, "declared normal but its kind is not normal"))
            }
            _ => {}
        }
    }
    out
}

/// Transitions whose every input place holds a token.
pub fn fireable(net: &SwpnNet, tokens: &TokenSet) -> BTreeSet<TransIdx> {
    net.trans_indices()
        .filter(|t| net.pre(*t).iter().all(|p| tokens.is_marked(*p)))
        .collect()
}

/// Transitions with some but not all input places marked.
pub fn partially_fireable(net: &SwpnNet, tokens: &TokenSet) -> BTreeSet<TransIdx> {
    net.trans_indices()
        .filter(|t| {
            let pre = net.pre(*t);
            let marked = pre.iter().filter(|p| tokens.is_marked(**p)).count();
            marked > 0 && marked < pre.len()
        })
        .collect()
}

/// Effective conflict: `a` and `b` share an input place that is currently marked.
pub fn in_conflict(net: &SwpnNet, tokens: &TokenSet, a: TransIdx, b: TransIdx) -> bool {
    a != b && net.pre(a).iter().any(|p| tokens.is_marked(*p) && net.pre(b).contains(p))
}

/// Orders candidates by earliest firing date, then latest firing date, then id.
pub fn sort_transitions(net: &SwpnNet, candidates: &[TransIdx]) -> Vec<TransIdx> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| {
        let (ta, tb) = (net.transition(*a), net.transition(*b));
        ta.interval
            .min
            .cmp(&tb.interval.min)
            .then(ta.interval.max.cmp(&tb.interval.max))
            .then(ta.id.cmp(&tb.id))
    });
    sorted
}

/// Reverses every arc; everything else is kept.
pub fn invert_net(net: &SwpnNet) -> SwpnNet {
    let mut inverted = net.clone();
    for t in &mut inverted.transitions {
        std::mem::swap(&mut t.pre, &mut t.post);
    }
    inverted
}

/// String-keyed construction of a net; resolves references on build.
#[derive(Debug, Clone, Default)]
pub struct NetBuilder {
    name: String,
    places: Vec<Place>,
    transitions: Vec<(Transition, Option<String>)>,
    stopwatches: Vec<StopwatchSpec>,
    arcs: Vec<(String, String)>,
    invariants: Vec<(Vec<String>, u32)>,
    normal: Vec<String>,
}

impl NetBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn place(mut self, id: &str, kind: PlaceKind, initial: u32) -> Self {
        self.places.push(Place { id: id.to_string(), kind, initial });
        self
    }

    pub fn transition(self, id: &str, interval: TimeInterval, kind: TransitionKind) -> Self {
        self.transition_full(id, None, interval, kind, None)
    }

    pub fn transition_full(
        mut self,
        id: &str,
        label: Option<&str>,
        interval: TimeInterval,
        kind: TransitionKind,
        watch: Option<&str>,
    ) -> Self {
        let t = Transition {
            id: id.to_string(),
            label: label.map(str::to_string),
            interval,
            kind,
            stopwatch: None,
            pre: Vec::new(),
            post: Vec::new(),
        };
        self.transitions.push((t, watch.map(str::to_string)));
        self
    }

    pub fn stopwatch(mut self, id: &str, alpha_max: Bound) -> Self {
        self.stopwatches.push(StopwatchSpec { id: id.to_string(), alpha_max });
        self
    }

    pub fn arc(mut self, from: &str, to: &str) -> Self {
        self.arcs.push((from.to_string(), to.to_string()));
        self
    }

    pub fn invariant(mut self, places: &[&str], constant: u32) -> Self {
        self.invariants.push((places.iter().map(|s| s.to_string()).collect(), constant));
        self
    }

    pub fn normal(mut self, places: &[&str]) -> Self {
        self.normal.extend(places.iter().map(|s| s.to_string()));
        self
    }

    /// Builds the net without validating it. Unresolvable references are
    /// dropped and reported.
    pub fn build_unchecked(self) -> (SwpnNet, Vec<NetDiagnostic>) {
        let mut out = Vec::new();
        let place_ids: HashMap<&str, PlaceIdx> = self
            .places
            .iter()
            .enumerate()
            .rev()
            .map(|(i, p)| (p.id.as_str(), PlaceIdx(i)))
            .collect();
        let trans_ids: HashMap<&str, TransIdx> = self
            .transitions
            .iter()
            .enumerate()
            .rev()
            .map(|(i, (t, _))| (t.id.as_str(), TransIdx(i)))
            .collect();
        let watch_ids: HashMap<&str, WatchIdx> = self
            .stopwatches
            .iter()
            .enumerate()
            .rev()
            .map(|(i, w)| (w.id.as_str(), WatchIdx(i)))
            .collect();

        let mut transitions: Vec<Transition> = Vec::with_capacity(self.transitions.len());
        for (mut t, watch) in self.transitions.iter().cloned() {
            if let Some(w) = watch {
                match watch_ids.get(w.as_str()) {
                    Some(idx) => t.stopwatch = Some(*idx),
                    None => out.push(diag(&t.id, format!("unknown stopwatch '{w}'"))),
                }
            }
            transitions.push(t);
        }
        for (from, to) in &self.arcs {
            match (place_ids.get(from.as_str()), trans_ids.get(to.as_str()), trans_ids.get(from.as_str()), place_ids.get(to.as_str())) {
                (Some(p), Some(t), _, _) => transitions[t.0].pre.push(*p),
                (_, _, Some(t), Some(p)) => transitions[t.0].post.push(*p),
                _ => out.push(diag(format!("arc {from} -> {to}"), "endpoint does not exist or arc is not place/transition")),
            }
        }
        let mut invariants = Vec::new();
        for (names, constant) in &self.invariants {
            let resolved: Option<Vec<PlaceIdx>> = names.iter().map(|n| place_ids.get(n.as_str()).copied()).collect();
            match resolved {
                Some(places) => invariants.push(PlaceInvariant { places, constant: *constant }),
                None => out.push(diag(format!("invariant {}", names.join(" + ")), "refers to a missing place")),
            }
        }
        let mut normal = BTreeSet::new();
        for n in &self.normal {
            match place_ids.get(n.as_str()) {
                Some(p) => {
                    normal.insert(*p);
                }
                None => out.push(diag(n, "normal place does not exist")),
            }
        }
        let net = SwpnNet::from_parts(self.name, self.places, transitions, self.stopwatches, invariants, normal);
        (net, out)
    }

    pub fn build(self) -> Result<SwpnNet, Vec<NetDiagnostic>> {
        let (net, mut diags) = self.build_unchecked();
        diags.extend(validate_net(&net));
        if diags.is_empty() {
            Ok(net)
        } else {
            Err(diags)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{EventId, Token};

    fn tiny() -> NetBuilder {
        NetBuilder::new("tiny")
            .place("a", PlaceKind::Normal, 1)
            .place("b", PlaceKind::Normal, 0)
            .place("c", PlaceKind::Normal, 0)
            .transition("x", TimeInterval::closed(2, 4), TransitionKind::Normal)
            .transition("y", TimeInterval::closed(2, 4), TransitionKind::Normal)
            .transition("z", TimeInterval::closed(1, 1), TransitionKind::Normal)
            .arc("a", "x")
            .arc("x", "b")
            .arc("a", "y")
            .arc("b", "y")
            .arc("c", "z")
            .normal(&["a", "b", "c"])
    }

    fn marked(net: &SwpnNet, places: &[&str]) -> TokenSet {
        TokenSet::from_tokens(places.iter().map(|p| Token::new(EventId::Initial, net.p(p)))).unwrap()
    }

    #[test]
    fn stop_without_stopwatch_is_one_diagnostic() {
        let (net, unresolved) = NetBuilder::new("n")
            .place("p", PlaceKind::Normal, 1)
            .transition("ts", TimeInterval::closed(1, 2), TransitionKind::Stop)
            .arc("p", "ts")
            .build_unchecked();
        assert!(unresolved.is_empty());
        let diags = validate_net(&net);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].subject, "ts");
    }

    #[test]
    fn reversed_interval_is_one_diagnostic() {
        let (net, _) = NetBuilder::new("n")
            .place("p", PlaceKind::Normal, 1)
            .transition("t", TimeInterval::closed(5, 2), TransitionKind::Normal)
            .arc("p", "t")
            .build_unchecked();
        let diags = validate_net(&net);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("[5,2]"));
    }

    #[test]
    fn dangling_arc_is_reported_by_builder() {
        let err = NetBuilder::new("n").place("p", PlaceKind::Normal, 0).arc("p", "nope").build().unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].subject.contains("nope"));
    }

    #[test]
    fn feared_place_must_start_empty_and_invariants_hold_initially() {
        let (net, _) = NetBuilder::new("n")
            .place("ok", PlaceKind::Normal, 0)
            .place("bad", PlaceKind::Feared, 1)
            .invariant(&["ok", "bad"], 0)
            .build_unchecked();
        let diags = validate_net(&net);
        assert_eq!(diags.len(), 2, "{diags:?}");
    }

    #[test]
    fn classification_of_enabling() {
        let net = tiny().build().unwrap();
        let m = marked(&net, &["a"]);
        assert_eq!(fireable(&net, &m), [net.t("x")].into());
        assert_eq!(partially_fireable(&net, &m), [net.t("y")].into());
        assert!(fireable(&net, &TokenSet::new()).is_empty());
        assert!(partially_fireable(&net, &TokenSet::new()).is_empty());
        let all = marked(&net, &["a", "b", "c"]);
        assert!(partially_fireable(&net, &all).is_empty());
    }

    #[test]
    fn conflict_needs_a_marked_shared_place() {
        let net = tiny().build().unwrap();
        assert!(in_conflict(&net, &marked(&net, &["a"]), net.t("x"), net.t("y")));
        assert!(!in_conflict(&net, &marked(&net, &["b"]), net.t("x"), net.t("y")));
        assert!(!in_conflict(&net, &marked(&net, &["a", "c"]), net.t("x"), net.t("z")));
    }

    #[test]
    fn sort_by_min_then_max_then_id() {
        let net = NetBuilder::new("s")
            .transition("t31", TimeInterval::closed(6, 9), TransitionKind::Normal)
            .transition("t11", TimeInterval::closed(1, 2), TransitionKind::Normal)
            .transition("a", TimeInterval::closed(5, 9), TransitionKind::Normal)
            .transition("b", TimeInterval::closed(5, 7), TransitionKind::Normal)
            .transition("c", TimeInterval::closed(2, 4), TransitionKind::Normal)
            .transition("d", TimeInterval::closed(2, 4), TransitionKind::Normal)
            .build()
            .unwrap();
        let ids = |v: Vec<TransIdx>| v.iter().map(|t| net.transition(*t).id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(sort_transitions(&net, &[net.t("t31"), net.t("t11")])), ["t11", "t31"]);
        assert_eq!(ids(sort_transitions(&net, &[net.t("a"), net.t("b")])), ["b", "a"]);
        assert_eq!(ids(sort_transitions(&net, &[net.t("d"), net.t("c")])), ["c", "d"]);
    }

    #[test]
    fn inversion_swaps_arcs_and_is_an_involution() {
        let net = tiny().build().unwrap();
        let inv = invert_net(&net);
        assert_eq!(inv.pre(net.t("x")), &[net.p("b")]);
        assert_eq!(inv.post(net.t("x")), &[net.p("a")]);
        assert_eq!(invert_net(&inv), net);
        let bare = NetBuilder::new("bare").place("p", PlaceKind::Normal, 0).build().unwrap();
        assert_eq!(invert_net(&bare), bare);
    }
}
