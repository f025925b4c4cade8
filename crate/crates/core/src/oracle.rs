//! Brute-force timed exploration on a discretized clock, used to cross-check
//! the symbolic scenario extraction.
//!
//! Firing rules on the tick grid:
//! * a transition fires once its clock reaches `ceil(min / step)` ticks, and
//!   time cannot pass beyond `floor(max / step)` while it stays enabled;
//! * Stop starts its stopwatch and freezes the clocks of the transitions it
//!   disables, Resume restores them and resets the stopwatch;
//! * Resume may fire when the suspension has lasted between its `min` and the
//!   stopwatch limit, and is never urgent: a failed component may stay stopped;
//! * a feared transition waits while a conflicting ordinary transition is
//!   enabled, or a conflicting Resume can still happen within the limit.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use thiserror::Error;

use crate::event::EventId;
use crate::net::{validate_net, NetDiagnostic, PlaceIdx, PlaceKind, SwpnNet, TransIdx, TransitionKind, WatchIdx};
use crate::time::{Bound, Time};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("step must be positive")]
    NonPositiveStep,
    #[error("invalid net: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNet(Vec<NetDiagnostic>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedFiring {
    pub event: EventId,
    pub time: Time,
}

/// A timed run that marks a feared place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FearedTrace {
    pub firings: Vec<TimedFiring>,
    pub feared_place: PlaceIdx,
    pub feared_event: EventId,
    /// Causal past of the feared event, itself and `Initial` included.
    pub causal_events: BTreeSet<EventId>,
    pub causal_arcs: BTreeSet<(EventId, EventId)>,
    /// Suspension length of every stopwatch running when the feared event fired.
    pub suspensions: BTreeMap<WatchIdx, Time>,
}

impl FearedTrace {
    /// Whether the firing order respects every arc between the given events.
    pub fn linearizes(&self, events: &[EventId], arcs: &BTreeSet<(EventId, EventId)>) -> bool {
        let position = |e: &EventId| -> Option<usize> {
            match e {
                EventId::Initial => Some(0),
                _ => self.firings.iter().position(|f| f.event == *e).map(|i| i + 1),
            }
        };
        events.iter().all(|e| position(e).is_some())
            && arcs
                .iter()
                .filter(|(a, b)| events.contains(a) && events.contains(b))
                .all(|(a, b)| position(a) < position(b))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    tokens: Vec<(PlaceIdx, EventId)>,
    occurrences: Vec<(TransIdx, u32)>,
    clocks: Vec<(TransIdx, i64)>,
    watches: Vec<(WatchIdx, i64)>,
    frozen: Vec<(WatchIdx, Vec<(TransIdx, i64)>)>,
    causal: BTreeSet<(EventId, EventId)>,
}

#[derive(Clone, Default)]
struct Run {
    tick: i64,
    tokens: BTreeMap<PlaceIdx, EventId>,
    occurrences: BTreeMap<TransIdx, u32>,
    clocks: BTreeMap<TransIdx, i64>,
    watches: BTreeMap<WatchIdx, i64>,
    frozen: BTreeMap<WatchIdx, BTreeMap<TransIdx, i64>>,
    preds: BTreeMap<EventId, Vec<EventId>>,
    firings: Vec<TimedFiring>,
}

struct Limits {
    step: Time,
    horizon: i64,
    min: Vec<i64>,
    max: Vec<Option<i64>>,
    max_firings: usize,
}

fn ceil_ticks(t: Time, step: Time) -> i64 {
    (t / step).ceil().to_integer()
}

fn floor_ticks(t: Time, step: Time) -> i64 {
    (t / step).floor().to_integer()
}

fn is_enabled(net: &SwpnNet, tokens: &BTreeMap<PlaceIdx, EventId>, t: TransIdx) -> bool {
    net.pre(t).iter().all(|p| tokens.contains_key(p))
}

fn causal_arcs(preds: &BTreeMap<EventId, Vec<EventId>>, roots: impl IntoIterator<Item = EventId>) -> BTreeSet<(EventId, EventId)> {
    let mut arcs = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut todo: Vec<EventId> = roots.into_iter().collect();
    while let Some(e) = todo.pop() {
        if !seen.insert(e) {
            continue;
        }
        for p in preds.get(&e).into_iter().flatten() {
            arcs.insert((*p, e));
            todo.push(*p);
        }
    }
    arcs
}

type CausalKey = (BTreeSet<EventId>, BTreeSet<(EventId, EventId)>);

struct Explorer<'a> {
    net: &'a SwpnNet,
    limits: Limits,
    visited: BTreeMap<Key, i64>,
    found: BTreeMap<CausalKey, FearedTrace>,
}

impl Explorer<'_> {
    fn alpha_max(&self, w: WatchIdx) -> Bound {
        self.net.stopwatch(w).alpha_max
    }

    fn elapsed(&self, ticks: i64) -> Time {
        self.limits.step * Ratio::from_integer(ticks)
    }

    /// A Resume of a running stopwatch that may still fire within the limit.
    fn resume_pending(&self, run: &Run, r: TransIdx) -> bool {
        let tr = self.net.transition(r);
        let Some(w) = tr.stopwatch else { return false };
        match run.watches.get(&w) {
            Some(ticks) => match self.alpha_max(w) {
                Bound::Infinite => true,
                Bound::Finite(a) => self.elapsed(*ticks) <= a,
            },
            None => false,
        }
    }

    fn blocked(&self, run: &Run, f: TransIdx) -> bool {
        let net = self.net;
        if net.transition(f).kind != TransitionKind::Feared {
            return false;
        }
        net.trans_indices().any(|u| {
            u != f
                && net.transition(u).kind != TransitionKind::Feared
                && is_enabled(net, &run.tokens, u)
                && net.pre(f).iter().any(|p| net.pre(u).contains(p))
                && (net.transition(u).kind != TransitionKind::Resume || self.resume_pending(run, u))
        })
    }

    /// Enabled transitions whose clock runs.
    fn active(&self, run: &Run) -> BTreeSet<TransIdx> {
        self.net
            .trans_indices()
            .filter(|t| is_enabled(self.net, &run.tokens, *t) && !self.blocked(run, *t))
            .collect()
    }

    fn can_fire(&self, run: &Run, t: TransIdx) -> bool {
        let tr = self.net.transition(t);
        if tr.kind == TransitionKind::Resume {
            let Some(w) = tr.stopwatch else { return false };
            let Some(ticks) = run.watches.get(&w) else { return false };
            let elapsed = self.elapsed(*ticks);
            elapsed >= tr.interval.min
                && match self.alpha_max(w) {
                    Bound::Infinite => true,
                    Bound::Finite(a) => elapsed <= a,
                }
        } else {
            run.clocks.get(&t).is_some_and(|c| *c >= self.limits.min[t.0])
        }
    }

    fn can_wait(&self, run: &Run, active: &BTreeSet<TransIdx>) -> bool {
        run.tick < self.limits.horizon
            && active.iter().all(|t| {
                self.net.transition(*t).kind == TransitionKind::Resume
                    || match self.limits.max[t.0] {
                        None => true,
                        Some(max) => run.clocks.get(t).copied().unwrap_or(0) < max,
                    }
            })
    }

    fn key(&self, run: &Run) -> Key {
        Key {
            tokens: run.tokens.iter().map(|(p, e)| (*p, *e)).collect(),
            occurrences: run.occurrences.iter().map(|(t, n)| (*t, *n)).collect(),
            clocks: run.clocks.iter().map(|(t, c)| (*t, *c)).collect(),
            watches: run.watches.iter().map(|(w, c)| (*w, *c)).collect(),
            frozen: run.frozen.iter().map(|(w, m)| (*w, m.iter().map(|(t, c)| (*t, *c)).collect())).collect(),
            causal: causal_arcs(&run.preds, run.tokens.values().copied()),
        }
    }

    fn fire(&self, run: &Run, t: TransIdx) -> Run {
        let net = self.net;
        let tr = net.transition(t);
        let before = self.active(run);
        let mut next = run.clone();
        let occurrence = next.occurrences.get(&t).copied().unwrap_or(0) + 1;
        next.occurrences.insert(t, occurrence);
        let event = EventId::firing(t, occurrence);
        let mut preds = Vec::new();
        for p in &tr.pre {
            preds.push(next.tokens.remove(p).expect("enabled"));
        }
        let intermediate = next.tokens.clone();
        for p in &tr.post {
            next.tokens.insert(*p, event);
        }
        next.preds.insert(event, preds);
        next.firings.push(TimedFiring { event, time: self.elapsed(run.tick) });

        let after = self.active(&next);
        let mut restored = BTreeMap::new();
        match (tr.kind, tr.stopwatch) {
            (TransitionKind::Stop, Some(w)) => {
                next.watches.insert(w, 0);
                let frozen: BTreeMap<TransIdx, i64> = before
                    .iter()
                    .filter(|u| **u != t && !is_enabled(net, &next.tokens, **u))
                    .filter_map(|u| run.clocks.get(u).map(|c| (*u, *c)))
                    .collect();
                next.frozen.insert(w, frozen);
            }
            (TransitionKind::Resume, Some(w)) => {
                next.watches.remove(&w);
                restored = next.frozen.remove(&w).unwrap_or_default();
            }
            _ => {}
        }
        next.clocks = after
            .iter()
            .filter(|u| net.transition(**u).kind != TransitionKind::Resume)
            .map(|u| {
                let newly = *u == t || !is_enabled(net, &intermediate, *u) || !before.contains(u);
                let clock = if newly {
                    restored.get(u).copied().unwrap_or(0)
                } else {
                    run.clocks.get(u).copied().unwrap_or(0)
                };
                (*u, clock)
            })
            .collect();
        next
    }

    fn record(&mut self, run: &Run, place: PlaceIdx) {
        let feared_event = run.tokens[&place];
        let causal_arcs = causal_arcs(&run.preds, [feared_event]);
        let mut causal_events: BTreeSet<EventId> = causal_arcs.iter().flat_map(|(a, b)| [*a, *b]).collect();
        causal_events.insert(feared_event);
        causal_events.insert(EventId::Initial);
        let suspensions = run.watches.iter().map(|(w, ticks)| (*w, self.elapsed(*ticks))).collect();
        self.found.entry((causal_events.clone(), causal_arcs.clone())).or_insert_with(|| FearedTrace {
            firings: run.firings.clone(),
            feared_place: place,
            feared_event,
            causal_events,
            causal_arcs,
            suspensions,
        });
    }

    fn explore(&mut self, start: Run) {
        let mut stack = vec![start];
        while let Some(run) = stack.pop() {
            if let Some((p, _)) = run.tokens.iter().find(|(p, _)| self.net.place(**p).kind == PlaceKind::Feared) {
                let p = *p;
                self.record(&run, p);
                continue;
            }
            if run.firings.len() > self.limits.max_firings {
                continue;
            }
            let key = self.key(&run);
            match self.visited.get(&key) {
                Some(tick) if *tick <= run.tick => continue,
                _ => {
                    self.visited.insert(key, run.tick);
                }
            }
            let active = self.active(&run);
            if self.can_wait(&run, &active) {
                let mut later = run.clone();
                later.tick += 1;
                for c in later.clocks.values_mut() {
                    *c += 1;
                }
                for w in later.watches.values_mut() {
                    *w += 1;
                }
                stack.push(later);
            }
            for t in active.iter().rev() {
                if self.can_fire(&run, *t) {
                    stack.push(self.fire(&run, *t));
                }
            }
        }
    }
}

/// Every distinct causal structure with which the net marks a feared place
/// within `horizon` time units, sampling time in multiples of `step`.
pub fn oracle_explore(net: &SwpnNet, horizon: Time, step: Time) -> Result<Vec<FearedTrace>, OracleError> {
    if step <= Ratio::from_integer(0) {
        return Err(OracleError::NonPositiveStep);
    }
    let diags = validate_net(net);
    if !diags.is_empty() {
        return Err(OracleError::InvalidNet(diags));
    }
    let horizon_ticks = floor_ticks(horizon, step).max(0);
    let limits = Limits {
        step,
        horizon: horizon_ticks,
        min: net.transitions.iter().map(|t| ceil_ticks(t.interval.min, step)).collect(),
        max: net.transitions.iter().map(|t| t.interval.max.as_finite().map(|m| floor_ticks(m, step))).collect(),
        max_firings: ((horizon_ticks as usize) + 1) * (net.transitions.len() + 1),
    };
    let mut explorer = Explorer { net, limits, visited: BTreeMap::new(), found: BTreeMap::new() };
    let mut start = Run {
        tokens: net.initial_places().into_iter().map(|p| (p, EventId::Initial)).collect(),
        ..Run::default()
    };
    start.clocks = explorer
        .active(&start)
        .into_iter()
        .filter(|t| net.transition(*t).kind != TransitionKind::Resume)
        .map(|t| (t, 0))
        .collect();
    explorer.explore(start);
    Ok(explorer.found.into_values().collect())
}

/// The inclusion-minimal causal event sets among `traces`.
pub fn minimal_event_sets(traces: &[FearedTrace]) -> BTreeSet<BTreeSet<EventId>> {
    let sets: BTreeSet<BTreeSet<EventId>> = traces.iter().map(|t| t.causal_events.clone()).collect();
    sets.iter().filter(|s| !sets.iter().any(|o| o != *s && o.is_subset(s))).cloned().collect()
}
