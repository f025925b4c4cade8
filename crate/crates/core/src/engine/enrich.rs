//! Marking enrichment and its coherence check.

use std::collections::BTreeSet;

use crate::event::{Token, TokenSet};
use crate::net::{PlaceIdx, SwpnNet, TransIdx};
use crate::state::AnalysisState;

use super::{EngineError, Ordinals};

/// A token list is coherent when no declared place invariant is exceeded.
///
/// Token lists describe a fragment of the marking, so an invariant sum below
/// its constant can still be completed by places outside the fragment.
pub fn coherence_check(net: &SwpnNet, tokens: &TokenSet) -> bool {
    net.invariants.iter().all(|inv| {
        let sum = inv.places.iter().filter(|p| tokens.is_marked(**p)).count() as u32;
        sum <= inv.constant
    })
}

fn inject(
    net: &SwpnNet,
    state: &AnalysisState,
    places: &BTreeSet<PlaceIdx>,
    ordinals: &mut Ordinals,
) -> Result<AnalysisState, EngineError> {
    if places.is_empty() {
        return Ok(state.clone());
    }
    let mut next = state.clone();
    let mut counter = ordinals.clone();
    for p in places {
        let token = Token::new(counter.enrichment(), *p);
        next.tokens.insert(token).expect("only unmarked places are enriched");
        next.enriched.push(token);
        if !coherence_check(net, &next.tokens) {
            return Err(EngineError::IncoherentEnrichment { place: net.place(*p).id.clone() });
        }
    }
    *ordinals = counter;
    Ok(next)
}

fn unmarked_inputs<'a>(net: &'a SwpnNet, state: &'a AnalysisState, t: TransIdx) -> impl Iterator<Item = PlaceIdx> + 'a {
    net.pre(t).iter().copied().filter(move |p| !state.tokens.is_marked(*p))
}

/// Marks exactly the unmarked input places of `t`, making it fireable.
pub fn enrich_marking_min(
    net: &SwpnNet,
    state: &AnalysisState,
    t: TransIdx,
    ordinals: &mut Ordinals,
) -> Result<AnalysisState, EngineError> {
    let places: BTreeSet<PlaceIdx> = unmarked_inputs(net, state, t).collect();
    inject(net, state, &places, ordinals)
}

/// Marks every unmarked input place of every transition in `conflict_set`.
pub fn enrich_marking_max(
    net: &SwpnNet,
    state: &AnalysisState,
    conflict_set: &BTreeSet<TransIdx>,
    ordinals: &mut Ordinals,
) -> Result<AnalysisState, EngineError> {
    let places: BTreeSet<PlaceIdx> = conflict_set.iter().flat_map(|t| unmarked_inputs(net, state, *t)).collect();
    inject(net, state, &places, ordinals)
}
