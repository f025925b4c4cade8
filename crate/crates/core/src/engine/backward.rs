use std::collections::BTreeSet;

use crate::net::{fireable, in_conflict, invert_net, sort_transitions, PlaceIdx, SwpnNet, TransIdx};
use crate::state::{fire_transition, AnalysisState, FireError};

use super::{is_halting_place, EngineError};

/// Untimed exploration of the inverted net from `(i, target)` until every
/// frontier token rests in a normal or suspension place.
///
/// Returns the conditioner places reached over all branches. Environment
/// places (see [`SwpnNet::environment_places`]) are context, not conditioners.
pub fn back_reasoning(net: &SwpnNet, target: PlaceIdx, depth_limit: usize) -> Result<BTreeSet<PlaceIdx>, EngineError> {
    if net.normal_places.contains(&target) {
        return Ok([target].into());
    }
    let inverted = invert_net(net);
    let environment = net.environment_places();
    let mut conditioners = BTreeSet::new();
    let mut pending = vec![AnalysisState::initial(&inverted, [target])];

    while let Some(mut state) = pending.pop() {
        loop {
            if state.depth > depth_limit {
                return Err(EngineError::Nonterminating { limit: depth_limit });
            }
            let frontier: BTreeSet<PlaceIdx> =
                state.tokens.places().filter(|p| !is_halting_place(net, *p)).collect();
            let candidates: Vec<TransIdx> = if frontier.is_empty() || state.revisited {
                Vec::new()
            } else {
                fireable(&inverted, &state.tokens)
                    .into_iter()
                    .filter(|t| !state.prohibited.contains(t))
                    .filter(|t| inverted.pre(*t).iter().any(|p| frontier.contains(p)))
                    .collect()
            };
            let Some(&first) = sort_transitions(&inverted, &candidates).first() else {
                conditioners.extend(
                    state
                        .tokens
                        .places()
                        .filter(|p| is_halting_place(net, *p) && !environment.contains(p)),
                );
                break;
            };
            if candidates.iter().any(|u| in_conflict(&inverted, &state.tokens, first, *u)) {
                let mut alternative = state.clone();
                alternative.prohibited.insert(first);
                pending.push(alternative);
            }
            match fire_transition(&state, &inverted, first) {
                Ok(next) => state = next,
                Err(FireError::Unsafe { .. }) => {
                    state.prohibited.insert(first);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(conditioners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EventId;
    use crate::models::{load_bundled, BundledName};

    fn names(net: &SwpnNet, set: &BTreeSet<PlaceIdx>) -> Vec<String> {
        set.iter().map(|p| net.place(*p).id.clone()).collect()
    }

    #[test]
    fn common_block_conditioners() {
        let net = load_bundled(BundledName::AbsCommon).unwrap();
        let got = back_reasoning(&net, net.p("ED"), 40).unwrap();
        assert_eq!(names(&net, &got), ["stop-piston", "stop-software"]);
    }

    #[test]
    fn optional_block_conditioners() {
        let net = load_bundled(BundledName::AbsOptional).unwrap();
        let got = back_reasoning(&net, net.p("ED"), 40).unwrap();
        assert_eq!(names(&net, &got), ["stop-act", "stop-vlv"]);
    }

    #[test]
    fn normal_target_is_its_own_conditioner() {
        let net = load_bundled(BundledName::AbsCommon).unwrap();
        assert_eq!(back_reasoning(&net, net.p("piston"), 40).unwrap(), [net.p("piston")].into());
    }

    #[test]
    fn first_inverse_firing_moves_the_feared_token_to_stop_piston() {
        let net = load_bundled(BundledName::AbsCommon).unwrap();
        let inverted = invert_net(&net);
        let s0 = AnalysisState::initial(&inverted, [net.p("ED")]);
        let s1 = fire_transition(&s0, &inverted, net.t("t6")).unwrap();
        let t6 = EventId::firing(net.t("t6"), 1);
        assert_eq!(s1.render_events(&net), ["i", "t6"]);
        assert_eq!(s1.arcs, [(EventId::Initial, t6)].into());
        assert_eq!(s1.tokens.get(net.p("stop-piston")).map(|t| t.producer), Some(t6));
        assert!(!s1.tokens.is_marked(net.p("ED")));
    }
}
