//! Stopwatch Petri net modelling and feared-scenario extraction.
//!
//! A model is parsed from the textual format in [`dsl`], elaborated into a
//! [`SwpnNet`], and analysed by [`engine::run_feared_scenario_analysis`]. The
//! [`oracle`] module is an independent discretised timed simulator used to
//! cross-check the extracted scenarios.

pub mod dsl;
pub mod engine;
pub mod event;
pub mod models;
pub mod net;
pub mod oracle;
pub mod report;
pub mod state;
pub mod time;

pub use event::{EventId, Token, TokenSet};
pub use net::{
    fireable, in_conflict, invert_net, partially_fireable, sort_transitions, validate_net, NetBuilder,
    NetDiagnostic, PlaceIdx, PlaceKind, SwpnNet, TransIdx, TransitionKind, WatchIdx,
};
pub use state::{check_transition, fire_transition, AlphaCondition, AlphaVerdict, AnalysisState, StopwatchStatus};
pub use time::{Bound, Time, TimeInterval};
