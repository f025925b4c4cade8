//! Textual model format: parser with positioned diagnostics, canonical
//! serializer, and elaboration into a validated [`SwpnNet`](crate::net::SwpnNet).
//!
//! ```text
//! net common {
//!   place piston kind=normal init=1
//!   place stop-piston kind=suspension
//!   stopwatch piston alpha_max=13
//!   trans t11 interval=[1,2] kind=stop watch=piston
//!   arc piston -> t11
//!   arc t11 -> stop-piston
//!   normal { piston }
//! }
//! analysis { target=ED }
//! ```

mod elaborate;
mod lexer;
mod parser;
mod serialize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::net::{PlaceKind, TransitionKind};
use crate::time::{Bound, TimeInterval};

pub use elaborate::{document_from_net, elaborate, ElaborateError};
pub use parser::{parse_model, ParseResult};
pub use serialize::serialize_model;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceDecl {
    pub kind: PlaceKind,
    pub init: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransDecl {
    pub interval: TimeInterval,
    pub kind: TransitionKind,
    pub watch: Option<String>,
    pub calls: Option<String>,
    /// Display name used in scenarios; defaults to the id.
    pub label: Option<String>,
}

/// One `net <name> { ... }` block. Ids are local; arc and invariant
/// endpoints may reference another block as `block.id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockDef {
    pub places: BTreeMap<String, PlaceDecl>,
    pub stopwatches: BTreeMap<String, Bound>,
    pub transitions: BTreeMap<String, TransDecl>,
    /// `(from, to)` pairs, place to transition or transition to place.
    pub arcs: BTreeSet<(String, String)>,
    pub invariants: BTreeSet<(Vec<String>, u32)>,
    /// Explicit normal-place set; all `normal`-kind places when absent.
    pub normal: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisDef {
    pub target: Option<String>,
    pub extra_targets: Vec<String>,
    pub depth_limit: Option<usize>,
    pub alpha_max: Option<Bound>,
}

/// A Call transition linking a block to the block it activates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Composition {
    pub caller_block: String,
    pub transition: String,
    pub callee_block: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelDocument {
    pub blocks: BTreeMap<String, BlockDef>,
    pub analysis: Option<AnalysisDef>,
}

impl ModelDocument {
    pub fn compositions(&self) -> Vec<Composition> {
        self.blocks
            .iter()
            .flat_map(|(name, block)| {
                block.transitions.iter().filter_map(move |(id, t)| {
                    t.calls.as_ref().map(|callee| Composition {
                        caller_block: name.clone(),
                        transition: id.clone(),
                        callee_block: callee.clone(),
                    })
                })
            })
            .collect()
    }

    /// Analysis settings as an engine configuration.
    pub fn analysis_config(&self) -> crate::engine::AnalysisConfig {
        let a = self.analysis.clone().unwrap_or_default();
        crate::engine::AnalysisConfig {
            target: a.target,
            extra_targets: a.extra_targets,
            alpha_max: a.alpha_max,
            depth_limit: a.depth_limit,
        }
    }
}
