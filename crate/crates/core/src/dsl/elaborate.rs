use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::net::{NetBuilder, NetDiagnostic, PlaceKind, SwpnNet};

use super::lexer::is_identifier;
use super::{BlockDef, ModelDocument, PlaceDecl, TransDecl};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElaborateError {
    #[error("the document declares no net block")]
    NoBlocks,
    #[error("composition error: {0}")]
    Composition(String),
    #[error("invalid net: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<NetDiagnostic>),
}

/// Flattens a document into one net.
///
/// A single block keeps its ids. With several blocks every id becomes
/// `block.id` and transitions display their local id. Call transitions gain
/// arcs to the initial places of the called block, which then start empty.
pub fn elaborate(doc: &ModelDocument) -> Result<SwpnNet, ElaborateError> {
    if doc.blocks.is_empty() {
        return Err(ElaborateError::NoBlocks);
    }
    let qualify = doc.blocks.len() > 1;
    let name_of = |block: &str, id: &str| if qualify { format!("{block}.{id}") } else { id.to_string() };
    let resolve = |block: &str, reference: &str| -> Result<String, ElaborateError> {
        match reference.split_once('.') {
            Some((b, id)) if doc.blocks.contains_key(b) => Ok(name_of(b, id)),
            Some((b, _)) => Err(ElaborateError::Composition(format!("reference '{reference}' names undefined net '{b}'"))),
            None => Ok(name_of(block, reference)),
        }
    };

    let mut called_initial: BTreeSet<(String, String)> = BTreeSet::new();
    let mut call_arcs: Vec<(String, String)> = Vec::new();
    for c in doc.compositions() {
        let callee = doc.blocks.get(&c.callee_block).ok_or_else(|| {
            ElaborateError::Composition(format!(
                "transition {} calls undefined net '{}'",
                name_of(&c.caller_block, &c.transition),
                c.callee_block
            ))
        })?;
        for (pid, p) in &callee.places {
            if p.init > 0 {
                called_initial.insert((c.callee_block.clone(), pid.clone()));
                call_arcs.push((name_of(&c.caller_block, &c.transition), name_of(&c.callee_block, pid)));
            }
        }
    }

    let mut builder = NetBuilder::new(net_name(doc));
    for (bname, block) in &doc.blocks {
        for (pid, p) in &block.places {
            let init = if called_initial.contains(&(bname.clone(), pid.clone())) { 0 } else { p.init };
            builder = builder.place(&name_of(bname, pid), p.kind, init);
        }
        for (wid, alpha) in &block.stopwatches {
            builder = builder.stopwatch(&name_of(bname, wid), *alpha);
        }
        for (tid, t) in &block.transitions {
            let label = match (&t.label, qualify) {
                (Some(l), _) => Some(l.clone()),
                (None, true) => Some(tid.clone()),
                (None, false) => None,
            };
            let watch = t.watch.as_ref().map(|w| name_of(bname, w));
            builder =
                builder.transition_full(&name_of(bname, tid), label.as_deref(), t.interval, t.kind, watch.as_deref());
        }
        for (from, to) in &block.arcs {
            builder = builder.arc(&resolve(bname, from)?, &resolve(bname, to)?);
        }
        for (places, constant) in &block.invariants {
            let names = places.iter().map(|p| resolve(bname, p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            builder = builder.invariant(&refs, *constant);
        }
        let normal: Vec<String> = match &block.normal {
            Some(set) => set.iter().map(|p| resolve(bname, p)).collect::<Result<_, _>>()?,
            None => block
                .places
                .iter()
                .filter(|(_, p)| p.kind == PlaceKind::Normal)
                .map(|(id, _)| name_of(bname, id))
                .collect(),
        };
        let refs: Vec<&str> = normal.iter().map(String::as_str).collect();
        builder = builder.normal(&refs);
    }
    for (t, p) in &call_arcs {
        builder = builder.arc(t, p);
    }
    builder.build().map_err(ElaborateError::Invalid)
}

fn net_name(doc: &ModelDocument) -> String {
    let called: BTreeSet<String> = doc.compositions().into_iter().map(|c| c.callee_block).collect();
    let roots: Vec<&str> = doc.blocks.keys().filter(|b| !called.contains(*b)).map(String::as_str).collect();
    if roots.is_empty() {
        doc.blocks.keys().cloned().collect::<Vec<_>>().join("+")
    } else {
        roots.join("+")
    }
}

fn sanitize(id: &str) -> String {
    let mut s: String =
        id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' }).collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic()) {
        s.insert(0, 'n');
    }
    s
}

/// Single-block document describing `net`. Ids that the grammar rejects
/// (such as qualified `block.id` names) are rewritten with `_`.
pub fn document_from_net(net: &SwpnNet) -> ModelDocument {
    let mut block = BlockDef::default();
    let place_name = |i: crate::net::PlaceIdx| sanitize(&net.place(i).id);
    for p in &net.places {
        block.places.insert(sanitize(&p.id), PlaceDecl { kind: p.kind, init: p.initial.min(1) });
    }
    for w in &net.stopwatches {
        block.stopwatches.insert(sanitize(&w.id), w.alpha_max);
    }
    for t in &net.transitions {
        let id = sanitize(&t.id);
        let label = t.label.as_ref().map(|l| sanitize(l)).filter(|l| *l != id && is_identifier(l));
        block.transitions.insert(
            id.clone(),
            TransDecl {
                interval: t.interval,
                kind: t.kind,
                watch: t.stopwatch.map(|w| sanitize(&net.stopwatch(w).id)),
                calls: None,
                label,
            },
        );
        for p in &t.pre {
            block.arcs.insert((place_name(*p), id.clone()));
        }
        for p in &t.post {
            block.arcs.insert((id.clone(), place_name(*p)));
        }
    }
    for inv in &net.invariants {
        block.invariants.insert((inv.places.iter().map(|p| place_name(*p)).collect(), inv.constant));
    }
    block.normal = Some(net.normal_places.iter().map(|p| place_name(*p)).collect());
    ModelDocument { blocks: BTreeMap::from([(sanitize(&net.name), block)]), analysis: None }
}
