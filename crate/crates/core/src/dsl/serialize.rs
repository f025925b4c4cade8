use std::fmt::Write;

use crate::time::format_time;

use super::ModelDocument;

/// Canonical text of a document: blocks by name, and inside each block
/// places, stopwatches, transitions, arcs, invariants, each sorted by id.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut out = String::new();
    for (i, (name, block)) in doc.blocks.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "net {name} {{");
        for (id, p) in &block.places {
            let _ = write!(out, "  place {id} kind={}", p.kind.keyword());
            if p.init > 0 {
                let _ = write!(out, " init={}", p.init);
            }
            out.push('\n');
        }
        for (id, alpha) in &block.stopwatches {
            let _ = writeln!(out, "  stopwatch {id} alpha_max={alpha}");
        }
        for (id, t) in &block.transitions {
            let _ = write!(
                out,
                "  trans {id} interval=[{},{}] kind={}",
                format_time(&t.interval.min),
                t.interval.max,
                t.kind.keyword()
            );
            for (key, value) in [("watch", &t.watch), ("calls", &t.calls), ("label", &t.label)] {
                if let Some(v) = value {
                    let _ = write!(out, " {key}={v}");
                }
            }
            out.push('\n');
        }
        for (from, to) in &block.arcs {
            let _ = writeln!(out, "  arc {from} -> {to}");
        }
        for (places, constant) in &block.invariants {
            let _ = writeln!(out, "  invariant {} = {constant}", places.join(" + "));
        }
        if let Some(normal) = &block.normal {
            let list: Vec<&str> = normal.iter().map(String::as_str).collect();
            let _ = writeln!(out, "  normal {{ {} }}", list.join(", "));
        }
        out.push_str("}\n");
    }
    if let Some(a) = &doc.analysis {
        let mut parts = Vec::new();
        if let Some(t) = &a.target {
            parts.push(format!("target={t}"));
        }
        if !a.extra_targets.is_empty() {
            parts.push(format!("extra_targets={}", a.extra_targets.join(",")));
        }
        if let Some(d) = a.depth_limit {
            parts.push(format!("depth_limit={d}"));
        }
        if let Some(alpha) = a.alpha_max {
            parts.push(format!("alpha_max={alpha}"));
        }
        let _ = writeln!(out, "analysis {{ {} }}", parts.join(" "));
    }
    out
}
