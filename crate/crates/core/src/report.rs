//! JSON report and Graphviz export of analysis results.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::engine::{AnalysisReport, Scenario};
use crate::event::EventId;
use crate::net::SwpnNet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichedJson {
    pub event: String,
    pub place: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BifurcationJson {
    pub kind: String,
    pub stopwatch: Option<String>,
    pub normal_branch: String,
    pub feared_branch: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioJson {
    pub id: String,
    pub events: Vec<String>,
    pub arcs: Vec<[String; 2]>,
    pub enriched: Vec<EnrichedJson>,
    pub condition: Option<String>,
    pub bifurcation: Option<BifurcationJson>,
    pub feared_place: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportJson {
    pub model: String,
    pub target: String,
    pub conditioners: Vec<String>,
    pub scenarios: Vec<ScenarioJson>,
    pub explored_contexts: usize,
}

fn scenario_json(net: &SwpnNet, index: usize, s: &Scenario) -> ScenarioJson {
    ScenarioJson {
        id: format!("S{}", index + 1),
        events: s.order.rendered_events(net),
        arcs: s.order.rendered_arcs(net).into_iter().map(|(a, b)| [a, b]).collect(),
        enriched: s
            .order
            .enriched
            .iter()
            .map(|t| EnrichedJson { event: t.producer.render(net), place: net.place(t.place).id.clone() })
            .collect(),
        condition: s.condition.map(|c| c.render(net)),
        bifurcation: s.bifurcation.map(|b| BifurcationJson {
            kind: b.kind.name().to_string(),
            stopwatch: b.stopwatch.map(|w| net.stopwatch(w).id.clone()),
            normal_branch: net.transition(b.normal_branch).id.clone(),
            feared_branch: net.transition(b.feared_branch).id.clone(),
        }),
        feared_place: net.place(s.feared_place).id.clone(),
    }
}

pub fn report_json(net: &SwpnNet, report: &AnalysisReport) -> ReportJson {
    ReportJson {
        model: report.model.clone(),
        target: net.place(report.target).id.clone(),
        conditioners: report.conditioners.iter().map(|p| net.place(*p).id.clone()).collect(),
        scenarios: report.scenarios.iter().enumerate().map(|(i, s)| scenario_json(net, i, s)).collect(),
        explored_contexts: report.explored_contexts,
    }
}

/// Pretty-printed JSON with a trailing newline; identical inputs give
/// identical bytes.
pub fn render_report(net: &SwpnNet, report: &AnalysisReport) -> String {
    let mut text = serde_json::to_string_pretty(&report_json(net, report)).expect("report is serializable");
    text.push('\n');
    text
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One `digraph` per scenario. Enrichment tokens are dashed nodes linked to
/// the event that consumed them.
pub fn scenario_dot(net: &SwpnNet, id: &str, s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(id));
    let _ = writeln!(out, "  rankdir=LR;");
    let mut label = format!("{id}: {}", net.place(s.feared_place).id);
    if let Some(c) = s.condition {
        let _ = write!(label, " [{}]", c.render(net));
    }
    let _ = writeln!(out, "  label={};", quote(&label));
    let mut nodes: Vec<EventId> = s.order.events.clone();
    for (a, b) in &s.order.arcs {
        for e in [a, b] {
            if !nodes.contains(e) {
                nodes.push(*e);
            }
        }
    }
    for e in &nodes {
        let shape = match e {
            EventId::Initial => "circle",
            EventId::Sink(_) => "doublecircle",
            _ => "box",
        };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(&e.render(net)));
    }
    for (a, b) in &s.order.arcs {
        let _ = writeln!(out, "  {} -> {};", quote(&a.render(net)), quote(&b.render(net)));
    }
    for tok in &s.order.enriched {
        let name = format!("({}, {})", tok.producer.render(net), net.place(tok.place).id);
        let _ = writeln!(out, "  {} [shape=ellipse, style=dashed];", quote(&name));
        let consumer = s
            .order
            .events
            .iter()
            .find(|e| e.transition().is_some_and(|t| net.pre(t).contains(&tok.place)));
        if let Some(c) = consumer {
            let _ = writeln!(out, "  {} -> {} [style=dashed];", quote(&name), quote(&c.render(net)));
        }
    }
    out.push_str("}\n");
    out
}

/// Every scenario of the report as consecutive `digraph` blocks.
pub fn report_dot(net: &SwpnNet, report: &AnalysisReport) -> String {
    report
        .scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| scenario_dot(net, &format!("S{}", i + 1), s))
        .collect::<Vec<_>>()
        .join("\n")
}
