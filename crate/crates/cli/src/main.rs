//! `swpn`: validate, analyse and export stopwatch Petri net models.
//!
//! Exit status: 0 on success (also when no scenario is found), 1 when the model
//! has diagnostics, 2 when the analysis itself fails or the command line is
//! malformed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use swpn_core::dsl::{self, document_from_net, serialize_model, AnalysisDef, ModelDocument};
use swpn_core::engine::{run_feared_scenario_analysis, AnalysisConfig};
use swpn_core::models::{bundled_document, load_bundled, BundledName};
use swpn_core::oracle::oracle_explore;
use swpn_core::report::{render_report, scenario_dot};
use swpn_core::time::{format_time, parse_time};
use swpn_core::{invert_net, validate_net, Bound, SwpnNet, Time};

#[derive(Parser)]
#[command(name = "swpn", version, about = "Feared-scenario extraction for stopwatch Petri nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, elaborate and check a model.
    Validate(Input),
    /// Extract the feared scenarios and write the JSON report.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        options: AnalysisOptions,
        /// Report file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the inverted net (every arc reversed) as a model file.
    Invert {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive discretised timed exploration up to a horizon.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "40")]
        horizon: String,
        #[arg(long, default_value = "1")]
        step: String,
        /// Replaces every stopwatch limit before exploring.
        #[arg(long)]
        alpha_max: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Analyse and write one Graphviz file per scenario.
    ExportDot {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        options: AnalysisOptions,
        /// Directory receiving S1.dot, S2.dot, ...
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Model file.
    path: Option<PathBuf>,
    /// Bundled model: abs-common, abs-optional, abs-composed or abs-old.
    #[arg(long)]
    bundled: Option<String>,
}

#[derive(Args)]
struct AnalysisOptions {
    #[arg(long)]
    target: Option<String>,
    /// Comma-separated places analysed as additional targets.
    #[arg(long, value_delimiter = ',')]
    extra_targets: Vec<String>,
    /// Replaces every stopwatch limit (a rational or `inf`).
    #[arg(long)]
    alpha_max: Option<String>,
    #[arg(long)]
    depth_limit: Option<usize>,
}

/// A failure and the exit status it maps to.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn diagnostics(message: impl Into<String>) -> Self {
        Self { status: 1, message: message.into() }
    }

    fn analysis(message: impl Into<String>) -> Self {
        Self { status: 2, message: message.into() }
    }
}

fn load(input: &Input) -> Result<(SwpnNet, ModelDocument), Failure> {
    if let Some(name) = &input.bundled {
        let name: BundledName = name.parse().map_err(|e: swpn_core::models::ModelError| Failure::diagnostics(e.to_string()))?;
        let net = load_bundled(name).map_err(|e| Failure::diagnostics(e.to_string()))?;
        let doc = bundled_document(name).map_err(|e| Failure::diagnostics(e.to_string()))?;
        return Ok((net, doc));
    }
    let path = input.path.as_ref().expect("clap enforces one input");
    let source = fs::read_to_string(path)
        .map_err(|e| Failure::diagnostics(format!("{}: cannot read: {e}", path.display())))?;
    let parsed = dsl::parse_model(&source);
    let mut messages = Vec::new();
    for d in &parsed.diagnostics {
        messages.push(format!("{}:{d}", path.display()));
    }
    let Some(doc) = parsed.document else {
        return Err(Failure::diagnostics(messages.join("\n")));
    };
    for m in &messages {
        eprintln!("{m}");
    }
    let net = dsl::elaborate(&doc).map_err(|e| Failure::diagnostics(format!("{}: {e}", path.display())))?;
    Ok((net, doc))
}

fn parse_bound(text: &str) -> Result<Bound, Failure> {
    text.parse().map_err(|e| Failure::analysis(format!("--alpha-max: {e}")))
}

fn parse_positive(flag: &str, text: &str) -> Result<Time, Failure> {
    parse_time(text).map_err(|e| Failure::analysis(format!("{flag}: {e}")))
}

fn config(doc: &ModelDocument, options: &AnalysisOptions) -> Result<AnalysisConfig, Failure> {
    let base: AnalysisDef = doc.analysis.clone().unwrap_or_default();
    Ok(AnalysisConfig {
        target: options.target.clone().or(base.target),
        extra_targets: if options.extra_targets.is_empty() { base.extra_targets } else { options.extra_targets.clone() },
        alpha_max: match &options.alpha_max {
            Some(a) => Some(parse_bound(a)?),
            None => base.alpha_max,
        },
        depth_limit: options.depth_limit.or(base.depth_limit),
    })
}

fn temp_sibling(path: &Path) -> PathBuf {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    dir.join(format!(".{name}.{}.tmp", std::process::id()))
}

/// Writes every file through a sibling temporary file and renames them only
/// once all writes succeeded, so a failure leaves no partial output.
fn write_all_atomic(files: &[(PathBuf, String)]) -> Result<(), Failure> {
    let mut staged = Vec::new();
    for (path, contents) in files {
        let tmp = temp_sibling(path);
        if let Err(e) = fs::write(&tmp, contents) {
            let _ = fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(Failure::analysis(format!("{}: cannot write: {e}", path.display())));
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in &staged {
        fs::rename(tmp, path).map_err(|e| Failure::analysis(format!("{}: cannot write: {e}", path.display())))?;
    }
    Ok(())
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    write_all_atomic(&[(path.to_path_buf(), contents.to_string())])
}

fn emit(output: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match output {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes()).map_err(|e| Failure::analysis(format!("stdout: {e}")))
        }
    }
}

fn analyze(net: &SwpnNet, doc: &ModelDocument, options: &AnalysisOptions) -> Result<swpn_core::engine::AnalysisReport, Failure> {
    let cfg = config(doc, options)?;
    run_feared_scenario_analysis(net, &cfg).map_err(|e| Failure::analysis(format!("analysis failed: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate(input) => {
            let (net, _) = load(&input)?;
            let diags = validate_net(&net);
            if !diags.is_empty() {
                let lines: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                return Err(Failure::diagnostics(lines.join("\n")));
            }
            println!(
                "{}: ok ({} places, {} transitions, {} stopwatches)",
                net.name,
                net.places.len(),
                net.transitions.len(),
                net.stopwatches.len()
            );
            Ok(())
        }
        Command::Analyze { input, options, output } => {
            let (net, doc) = load(&input)?;
            let report = analyze(&net, &doc, &options)?;
            emit(output.as_deref(), &render_report(&net, &report))
        }
        Command::Invert { input, output } => {
            let (net, _) = load(&input)?;
            let mut inverted = invert_net(&net);
            inverted.name = format!("{}-inverted", net.name);
            emit(output.as_deref(), &serialize_model(&document_from_net(&inverted)))
        }
        Command::Oracle { input, horizon, step, alpha_max, output } => {
            let (mut net, _) = load(&input)?;
            if let Some(a) = alpha_max {
                net = net.with_alpha_max(parse_bound(&a)?);
            }
            let horizon = parse_positive("--horizon", &horizon)?;
            let step = parse_positive("--step", &step)?;
            let traces = oracle_explore(&net, horizon, step).map_err(|e| Failure::analysis(e.to_string()))?;
            let traces: Vec<_> = traces
                .iter()
                .map(|t| {
                    json!({
                        "fearedPlace": net.place(t.feared_place).id,
                        "firings": t.firings.iter().map(|f| json!({"event": f.event.render(&net), "time": format_time(&f.time)})).collect::<Vec<_>>(),
                        "causalEvents": t.causal_events.iter().map(|e| e.render(&net)).collect::<Vec<_>>(),
                        "causalArcs": t.causal_arcs.iter().map(|(a, b)| [a.render(&net), b.render(&net)]).collect::<Vec<_>>(),
                        "suspensions": t.suspensions.iter().map(|(w, d)| (net.stopwatch(*w).id.clone(), json!(format_time(d)))).collect::<serde_json::Map<_, _>>(),
                    })
                })
                .collect();
            let value = json!({
                "model": net.name,
                "horizon": format_time(&horizon),
                "step": format_time(&step),
                "traces": traces,
            });
            let mut text = serde_json::to_string_pretty(&value).expect("json value");
            text.push('\n');
            emit(output.as_deref(), &text)
        }
        Command::ExportDot { input, options, out_dir } => {
            let (net, doc) = load(&input)?;
            let report = analyze(&net, &doc, &options)?;
            if report.scenarios.is_empty() {
                eprintln!("{}: no feared scenario, no DOT file written", net.name);
                return Ok(());
            }
            let files: Vec<(PathBuf, String)> = report
                .scenarios
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let id = format!("S{}", i + 1);
                    (out_dir.join(format!("{id}.dot")), scenario_dot(&net, &id, s))
                })
                .collect();
            fs::create_dir_all(&out_dir)
                .map_err(|e| Failure::analysis(format!("{}: cannot create: {e}", out_dir.display())))?;
            write_all_atomic(&files)?;
            for (path, _) in &files {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.status)
        }
    }
}
