//! `xjoin`: build generalized X-joins, synthesize Cayley certificates and
//! check the automorphism claims behind them.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 theorem hypotheses not
//! met in theorem mode, 3 invalid input, 4 lift search exhausted, 5 a size
//! cap was exceeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use xjoin_core::caps::CAPS_ENV;
use xjoin_core::graphs::{automorphism_group, is_vertex_transitive, Graph, GraphJson};
use xjoin_core::scenario::{OutputPaths, ScenarioFile};
use xjoin_core::synth::{
    aut_containment_violation, build_w, certify_vertex_transitive, synthesize_cayley,
    CayleyScenario, SynthMode,
};
use xjoin_core::xjoin::{generalized_xjoin, is_equitable};
use xjoin_core::{Caps, Error, Exec};

#[derive(Parser)]
#[command(name = "xjoin", version, about = "Generalized X-joins of Cayley graphs")]
struct Cli {
    /// Run every exhaustive loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the joined graph W of a scenario.
    Build {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        out: Format,
        /// Write W here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write every fiber graph, as DOT, into this directory.
        #[arg(long)]
        fibers_dir: Option<PathBuf>,
    },
    /// Synthesize and verify a Cayley certificate for W.
    Synth {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Write the certificate JSON here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check that the wreath product acts on W by automorphisms, transitively.
    Verify { scenario: PathBuf },
    /// Automorphism group of a graph in JSON form.
    Aut { graph: PathBuf },
    /// Convert a graph in JSON form.
    Export {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Edgelist,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Theorem,
    Search,
    Canonical,
}

impl From<ModeArg> for SynthMode {
    fn from(m: ModeArg) -> SynthMode {
        match m {
            ModeArg::Theorem => SynthMode::Theorem,
            ModeArg::Search => SynthMode::Search,
            ModeArg::Canonical => SynthMode::Canonical,
        }
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::TheoremChoicesUnavailable(_) => 2,
            Error::SynthesisFailed { .. } => 4,
            Error::VerificationFailed(_) => 1,
            e if e.is_cap() => 5,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: String) -> Failure {
    Failure { code: 3, message }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let result = match cli.command {
        Command::Build {
            scenario,
            out,
            output,
            fibers_dir,
        } => cmd_build(&scenario, out, output, fibers_dir),
        Command::Synth {
            scenario,
            mode,
            report,
        } => cmd_synth(&scenario, mode.map(SynthMode::from), report, exec),
        Command::Verify { scenario } => cmd_verify(&scenario),
        Command::Aut { graph } => cmd_aut(&graph),
        Command::Export { graph, format } => cmd_export(&graph, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Caps from the scenario, then `XJOIN_CAPS`.
fn caps_for(file: Option<&ScenarioFile>) -> Result<Caps, Failure> {
    let caps = file.map(ScenarioFile::caps).unwrap_or_default();
    match std::env::var(CAPS_ENV) {
        Ok(spec) => Ok(caps.with_overrides(&spec)?),
        Err(_) => Ok(caps),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(g: &Graph, format: Format, name: &str) -> String {
    match format {
        Format::Dot => g.to_dot(name),
        Format::Edgelist => g.to_edge_list(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&g.to_json()).expect("graph serializes");
            s.push('\n');
            s
        }
    }
}

fn or_default(flag: Option<PathBuf>, from_file: &Option<String>) -> Option<PathBuf> {
    flag.or_else(|| from_file.as_ref().map(PathBuf::from))
}

/// W and its fibers (with their labels) for either scenario kind.
fn build_graph(file: &ScenarioFile, caps: Caps) -> Result<(Graph, Vec<(String, Graph)>), Failure> {
    match file {
        ScenarioFile::Cayley(c) => {
            let mut sc = c.to_scenario(caps)?;
            if sc.mode == SynthMode::Search {
                sc.mode = SynthMode::Canonical;
            }
            let (w, s) = build_w(&sc)?;
            let fiber = sc.fiber_graph()?;
            let fibers = (0..s.block_count())
                .map(|b| (s.block_label(b).to_string(), fiber.clone()))
                .collect();
            Ok((w, fibers))
        }
        ScenarioFile::Xjoin(x) => {
            let inp = x.to_input()?;
            let w = generalized_xjoin(&inp, x.collapse_allowed)?;
            let fibers = inp.block_labels.iter().cloned().zip(inp.fibers).collect();
            Ok((w, fibers))
        }
    }
}

fn cmd_build(
    scenario: &Path,
    out: Format,
    output: Option<PathBuf>,
    fibers_dir: Option<PathBuf>,
) -> CmdResult {
    let file = ScenarioFile::load(scenario)?;
    let caps = caps_for(Some(&file))?;
    let paths: OutputPaths = file.output();
    let (w, fibers) = build_graph(&file, caps)?;
    if let Some(dir) = or_default(fibers_dir, &paths.fibers_dir) {
        fs::create_dir_all(&dir)
            .map_err(|e| invalid(format!("cannot create {}: {e}", dir.display())))?;
        for (i, (label, g)) in fibers.iter().enumerate() {
            let path = dir.join(format!("fiber_{i}.dot"));
            write_out(Some(&path), &g.to_dot(label))?;
        }
    }
    write_out(or_default(output, &paths.graph).as_deref(), &render(&w, out, "W"))
}

fn cayley_scenario(file: &ScenarioFile, caps: Caps) -> Result<CayleyScenario, Failure> {
    match file {
        ScenarioFile::Cayley(c) => Ok(c.to_scenario(caps)?),
        ScenarioFile::Xjoin(_) => Err(invalid(
            "synth needs a \"cayley\" scenario; this one is a plain X-join".into(),
        )),
    }
}

fn cmd_synth(
    scenario: &Path,
    mode: Option<SynthMode>,
    report: Option<PathBuf>,
    exec: Exec,
) -> CmdResult {
    let file = ScenarioFile::load(scenario)?;
    let caps = caps_for(Some(&file))?;
    let mut sc = cayley_scenario(&file, caps)?;
    if let Some(m) = mode {
        sc.mode = m;
    }
    let started = Instant::now();
    let cert = synthesize_cayley(&sc, exec)?;
    let mut rep = cert.report(sc.mode);
    rep.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    let mut text = serde_json::to_string_pretty(&rep).expect("report serializes");
    text.push('\n');
    match or_default(report, &file.output().report) {
        Some(path) => {
            write_out(Some(&path), &text)?;
            println!(
                "certified: |V(W)| = {}, |R| = {}, |S_R| = {}; report written to {}",
                rep.vertices,
                rep.r_order,
                rep.connection_size,
                path.display()
            );
            Ok(())
        }
        None => write_out(None, &text),
    }
}

fn check_line(name: &str, ok: bool, detail: &str) -> String {
    format!("{:<4} {name:<26} {detail}", if ok { "PASS" } else { "FAIL" })
}

fn cmd_verify(scenario: &Path) -> CmdResult {
    let file = ScenarioFile::load(scenario)?;
    let caps = caps_for(Some(&file))?;
    let mut lines = Vec::new();
    let mut all_ok = true;
    match &file {
        ScenarioFile::Cayley(_) => {
            let mut sc = cayley_scenario(&file, caps)?;
            if sc.mode == SynthMode::Search {
                sc.mode = SynthMode::Canonical;
            }
            let (w, s) = build_w(&sc)?;
            if w.vertex_count() > caps.aut_vertices {
                return Err(Error::SizeCapExceeded {
                    what: "W for the automorphism cap (aut)",
                    size: w.vertex_count(),
                    cap: caps.aut_vertices,
                }
                .into());
            }
            let violation = aut_containment_violation(&w, &s);
            let detail = match &violation {
                None => format!(
                    "{} kernel generators, {} lifts",
                    s.base_group_generators().len(),
                    s.lifts().len()
                ),
                Some(v) => format!("{} breaks {}-{}", v.generator, v.edge.0, v.edge.1),
            };
            lines.push(check_line("aut_containment", violation.is_none(), &detail));
            all_ok &= violation.is_none();

            let vt = certify_vertex_transitive(&w, &s);
            lines.push(check_line("vertex_transitive", vt, "orbit of <J, F> on V(W)"));
            all_ok &= vt;

            let gwp = s.gwp_group(caps.closure)?;
            let aut = automorphism_group(&w, caps.aut_vertices, caps.closure)?;
            let inside = gwp.elements().iter().all(|p| aut.contains(p));
            lines.push(check_line(
                "gwp_in_aut",
                inside,
                &format!("|<K, F>| = {}, |Aut(W)| = {}", gwp.order(), aut.order()),
            ));
            all_ok &= inside;
        }
        ScenarioFile::Xjoin(x) => {
            let inp = x.to_input()?;
            let w = generalized_xjoin(&inp, x.collapse_allowed)?;
            lines.push(check_line(
                "build",
                true,
                &format!("{} vertices, {} edges", w.vertex_count(), w.edge_count()),
            ));
            let vt = is_vertex_transitive(&w, None, caps.aut_vertices)?;
            lines.push(format!("INFO {:<26} {vt}", "vertex_transitive"));
            let eq = is_equitable(&w, &inp.fiber_partition());
            lines.push(format!("INFO {:<26} {eq}", "fiber_partition_equitable"));
            let aut = automorphism_group(&w, caps.aut_vertices, caps.closure)?;
            lines.push(format!("INFO {:<26} {}", "aut_order", aut.order()));
        }
    }
    if !all_ok {
        for l in &lines {
            eprintln!("{l}");
        }
        return Err(Failure {
            code: 1,
            message: "verification failed".into(),
        });
    }
    for l in &lines {
        println!("{l}");
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let json: GraphJson =
        serde_json::from_str(&text).map_err(|e| invalid(format!("graph: {e}")))?;
    Ok(Graph::from_json(&json)?)
}

#[derive(Serialize)]
struct AutReport {
    vertices: usize,
    edges: usize,
    order: usize,
    vertex_transitive: bool,
    orbits: Vec<Vec<String>>,
    /// Generators as label maps, moved points only.
    generators: Vec<BTreeMap<String, String>>,
}

fn cmd_aut(path: &Path) -> CmdResult {
    let g = load_graph(path)?;
    let caps = caps_for(None)?;
    let aut = automorphism_group(&g, caps.aut_vertices, caps.closure)?;
    let orbits: Vec<Vec<String>> = aut
        .orbits()
        .into_iter()
        .map(|o| o.into_iter().map(|v| g.label(v).to_string()).collect())
        .collect();
    let report = AutReport {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        order: aut.order(),
        vertex_transitive: g.vertex_count() <= 1 || orbits.len() == 1,
        orbits,
        generators: aut
            .generators()
            .iter()
            .map(|p| {
                (0..g.vertex_count())
                    .filter(|&v| p.apply(v) != v)
                    .map(|v| (g.label(v).to_string(), g.label(p.apply(v)).to_string()))
                    .collect()
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    write_out(None, &text)
}

fn cmd_export(path: &Path, format: Format) -> CmdResult {
    let g = load_graph(path)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("G");
    write_out(None, &render(&g, format, name))
}
