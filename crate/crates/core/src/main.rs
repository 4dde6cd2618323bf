use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qramforge::builders::{
    build_parallel_clifford_t, build_sequential_clifford_t, build_toffoli_bucket_brigade, lower_circuit,
};
use qramforge::document::Document;
use qramforge::metrics::{self, Family, NPolicy, SweepConfig};
use qramforge::passes::{expand_ghz_fanout, merge_phases, GhzOptions};
use qramforge::schedule::{fuse_fanout_cnots, schedule_asap};
use qramforge::sim::{verify_qram_with, VerdictLevel, VerifyOptions};
use qramforge::{qasm, render, CczVariant, Circuit, FaninMode, Gate, QramInstance};

#[derive(Parser)]
#[command(name = "qramforge", version, about = "Bucket brigade QRAM synthesis and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildFamily {
    Toffoli,
    Sequential,
    Parallel,
}

#[derive(Subcommand)]
enum Command {
    /// Build a QRAM circuit and write it as IR JSON.
    Synth {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_enum)]
        family: BuildFamily,
        /// Bit string (char j is cell j), `ones`, `zeros` or `random:SEED`.
        #[arg(long, default_value = "ones")]
        memory: String,
        #[arg(long, default_value = "measurement")]
        fanin: FaninMode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Replace every Toffoli by a Clifford+T decomposition.
    Lower {
        file: PathBuf,
        #[arg(long, default_value = "CANONICAL_7T")]
        variant: CczVariant,
        /// Merge adjacent phase gates afterwards.
        #[arg(long)]
        merge_phases: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the ASAP schedule: depth, region depths and moments.
    Schedule {
        file: PathBuf,
        /// Expand fan-outs into GHZ copy trees first.
        #[arg(long)]
        ghz_expand: bool,
        #[arg(long, requires = "ghz_expand")]
        ancilla_budget: Option<usize>,
        /// Write the moment-ordered circuit with same-moment CNOTs fused.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a circuit against the QRAM read map; prints a JSON verdict.
    Verify {
        file: PathBuf,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        /// Check only this memory instead of the default sweep.
        #[arg(long)]
        memory: Option<String>,
    },
    /// Resource sweep as CSV.
    Report {
        #[arg(long, value_delimiter = ',', default_value = "bbs,rom,bbp")]
        families: Vec<Family>,
        #[arg(long, default_value = "2..15", value_parser = parse_range)]
        q_range: (u32, u32),
        #[arg(long, default_value = "n_equals_q")]
        n_policy: NPolicy,
        /// Circuits are built and measured only up to this q.
        #[arg(long, default_value_t = 10)]
        measure_cap: u32,
        #[arg(long, default_value = "measurement")]
        fanin: FaninMode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the circuit as an ASCII diagram.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write OpenQASM 2.0.
    Export {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad lower bound in `{s}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad upper bound in `{s}`"))?;
    if a == 0 || a > b {
        return Err(format!("empty or invalid range `{s}`"));
    }
    Ok((a, b))
}

/// Writes through a temp file in the destination directory, then renames.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => {
            io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

fn read_document(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Document::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn describe(c: &Circuit, g: &Gate) -> String {
    let name = |w| c.wire_name(w);
    let mut s = g.kind.to_string();
    if !g.controls.is_empty() {
        let ctl: Vec<String> = g
            .controls
            .iter()
            .map(|ct| match ct.polarity {
                qramforge::Polarity::Positive => name(ct.wire).to_string(),
                qramforge::Polarity::Negative => format!("!{}", name(ct.wire)),
            })
            .collect();
        s.push(' ');
        s.push_str(&ctl.join(","));
        s.push_str(" ->");
    }
    let t: Vec<&str> = g.targets.iter().map(|&w| name(w)).collect();
    s.push(' ');
    s.push_str(&t.join(","));
    if let Some(r) = &g.record {
        s.push_str(&format!(" => {r}"));
    }
    if let Some(r) = &g.condition {
        s.push_str(&format!(" if {r}"));
    }
    s
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth { q, n, family, memory, fanin, output } => {
            let inst = QramInstance::from_spec(q, n.unwrap_or(q), &memory)?;
            let c = match family {
                BuildFamily::Toffoli => build_toffoli_bucket_brigade(&inst),
                BuildFamily::Sequential => build_sequential_clifford_t(&inst),
                BuildFamily::Parallel => build_parallel_clifford_t(&inst, fanin),
            };
            emit(output.as_deref(), &Document::with_instance(c, inst).to_json())?;
        }
        Command::Lower { file, variant, merge_phases: merge, output } => {
            let doc = read_document(&file)?;
            let mut c = lower_circuit(&doc.circuit, variant)?;
            if merge {
                c = merge_phases(&c)?;
            }
            emit(output.as_deref(), &Document { circuit: c, instance: doc.instance }.to_json())?;
        }
        Command::Schedule { file, ghz_expand, ancilla_budget, output } => {
            let doc = read_document(&file)?;
            let mut c = doc.circuit;
            if ghz_expand {
                c = expand_ghz_fanout(&c, &GhzOptions { ancilla_budget })?;
            }
            let s = schedule_asap(&c);
            let mut out = String::new();
            out.push_str(&format!("depth {}\n", s.depth));
            if let Some(r) = s.region_depths {
                out.push_str(&format!(
                    "regions fanout={} query={} fanin={}\n",
                    r.fanout, r.query, r.fanin
                ));
            }
            for (t, gates) in s.moments.iter().enumerate() {
                let items: Vec<String> = gates.iter().map(|&i| describe(&c, &c.gates()[i])).collect();
                out.push_str(&format!("{t}: {}\n", items.join("; ")));
            }
            print!("{out}");
            if let Some(p) = output {
                let fused = fuse_fanout_cnots(&c, &s)?;
                write_atomic(&p, Document { circuit: fused, instance: doc.instance }.to_json().as_bytes())?;
            }
        }
        Command::Verify { file, q, n, memory } => {
            let doc = read_document(&file)?;
            let q = q
                .or(doc.instance.as_ref().map(|i| i.q))
                .ok_or_else(|| anyhow!("--q is required when the file carries no instance"))?;
            let n = n.or(doc.instance.as_ref().map(|i| i.n)).unwrap_or(q);
            let mut opts = VerifyOptions::default();
            let spec = memory.as_deref().unwrap_or("ones");
            let inst = QramInstance::from_spec(q, n, spec)?;
            if memory.is_some() {
                opts.memories = Some(vec![inst.memory.clone()]);
            }
            let verdict = verify_qram_with(&doc.circuit, &inst, &opts)?;
            println!("{}", serde_json::to_string(&verdict)?);
            if verdict.level == VerdictLevel::Inequivalent {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Report { families, q_range, n_policy, measure_cap, fanin, output } => {
            let cfg = SweepConfig {
                families,
                q_range: q_range.0..=q_range.1,
                n_policy,
                measure_cap,
                fanin,
            };
            let rows = metrics::sweep(&cfg);
            let mut buf = Vec::new();
            metrics::write_csv(&rows, &mut buf)?;
            emit(output.as_deref(), std::str::from_utf8(&buf)?)?;
        }
        Command::Render { file, output } => {
            let doc = read_document(&file)?;
            emit(output.as_deref(), &render::render_ascii(&doc.circuit))?;
        }
        Command::Export { file, output } => {
            let doc = read_document(&file)?;
            emit(output.as_deref(), &qasm::to_qasm(&doc.circuit))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

