use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use pursuit_core::constructions::{
    build_main, build_strongly_connected_k1, build_undirected_simulation, Construction,
};
use pursuit_core::game::GameSpec;
use pursuit_core::graph::{
    doubly_direct, parse_graph6, parse_pursuit_graph, serialize_pursuit_graph, PursuitGraph,
};
use pursuit_core::solver::{cop_number, solve, trace, SolveOptions, WORKERS_ENV};
use pursuit_core::verify::{run_suite, Scale, Session, SuiteCheck};

/// Exact solver and verification harness for Cops and Robbers on directed
/// graphs with protected edges.
#[derive(Parser)]
#[command(name = "pursuit", version)]
struct Cli {
    /// Worker threads for the solver.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,

    /// Refuse games with more configurations than this.
    #[arg(long, global = true)]
    max_states: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the game for a fixed number of cops and print the result as JSON.
    Solve {
        #[arg(long)]
        cops: usize,
        #[command(flatten)]
        input: Input,
        /// Also print an optimal-versus-optimal play transcript.
        #[arg(long)]
        trace: bool,
    },
    /// Print the cop number, or `>K` if more than K cops are needed.
    Cnum {
        #[arg(long)]
        max_k: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Generate a graph in the `.pg` format.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Run verification checks and stream one JSON report per line.
    ///
    /// Exits with status 0 iff no report fails.
    Verify {
        #[arg(value_enum)]
        check: CheckArg,
        /// Only the fixed desk-scale instances.
        #[arg(long)]
        desk: bool,
        /// graph6 file (one graph per line) replacing the 7-vertex enumeration.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    /// Graph file: `.pg`, or graph6 when the name ends in `.g6`.
    #[arg(long)]
    file: PathBuf,
}

#[derive(Subcommand)]
enum Family {
    /// Directed long-game graph with k cop tracks.
    Main {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: u64,
        /// Comma-separated track primes, one per cop.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Undirected simulation of a directed graph.
    Simulate {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        input: Input,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Strongly connected reflexive one-cop graph.
    Sc1 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Replace every undirected edge by its two arcs.
    Doubledirect {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Upperbound,
    Stable,
    Sandwich,
    Main,
    Sc1,
    Copwin7,
    All,
}

impl From<CheckArg> for SuiteCheck {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::Upperbound => SuiteCheck::UpperBound,
            CheckArg::Stable => SuiteCheck::Stable,
            CheckArg::Sandwich => SuiteCheck::Sandwich,
            CheckArg::Main => SuiteCheck::Main,
            CheckArg::Sc1 => SuiteCheck::Sc1,
            CheckArg::Copwin7 => SuiteCheck::CopWin7,
            CheckArg::All => SuiteCheck::All,
        }
    }
}

fn read_graph(path: &Path) -> Result<PursuitGraph> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "g6") {
        let line = bytes.split(|&b| b == b'\n').find(|l| !l.is_empty()).unwrap_or(&[]);
        return parse_graph6(line).with_context(|| format!("parsing {}", path.display()));
    }
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    parse_pursuit_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_corpus(path: &Path) -> Result<Vec<PursuitGraph>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .filter(|(_, l)| !l.iter().all(u8::is_ascii_whitespace))
        .map(|(i, l)| parse_graph6(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

fn write_graph(graph: &PursuitGraph, output: Option<&Path>) -> Result<()> {
    let text = serialize_pursuit_graph(graph);
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn write_construction(c: &Construction, output: Option<&Path>) -> Result<()> {
    info!(
        "generated {} vertices, {} arcs; prediction {}",
        c.graph.vertex_count(),
        c.graph.arc_count(),
        serde_json::to_string(&c.prediction)?
    );
    write_graph(&c.graph, output)
}

fn options(cli: &Cli) -> SolveOptions {
    let mut options = SolveOptions::from_env();
    if let Some(w) = cli.workers {
        options = options.with_workers(w.max(1));
    }
    if let Some(m) = cli.max_states {
        options.max_states = m;
    }
    options
}

fn run(cli: Cli) -> Result<ExitCode> {
    let options = options(&cli);
    match cli.command {
        Command::Solve { cops, input, trace: with_trace } => {
            let graph = read_graph(&input.file)?;
            let spec = GameSpec::new(&graph, cops)?;
            let output = if with_trace {
                let result = solve(&spec, &options)?;
                let transcript = trace(&spec, &options)?;
                json!({ "result": result, "trace": transcript })
            } else {
                serde_json::to_value(solve(&spec, &options)?)?
            };
            println!("{}", serde_json::to_string_pretty(&output)?);
        }
        Command::Cnum { max_k, input } => {
            if max_k == 0 {
                bail!("--max-k must be positive");
            }
            let graph = read_graph(&input.file)?;
            println!("{}", cop_number(&graph, max_k, &options)?);
        }
        Command::Gen { family } => match family {
            Family::Main { k, p, q, output } => {
                write_construction(&build_main(k, p, &q)?, output.as_deref())?
            }
            Family::Simulate { k, input, output } => {
                let inner = read_graph(&input.file)?;
                write_construction(&build_undirected_simulation(&inner, k)?, output.as_deref())?
            }
            Family::Sc1 { p, q, output } => {
                write_construction(&build_strongly_connected_k1(p, q)?, output.as_deref())?
            }
            Family::Doubledirect { input, output } => {
                let graph = read_graph(&input.file)?;
                write_graph(&doubly_direct(&graph)?, output.as_deref())?
            }
        },
        Command::Verify { check, desk, corpus } => {
            let corpus = corpus.as_deref().map(read_corpus).transpose()?;
            let scale = if desk { Scale::Desk } else { Scale::Extended };
            let session = Session::new(options);
            let reports = run_suite(&session, check.into(), scale, corpus.as_deref());
            let mut stdout = io::stdout().lock();
            let mut failed = 0;
            for report in &reports {
                writeln!(stdout, "{}", serde_json::to_string(report)?)?;
                if report.is_failure() {
                    failed += 1;
                }
            }
            info!("{} reports, {failed} failed", reports.len());
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
