//! The `gogwork` command line.
//!
//! Every subcommand reads one JSON document (see [`format`]) and writes CSV
//! or a short report to stdout. Exit codes: 0 on success, 2 when a search
//! comes back empty or a tower stops early, 1 on invalid input or usage.

pub mod format;

use std::io::Write;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use gogwork::cosets::{enumerate_subgroups, schreier};
use gogwork::covers::{build_tower, chain, complete, find_torsion_piece, for_each_cover, CompletionBound};
use gogwork::gog::check_normal_form;
use gogwork::homology::h1;
use gogwork::{CosetTable, Error, GraphOfGroups, Precover, Word};

use format::{BoundsDoc, FormatError, Loaded, TowerDoc};

pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "gogwork", version, about = "Exact computations with graphs of free groups and cyclic edge groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a document and report whether it is valid.
    Validate { file: PathBuf },
    /// First integer homology of the graph, precover total graph or piece.
    H1 { file: PathBuf },
    /// Elevations of the edge words at a vertex to a finite-index subgroup.
    Elevations {
        file: PathBuf,
        #[arg(long)]
        vertex: String,
        /// Inline JSON columns, a JSON file of columns, or the position of a
        /// subgroup in enumeration order.
        #[arg(long)]
        table: String,
        /// Largest index enumerated when `--table` is a position.
        #[arg(long, default_value_t = 3)]
        max_index: usize,
    },
    /// Connected covers up to a degree, one CSV row each.
    EnumerateCovers {
        file: PathBuf,
        #[arg(long)]
        max_index: usize,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// Search covers for a p-torsion piece.
    TorsionPiece {
        file: PathBuf,
        #[arg(long)]
        prime: u64,
        #[arg(long, default_value_t = 2)]
        max_index: usize,
        #[arg(long, default_value_t = 1_000)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chain copies of a torsion piece.
    Chain {
        file: PathBuf,
        #[arg(long)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complete a precover to a cover by adding lone vertices.
    Complete {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a tower of covers and print its torsion ledger as CSV.
    Tower {
        file: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        /// Comma-separated primes, cycled through by step.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Comma-separated `key=value` overrides of the search bounds.
        #[arg(long)]
        bounds: Option<String>,
        /// Covers plus assemblies examined in total.
        #[arg(long, env = "GOGWORK_BUDGET")]
        budget: Option<u64>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{file}: {source}")]
    Format { file: String, source: FormatError },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_not_found() => 2,
            _ => 1,
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit
/// code; output goes to `out`, diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match run(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(file: &Path) -> Result<(format::Document, Loaded), CliError> {
    let text = std::fs::read_to_string(file).map_err(|e| CliError::Io(format!("{}: {e}", file.display())))?;
    format::parse(&text).map_err(|source| CliError::Format { file: file.display().to_string(), source })
}

fn write_doc(path: &Path, loaded: &Loaded, description: String) -> Result<(), CliError> {
    let doc = format::to_document(loaded, Some(description));
    std::fs::write(path, format::to_json(&doc)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Runs one command; `Ok` carries the exit code.
pub fn run(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Validate { file } => validate(file, out),
        Command::H1 { file } => {
            let (_, loaded) = read(file)?;
            let a = match &loaded {
                Loaded::Gog(g) | Loaded::Tower { gog: g, .. } => h1(g)?,
                Loaded::Precover(m) => m.h1()?,
                Loaded::TorsionPiece(p) => p.certificate.h1.clone(),
            };
            writeln!(out, "{a}").map_err(io)?;
            Ok(0)
        }
        Command::Elevations { file, vertex, table, max_index } => {
            let (_, loaded) = read(file)?;
            elevations_csv(loaded.gog(), vertex, table, *max_index, out)
        }
        Command::EnumerateCovers { file, max_index, cap } => {
            let (_, loaded) = read(file)?;
            covers_csv(loaded.gog(), *max_index, *cap, out, err)
        }
        Command::TorsionPiece { file, prime, max_index, cap, out: path } => {
            let (_, loaded) = read(file)?;
            let piece = find_torsion_piece(loaded.gog(), *prime, *max_index, *cap)?;
            let c = &piece.certificate;
            let name = |v: usize| piece.piece.vertices()[v].name.clone();
            writeln!(
                out,
                "piece: predegree {}, boundary {} {}, H_1 = {}, H_1/<C1,C2> = {}, complementary {prime}-rank {}",
                piece.piece.predegree(),
                name(piece.boundary.0),
                name(piece.boundary.1),
                c.h1,
                c.quotient,
                c.complementary_rank
            )
            .map_err(io)?;
            if let Some(path) = path {
                write_doc(path, &Loaded::TorsionPiece(piece), format!("{prime}-torsion piece"))?;
            }
            Ok(0)
        }
        Command::Chain { file, copies, out: path } => {
            let (_, loaded) = read(file)?;
            let Loaded::TorsionPiece(piece) = loaded else {
                return Err(CliError::Usage("chain needs a torsion_piece document".into()));
            };
            let c = chain(&piece, *copies)?;
            let m = &c.precover;
            writeln!(
                out,
                "chain of {copies}: predegree {}, open ends {} {}, H_1 = {}",
                m.predegree(),
                m.vertices()[c.first].name,
                m.vertices()[c.last].name,
                m.h1()?
            )
            .map_err(io)?;
            if let Some(path) = path {
                write_doc(path, &Loaded::Precover(c.precover), format!("chain of {copies} pieces"))?;
            }
            Ok(0)
        }
        Command::Complete { file, bound, out: path } => {
            let (_, loaded) = read(file)?;
            let Loaded::Precover(m) = loaded else {
                return Err(CliError::Usage("complete needs a precover document".into()));
            };
            let cover = complete(&m, &CompletionBound::desk(*bound))?;
            writeln!(
                out,
                "cover of degree {} with {} vertices and {} edges, H_1 = {}",
                cover.degree()?,
                cover.vertices().len(),
                cover.edges().len(),
                cover.h1()?
            )
            .map_err(io)?;
            if let Some(path) = path {
                write_doc(path, &Loaded::Precover(cover), "completed cover".into())?;
            }
            Ok(0)
        }
        Command::Tower { file, steps, primes, bounds, budget } => {
            let (_, loaded) = read(file)?;
            let config = match &loaded {
                Loaded::Tower { config, .. } => config.clone(),
                _ => TowerDoc { primes: Vec::new(), steps: 0, bounds: None, budget: None },
            };
            let steps = steps.unwrap_or(config.steps);
            let primes = primes.clone().unwrap_or(config.primes);
            let mut b = config.bounds.unwrap_or_default();
            if let Some(spec) = bounds {
                apply_bounds(&mut b, spec)?;
            }
            let budget = budget.or(config.budget).unwrap_or(DEFAULT_BUDGET);
            let report = build_tower(loaded.gog(), &primes, steps, &b.resolve(), budget)?;
            write!(out, "{}", report.to_csv()).map_err(io)?;
            writeln!(err, "{} of {steps} steps, budget used {}: {:?}", report.completed(), report.budget_used, report.status)
                .map_err(io)?;
            Ok(if report.status.is_complete() { 0 } else { 2 })
        }
    }
}

fn validate(file: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let (doc, loaded) = read(file)?;
    let g = loaded.gog();
    let nf = check_normal_form(g);
    writeln!(out, "ok: {} document, {} vertices, {} edges", format::kind_name(doc.kind), g.vertices().len(), g.edges().len())
        .map_err(io)?;
    if nf.is_ok() {
        writeln!(out, "normal form: yes").map_err(io)?;
    } else {
        writeln!(out, "normal form: no").map_err(io)?;
        for i in &nf.issues {
            writeln!(out, "  {}: {}", i.location, i.message).map_err(io)?;
        }
    }
    let m = match &loaded {
        Loaded::Precover(m) => Some(m),
        Loaded::TorsionPiece(p) => Some(&p.piece),
        _ => None,
    };
    if let Some(m) = m {
        let slots = m.hanging_slots().len();
        if slots == 0 {
            writeln!(out, "cover of degree {}", m.degree()?).map_err(io)?;
        } else {
            writeln!(out, "precover: predegree {}, {slots} hanging slots", m.predegree()).map_err(io)?;
        }
    }
    Ok(0)
}

fn apply_bounds(b: &mut BoundsDoc, spec: &str) -> Result<(), CliError> {
    for item in spec.split(',').filter(|s| !s.is_empty()) {
        let (key, value) =
            item.split_once('=').ok_or_else(|| CliError::Usage(format!("bound `{item}` is not key=value")))?;
        let v: usize =
            value.trim().parse().map_err(|_| CliError::Usage(format!("bound `{key}` needs an integer, got `{value}`")))?;
        let slot = match key.trim() {
            "cover_index" => &mut b.cover_index,
            "cover_cap" => &mut b.cover_cap,
            "piece_index" => &mut b.piece_index,
            "piece_cap" => &mut b.piece_cap,
            "word_cost" => &mut b.word_cost,
            "assemblies" => &mut b.assemblies,
            other => return Err(CliError::Usage(format!("unknown bound `{other}`"))),
        };
        *slot = Some(v);
    }
    Ok(())
}

fn spaced(w: &Word) -> String {
    w.letters().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

fn resolve_table(rank: usize, spec: &str, max_index: usize) -> Result<CosetTable, CliError> {
    let columns: Vec<Vec<u32>> = if let Ok(n) = spec.parse::<usize>() {
        let all = enumerate_subgroups(rank, max_index, 100_000)?;
        return all.get(n).cloned().ok_or_else(|| {
            CliError::Usage(format!("subgroup position {n} out of range; {} subgroups up to index {max_index}", all.len()))
        });
    } else if spec.trim_start().starts_with('[') {
        serde_json::from_str(spec).map_err(|e| CliError::Usage(format!("--table: {e}")))?
    } else {
        let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?
    };
    Ok(CosetTable::new(rank, columns)?)
}

fn elevations_csv(
    g: &GraphOfGroups,
    vertex: &str,
    table: &str,
    max_index: usize,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let v = g.vertex_index(vertex)?;
    let t = resolve_table(g.vertex(v).rank, table, max_index)?;
    let s = schreier(&t);
    writeln!(out, "edge,side,word,degree,anchor,representative").map_err(io)?;
    for e in g.edges() {
        for side in 0..2 {
            if e.ends[side] != v {
                continue;
            }
            // Cycles of the edge word itself, so anchors agree with the
            // anchors stored in precover documents.
            let w = &e.words[side];
            for cycle in t.word_cycles(w) {
                let g = &s.representatives[cycle[0]];
                let rep = g.mul(&w.pow(cycle.len() as i64)).mul(&g.inverse());
                writeln!(out, "{},{side},{},{},{},{}", e.name, spaced(w), cycle.len(), cycle[0], spaced(&rep))
                .map_err(io)?;
            }
        }
    }
    Ok(0)
}

fn covers_csv(
    g: &Arc<GraphOfGroups>,
    max_index: usize,
    cap: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    writeln!(out, "index,degree,chi,h1").map_err(io)?;
    let mut n = 0usize;
    let mut failure: Option<CliError> = None;
    let flow = for_each_cover(g, max_index, |m: &Precover| {
        if n == cap {
            return ControlFlow::Break(());
        }
        let row = (|| -> Result<String, CliError> {
            // Each cover is checked again before it is reported.
            m.validate_cover().into_result().map_err(Error::InvalidPrecover)?;
            Ok(format!("{n},{},{},{}", m.degree()?, m.euler_characteristic(), m.h1()?))
        })();
        match row.and_then(|r| writeln!(out, "{r}").map_err(io)) {
            Ok(()) => {
                n += 1;
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if flow.is_break() {
        writeln!(err, "stopped at the cap of {cap} covers").map_err(io)?;
    }
    Ok(0)
}
