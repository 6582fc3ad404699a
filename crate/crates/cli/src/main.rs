use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pebblab::assignment_graph::BuildError;
use pebblab::format::{parse_instance, ParseError};
use pebblab::iso::{find_subgraph, IsoError};
use pebblab::theorems::*;
use pebblab::{
    build_with, digraph_isomorphic, find_induced_undirected_embedding, undirected_isomorphic,
    BuildOptions, Instance, Pebbles,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "pebblab", version, about = "Pebbling on oriented graphs and their assignment graphs")]
struct Cli {
    /// Largest assignment graph any command may build.
    #[arg(long, global = true, env = "PEBBLAB_BUDGET", default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,

    /// Node expansions allowed to one search, and the instance cap for scans.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    search_budget: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Write the main artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for scans.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    shards: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Directed,
    Undirected,
    InducedEmbedding,
    Subgraph,
}

#[derive(Subcommand)]
enum Command {
    /// Build the assignment graph of an instance file.
    Build { input: PathBuf },
    /// Compare the graphs of two files.
    Iso {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Directed)]
        mode: Mode,
    },
    /// Check one claim on an instance, a batch, or a bounded corpus.
    Verify(VerifyArgs),
    /// List every graph and assignment with G = [S_G] under the caps.
    Search {
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(long, default_value_t = 4)]
        pebble_cap: Pebbles,
        #[arg(long, default_value = "any")]
        fully_traversable: TraversableFilter,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Claim id, e.g. thm-2.1.
    claim: String,
    /// Instance file; per-instance claims scan a small corpus without one.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Per-vertex pebble cap for scans.
    #[arg(long)]
    cap: Option<Pebbles>,
    /// Cycle length (thm-3.1) or heavy count (lem-7.1).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    random_trees: Option<usize>,
    #[arg(long)]
    max_vertices: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Path lengths for thm-7.1, comma separated.
    #[arg(long, value_delimiter = ',')]
    paths: Option<Vec<usize>>,
    /// Source counts (thm-7.1, thm-7.2) or the 0/1 pattern (lem-7.1).
    #[arg(long, value_delimiter = ',')]
    pebbles: Option<Vec<Pebbles>>,
    /// Pebbles on the vertices outside the path copies (thm-7.1).
    #[arg(long, default_value_t = 0)]
    rest: Pebbles,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 4)]
    search_cap: Pebbles,
}

/// Bad arguments that clap cannot see; exit code 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A scan or build that would exceed a configured budget; exit code 3.
#[derive(Debug)]
struct OverBudget(String);

impl fmt::Display for OverBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for OverBudget {}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<ParseError>() || cause.is::<Usage>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if cause.is::<OverBudget>() || cause.is::<IsoError>() {
            return 3;
        }
        if let Some(b) = cause.downcast_ref::<BuildError>() {
            return if matches!(b, BuildError::StateBudgetExceeded(_)) { 3 } else { 1 };
        }
        if let Some(t) = cause.downcast_ref::<TheoremError>() {
            return match t {
                TheoremError::Search(_) => 3,
                TheoremError::Precondition(_) | TheoremError::UnknownClaim(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

struct Ctx {
    limits: Limits,
    format: Format,
    output: Option<PathBuf>,
}

impl Ctx {
    /// Writes the main artifact to `--output` or stdout.
    fn emit(&self, body: &str) -> Result<()> {
        match &self.output {
            Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(body.as_bytes())?;
                Ok(())
            }
        }
    }

    fn json(&self, v: &Value) -> Result<()> {
        self.emit(&(serde_json::to_string_pretty(v)? + "\n"))
    }

    fn no_dot(&self, what: &str) -> Result<()> {
        if self.format == Format::Dot {
            return Err(Usage(format!("DOT output is only available for build, not {what}")).into());
        }
        Ok(())
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| path.display().to_string())
}

fn cmd_build(ctx: &Ctx, input: &Path) -> Result<u8> {
    let inst = read_instance(input)?;
    let g = &inst.graph;
    let opts = BuildOptions { state_budget: ctx.limits.state_budget };
    let ag = build_with(g, &inst.assignment, &opts)?;
    let counts = ag.traversal_counts();
    let mut summary = format!(
        "{} states, {} edges, fully traversable: {}\n",
        ag.state_count(),
        ag.transition_count(),
        ag.is_fully_traversable()
    );
    for (&(v, w), c) in g.edges().iter().zip(&counts) {
        summary.push_str(&format!("  {} -> {}: {c}\n", g.name(v), g.name(w)));
    }
    let artifact = match ctx.format {
        Format::Table => None,
        Format::Dot => Some(ag.to_dot(g)),
        Format::Json => Some(serde_json::to_string_pretty(&ag.to_json(g))? + "\n"),
    };
    match (artifact, &ctx.output) {
        (None, _) => ctx.emit(&summary)?,
        (Some(a), Some(_)) => {
            ctx.emit(&a)?;
            print!("{summary}");
        }
        (Some(a), None) => {
            eprint!("{summary}");
            ctx.emit(&a)?;
        }
    }
    Ok(0)
}

fn cmd_iso(ctx: &Ctx, gp: &Path, hp: &Path, mode: Mode) -> Result<u8> {
    ctx.no_dot("iso")?;
    let g = read_instance(gp)?.graph;
    let h = read_instance(hp)?.graph;
    let budget = ctx.limits.search_budget;
    let found = match mode {
        Mode::Directed => digraph_isomorphic(&g, &h),
        Mode::Undirected => undirected_isomorphic(&g, &h),
        Mode::InducedEmbedding => find_induced_undirected_embedding(&g, &h, budget)?,
        Mode::Subgraph => find_subgraph(&g, &h, budget)?,
    };
    let Some(m) = found else {
        match ctx.format {
            Format::Json => ctx.json(&json!({ "isomorphic": false }))?,
            _ => ctx.emit("no mapping found\n")?,
        }
        return Ok(1);
    };
    let w = m.witness(&g, &h).to_value();
    match ctx.format {
        Format::Json => ctx.json(&w)?,
        _ => {
            let mut out = format!("{} mapping found\n", m.mode());
            for v in g.vertices() {
                out.push_str(&format!("  {} -> {}\n", g.name(v), h.name(m.image(v))));
            }
            ctx.emit(&out)?;
        }
    }
    Ok(0)
}

/// Oriented graph classes on `n` vertices, `n <= 6`.
const CLASSES: [u64; 7] = [1, 1, 2, 7, 42, 582, 21_480];

/// Refuses scans whose instance count could exceed the search budget.
fn guard_scan(limits: &Limits, vertex_cap: usize, cap: Pebbles) -> Result<()> {
    let over = || OverBudget(format!(
        "a scan up to {vertex_cap} vertices with pebble cap {cap} exceeds the search budget of {}",
        limits.search_budget
    ));
    if vertex_cap >= CLASSES.len() {
        return Err(over().into());
    }
    let mut total: u64 = 0;
    for n in 1..=vertex_cap {
        let per = (cap as u64 + 1).checked_pow(n as u32).ok_or_else(over)?;
        total = total.checked_add(CLASSES[n].checked_mul(per).ok_or_else(over)?).ok_or_else(over)?;
    }
    if total > limits.search_budget {
        return Err(over().into());
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds | Verdict::HypothesisNotMet => 0,
        Verdict::Counterexample => 1,
        Verdict::BudgetExceeded => 3,
    }
}

fn cmd_verify(ctx: &Ctx, a: &VerifyArgs) -> Result<u8> {
    ctx.no_dot("verify")?;
    let claim: ClaimId = a.claim.parse()?;
    let limits = &ctx.limits;
    let mut classification = None;
    let report = if let Some(path) = &a.input {
        let inst = read_instance(path)?;
        verify_instance(claim, &inst.graph, &inst.assignment, limits)
    } else {
        match claim {
            ClaimId::Cor2_1 => {
                let (r, c) = verify_cor_2_1(a.cap.unwrap_or(6))?;
                classification = Some(c);
                r
            }
            ClaimId::Thm3_1 => {
                let (k, cap) = (a.k.unwrap_or(6), a.cap.unwrap_or(5));
                let count = (cap as u64 + 1).checked_pow(k.saturating_sub(1) as u32);
                if count.map_or(true, |c| c > limits.search_budget) {
                    return Err(OverBudget(format!("k = {k} with cap {cap} exceeds the search budget")).into());
                }
                verify_thm_3_1(k, cap)?
            }
            ClaimId::Thm5_1 => thm_5_1_random_batch(
                a.random_trees.unwrap_or(100),
                a.max_vertices.unwrap_or(12),
                a.seed,
                limits,
            ),
            ClaimId::Sec6 => {
                let (vc, cap) = (a.max_vertices.unwrap_or(4), a.cap.unwrap_or(4));
                guard_scan(limits, vc, cap)?;
                let (r, c) = verify_sec_6(vc, cap);
                classification = Some(c);
                r
            }
            ClaimId::Thm7_1 => match &a.paths {
                Some(paths) => {
                    let sources = a.pebbles.clone().unwrap_or_else(|| vec![2; paths.len()]);
                    if sources.len() != paths.len() {
                        return Err(Usage("--pebbles needs one source count per path".into()).into());
                    }
                    let factors: Vec<(usize, Pebbles)> = paths.iter().copied().zip(sources).collect();
                    verify_thm_7_1(&factors, a.rest, limits)?
                }
                None => thm_7_1_suite(3, a.max_vertices.unwrap_or(4), limits),
            },
            ClaimId::Lem7_1 => match a.k {
                Some(k) => {
                    let n = a.n.unwrap_or(k / 2 + 1);
                    let others: Vec<bool> = match &a.pebbles {
                        Some(p) => p.iter().map(|&x| x == 1).collect(),
                        None => vec![false; n.saturating_sub(2)],
                    };
                    verify_lemma_7_1(n, k as Pebbles, a.m.unwrap_or(0) as Pebbles, &others, limits)?
                }
                None => lemma_7_1_suite(8, limits),
            },
            ClaimId::Lem7_2 => lemma_7_2_suite(a.n.unwrap_or(6), limits),
            ClaimId::Cor7_1 => cor_7_1_suite(a.max_vertices.unwrap_or(3), a.cap.unwrap_or(5), limits),
            ClaimId::Thm7_2 => {
                let n = a.n.unwrap_or(1);
                let pebbles = a.pebbles.clone().unwrap_or_else(|| vec![2; n]);
                verify_thm_7_2(n, a.m.unwrap_or(2), &pebbles, a.search_cap, limits)?
            }
            per_instance => {
                let (vc, cap) = (a.max_vertices.unwrap_or(4), a.cap.unwrap_or(4));
                guard_scan(limits, vc, cap)?;
                scan_corpus(per_instance, vc, cap, limits)
            }
        }
    };
    match ctx.format {
        Format::Json => {
            let mut v = report.to_json();
            if let Some(c) = &classification {
                v["classification"] = c.to_json();
            }
            ctx.json(&v)?;
        }
        _ => {
            let mut out = report.to_table();
            if let Some(c) = &classification {
                out.push_str(&c.to_table());
            }
            ctx.emit(&out)?;
        }
    }
    Ok(verdict_code(report.verdict))
}

fn cmd_search(ctx: &Ctx, vc: usize, cap: Pebbles, filter: TraversableFilter) -> Result<u8> {
    ctx.no_dot("search")?;
    guard_scan(&ctx.limits, vc, cap)?;
    let c = classify_fully_traversable(vc, cap, filter);
    match ctx.format {
        Format::Json => ctx.json(&c.to_json())?,
        _ => ctx.emit(&c.to_table())?,
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    let ctx = Ctx {
        limits: Limits {
            state_budget: usize::try_from(cli.budget).unwrap_or(usize::MAX),
            search_budget: cli.search_budget,
        },
        format: cli.format,
        output: cli.output.clone(),
    };
    let go = || match &cli.command {
        Command::Build { input } => cmd_build(&ctx, input),
        Command::Iso { g, h, mode } => cmd_iso(&ctx, g, h, *mode),
        Command::Verify(a) => cmd_verify(&ctx, a),
        Command::Search { max_vertices, pebble_cap, fully_traversable } => {
            cmd_search(&ctx, *max_vertices, *pebble_cap, *fully_traversable)
        }
    };
    match cli.shards {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k as usize)
            .build()
            .context("starting the scan thread pool")?
            .install(go),
        None => go(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    };
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}

