//! Command-line front end: solve single instances, run benchmark batches,
//! generate instances, and query the brute-force oracles.
//!
//! Exit codes for `solve`: 0 optimal, 2 timeout, 3 infeasible, 1 usage or
//! parse error.

mod bench;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use domset::config::{BranchStrategy, Config};
use domset::io::{self, GraphFormat};
use domset::solve::{self, SolveStatus};
use domset::{gen, oracle};

/// Environment variable naming a default config file (TOML).
const CONFIG_ENV: &str = "DOMSET_CONFIG";

#[derive(Parser)]
#[command(name = "domset", version, about = "Exact dominating-set and two-part cover solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and emit a result document.
    Solve(SolveArgs),
    /// Solve every instance in a directory under one or more configurations.
    Bench(bench::BenchArgs),
    /// Generate instance files.
    Gen(GenArgs),
    /// Run the brute-force oracle on a small instance.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Auto,
    Edgelist,
    Dimacs,
    Pds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Mds,
    Pds,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchingArg {
    Ldpb,
    Maxdeg,
}

#[derive(Args)]
struct SolverOptions {
    /// Seed for all randomized decisions.
    #[arg(long)]
    seed: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Disable the multi-LP bound tightening.
    #[arg(long)]
    no_multilp: bool,
    /// Reduction-rule mask: nine 0/1 characters (rule 1 first) or an
    /// integer bitmask.
    #[arg(long)]
    rules: Option<String>,
    /// Branch-vertex selection strategy.
    #[arg(long, value_enum)]
    branching: Option<BranchingArg>,
    /// Config file (TOML); defaults to $DOMSET_CONFIG when set.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SolverOptions {
    fn build(&self) -> Result<Config> {
        let mut cfg = match self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
        {
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                Config::from_toml(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
            None => Config::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(limit) = self.time_limit {
            cfg.time_limit_seconds = Some(limit);
        }
        if self.no_multilp {
            cfg.multilp.enabled = false;
        }
        if let Some(mask) = &self.rules {
            cfg.rules.enabled_mask = parse_rule_mask(mask)?;
        }
        if let Some(strategy) = self.branching {
            cfg.branching.strategy = match strategy {
                BranchingArg::Ldpb => BranchStrategy::Ldpb,
                BranchingArg::Maxdeg => BranchStrategy::Maxdeg,
            };
        }
        Ok(cfg)
    }
}

fn parse_rule_mask(s: &str) -> Result<u16> {
    if s.len() == 9 && s.chars().all(|c| c == '0' || c == '1') {
        // Rule 1 is the first character.
        let mut mask = 0u16;
        for (i, c) in s.chars().enumerate() {
            if c == '1' {
                mask |= 1 << i;
            }
        }
        return Ok(mask);
    }
    let mask: u16 = s.parse().context("rule mask must be nine 0/1 chars or an integer")?;
    if mask > 0b1_1111_1111 {
        bail!("rule mask {mask} exceeds nine bits");
    }
    Ok(mask)
}

#[derive(Args)]
struct SolveArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverOptions,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// Random connected graphs with fixed vertex and edge counts.
    Gnm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value = "edgelist")]
        format: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// The clause-cover companion of a 3-CNF formula.
    Sat {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
}

/// First meaningful token pair decides the format when asked to sniff.
fn sniff_format(text: &str) -> GraphFormat {
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') || line.starts_with('c')
        {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            if rest.trim_start().starts_with("pds") {
                return GraphFormat::PdsText;
            }
            return GraphFormat::Dimacs;
        }
        break;
    }
    GraphFormat::EdgeList
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode> {
    let cfg = args.solver.build()?;
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let format = match args.format {
        FormatArg::Auto => sniff_format(&text),
        FormatArg::Edgelist => GraphFormat::EdgeList,
        FormatArg::Dimacs => GraphFormat::Dimacs,
        FormatArg::Pds => GraphFormat::PdsText,
    };
    let mode = match (args.mode, format) {
        (ModeArg::Auto, GraphFormat::PdsText) | (ModeArg::Pds, GraphFormat::PdsText) => ModeArg::Pds,
        (ModeArg::Pds, _) => bail!("--mode pds needs a pds-format instance"),
        (_, GraphFormat::PdsText) => bail!("--mode mds cannot read a pds instance"),
        _ => ModeArg::Mds,
    };
    let doc = match mode {
        ModeArg::Mds => {
            let parsed = io::parse_graph(&text, format)?;
            let result = solve::solve_mds(&parsed.graph, &cfg)?;
            io::ResultDoc::from_result(&result, |v| parsed.labels[v].clone())
        }
        ModeArg::Pds => {
            let h = io::parse_pds(&text)?;
            let result = solve::solve_pds(&h, &cfg)?;
            let labeled = result.solution.as_ref().map(|s| solve::origin_labels(&h, s));
            let mut doc = io::ResultDoc::from_result(&result, |v| v.to_string());
            doc.solution = labeled.map(|s| s.iter().map(usize::to_string).collect());
            doc
        }
        ModeArg::Auto => unreachable!("mode resolved above"),
    };
    let rendered = doc.to_text();
    match &args.out {
        Some(path) => std::fs::write(path, &rendered)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    eprintln!(
        "{}: status={} size={} s_num={} time={:.3}s",
        args.input.display(),
        match doc.status {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Timeout => "timeout",
            SolveStatus::Infeasible => "infeasible",
        },
        doc.size.map_or("-".into(), |s| s.to_string()),
        doc.s_num,
        doc.wall_time_seconds,
    );
    Ok(match doc.status {
        SolveStatus::Optimal => ExitCode::SUCCESS,
        SolveStatus::Timeout => ExitCode::from(2),
        SolveStatus::Infeasible => ExitCode::from(3),
    })
}

fn run_gen(args: &GenArgs) -> Result<ExitCode> {
    match &args.kind {
        GenKind::Gnm { n, m, seed, count, format, out } => {
            std::fs::create_dir_all(out)?;
            for i in 0..*count {
                let s = seed + i as u64;
                let g = gen::gnm(*n, *m, s)?;
                let (text, ext) = match format.as_str() {
                    "edgelist" => (io::write_edge_list(&g), "txt"),
                    "dimacs" => (io::write_dimacs(&g), "col"),
                    other => bail!("unknown graph format {other:?}"),
                };
                let path = out.join(format!("gnm_n{n}_m{m}_{s}.{ext}"));
                std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        GenKind::Sat { input, out } => {
            let text = std::fs::read_to_string(input)
                .with_context(|| format!("reading {}", input.display()))?;
            let formula = gen::parse_cnf(&text)?;
            let inst = gen::sat_to_pds(&formula);
            std::fs::create_dir_all(out)?;
            let stem = input
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("formula")
                .to_string();
            // Companion file: the bipartite literal/clause skeleton.
            let lits: Vec<usize> = inst.parts[..inst.target].iter().flatten().copied().collect();
            let clauses = &inst.parts[inst.target];
            let mut edges = Vec::new();
            for (ci, &cv) in clauses.iter().enumerate() {
                for &lv in inst.graph.neighbors(cv) {
                    let li = lits.iter().position(|&x| x == lv).expect("literal vertex");
                    edges.push((li, ci));
                }
            }
            let skeleton = domset::BipartiteInstance::from_parts(&lits, clauses, &edges);
            let pds_path = out.join(format!("{stem}.pds"));
            std::fs::write(&pds_path, io::write_pds(&skeleton))?;
            // Metadata: the part structure the skeleton cannot express.
            let mut meta = String::new();
            meta.push_str(&format!("num_vars = {}\n", formula.num_vars));
            meta.push_str(&format!("num_clauses = {}\n", formula.clauses.len()));
            meta.push_str(&format!("target_part = {}\n", inst.target));
            meta.push_str("# parts[i] lists the vertex ids of part i; the last part is the clause part\n");
            for (i, part) in inst.parts.iter().enumerate() {
                let ids: Vec<String> = part.iter().map(usize::to_string).collect();
                meta.push_str(&format!("part_{i} = [{}]\n", ids.join(", ")));
            }
            let meta_path = out.join(format!("{stem}.parts.toml"));
            std::fs::write(&meta_path, meta)?;
            eprintln!("wrote {} and {}", pds_path.display(), meta_path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_oracle(args: &OracleArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let is_cnf = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#') && !l.starts_with('%'))
        .is_some_and(|l| l.starts_with("p cnf"));
    let answer = if is_cnf {
        let formula = gen::parse_cnf(&text)?;
        match oracle::brute_force_kpds(&gen::sat_to_pds(&formula))? {
            oracle::KpdsOutcome::Size(k) => k.to_string(),
            oracle::KpdsOutcome::Infeasible => "infeasible".into(),
        }
    } else {
        match (args.mode, sniff_format(&text)) {
            (ModeArg::Pds, GraphFormat::PdsText) | (ModeArg::Auto, GraphFormat::PdsText) => {
                let h = io::parse_pds(&text)?;
                match oracle::brute_force_pds(&h)? {
                    oracle::PdsOutcome::Solution(s) => s.len().to_string(),
                    oracle::PdsOutcome::Infeasible => "infeasible".into(),
                }
            }
            (ModeArg::Pds, _) => bail!("--mode pds needs a pds-format instance"),
            (_, format) => {
                let parsed = io::parse_graph(&text, format)?;
                oracle::brute_force_mds(&parsed.graph)?.len().to_string()
            }
        }
    };
    println!("{answer}");
    Ok(ExitCode::SUCCESS)
}

/// Solution labels for CSV rows and result docs, shared with the harness.
fn labeled_solution(result: &solve::SolveResult, labels: Option<&[String]>) -> Option<Vec<String>> {
    result.solution.as_ref().map(|sol: &BTreeSet<usize>| {
        sol.iter()
            .map(|&v| match labels {
                Some(ls) => ls[v].clone(),
                None => v.to_string(),
            })
            .collect()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Bench(args) => bench::run(args),
        Command::Gen(args) => run_gen(args),
        Command::Oracle(args) => run_oracle(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
