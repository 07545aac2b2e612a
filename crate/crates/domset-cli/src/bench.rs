//! Benchmark harness: every instance in a directory, under each requested
//! configuration, in parallel at instance granularity (each search itself
//! is single-threaded). One instance's failure never aborts the batch.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use anyhow::{bail, Context, Result};
use clap::Args;

use domset::config::Config;
use domset::io::{self, GraphFormat};
use domset::solve::{self, SolveResult, SolveStatus};

use crate::{labeled_solution, sniff_format, SolverOptions};

#[derive(Args)]
pub struct BenchArgs {
    /// Directory of instance files.
    dir: PathBuf,
    /// Per-instance wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Parallel instances; defaults to the available cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Comma-separated configurations to run: `full`, `no-multilp`.
    #[arg(long, default_value = "full")]
    variants: String,
    #[command(flatten)]
    solver: SolverOptions,
}

struct Row {
    instance: String,
    category: String,
    variant: String,
    status: String,
    size: Option<usize>,
    s_num: u64,
    lp_calls: u64,
    multilp_calls: u64,
    multilp_tightened: u64,
    ldpb_fallbacks: u64,
    rule_fires: [u64; 9],
    wall_time_seconds: f64,
    solution: String,
    error: String,
}

impl Row {
    fn from_result(instance: &str, variant: &str, result: &SolveResult, labels: Option<&[String]>) -> Row {
        Row {
            instance: instance.into(),
            category: category_of(instance),
            variant: variant.into(),
            status: match result.status {
                SolveStatus::Optimal => "optimal".into(),
                SolveStatus::Timeout => "timeout".into(),
                SolveStatus::Infeasible => "infeasible".into(),
            },
            size: result.size(),
            s_num: result.stats.s_num,
            lp_calls: result.stats.lp_calls,
            multilp_calls: result.stats.multilp_calls,
            multilp_tightened: result.stats.multilp_tightened,
            ldpb_fallbacks: result.stats.ldpb_fallbacks,
            rule_fires: result.stats.rule_fires,
            wall_time_seconds: result.stats.wall_time_seconds,
            solution: labeled_solution(result, labels).map_or(String::new(), |s| s.join(";")),
            error: String::new(),
        }
    }

    fn failed(instance: &str, variant: &str, message: String) -> Row {
        Row {
            instance: instance.into(),
            category: category_of(instance),
            variant: variant.into(),
            status: "error".into(),
            size: None,
            s_num: 0,
            lp_calls: 0,
            multilp_calls: 0,
            multilp_tightened: 0,
            ldpb_fallbacks: 0,
            rule_fires: [0; 9],
            wall_time_seconds: 0.0,
            solution: String::new(),
            error: message,
        }
    }
}

/// Instance files grouped by the stem with a trailing `_<digits>` suffix
/// stripped, mirroring family naming like `V300E750_3`.
fn category_of(instance: &str) -> String {
    match instance.rsplit_once('_') {
        Some((head, tail)) if !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) => {
            head.to_string()
        }
        _ => instance.to_string(),
    }
}

fn solve_file(path: &Path, cfg: &Config) -> Result<(SolveResult, Option<Vec<String>>)> {
    let text = std::fs::read_to_string(path)?;
    match sniff_format(&text) {
        GraphFormat::PdsText => {
            let h = io::parse_pds(&text)?;
            let mut result = solve::solve_pds(&h, cfg)?;
            if let Some(sol) = result.solution.take() {
                let labels = solve::origin_labels(&h, &sol);
                result.solution = Some(labels);
            }
            Ok((result, None))
        }
        format => {
            let parsed = io::parse_graph(&text, format)?;
            let result = solve::solve_mds(&parsed.graph, cfg)?;
            Ok((result, Some(parsed.labels)))
        }
    }
}

pub fn run(args: &BenchArgs) -> Result<ExitCode> {
    let mut base = args.solver.build()?;
    if let Some(limit) = args.timeout {
        base.time_limit_seconds = Some(limit);
    }
    let variants: Vec<(String, Config)> = args
        .variants
        .split(',')
        .map(|name| match name.trim() {
            "full" => Ok(("full".to_string(), base)),
            "no-multilp" => {
                let mut cfg = base;
                cfg.multilp.enabled = false;
                Ok(("no-multilp".to_string(), cfg))
            }
            other => bail!("unknown variant {other:?} (expected full or no-multilp)"),
        })
        .collect::<Result<_>>()?;

    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .with_context(|| format!("reading directory {}", args.dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && !matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("toml") | Some("csv") | Some("md") | Some("cnf")
                )
                && !p
                    .file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with('.'))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no instance files in {}", args.dir.display());
    }

    let tasks: Vec<(&PathBuf, &(String, Config))> = files
        .iter()
        .flat_map(|f| variants.iter().map(move |v| (f, v)))
        .collect();
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<Row>();
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len()) {
            let tx = tx.clone();
            let tasks = &tasks;
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((path, (variant, cfg))) = tasks.get(i) else {
                    break;
                };
                let name = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("instance")
                    .to_string();
                let row = match solve_file(path, cfg) {
                    Ok((result, labels)) => {
                        Row::from_result(&name, variant, &result, labels.as_deref())
                    }
                    Err(err) => Row::failed(&name, variant, format!("{err:#}")),
                };
                let _ = tx.send(row);
            });
        }
        drop(tx);
    });
    let mut rows: Vec<Row> = rx.into_iter().collect();
    rows.sort_by(|a, b| (&a.instance, &a.variant).cmp(&(&b.instance, &b.variant)));

    write_csv(&rows, args.csv.as_deref())?;
    print_summary(&rows);
    Ok(ExitCode::SUCCESS)
}

fn write_csv(rows: &[Row], out: Option<&Path>) -> Result<()> {
    let mut header = vec![
        "instance".to_string(),
        "variant".into(),
        "status".into(),
        "size".into(),
        "s_num".into(),
        "lp_calls".into(),
        "multilp_calls".into(),
        "multilp_tightened".into(),
        "ldpb_fallbacks".into(),
    ];
    header.extend((1..=9).map(|k| format!("rule{k}_fires")));
    header.extend(["wall_time_seconds".to_string(), "solution".into(), "error".into()]);

    let mut writer: csv::Writer<Box<dyn std::io::Write>> = csv::Writer::from_writer(match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    });
    writer.write_record(&header)?;
    for row in rows {
        let mut record = vec![
            row.instance.clone(),
            row.variant.clone(),
            row.status.clone(),
            row.size.map_or(String::new(), |s| s.to_string()),
            row.s_num.to_string(),
            row.lp_calls.to_string(),
            row.multilp_calls.to_string(),
            row.multilp_tightened.to_string(),
            row.ldpb_fallbacks.to_string(),
        ];
        record.extend(row.rule_fires.iter().map(u64::to_string));
        record.push(format!("{:.3}", row.wall_time_seconds));
        record.push(row.solution.clone());
        record.push(row.error.clone());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-category totals in minutes. Raw rows keep exact times; only this
/// summary floors each run to 0.01 minutes, and `(k)` marks unsolved runs.
fn print_summary(rows: &[Row]) {
    let mut groups: std::collections::BTreeMap<(String, String), (f64, usize)> =
        std::collections::BTreeMap::new();
    for row in rows {
        let entry = groups
            .entry((row.category.clone(), row.variant.clone()))
            .or_insert((0.0, 0));
        entry.0 += (row.wall_time_seconds / 60.0).max(0.01);
        if row.status != "optimal" {
            entry.1 += 1;
        }
    }
    eprintln!("{:<28} {:<12} time(min)", "category", "variant");
    for ((category, variant), (minutes, unsolved)) in groups {
        let suffix = if unsolved > 0 { format!("({unsolved})") } else { String::new() };
        eprintln!("{category:<28} {variant:<12} {minutes:.2}{suffix}");
    }
}
