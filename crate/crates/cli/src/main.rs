use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use semaudit_core::corpus::{self, Whitelist, DEFAULT_SUFFIX};
use semaudit_core::evolution::{self, EvolutionChain};
use semaudit_core::extract;
use semaudit_core::model::{ApiSnapshot, Diagnostic, MethodRecord, SnapshotDescriptor};
use semaudit_core::report::{self, ChainRow, DumpRow, FindingRow, SemRow};
use semaudit_core::semdiff;
use semaudit_core::stats::{self, PermutationConfig};
use semaudit_core::usage::{self, ScanOptions, UsageFinding, VersionCodes};

const CACHE_FORMAT: &str = "semaudit-snapshot-cache-1";

#[derive(Parser, Debug)]
#[command(
    name = "semaudit",
    version,
    about = "Audit API releases for silently-evolved methods"
)]
struct Cli {
    /// Tab-separated snapshot manifest: label, API level, root directory.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Whitelist of source path prefixes (defaults to the built-in list).
    #[arg(long, global = true)]
    whitelist: Option<PathBuf>,
    /// Compare comments and bodies literally.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, default_value = "semaudit-out")]
    out: PathBuf,
    #[arg(long, global = true, default_value = DEFAULT_SUFFIX)]
    suffix: String,
    /// Extra `name,level` rows for VERSION_CODES constants.
    #[arg(long, global = true)]
    codes_table: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    top: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump every snapshot of the manifest.
    Extract,
    /// Detect SEMs between two snapshots.
    Diff {
        #[arg(long)]
        old: String,
        #[arg(long)]
        new: String,
    },
    /// Track SEMs across all adjacent snapshot pairs.
    Chain,
    /// Scan client trees for calls to flagged public methods.
    Scan {
        /// SEM report written by `diff`.
        #[arg(long)]
        report: PathBuf,
        /// One client source tree; may be repeated.
        #[arg(long)]
        client: Vec<PathBuf>,
        /// Directory whose subdirectories are client trees.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Correlate per-pair metrics with SEM counts.
    Stats {
        #[arg(long)]
        metrics: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Extract => "extract",
            Command::Diff { .. } => "diff",
            Command::Chain => "chain",
            Command::Scan { .. } => "scan",
            Command::Stats { .. } => "stats",
        }
    }
}

/// Whether a command finished cleanly or with file-level diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Clean,
    Diagnostics,
}

impl Outcome {
    fn from_count(n: usize) -> Self {
        if n == 0 {
            Outcome::Clean
        } else {
            Outcome::Diagnostics
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Diagnostics) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output directory {}", cli.out.display()))?;
    let outcome = match &cli.command {
        Command::Extract => cmd_extract(cli)?,
        Command::Diff { old, new } => cmd_diff(cli, old, new)?,
        Command::Chain => cmd_chain(cli)?,
        Command::Scan {
            report,
            client,
            corpus,
        } => cmd_scan(cli, report, client, corpus.as_deref())?,
        Command::Stats { metrics } => cmd_stats(cli, metrics)?,
    };
    write_run_metadata(cli, outcome)?;
    Ok(outcome)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Timestamps live only here so that reports stay byte-identical.
fn write_run_metadata(cli: &Cli, outcome: Outcome) -> Result<()> {
    #[derive(Serialize)]
    struct RunMeta<'a> {
        command: &'a str,
        finished_unix_secs: u64,
        tool_version: &'a str,
        strict: bool,
        exit_code: u8,
    }
    let meta = RunMeta {
        command: cli.command.name(),
        finished_unix_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        tool_version: env!("CARGO_PKG_VERSION"),
        strict: cli.strict,
        exit_code: match outcome {
            Outcome::Clean => 0,
            Outcome::Diagnostics => 2,
        },
    };
    let path = cli.out.join(format!("run_{}.json", meta.command));
    write_file(&path, &(serde_json::to_string_pretty(&meta)? + "\n"))
}

fn load_descriptors(cli: &Cli) -> Result<Vec<SnapshotDescriptor>> {
    let Some(path) = &cli.manifest else {
        bail!("--manifest is required for this command");
    };
    let descs = corpus::load_manifest(path)
        .with_context(|| format!("invalid manifest {}", path.display()))?;
    for d in &descs {
        if !d.root.is_dir() {
            bail!(
                "snapshot `{}`: {} is not a directory",
                d.label,
                d.root.display()
            );
        }
    }
    Ok(descs)
}

fn load_whitelist(cli: &Cli) -> Result<Whitelist> {
    match &cli.whitelist {
        Some(p) => {
            corpus::load_whitelist(p).with_context(|| format!("invalid whitelist {}", p.display()))
        }
        None => Ok(Whitelist::builtin()),
    }
}

fn load_codes(cli: &Cli) -> Result<VersionCodes> {
    let mut codes = VersionCodes::builtin();
    if let Some(p) = &cli.codes_table {
        let extra = VersionCodes::load(p)
            .with_context(|| format!("invalid codes table {}", p.display()))?;
        codes.extend(&extra);
    }
    Ok(codes)
}

#[derive(Serialize, Deserialize)]
struct CachedSnapshot {
    methods: Vec<MethodRecord>,
    diagnostics: Vec<Diagnostic>,
}

/// Content hash of everything extraction depends on: the selected file
/// list and contents, the whitelist, the suffix and the comparison mode.
fn cache_key(cli: &Cli, desc: &SnapshotDescriptor, wl: &Whitelist) -> Result<String> {
    let listing = corpus::enumerate_sources(desc, wl, &cli.suffix)?;
    let mut h = Sha256::new();
    let mut field = |bytes: &[u8]| {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    };
    field(CACHE_FORMAT.as_bytes());
    field(desc.label.as_bytes());
    field(
        desc.api_level
            .map(|l| l.to_string())
            .unwrap_or_default()
            .as_bytes(),
    );
    field(cli.suffix.as_bytes());
    field(&[cli.strict as u8]);
    for e in wl.entries() {
        field(e.as_bytes());
    }
    field(b"--files--");
    for rel in &listing.files {
        field(rel.as_bytes());
        // unreadable files still get a stable key; extraction reports them
        let bytes = fs::read(desc.root.join(rel)).unwrap_or_default();
        field(&bytes);
    }
    for d in &listing.diagnostics {
        field(d.file.as_bytes());
        field(d.message.as_bytes());
    }
    Ok(hex::encode(h.finalize()))
}

fn load_snapshot(cli: &Cli, desc: &SnapshotDescriptor, wl: &Whitelist) -> Result<ApiSnapshot> {
    let key = cache_key(cli, desc, wl)?;
    let path = cli.out.join("cache").join(format!("{key}.json"));
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(cached) = serde_json::from_str::<CachedSnapshot>(&text) {
            let mut snap = ApiSnapshot::new(desc.clone());
            snap.methods = cached
                .methods
                .into_iter()
                .map(|m| (m.identity.clone(), m))
                .collect();
            snap.parse_diagnostics = cached.diagnostics;
            return Ok(snap);
        }
    }
    let snap = extract::extract_snapshot(desc, wl, &cli.suffix)
        .with_context(|| format!("cannot extract snapshot `{}`", desc.label))?;
    let cached = CachedSnapshot {
        methods: snap.methods.values().cloned().collect(),
        diagnostics: snap.parse_diagnostics.clone(),
    };
    write_file(&path, &serde_json::to_string(&cached)?)?;
    Ok(snap)
}

fn load_all(cli: &Cli) -> Result<Vec<ApiSnapshot>> {
    let wl = load_whitelist(cli)?;
    load_descriptors(cli)?
        .iter()
        .map(|d| load_snapshot(cli, d, &wl))
        .collect()
}

#[derive(Serialize)]
struct DiagnosticRow<'a> {
    snapshot: &'a str,
    file: &'a str,
    message: &'a str,
}

fn diagnostic_count(snaps: &[&ApiSnapshot]) -> usize {
    snaps.iter().map(|s| s.parse_diagnostics.len()).sum()
}

fn cmd_extract(cli: &Cli) -> Result<Outcome> {
    let snaps = load_all(cli)?;
    let mut diags = Vec::new();
    for s in &snaps {
        let rows = s.methods.values().map(|r| DumpRow::new(r, cli.strict));
        let path = cli
            .out
            .join("snapshots")
            .join(format!("{}.jsonl", s.label()));
        write_file(&path, &report::to_jsonl(rows)?)?;
        diags.extend(s.parse_diagnostics.iter().map(|d| DiagnosticRow {
            snapshot: s.label(),
            file: &d.file,
            message: &d.message,
        }));
    }
    write_file(
        &cli.out.join("diagnostics.jsonl"),
        &report::to_jsonl(&diags)?,
    )?;
    for s in &snaps {
        println!("{}: {} methods", s.label(), s.methods.len());
    }
    if !diags.is_empty() {
        eprintln!(
            "{} file-level diagnostics, see diagnostics.jsonl",
            diags.len()
        );
    }
    Ok(Outcome::from_count(diags.len()))
}

fn cmd_diff(cli: &Cli, old: &str, new: &str) -> Result<Outcome> {
    let wl = load_whitelist(cli)?;
    let descs = load_descriptors(cli)?;
    let find = |label: &str| {
        descs
            .iter()
            .find(|d| d.label == label)
            .with_context(|| format!("unknown snapshot label `{label}`"))
    };
    let (od, nd) = (find(old)?, find(new)?);
    let old_snap = load_snapshot(cli, od, &wl)?;
    let new_snap = load_snapshot(cli, nd, &wl)?;
    let sems = semdiff::detect_sems(&old_snap, &new_snap, cli.strict)?;

    let stem = format!("{old}__{new}");
    let rows = sems.iter().map(|e| SemRow::new(e, cli.strict));
    write_file(
        &cli.out.join(format!("sems_{stem}.jsonl")),
        &report::to_jsonl(rows)?,
    )?;
    write_file(
        &cli.out.join(format!("census_{stem}.csv")),
        &semdiff::census_modifiers(&sems)?.to_csv()?,
    )?;
    write_file(
        &cli.out.join(format!("triage_{stem}.csv")),
        &semdiff::triage_csv(&sems)?,
    )?;

    let pasems = sems.iter().filter(|e| e.is_pasem).count();
    println!("SEMs: {}, PASEMs: {}", sems.len(), pasems);
    Ok(Outcome::from_count(diagnostic_count(&[
        &old_snap, &new_snap,
    ])))
}

fn cmd_chain(cli: &Cli) -> Result<Outcome> {
    let snaps = load_all(cli)?;
    let pairs = evolution::detect_adjacent(&snaps, cli.strict)?;
    let chains = evolution::assemble_chains(&snaps, &pairs, cli.strict);

    let chain_rows = chains.iter().map(ChainRow::from);
    write_file(
        &cli.out.join("chains.jsonl"),
        &report::to_jsonl(chain_rows)?,
    )?;
    write_file(
        &cli.out.join("histogram_sem.csv"),
        &evolution::histogram_csv(&evolution::update_histogram(&chains, false)),
    )?;
    write_file(
        &cli.out.join("histogram_pasem.csv"),
        &evolution::histogram_csv(&evolution::update_histogram(&chains, true)),
    )?;
    let late: Vec<EvolutionChain> = evolution::late_doc_updates(&chains);
    write_file(
        &cli.out.join("late_doc_updates.jsonl"),
        &report::to_jsonl(late.iter().map(ChainRow::from))?,
    )?;
    let all: Vec<_> = pairs.into_iter().flatten().collect();
    write_file(
        &cli.out.join("transitions.csv"),
        &evolution::transition_graph(&all).to_csv()?,
    )?;

    println!(
        "chains: {}, late doc updates: {}, SEMs: {}",
        chains.len(),
        late.len(),
        all.len()
    );
    let refs: Vec<&ApiSnapshot> = snaps.iter().collect();
    Ok(Outcome::from_count(diagnostic_count(&refs)))
}

fn client_roots(clients: &[PathBuf], corpus_dir: Option<&Path>) -> Result<Vec<PathBuf>> {
    let mut roots: Vec<PathBuf> = clients.to_vec();
    if let Some(dir) = corpus_dir {
        let entries =
            fs::read_dir(dir).with_context(|| format!("cannot read corpus {}", dir.display()))?;
        let mut subdirs = Vec::new();
        for entry in entries {
            let path = entry?.path();
            if path.is_dir() {
                subdirs.push(path);
            }
        }
        subdirs.sort();
        roots.extend(subdirs);
    }
    if roots.is_empty() {
        bail!("no client trees given; use --client or --corpus");
    }
    for r in &roots {
        if !r.is_dir() {
            bail!("client {} is not a directory", r.display());
        }
    }
    Ok(roots)
}

fn cmd_scan(
    cli: &Cli,
    report_path: &Path,
    clients: &[PathBuf],
    corpus_dir: Option<&Path>,
) -> Result<Outcome> {
    let text = fs::read_to_string(report_path)
        .with_context(|| format!("cannot read SEM report {}", report_path.display()))?;
    let pasems = report::pasems_from_report(&text)
        .with_context(|| format!("malformed SEM report {}", report_path.display()))?;
    let roots = client_roots(clients, corpus_dir)?;
    let opts = ScanOptions {
        suffix: cli.suffix.clone(),
        codes: load_codes(cli)?,
    };

    let mut findings: Vec<UsageFinding> = Vec::new();
    let mut names = Vec::new();
    let mut diags = Vec::new();
    for root in &roots {
        let scan = usage::scan_call_sites(root, &pasems, &opts)
            .with_context(|| format!("cannot scan client {}", root.display()))?;
        diags.extend(
            scan.diagnostics
                .iter()
                .map(|d| (scan.client.clone(), d.clone())),
        );
        names.push(scan.client);
        findings.extend(scan.findings);
    }

    write_file(
        &cli.out.join("findings.jsonl"),
        &report::to_jsonl(findings.iter().map(FindingRow::from))?,
    )?;
    let summary = usage::aggregate_usage(&findings, &names, pasems.len());
    write_file(
        &cli.out.join("usage_summary.json"),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    let ranked = usage::rank_protected(&findings, cli.top as usize);
    write_file(
        &cli.out.join("protected_ranking.csv"),
        &usage::ranking_csv(&ranked)?,
    )?;
    let diag_rows: Vec<DiagnosticRow> = diags
        .iter()
        .map(|(c, d)| DiagnosticRow {
            snapshot: c,
            file: &d.file,
            message: &d.message,
        })
        .collect();
    write_file(
        &cli.out.join("scan_diagnostics.jsonl"),
        &report::to_jsonl(&diag_rows)?,
    )?;

    println!(
        "findings: {}, clients using flagged methods: {}/{}",
        findings.len(),
        summary.clients_using,
        summary.clients_total
    );
    Ok(Outcome::from_count(diags.len()))
}

fn cmd_stats(cli: &Cli, metrics: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(metrics)
        .with_context(|| format!("cannot read metrics {}", metrics.display()))?;
    let series = stats::parse_metrics_csv(&text)?;
    let cfg = PermutationConfig::default();
    let results = series
        .iter()
        .map(|s| stats::analyze(s, &cfg).with_context(|| format!("metric `{}`", s.metric)))
        .collect::<Result<Vec<_>>>()?;
    write_file(&cli.out.join("stats.jsonl"), &report::to_jsonl(&results)?)?;
    write_file(&cli.out.join("stats.dat"), &stats::gnuplot_data(&series))?;
    for r in &results {
        println!("{}: r={} p={} n={}", r.metric, r.r, r.p, r.n);
    }
    Ok(Outcome::Clean)
}
