mod config;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use graphbench_core::client::{Backend, BackendSpec, Client, HttpChat, ModelConfig, ResponseCache, Transcript};
use graphbench_core::dataset::{assemble_subset, load_dataset, save_dataset, Dataset, LoadMode, DATASET_FILE};
use graphbench_core::eval::{aggregate_report, emit_report, EvalRecord, EvalReport, ReportFormat, RunMeta};
use graphbench_core::pipeline::{render_jobs, run_jobs, score_transcript};
use graphbench_core::prompt::{MstMode, Renderer};
use serde::Serialize;

use config::Settings;

#[derive(Parser)]
#[command(name = "graphbench", version, about = "Graph reasoning benchmark for language models")]
struct Cli {
    /// TOML file with default settings; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the dataset and its manifest.
    Generate(Common),
    /// Write rendered prompts without calling a model.
    Render(Common),
    /// Query a backend for every (instance, strategy) and score the answers.
    Run(RunArgs),
    /// Re-score saved transcripts.
    Score(ScoreArgs),
    /// Build an accuracy table from scored records.
    Report(ReportArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset directory or `dataset.jsonl` file.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Output directory (or file, for `render`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated task names.
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<String>>,
    /// Comma-separated size buckets (S, M, L).
    #[arg(long, value_delimiter = ',')]
    buckets: Option<Vec<String>>,
    /// Strategies: 0-shot, k-shot, bag, 0-cot, pseudo, pseudo+k-shot, or concrete labels like 3-shot.
    #[arg(long = "strategy", value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Pseudo-code styles for the pseudo strategies: python, pseudo, multifunction.
    #[arg(long = "style", value_delimiter = ',')]
    styles: Option<Vec<String>>,
    /// Shot counts for the k-shot strategies.
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<usize>>,
    /// How spanning-tree questions are posed: edge_set or count.
    #[arg(long, value_parser = parse_mst_mode)]
    mst_mode: Option<MstMode>,
    /// First node label shown to the model (default 0; 1 for topological sorting).
    #[arg(long)]
    label_base: Option<usize>,
    #[arg(long)]
    exemplar_seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// mock:oracle, mock:adversary, replay:<cache.jsonl>, or http[:<url>].
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    parallel: Option<usize>,
    /// Response cache; defaults to `<out>/cache.jsonl`.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    max_tokens: Option<u32>,
    /// Per-request timeout in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    #[arg(long)]
    retries: Option<u32>,
    /// Environment variable that holds the API key.
    #[arg(long)]
    api_key_env: Option<String>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    transcripts: PathBuf,
    /// Output directory for records and reports.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    records: PathBuf,
    /// When given, every record must belong to this dataset.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// markdown or csv.
    #[arg(long, default_value = "markdown")]
    format: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not mark the best strategy per column.
    #[arg(long)]
    no_flag_best: bool,
}

fn parse_mst_mode(s: &str) -> Result<MstMode, String> {
    match s.replace('-', "_").as_str() {
        "edge_set" | "edges" => Ok(MstMode::EdgeSet),
        "count" => Ok(MstMode::Count),
        _ => Err(format!("unknown MST mode `{s}` (edge_set or count)")),
    }
}

impl Common {
    fn settings(&self) -> Settings {
        Settings {
            seed: self.seed,
            dataset: self.dataset.clone(),
            out: self.out.clone(),
            tasks: self.tasks.clone(),
            buckets: self.buckets.clone(),
            strategies: self.strategies.clone(),
            styles: self.styles.clone(),
            shots: self.shots.clone(),
            mst_mode: self.mst_mode,
            label_base: self.label_base,
            exemplar_seed: self.exemplar_seed,
            ..Settings::default()
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Generate(args) => cmd_generate(&file.overlay(args.settings())),
        Command::Render(args) => cmd_render(&file.overlay(args.settings())),
        Command::Run(args) => cmd_run(file, args),
        Command::Score(args) => cmd_score(&file, args),
        Command::Report(args) => cmd_report(args),
    }
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a PathBuf> {
    value.as_ref().with_context(|| format!("missing --{flag}"))
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.push(b'\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

fn load(path: &Path) -> Result<Dataset> {
    let loaded = load_dataset(path, LoadMode::Strict).with_context(|| format!("loading dataset {}", path.display()))?;
    Ok(loaded.dataset)
}

/// The dataset restricted to the selected tasks and buckets.
fn select(dataset: Dataset, settings: &Settings) -> Result<Dataset> {
    let tasks = settings.tasks()?;
    let buckets = settings.buckets()?;
    Ok(Dataset {
        master_seed: dataset.master_seed,
        instances: dataset
            .instances
            .into_iter()
            .filter(|i| tasks.contains(&i.task) && buckets.contains(&i.bucket))
            .collect(),
    })
}

fn cmd_generate(s: &Settings) -> Result<()> {
    let out = required(&s.out, "out")?;
    let dataset = assemble_subset(s.seed(), &s.tasks()?, &s.buckets()?);
    let manifest = save_dataset(&dataset, out)?;
    let mut stdout = std::io::stdout().lock();
    for c in &manifest.counts {
        writeln!(stdout, "{:<22} {} {:>5}", c.task.name(), c.bucket, c.instances)?;
    }
    writeln!(stdout, "total: {}", manifest.total)?;
    writeln!(stdout, "digest: {}:{}", manifest.digest_algorithm, manifest.content_digest)?;
    writeln!(stdout, "wrote {}", out.join(DATASET_FILE).display())?;
    Ok(())
}

fn cmd_render(s: &Settings) -> Result<()> {
    let full = load(required(&s.dataset, "dataset")?)?;
    let renderer = Renderer::new(s.render_options()).excluding(&full.instances);
    let dataset = select(full, s)?;
    let jobs = render_jobs(&dataset, &s.strategies()?, &renderer)?;
    let bundles: Vec<_> = jobs.into_iter().map(|j| j.bundle).collect();
    match &s.out {
        Some(path) => {
            let path = if path.is_dir() { path.join("prompts.jsonl") } else { path.clone() };
            write_jsonl(&path, &bundles)?;
            println!("rendered {} prompts to {}", bundles.len(), path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for b in &bundles {
                serde_json::to_writer(&mut stdout, b)?;
                writeln!(stdout)?;
            }
        }
    }
    Ok(())
}

fn model_config(base: Option<ModelConfig>, args: &RunArgs) -> ModelConfig {
    let mut cfg = base.unwrap_or_default();
    if let Some(v) = &args.model {
        cfg.model = v.clone();
    }
    if let Some(v) = &args.endpoint {
        cfg.endpoint = v.clone();
    }
    if let Some(v) = args.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = args.max_tokens {
        cfg.max_tokens = v;
    }
    if let Some(v) = args.timeout {
        cfg.timeout_secs = v;
    }
    if let Some(v) = args.retries {
        cfg.max_retries = v;
    }
    if let Some(v) = &args.api_key_env {
        cfg.api_key_env = v.clone();
    }
    cfg
}

/// Counts written beside the reports. Contains nothing that varies between
/// repeated runs over the same inputs and cache.
#[derive(Serialize)]
struct Summary {
    dataset_digest: String,
    master_seed: u64,
    backend: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    strategies: Vec<String>,
    instances: usize,
    queries: usize,
    correct: usize,
    wrong_answer: usize,
    extraction_failed: usize,
    backend_error: usize,
    accuracy_percent: BTreeMap<String, u64>,
}

fn write_reports(dir: &Path, report: &EvalReport) -> Result<()> {
    for format in [ReportFormat::Markdown, ReportFormat::Csv] {
        let path = dir.join(format!("report.{}", format.extension()));
        fs::write(&path, emit_report(report, format, true)).with_context(|| format!("writing {}", path.display()))?;
    }
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)? + "\n")?;
    Ok(())
}

fn latest_timestamp(transcripts: &[Transcript]) -> Option<String> {
    // RFC 3339 UTC stamps of equal precision sort lexicographically.
    transcripts.iter().map(|t| t.timestamp.clone()).max()
}

fn cmd_run(file: Settings, args: RunArgs) -> Result<()> {
    let flags = Settings {
        backend: args.backend.clone(),
        parallel: args.parallel,
        cache: args.cache.clone(),
        ..args.common.settings()
    };
    let s = file.overlay(flags);
    let out = required(&s.out, "out")?.clone();
    let dataset_path = required(&s.dataset, "dataset")?.clone();
    let strategies = s.strategies()?;
    let parallel = s.parallel()?;
    let mut model = model_config(s.model.clone(), &args);

    let spec: BackendSpec = s.backend.as_deref().unwrap_or("mock:oracle").parse().map_err(anyhow::Error::msg)?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let cache_path = s.cache.clone().unwrap_or_else(|| out.join("cache.jsonl"));
    let (backend, cache) = match spec {
        BackendSpec::MockOracle => (Backend::MockOracle, ResponseCache::open(&cache_path)?),
        BackendSpec::MockAdversary => (Backend::MockAdversary, ResponseCache::open(&cache_path)?),
        BackendSpec::Replay(path) => (Backend::Replay, ResponseCache::read_only(&path)?),
        BackendSpec::Http(url) => {
            if let Some(url) = url {
                model.endpoint = url;
            }
            (Backend::HttpChat(HttpChat::new(&model)?), ResponseCache::open(&cache_path)?)
        }
    };
    let client = Client::new(backend, model.clone(), Some(cache));

    let full = load(&dataset_path)?;
    let digest = graphbench_core::dataset::sha256_hex(&full.to_jsonl());
    let renderer = Renderer::new(s.render_options()).excluding(&full.instances);
    let dataset = select(full, &s)?;
    let jobs = render_jobs(&dataset, &strategies, &renderer)?;
    eprintln!("running {} queries ({} instances x {} strategies), parallel {parallel}", jobs.len(), dataset.instances.len(), strategies.len());
    let run = run_jobs(&jobs, &client, parallel);
    eprintln!(
        "done: {} cached, {} fresh, {} backend errors, max in flight {}",
        run.stats.cache_hits,
        run.stats.queries - run.stats.cache_hits - run.stats.backend_errors,
        run.stats.backend_errors,
        run.stats.max_in_flight
    );

    write_jsonl(&out.join("transcripts.jsonl"), &run.transcripts)?;
    write_jsonl(&out.join("records.jsonl"), &run.records)?;
    let meta = RunMeta {
        model: client.model_id(),
        backend: client.backend.kind().to_string(),
        master_seed: dataset.master_seed,
        timestamp: latest_timestamp(&run.transcripts),
    };
    let report = aggregate_report(&run.records, Some(&dataset), meta)?;
    write_reports(&out, &report)?;

    let overall = report.overall();
    let summary = Summary {
        dataset_digest: digest,
        master_seed: dataset.master_seed,
        backend: client.backend.kind().to_string(),
        model: client.model_id(),
        temperature: model.temperature,
        max_tokens: model.max_tokens,
        strategies: strategies.iter().map(|s| s.label()).collect(),
        instances: dataset.instances.len(),
        queries: run.records.len(),
        correct: overall.correct,
        wrong_answer: overall.wrong_answer,
        extraction_failed: overall.extraction_failed,
        backend_error: overall.backend_error,
        accuracy_percent: report
            .cells
            .iter()
            .filter_map(|c| c.stats.percent().map(|p| (format!("{}/{}/{}", c.task.name(), c.bucket, c.strategy), p)))
            .collect(),
    };
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    println!("{}", emit_report(&report, ReportFormat::Markdown, true));
    println!("accuracy: {}/{}", overall.correct, overall.total);
    Ok(())
}

fn cmd_score(file: &Settings, args: ScoreArgs) -> Result<()> {
    let dataset_path = args.dataset.or_else(|| file.dataset.clone()).context("missing --dataset")?;
    let dataset = load(&dataset_path)?;
    let index = dataset.index();
    let transcripts: Vec<Transcript> = read_jsonl(&args.transcripts)?;
    let records: Vec<EvalRecord> = transcripts
        .iter()
        .map(|t| {
            let inst = index.get(t.instance_id.as_str()).with_context(|| format!("unknown instance {}", t.instance_id))?;
            Ok(score_transcript(inst, t))
        })
        .collect::<Result<_>>()?;
    fs::create_dir_all(&args.out)?;
    write_jsonl(&args.out.join("records.jsonl"), &records)?;
    let meta = RunMeta {
        model: transcripts.first().map(|t| t.model.clone()).unwrap_or_default(),
        backend: transcripts.first().map(|t| t.backend.clone()).unwrap_or_default(),
        master_seed: dataset.master_seed,
        timestamp: latest_timestamp(&transcripts),
    };
    let report = aggregate_report(&records, Some(&dataset), meta)?;
    write_reports(&args.out, &report)?;
    let overall = report.overall();
    println!("scored {} transcripts: {}/{} correct", records.len(), overall.correct, overall.total);
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse().map_err(anyhow::Error::msg)?;
    let records: Vec<EvalRecord> = read_jsonl(&args.records)?;
    let dataset = args.dataset.as_deref().map(load).transpose()?;
    let master_seed = dataset.as_ref().map_or(0, |d| d.master_seed);
    let report = aggregate_report(&records, dataset.as_ref(), RunMeta { master_seed, ..RunMeta::default() })?;
    if report.cells.is_empty() {
        bail!("no records in {}", args.records.display());
    }
    let text = emit_report(&report, format, !args.no_flag_best);
    match args.out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
