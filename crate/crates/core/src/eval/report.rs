//! Accuracy aggregation and table output.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use crate::dataset::Dataset;
use crate::error::ReportError;
use crate::eval::score::{EvalRecord, FailureKind};
use crate::prompt::Strategy;
use crate::task::{Bucket, Task};

pub const EMPTY_CELL: &str = "—";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStats {
    pub correct: usize,
    pub total: usize,
    pub wrong_answer: usize,
    pub extraction_failed: usize,
    pub backend_error: usize,
}

impl CellStats {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }

    /// Accuracy in percent, rounded half-up, in exact integer arithmetic.
    pub fn percent(&self) -> Option<u64> {
        (self.total > 0).then(|| {
            let (c, t) = (self.correct as u64, self.total as u64);
            (200 * c + t) / (2 * t)
        })
    }

    fn add(&mut self, rec: &EvalRecord) {
        self.total += 1;
        match rec.failure {
            FailureKind::None => self.correct += 1,
            FailureKind::WrongAnswer => self.wrong_answer += 1,
            FailureKind::ExtractionFailed => self.extraction_failed += 1,
            FailureKind::BackendError => self.backend_error += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub model: String,
    pub backend: String,
    pub master_seed: u64,
    /// Latest transcript timestamp (RFC 3339, UTC), when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub task: Task,
    pub bucket: Bucket,
    pub strategy: Strategy,
    #[serde(flatten)]
    pub stats: CellStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub meta: RunMeta,
    /// Sorted by (task, bucket, strategy).
    pub cells: Vec<Cell>,
}

impl EvalReport {
    pub fn cell(&self, task: Task, bucket: Bucket, strategy: Strategy) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.task == task && c.bucket == bucket && c.strategy == strategy)
            .map(|c| &c.stats)
    }

    pub fn tasks(&self) -> BTreeSet<Task> {
        self.cells.iter().map(|c| c.task).collect()
    }

    pub fn buckets(&self) -> BTreeSet<Bucket> {
        self.cells.iter().map(|c| c.bucket).collect()
    }

    pub fn strategies(&self) -> BTreeSet<Strategy> {
        self.cells.iter().map(|c| c.strategy).collect()
    }

    pub fn overall(&self) -> CellStats {
        let mut total = CellStats::default();
        for c in &self.cells {
            total.correct += c.stats.correct;
            total.total += c.stats.total;
            total.wrong_answer += c.stats.wrong_answer;
            total.extraction_failed += c.stats.extraction_failed;
            total.backend_error += c.stats.backend_error;
        }
        total
    }
}

/// Folds records into per-(task, bucket, strategy) accuracy. Order-independent.
///
/// When a dataset is given, every record must name one of its instances.
pub fn aggregate_report(
    records: &[EvalRecord],
    dataset: Option<&Dataset>,
    meta: RunMeta,
) -> Result<EvalReport, ReportError> {
    let known: Option<HashSet<&str>> = dataset.map(|d| d.instances.iter().map(|i| i.id.as_str()).collect());
    let mut seen: HashSet<(&str, Strategy)> = HashSet::new();
    let mut cells: BTreeMap<(Task, Bucket, Strategy), CellStats> = BTreeMap::new();
    for rec in records {
        if let Some(known) = &known {
            if !known.contains(rec.instance_id.as_str()) {
                return Err(ReportError::UnknownInstance(rec.instance_id.clone()));
            }
        }
        if !seen.insert((rec.instance_id.as_str(), rec.strategy)) {
            return Err(ReportError::DuplicateRecord { id: rec.instance_id.clone(), strategy: rec.strategy.label() });
        }
        cells.entry((rec.task, rec.bucket, rec.strategy)).or_default().add(rec);
    }
    Ok(EvalReport {
        meta,
        cells: cells
            .into_iter()
            .map(|((task, bucket, strategy), stats)| Cell { task, bucket, strategy, stats })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "md",
        }
    }
}

/// Percent cells keyed by (bucket, strategy, task), plus the best-in-column flags.
struct Grid {
    tasks: Vec<Task>,
    rows: Vec<(Bucket, Strategy)>,
    values: HashMap<(Bucket, Strategy, Task), u64>,
    best: HashSet<(Bucket, Strategy, Task)>,
}

impl Grid {
    fn new(report: &EvalReport) -> Self {
        let tasks: Vec<Task> = report.tasks().into_iter().collect();
        let strategies: Vec<Strategy> = report.strategies().into_iter().collect();
        let rows = report
            .buckets()
            .into_iter()
            .flat_map(|b| strategies.iter().map(move |&s| (b, s)))
            .collect();
        let values: HashMap<_, _> = report
            .cells
            .iter()
            .filter_map(|c| c.stats.percent().map(|p| ((c.bucket, c.strategy, c.task), p)))
            .collect();
        // Best per (bucket, task) column block; ties are all flagged. A block
        // with a single populated cell has nothing to compare against.
        let mut best = HashSet::new();
        for bucket in report.buckets() {
            for &task in &tasks {
                let populated: Vec<(Strategy, u64)> = strategies
                    .iter()
                    .filter_map(|&s| values.get(&(bucket, s, task)).map(|&p| (s, p)))
                    .collect();
                if populated.len() < 2 {
                    continue;
                }
                let max = populated.iter().map(|&(_, p)| p).max().expect("nonempty");
                best.extend(populated.iter().filter(|&&(_, p)| p == max).map(|&(s, _)| (bucket, s, task)));
            }
        }
        Grid { tasks, rows, values, best }
    }

    fn cell(&self, bucket: Bucket, strategy: Strategy, task: Task) -> (Option<u64>, bool) {
        let key = (bucket, strategy, task);
        (self.values.get(&key).copied(), self.best.contains(&key))
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the accuracy matrix: one row per (bucket, strategy), one column
/// per task, percentages rounded half-up. With `flag_best`, the best cells
/// of each bucket block are bold (Markdown) or suffixed with `*` (CSV).
pub fn emit_report(report: &EvalReport, format: ReportFormat, flag_best: bool) -> String {
    let grid = Grid::new(report);
    let mut out = String::new();
    match format {
        ReportFormat::Markdown => {
            out.push_str("| Size | Method |");
            for t in &grid.tasks {
                write!(out, " {} |", t.title()).expect("write to string");
            }
            out.push_str("\n|---|---|");
            for _ in &grid.tasks {
                out.push_str("---:|");
            }
            out.push('\n');
            for &(bucket, strategy) in &grid.rows {
                write!(out, "| {bucket} | {strategy} |").expect("write to string");
                for &task in &grid.tasks {
                    let text = match grid.cell(bucket, strategy, task) {
                        (None, _) => EMPTY_CELL.to_string(),
                        (Some(p), true) if flag_best => format!("**{p}**"),
                        (Some(p), _) => p.to_string(),
                    };
                    write!(out, " {text} |").expect("write to string");
                }
                out.push('\n');
            }
        }
        ReportFormat::Csv => {
            out.push_str("size,method");
            for t in &grid.tasks {
                write!(out, ",{}", t.name()).expect("write to string");
            }
            out.push('\n');
            for &(bucket, strategy) in &grid.rows {
                write!(out, "{bucket},{}", csv_field(&strategy.label())).expect("write to string");
                for &task in &grid.tasks {
                    let text = match grid.cell(bucket, strategy, task) {
                        (None, _) => EMPTY_CELL.to_string(),
                        (Some(p), true) if flag_best => format!("{p}*"),
                        (Some(p), _) => p.to_string(),
                    };
                    write!(out, ",{text}").expect("write to string");
                }
                out.push('\n');
            }
        }
    }
    out
}
