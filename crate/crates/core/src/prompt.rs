//! Prompt rendering for the six prompting strategies.
//!
//! A prompt is built from fixed blocks separated by blank lines:
//!
//! 1. task description (plus the build-a-graph sentence for `BaG`),
//! 2. pseudo-code block (pseudo-code strategies only),
//! 3. exemplar block (k-shot strategies only),
//! 4. the query graph's edge list,
//! 5. the question and the answer-format line,
//! 6. `A:` (or `A: Let's think step by step.` for zero-shot CoT).
//!
//! Rendering is a pure function of the instance, the strategy, the options
//! and the bundled pseudo-code assets.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::dataset::{gold_answer, sample_queries, task_graph, TaskInstance};
use crate::error::PromptError;
use crate::generate::GeneratorConfig;
use crate::graph::Graph;
use crate::oracle::Answer;
use crate::seed::{derive_exemplar_seed, BenchRng};
use crate::task::{AnswerKind, Bucket, Query, Task};

pub const BUILD_A_GRAPH: &str = "Let's construct a graph with the nodes and edges first.";
pub const STEP_BY_STEP: &str = "Let's think step by step.";
pub const DEFAULT_EXEMPLAR_SEED: u64 = 0x5eed_e8e3;
pub const MAX_SHOTS: usize = 5;

/// Pseudo-code flavor. Declaration order matches the style ablation (1, 2, 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Style {
    /// A single Python function.
    PythonStyle,
    /// A single routine in plain pseudo-code. The default.
    PlainPseudo,
    /// Plain pseudo-code split into several helper routines.
    MultiFunction,
}

impl Style {
    pub const ALL: [Style; 3] = [Style::PythonStyle, Style::PlainPseudo, Style::MultiFunction];

    /// Asset file infix, as in `<task>.<style>.txt`.
    pub fn name(self) -> &'static str {
        match self {
            Style::PythonStyle => "python",
            Style::PlainPseudo => "pseudo",
            Style::MultiFunction => "multifunction",
        }
    }
}

impl Default for Style {
    fn default() -> Self {
        Style::PlainPseudo
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Style {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "python" | "1" => Ok(Style::PythonStyle),
            "pseudo" | "plain" | "2" => Ok(Style::PlainPseudo),
            "multifunction" | "multi" | "complex" | "3" => Ok(Style::MultiFunction),
            _ => Err(PromptError::UnknownStyle(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    ZeroShot,
    KShot(usize),
    BaG,
    ZeroCoT,
    Pseudo(Style),
    PseudoKShot(Style, usize),
}

impl Strategy {
    /// The six strategies compared in the main experiments.
    pub const PAPER_SET: [Strategy; 6] = [
        Strategy::ZeroShot,
        Strategy::KShot(1),
        Strategy::BaG,
        Strategy::ZeroCoT,
        Strategy::Pseudo(Style::PlainPseudo),
        Strategy::PseudoKShot(Style::PlainPseudo, 1),
    ];

    pub fn shots(self) -> usize {
        match self {
            Strategy::KShot(k) | Strategy::PseudoKShot(_, k) => k,
            _ => 0,
        }
    }

    pub fn style(self) -> Option<Style> {
        match self {
            Strategy::Pseudo(s) | Strategy::PseudoKShot(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn label(self) -> String {
        let suffix = |s: Style| match s {
            Style::PlainPseudo => String::new(),
            other => format!("/{other}"),
        };
        match self {
            Strategy::ZeroShot => "0-shot".into(),
            Strategy::KShot(k) => format!("{k}-shot"),
            Strategy::BaG => "BaG".into(),
            Strategy::ZeroCoT => "0-CoT".into(),
            Strategy::Pseudo(s) => format!("Pseudo{}", suffix(s)),
            Strategy::PseudoKShot(s, k) => format!("Pseudo+{k}-shot{}", suffix(s)),
        }
    }

    fn validate(self) -> Result<Self, PromptError> {
        match self {
            Strategy::KShot(0) | Strategy::PseudoKShot(_, 0) => Err(PromptError::ZeroShots(self.label())),
            _ => Ok(self),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn parse_shots(s: &str) -> Option<usize> {
    s.strip_suffix("-shot")?.parse().ok()
}

impl FromStr for Strategy {
    type Err = PromptError;

    /// Accepts the labels produced by [`Strategy::label`], case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || PromptError::UnknownStrategy(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let (base, style) = match lower.split_once('/') {
            Some((b, st)) => (b.to_string(), Some(st.parse::<Style>()?)),
            None => (lower, None),
        };
        let strategy = match (base.as_str(), style) {
            ("0-shot" | "zero-shot", None) => Strategy::ZeroShot,
            ("bag", None) => Strategy::BaG,
            ("0-cot" | "zero-cot", None) => Strategy::ZeroCoT,
            ("pseudo", st) => Strategy::Pseudo(st.unwrap_or_default()),
            (b, st) => {
                if let Some(rest) = b.strip_prefix("pseudo+") {
                    Strategy::PseudoKShot(st.unwrap_or_default(), parse_shots(rest).ok_or_else(unknown)?)
                } else if st.is_none() {
                    match parse_shots(b).ok_or_else(unknown)? {
                        0 => Strategy::ZeroShot,
                        k => Strategy::KShot(k),
                    }
                } else {
                    return Err(unknown());
                }
            }
        };
        strategy.validate()
    }
}

impl TryFrom<String> for Strategy {
    type Error = PromptError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.label()
    }
}

/// Expands strategy tokens over the shot counts and styles of an ablation.
///
/// `k-shot` and `pseudo+k-shot` (a literal `k`) expand over `shots`; a bare
/// `pseudo` or `pseudo+k-shot` expands over `styles`. Concrete labels such as
/// `3-shot` or `pseudo/python` pass through unchanged. Duplicates are dropped
/// and the result keeps first-seen order.
pub fn expand_strategies(tokens: &[String], shots: &[usize], styles: &[Style]) -> Result<Vec<Strategy>, PromptError> {
    let shots: &[usize] = if shots.is_empty() { &[1] } else { shots };
    let styles: &[Style] = if styles.is_empty() { &[Style::PlainPseudo] } else { styles };
    let mut out = Vec::new();
    let mut push = |s: Strategy| -> Result<(), PromptError> {
        let s = s.validate()?;
        if !out.contains(&s) {
            out.push(s);
        }
        Ok(())
    };
    for token in tokens {
        let t = token.trim().to_ascii_lowercase();
        match t.as_str() {
            "k-shot" => {
                for &k in shots {
                    push(Strategy::KShot(k))?;
                }
            }
            "pseudo" => {
                for &st in styles {
                    push(Strategy::Pseudo(st))?;
                }
            }
            "pseudo+k-shot" => {
                for &st in styles {
                    for &k in shots {
                        push(Strategy::PseudoKShot(st, k))?;
                    }
                }
            }
            _ => push(t.parse()?)?,
        }
    }
    Ok(out)
}

/// How the spanning-tree task is posed and scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MstMode {
    /// Ask for the tree's edges; any valid spanning tree scores as correct.
    #[default]
    EdgeSet,
    /// Ask for the number of edges in the tree (`n - c`).
    Count,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    /// Overrides the per-task label base (0, or 1 for topological sorting).
    pub label_base: Option<usize>,
    pub mst_mode: MstMode,
    pub exemplar_seed: u64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { label_base: None, mst_mode: MstMode::EdgeSet, exemplar_seed: DEFAULT_EXEMPLAR_SEED }
    }
}

impl RenderOptions {
    pub fn label_base(&self, task: Task) -> usize {
        self.label_base.unwrap_or_else(|| task.default_label_base())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub instance_id: String,
    pub task: Task,
    pub bucket: Bucket,
    pub strategy: Strategy,
    pub label_base: usize,
    pub mst_mode: MstMode,
    pub encoding: String,
    pub text: String,
}

/// Edge-list encoding of a graph with labels starting at `label_base`.
pub fn encode_edge_list(g: &Graph, label_base: usize) -> String {
    let n = g.node_count();
    let mut out = format!("The graph has {n} nodes, numbered {}..{}. ", label_base, label_base + n - 1);
    out.push_str(if g.is_directed() { "Directed edges (from, to): " } else { "Edges: " });
    if g.edge_count() == 0 {
        out.push_str("(none)");
    }
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "({}, {})", u + label_base, v + label_base).expect("write to string");
    }
    out
}

macro_rules! asset {
    ($task:literal, $style:literal) => {
        include_str!(concat!("../assets/pseudocode/", $task, ".", $style, ".txt"))
    };
}

macro_rules! assets_for {
    ($task:literal) => {
        [asset!($task, "python"), asset!($task, "pseudo"), asset!($task, "multifunction")]
    };
}

fn asset_table(task: Task) -> [&'static str; 3] {
    match task {
        Task::NodeCount => assets_for!("node_count"),
        Task::EdgeCount => assets_for!("edge_count"),
        Task::NodeDegree => assets_for!("node_degree"),
        Task::Neighbors => assets_for!("neighbors"),
        Task::ConnectedComponents => assets_for!("connected_components"),
        Task::CycleCheck => assets_for!("cycle_check"),
        Task::Mst => assets_for!("mst"),
        Task::ShortestPath => assets_for!("shortest_path"),
        Task::BipartiteCheck => assets_for!("bipartite_check"),
        Task::TopologicalSort => assets_for!("topological_sort"),
    }
}

/// The bundled pseudo-code for a task in a style.
pub fn pseudocode_for(task: Task, style: Style) -> Result<&'static str, PromptError> {
    let text = asset_table(task)[style as usize];
    if text.trim().is_empty() {
        return Err(PromptError::MissingAsset { task: task.to_string(), style: style.to_string() });
    }
    Ok(text)
}

/// Asset file name for `(task, style)`.
pub fn asset_file_name(task: Task, style: Style) -> String {
    format!("{task}.{style}.txt")
}

fn graph_kind(task: Task) -> &'static str {
    match task {
        Task::TopologicalSort => "a directed acyclic graph",
        _ => "an undirected graph",
    }
}

fn task_description(task: Task, mst_mode: MstMode) -> &'static str {
    match (task, mst_mode) {
        (Task::NodeCount, _) => "Your task is to count how many nodes the graph has.",
        (Task::EdgeCount, _) => "Your task is to count how many edges the graph has.",
        (Task::NodeDegree, _) => {
            "Your task is to compute the degree of a given node, i.e. how many edges touch it."
        }
        (Task::Neighbors, _) => "Your task is to list every node that shares an edge with a given node.",
        (Task::ConnectedComponents, _) => "Your task is to count the connected components of the graph.",
        (Task::CycleCheck, _) => "Your task is to decide whether the graph has a cycle.",
        (Task::Mst, MstMode::EdgeSet) => {
            "Your task is to find a minimum spanning tree: a smallest set of edges of the graph \
             that keeps every node connected and forms no cycle."
        }
        (Task::Mst, MstMode::Count) => {
            "Your task is to determine how many edges a minimum spanning tree of the graph has. \
             A minimum spanning tree is a smallest set of edges that keeps every node connected \
             and forms no cycle."
        }
        (Task::ShortestPath, _) => {
            "Your task is to compute the shortest path length, counted in edges, between two given nodes."
        }
        (Task::BipartiteCheck, _) => "Your task is to decide whether the graph is bipartite.",
        (Task::TopologicalSort, _) => {
            "Your task is to order all of its nodes so that every directed edge goes from \
             an earlier node to a later node."
        }
    }
}

fn question(task: Task, query: Query, base: usize, mst_mode: MstMode) -> String {
    match (task, query) {
        (Task::NodeCount, _) => "How many nodes does the graph have?".into(),
        (Task::EdgeCount, _) => "How many edges does the graph have?".into(),
        (Task::NodeDegree, Query::Node(u)) => format!("What is the degree of node {}?", u + base),
        (Task::Neighbors, Query::Node(u)) => format!("Which nodes are adjacent to node {}?", u + base),
        (Task::ConnectedComponents, _) => "How many connected components does the graph have?".into(),
        (Task::CycleCheck, _) => "Does the graph contain a cycle?".into(),
        (Task::Mst, _) => match mst_mode {
            MstMode::EdgeSet => "Which edges form a minimum spanning tree of the graph?".into(),
            MstMode::Count => "How many edges does a minimum spanning tree of the graph have?".into(),
        },
        (Task::ShortestPath, Query::Pair(u, v)) => format!(
            "What is the length of the shortest path between node {} and node {}?",
            u + base,
            v + base
        ),
        (Task::BipartiteCheck, _) => "Is the graph bipartite?".into(),
        (Task::TopologicalSort, _) => "What is a topological ordering of the nodes?".into(),
        (task, query) => format!("(query {query:?} does not fit {task})"),
    }
}

pub fn answer_kind(task: Task, mst_mode: MstMode) -> AnswerKind {
    match (task, mst_mode) {
        (Task::Mst, MstMode::Count) => AnswerKind::Int,
        (t, _) => t.answer_kind(),
    }
}

fn format_hint(kind: AnswerKind) -> &'static str {
    match kind {
        AnswerKind::Int => "a single integer",
        AnswerKind::Bool => "Yes or No",
        AnswerKind::NodeSet => "the node labels inside square brackets, e.g. [2, 5, 7], or [] if there are none",
        AnswerKind::NodeSeq => "all node labels in order inside square brackets, e.g. [3, 1, 2]",
        AnswerKind::EdgeSet => "the edges inside square brackets, e.g. [(0, 1), (1, 2)]",
    }
}

fn format_line(kind: AnswerKind) -> String {
    format!("End your response with a line of the form \"Answer: <value>\", where <value> is {}.", format_hint(kind))
}

/// Renders an answer (already in surface labels) the way prompts ask for it.
pub fn format_answer(answer: &Answer) -> String {
    fn list(items: impl Iterator<Item = String>) -> String {
        format!("[{}]", items.collect::<Vec<_>>().join(", "))
    }
    match answer {
        Answer::Int(x) => x.to_string(),
        Answer::Bool(true) => "Yes".into(),
        Answer::Bool(false) => "No".into(),
        Answer::NodeSet(s) => list(s.iter().map(|u| u.to_string())),
        Answer::NodeSeq(s) => list(s.iter().map(|u| u.to_string())),
        Answer::EdgeSet(s) => list(s.iter().map(|(u, v)| format!("({u}, {v})"))),
    }
}

/// The answer a task expects in the given MST mode, in internal labels.
pub fn expected_answer(inst: &TaskInstance, mst_mode: MstMode) -> Answer {
    match (inst.task, mst_mode, &inst.gold) {
        (Task::Mst, MstMode::Count, Answer::EdgeSet(es)) => Answer::Int(es.len() as u64),
        _ => inst.gold.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exemplar {
    pub graph: Graph,
    pub query: Query,
    pub question: String,
    pub answer: String,
}

/// `k` worked examples for a task, each on its own freshly generated graph.
///
/// Exemplar graphs come from a separate seed domain and are redrawn if they
/// appear in `exclude` (typically the evaluation graphs).
pub fn build_exemplars(
    task: Task,
    bucket: Bucket,
    k: usize,
    options: &RenderOptions,
    exclude: &HashSet<Graph>,
) -> Result<Vec<Exemplar>, PromptError> {
    if k == 0 {
        return Err(PromptError::ZeroShots(format!("{task} exemplars")));
    }
    let base = options.label_base(task);
    let cfg = GeneratorConfig::for_bucket(bucket);
    (0..k)
        .map(|i| {
            let mut rng = BenchRng::from_seed(derive_exemplar_seed(options.exemplar_seed, task, bucket, i as u64));
            let graph = loop {
                let (g, _) = task_graph(task, &cfg, 1, &mut rng);
                if !exclude.contains(&g) {
                    break g;
                }
            };
            let query = sample_queries(task, &graph, 1, &mut rng)[0];
            let gold = gold_answer(task, &graph, query).map_err(|e| PromptError::BadInstance(e.to_string()))?;
            let gold = match (task, options.mst_mode, gold) {
                (Task::Mst, MstMode::Count, Answer::EdgeSet(es)) => Answer::Int(es.len() as u64),
                (_, _, g) => g,
            };
            Ok(Exemplar {
                question: question(task, query, base, options.mst_mode),
                answer: format_answer(&gold.to_surface(base)),
                graph,
                query,
            })
        })
        .collect()
}

/// Prompt renderer holding options and the set of graphs exemplars must avoid.
#[derive(Debug, Clone, Default)]
pub struct Renderer {
    pub options: RenderOptions,
    exclude: HashSet<Graph>,
}

impl Renderer {
    pub fn new(options: RenderOptions) -> Self {
        Renderer { options, exclude: HashSet::new() }
    }

    /// Keeps exemplars disjoint from the given evaluation instances.
    pub fn excluding<'a>(mut self, instances: impl IntoIterator<Item = &'a TaskInstance>) -> Self {
        self.exclude.extend(instances.into_iter().map(|i| i.graph.clone()));
        self
    }

    pub fn render(&self, inst: &TaskInstance, strategy: Strategy) -> Result<PromptBundle, PromptError> {
        let strategy = strategy.validate()?;
        let task = inst.task;
        let base = self.options.label_base(task);
        let mst_mode = self.options.mst_mode;
        let mut blocks: Vec<String> = Vec::new();

        let mut intro = format!("You are given {}. {}", graph_kind(task), task_description(task, mst_mode));
        if strategy == Strategy::BaG {
            intro.push(' ');
            intro.push_str(BUILD_A_GRAPH);
        }
        blocks.push(intro);

        if let Some(style) = strategy.style() {
            blocks.push(format!(
                "The following pseudo-code solves this task:\n```\n{}```",
                pseudocode_for(task, style)?
            ));
        }

        let k = strategy.shots();
        if k > 0 {
            let exemplars = build_exemplars(task, inst.bucket, k, &self.options, &self.exclude)?;
            let mut block = String::from(if k == 1 { "Here is a solved example." } else { "Here are some solved examples." });
            for (i, ex) in exemplars.iter().enumerate() {
                write!(
                    block,
                    "\n\nExample {}:\n{}\nQ: {}\nA: Answer: {}",
                    i + 1,
                    encode_edge_list(&ex.graph, base),
                    ex.question,
                    ex.answer
                )
                .expect("write to string");
            }
            block.push_str("\n\nNow solve the following problem.");
            blocks.push(block);
        }

        blocks.push(encode_edge_list(&inst.graph, base));
        blocks.push(format!(
            "Q: {}\n{}",
            question(task, inst.query, base, mst_mode),
            format_line(answer_kind(task, mst_mode))
        ));
        blocks.push(if strategy == Strategy::ZeroCoT { format!("A: {STEP_BY_STEP}") } else { "A:".into() });

        let mut text = blocks.join("\n\n");
        text.push('\n');
        Ok(PromptBundle {
            instance_id: inst.id.clone(),
            task,
            bucket: inst.bucket,
            strategy,
            label_base: base,
            mst_mode,
            encoding: "edge_list".into(),
            text,
        })
    }
}

/// Renders with default options and no exemplar exclusions.
pub fn render_prompt(inst: &TaskInstance, strategy: Strategy) -> Result<PromptBundle, PromptError> {
    Renderer::default().render(inst, strategy)
}
