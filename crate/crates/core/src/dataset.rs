//! Benchmark assembly and JSONL persistence.
//!
//! Each `(task, bucket)` cell gets 100 independently generated graphs. Graph
//! level tasks yield one instance per graph; node degree and neighbors yield
//! five distinct sampled nodes per graph; shortest path yields five distinct
//! node pairs drawn from within one component. With all ten tasks and three
//! buckets that is 2,100 + 3,000 + 1,500 = 6,600 instances.
//!
//! On disk a dataset is `dataset.jsonl` (a schema header line, then one
//! instance per line) plus `manifest.json`, which carries per-cell counts and
//! the SHA-256 digest of the dataset file.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{DatasetError, OracleError};
use crate::generate::{gen_er_dag_with, gen_er_with, gen_random_bipartite_with, GeneratorConfig};
use crate::graph::{Graph, Node};
use crate::oracle::{self, Answer};
use crate::seed::{derive_instance_seed, BenchRng};
use crate::task::{Bucket, Query, Task, TaskLevel};

pub const SCHEMA_VERSION: u32 = 1;
pub const GENERATOR_VERSION: &str = "graphbench-gen/1";
pub const DATASET_FILE: &str = "dataset.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const GRAPHS_PER_CELL: usize = 100;
pub const QUERIES_PER_GRAPH: usize = 5;

/// How an instance's graph was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Er,
    ErDag,
    Bipartite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub task: Task,
    pub bucket: Bucket,
    pub graph_index: usize,
    pub query_index: usize,
    pub query: Query,
    pub graph: Graph,
    /// Oracle answer. For the spanning-tree and topological tasks this is one
    /// valid answer among many; scoring uses the validators instead.
    pub gold: Answer,
    pub seed: u64,
    pub construction: Construction,
}

pub fn instance_id(task: Task, bucket: Bucket, graph_index: usize, query_index: usize) -> String {
    format!("{task}-{bucket}-{graph_index}-{query_index}")
}

/// Gold answer for a task on a graph. MST gold is the edge-set form.
pub fn gold_answer(task: Task, g: &Graph, query: Query) -> Result<Answer, OracleError> {
    let node = |q: Query| match q {
        Query::Node(u) => Ok(u),
        _ => Err(OracleError::UnknownNode { node: Node::MAX, n: g.node_count() }),
    };
    Ok(match task {
        Task::NodeCount => Answer::Int(oracle::node_count(g)),
        Task::EdgeCount => Answer::Int(oracle::edge_count(g)),
        Task::NodeDegree => Answer::Int(oracle::degree(g, node(query)?)?),
        Task::Neighbors => Answer::NodeSet(oracle::neighbors(g, node(query)?)?),
        Task::ConnectedComponents => Answer::Int(oracle::connected_components(g)?),
        Task::CycleCheck => Answer::Bool(oracle::has_cycle(g)?),
        Task::Mst => Answer::EdgeSet(oracle::spanning_forest(g)?),
        Task::ShortestPath => match query {
            Query::Pair(u, v) => Answer::Int(oracle::shortest_path_length(g, u, v)?),
            _ => return Err(OracleError::Unreachable(Node::MAX, Node::MAX)),
        },
        Task::BipartiteCheck => Answer::Bool(oracle::is_bipartite(g)?),
        Task::TopologicalSort => Answer::NodeSeq(oracle::topo_order(g)?),
    })
}

/// Distinct unordered pairs `(u, v)`, `u < v`, that share a component.
pub fn same_component_pairs(g: &Graph) -> Vec<(Node, Node)> {
    let labels = oracle::component_labels(g).expect("undirected graph");
    let n = g.node_count();
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| labels[u] == labels[v])
        .collect()
}

/// Draws one graph suitable for `task`. `min_pairs` only matters for
/// shortest path: the graph is redrawn until that many same-component pairs
/// exist. MST graphs are redrawn until connected.
pub fn task_graph(task: Task, cfg: &GeneratorConfig, min_pairs: usize, rng: &mut BenchRng) -> (Graph, Construction) {
    match task {
        Task::TopologicalSort => (gen_er_dag_with(cfg, rng), Construction::ErDag),
        Task::BipartiteCheck => {
            if rng.bernoulli(0.5) {
                (gen_random_bipartite_with(cfg, rng).0, Construction::Bipartite)
            } else {
                (gen_er_with(cfg, rng), Construction::Er)
            }
        }
        Task::Mst => loop {
            let g = gen_er_with(cfg, rng);
            if oracle::connected_components(&g).expect("undirected") == 1 {
                return (g, Construction::Er);
            }
        },
        Task::ShortestPath => loop {
            let g = gen_er_with(cfg, rng);
            if same_component_pairs(&g).len() >= min_pairs {
                return (g, Construction::Er);
            }
        },
        _ => (gen_er_with(cfg, rng), Construction::Er),
    }
}

/// Samples `count` distinct queries for `task` on `g`, without replacement.
pub fn sample_queries(task: Task, g: &Graph, count: usize, rng: &mut BenchRng) -> Vec<Query> {
    match task.level() {
        TaskLevel::Graph => vec![Query::None],
        TaskLevel::Node => {
            let nodes: Vec<Node> = (0..g.node_count()).collect();
            rng.sample(&nodes, count).into_iter().map(Query::Node).collect()
        }
        TaskLevel::Pair => {
            let pairs = same_component_pairs(g);
            rng.sample(&pairs, count).into_iter().map(|(u, v)| Query::Pair(u, v)).collect()
        }
    }
}

fn queries_per_graph(task: Task) -> usize {
    match task.level() {
        TaskLevel::Graph => 1,
        _ => QUERIES_PER_GRAPH,
    }
}

/// All instances built from graph `graph_index` of one cell.
pub fn instance_group(master_seed: u64, task: Task, bucket: Bucket, graph_index: usize) -> Vec<TaskInstance> {
    let seed = derive_instance_seed(master_seed, task, bucket, graph_index as u64);
    let mut rng = BenchRng::from_seed(seed);
    let cfg = GeneratorConfig::for_bucket(bucket);
    let per_graph = queries_per_graph(task);
    let (graph, construction) = task_graph(task, &cfg, per_graph, &mut rng);
    sample_queries(task, &graph, per_graph, &mut rng)
        .into_iter()
        .enumerate()
        .map(|(query_index, query)| TaskInstance {
            id: instance_id(task, bucket, graph_index, query_index),
            task,
            bucket,
            graph_index,
            query_index,
            query,
            gold: gold_answer(task, &graph, query).expect("generated instances satisfy task preconditions"),
            graph: graph.clone(),
            seed,
            construction,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub master_seed: u64,
    pub instances: Vec<TaskInstance>,
}

/// The full benchmark for a master seed: every task, every bucket.
pub fn assemble_dataset(master_seed: u64) -> Dataset {
    assemble_subset(master_seed, &Task::ALL, &Bucket::ALL)
}

/// Cells are built independently, so a subset holds exactly the same
/// instances as the corresponding part of the full dataset.
pub fn assemble_subset(master_seed: u64, tasks: &[Task], buckets: &[Bucket]) -> Dataset {
    let mut instances = Vec::new();
    for &task in &Task::ALL {
        if !tasks.contains(&task) {
            continue;
        }
        for &bucket in &Bucket::ALL {
            if !buckets.contains(&bucket) {
                continue;
            }
            for graph_index in 0..GRAPHS_PER_CELL {
                instances.extend(instance_group(master_seed, task, bucket, graph_index));
            }
        }
    }
    Dataset { master_seed, instances }
}

/// Re-checks an instance against the oracles and the task preconditions.
pub fn verify_instance(inst: &TaskInstance) -> Result<(), String> {
    let g = &inst.graph;
    let expected_query = match (inst.task.level(), inst.query) {
        (TaskLevel::Graph, Query::None) => true,
        (TaskLevel::Node, Query::Node(u)) => u < g.node_count(),
        (TaskLevel::Pair, Query::Pair(u, v)) => u != v && u < g.node_count() && v < g.node_count(),
        _ => false,
    };
    if !expected_query {
        return Err(format!("query {:?} does not fit task {}", inst.query, inst.task));
    }
    if (inst.task == Task::TopologicalSort) != g.is_directed() {
        return Err("graph directedness does not match task".into());
    }
    let ok = match (inst.task, &inst.gold) {
        (Task::Mst, Answer::EdgeSet(es)) => {
            oracle::connected_components(g).map_err(|e| e.to_string())? == 1
                && oracle::validate_spanning_tree(g, es).map_err(|e| e.to_string())?
        }
        (Task::TopologicalSort, Answer::NodeSeq(seq)) => {
            oracle::validate_topo_order(g, seq).map_err(|e| e.to_string())?
        }
        (task, gold) => gold_answer(task, g, inst.query).map_err(|e| e.to_string())? == *gold,
    };
    if ok {
        Ok(())
    } else {
        Err("stored gold differs from the oracle".into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub schema_version: u32,
    pub format: String,
    pub generator_version: String,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCount {
    pub task: Task,
    pub bucket: Bucket,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YesNo {
    pub yes: usize,
    pub no: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub generator_version: String,
    pub master_seed: u64,
    pub total: usize,
    pub counts: Vec<CellCount>,
    pub digest_algorithm: String,
    pub content_digest: String,
    /// Realized answer prior of the cycle-check task (not class-balanced).
    pub cycle_check_prior: YesNo,
    /// Realized answer prior of the bipartite-check task.
    pub bipartite_prior: YesNo,
    /// How many bipartite-check graphs came from each construction.
    pub bipartite_constructions: BTreeMap<String, usize>,
}

impl Dataset {
    pub fn header(&self) -> DatasetHeader {
        DatasetHeader {
            schema_version: SCHEMA_VERSION,
            format: "graphbench-dataset".into(),
            generator_version: GENERATOR_VERSION.into(),
            master_seed: self.master_seed,
        }
    }

    /// The exact bytes written to `dataset.jsonl`.
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(&self.header()).expect("header serializes");
        out.push(b'\n');
        for inst in &self.instances {
            serde_json::to_writer(&mut out, inst).expect("instance serializes");
            out.push(b'\n');
        }
        out
    }

    pub fn manifest(&self) -> DatasetManifest {
        self.manifest_for_bytes(&self.to_jsonl())
    }

    fn manifest_for_bytes(&self, bytes: &[u8]) -> DatasetManifest {
        let mut cells: BTreeMap<(Task, Bucket), usize> = BTreeMap::new();
        let mut cycle = YesNo { yes: 0, no: 0 };
        let mut bipartite = YesNo { yes: 0, no: 0 };
        let mut constructions = BTreeMap::new();
        for inst in &self.instances {
            *cells.entry((inst.task, inst.bucket)).or_default() += 1;
            let tally = match inst.task {
                Task::CycleCheck => Some(&mut cycle),
                Task::BipartiteCheck => {
                    let name = match inst.construction {
                        Construction::Bipartite => "bipartite",
                        _ => "er",
                    };
                    *constructions.entry(name.to_string()).or_default() += 1;
                    Some(&mut bipartite)
                }
                _ => None,
            };
            if let (Some(t), Answer::Bool(b)) = (tally, &inst.gold) {
                if *b {
                    t.yes += 1;
                } else {
                    t.no += 1;
                }
            }
        }
        DatasetManifest {
            schema_version: SCHEMA_VERSION,
            generator_version: GENERATOR_VERSION.into(),
            master_seed: self.master_seed,
            total: self.instances.len(),
            counts: cells
                .into_iter()
                .map(|((task, bucket), instances)| CellCount { task, bucket, instances })
                .collect(),
            digest_algorithm: "sha256".into(),
            content_digest: sha256_hex(bytes),
            cycle_check_prior: cycle,
            bipartite_prior: bipartite,
            bipartite_constructions: constructions,
        }
    }

    pub fn get(&self, id: &str) -> Option<&TaskInstance> {
        self.instances.iter().find(|i| i.id == id)
    }

    /// Instances by id, for bulk lookups.
    pub fn index(&self) -> HashMap<&str, &TaskInstance> {
        self.instances.iter().map(|i| (i.id.as_str(), i)).collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

/// Writes `dataset.jsonl` and `manifest.json` into `dir`, creating it if needed.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<DatasetManifest, DatasetError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let bytes = dataset.to_jsonl();
    let data_path = dir.join(DATASET_FILE);
    write_atomic(&data_path, &bytes)?;
    let manifest = dataset.manifest_for_bytes(&bytes);
    let manifest_path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_atomic(&manifest_path, text.as_bytes())?;
    Ok(manifest)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(bytes).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Fail on the first corrupt line.
    Strict,
    /// Skip corrupt lines and report them alongside the loaded instances.
    Lenient,
}

#[derive(Debug)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub skipped: Vec<DatasetError>,
}

/// Accepts either a dataset directory or a path to `dataset.jsonl`.
pub fn dataset_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(DATASET_FILE)
    } else {
        path.to_path_buf()
    }
}

/// Loads and re-verifies every instance against the oracles.
pub fn load_dataset(path: &Path, mode: LoadMode) -> Result<LoadedDataset, DatasetError> {
    let file = dataset_file(path);
    let text = fs::read_to_string(&file).map_err(io_err(&file))?;
    parse_dataset(&text, mode)
}

pub fn parse_dataset(text: &str, mode: LoadMode) -> Result<LoadedDataset, DatasetError> {
    let mut lines = text.lines();
    let header_line = lines.next().ok_or(DatasetError::MissingHeader)?;
    let header: DatasetHeader = serde_json::from_str(header_line).map_err(|_| DatasetError::MissingHeader)?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(DatasetError::SchemaVersion { found: header.schema_version, expected: SCHEMA_VERSION });
    }
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<TaskInstance>(line)
            .map_err(|e| DatasetError::CorruptLine { line: line_no, reason: e.to_string() })
            .and_then(|inst| match verify_instance(&inst) {
                Ok(()) => Ok(inst),
                Err(reason) => Err(DatasetError::GoldMismatch { id: inst.id, reason }),
            });
        match (parsed, mode) {
            (Ok(inst), _) => instances.push(inst),
            (Err(e), LoadMode::Strict) => return Err(e),
            (Err(e), LoadMode::Lenient) => skipped.push(e),
        }
    }
    Ok(LoadedDataset { dataset: Dataset { master_seed: header.master_seed, instances }, skipped })
}

pub fn load_manifest(dir: &Path) -> Result<DatasetManifest, DatasetError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|e| DatasetError::CorruptLine { line: e.line(), reason: e.to_string() })
}
