use serde::{Deserialize, Serialize};

use crate::dataset::TaskInstance;
use crate::eval::extract::{extract_with, ExtractHints};
use crate::oracle::{self, Answer};
use crate::prompt::{answer_kind, expected_answer, MstMode, Strategy};
use crate::task::{Bucket, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    None,
    WrongAnswer,
    ExtractionFailed,
    BackendError,
}

/// Scoring outcome of one (instance, strategy) query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub instance_id: String,
    pub task: Task,
    pub bucket: Bucket,
    pub strategy: Strategy,
    /// Parsed answer in the labels the model used.
    pub parsed: Option<Answer>,
    pub correct: bool,
    pub failure: FailureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Checks a parsed answer (internal labels) against an instance.
///
/// Counts and booleans need exact equality and neighbor sets set equality.
/// Spanning trees and topological orders go through the validators, so any
/// valid answer is accepted. A kind mismatch is incorrect.
pub fn score_instance(inst: &TaskInstance, answer: &Answer, mst_mode: MstMode) -> bool {
    let g = &inst.graph;
    match (inst.task, mst_mode, answer) {
        (Task::Mst, MstMode::EdgeSet, Answer::EdgeSet(es)) => oracle::validate_spanning_tree(g, es).unwrap_or(false),
        (Task::TopologicalSort, _, Answer::NodeSeq(seq)) => oracle::validate_topo_order(g, seq).unwrap_or(false),
        (_, _, parsed) => *parsed == expected_answer(inst, mst_mode),
    }
}

/// Extracts and scores one raw response.
pub fn score_response(
    inst: &TaskInstance,
    strategy: Strategy,
    response: &str,
    label_base: usize,
    mst_mode: MstMode,
) -> EvalRecord {
    let kind = answer_kind(inst.task, mst_mode);
    let hints = ExtractHints { node_count: Some(inst.graph.node_count()) };
    let (parsed, correct, failure) = match extract_with(inst.task, kind, response, hints) {
        Ok(ans) => {
            let ok = score_instance(inst, &ans.from_surface(label_base), mst_mode);
            let failure = if ok { FailureKind::None } else { FailureKind::WrongAnswer };
            (Some(ans), ok, failure)
        }
        Err(_) => (None, false, FailureKind::ExtractionFailed),
    };
    EvalRecord {
        instance_id: inst.id.clone(),
        task: inst.task,
        bucket: inst.bucket,
        strategy,
        parsed,
        correct,
        failure,
        prompt_hash: None,
        error: None,
    }
}

/// Record for a query whose backend call failed.
pub fn backend_failure(inst: &TaskInstance, strategy: Strategy, error: String) -> EvalRecord {
    EvalRecord {
        instance_id: inst.id.clone(),
        task: inst.task,
        bucket: inst.bucket,
        strategy,
        parsed: None,
        correct: false,
        failure: FailureKind::BackendError,
        prompt_hash: None,
        error: Some(error),
    }
}
