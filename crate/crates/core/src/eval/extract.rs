//! Answer extraction from free-form model output.
//!
//! Every kind looks for the last `Answer:` / `answer is` sentinel first and
//! parses what follows it. Without a sentinel the parsers fall back to
//! searching the text:
//!
//! - integers: the last integer in the trailing window (512 chars), then in
//!   the full text; spelled-out numbers up to twenty count when no digits do;
//! - booleans: task phrasing ("contains a cycle", "not bipartite", ...), with
//!   a negator in the same clause flipping the polarity, then a leading
//!   yes/no;
//! - node sets: the last `[...]` or `{...}` list of labels;
//! - edge sets: the last run of `(u, v)` / `[u, v]` pairs;
//! - node sequences: the last delimiter-separated run of labels whose length
//!   equals the node count (when known).
//!
//! Labels are returned exactly as written; callers map them to internal
//! labels with [`Answer::from_surface`].

use regex::Regex;
use std::collections::BTreeSet;
use std::sync::LazyLock;

use crate::graph::Node;
use crate::oracle::Answer;
use crate::task::{AnswerKind, Task};

pub const TRAILING_WINDOW: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no {kind:?} answer found in response")]
pub struct ExtractionFailed {
    pub kind: AnswerKind,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExtractHints {
    /// Node count of the query graph; node sequences must cover it.
    pub node_count: Option<usize>,
}

static SENTINEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\banswer\s*(?:\*\*)?\s*(?::|is\b)").expect("sentinel regex"));
static INTEGER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").expect("integer regex"));
static NUMBER_WORD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(zero|one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen|twenty)\b",
    )
    .expect("number word regex")
});
static PAIR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[\(\[]\s*(\d+)\s*,\s*(\d+)\s*[\)\]]").expect("pair regex"));
static PAIR_GAP: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^[\s,;\[\]{}]*(?:and)?[\s,;\[\]{}]*$").expect("pair gap regex"));
static LABEL_LIST: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\[[\d\s,]*\]|\{[\d\s,]*\}").expect("label list regex"));
static SEQ_GAP: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^\s*(?:,|;|->|=>|→|>)?\s*(?:(?:then|and)\s+)?$").expect("sequence gap regex")
});
static EMPTY_ANSWER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^[\s*]*(?:none\b|no\s+(?:neighbors|nodes|edges)\b|\[\s*\]|\{\s*\}|∅)").expect("empty regex")
});
static YES_NO_AT_START: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^[\s*]*(yes|no|true|false)\b").expect("yes/no regex"));
static CYCLE_POSITIVE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(?:contains?|has|have|there\s+(?:is|are|exists?)|exists?|forms?|found|find)\s+(?:an?\s+|any\s+|at\s+least\s+one\s+)?(?:odd\s+|even\s+|simple\s+)?cycles?\b|\bcyclic\b",
    )
    .expect("cycle regex")
});
static CYCLE_NEGATIVE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\bacyclic\b|\bno\s+cycles?\b|\bcycle-free\b|\bwithout\s+(?:any\s+)?cycles?\b")
        .expect("no-cycle regex")
});
static BIPARTITE_POSITIVE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:bipartite|two-colou?rable|2-colou?rable)\b").expect("bipartite regex"));
static BIPARTITE_NEGATIVE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bnon-bipartite\b").expect("non-bipartite regex"));
static NEGATOR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:not|no|never|neither|nor|cannot)\b|n't\b").expect("negator regex"));

/// Extracts an answer of the task's default kind (edge-set mode for MST).
pub fn extract_answer(task: Task, response: &str) -> Result<Answer, ExtractionFailed> {
    extract_with(task, task.answer_kind(), response, ExtractHints::default())
}

pub fn extract_with(task: Task, kind: AnswerKind, response: &str, hints: ExtractHints) -> Result<Answer, ExtractionFailed> {
    let after = after_sentinel(response);
    let found = match kind {
        AnswerKind::Int => extract_int(after, response).map(Answer::Int),
        AnswerKind::Bool => extract_bool(task, after, response).map(Answer::Bool),
        AnswerKind::NodeSet => extract_node_set(after, response).map(Answer::NodeSet),
        AnswerKind::EdgeSet => extract_edge_set(after, response).map(Answer::EdgeSet),
        AnswerKind::NodeSeq => extract_node_seq(after, response, hints.node_count).map(Answer::NodeSeq),
    };
    found.ok_or(ExtractionFailed { kind })
}

/// Text following the last answer sentinel, if any.
fn after_sentinel(text: &str) -> Option<&str> {
    SENTINEL.find_iter(text).last().map(|m| &text[m.end()..])
}

fn trailing_window(text: &str) -> &str {
    if text.len() <= TRAILING_WINDOW {
        return text;
    }
    let mut start = text.len() - TRAILING_WINDOW;
    while !text.is_char_boundary(start) {
        start += 1;
    }
    &text[start..]
}

fn parse_label(s: &str) -> Option<u64> {
    s.parse().ok()
}

fn number_word(w: &str) -> u64 {
    const WORDS: [&str; 21] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
        "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
    ];
    let w = w.to_ascii_lowercase();
    WORDS.iter().position(|&x| x == w).expect("regex only matches listed words") as u64
}

fn last_integer(text: &str) -> Option<u64> {
    INTEGER
        .find_iter(text)
        .filter_map(|m| parse_label(m.as_str()))
        .last()
        .or_else(|| NUMBER_WORD.find_iter(text).last().map(|m| number_word(m.as_str())))
}

fn extract_int(after: Option<&str>, text: &str) -> Option<u64> {
    if let Some(rest) = after {
        if let Some(x) = INTEGER.find_iter(rest).find_map(|m| parse_label(m.as_str())) {
            return Some(x);
        }
    }
    last_integer(trailing_window(text)).or_else(|| last_integer(text))
}

fn normalize_negations(text: &str) -> String {
    text.replace(['’', '‘'], "'")
}

/// True if a negator occurs in the same clause shortly before `start`.
fn negated(text: &str, start: usize) -> bool {
    let prefix = &text[..start];
    let clause_start = prefix.rfind(['.', ',', ';', ':', '!', '?', '\n']).map_or(0, |i| i + 1);
    let clause = &prefix[clause_start..];
    let words: Vec<&str> = clause.split_whitespace().collect();
    let tail = words[words.len().saturating_sub(4)..].join(" ");
    NEGATOR.is_match(&tail)
}

/// Phrase hits are skipped when they only state a definition or echo the question.
fn is_conditional(text: &str, end: usize) -> bool {
    let rest = text[end..].trim_start();
    let lower: String = rest.chars().take(6).collect::<String>().to_ascii_lowercase();
    rest.starts_with('?') || lower.starts_with("if ") || lower.starts_with("iff ") || lower.starts_with("when ")
}

fn phrase_polarity(task: Task, text: &str) -> Option<bool> {
    let (positive, negative) = match task {
        Task::CycleCheck => (&*CYCLE_POSITIVE, &*CYCLE_NEGATIVE),
        Task::BipartiteCheck => (&*BIPARTITE_POSITIVE, &*BIPARTITE_NEGATIVE),
        _ => return None,
    };
    let text = normalize_negations(text);
    let mut best: Option<(usize, usize, bool)> = None;
    let mut consider = |end: usize, len: usize, value: bool| {
        if best.is_none_or(|(e, l, _)| (end, len) > (e, l)) {
            best = Some((end, len, value));
        }
    };
    for m in positive.find_iter(&text) {
        if is_conditional(&text, m.end()) {
            continue;
        }
        consider(m.end(), m.len(), !negated(&text, m.start()));
    }
    for m in negative.find_iter(&text) {
        consider(m.end(), m.len(), false);
    }
    best.map(|(_, _, v)| v)
}

fn yes_no(word: &str) -> bool {
    matches!(word.to_ascii_lowercase().as_str(), "yes" | "true")
}

fn extract_bool(task: Task, after: Option<&str>, text: &str) -> Option<bool> {
    if let Some(rest) = after {
        if let Some(c) = YES_NO_AT_START.captures(rest) {
            return Some(yes_no(&c[1]));
        }
        if let Some(v) = phrase_polarity(task, rest) {
            return Some(v);
        }
    }
    phrase_polarity(task, trailing_window(text))
        .or_else(|| phrase_polarity(task, text))
        .or_else(|| YES_NO_AT_START.captures(text).map(|c| yes_no(&c[1])))
}

fn labels_in(s: &str) -> Option<BTreeSet<Node>> {
    INTEGER
        .find_iter(s)
        .map(|m| parse_label(m.as_str()).and_then(|x| Node::try_from(x).ok()))
        .collect()
}

fn extract_node_set(after: Option<&str>, text: &str) -> Option<BTreeSet<Node>> {
    if let Some(rest) = after {
        if EMPTY_ANSWER.is_match(rest) {
            return Some(BTreeSet::new());
        }
        let first_line = rest.trim_start().lines().next().unwrap_or("");
        if let Some(m) = LABEL_LIST.find(first_line) {
            return labels_in(m.as_str());
        }
        if INTEGER.is_match(first_line) {
            return labels_in(first_line);
        }
    }
    LABEL_LIST.find_iter(text).last().and_then(|m| labels_in(m.as_str()))
}

/// Groups consecutive pair matches separated only by list punctuation.
fn pair_runs(text: &str) -> Vec<BTreeSet<(Node, Node)>> {
    let mut runs: Vec<BTreeSet<(Node, Node)>> = Vec::new();
    let mut last_end: Option<usize> = None;
    for c in PAIR.captures_iter(text) {
        let m = c.get(0).expect("whole match");
        let (Some(u), Some(v)) = (parse_label(&c[1]), parse_label(&c[2])) else { continue };
        let (Ok(u), Ok(v)) = (Node::try_from(u), Node::try_from(v)) else { continue };
        let joined = last_end.is_some_and(|e| PAIR_GAP.is_match(&text[e..m.start()]));
        if !joined {
            runs.push(BTreeSet::new());
        }
        runs.last_mut().expect("run pushed").insert((u.min(v), u.max(v)));
        last_end = Some(m.end());
    }
    runs
}

fn extract_edge_set(after: Option<&str>, text: &str) -> Option<BTreeSet<(Node, Node)>> {
    if let Some(rest) = after {
        if EMPTY_ANSWER.is_match(rest) {
            return Some(BTreeSet::new());
        }
        if let Some(run) = pair_runs(rest).into_iter().next() {
            return Some(run);
        }
    }
    pair_runs(text).pop()
}

/// Runs of integers joined by sequence delimiters (commas, arrows, spaces).
fn integer_runs(text: &str) -> Vec<Vec<Node>> {
    let mut runs: Vec<Vec<Node>> = Vec::new();
    let mut last_end: Option<usize> = None;
    for m in INTEGER.find_iter(text) {
        let Some(x) = parse_label(m.as_str()).and_then(|x| Node::try_from(x).ok()) else {
            last_end = None;
            continue;
        };
        let joined = last_end.is_some_and(|e| SEQ_GAP.is_match(&text[e..m.start()]));
        if !joined {
            runs.push(Vec::new());
        }
        runs.last_mut().expect("run pushed").push(x);
        last_end = Some(m.end());
    }
    runs
}

fn extract_node_seq(after: Option<&str>, text: &str, node_count: Option<usize>) -> Option<Vec<Node>> {
    if let Some(rest) = after {
        let rest = rest.trim_start();
        let first_line = rest.lines().next().unwrap_or("");
        let scope = match LABEL_LIST.find(first_line) {
            Some(m) => m.as_str(),
            None => first_line,
        };
        if let Some(run) = integer_runs(scope).into_iter().next() {
            return Some(run);
        }
    }
    let runs = integer_runs(text);
    match node_count {
        Some(n) => runs.into_iter().rev().find(|r| r.len() == n),
        None => runs.into_iter().rev().find(|r| r.len() >= 2),
    }
}
