use std::collections::BTreeSet;

use super::Request;
use crate::oracle::Answer;
use crate::prompt::{expected_answer, format_answer};
use crate::task::Query;

fn respond(answer: &Answer, base: usize) -> String {
    format!("Answer: {}", format_answer(&answer.to_surface(base)))
}

/// The gold answer in the prompt's labels and answer format.
pub fn oracle_answer(req: Request<'_>) -> String {
    respond(&expected_answer(req.instance, req.bundle.mst_mode), req.bundle.label_base)
}

/// A well-formed answer that the scorer must reject.
pub fn adversary_answer(req: Request<'_>) -> String {
    let inst = req.instance;
    let g = &inst.graph;
    let wrong = match expected_answer(inst, req.bundle.mst_mode) {
        Answer::Int(x) => Answer::Int(x + 1),
        Answer::Bool(b) => Answer::Bool(!b),
        Answer::NodeSet(mut s) => {
            // A node is never its own neighbor, so adding the query node
            // always breaks set equality.
            match (s.pop_first(), inst.query) {
                (Some(_), _) => {}
                (None, Query::Node(u)) => {
                    s.insert(u);
                }
                (None, _) => {
                    s.insert(0);
                }
            }
            Answer::NodeSet(s)
        }
        Answer::NodeSeq(mut seq) => {
            if g.edge_count() > 0 {
                seq.reverse();
            } else if seq.len() > 1 {
                let first = seq[0];
                *seq.last_mut().expect("nonempty") = first;
            } else {
                seq.extend(seq.clone());
            }
            Answer::NodeSeq(seq)
        }
        Answer::EdgeSet(mut es) => {
            if es.pop_first().is_none() {
                es = BTreeSet::from([(0, 1)]);
            }
            Answer::EdgeSet(es)
        }
    };
    respond(&wrong, req.bundle.label_base)
}
