//! Rendering, execution and scoring of a full evaluation run.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::client::{Client, Request, Transcript};
use crate::dataset::{Dataset, TaskInstance};
use crate::error::{ClientError, PromptError};
use crate::eval::{backend_failure, score_response, EvalRecord};
use crate::prompt::{PromptBundle, Renderer, Strategy};

/// One (instance, strategy) query.
#[derive(Debug, Clone)]
pub struct Job<'a> {
    pub instance: &'a TaskInstance,
    pub bundle: PromptBundle,
}

/// Renders every instance under every strategy, instance-major.
pub fn render_jobs<'a>(
    dataset: &'a Dataset,
    strategies: &[Strategy],
    renderer: &Renderer,
) -> Result<Vec<Job<'a>>, PromptError> {
    let mut jobs = Vec::with_capacity(dataset.instances.len() * strategies.len());
    for inst in &dataset.instances {
        for &s in strategies {
            jobs.push(Job { instance: inst, bundle: renderer.render(inst, s)? });
        }
    }
    Ok(jobs)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub queries: usize,
    pub cache_hits: usize,
    pub backend_errors: usize,
    /// Highest number of simultaneous `complete` calls observed.
    pub max_in_flight: usize,
}

/// Runs all jobs with at most `parallel` concurrent calls. Results are in
/// job order regardless of completion order.
pub fn execute(jobs: &[Job<'_>], client: &Client, parallel: usize) -> (Vec<Result<Transcript, ClientError>>, RunStats) {
    let workers = parallel.max(1).min(jobs.len().max(1));
    let next = AtomicUsize::new(0);
    let in_flight = AtomicUsize::new(0);
    let max_in_flight = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<Transcript, ClientError>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(job) = jobs.get(i) else { break };
                let now = in_flight.fetch_add(1, Ordering::SeqCst) + 1;
                max_in_flight.fetch_max(now, Ordering::SeqCst);
                let out = client.complete(Request { bundle: &job.bundle, instance: job.instance });
                in_flight.fetch_sub(1, Ordering::SeqCst);
                results.lock().expect("results lock")[i] = Some(out);
            });
        }
    });

    let results: Vec<_> = results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect();
    let stats = RunStats {
        queries: jobs.len(),
        cache_hits: results.iter().filter(|r| matches!(r, Ok(t) if t.cached)).count(),
        backend_errors: results.iter().filter(|r| r.is_err()).count(),
        max_in_flight: max_in_flight.into_inner(),
    };
    (results, stats)
}

/// Scores one transcript against its instance.
pub fn score_transcript(inst: &TaskInstance, t: &Transcript) -> EvalRecord {
    let mut rec = score_response(inst, t.strategy, &t.response, t.label_base, t.mst_mode);
    rec.prompt_hash = Some(t.prompt_hash.clone());
    rec
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub transcripts: Vec<Transcript>,
    pub records: Vec<EvalRecord>,
    pub stats: RunStats,
}

/// Executes and scores jobs. Backend failures become `backend-error`
/// records; they never abort the run.
pub fn run_jobs(jobs: &[Job<'_>], client: &Client, parallel: usize) -> RunOutput {
    let (results, stats) = execute(jobs, client, parallel);
    let mut transcripts = Vec::new();
    let mut records = Vec::with_capacity(jobs.len());
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(t) => {
                records.push(score_transcript(job.instance, &t));
                transcripts.push(t);
            }
            Err(e) => {
                let mut rec = backend_failure(job.instance, job.bundle.strategy, e.to_string());
                rec.prompt_hash = Some(client.key_for(&job.bundle));
                records.push(rec);
            }
        }
    }
    RunOutput { transcripts, records, stats }
}

/// Renders, executes and scores a dataset under the given strategies.
pub fn run_evaluation(
    dataset: &Dataset,
    strategies: &[Strategy],
    renderer: &Renderer,
    client: &Client,
    parallel: usize,
) -> Result<RunOutput, PromptError> {
    let jobs = render_jobs(dataset, strategies, renderer)?;
    Ok(run_jobs(&jobs, client, parallel))
}
