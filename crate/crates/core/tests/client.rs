use graphbench_core::client::{Backend, Client, HttpChat, ModelConfig, Request, ResponseCache};
use graphbench_core::dataset::{assemble_dataset, assemble_subset, instance_group};
use graphbench_core::error::ClientError;
use graphbench_core::eval::{aggregate_report, emit_report, ReportFormat, RunMeta};
use graphbench_core::pipeline::{execute, render_jobs, run_jobs};
use graphbench_core::prompt::{render_prompt, Renderer};
use graphbench_core::{Bucket, Strategy, Task};
use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

/// A canned HTTP reply; `None` means never answer.
type Reply = Option<(u16, Vec<(&'static str, String)>, String)>;

struct Server {
    url: String,
    requests: Arc<Mutex<Vec<(String, String)>>>,
}

fn read_request(stream: &mut TcpStream) -> Option<(String, String)> {
    let mut reader = BufReader::new(stream.try_clone().ok()?);
    let mut head = String::new();
    let mut content_length = 0;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 {
            return None;
        }
        if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            content_length = v.trim().parse().ok()?;
        }
        if line == "\r\n" {
            break;
        }
        head.push_str(&line);
    }
    let mut body = vec![0; content_length];
    reader.read_exact(&mut body).ok()?;
    Some((head, String::from_utf8(body).ok()?))
}

/// Serves `replies` in order, one connection each.
fn serve(replies: Vec<Reply>) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = Arc::clone(&requests);
    thread::spawn(move || {
        for reply in replies {
            let Ok((mut stream, _)) = listener.accept() else { return };
            if let Some(req) = read_request(&mut stream) {
                log.lock().unwrap().push(req);
            }
            match reply {
                Some((status, headers, body)) => {
                    let mut out = format!("HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n", body.len());
                    for (k, v) in headers {
                        out.push_str(&format!("{k}: {v}\r\n"));
                    }
                    out.push_str("\r\n");
                    out.push_str(&body);
                    let _ = stream.write_all(out.as_bytes());
                }
                None => {
                    thread::sleep(Duration::from_secs(3));
                }
            }
        }
    });
    Server { url, requests }
}

fn ok_body(content: &str) -> String {
    serde_json::json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]}).to_string()
}

fn config(url: &str) -> ModelConfig {
    ModelConfig {
        endpoint: url.to_string(),
        model: "test-model".into(),
        timeout_secs: 1,
        max_retries: 2,
        api_key_env: "GRAPHBENCH_TEST_KEY_UNSET".into(),
        backoff_base_ms: 1,
        ..ModelConfig::default()
    }
}

#[test]
fn rate_limit_then_success() {
    let server = serve(vec![
        Some((429, vec![("Retry-After", "0".into())], "slow down".into())),
        Some((200, vec![], ok_body("Answer: 3"))),
    ]);
    let mut cfg = config(&server.url);
    cfg.api_key_env = "GRAPHBENCH_TEST_KEY_SET".into();
    // SAFETY: the variable name is unique to this test.
    unsafe { std::env::set_var("GRAPHBENCH_TEST_KEY_SET", "sk-test") };
    let http = HttpChat::new(&cfg).unwrap();
    assert_eq!(http.complete("What?", &cfg).unwrap(), "Answer: 3");
    let reqs = server.requests.lock().unwrap();
    assert_eq!(reqs.len(), 2);
    let (head, body) = &reqs[1];
    assert!(head.to_ascii_lowercase().contains("authorization: bearer sk-test"), "{head}");
    let body: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(body["model"], "test-model");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["max_tokens"], 4096);
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "What?");
}

#[test]
fn server_errors_exhaust_retries() {
    let server = serve(vec![Some((503, vec![], String::new())); 3]);
    let cfg = config(&server.url);
    let err = HttpChat::new(&cfg).unwrap().complete("q", &cfg).unwrap_err();
    assert!(matches!(err, ClientError::Server { status: 503, attempts: 3 }), "{err:?}");
    assert_eq!(server.requests.lock().unwrap().len(), 3);
    assert!(!server.requests.lock().unwrap()[0].0.to_ascii_lowercase().contains("authorization"));
}

#[test]
fn persistent_rate_limit_is_reported() {
    let server = serve(vec![Some((429, vec![], String::new())); 3]);
    let cfg = config(&server.url);
    let err = HttpChat::new(&cfg).unwrap().complete("q", &cfg).unwrap_err();
    assert!(matches!(err, ClientError::RateLimited { attempts: 3 }), "{err:?}");
}

#[test]
fn client_errors_are_not_retried() {
    let server = serve(vec![Some((400, vec![], "bad request".into())), Some((200, vec![], ok_body("x")))]);
    let cfg = config(&server.url);
    let err = HttpChat::new(&cfg).unwrap().complete("q", &cfg).unwrap_err();
    assert!(matches!(err, ClientError::Rejected { status: 400, .. }), "{err:?}");
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn malformed_body_is_reported() {
    let server = serve(vec![Some((200, vec![], "{\"oops\": true}".into()))]);
    let cfg = config(&server.url);
    let err = HttpChat::new(&cfg).unwrap().complete("q", &cfg).unwrap_err();
    assert!(matches!(err, ClientError::MalformedResponse(_)), "{err:?}");
}

#[test]
fn silent_server_times_out() {
    let server = serve(vec![None, None]);
    let mut cfg = config(&server.url);
    cfg.max_retries = 1;
    let err = HttpChat::new(&cfg).unwrap().complete("q", &cfg).unwrap_err();
    assert!(matches!(err, ClientError::Timeout { attempts: 2 }), "{err:?}");
}

#[test]
fn http_backend_results_are_cached() {
    let server = serve(vec![Some((200, vec![], ok_body("Answer: 5")))]);
    let cfg = config(&server.url);
    let dir = tempfile::tempdir().unwrap();
    let cache = ResponseCache::open(&dir.path().join("cache.jsonl")).unwrap();
    let client = Client::new(Backend::HttpChat(HttpChat::new(&cfg).unwrap()), cfg.clone(), Some(cache));
    let inst = instance_group(1, Task::NodeCount, Bucket::S, 0).remove(0);
    let bundle = render_prompt(&inst, Strategy::ZeroShot).unwrap();
    let first = client.complete(Request { bundle: &bundle, instance: &inst }).unwrap();
    let second = client.complete(Request { bundle: &bundle, instance: &inst }).unwrap();
    assert!(!first.cached && second.cached);
    assert_eq!(first.response, second.response);
    assert_eq!(first.timestamp, second.timestamp);
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn distinct_prompts_get_distinct_keys() {
    let client = Client::new(Backend::MockOracle, ModelConfig::default(), None);
    let check = |texts: Vec<String>| {
        let prompts: HashSet<&String> = texts.iter().collect();
        let keys: HashSet<String> = prompts.iter().map(|t| graphbench_core::client::cache_key(t, &client.model_id(), &client.config.params())).collect();
        assert_eq!(keys.len(), prompts.len());
        prompts.len()
    };
    let ds = assemble_dataset(0);
    let zero_shot: Vec<String> = ds.instances.iter().map(|i| render_prompt(i, Strategy::ZeroShot).unwrap().text).collect();
    // Small graphs repeat (edgeless and complete ones especially), so some
    // prompts coincide; every distinct prompt still needs its own key.
    assert!(check(zero_shot) > 6_400);
    let small = assemble_subset(0, &Task::ALL, &[Bucket::S]);
    let all: Vec<String> = Strategy::PAPER_SET
        .iter()
        .flat_map(|&s| small.instances.iter().map(move |i| render_prompt(i, s).unwrap().text))
        .collect();
    check(all);
}

#[test]
fn parallelism_bound_is_respected() {
    let ds = assemble_subset(5, &[Task::NodeCount, Task::CycleCheck], &Bucket::ALL);
    let jobs = render_jobs(&ds, &[Strategy::ZeroShot, Strategy::BaG], &Renderer::default()).unwrap();
    let client = Client::new(Backend::MockOracle, ModelConfig::default(), None);
    for parallel in [1, 3, 8] {
        let (results, stats) = execute(&jobs, &client, parallel);
        assert!(stats.max_in_flight <= parallel, "{stats:?}");
        assert_eq!(results.len(), jobs.len());
        for (job, r) in jobs.iter().zip(&results) {
            let t = r.as_ref().unwrap();
            assert_eq!((t.instance_id.as_str(), t.strategy), (job.instance.id.as_str(), job.bundle.strategy));
        }
    }
}

#[test]
fn replay_with_cold_cache_reports_misses_per_instance() {
    let ds = assemble_subset(5, &[Task::EdgeCount], &[Bucket::S]);
    let jobs = render_jobs(&ds, &[Strategy::ZeroShot], &Renderer::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.jsonl"), "").unwrap();
    let cache = ResponseCache::read_only(&dir.path().join("empty.jsonl")).unwrap();
    let client = Client::new(Backend::Replay, ModelConfig::default(), Some(cache));
    let out = run_jobs(&jobs, &client, 4);
    assert_eq!(out.records.len(), 100);
    assert_eq!(out.stats.backend_errors, 100);
    assert!(out.records.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("no cached response"))));
}

/// Kills a run partway (a backend that fails after a budget of calls),
/// resumes it from the cache, and compares against an uninterrupted run.
#[test]
fn interrupted_run_resumes_to_the_same_report() {
    let ds = assemble_subset(21, &Task::ALL, &[Bucket::S, Bucket::M]);
    let strategies = [Strategy::ZeroShot, Strategy::ZeroCoT];
    let renderer = Renderer::default().excluding(&ds.instances);
    let jobs = render_jobs(&ds, &strategies, &renderer).unwrap();
    let meta = RunMeta { model: "mock:adversary".into(), backend: "mock:adversary".into(), master_seed: 21, timestamp: None };

    let dir = tempfile::tempdir().unwrap();
    let baseline_client = Client::new(
        Backend::MockAdversary,
        ModelConfig::default(),
        Some(ResponseCache::open(&dir.path().join("baseline.jsonl")).unwrap()),
    );
    let baseline = run_jobs(&jobs, &baseline_client, 4);
    let baseline_report = aggregate_report(&baseline.records, Some(&ds), meta.clone()).unwrap();

    // First attempt: only a prefix of the work completes before the "crash".
    let resumed_path = dir.path().join("resumed.jsonl");
    {
        let client = Client::new(Backend::MockAdversary, ModelConfig::default(), Some(ResponseCache::open(&resumed_path).unwrap()));
        run_jobs(&jobs[..jobs.len() / 3], &client, 4);
    }
    // Simulate a write torn by the kill.
    let mut f = std::fs::OpenOptions::new().append(true).open(&resumed_path).unwrap();
    f.write_all(b"{\"key\":\"deadbeef\",\"mo").unwrap();
    drop(f);

    let client = Client::new(Backend::MockAdversary, ModelConfig::default(), Some(ResponseCache::open(&resumed_path).unwrap()));
    let resumed = run_jobs(&jobs, &client, 4);
    // Repeated prompts later in the run also hit, so this is a lower bound.
    assert!(resumed.stats.cache_hits >= jobs.len() / 3);
    let resumed_report = aggregate_report(&resumed.records, Some(&ds), meta).unwrap();
    assert_eq!(resumed_report.cells, baseline_report.cells);
    for format in [ReportFormat::Csv, ReportFormat::Markdown] {
        assert_eq!(emit_report(&resumed_report, format, true), emit_report(&baseline_report, format, true));
    }
    let by_key: HashMap<_, _> = baseline.transcripts.iter().map(|t| (t.prompt_hash.clone(), t.response.clone())).collect();
    assert!(resumed.transcripts.iter().all(|t| by_key[&t.prompt_hash] == t.response));
}
