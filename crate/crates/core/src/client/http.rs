use serde::Deserialize;
use serde_json::json;
use std::time::Duration;

use super::{backoff_delay, ModelConfig};
use crate::error::ClientError;

/// Longest server-requested wait we honor before retrying.
const MAX_RETRY_AFTER: Duration = Duration::from_secs(120);

/// Blocking chat-completions client.
#[derive(Debug, Clone)]
pub struct HttpChat {
    http: reqwest::blocking::Client,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

enum Failure {
    Timeout,
    RateLimited,
    Server(u16),
    Transport(String),
}

impl HttpChat {
    pub fn new(config: &ModelConfig) -> Result<Self, ClientError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(HttpChat { http })
    }

    /// Sends one user message and returns the assistant text.
    ///
    /// Timeouts, 429 and 5xx are retried with exponential backoff (429
    /// honors `Retry-After`). Other 4xx and unparsable bodies fail at once.
    pub fn complete(&self, prompt: &str, config: &ModelConfig) -> Result<String, ClientError> {
        let body = json!({
            "model": config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
            "max_tokens": config.max_tokens,
        });
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        let mut attempt = 0;
        loop {
            let mut req = self.http.post(&config.endpoint).json(&body);
            if let Some(key) = &api_key {
                req = req.bearer_auth(key);
            }
            let (failure, wait) = match req.send() {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let text = resp.text().map_err(|e| ClientError::MalformedResponse(e.to_string()))?;
                        return parse_content(&text);
                    }
                    let code = status.as_u16();
                    if code == 429 {
                        let retry_after = resp
                            .headers()
                            .get(reqwest::header::RETRY_AFTER)
                            .and_then(|v| v.to_str().ok())
                            .and_then(|v| v.trim().parse::<u64>().ok())
                            .map(|s| Duration::from_secs(s).min(MAX_RETRY_AFTER));
                        (Failure::RateLimited, retry_after)
                    } else if status.is_server_error() {
                        (Failure::Server(code), None)
                    } else {
                        let body = resp.text().unwrap_or_default();
                        return Err(ClientError::Rejected { status: code, body: truncate(&body, 500) });
                    }
                }
                Err(e) if e.is_timeout() => (Failure::Timeout, None),
                Err(e) => (Failure::Transport(e.to_string()), None),
            };
            attempt += 1;
            if attempt > config.max_retries {
                let attempts = attempt;
                return Err(match failure {
                    Failure::Timeout => ClientError::Timeout { attempts },
                    Failure::RateLimited => ClientError::RateLimited { attempts },
                    Failure::Server(status) => ClientError::Server { status, attempts },
                    Failure::Transport(msg) => ClientError::Transport(msg),
                });
            }
            std::thread::sleep(wait.unwrap_or_else(|| backoff_delay(config.backoff_base_ms, attempt - 1)));
        }
    }
}

fn parse_content(text: &str) -> Result<String, ClientError> {
    let parsed: ChatResponse =
        serde_json::from_str(text).map_err(|e| ClientError::MalformedResponse(format!("{e}: {}", truncate(text, 200))))?;
    parsed
        .choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| ClientError::MalformedResponse("no message content in choices".into()))
}

fn truncate(s: &str, max: usize) -> String {
    match s.char_indices().nth(max) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}
