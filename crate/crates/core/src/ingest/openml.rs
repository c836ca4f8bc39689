//! Minimal OpenML REST client with an on-disk cache.
//!
//! Layout: `{cache}/openml/{id}.arff` plus `{id}.json` holding the dataset
//! description (needed to recover the default target without a network call).

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::Value;

use super::{parse_arff, Dataset};
use crate::{Error, Result};

pub const DEFAULT_ENDPOINT: &str = "https://www.openml.org";

#[derive(Debug, Clone)]
pub struct OpenMlClient {
    pub endpoint: String,
    pub cache_dir: PathBuf,
    pub attempts: usize,
    pub initial_backoff: Duration,
    pub timeout: Duration,
}

enum Failure {
    Retryable(String),
    Status(u16, String),
}

impl OpenMlClient {
    pub fn new(endpoint: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        OpenMlClient {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            cache_dir: cache_dir.into(),
            attempts: 3,
            initial_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(60),
        }
    }

    fn agent(&self) -> ureq::Agent {
        ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(self.timeout))
            .build()
            .into()
    }

    fn get_once(&self, agent: &ureq::Agent, url: &str) -> std::result::Result<Vec<u8>, Failure> {
        let mut resp = agent
            .get(url)
            .call()
            .map_err(|e| Failure::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .with_config()
            .limit(u64::MAX)
            .read_to_vec()
            .map_err(|e| Failure::Retryable(e.to_string()))?;
        match status {
            200..=299 => Ok(body),
            429 | 500..=599 => Err(Failure::Retryable(format!("HTTP {status}"))),
            _ => Err(Failure::Status(status, String::from_utf8_lossy(&body).into_owned())),
        }
    }

    /// GET with bounded retries and exponential backoff on transport errors,
    /// 429 and 5xx. Other statuses are terminal.
    fn get(&self, id: u64, url: &str) -> Result<Vec<u8>> {
        let agent = self.agent();
        let mut backoff = self.initial_backoff;
        let mut last = String::new();
        for attempt in 1..=self.attempts.max(1) {
            match self.get_once(&agent, url) {
                Ok(body) => return Ok(body),
                Err(Failure::Status(status, message)) => {
                    return Err(Error::UnknownDataset {
                        id,
                        status,
                        message: server_message(&message),
                    })
                }
                Err(Failure::Retryable(msg)) => {
                    log::warn!("GET {url} failed (attempt {attempt}): {msg}");
                    last = msg;
                    if attempt < self.attempts {
                        std::thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(Error::Network {
            attempts: self.attempts.max(1),
            message: last,
        })
    }

    fn paths(&self, id: u64) -> (PathBuf, PathBuf) {
        let dir = self.cache_dir.join("openml");
        (dir.join(format!("{id}.arff")), dir.join(format!("{id}.json")))
    }

    /// Fetches dataset `id`, serving from the cache when both files are present.
    pub fn fetch(&self, id: u64) -> Result<Dataset> {
        let (arff_path, desc_path) = self.paths(id);
        if !(arff_path.exists() && desc_path.exists()) {
            let url = format!("{}/api/v1/json/data/{id}", self.endpoint);
            let desc_bytes = self.get(id, &url)?;
            let desc = Description::parse(&desc_bytes)?;
            let arff = self.get(id, &desc.url)?;
            std::fs::create_dir_all(arff_path.parent().unwrap())
                .map_err(|e| Error::io(&arff_path, e))?;
            write_atomic(&arff_path, &arff)?;
            write_atomic(&desc_path, &desc_bytes)?;
        }
        let desc_bytes = std::fs::read(&desc_path).map_err(|e| Error::io(&desc_path, e))?;
        let desc = Description::parse(&desc_bytes)?;
        let text = std::fs::read_to_string(&arff_path).map_err(|e| Error::io(&arff_path, e))?;
        let mut ds = parse_arff(&text, desc.target.as_deref(), &desc.name)?;
        ds.name = desc.name;
        Ok(ds)
    }
}

/// Convenience wrapper around [`OpenMlClient::fetch`].
pub fn fetch_openml(dataset_id: u64, endpoint: &str, cache_dir: impl Into<PathBuf>) -> Result<Dataset> {
    OpenMlClient::new(endpoint, cache_dir).fetch(dataset_id)
}

struct Description {
    name: String,
    url: String,
    target: Option<String>,
}

impl Description {
    fn parse(bytes: &[u8]) -> Result<Self> {
        let v: Value = serde_json::from_slice(bytes)
            .map_err(|e| Error::MalformedPayload(format!("dataset description: {e}")))?;
        let d = v
            .get("data_set_description")
            .ok_or_else(|| Error::MalformedPayload("missing `data_set_description`".into()))?;
        let url = d
            .get("url")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::MalformedPayload("missing data file `url`".into()))?
            .to_string();
        let name = d
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or("openml")
            .to_string();
        let target = match d.get("default_target_attribute") {
            Some(Value::String(s)) => {
                let mut parts = s.split(',').map(str::trim).filter(|p| !p.is_empty());
                let first = parts.next().map(str::to_string);
                if parts.next().is_some() {
                    log::warn!("dataset `{name}` declares several targets `{s}`; using `{}`", first.as_deref().unwrap_or(""));
                }
                first
            }
            Some(Value::Array(a)) => {
                if a.len() > 1 {
                    log::warn!("dataset `{name}` declares several targets; using the first");
                }
                a.first().and_then(Value::as_str).map(str::to_string)
            }
            _ => None,
        };
        Ok(Description { name, url, target })
    }
}

fn server_message(body: &str) -> String {
    serde_json::from_str::<Value>(body)
        .ok()
        .and_then(|v| {
            v.pointer("/error/message")
                .and_then(Value::as_str)
                .map(str::to_string)
        })
        .unwrap_or_else(|| body.chars().take(200).collect())
}

/// Write-temp-then-rename.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
