//! Corpus download with atomic writes and optional SHA-256 verification.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Extra attempts after a retriable failure (transport error, 429, 5xx).
    pub retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            retries: 3,
            backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(600),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FetchStatus {
    Downloaded,
    Skipped,
    DigestMismatch { expected: String, actual: String },
    Failed { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct FetchOutcome {
    pub url: String,
    pub path: PathBuf,
    #[serde(flatten)]
    pub status: FetchStatus,
}

/// Downloads each URL into `dest`.
///
/// `checksums` maps either the URL or the target file name to a hex SHA-256
/// digest. A file that is already present is skipped when it matches its
/// digest, or when no digest is known for it.
pub fn fetch_corpus(
    urls: &[String],
    dest: &Path,
    checksums: &HashMap<String, String>,
    opts: &FetchOptions,
) -> io::Result<Vec<FetchOutcome>> {
    if urls.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dest)?;
    let agent = ureq::AgentBuilder::new().timeout(opts.timeout).build();
    let mut out = Vec::with_capacity(urls.len());
    for url in urls {
        let name = file_name(url);
        let path = dest.join(&name);
        let expected = checksums
            .get(url)
            .or_else(|| checksums.get(&name))
            .map(|d| d.to_ascii_lowercase());

        if path.exists() {
            let present_ok = match &expected {
                Some(d) => sha256_file(&path)? == *d,
                None => true,
            };
            if present_ok {
                out.push(FetchOutcome { url: url.clone(), path, status: FetchStatus::Skipped });
                continue;
            }
        }

        let tmp = dest.join(format!(".{name}.part-{}", std::process::id()));
        let status = match download_with_retries(&agent, url, &tmp, opts) {
            Err(reason) => {
                let _ = fs::remove_file(&tmp);
                FetchStatus::Failed { reason }
            }
            Ok(actual) => match expected {
                Some(expected) if expected != actual => {
                    fs::remove_file(&tmp)?;
                    FetchStatus::DigestMismatch { expected, actual }
                }
                _ => {
                    fs::rename(&tmp, &path)?;
                    FetchStatus::Downloaded
                }
            },
        };
        out.push(FetchOutcome { url: url.clone(), path, status });
    }
    Ok(out)
}

/// Parses a manifest: one URL per line, optionally followed by its hex
/// SHA-256 digest. Blank lines and `#` comments are ignored.
pub fn parse_manifest(text: &str) -> (Vec<String>, HashMap<String, String>) {
    let mut urls = Vec::new();
    let mut digests = HashMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let url = parts.next().unwrap().to_owned();
        if let Some(d) = parts.next() {
            digests.insert(url.clone(), d.to_owned());
        }
        urls.push(url);
    }
    (urls, digests)
}

fn file_name(url: &str) -> String {
    let no_query = url.split(['?', '#']).next().unwrap_or(url);
    no_query
        .trim_end_matches('/')
        .rsplit('/')
        .next()
        .filter(|s| !s.is_empty())
        .unwrap_or("download")
        .to_owned()
}

fn download_with_retries(
    agent: &ureq::Agent,
    url: &str,
    tmp: &Path,
    opts: &FetchOptions,
) -> Result<String, String> {
    let mut attempt = 0;
    loop {
        match download_once(agent, url, tmp) {
            Ok(digest) => return Ok(digest),
            Err(Attempt::Fatal(e)) => return Err(e),
            Err(Attempt::Retriable(e)) if attempt >= opts.retries => {
                return Err(format!("{e} (after {} attempts)", attempt + 1))
            }
            Err(Attempt::Retriable(_)) => {
                attempt += 1;
                thread::sleep(opts.backoff * attempt);
            }
        }
    }
}

enum Attempt {
    Retriable(String),
    Fatal(String),
}

fn download_once(agent: &ureq::Agent, url: &str, tmp: &Path) -> Result<String, Attempt> {
    let reader: Box<dyn Read> = if let Some(local) = url.strip_prefix("file://") {
        Box::new(File::open(local).map_err(|e| Attempt::Fatal(format!("{local}: {e}")))?)
    } else {
        match agent.get(url).call() {
            Ok(resp) => resp.into_reader(),
            Err(ureq::Error::Status(code, _)) if code == 429 || code >= 500 => {
                return Err(Attempt::Retriable(format!("HTTP {code}")))
            }
            Err(ureq::Error::Status(code, _)) => return Err(Attempt::Fatal(format!("HTTP {code}"))),
            Err(e) => return Err(Attempt::Retriable(e.to_string())),
        }
    };
    copy_hashing(reader, tmp).map_err(|e| Attempt::Retriable(e.to_string()))
}

fn copy_hashing(mut reader: impl Read, path: &Path) -> io::Result<String> {
    let mut file = File::create(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        file.write_all(&buf[..n])?;
    }
    file.sync_all()?;
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    io::copy(&mut file, &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}
