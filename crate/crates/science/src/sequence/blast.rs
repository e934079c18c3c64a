//! Similarity search against the public BLAST URL API.
//!
//! Searches run through a [`BlastTransport`]. Every raw response is written to
//! a cache directory keyed by the SHA-256 of the request, so a client in
//! [`Mode::Replay`] answers from recorded responses and never opens a socket.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const DEFAULT_ENDPOINT: &str = "https://blast.ncbi.nlm.nih.gov/Blast.cgi";
pub const PROGRAMS: [&str; 5] = ["blastn", "blastp", "blastx", "tblastn", "tblastx"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlastRequest {
    pub program: String,
    pub database: String,
    pub sequence: String,
}

impl BlastRequest {
    pub fn new(program: &str, database: &str, sequence: &str) -> Result<Self> {
        let program = program.trim().to_ascii_lowercase();
        if !PROGRAMS.contains(&program.as_str()) {
            return Err(Error::validation(
                "program",
                format!("unknown program {program:?}; expected one of {}", PROGRAMS.join(", ")),
            ));
        }
        let database = database.trim();
        if database.is_empty() || !database.bytes().all(|b| b.is_ascii_graphic()) {
            return Err(Error::validation("database", "must be a non-empty database name"));
        }
        let sequence: String = sequence.split_whitespace().collect::<String>().to_ascii_uppercase();
        if sequence.is_empty() || !sequence.bytes().all(|b| b.is_ascii_alphabetic() || b == b'*' || b == b'-') {
            return Err(Error::validation("sequence", "must be a non-empty residue string"));
        }
        Ok(BlastRequest {
            program,
            database: database.to_owned(),
            sequence,
        })
    }

    /// Cache key: lowercase hex SHA-256 over `program\ndatabase\nsequence`.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.program.as_bytes());
        h.update(b"\n");
        h.update(self.database.as_bytes());
        h.update(b"\n");
        h.update(self.sequence.as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlastHit {
    pub id: String,
    /// Bit score.
    pub score: f64,
    pub e_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlastResult {
    pub request: BlastRequest,
    pub raw: String,
    pub hits: Vec<BlastHit>,
    pub from_cache: bool,
}

/// Parses tabular (outfmt 7 style) output: `#` comment lines and twelve
/// tab-separated columns per hit, subject id in column 2, e-value and bit
/// score in columns 11 and 12.
pub fn parse_tabular(raw: &str) -> Result<Vec<BlastHit>> {
    let fail = |message: String| Error::Parse {
        message,
        raw: raw.to_owned(),
    };
    let mut saw_header = false;
    let mut hits = Vec::new();
    for (n, line) in raw.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("<pre>") || trimmed.eq_ignore_ascii_case("</pre>") {
            continue;
        }
        if trimmed.starts_with('#') {
            saw_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 12 {
            return Err(fail(format!("line {}: expected 12 columns, found {}", n + 1, cols.len())));
        }
        let number = |i: usize, what: &str| {
            cols[i]
                .trim()
                .parse::<f64>()
                .map_err(|_| fail(format!("line {}: bad {what} {:?}", n + 1, cols[i])))
        };
        hits.push(BlastHit {
            id: cols[1].trim().to_owned(),
            e_value: number(10, "e-value")?,
            score: number(11, "bit score")?,
        });
    }
    if !saw_header && hits.is_empty() {
        return Err(fail("response holds neither hits nor a report header".into()));
    }
    Ok(hits)
}

/// Fetches the raw tabular report for one request.
pub trait BlastTransport: Send + Sync {
    fn fetch(&self, request: &BlastRequest) -> Result<String>;
}

/// Submit-and-poll client for the BLAST URL API.
pub struct HttpTransport {
    endpoint: String,
    poll_interval: Duration,
    max_wait: Duration,
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(endpoint: &str) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| Error::ServiceUnavailable(e.to_string()))?;
        Ok(HttpTransport {
            endpoint: endpoint.to_owned(),
            poll_interval: Duration::from_secs(10),
            max_wait: Duration::from_secs(600),
            client,
        })
    }

    pub fn with_polling(mut self, interval: Duration, max_wait: Duration) -> Self {
        self.poll_interval = interval;
        self.max_wait = max_wait;
        self
    }

    fn get(&self, query: &[(&str, &str)]) -> Result<String> {
        self.client
            .get(&self.endpoint)
            .query(query)
            .send()
            .and_then(|r| r.error_for_status())
            .and_then(|r| r.text())
            .map_err(|e| Error::ServiceUnavailable(e.to_string()))
    }
}

impl BlastTransport for HttpTransport {
    fn fetch(&self, request: &BlastRequest) -> Result<String> {
        let submitted = self
            .client
            .post(&self.endpoint)
            .form(&[
                ("CMD", "Put"),
                ("PROGRAM", request.program.as_str()),
                ("DATABASE", request.database.as_str()),
                ("QUERY", request.sequence.as_str()),
            ])
            .send()
            .and_then(|r| r.error_for_status())
            .and_then(|r| r.text())
            .map_err(|e| Error::ServiceUnavailable(e.to_string()))?;
        let rid = parse_rid(&submitted)?;
        let started = Instant::now();
        loop {
            std::thread::sleep(self.poll_interval);
            let info = self.get(&[("CMD", "Get"), ("FORMAT_OBJECT", "SearchInfo"), ("RID", &rid)])?;
            match parse_status(&info) {
                Some("READY") => break,
                Some("WAITING") | None => {}
                Some(other) => {
                    return Err(Error::Parse {
                        message: format!("search {rid} ended with status {other}"),
                        raw: info,
                    })
                }
            }
            if started.elapsed() > self.max_wait {
                return Err(Error::ServiceUnavailable(format!("search {rid} timed out")));
            }
        }
        self.get(&[("CMD", "Get"), ("FORMAT_TYPE", "Tabular"), ("RID", &rid)])
    }
}

/// Request id from a `CMD=Put` reply (`RID = XXXXXXXX`).
pub fn parse_rid(text: &str) -> Result<String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("RID = "))
        .map(str::trim)
        .find(|rid| !rid.is_empty())
        .map(str::to_owned)
        .ok_or_else(|| Error::Parse {
            message: "submission reply carries no RID".into(),
            raw: text.to_owned(),
        })
}

/// `Status=` value from a `SearchInfo` reply.
pub fn parse_status(text: &str) -> Option<&str> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix("Status="))
        .map(str::trim)
        .next()
}

/// Transport standing in for a missing network.
pub struct Offline;

impl BlastTransport for Offline {
    fn fetch(&self, _request: &BlastRequest) -> Result<String> {
        Err(Error::ServiceUnavailable("no network transport configured".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Replay,
}

/// Raw responses on disk, one file per request digest.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResponseCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, request: &BlastRequest) -> PathBuf {
        self.dir.join(format!("{}.txt", request.digest()))
    }

    pub fn get(&self, request: &BlastRequest) -> Result<Option<String>> {
        match fs::read_to_string(self.path(request)) {
            Ok(s) => Ok(Some(s)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Write-then-rename so readers never observe a partial file.
    pub fn put(&self, request: &BlastRequest, raw: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = self
            .dir
            .join(format!(".{}.{}.{n}.tmp", request.digest(), std::process::id()));
        fs::write(&tmp, raw)?;
        fs::rename(&tmp, self.path(request))?;
        Ok(())
    }
}

pub struct BlastClient {
    mode: Mode,
    cache: ResponseCache,
    transport: Box<dyn BlastTransport>,
}

impl BlastClient {
    pub fn new(mode: Mode, cache: ResponseCache, transport: Box<dyn BlastTransport>) -> Self {
        BlastClient { mode, cache, transport }
    }

    pub fn replay(cache: ResponseCache) -> Self {
        Self::new(Mode::Replay, cache, Box::new(Offline))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Live mode asks the transport and records the answer, falling back to
    /// the cache if the transport is down. Replay mode only reads the cache.
    pub fn query(&self, request: &BlastRequest) -> Result<BlastResult> {
        let (raw, from_cache) = match self.mode {
            Mode::Replay => match self.cache.get(request)? {
                Some(raw) => (raw, true),
                None => {
                    return Err(Error::ServiceUnavailable(format!(
                        "no recorded response for request {}",
                        request.digest()
                    )))
                }
            },
            Mode::Live => match self.transport.fetch(request) {
                Ok(raw) => {
                    self.cache.put(request, &raw)?;
                    (raw, false)
                }
                Err(Error::ServiceUnavailable(why)) => match self.cache.get(request)? {
                    Some(raw) => (raw, true),
                    None => return Err(Error::ServiceUnavailable(why)),
                },
                Err(e) => return Err(e),
            },
        };
        let hits = parse_tabular(&raw)?;
        Ok(BlastResult {
            request: request.clone(),
            raw,
            hits,
            from_cache,
        })
    }
}
