//! Minimal client for the OEIS search endpoint.
//!
//! Lookups are advisory: callers get an error value back and decide what to
//! do with it, nothing here panics on bad responses.

use std::time::Duration;

use combx_core::BigCount;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BASE: &str = "https://oeis.org";
pub const BASE_ENV: &str = "COMBX_OEIS_URL";
pub const OFFLINE_ENV: &str = "COMBX_OFFLINE";
pub const MIN_TERMS: usize = 4;

#[derive(Debug, Error)]
pub enum OeisError {
    #[error("need at least {MIN_TERMS} terms, got {0}")]
    TooFewTerms(usize),
    #[error("request to {url} failed: {cause}")]
    Http { url: String, cause: String },
    #[error("unexpected response: {0}")]
    Parse(String),
}

impl OeisError {
    /// Whether trying again later might succeed.
    pub fn is_retriable(&self) -> bool {
        matches!(self, OeisError::Http { .. })
    }
}

/// One sequence returned by a search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OeisMatch {
    /// `A` followed by six digits.
    pub sequence_id: String,
    pub name: String,
    /// Index (in the sequence's own numbering) of the first matched term.
    pub matched_offset: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "matches", rename_all = "lowercase")]
pub enum Lookup {
    /// Network disabled by configuration.
    Offline,
    Found(Vec<OeisMatch>),
}

#[derive(Deserialize)]
struct RawEntry {
    number: u64,
    #[serde(default)]
    name: String,
    #[serde(default)]
    data: String,
    #[serde(default)]
    offset: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBody {
    List(Option<Vec<RawEntry>>),
    Wrapped {
        #[serde(default)]
        results: Option<Vec<RawEntry>>,
    },
}

fn locate(data: &[&str], wanted: &[String]) -> Option<usize> {
    if wanted.is_empty() || wanted.len() > data.len() {
        return None;
    }
    data.windows(wanted.len())
        .position(|w| w.iter().zip(wanted).all(|(a, b)| a == b))
}

/// Parses a search response, keeping the order the server returned.
///
/// Accepts both a bare JSON array and an object with a `results` field; a
/// JSON `null` or missing list means no match.
pub fn parse_response(body: &str, terms: &[BigCount]) -> Result<Vec<OeisMatch>, OeisError> {
    let raw: RawBody = serde_json::from_str(body).map_err(|e| OeisError::Parse(e.to_string()))?;
    let entries = match raw {
        RawBody::List(l) => l,
        RawBody::Wrapped { results } => results,
    }
    .unwrap_or_default();
    let wanted: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    entries
        .into_iter()
        .map(|e| {
            if e.number > 999_999 {
                return Err(OeisError::Parse(format!(
                    "sequence number {} out of range",
                    e.number
                )));
            }
            let first_index: i64 = e
                .offset
                .split(',')
                .next()
                .and_then(|o| o.trim().parse().ok())
                .unwrap_or(0);
            let data: Vec<&str> = e
                .data
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect();
            let position = locate(&data, &wanted).unwrap_or(0) as i64;
            Ok(OeisMatch {
                sequence_id: format!("A{:06}", e.number),
                name: e.name,
                matched_offset: first_index + position,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct OeisClient {
    base: String,
    offline: bool,
    agent: ureq::Agent,
}

impl OeisClient {
    pub fn new(base: impl Into<String>, offline: bool) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs(20))
            .build();
        OeisClient {
            base: base.into().trim_end_matches('/').to_string(),
            offline,
            agent,
        }
    }

    /// `$COMBX_OEIS_URL` (default oeis.org); `COMBX_OFFLINE=1` disables requests.
    pub fn from_env() -> Self {
        let base = std::env::var(BASE_ENV).ok().filter(|s| !s.is_empty());
        let offline =
            std::env::var(OFFLINE_ENV).is_ok_and(|v| v == "1" || v.eq_ignore_ascii_case("true"));
        OeisClient::new(base.as_deref().unwrap_or(DEFAULT_BASE), offline)
    }

    pub fn search_url(&self, terms: &[BigCount]) -> String {
        let q: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        format!("{}/search?q={}&fmt=json", self.base, q.join(","))
    }

    pub fn lookup(&self, terms: &[BigCount]) -> Result<Lookup, OeisError> {
        if terms.len() < MIN_TERMS {
            return Err(OeisError::TooFewTerms(terms.len()));
        }
        if self.offline {
            return Ok(Lookup::Offline);
        }
        let url = self.search_url(terms);
        let http = |cause: String| OeisError::Http {
            url: url.clone(),
            cause,
        };
        let body = self
            .agent
            .get(&url)
            .call()
            .map_err(|e| http(e.to_string()))?
            .into_string()
            .map_err(|e| http(e.to_string()))?;
        parse_response(&body, terms).map(Lookup::Found)
    }
}
