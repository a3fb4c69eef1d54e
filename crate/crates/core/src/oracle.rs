//! Pluggable contradiction/implication judgements over natural-language
//! strings.
//!
//! Two backends are provided. The lexical backend is a fixed, fully
//! deterministic rule so that the whole metric suite runs offline: it
//! tokenizes both strings, drops stop words, counts negation markers, and
//! compares content-token overlap. The remote backend delegates to an NLI
//! service speaking a small JSON protocol (see [`RemoteNliOracle`]).
//!
//! Lexical rule, precisely:
//!
//! * contradiction between `a` and `b` holds when the content-token
//!   Jaccard overlap is at least 0.6 and the negation-marker counts of the
//!   two sides have different parity;
//! * `a` implies `b` when `a` covers at least the configured fraction of
//!   `b`'s content tokens and the negation parities match.
//!
//! A set of sources contradicts a target when the sources are mutually
//! inconsistent, when any single source contradicts the target, or when
//! the conjunction of the sources (joined with `". "` in document order)
//! contradicts the target.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Content-token Jaccard overlap required before two statements can count
/// as lexically contradictory.
pub const LEXICAL_JACCARD_CUTOFF: f64 = 0.6;

/// Separator used when judging a set of sources as one conjunction.
pub const SET_SEPARATOR: &str = ". ";

/// Environment variable that overrides the configured NLI endpoint.
pub const NLI_URL_ENV: &str = "RATIONALE_NLI_URL";

const REMOTE_TIMEOUT: Duration = Duration::from_secs(10);

const NEGATION_MARKERS: &[&str] = &["not", "no", "never", "none", "cannot"];

const STOPWORDS: &[&str] = &[
    "a", "an", "the", "is", "are", "was", "were", "be", "been", "being", "am", "do", "does",
    "did", "done", "has", "have", "had", "having", "of", "to", "in", "on", "at", "by", "for",
    "with", "from", "as", "into", "onto", "over", "under", "about", "than", "then", "that",
    "this", "these", "those", "there", "here", "it", "its", "he", "she", "they", "them", "his",
    "her", "their", "we", "us", "our", "you", "your", "i", "me", "my", "and", "or", "but", "if",
    "because", "while", "when", "where", "which", "who", "whom", "whose", "what", "how", "why",
    "can", "could", "will", "would", "shall", "should", "may", "might", "must", "s", "t", "d",
    "ll", "m", "re", "ve", "y", "also", "however", "thus", "so", "such", "both", "each", "few",
    "more", "most", "other", "some", "any", "only", "own", "same", "very", "just", "even",
];

/// Verdict of a single oracle query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationJudgement {
    pub contradiction: bool,
    pub implication: bool,
    pub contradiction_score: f64,
    pub implication_score: f64,
    pub backend: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleBackend {
    #[default]
    Lexical,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub backend: OracleBackend,
    pub contradiction_threshold: f64,
    pub implication_threshold: f64,
    pub cache_enabled: bool,
    pub remote_url: Option<String>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            backend: OracleBackend::Lexical,
            contradiction_threshold: 0.5,
            implication_threshold: 0.5,
            cache_enabled: true,
            remote_url: None,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, value) in [
            ("contradiction_threshold", self.contradiction_threshold),
            ("implication_threshold", self.implication_threshold),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(format!("{name} {value} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("NLI service unavailable: {0}")]
    RemoteUnavailable(String),
    #[error("NLI service returned a malformed response: {0}")]
    MalformedResponse(String),
    #[error("remote oracle backend selected but no endpoint is configured")]
    MissingRemoteUrl,
}

/// A contradiction/implication oracle. Implementations must be
/// deterministic for a fixed configuration; failures are surfaced, never
/// silently mapped to "no contradiction".
pub trait TextOracle: Send + Sync {
    fn backend_name(&self) -> &'static str;

    fn contradicts(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError>;

    fn implies(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError>;

    /// Judges a non-empty set of sources against a target: reports a
    /// contradiction when the sources are mutually inconsistent, when any
    /// single source contradicts the target, or when their conjunction
    /// does.
    fn set_contradicts(&self, sources: &[&str], target: &str) -> Result<RelationJudgement, OracleError> {
        let mut contradiction = false;
        let mut score: f64 = 0.0;

        // Internal-consistency pre-pass over the sources themselves.
        for i in 0..sources.len() {
            for j in (i + 1)..sources.len() {
                let judgement = self.contradicts(sources[i], sources[j])?;
                contradiction |= judgement.contradiction;
                score = score.max(judgement.contradiction_score);
            }
        }
        // Each source individually against the target: a conjunction
        // contradicts the target whenever one of its conjuncts does.
        for source in sources {
            let judgement = self.contradicts(source, target)?;
            contradiction |= judgement.contradiction;
            score = score.max(judgement.contradiction_score);
        }
        // The conjunction as a whole, joined in document order.
        let joined = sources.join(SET_SEPARATOR);
        let conjunction = self.contradicts(&joined, target)?;
        contradiction |= conjunction.contradiction;
        score = score.max(conjunction.contradiction_score);

        Ok(RelationJudgement {
            contradiction,
            implication: conjunction.implication,
            contradiction_score: score,
            implication_score: conjunction.implication_score,
            backend: conjunction.backend,
        })
    }
}

/// Builds the oracle selected by the configuration. The
/// `RATIONALE_NLI_URL` environment variable overrides the configured
/// remote endpoint.
pub fn build_oracle(config: &OracleConfig) -> Result<Box<dyn TextOracle>, OracleError> {
    match config.backend {
        OracleBackend::Lexical => Ok(Box::new(LexicalOracle::new(config.clone()))),
        OracleBackend::Remote => {
            let mut config = config.clone();
            if let Ok(url) = std::env::var(NLI_URL_ENV) {
                if !url.is_empty() {
                    config.remote_url = Some(url);
                }
            }
            Ok(Box::new(RemoteNliOracle::new(config)?))
        }
    }
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
struct TokenProfile {
    content: BTreeSet<String>,
    negations: usize,
}

impl TokenProfile {
    fn parity(&self) -> usize {
        self.negations % 2
    }
}

/// Crude plural folding: strip a trailing `s` from tokens of length >= 4
/// unless they end in a double `s`.
fn fold_token(token: &str) -> String {
    if token.len() >= 4 && token.ends_with('s') && !token.ends_with("ss") {
        token[..token.len() - 1].to_owned()
    } else {
        token.to_owned()
    }
}

fn token_profile(text: &str) -> TokenProfile {
    let lowered = text.to_lowercase().replace("n't", " not ");
    let mut content = BTreeSet::new();
    let mut negations = 0;
    for raw in lowered.split(|c: char| !c.is_alphanumeric()) {
        if raw.is_empty() {
            continue;
        }
        if NEGATION_MARKERS.contains(&raw) {
            negations += 1;
        } else if !STOPWORDS.contains(&raw) {
            content.insert(fold_token(raw));
        }
    }
    TokenProfile { content, negations }
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let intersection = a.intersection(b).count();
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Fraction of `b`'s content tokens covered by `a`; 1.0 when `b` carries
/// no content tokens (a vacuous hypothesis is always covered).
fn coverage(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    if b.is_empty() {
        1.0
    } else {
        b.intersection(a).count() as f64 / b.len() as f64
    }
}

// ---------------------------------------------------------------------------
// Lexical backend
// ---------------------------------------------------------------------------

type CacheKey = (u8, String, String);
type Cache = Mutex<HashMap<CacheKey, RelationJudgement>>;

const OP_CONTRADICTS: u8 = 0;
const OP_IMPLIES: u8 = 1;

/// Deterministic offline oracle backed by the fixed lexical rule.
pub struct LexicalOracle {
    config: OracleConfig,
    cache: Option<Cache>,
}

impl LexicalOracle {
    pub fn new(config: OracleConfig) -> Self {
        let cache = config.cache_enabled.then(|| Mutex::new(HashMap::new()));
        Self { config, cache }
    }

    pub fn with_defaults() -> Self {
        Self::new(OracleConfig::default())
    }

    fn cached(
        &self,
        op: u8,
        a: &str,
        b: &str,
        compute: impl FnOnce() -> RelationJudgement,
    ) -> RelationJudgement {
        match &self.cache {
            None => compute(),
            Some(cache) => {
                let key = (op, a.to_owned(), b.to_owned());
                if let Some(hit) = cache.lock().expect("oracle cache poisoned").get(&key) {
                    return hit.clone();
                }
                let judgement = compute();
                cache
                    .lock()
                    .expect("oracle cache poisoned")
                    .insert(key, judgement.clone());
                judgement
            }
        }
    }

    fn judge_contradiction(&self, a: &str, b: &str) -> RelationJudgement {
        let pa = token_profile(a);
        let pb = token_profile(b);
        let overlap = jaccard(&pa.content, &pb.content);
        let parity_mismatch = pa.parity() != pb.parity();
        let score = if parity_mismatch && overlap >= LEXICAL_JACCARD_CUTOFF {
            overlap
        } else {
            0.0
        };
        RelationJudgement {
            contradiction: score > 0.0 && score >= self.config.contradiction_threshold,
            implication: false,
            contradiction_score: score,
            implication_score: 0.0,
            backend: "lexical".to_owned(),
        }
    }

    fn judge_implication(&self, a: &str, b: &str) -> RelationJudgement {
        let pa = token_profile(a);
        let pb = token_profile(b);
        let parity_match = pa.parity() == pb.parity();
        let score = if parity_match {
            coverage(&pa.content, &pb.content)
        } else {
            0.0
        };
        RelationJudgement {
            contradiction: false,
            implication: parity_match && score >= self.config.implication_threshold,
            contradiction_score: 0.0,
            implication_score: score,
            backend: "lexical".to_owned(),
        }
    }
}

impl TextOracle for LexicalOracle {
    fn backend_name(&self) -> &'static str {
        "lexical"
    }

    fn contradicts(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError> {
        Ok(self.cached(OP_CONTRADICTS, a, b, || self.judge_contradiction(a, b)))
    }

    fn implies(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError> {
        Ok(self.cached(OP_IMPLIES, a, b, || self.judge_implication(a, b)))
    }
}

// ---------------------------------------------------------------------------
// Remote backend
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct NliRequest<'a> {
    premise: &'a str,
    hypothesis: &'a str,
}

#[derive(Debug, Deserialize)]
struct NliResponse {
    label: String,
    #[serde(default)]
    scores: HashMap<String, f64>,
}

/// Client for an external NLI service.
///
/// Protocol: `POST {remote_url}/nli` with body
/// `{"premise": str, "hypothesis": str}`; the response is
/// `{"label": "ENTAILMENT"|"CONTRADICTION"|"NEUTRAL", "scores": {label: prob}}`.
pub struct RemoteNliOracle {
    config: OracleConfig,
    endpoint: String,
    client: reqwest::blocking::Client,
    cache: Option<Cache>,
}

impl RemoteNliOracle {
    pub fn new(config: OracleConfig) -> Result<Self, OracleError> {
        let base = config
            .remote_url
            .clone()
            .ok_or(OracleError::MissingRemoteUrl)?;
        let endpoint = format!("{}/nli", base.trim_end_matches('/'));
        let client = reqwest::blocking::Client::builder()
            .timeout(REMOTE_TIMEOUT)
            .build()
            .map_err(|e| OracleError::RemoteUnavailable(e.to_string()))?;
        let cache = config.cache_enabled.then(|| Mutex::new(HashMap::new()));
        Ok(Self {
            config,
            endpoint,
            client,
            cache,
        })
    }

    /// One round trip to the service, mapping its label and probabilities
    /// onto a [`RelationJudgement`] via the configured thresholds.
    pub fn remote_judge(&self, premise: &str, hypothesis: &str) -> Result<RelationJudgement, OracleError> {
        if let Some(cache) = &self.cache {
            let key = (OP_CONTRADICTS, premise.to_owned(), hypothesis.to_owned());
            if let Some(hit) = cache.lock().expect("oracle cache poisoned").get(&key) {
                return Ok(hit.clone());
            }
        }

        let response = self
            .client
            .post(&self.endpoint)
            .json(&NliRequest { premise, hypothesis })
            .send()
            .map_err(|e| OracleError::RemoteUnavailable(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(OracleError::RemoteUnavailable(format!(
                "{} returned HTTP {}",
                self.endpoint, status
            )));
        }
        let parsed: NliResponse = response
            .json()
            .map_err(|e| OracleError::MalformedResponse(e.to_string()))?;

        let label = parsed.label.to_uppercase();
        if !matches!(label.as_str(), "ENTAILMENT" | "CONTRADICTION" | "NEUTRAL") {
            return Err(OracleError::MalformedResponse(format!(
                "unknown label '{}'",
                parsed.label
            )));
        }
        let label_score = |name: &str| -> f64 {
            parsed
                .scores
                .get(name)
                .copied()
                .unwrap_or(if label == name { 1.0 } else { 0.0 })
                .clamp(0.0, 1.0)
        };
        let contradiction_score = label_score("CONTRADICTION");
        let implication_score = label_score("ENTAILMENT");
        let judgement = RelationJudgement {
            contradiction: label == "CONTRADICTION"
                && contradiction_score >= self.config.contradiction_threshold,
            implication: label == "ENTAILMENT"
                && implication_score >= self.config.implication_threshold,
            contradiction_score,
            implication_score,
            backend: "remote".to_owned(),
        };

        if let Some(cache) = &self.cache {
            let key = (OP_CONTRADICTS, premise.to_owned(), hypothesis.to_owned());
            cache
                .lock()
                .expect("oracle cache poisoned")
                .insert(key, judgement.clone());
        }
        Ok(judgement)
    }
}

impl TextOracle for RemoteNliOracle {
    fn backend_name(&self) -> &'static str {
        "remote"
    }

    fn contradicts(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError> {
        self.remote_judge(a, b)
    }

    fn implies(&self, a: &str, b: &str) -> Result<RelationJudgement, OracleError> {
        self.remote_judge(a, b)
    }
}
