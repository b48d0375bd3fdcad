//! Append-only chain store: one JSON record per line, integers as decimal
//! strings.

use crate::chains::{ChainError, GrowthRule, Policy, PrimeChain};
use serde::{Deserialize, Serialize};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};
use thiserror::Error;

/// Serde adapter writing an `Integer` as a decimal string.
pub mod integer_text {
    use rug::Integer;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let text = String::deserialize(d)?;
        Integer::from_str_radix(&text, 10).map_err(D::Error::custom)
    }
}

/// Serde adapter for lists of integers as decimal strings.
pub mod integer_list {
    use rug::Integer;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Integer], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Integer>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| Integer::from_str_radix(t, 10).map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store I/O on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed record at {path}:{line}: {source}")]
    Format {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub rule: GrowthRule,
    pub policy: Policy,
    pub offset: u64,
    #[serde(with = "integer_list")]
    pub primes: Vec<rug::Integer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    /// Which operation produced the chain (`generate`, `search`, ...).
    pub provenance: String,
    pub created_unix: u64,
}

impl ChainRecord {
    pub fn from_chain(chain: &PrimeChain, provenance: &str) -> ChainRecord {
        ChainRecord {
            rule: chain.rule(),
            policy: chain.policy(),
            offset: chain.offset(),
            primes: chain.primes().to_vec(),
            seed: chain.seed().map(str::to_string),
            provenance: provenance.to_string(),
            created_unix: unix_now(),
        }
    }

    pub fn to_chain(&self) -> Result<PrimeChain, ChainError> {
        let chain = PrimeChain::new(self.rule, self.policy, self.offset, self.primes.clone())?;
        Ok(match &self.seed {
            Some(s) => chain.with_seed(s.clone()),
            None => chain,
        })
    }
}

/// Everything needed to rerun a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub rng_seeds: Vec<u64>,
    pub library_version: String,
    pub started: String,
    pub wall_time_secs: f64,
    pub outcome: String,
}

/// One restart of a search, for progress tracking.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressRecord {
    pub restart: u32,
    pub best_length: usize,
    pub best_energy: f64,
    #[serde(with = "integer_list")]
    pub best_primes: Vec<rug::Integer>,
    pub provenance: String,
}

/// A line of the store.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Chain(ChainRecord),
    Manifest(RunManifest),
    Progress(ProgressRecord),
    Forest(crate::trees::ForestRecord),
    /// Free-form structured data, such as a verification report.
    Data { name: String, value: serde_json::Value },
}

/// A store file; records are only ever appended.
#[derive(Clone, Debug)]
pub struct ChainStore {
    path: PathBuf,
}

impl ChainStore {
    pub fn new(path: impl Into<PathBuf>) -> ChainStore {
        ChainStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, source: io::Error) -> StoreError {
        StoreError::Io {
            path: self.path.clone(),
            source,
        }
    }

    pub fn append(&self, record: &Record) -> Result<(), StoreError> {
        self.append_all(std::slice::from_ref(record))
    }

    pub fn append_all(&self, records: &[Record]) -> Result<(), StoreError> {
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| self.io(e))?;
        }
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(r).expect("records serialize"));
            buf.push('\n');
        }
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| self.io(e))?;
        f.write_all(buf.as_bytes()).map_err(|e| self.io(e))
    }

    /// Every record, in file order; a missing file is an empty store.
    pub fn read_all(&self) -> Result<Vec<Record>, StoreError> {
        let f = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(self.io(e)),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| self.io(e))?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).map_err(|source| StoreError::Format {
                path: self.path.clone(),
                line: i + 1,
                source,
            })?);
        }
        Ok(out)
    }

    pub fn chains(&self) -> Result<Vec<ChainRecord>, StoreError> {
        Ok(self
            .read_all()?
            .into_iter()
            .filter_map(|r| match r {
                Record::Chain(c) => Some(c),
                _ => None,
            })
            .collect())
    }
}
