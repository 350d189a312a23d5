//! On-disk cache of census tables.
//!
//! One file per census spec. The first line is a JSON header carrying the
//! artifact version, the spec and a sha256 of the CSV body that follows.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hasse::{CensusSpec, CountTable};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const VERSION: &str = concat!("hasse-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    version: String,
    spec: CensusSpec,
    body_sha256: String,
}

pub struct Cache {
    dir: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, spec: &CensusSpec) -> PathBuf {
        let key = serde_json::to_string(spec).expect("spec serializes");
        self.dir.join(format!("{}.csv", sha256_hex(format!("{VERSION}\n{key}").as_bytes())))
    }

    /// Cached (x, count) rows for the spec, or empty when there is no file
    /// or it belongs to another version.
    pub fn load(&self, spec: &CensusSpec) -> Result<BTreeMap<u64, u64>, CliError> {
        let path = self.path_for(spec);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |why: &str| CliError::CacheCorrupt(format!("{}: {why}", path.display()));
        let (head, body) = text.split_once('\n').ok_or_else(|| corrupt("missing header"))?;
        let header: Header = serde_json::from_str(head).map_err(|_| corrupt("unreadable header"))?;
        if header.version != VERSION {
            return Ok(BTreeMap::new());
        }
        if header.spec != *spec {
            return Err(corrupt("spec does not match its key"));
        }
        if sha256_hex(body.as_bytes()) != header.body_sha256 {
            return Err(corrupt("content hash mismatch"));
        }
        let mut rows = BTreeMap::new();
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        for rec in reader.records() {
            let rec = rec.map_err(|_| corrupt("bad csv"))?;
            let x = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| corrupt("bad x"))?;
            let c = rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| corrupt("bad count"))?;
            rows.insert(x, c);
        }
        Ok(rows)
    }

    pub fn store(&self, spec: &CensusSpec, rows: &BTreeMap<u64, u64>) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir)?;
        let mut body = String::from("x,count\n");
        for (x, c) in rows {
            body.push_str(&format!("{x},{c}\n"));
        }
        let header = Header { version: VERSION.into(), spec: spec.clone(), body_sha256: sha256_hex(body.as_bytes()) };
        let path = self.path_for(spec);
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            writeln!(f, "{}", serde_json::to_string(&header).expect("header serializes"))?;
            f.write_all(body.as_bytes())?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Serves a census table from the cache, computing only the missing thresholds.
pub fn cached_table<F>(cache: Option<&Cache>, spec: &CensusSpec, thresholds: &[u64], compute: F) -> Result<CountTable, CliError>
where
    F: FnOnce(&[u64]) -> hasse::Result<CountTable>,
{
    let Some(cache) = cache else { return Ok(compute(thresholds)?) };
    let mut rows = cache.load(spec)?;
    let missing: Vec<u64> = thresholds.iter().copied().filter(|x| !rows.contains_key(x)).collect();
    if !missing.is_empty() {
        let fresh = compute(&missing)?;
        rows.extend(fresh.rows());
        cache.store(spec, &rows)?;
    }
    let mut xs: Vec<u64> = thresholds.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let counts = xs.iter().map(|x| rows[x]).collect();
    Ok(CountTable { spec: spec.clone(), thresholds: xs, counts })
}
