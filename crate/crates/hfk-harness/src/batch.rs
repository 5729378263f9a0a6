//! Content-addressed report cache and batch runs over a list of grid files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use hfk_core::GridDiagram;
use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{read_grid, HarnessError};
use crate::report::KnotReport;
use crate::run::{run, RunOptions};

/// Cache key: the grid together with everything that changes the report contents.
pub fn cache_key(grid: &GridDiagram, options: &RunOptions) -> String {
    let mut h = Sha256::new();
    h.update(grid.to_text().as_bytes());
    h.update(format!("m={};relative={};split={}", options.m, options.relative_maslov, options.compute.split_spin));
    hex::encode(h.finalize())
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), HarnessError> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
        Ok(Cache { dir })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<KnotReport> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        match serde_json::from_str(&text) {
            Ok(r) => Some(r),
            Err(e) => {
                warn!("ignoring unreadable cache entry {key}: {e}");
                None
            }
        }
    }

    pub fn store(&self, key: &str, report: &KnotReport) -> Result<(), HarnessError> {
        write_atomic(&self.path(key), &report.to_json())
    }
}

/// Computes a report, or reads it from the cache when `reuse` is set and an entry exists.
/// Returns whether the cache was used.
pub fn compute_cached(
    grid: &GridDiagram,
    name: Option<String>,
    options: &RunOptions,
    cache: Option<&Cache>,
    reuse: bool,
) -> Result<(KnotReport, bool), HarnessError> {
    let key = cache_key(grid, options);
    if reuse {
        if let Some(mut hit) = cache.and_then(|c| c.load(&key)) {
            hit.name = name;
            return Ok((hit, true));
        }
    }
    let report = KnotReport::from_run(&run(grid, options)?, name);
    if let Some(c) = cache {
        c.store(&key, &report)?;
    }
    Ok((report, false))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Computed,
    Cached,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub grid: String,
    pub status: Status,
    pub report: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub m: usize,
    pub entries: Vec<Entry>,
}

impl Summary {
    pub fn count(&self, status: Status) -> usize {
        self.entries.iter().filter(|e| e.status == status).count()
    }
}

/// Grid paths from a list file: one per line, `#` comments, relative to the list's directory.
pub fn read_list(list: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let text = fs::read_to_string(list).map_err(|e| HarnessError::io(list, e))?;
    let base = list.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| base.join(l))
        .collect())
}

pub fn knot_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "knot".into(), |s| s.to_string_lossy().into_owned())
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub m: usize,
    pub out: PathBuf,
    pub resume: bool,
    pub jobs: usize,
    pub relative_maslov: bool,
}

fn run_one(path: &Path, options: &BatchOptions, cache: &Cache) -> Entry {
    let name = knot_name(path);
    let mut entry = Entry { name: name.clone(), grid: path.display().to_string(), status: Status::Failed, report: None, error: None };
    let result = read_grid(path).and_then(|grid| {
        let mut run_options = RunOptions::auto(&grid, options.m);
        run_options.relative_maslov = options.relative_maslov;
        let (report, cached) = compute_cached(&grid, Some(name.clone()), &run_options, Some(cache), options.resume)?;
        let file = options.out.join(format!("{name}.m{}.json", options.m));
        write_atomic(&file, &report.to_json())?;
        Ok((file, cached))
    });
    match result {
        Ok((file, cached)) => {
            entry.status = if cached { Status::Cached } else { Status::Computed };
            entry.report = Some(file.display().to_string());
        }
        Err(e) => {
            warn!("{name}: {e}");
            entry.error = Some(e.to_string());
        }
    }
    entry
}

/// Runs every grid of the list; failures are recorded and the batch continues.
pub fn batch_run(list: &Path, options: &BatchOptions) -> Result<Summary, HarnessError> {
    let paths = read_list(list)?;
    fs::create_dir_all(&options.out).map_err(|e| HarnessError::io(&options.out, e))?;
    let cache = Cache::open(options.out.join("cache"))?;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Entry>>> = Mutex::new(vec![None; paths.len()]);
    std::thread::scope(|scope| {
        for _ in 0..options.jobs.clamp(1, paths.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = paths.get(i) else { break };
                info!("{}: start", path.display());
                let entry = run_one(path, options, &cache);
                slots.lock().unwrap()[i] = Some(entry);
            });
        }
    });
    let entries = slots.into_inner().unwrap().into_iter().map(|e| e.expect("every slot is filled")).collect();
    let summary = Summary { m: options.m, entries };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_atomic(&options.out.join("summary.json"), &text)?;
    Ok(summary)
}
