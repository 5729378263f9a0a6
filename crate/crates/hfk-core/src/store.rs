//! Generator buckets keyed by (spin^c index, Alexander key) that overflow to disk.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::complex::Generator;

pub type BlockKey = (usize, i64);

static NEXT_DIR: AtomicU64 = AtomicU64::new(0);

/// Temporary directory removed on drop.
#[derive(Debug)]
struct SpillDir(PathBuf);

impl SpillDir {
    fn create(base: &Path) -> io::Result<Self> {
        let id = NEXT_DIR.fetch_add(1, Ordering::Relaxed);
        let path = base.join(format!("hfk-spill-{}-{id}", std::process::id()));
        fs::create_dir_all(&path)?;
        Ok(SpillDir(path))
    }
}

impl Drop for SpillDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

/// Buckets of generators. Each bucket keeps insertion order, so buckets filled
/// from a sorted stream stay sorted.
#[derive(Debug)]
pub struct BucketStore {
    mem: BTreeMap<BlockKey, Vec<Generator>>,
    in_memory: usize,
    budget: usize,
    base: PathBuf,
    dir: Option<SpillDir>,
    spilled: BTreeSet<BlockKey>,
    spilled_count: u64,
}

impl BucketStore {
    /// At most `budget` generators are held in memory; the rest go to files under `base`.
    pub fn new(budget: usize, base: Option<PathBuf>) -> Self {
        BucketStore {
            mem: BTreeMap::new(),
            in_memory: 0,
            budget: budget.max(1),
            base: base.unwrap_or_else(std::env::temp_dir),
            dir: None,
            spilled: BTreeSet::new(),
            spilled_count: 0,
        }
    }

    pub fn push(&mut self, key: BlockKey, x: Generator) -> io::Result<()> {
        self.mem.entry(key).or_default().push(x);
        self.in_memory += 1;
        if self.in_memory >= self.budget {
            self.flush()?;
        }
        Ok(())
    }

    /// Generators written to disk so far.
    pub fn spilled(&self) -> u64 {
        self.spilled_count
    }

    fn path(&self, key: BlockKey) -> PathBuf {
        let dir = self.dir.as_ref().expect("spill directory exists once anything is spilled");
        dir.0.join(format!("{}_{}.bin", key.0, key.1))
    }

    fn flush(&mut self) -> io::Result<()> {
        if self.dir.is_none() {
            self.dir = Some(SpillDir::create(&self.base)?);
        }
        let mem = std::mem::take(&mut self.mem);
        for (key, gens) in mem {
            let file = OpenOptions::new().create(true).append(true).open(self.path(key))?;
            let mut w = BufWriter::new(file);
            for x in &gens {
                w.write_all(&x.0.to_le_bytes())?;
            }
            w.flush()?;
            self.spilled.insert(key);
            self.spilled_count += gens.len() as u64;
        }
        self.in_memory = 0;
        Ok(())
    }

    pub fn keys(&self) -> Vec<BlockKey> {
        let mut keys: BTreeSet<BlockKey> = self.mem.keys().copied().collect();
        keys.extend(self.spilled.iter().copied());
        keys.into_iter().collect()
    }

    /// Removes and returns one bucket.
    pub fn take(&mut self, key: BlockKey) -> io::Result<Vec<Generator>> {
        let mut out = Vec::new();
        if self.spilled.remove(&key) {
            let path = self.path(key);
            let len = fs::metadata(&path)?.len() as usize / 16;
            out.reserve(len);
            let mut r = BufReader::new(File::open(&path)?);
            let mut buf = [0u8; 16];
            for _ in 0..len {
                r.read_exact(&mut buf)?;
                out.push(Generator(u128::from_le_bytes(buf)));
            }
            fs::remove_file(&path)?;
        }
        if let Some(rest) = self.mem.remove(&key) {
            self.in_memory -= rest.len();
            out.extend(rest);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spilled_buckets_keep_order() {
        let base = std::env::temp_dir();
        let mut store = BucketStore::new(3, Some(base));
        for v in 0..10u128 {
            store.push(((v % 2) as usize, 0), Generator(v)).unwrap();
        }
        assert!(store.spilled() > 0);
        assert_eq!(store.keys(), vec![(0, 0), (1, 0)]);
        let evens: Vec<u128> = store.take((0, 0)).unwrap().into_iter().map(|g| g.0).collect();
        assert_eq!(evens, vec![0, 2, 4, 6, 8]);
        let odds: Vec<u128> = store.take((1, 0)).unwrap().into_iter().map(|g| g.0).collect();
        assert_eq!(odds, vec![1, 3, 5, 7, 9]);
        assert!(store.keys().is_empty());
    }
}
