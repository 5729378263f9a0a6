use std::fs;
use std::path::{Path, PathBuf};

use hfk_harness::batch::{batch_run, cache_key, BatchOptions, Cache, Status};
use hfk_harness::error::read_grid;
use hfk_harness::report::KnotReport;
use hfk_harness::run::RunOptions;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").canonicalize().unwrap()
}

fn write_list(dir: &Path, names: &[&str], extra: &[&str]) -> PathBuf {
    let mut text = String::from("# test list\n");
    for n in names {
        text.push_str(&format!("{}\n", corpus_dir().join(format!("{n}.grid")).display()));
    }
    for e in extra {
        text.push_str(e);
        text.push('\n');
    }
    let list = dir.join("list.txt");
    fs::write(&list, text).unwrap();
    list
}

fn options(out: &Path, resume: bool) -> BatchOptions {
    BatchOptions { m: 2, out: out.to_path_buf(), resume, jobs: 2, relative_maslov: false }
}

fn read_report(path: &Path) -> KnotReport {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn resume_reuses_every_cached_report() {
    let dir = tempfile::tempdir().unwrap();
    let list = write_list(dir.path(), &["trefoil", "4_1", "unknot2"], &[]);
    let out = dir.path().join("out");
    let first = batch_run(&list, &options(&out, false)).unwrap();
    assert_eq!(first.count(Status::Computed), 3);
    let before: Vec<KnotReport> = first.entries.iter().map(|e| read_report(Path::new(e.report.as_ref().unwrap()))).collect();

    let second = batch_run(&list, &options(&out, true)).unwrap();
    assert_eq!(second.count(Status::Cached), 3);
    assert_eq!(second.count(Status::Computed), 0);
    for (e, old) in second.entries.iter().zip(&before) {
        let new = read_report(Path::new(e.report.as_ref().unwrap()));
        assert_eq!(&new, old, "{}", e.name);
    }
    assert!(out.join("summary.json").exists());
}

#[test]
fn failures_are_recorded_and_the_batch_continues() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.grid");
    fs::write(&bad, "n 2\nX 0 0\nO 1 1\n").unwrap();
    let list = write_list(dir.path(), &["trefoil", "unknot2"], &["bad.grid"]);
    let out = dir.path().join("out");
    let summary = batch_run(&list, &options(&out, false)).unwrap();
    assert_eq!(summary.count(Status::Computed), 2);
    assert_eq!(summary.count(Status::Failed), 1);
    let failed = summary.entries.iter().find(|e| e.status == Status::Failed).unwrap();
    assert_eq!(failed.name, "bad");
    assert!(failed.error.is_some() && failed.report.is_none());
    let reports = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().path().to_string_lossy().ends_with(".m2.json")).count();
    assert_eq!(reports, 2);
}

#[test]
fn reports_are_byte_stable_without_timings() {
    let grid = read_grid(&corpus_dir().join("4_1.grid")).unwrap();
    let options = RunOptions::auto(&grid, 2);
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let (a, hit_a) = hfk_harness::batch::compute_cached(&grid, Some("4_1".into()), &options, Some(&cache), false).unwrap();
    let (b, hit_b) = hfk_harness::batch::compute_cached(&grid, Some("4_1".into()), &options, None, false).unwrap();
    assert!(!hit_a && !hit_b);
    assert_eq!(a.without_timings().to_json(), b.without_timings().to_json());
    let (c, hit_c) = hfk_harness::batch::compute_cached(&grid, Some("4_1".into()), &options, Some(&cache), true).unwrap();
    assert!(hit_c);
    assert_eq!(c.to_json(), a.to_json());
}

#[test]
fn cache_key_tracks_the_inputs() {
    let g = read_grid(&corpus_dir().join("trefoil.grid")).unwrap();
    let two = RunOptions::auto(&g, 2);
    let three = RunOptions::auto(&g, 3);
    let mut relative = two.clone();
    relative.relative_maslov = true;
    let keys = [cache_key(&g, &two), cache_key(&g, &three), cache_key(&g, &relative), cache_key(&g.translated(1, 0), &two)];
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            assert_ne!(keys[i], keys[j]);
        }
    }
    assert_eq!(cache_key(&g, &two), cache_key(&g, &RunOptions::auto(&g, 2)));
}
