//! Experiment grids: cell enumeration, a bounded worker pool, per-cell
//! output files and the manifest that indexes them.

use std::collections::BTreeSet;
use std::fs;
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{simulate_run, Aggregate, ExperimentConfig, Matchup, RunDigest};
use crate::error::{Error, Result};
use crate::games::GameId;
use crate::output::{
    config_fingerprint, sha256_hex, CellSummary, LogScope, StepLogWriter, SCHEMA_VERSION,
};
use crate::reference::{ReferenceKind, ReferenceModel};

/// Overrides the number of grid workers.
pub const WORKERS_ENV: &str = "PROSPECT_ARENA_WORKERS";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const STEP_LOG_FILE: &str = "steps.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub games: Vec<GameId>,
    pub matchups: Vec<Matchup>,
    pub references: Vec<ReferenceKind>,
    pub histories: Vec<usize>,
    /// Also schedule the side-swapped version of each heterogeneous matchup
    /// on games whose payoffs are not symmetric.
    pub mirror_asymmetric: bool,
    /// Template for every cell; its game, matchup, reference kind and
    /// history length are replaced per cell.
    pub base: ExperimentConfig,
    pub log_scope: LogScope,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl GridSpec {
    /// Every game, the six matchups, the adaptive reference models and
    /// histories 0 and 2.
    pub fn standard(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            games: GameId::ALL.to_vec(),
            matchups: Matchup::TABLE.to_vec(),
            references: ReferenceKind::ADAPTIVE.to_vec(),
            histories: vec![0, 2],
            mirror_asymmetric: true,
            base: ExperimentConfig::default(),
            log_scope: LogScope::Window,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("games", self.games.is_empty()),
            ("matchups", self.matchups.is_empty()),
            ("reference models", self.references.is_empty()),
            ("history lengths", self.histories.is_empty()),
        ];
        if let Some((axis, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("grid has no {axis}")));
        }
        Ok(())
    }

    /// Cells in a fixed order: game, matchup, reference model, history.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &game in &self.games {
            let symmetric = game.game().is_symmetric();
            let mut matchups: Vec<Matchup> = Vec::new();
            for &m in &self.matchups {
                if !matchups.contains(&m) {
                    matchups.push(m);
                }
                if self.mirror_asymmetric && !symmetric && m.is_heterogeneous() {
                    let mirror = m.mirrored();
                    if !matchups.contains(&mirror) && !self.matchups.contains(&mirror) {
                        matchups.push(mirror);
                    }
                }
            }
            for &matchup in &matchups {
                for &kind in &self.references {
                    for &history_len in &self.histories {
                        let config = ExperimentConfig {
                            game,
                            matchup,
                            reference: ReferenceModel {
                                kind,
                                ..self.base.reference
                            },
                            history_len,
                            ..self.base.clone()
                        };
                        out.push(Cell {
                            id: format!("{}/{}/{}/n{}", game.slug(), matchup, kind.slug(), history_len),
                            config,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Relative directory of the cell's files, `/`-separated.
    pub id: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub id: String,
    pub fingerprint: String,
    pub status: CellStatus,
    pub error: Option<String>,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub cells: Vec<CellEntry>,
}

impl Manifest {
    pub fn all_ok(&self) -> bool {
        self.cells.iter().all(|c| c.status == CellStatus::Ok)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CellEntry> {
        self.cells.iter().filter(|c| c.status == CellStatus::Failed)
    }

    pub fn files(&self) -> impl Iterator<Item = &FileEntry> {
        self.cells.iter().flat_map(|c| &c.files)
    }

    pub fn load(out_dir: &Path) -> Result<Self> {
        let path = out_dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Every regular file below `dir`, relative and `/`-separated.
fn list_files(dir: &Path) -> Result<BTreeSet<String>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeSet<String>) -> Result<()> {
        for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            if path.is_dir() {
                walk(root, &path, out)?;
            } else {
                let rel = path.strip_prefix(root).expect("walk stays below root");
                let parts: Vec<_> = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect();
                out.insert(parts.join("/"));
            }
        }
        Ok(())
    }
    let mut out = BTreeSet::new();
    if dir.exists() {
        walk(dir, dir, &mut out)?;
    }
    Ok(out)
}

/// Removes the files of a previous grid so a rerun leaves nothing stale.
/// Refuses to touch a directory holding files no manifest accounts for.
fn clear_previous(out_dir: &Path) -> Result<()> {
    let present = list_files(out_dir)?;
    if present.is_empty() {
        return Ok(());
    }
    let known: BTreeSet<String> = match Manifest::load(out_dir) {
        Ok(m) => m.files().map(|f| f.path.clone()).collect(),
        Err(_) => BTreeSet::new(),
    };
    let unknown: Vec<&String> = present
        .iter()
        .filter(|p| p.as_str() != MANIFEST_FILE && !known.contains(*p))
        .collect();
    if let Some(first) = unknown.first() {
        return Err(Error::Config(format!(
            "{} holds {} file(s) not listed in a grid manifest, e.g. {first}",
            out_dir.display(),
            unknown.len()
        )));
    }
    for rel in &present {
        let path = out_dir.join(rel);
        fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn file_entry(out_dir: &Path, rel: String) -> Result<FileEntry> {
    let path = out_dir.join(&rel);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    Ok(FileEntry {
        path: rel,
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

/// Runs one cell and writes its step log and summary.
pub fn run_cell(cell: &Cell, log_scope: LogScope, out_dir: &Path) -> Result<Vec<FileEntry>> {
    let config = &cell.config;
    config.validate()?;
    let dir = out_dir.join(&cell.id);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let log_path = dir.join(STEP_LOG_FILE);
    let file = fs::File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    let mut log = StepLogWriter::new(BufWriter::new(file))?;
    let mut digests: Vec<RunDigest> = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let out = simulate_run(config, run)?;
        let kept = match log_scope {
            LogScope::Full => &out.records[..],
            LogScope::Window => &out.records[out.records.len() - out.summary.window..],
        };
        log.write(kept)?;
        digests.push(out.into());
    }
    let mut buf = log.finish()?;
    std::io::Write::flush(&mut buf).map_err(|e| Error::io(&log_path, e))?;

    let aggregate = Aggregate::from_digests(&digests);
    let summary = CellSummary {
        schema_version: SCHEMA_VERSION,
        cell: cell.id.clone(),
        fingerprint: config_fingerprint(config)?,
        config: config.clone(),
        log_scope,
        runs: digests.into_iter().map(|d| d.summary).collect(),
        aggregate,
    };
    let summary_path = dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(&summary)?;
    fs::write(&summary_path, text + "\n").map_err(|e| Error::io(&summary_path, e))?;

    [STEP_LOG_FILE, SUMMARY_FILE]
        .into_iter()
        .map(|name| file_entry(out_dir, format!("{}/{name}", cell.id)))
        .collect()
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "cell panicked".to_string())
}

/// Runs every cell and writes the manifest. A failing cell is recorded and
/// does not stop the others; the returned manifest tells which failed.
pub fn run_grid(spec: &GridSpec) -> Result<Manifest> {
    spec.validate()?;
    clear_previous(&spec.out_dir)?;
    fs::create_dir_all(&spec.out_dir).map_err(|e| Error::io(&spec.out_dir, e))?;

    let cells = spec.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let entries: Vec<CellEntry> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let fingerprint = config_fingerprint(&cell.config).unwrap_or_default();
                let result = catch_unwind(AssertUnwindSafe(|| {
                    run_cell(cell, spec.log_scope, &spec.out_dir)
                }))
                .unwrap_or_else(|p| Err(Error::Config(panic_message(p))));
                match result {
                    Ok(files) => CellEntry {
                        id: cell.id.clone(),
                        fingerprint,
                        status: CellStatus::Ok,
                        error: None,
                        files,
                    },
                    Err(e) => {
                        // keep whatever the cell managed to write listed
                        let files = [STEP_LOG_FILE, SUMMARY_FILE]
                            .into_iter()
                            .map(|name| format!("{}/{name}", cell.id))
                            .filter(|rel| spec.out_dir.join(rel).exists())
                            .filter_map(|rel| file_entry(&spec.out_dir, rel).ok())
                            .collect();
                        CellEntry {
                            id: cell.id.clone(),
                            fingerprint,
                            status: CellStatus::Failed,
                            error: Some(e.to_string()),
                            files,
                        }
                    }
                }
            })
            .collect()
    });

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        grid: spec.clone(),
        cells: entries,
    };
    let path = spec.out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Checks that the manifest and the directory agree file for file and
/// hash for hash.
pub fn verify_outputs(out_dir: &Path) -> Result<()> {
    let manifest = Manifest::load(out_dir)?;
    let mut listed = BTreeSet::new();
    for f in manifest.files() {
        let actual = file_entry(out_dir, f.path.clone())?;
        if actual != *f {
            return Err(Error::Config(format!("{} does not match its manifest entry", f.path)));
        }
        listed.insert(f.path.clone());
    }
    listed.insert(MANIFEST_FILE.to_string());
    let present = list_files(out_dir)?;
    if let Some(extra) = present.difference(&listed).next() {
        return Err(Error::Config(format!("{extra} is not listed in the manifest")));
    }
    Ok(())
}
