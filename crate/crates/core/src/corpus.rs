//! Batch runs over a directory of case files.
//!
//! A case file is UTF-8 text:
//!
//! ```text
//! p=<prime>
//! poly=<expression>
//! mode=curve|hypersurface      (optional)
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pipeline::{analyze, input_error, AnalysisReport, Mode, PipelineOptions, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseFile {
    pub p: u32,
    pub poly: String,
    pub mode: Option<Mode>,
}

pub fn parse_case(text: &str) -> Result<CaseFile> {
    let mut p = None;
    let mut poly = None;
    let mut mode = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("line {}: expected key=value", i + 1)))?;
        let value = value.trim();
        match key.trim() {
            "p" => p = Some(value.parse::<u32>().map_err(|_| Error::InvalidInput(format!("line {}: bad prime '{value}'", i + 1)))?),
            "poly" => poly = Some(value.to_string()),
            "mode" => mode = Some(value.parse::<Mode>()?),
            other => return Err(Error::InvalidInput(format!("line {}: unknown key '{other}'", i + 1))),
        }
    }
    Ok(CaseFile {
        p: p.ok_or_else(|| Error::InvalidInput("missing p=".into()))?,
        poly: poly.ok_or_else(|| Error::InvalidInput("missing poly=".into()))?,
        mode,
    })
}

/// Per-case seed: the first eight bytes of SHA-256 over the global seed and the case name.
pub fn case_seed(seed: u64, name: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(name.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub name: String,
    pub verdict: Verdict,
    pub exit_code: i32,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub seed: u64,
    pub total: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub max_runtime_ms: u64,
    pub cases: Vec<CaseSummary>,
}

fn verdict_key(v: Verdict) -> String {
    serde_json::to_value(v).ok().and_then(|x| x.as_str().map(str::to_string)).unwrap_or_default()
}

fn case_files(dir: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && !p.starts_with(out))
        .filter(|p| !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.')))
        .collect();
    files.sort();
    Ok(files)
}

fn run_case(path: &Path, seed: u64, options: &PipelineOptions) -> (String, AnalysisReport, u64) {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("case").to_string();
    let start = Instant::now();
    let case_seed = case_seed(seed, &name);
    let mut opts = options.clone();
    opts.seed = case_seed;
    let report = match fs::read_to_string(path).map_err(Error::from).and_then(|t| parse_case(&t)) {
        Ok(case) => {
            opts.mode = case.mode.or(options.mode);
            analyze(&case.poly, case.p, &opts)
        }
        // an unreadable case file is reported like unparsable input
        Err(e) => input_error(&name, 0, case_seed, &e),
    };
    (name, report, start.elapsed().as_millis() as u64)
}

/// Runs every case in `dir` on a pool of `jobs` workers and writes
/// `<out>/<case>.json` plus `<out>/summary.json` (default `out` is `dir/reports`).
pub fn run_corpus(dir: &Path, jobs: usize, seed: u64, out: Option<&Path>, options: &PipelineOptions) -> Result<CorpusSummary> {
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| dir.join("reports"));
    let files = case_files(dir, &out)?;
    fs::create_dir_all(&out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let results: Vec<(String, AnalysisReport, u64)> =
        pool.install(|| files.par_iter().map(|f| run_case(f, seed, options)).collect());

    let mut summary = CorpusSummary { seed, total: results.len(), verdicts: BTreeMap::new(), max_runtime_ms: 0, cases: Vec::new() };
    for (name, report, ms) in &results {
        let stem = Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name);
        fs::write(out.join(format!("{stem}.json")), report.canonical_json()?)?;
        *summary.verdicts.entry(verdict_key(report.verdict)).or_insert(0) += 1;
        summary.max_runtime_ms = summary.max_runtime_ms.max(*ms);
        summary.cases.push(CaseSummary { name: name.clone(), verdict: report.verdict, exit_code: report.exit_code(), runtime_ms: *ms });
    }
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}
