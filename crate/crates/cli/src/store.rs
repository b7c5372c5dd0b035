//! On-disk layout of run logs and atomic file writes.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use moead_core::kv::KvDocument;
use moead_core::{AlgoConfig, RunLog};

use crate::error::{usage, CliError, CliResult};

pub fn logs_dir(out: &Path) -> PathBuf {
    out.join("logs")
}

pub fn log_path(out: &Path, problem: &str, config: &str, rep: usize) -> PathBuf {
    logs_dir(out)
        .join(problem)
        .join(config)
        .join(format!("rep{rep:03}.log"))
}

pub fn meta_path(log: &Path) -> PathBuf {
    log.with_extension("meta")
}

/// Writes through a temporary sibling and renames it into place, so `path`
/// either holds the complete content or does not exist.
pub fn write_atomic<F>(path: &Path, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        fill(&mut w)?;
        w.flush()?;
        w.into_inner()
            .map_err(|e| CliError::Runtime(e.to_string()))?
            .sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    write_atomic(path, |w| Ok(w.write_all(text.as_bytes())?))
}

/// One finished run read back from disk.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub problem: String,
    pub config_name: String,
    pub rep: usize,
    pub config: AlgoConfig,
    pub log: RunLog<f64>,
}

fn read_meta(path: &Path) -> CliResult<(String, AlgoConfig)> {
    let text = fs::read_to_string(path)?;
    let doc = KvDocument::parse(&text, "moead-run-meta")?;
    let problem = doc
        .root()
        .get("problem")
        .ok_or_else(|| CliError::Usage(format!("{}: no problem", path.display())))?
        .value
        .clone();
    let section = doc
        .sections_named("config")
        .next()
        .ok_or_else(|| CliError::Usage(format!("{}: no [config] section", path.display())))?;
    let mut body = moead_core::kv::header("moead-config", 1);
    for e in &section.entries {
        body.push_str(&format!("{} = {}\n", e.key, e.value));
    }
    Ok((problem, AlgoConfig::parse(&body)?))
}

fn sorted_entries(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    v.sort();
    Ok(v)
}

/// Problems with logs under `out`, sorted.
pub fn stored_problems(out: &Path) -> CliResult<Vec<String>> {
    let dir = logs_dir(out);
    if !dir.is_dir() {
        return usage(format!("no run logs under {}", dir.display()));
    }
    Ok(sorted_entries(&dir)?
        .into_iter()
        .filter(|p| p.is_dir())
        .filter_map(|p| p.file_name().and_then(|n| n.to_str()).map(String::from))
        .collect())
}

/// Config names with logs for `problem`, sorted.
pub fn stored_configs(out: &Path, problem: &str) -> CliResult<Vec<String>> {
    let dir = logs_dir(out).join(problem);
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    Ok(sorted_entries(&dir)?
        .into_iter()
        .filter(|p| p.is_dir())
        .filter_map(|p| p.file_name().and_then(|n| n.to_str()).map(String::from))
        .collect())
}

/// All repetitions of one `(problem, config)`, in repetition order.
pub fn load_runs(out: &Path, problem: &str, config: &str) -> CliResult<Vec<StoredRun>> {
    let dir = logs_dir(out).join(problem).join(config);
    if !dir.is_dir() {
        return usage(format!("no logs for config `{config}` on problem `{problem}`"));
    }
    let mut runs = Vec::new();
    for path in sorted_entries(&dir)? {
        if path.extension().and_then(|e| e.to_str()) != Some("log") {
            continue;
        }
        let rep = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.strip_prefix("rep"))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Usage(format!("unexpected log file {}", path.display())))?;
        let (meta_problem, cfg) = read_meta(&meta_path(&path))?;
        if meta_problem != problem {
            return usage(format!("{} was produced on `{meta_problem}`", path.display()));
        }
        let log = RunLog::read_from(BufReader::new(fs::File::open(&path)?))?;
        runs.push(StoredRun {
            problem: problem.to_string(),
            config_name: config.to_string(),
            rep,
            config: cfg,
            log,
        });
    }
    if runs.is_empty() {
        return usage(format!("no logs for config `{config}` on problem `{problem}`"));
    }
    Ok(runs)
}
