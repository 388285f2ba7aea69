//! Writing runs to disk: data files, summary, manifest, optional gnuplot
//! script. A run directory is assembled under a temporary name and renamed
//! into place, so a failed run leaves nothing behind.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use afc_core::io::fmt_f64;

use crate::config::{Config, ConfigError};
use crate::experiments::{run_experiment, Artifact, CliError, Outcome, RunOutput};

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "AFC_OUTPUT_ROOT";

pub const MANIFEST: &str = "manifest.toml";

fn io_err(what: &str, path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{what} {}: {e}", path.display()))
}

/// Output directory of `cfg`, resolved against [`OUTPUT_ROOT_ENV`].
pub fn output_dir(cfg: &Config) -> PathBuf {
    let dir = PathBuf::from(cfg.str("output.dir"));
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir,
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn manifest(cfg: &Config, artifacts: &[(String, String)], extra: &str) -> String {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut out = String::from("[manifest]\n");
    let _ = writeln!(out, "tool = \"afc\"");
    let _ = writeln!(out, "version = {}", toml_str(env!("CARGO_PKG_VERSION")));
    let _ = writeln!(out, "experiment = {}", toml_str(cfg.experiment.name()));
    let _ = writeln!(out, "created_unix_s = {created}");
    out.push_str(extra);
    out.push_str("\n[artifacts]\n");
    for (name, hash) in artifacts {
        let _ = writeln!(out, "{} = {}", toml_str(name), toml_str(hash));
    }
    out.push_str("\n[config]\n");
    out.push_str(&cfg.echo());
    out
}

/// Create the sibling staging directory for `target`.
fn staging(target: &Path) -> Result<PathBuf, CliError> {
    let parent = target.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| io_err("cannot create", parent, e))?;
    let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "afc-out".into());
    let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(|e| io_err("cannot clear", &tmp, e))?;
    }
    fs::create_dir(&tmp).map_err(|e| io_err("cannot create", &tmp, e))?;
    Ok(tmp)
}

/// Move `tmp` to `target`. An existing target is replaced only if it holds a
/// previous run (has a manifest) or is empty.
fn commit(tmp: &Path, target: &Path) -> Result<(), CliError> {
    if target.exists() {
        let previous_run = target.join(MANIFEST).is_file();
        let empty = fs::read_dir(target).map(|mut d| d.next().is_none()).unwrap_or(false);
        if !previous_run && !empty {
            let _ = fs::remove_dir_all(tmp);
            return Err(CliError::Config(ConfigError {
                key: "output.dir".into(),
                reason: format!("{} exists and does not hold a previous run", target.display()),
            }));
        }
        fs::remove_dir_all(target).map_err(|e| io_err("cannot replace", target, e))?;
    }
    fs::rename(tmp, target).map_err(|e| io_err("cannot move output to", target, e))
}

fn write_files(dir: &Path, files: &[Artifact]) -> Result<Vec<(String, String)>, CliError> {
    files
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| io_err("cannot create", parent, e))?;
            }
            fs::write(&path, &a.contents).map_err(|e| io_err("cannot write", &path, e))?;
            Ok((a.name.clone(), sha256_hex(a.contents.as_bytes())))
        })
        .collect()
}

fn with_plot(cfg: &Config, out: &RunOutput) -> Vec<Artifact> {
    let mut files = out.artifacts.clone();
    if cfg.bool("output.gnuplot") {
        files.push(Artifact { name: "plot.gp".into(), contents: out.plot.clone() });
    }
    files
}

/// Result of `run` or `sweep`: where the files went and what happened.
#[derive(Debug)]
pub struct Written {
    pub dir: PathBuf,
    pub summary: String,
    pub outcome: Outcome,
}

fn guarded<T>(tmp: &Path, f: impl FnOnce() -> Result<T, CliError>) -> Result<T, CliError> {
    let r = f();
    if r.is_err() {
        let _ = fs::remove_dir_all(tmp);
    }
    r
}

/// Run the experiment and write its directory.
pub fn run(cfg: &Config) -> Result<Written, CliError> {
    let out = run_experiment(cfg)?;
    let target = output_dir(cfg);
    let tmp = staging(&target)?;
    guarded(&tmp, || {
        let hashes = write_files(&tmp, &with_plot(cfg, &out))?;
        let path = tmp.join(MANIFEST);
        fs::write(&path, manifest(cfg, &hashes, "")).map_err(|e| io_err("cannot write", &path, e))
    })?;
    commit(&tmp, &target)?;
    let summary = out.artifacts.iter().find(|a| a.name == "summary.txt").map(|a| a.contents.clone()).unwrap_or_default();
    Ok(Written { dir: target, summary, outcome: out.outcome })
}

/// Run the experiment once per value of `param`. Points run in parallel;
/// each gets its own subdirectory and the aggregate table keeps input order.
pub fn sweep(cfg: &Config, param: &str, values: &[f64]) -> Result<Written, CliError> {
    if values.is_empty() {
        return Err(CliError::Config(ConfigError { key: param.into(), reason: "no sweep values given".into() }));
    }
    let configs: Vec<Config> = values.iter().map(|&v| cfg.with_value(param, v)).collect::<Result<_, _>>()?;
    let outputs: Vec<RunOutput> = configs.par_iter().map(run_experiment).collect::<Result<_, _>>()?;

    let names: Vec<String> = outputs[0].metrics.iter().map(|(k, _)| k.clone()).collect();
    let mut table = String::new();
    let _ = writeln!(table, "# afc {} sweep of {param} ({})", env!("CARGO_PKG_VERSION"), cfg.experiment.name());
    for line in cfg.header_lines() {
        let _ = writeln!(table, "# {line}");
    }
    let _ = writeln!(table, "{param},{}", names.join(","));
    let mut files = Vec::new();
    let mut notes = Vec::new();
    for (i, ((v, c), out)) in values.iter().zip(&configs).zip(&outputs).enumerate() {
        let mut row = vec![fmt_f64(*v)];
        for name in &names {
            let value = out.metrics.iter().find(|(k, _)| k == name).map_or(f64::NAN, |m| m.1);
            row.push(fmt_f64(value));
        }
        let _ = writeln!(table, "{}", row.join(","));
        if let Outcome::NoSignal(why) = &out.outcome {
            notes.push(format!("{param}={}: {why}", fmt_f64(*v)));
        }
        for a in with_plot(c, out) {
            files.push(Artifact { name: format!("point_{i:03}/{}", a.name), contents: a.contents });
        }
    }
    let mut summary = format!("experiment: {}\nsweep: {param} over {} values\n", cfg.experiment.name(), values.len());
    for n in &notes {
        let _ = writeln!(summary, "note: {n}");
    }
    files.push(Artifact { name: "sweep.dat".into(), contents: table });
    files.push(Artifact { name: "summary.txt".into(), contents: summary.clone() });
    if cfg.bool("output.gnuplot") {
        let column = if names.is_empty() { 1 } else { 2 };
        files.push(Artifact {
            name: "plot.gp".into(),
            contents: format!(
                "set datafile separator ','\nset key off\nset xlabel '{param}'\nset ylabel '{}'\nplot 'sweep.dat' every ::1 using 1:{column} with linespoints\n",
                names.first().map(String::as_str).unwrap_or("")
            ),
        });
    }

    let target = output_dir(cfg);
    let tmp = staging(&target)?;
    guarded(&tmp, || {
        let hashes = write_files(&tmp, &files)?;
        let list = values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(", ");
        let extra = format!("sweep_param = {}\nsweep_values = [{list}]\n", toml_str(param));
        let path = tmp.join(MANIFEST);
        fs::write(&path, manifest(cfg, &hashes, &extra)).map_err(|e| io_err("cannot write", &path, e))
    })?;
    commit(&tmp, &target)?;
    let outcome = if notes.is_empty() { Outcome::Complete } else { Outcome::NoSignal(notes.join("; ")) };
    Ok(Written { dir: target, summary, outcome })
}
