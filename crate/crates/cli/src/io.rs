//! File reading with line-numbered errors and atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use knowref_core::model::{parse_instance, serialize_instance};
use knowref_core::{Prediction, ProblemInstance};

/// Writes via a temporary file in the target directory, then renames, so a
/// reader never sees a partial file at `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Non-blank lines with their 1-based line numbers.
pub fn lines(data: &str) -> impl Iterator<Item = (usize, &str)> {
    data.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub fn read_instances(path: &Path) -> Result<Vec<ProblemInstance>> {
    let data = read_text(path)?;
    lines(&data)
        .map(|(n, l)| parse_instance(l).with_context(|| format!("{}:{n}", path.display())))
        .collect()
}

pub fn instances_to_string(instances: &[ProblemInstance]) -> Result<String> {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&serialize_instance(inst)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_instances(path: &Path, instances: &[ProblemInstance]) -> Result<()> {
    atomic_write(path, instances_to_string(instances)?.as_bytes())
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    let data = read_text(path)?;
    lines(&data)
        .map(|(n, l)| match Prediction::parse_line(l) {
            Ok(p) => Ok(p),
            Err(e) => bail!("{}:{n}: {e}", path.display()),
        })
        .collect()
}

pub fn write_lines<I, S>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    for l in lines {
        out.push_str(l.as_ref());
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Path as recorded in manifests.
pub fn display(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}
