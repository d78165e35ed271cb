//! `report`: JSON-lines logs of [`Item`]s to a CSV table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};
use crate::run::Item;

pub const CSV_HEADER: [&str; 5] = ["id", "condition", "margin", "error", "pass"];

fn is_pattern(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

/// Expands globs (sorted matches) and keeps literal paths, which must exist.
pub fn resolve(patterns: &[String]) -> CliResult<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for p in patterns {
        if is_pattern(p) {
            let matches = glob::glob(p).map_err(|e| CliError::usage(format!("bad pattern {p:?}: {e}")))?;
            let mut found = matches
                .map(|m| {
                    m.map_err(|e| {
                        let path = e.path().to_path_buf();
                        CliError::io(path, e.into())
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            found.sort();
            paths.extend(found);
        } else {
            paths.push(PathBuf::from(p));
        }
    }
    Ok(paths)
}

/// Reads every non-blank line of `path` as an [`Item`].
pub fn read_log(path: &Path) -> CliResult<Vec<Item>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Config {
                path: path.to_path_buf(),
                msg: format!("line {}: {e}", n + 1),
            })
        })
        .collect()
}

/// Items sorted by `(suite, id)`; the sort is stable, so equal keys keep file order.
pub fn collect(patterns: &[String]) -> CliResult<Vec<Item>> {
    let mut items = Vec::new();
    for path in resolve(patterns)? {
        items.extend(read_log(&path)?);
    }
    items.sort_by(|a, b| (&a.suite, &a.id).cmp(&(&b.suite, &b.id)));
    Ok(items)
}

/// Writes the `id, condition, margin, error, pass` table.
pub fn write_csv<W: Write>(items: &[Item], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::io("<csv>", std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(io)?;
    for i in items {
        w.write_record([
            i.id.clone(),
            i.condition.clone(),
            i.margin.to_string(),
            i.error.map(|e| e.to_string()).unwrap_or_default(),
            i.passed.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))
}
