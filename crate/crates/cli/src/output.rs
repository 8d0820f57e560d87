//! Atomic file output and plot scripts.

use std::io::Write;
use std::path::{Path, PathBuf};

use fixpoint_core::SchemeKind;
use tempfile::NamedTempFile;

use crate::Failure;

/// Files rendered in memory and committed together, so a failed run leaves
/// nothing behind.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    /// Writes each file to a temporary sibling and renames it into place.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Failure::io(dir, e))?;
            tmp.write_all(bytes).map_err(|e| Failure::io(tmp.path(), e))?;
            tmp.as_file().sync_all().map_err(|e| Failure::io(tmp.path(), e))?;
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, path) in staged {
            tmp.persist(&path).map_err(|e| Failure::io(&path, e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// gnuplot script charting one column of a trace CSV against `n`, one curve
/// per scheme, on a logarithmic y axis.
pub fn trace_plot_script(csv_name: &str, schemes: &[SchemeKind], column: usize, ylabel: &str) -> String {
    let names: Vec<&str> = schemes.iter().map(|k| k.name()).collect();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead outside right\n\
         set logscale y\n\
         set format y '%.0e'\n\
         set xlabel 'n'\n\
         set ylabel '{ylabel}'\n\
         set grid\n\
         schemes = \"{}\"\n\
         plot for [s in schemes] '{csv_name}' using 1:(strcol(2) eq s && ${column} > 0 ? ${column} : 1/0) \\\n    \
         with linespoints title s\n",
        names.join(" ")
    )
}
