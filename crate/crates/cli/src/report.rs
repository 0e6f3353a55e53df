//! Output bundle: `report.txt` as `key: value` lines plus CSV tables.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<String>,
    tables: Vec<(String, String)>,
}

impl Report {
    pub fn kv(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    /// Appends preformatted `key: value` lines.
    pub fn block(&mut self, text: &str) {
        self.lines.extend(text.lines().map(str::to_owned));
    }

    pub fn section(&mut self, name: &str) {
        self.lines.push(String::new());
        self.lines.push(format!("[{name}]"));
    }

    pub fn table(&mut self, file: &str, csv: String) {
        self.kv("table", file);
        self.tables.push((file.to_owned(), csv));
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        let mut text = self.lines.join("\n");
        text.push('\n');
        let path = dir.join("report.txt");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
        for (name, csv) in &self.tables {
            let path = dir.join(name);
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}
