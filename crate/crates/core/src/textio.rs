//! Small helpers shared by every text output: number formatting, atomic file
//! writes, and the flat `key=value` format used for saved models and configs.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Fixed-point rendering with ten significant digits, `.` as separator.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

/// Full-precision rendering for values that must survive a save/load cycle.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:.17e}")
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    let mut f = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// later duplicates win.
pub fn parse_key_values(text: &str, source: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: source.to_path_buf(),
                line: lineno + 1,
                message: format!("expected key=value, got '{line}'"),
            });
        };
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Typed lookup into a parsed key/value map.
pub(crate) struct KeyValues<'a> {
    pub map: &'a BTreeMap<String, String>,
    pub source: &'a Path,
}

impl KeyValues<'_> {
    fn err(&self, message: String) -> Error {
        Error::Parse {
            path: self.source.to_path_buf(),
            line: 0,
            message,
        }
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .map
            .get(key)
            .ok_or_else(|| self.err(format!("missing key '{key}'")))?;
        raw.parse()
            .map_err(|_| self.err(format!("bad value '{raw}' for key '{key}'")))
    }

    /// Collects `prefix.0`, `prefix.1`, ... until the first gap.
    pub fn indexed(&self, prefix: &str) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        while self.map.contains_key(&format!("{prefix}.{}", out.len())) {
            out.push(self.get(&format!("{prefix}.{}", out.len()))?);
        }
        Ok(out)
    }
}
