//! Datasets: the embedded phosphorus sample, text-file input and output, and
//! descriptive statistics.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{EwpsError, Result};

/// Phosphorus concentration in the leaves of 128 plants, in recorded order.
pub const PHOSPHORUS: [f64; 128] = [
    0.22, 0.17, 0.11, 0.10, 0.15, 0.06, 0.05, 0.07, 0.12, 0.09, 0.23, 0.25, 0.23, //
    0.24, 0.20, 0.08, 0.11, 0.12, 0.10, 0.06, 0.20, 0.17, 0.20, 0.11, 0.16, 0.09, //
    0.10, 0.12, 0.12, 0.10, 0.09, 0.17, 0.19, 0.21, 0.18, 0.26, 0.19, 0.17, 0.18, //
    0.20, 0.24, 0.19, 0.21, 0.22, 0.17, 0.08, 0.08, 0.06, 0.09, 0.22, 0.23, 0.22, //
    0.19, 0.27, 0.16, 0.28, 0.11, 0.10, 0.20, 0.12, 0.15, 0.08, 0.12, 0.09, 0.14, //
    0.07, 0.09, 0.05, 0.06, 0.11, 0.16, 0.20, 0.25, 0.16, 0.13, 0.11, 0.11, 0.11, //
    0.08, 0.22, 0.11, 0.13, 0.12, 0.15, 0.12, 0.11, 0.11, 0.15, 0.10, 0.15, 0.17, //
    0.14, 0.12, 0.18, 0.14, 0.18, 0.13, 0.12, 0.14, 0.09, 0.10, 0.13, 0.09, 0.11, //
    0.11, 0.14, 0.07, 0.07, 0.19, 0.17, 0.18, 0.16, 0.19, 0.15, 0.07, 0.09, 0.17, //
    0.10, 0.08, 0.15, 0.21, 0.16, 0.08, 0.10, 0.06, 0.08, 0.12, 0.13,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    EmbeddedPhosphorus,
    File,
    Simulated,
}

/// A nonempty, ordered collection of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    label: String,
    source: DatasetSource,
}

/// Descriptive statistics; quartiles use linear interpolation between order
/// statistics at position `(n − 1)p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    /// Sample variance with divisor `n − 1`; absent for a single observation.
    pub variance: Option<f64>,
}

impl Dataset {
    pub fn new(values: Vec<f64>, label: impl Into<String>, source: DatasetSource) -> Result<Self> {
        if values.is_empty() {
            return Err(EwpsError::InsufficientData("dataset is empty".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(EwpsError::Parse(format!("observation {} is not finite: {v}", i + 1)));
        }
        Ok(Dataset {
            values,
            label: label.into(),
            source,
        })
    }

    pub fn phosphorus() -> Self {
        Dataset {
            values: PHOSPHORUS.to_vec(),
            label: "phosphorus concentration in leaves".into(),
            source: DatasetSource::EmbeddedPhosphorus,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> DatasetSource {
        self.source
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn describe(&self) -> Summary {
        let sorted = self.sorted();
        let n = sorted.len();
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let variance = (n > 1).then(|| {
            sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        });
        Summary {
            n,
            min: sorted[0],
            q1: interpolated_quantile(&sorted, 0.25),
            median: interpolated_quantile(&sorted, 0.5),
            mean,
            q3: interpolated_quantile(&sorted, 0.75),
            max: sorted[n - 1],
            variance,
        }
    }

    /// Parses one value per line; blank lines and `#` comments are skipped and
    /// the first non-comment line may be a column header.
    pub fn parse(text: &str, label: impl Into<String>, source: DatasetSource) -> Result<Self> {
        let mut values = Vec::new();
        let mut seen_content = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let field = line.trim_end_matches(',').trim();
            if field.contains(',') {
                return Err(EwpsError::Parse(format!(
                    "line {}: expected a single column, found '{line}'",
                    lineno + 1
                )));
            }
            match field.parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) if !seen_content => {}
                Err(_) => {
                    return Err(EwpsError::Parse(format!(
                        "line {}: '{field}' is not a number",
                        lineno + 1
                    )))
                }
            }
            seen_content = true;
        }
        Dataset::new(values, label, source)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| EwpsError::Io(format!("{}: {e}", path.display())))?;
        let label = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Dataset::parse(&text, label, DatasetSource::File)
    }

    /// One value per line with 17 significant digits, so that reading the
    /// text back reproduces every value exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        for v in &self.values {
            out.push_str(&format!("{v:.16e}\n"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }
}

/// Linear interpolation between closest ranks at position `(n − 1)p`.
pub fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Writes `bytes` to a temporary sibling of `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| EwpsError::Io(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(EwpsError::Io(format!("{}: {e}", path.display())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round4(x: f64) -> f64 {
        (x * 1e4).round() / 1e4
    }

    #[test]
    fn phosphorus_summary() {
        let d = Dataset::phosphorus();
        assert_eq!(d.len(), 128);
        let s = d.describe();
        assert_eq!(round4(s.min), 0.05);
        assert_eq!(round4(s.q1), 0.10);
        assert_eq!(round4(s.median), 0.13);
        assert_eq!(round4(s.mean), 0.1408);
        assert_eq!(round4(s.q3), 0.18);
        assert_eq!(round4(s.max), 0.28);
        assert_eq!(round4(s.variance.unwrap()), 0.0030);
    }

    #[test]
    fn single_point() {
        let d = Dataset::new(vec![2.5], "one", DatasetSource::File).unwrap();
        let s = d.describe();
        assert_eq!((s.min, s.q1, s.median, s.mean, s.q3, s.max), (2.5, 2.5, 2.5, 2.5, 2.5, 2.5));
        assert!(s.variance.is_none());
    }

    #[test]
    fn parsing() {
        let d = Dataset::parse("value\n# comment\n1.5\n\n2.5 # trailing\n", "t", DatasetSource::File).unwrap();
        assert_eq!(d.values(), &[1.5, 2.5]);
        assert!(Dataset::parse("1\nabc\n", "t", DatasetSource::File).is_err());
        assert!(Dataset::parse("1,2\n", "t", DatasetSource::File).is_err());
        assert!(Dataset::parse("# nothing\n", "t", DatasetSource::File).is_err());
        assert!(Dataset::parse("1\nNaN\n", "t", DatasetSource::File).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let values = vec![0.1, 1.0 / 3.0, 2.718281828459045e-12, 123456.789];
        let d = Dataset::new(values.clone(), "t", DatasetSource::File).unwrap();
        let back = Dataset::parse(&d.to_text(), "t", DatasetSource::File).unwrap();
        assert_eq!(back.values(), values.as_slice());
    }
}
