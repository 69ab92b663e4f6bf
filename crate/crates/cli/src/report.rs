//! Result rows, CSV emission and run directories.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub const CSV_HEADER: &str = "suite,check_id,param_json,lhs,rhs,lhs_stderr,rhs_stderr,z_or_gap,threshold,pass";

/// One check: two routes to the same quantity and the verdict.
///
/// For Monte Carlo rows `z_or_gap` is the z-score and the row passes when
/// `|z| ≤ threshold`; for deterministic rows it is a gap (absolute or
/// relative, as the check id says) and passes when `gap ≤ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub suite: String,
    pub check_id: String,
    pub param_json: String,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
    pub z_or_gap: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Row {
    /// Deterministic comparison with `gap = |lhs − rhs|`.
    pub fn gap(suite: &str, id: &str, params: Value, lhs: f64, rhs: f64, threshold: f64) -> Self {
        Self::with_gap(suite, id, params, lhs, rhs, (lhs - rhs).abs(), threshold)
    }

    /// Deterministic comparison with a caller-supplied gap.
    pub fn with_gap(suite: &str, id: &str, params: Value, lhs: f64, rhs: f64, gap: f64, threshold: f64) -> Self {
        Self {
            suite: suite.into(),
            check_id: id.into(),
            param_json: params.to_string(),
            lhs,
            rhs,
            lhs_stderr: 0.0,
            rhs_stderr: 0.0,
            z_or_gap: gap,
            threshold,
            pass: gap <= threshold,
        }
    }

    /// Monte Carlo comparison.
    #[allow(clippy::too_many_arguments)]
    pub fn z(suite: &str, id: &str, params: Value, lhs: f64, lhs_se: f64, rhs: f64, rhs_se: f64, threshold: f64) -> Self {
        let z = pivotality::numerics::z_score(lhs, lhs_se, rhs, rhs_se);
        Self {
            suite: suite.into(),
            check_id: id.into(),
            param_json: params.to_string(),
            lhs,
            rhs,
            lhs_stderr: lhs_se,
            rhs_stderr: rhs_se,
            z_or_gap: z,
            threshold,
            pass: z.abs() <= threshold,
        }
    }

    /// A check that could not be evaluated.
    pub fn error(suite: &str, id: &str, params: Value, threshold: f64, err: &pivotality::Error) -> Self {
        let mut params = params;
        if let Value::Object(map) = &mut params {
            map.insert("error".into(), Value::String(err.to_string()));
        }
        Self {
            suite: suite.into(),
            check_id: id.into(),
            param_json: params.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            lhs_stderr: f64::NAN,
            rhs_stderr: f64::NAN,
            z_or_gap: f64::NAN,
            threshold,
            pass: false,
        }
    }
}

/// Serialises rows with the fixed header.
pub fn write_csv(path: &Path, rows: &[Row]) -> std::io::Result<()> {
    // Written by hand so that an empty report still carries the header.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

/// Creates `out/run-NNN` with the next unused number.
pub fn next_run_dir(out: &Path) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out)?;
    let mut last = 0u32;
    for entry in fs::read_dir(out)? {
        let name = entry?.file_name();
        if let Some(n) = name.to_str().and_then(|s| s.strip_prefix("run-")).and_then(|s| s.parse::<u32>().ok()) {
            last = last.max(n);
        }
    }
    let dir = out.join(format!("run-{:03}", last + 1));
    fs::create_dir(&dir)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn header_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        write_csv(&p, &[Row::gap("s", "c", json!({"a": 1, "b": [1, 2]}), 1.0, 1.0, 1e-10)]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.next().unwrap(), r#"s,c,"{""a"":1,""b"":[1,2]}",1.0,1.0,0.0,0.0,0.0,1e-10,true"#);
    }

    #[test]
    fn run_dirs_count_up() {
        let dir = tempfile::tempdir().unwrap();
        assert!(next_run_dir(dir.path()).unwrap().ends_with("run-001"));
        assert!(next_run_dir(dir.path()).unwrap().ends_with("run-002"));
        fs::create_dir(dir.path().join("run-017")).unwrap();
        assert!(next_run_dir(dir.path()).unwrap().ends_with("run-018"));
    }

    #[test]
    fn verdicts() {
        assert!(!Row::z("s", "c", json!({}), 1.0, 0.1, 0.0, 0.1, 4.0).pass);
        assert!(Row::z("s", "c", json!({}), 1.0, 0.1, 0.9, 0.1, 4.0).pass);
        let e = pivotality::Error::Unsupported("x".into());
        let r = Row::error("s", "c", json!({}), 4.0, &e);
        assert!(!r.pass && r.param_json.contains("unsupported"));
    }
}
