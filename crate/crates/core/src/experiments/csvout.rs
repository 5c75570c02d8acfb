//! Deterministic CSV emission.
//!
//! Fixed column order, 12 significant digits, `.` decimal separator, LF
//! line endings. Identical records produce byte-identical files.

use std::io::Write;
use std::path::Path;

use super::SweepRecord;
use crate::error::{Error, Result};

fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

/// Write records to `path`. All records must share the same swept-column
/// layout; the header is derived from the first record.
pub fn write_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Config("no records to write".into()));
    }
    let header = records[0].header();
    for r in records {
        if r.header() != header {
            return Err(Error::Config(
                "records disagree on swept columns; cannot build one CSV".into(),
            ));
        }
    }
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for r in records {
        let row: Vec<String> = r.row().iter().map(|v| format_value(*v)).collect();
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(buf.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64, f: f64) -> SweepRecord {
        SweepRecord {
            swept: vec![("t_scale_us".into(), t)],
            fidelity: f,
            leakage: 1.25e-3,
            trace_error: 3.0e-9,
            wall_ms: 12.5,
        }
    }

    #[test]
    fn csv_layout_and_formatting() {
        let dir = std::env::temp_dir().join("cphase-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_csv(&path, &[record(5.0, 0.9909), record(10.0, 0.995)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_scale_us,fidelity,leakage,trace_error,wall_ms"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("5.00000000000e0,9.90900000000e-1,1.25000000000e-3,"));
        // LF endings only
        assert!(!text.contains('\r'));
        assert!(text.ends_with('\n'));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(2.0 / 3.0), "6.66666666667e-1");
        assert_eq!(format_value(0.9909), "9.90900000000e-1");
    }

    #[test]
    fn mismatched_layouts_rejected() {
        let dir = std::env::temp_dir().join("cphase-csv-test2");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        let mut other = record(1.0, 0.5);
        other.swept = vec![("detuning_error_mhz".into(), 0.0)];
        assert!(write_csv(&path, &[record(5.0, 0.99), other]).is_err());
    }
}
