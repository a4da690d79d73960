//! CSV output with fixed column orders, written atomically.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// A row type with a fixed column schema.
pub trait Record {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write through a temporary file in the target directory and rename it into
/// place. Missing parent directories are created.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| io_error(path, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// Render records as CSV text: header row, `.` decimals, LF line endings.
pub fn csv_bytes<R: Record>(records: &[R]) -> Result<Vec<u8>> {
    csv_bytes_with(R::header(), records.iter().map(Record::fields))
}

pub fn csv_bytes_with<I>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let wrap = |source| Error::Csv {
        path: "<memory>".into(),
        source,
    };
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.into_inner().map_err(|e| Error::Io {
        path: "<memory>".into(),
        source: e.into_error(),
    })
}

pub fn emit_csv<R: Record>(path: &Path, records: &[R]) -> Result<()> {
    write_atomic(path, &csv_bytes(records)?)
}

/// Header and rows of a CSV file, all as strings.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let header = r.headers().map_err(wrap)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(wrap)?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Point {
        x: f64,
        y: f64,
    }

    impl Record for Point {
        fn header() -> &'static [&'static str] {
            &["x", "y"]
        }
        fn fields(&self) -> Vec<String> {
            vec![fmt_f64(self.x), fmt_f64(self.y)]
        }
    }

    #[test]
    fn empty_list_is_header_only() {
        let bytes = csv_bytes::<Point>(&[]).unwrap();
        assert_eq!(bytes, b"x,y\n");
    }

    #[test]
    fn round_trip_recovers_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let pts = [Point { x: 0.1 + 0.2, y: -1.0e-17 }, Point { x: 1234.5678, y: std::f64::consts::PI }];
        emit_csv(&path, &pts).unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, ["x", "y"]);
        for (p, row) in pts.iter().zip(&rows) {
            assert!((row[0].parse::<f64>().unwrap() - p.x).abs() <= 1e-12);
            assert!((row[1].parse::<f64>().unwrap() - p.y).abs() <= 1e-12);
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
    }

    #[test]
    fn missing_directories_are_created() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/p.csv");
        emit_csv::<Point>(&path, &[]).unwrap();
        assert!(path.exists());
    }

    #[test]
    fn io_errors_name_the_path() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let path = file.path().join("out.csv");
        let err = emit_csv::<Point>(&path, &[]).unwrap_err();
        assert!(err.to_string().contains(&*path.to_string_lossy()));
        assert!(!err.is_domain());
    }
}
