//! Points files: CSV, one point per row, with an optional header row.

use std::path::Path;

use affmed_core::PointSet;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PointsError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no points")]
    Empty,
}

fn malformed(line: usize, message: impl Into<String>) -> PointsError {
    PointsError::Malformed {
        line,
        message: message.into(),
    }
}

/// Parses points; the first row is a header when its first field is not a
/// number. Blank lines are skipped, and the first point fixes the dimension.
pub fn parse_points(text: &str) -> Result<PointSet, PointsError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let raw = if line == 1 { raw.trim_start_matches('\u{feff}') } else { raw };
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if first {
            first = false;
            if fields[0].parse::<f64>().is_err() {
                continue;
            }
        }
        let mut row = Vec::with_capacity(fields.len());
        for (j, f) in fields.iter().enumerate() {
            let v: f64 = f
                .parse()
                .map_err(|_| malformed(line, format!("field {} is not a number: {f:?}", j + 1)))?;
            if !v.is_finite() {
                return Err(malformed(line, format!("field {} is not finite", j + 1)));
            }
            row.push(v);
        }
        if let Some(d) = rows.first().map(Vec::len) {
            if row.len() != d {
                return Err(malformed(line, format!("expected {d} fields, found {}", row.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(PointsError::Empty);
    }
    PointSet::new(rows).map_err(|e| malformed(0, e.to_string()))
}

pub fn read_points(path: &Path) -> Result<PointSet, PointsError> {
    let text = std::fs::read_to_string(path).map_err(|e| PointsError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_points(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_crlf() {
        let x = parse_points("x,y\r\n1,2\r\n\r\n3.5,-4e1\r\n").unwrap();
        assert_eq!(x.to_vecs(), vec![vec![1.0, 2.0], vec![3.5, -40.0]]);
        let x = parse_points("1\n2\n").unwrap();
        assert_eq!(x.d(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(
            parse_points("1,2\n3\n"),
            Err(malformed(2, "expected 2 fields, found 1"))
        );
        assert!(matches!(parse_points("a,b\n1,2\n1,x\n"), Err(PointsError::Malformed { line: 3, .. })));
        assert!(matches!(parse_points("1,nan\n"), Err(PointsError::Malformed { line: 1, .. })));
        assert_eq!(parse_points("a,b\n"), Err(PointsError::Empty));
    }
}
