//! The plain-text set format: `#` comments, one element per line as its
//! digit string, coordinate 1 leftmost.

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FieldPointSet, Fp};
use crate::group::{GroupVector, PointSet};

/// Parses a set file. The dimension comes from the first element line; an
/// input without element lines is the empty set in dimension `default_dim`.
pub fn parse_set(text: &str, default_dim: usize) -> Result<PointSet> {
    let mut n: Option<usize> = None;
    let mut elems = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let len = line.chars().count();
        match n {
            None => n = Some(len),
            Some(k) if k != len => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("element has {len} digits, expected {k}"),
                })
            }
            _ => {}
        }
        let digits = line
            .chars()
            .map(|c| match c {
                '0'..='3' => Ok(c as u8 - b'0'),
                _ => Err(Error::Parse { line: line_no, msg: format!("invalid digit {c:?}") }),
            })
            .collect::<Result<Vec<u8>>>()?;
        let g = GroupVector::new(&digits).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })?;
        elems.push(g);
    }
    PointSet::new(n.unwrap_or(default_dim), elems)
}

pub fn read_set(path: impl AsRef<Path>) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)?;
    parse_set(&text, 0)
}

/// Writes elements in lexicographic order, optionally under comment lines.
pub fn format_set(set: &PointSet, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    for e in set.iter() {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

pub fn write_set(path: impl AsRef<Path>, set: &PointSet, comments: &[String]) -> Result<()> {
    std::fs::write(path, format_set(set, comments))?;
    Ok(())
}

/// Parses points of `F_p^n`: one point per line, either as a digit string
/// (`p <= 10`) or as whitespace- or comma-separated integers.
pub fn parse_field_points(text: &str, field: Fp) -> Result<FieldPointSet> {
    let mut n: Option<usize> = None;
    let mut pts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: line_no, msg };
        let coords: Vec<u32> = if line.contains(|c: char| c.is_whitespace() || c == ',') {
            line.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| bad(format!("invalid coordinate {t:?}"))))
                .collect::<Result<_>>()?
        } else {
            line.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| bad(format!("invalid digit {c:?}"))))
                .collect::<Result<_>>()?
        };
        if let Some(&c) = coords.iter().find(|&&c| c >= field.modulus()) {
            return Err(bad(format!("coordinate {c} is not below {}", field.modulus())));
        }
        match n {
            None => n = Some(coords.len()),
            Some(k) if k != coords.len() => {
                return Err(bad(format!("point has {} coordinates, expected {k}", coords.len())))
            }
            _ => {}
        }
        pts.push(coords);
    }
    FieldPointSet::new(field, n.unwrap_or(0), pts)
}
