//! Coordinate-list text format for matrices.
//!
//! ```text
//! # 3 4 Rational
//! 0 1 -1
//! 2 3 1/2
//! ```

use std::fmt::Write as _;

use super::field::{Field, FieldTag, Gf2};
use super::matrix::{ExactMatrix, Matrix};
use super::rational::Rat;
use crate::error::{Error, Result};

pub fn write_matrix<F: Field>(m: &Matrix<F>) -> String {
    let mut out = format!("# {} {} {}\n", m.num_rows(), m.num_cols(), F::TAG);
    let mut entries: Vec<_> = m.triplets().collect();
    entries.sort_by_key(|(r, c, _)| (*r, *c));
    for (r, c, v) in entries {
        let _ = writeln!(out, "{r} {c} {v}");
    }
    out
}

pub fn write_exact(m: &ExactMatrix) -> String {
    match m {
        ExactMatrix::Gf2(m) => write_matrix(m),
        ExactMatrix::Rational(m) => write_matrix(m),
    }
}

fn parse_header(line: &str) -> Result<(usize, usize, FieldTag)> {
    let body = line.trim().strip_prefix('#').ok_or_else(|| Error::Parse("missing `# rows cols field` header".into()))?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("bad header `{line}`")));
    }
    let rows = parts[0].parse().map_err(|_| Error::Parse(format!("bad row count `{}`", parts[0])))?;
    let cols = parts[1].parse().map_err(|_| Error::Parse(format!("bad column count `{}`", parts[1])))?;
    let field = FieldTag::parse(parts[2]).ok_or_else(|| Error::Parse(format!("unknown field `{}`", parts[2])))?;
    Ok((rows, cols, field))
}

fn parse_body<F: Field>(rows: usize, cols: usize, lines: &[&str]) -> Result<Matrix<F>> {
    let mut m = Matrix::zeros(rows, cols);
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad entry line `{line}`")));
        }
        let r: usize = parts[0].parse().map_err(|_| Error::Parse(format!("bad row `{}`", parts[0])))?;
        let c: usize = parts[1].parse().map_err(|_| Error::Parse(format!("bad column `{}`", parts[1])))?;
        if r >= rows || c >= cols {
            return Err(Error::Parse(format!("entry ({r},{c}) out of range")));
        }
        let v = F::parse_elem(parts[2]).ok_or_else(|| Error::Parse(format!("bad value `{}`", parts[2])))?;
        m.set(r, c, v);
    }
    Ok(m)
}

pub fn read_exact(text: &str) -> Result<ExactMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let (rows, cols, field) = parse_header(header)?;
    let body: Vec<&str> = lines.filter(|l| !l.starts_with('#')).collect();
    Ok(match field {
        FieldTag::Gf2 => ExactMatrix::Gf2(parse_body::<Gf2>(rows, cols, &body)?),
        FieldTag::Rational => ExactMatrix::Rational(parse_body::<Rat>(rows, cols, &body)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let m = Matrix::<Rat>::from_dense(&[vec![Rat::new(1, 2), Rat::integer(0)], vec![Rat::integer(-3), Rat::integer(1)]]);
        let text = write_matrix(&m);
        assert!(text.starts_with("# 2 2 Rational\n"));
        assert!(text.contains("0 0 1/2"));
        assert_eq!(read_exact(&text).unwrap(), ExactMatrix::Rational(m));
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_exact("2 2 GF2\n").is_err());
        assert!(read_exact("# 1 1 GF2\n3 0 1\n").is_err());
        assert!(read_exact("# 1 1 GF7\n").is_err());
    }
}
