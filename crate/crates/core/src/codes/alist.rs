//! alist sparse matrix format.
//!
//! ```text
//! cols rows
//! max_col_degree max_row_degree
//! col degrees...
//! row degrees...
//! one line per column: 1-indexed row positions (zero padding allowed)
//! one line per row: 1-indexed column positions (zero padding allowed)
//! ```

use super::{CodeError, CssCode};
use crate::bits::BitMatrix;
use std::fmt::Write as _;
use std::path::Path;

pub fn parse(text: &str, origin: &str) -> Result<BitMatrix, CodeError> {
    let err = |msg: String| CodeError::Parse {
        path: origin.to_string(),
        msg,
    };
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut ints = |what: &str| -> Result<Vec<usize>, CodeError> {
        let line = lines
            .next()
            .ok_or_else(|| err(format!("missing {what}")))?;
        line.split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| err(format!("bad integer {t:?} in {what}")))
            })
            .collect()
    };
    let dims = ints("dimensions")?;
    let [cols, rows] = dims[..] else {
        return Err(err("dimension line must hold two integers".into()));
    };
    let _max = ints("max degrees")?;
    let col_deg = ints("column degrees")?;
    let row_deg = ints("row degrees")?;
    if col_deg.len() != cols || row_deg.len() != rows {
        return Err(err("degree list lengths do not match dimensions".into()));
    }
    let mut m = BitMatrix::zeros(rows, cols);
    for (c, &deg) in col_deg.iter().enumerate() {
        let entries: Vec<usize> = ints("column list")?.into_iter().filter(|&x| x != 0).collect();
        if entries.len() != deg {
            return Err(err(format!("column {} lists {} entries, degree {deg}", c + 1, entries.len())));
        }
        for r in entries {
            if r > rows {
                return Err(err(format!("row index {r} out of range")));
            }
            m.set(r - 1, c, true);
        }
    }
    for (r, &deg) in row_deg.iter().enumerate() {
        let entries: Vec<usize> = ints("row list")?.into_iter().filter(|&x| x != 0).collect();
        if entries.len() != deg {
            return Err(err(format!("row {} lists {} entries, degree {deg}", r + 1, entries.len())));
        }
        for c in entries {
            if c == 0 || c > cols || !m.get(r, c - 1) {
                return Err(err(format!("row {} disagrees with column lists", r + 1)));
            }
        }
    }
    Ok(m)
}

pub fn read(path: &Path) -> Result<BitMatrix, CodeError> {
    let text = std::fs::read_to_string(path).map_err(|source| CodeError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, &path.display().to_string())
}

/// Renders a matrix in alist form with zero padding to the maximum degree.
pub fn render(m: &BitMatrix) -> String {
    let t = m.transpose();
    let col_deg: Vec<usize> = t.rows().iter().map(|r| r.count_ones()).collect();
    let row_deg: Vec<usize> = m.rows().iter().map(|r| r.count_ones()).collect();
    let max_c = col_deg.iter().copied().max().unwrap_or(0);
    let max_r = row_deg.iter().copied().max().unwrap_or(0);
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", m.num_cols(), m.num_rows());
    let _ = writeln!(s, "{max_c} {max_r}");
    let _ = writeln!(s, "{}", join(&col_deg));
    let _ = writeln!(s, "{}", join(&row_deg));
    for (src, max) in [(&t, max_c), (m, max_r)] {
        for r in src.rows() {
            let mut e: Vec<usize> = r.ones().map(|i| i + 1).collect();
            e.resize(max, 0);
            let _ = writeln!(s, "{}", join(&e));
        }
    }
    s
}

pub fn load_alist_pair(path_hx: &Path, path_hz: &Path, name: &str) -> Result<CssCode, CodeError> {
    CssCode::new(name, read(path_hx)?, read(path_hz)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HAMMING: &str = "7 3\n3 4\n1 1 2 1 2 2 3\n4 4 4\n1 0 0\n2 0 0\n1 2 0\n3 0 0\n1 3 0\n2 3 0\n1 2 3\n1 3 5 7\n2 3 6 7\n4 5 6 7\n";

    #[test]
    fn parses_hamming() {
        let m = parse(HAMMING, "inline").unwrap();
        assert_eq!(m, BitMatrix::from_strs(&["1010101", "0110011", "0001111"]));
    }

    #[test]
    fn render_roundtrip() {
        let m = parse(HAMMING, "inline").unwrap();
        assert_eq!(parse(&render(&m), "rendered").unwrap(), m);
    }

    #[test]
    fn inconsistent_lists_are_rejected() {
        let bad = HAMMING.replace("4 5 6 7", "4 5 6 1");
        assert!(parse(&bad, "bad").is_err());
    }
}
