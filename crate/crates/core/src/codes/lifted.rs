//! Lifted-product codes over circulant permutation blocks.
//!
//! A base matrix entry `e >= 0` stands for the `L × L` cyclic shift `x^e`;
//! `-1` stands for the zero block. For bases `A` (`m_A × n_A`) and `B`
//! (`m_B × n_B`) the checks are
//!
//! ```text
//! H_X = [ A ⊗ I_{n_B} | I_{m_A} ⊗ B^* ]
//! H_Z = [ I_{n_A} ⊗ B | A^* ⊗ I_{m_B} ]
//! ```
//!
//! where `^*` is the conjugate transpose (`x^e -> x^{-e}`, transposed), and
//! the code has `L (n_A n_B + m_A m_B)` qubits.

use super::{CodeError, CssCode};
use crate::bits::BitMatrix;
use std::path::Path;

/// Base matrix entries: `None` is the zero block, `Some(e)` is `x^e`.
pub type Base = Vec<Vec<Option<u32>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSpec {
    pub lift: usize,
    pub base_a: Base,
    pub base_b: Base,
}

/// A matrix over `F2[x]/(x^L - 1)` with monomial-sum entries, stored as
/// exponent sets.
#[derive(Clone, Debug)]
struct RingMatrix {
    rows: usize,
    cols: usize,
    lift: usize,
    entries: Vec<Vec<Vec<bool>>>,
}

impl RingMatrix {
    fn zeros(rows: usize, cols: usize, lift: usize) -> Self {
        RingMatrix {
            rows,
            cols,
            lift,
            entries: vec![vec![vec![false; lift]; cols]; rows],
        }
    }

    fn from_base(b: &Base, lift: usize) -> Self {
        let rows = b.len();
        let cols = b.first().map_or(0, |r| r.len());
        let mut m = RingMatrix::zeros(rows, cols, lift);
        for (i, r) in b.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged base matrix");
            for (j, e) in r.iter().enumerate() {
                if let Some(e) = e {
                    m.entries[i][j][*e as usize % lift] = true;
                }
            }
        }
        m
    }

    fn identity(n: usize, lift: usize) -> Self {
        let mut m = RingMatrix::zeros(n, n, lift);
        for i in 0..n {
            m.entries[i][i][0] = true;
        }
        m
    }

    fn conj_transpose(&self) -> Self {
        let l = self.lift;
        let mut m = RingMatrix::zeros(self.cols, self.rows, l);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for e in 0..l {
                    if self.entries[i][j][e] {
                        m.entries[j][i][(l - e) % l] = true;
                    }
                }
            }
        }
        m
    }

    fn kron(&self, other: &RingMatrix) -> Self {
        let l = self.lift;
        let mut m = RingMatrix::zeros(self.rows * other.rows, self.cols * other.cols, l);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for t in 0..other.cols {
                        let out = &mut m.entries[i * other.rows + k][j * other.cols + t];
                        for e1 in 0..l {
                            if !self.entries[i][j][e1] {
                                continue;
                            }
                            for e2 in 0..l {
                                if other.entries[k][t][e2] {
                                    out[(e1 + e2) % l] ^= true;
                                }
                            }
                        }
                    }
                }
            }
        }
        m
    }

    /// Binary image: entry `x^e` becomes the shift with ones at `(r, r+e mod L)`.
    fn expand(&self) -> BitMatrix {
        let l = self.lift;
        let mut out = BitMatrix::zeros(self.rows * l, self.cols * l);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for e in 0..l {
                    if self.entries[i][j][e] {
                        for r in 0..l {
                            let c = (r + e) % l;
                            let cur = out.get(i * l + r, j * l + c);
                            out.set(i * l + r, j * l + c, !cur);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Lifted product of two base matrices with lift size `lift`.
pub fn lifted_product(base_a: &Base, base_b: &Base, lift: usize, name: &str) -> Result<CssCode, CodeError> {
    assert!(lift >= 1, "lift size must be positive");
    let a = RingMatrix::from_base(base_a, lift);
    let b = RingMatrix::from_base(base_b, lift);
    let (ma, na, mb, nb) = (a.rows, a.cols, b.rows, b.cols);
    let hx = a
        .kron(&RingMatrix::identity(nb, lift))
        .expand()
        .hstack(&RingMatrix::identity(ma, lift).kron(&b.conj_transpose()).expand());
    let hz = RingMatrix::identity(na, lift)
        .kron(&b)
        .expand()
        .hstack(&a.conj_transpose().kron(&RingMatrix::identity(mb, lift)).expand());
    CssCode::new(name, hx, hz)
}

/// Hypergraph product of two binary matrices (the `L = 1` case).
pub fn hypergraph_product(h1: &BitMatrix, h2: &BitMatrix, name: &str) -> Result<CssCode, CodeError> {
    let to_base = |h: &BitMatrix| -> Base {
        (0..h.num_rows())
            .map(|i| {
                (0..h.num_cols())
                    .map(|j| if h.get(i, j) { Some(0) } else { None })
                    .collect()
            })
            .collect()
    };
    lifted_product(&to_base(h1), &to_base(h2), 1, name)
}

impl LiftSpec {
    pub fn parse(text: &str, origin: &str) -> Result<LiftSpec, CodeError> {
        let err = |msg: String| CodeError::Parse {
            path: origin.to_string(),
            msg,
        };
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.starts_with('#'))
            .skip_while(|l| l.is_empty());
        let lift: usize = lines
            .next()
            .ok_or_else(|| err("empty lift spec".into()))?
            .parse()
            .map_err(|_| err("first line must be the lift size".into()))?;
        if lift == 0 {
            return Err(err("lift size must be positive".into()));
        }
        let mut blocks: Vec<Base> = vec![Vec::new()];
        for l in lines {
            if l.is_empty() {
                if !blocks.last().unwrap().is_empty() {
                    blocks.push(Vec::new());
                }
                continue;
            }
            let row = l
                .split_whitespace()
                .map(|t| match t.parse::<i64>() {
                    Ok(-1) => Ok(None),
                    Ok(e) if e >= 0 => Ok(Some(e as u32)),
                    _ => Err(err(format!("bad base entry {t:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            blocks.last_mut().unwrap().push(row);
        }
        blocks.retain(|b| !b.is_empty());
        if blocks.len() != 2 {
            return Err(err(format!("expected two base blocks, found {}", blocks.len())));
        }
        for b in &blocks {
            if b.iter().any(|r| r.len() != b[0].len()) {
                return Err(err("ragged base matrix".into()));
            }
        }
        let base_b = blocks.pop().unwrap();
        let base_a = blocks.pop().unwrap();
        Ok(LiftSpec { lift, base_a, base_b })
    }

    pub fn read(path: &Path) -> Result<LiftSpec, CodeError> {
        let text = std::fs::read_to_string(path).map_err(|source| CodeError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        LiftSpec::parse(&text, &path.display().to_string())
    }

    pub fn build(&self, name: &str) -> Result<CssCode, CodeError> {
        lifted_product(&self.base_a, &self.base_b, self.lift, name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_product() {
        let c = lifted_product(&vec![vec![Some(0)]], &vec![vec![Some(0)]], 1, "unit").unwrap();
        assert_eq!((c.n(), c.k()), (2, 0));
    }

    #[test]
    fn toric_from_cyclic_repetition() {
        let h = BitMatrix::from_strs(&["110", "011", "101"]);
        let c = hypergraph_product(&h, &h, "toric3").unwrap();
        assert_eq!((c.n(), c.k()), (18, 2));
    }

    #[test]
    fn lift_spec_parse() {
        let s = LiftSpec::parse("3\n0 1\n-1 2\n\n0 0\n1 -1\n", "inline").unwrap();
        assert_eq!(s.lift, 3);
        assert_eq!(s.base_a[1], vec![None, Some(2)]);
        let c = s.build("lp").unwrap();
        assert_eq!(c.n(), 3 * (2 * 2 + 2 * 2));
    }
}
