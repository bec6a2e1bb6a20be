//! Stabilizer and CSS codes, file formats and Tanner graphs.

pub mod alist;
pub mod bundle;
pub mod lifted;
pub mod tanner;

use crate::bits::{BitMatrix, BitVec, IncrementalBasis};
use crate::pauli::Pauli;
use std::path::PathBuf;
use thiserror::Error;

pub use tanner::TannerGraph;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid code {name}: {violations:?}")]
    Invalid {
        name: String,
        violations: Vec<String>,
    },
    #[error("H_X H_Z^T != 0 ({0} nonzero entries)")]
    NotOrthogonal(usize),
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unknown code {0:?}")]
    Unknown(String),
    #[error("code {0} is not CSS")]
    NotCss(String),
    #[error("code {0} has no logical operators")]
    NoLogicals(String),
}

/// An `[[n, k]]` stabilizer code with signed generators.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<Pauli>,
    pub logical_x: Option<Vec<Pauli>>,
    pub logical_z: Option<Vec<Pauli>>,
    span: IncrementalBasis,
}

impl StabilizerCode {
    /// Builds and validates a code from independent commuting generators.
    pub fn new(name: &str, generators: Vec<Pauli>) -> Result<Self, CodeError> {
        let n = generators
            .first()
            .map(|g| g.num_qubits())
            .ok_or_else(|| CodeError::Invalid {
                name: name.into(),
                violations: vec!["no generators".into()],
            })?;
        let mut span = IncrementalBasis::new();
        for g in &generators {
            span.insert(&g.symplectic_vector());
        }
        let code = StabilizerCode {
            name: name.to_string(),
            n,
            k: n.saturating_sub(generators.len()),
            generators,
            logical_x: None,
            logical_z: None,
            span,
        };
        let v = code.validate();
        if !v.is_empty() {
            return Err(CodeError::Invalid {
                name: name.into(),
                violations: v,
            });
        }
        Ok(code)
    }

    /// Attaches logical operators and re-validates the pairing.
    pub fn with_logicals(mut self, lz: Vec<Pauli>, lx: Vec<Pauli>) -> Result<Self, CodeError> {
        self.logical_z = Some(lz);
        self.logical_x = Some(lx);
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(CodeError::Invalid {
                name: self.name.clone(),
                violations: v,
            })
        }
    }

    /// Lists every violated invariant; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if g.num_qubits() != self.n {
                out.push(format!("generator {i} has {} qubits", g.num_qubits()));
                return out;
            }
            if !g.is_hermitian_signed() {
                out.push(format!("generator {i} has phase ±i"));
            }
            for (j, h) in self.generators.iter().enumerate().skip(i + 1) {
                if g.anticommutes(h) {
                    out.push(format!("generators {i} and {j} anticommute"));
                }
            }
        }
        if self.span.len() != self.generators.len() {
            out.push(format!(
                "generators are dependent (rank {} of {})",
                self.span.len(),
                self.generators.len()
            ));
        }
        if let (Some(lz), Some(lx)) = (&self.logical_z, &self.logical_x) {
            if lz.len() != self.k || lx.len() != self.k {
                out.push(format!(
                    "expected {} logical pairs, got {} Z and {} X",
                    self.k,
                    lz.len(),
                    lx.len()
                ));
                return out;
            }
            for (name, ops) in [("Z", lz), ("X", lx)] {
                for (i, l) in ops.iter().enumerate() {
                    if let Some(j) = self.generators.iter().position(|g| g.anticommutes(l)) {
                        out.push(format!("logical {name}{i} anticommutes with generator {j}"));
                    }
                    if !self.span.is_independent(&l.symplectic_vector()) {
                        out.push(format!("logical {name}{i} lies in the stabilizer group"));
                    }
                }
            }
            for (i, z) in lz.iter().enumerate() {
                for (j, x) in lx.iter().enumerate() {
                    if z.anticommutes(x) != (i == j) {
                        out.push(format!("pairing of Z{i} and X{j} is wrong"));
                    }
                }
                for (j, z2) in lz.iter().enumerate().skip(i + 1) {
                    if z.anticommutes(z2) {
                        out.push(format!("logical Z{i} and Z{j} anticommute"));
                    }
                }
            }
        }
        out
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    /// Binary syndrome: bit `i` is set when `e` anticommutes with generator `i`.
    pub fn syndrome(&self, e: &Pauli) -> BitVec {
        let mut s = BitVec::zeros(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if g.anticommutes(e) {
                s.set(i, true);
            }
        }
        s
    }

    /// True when `(x, z)` of `e` lies in the generator row space.
    pub fn in_stabilizer_span(&self, e: &Pauli) -> bool {
        !self.span.is_independent(&e.symplectic_vector())
    }

    pub fn is_css(&self) -> bool {
        self.generators
            .iter()
            .all(|g| g.x_bits().is_zero() || g.z_bits().is_zero())
    }

    pub fn logicals(&self) -> Result<(&[Pauli], &[Pauli]), CodeError> {
        match (&self.logical_z, &self.logical_x) {
            (Some(z), Some(x)) => Ok((z, x)),
            _ => Err(CodeError::NoLogicals(self.name.clone())),
        }
    }

    /// Logical class `(u, w)` of an operator commuting with the stabilizers:
    /// `e` equals a stabilizer times `prod X̄_j^{u_j} prod Z̄_j^{w_j}` up to phase.
    pub fn logical_class(&self, e: &Pauli) -> Result<(BitVec, BitVec), CodeError> {
        let (lz, lx) = self.logicals()?;
        let k = self.k;
        let mut u = BitVec::zeros(k);
        for (j, z) in lz.iter().enumerate() {
            if z.anticommutes(e) {
                u.set(j, true);
            }
        }
        let mut w = BitVec::zeros(k);
        for (i, x) in lx.iter().enumerate() {
            let mut bit = x.anticommutes(e);
            for j in u.ones() {
                bit ^= lx[j].anticommutes(x);
            }
            if bit {
                w.set(i, true);
            }
        }
        Ok((u, w))
    }

    /// Generator matrix as `(n-k) × 2n` rows `(x | z)`.
    pub fn check_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(
            2 * self.n,
            self.generators.iter().map(|g| g.symplectic_vector()).collect(),
        )
    }
}

/// A CSS code: the stabilizer code plus the (possibly redundant) check
/// matrices and their Tanner graphs.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub code: StabilizerCode,
    pub hx: BitMatrix,
    pub hz: BitMatrix,
    pub graph_x: TannerGraph,
    pub graph_z: TannerGraph,
}

impl CssCode {
    /// `hx` rows are X-type checks, `hz` rows Z-type checks. Dependent rows
    /// are kept in the matrices; the generator list uses an independent subset.
    pub fn new(name: &str, hx: BitMatrix, hz: BitMatrix) -> Result<Self, CodeError> {
        let n = hx.num_cols();
        if hz.num_cols() != n {
            return Err(CodeError::Invalid {
                name: name.into(),
                violations: vec![format!("H_X has {n} columns, H_Z {}", hz.num_cols())],
            });
        }
        let prod = hx.mul(&hz.transpose());
        if !prod.is_zero() {
            return Err(CodeError::NotOrthogonal(prod.count_ones()));
        }
        let mut gens = Vec::new();
        let zero = BitVec::zeros(n);
        for (m, is_x) in [(&hx, true), (&hz, false)] {
            let mut basis = IncrementalBasis::new();
            for r in m.rows() {
                if basis.insert(r) {
                    gens.push(if is_x {
                        Pauli::from_xz(r.clone(), zero.clone())
                    } else {
                        Pauli::from_xz(zero.clone(), r.clone())
                    });
                }
            }
        }
        let dependent = hx.num_rows() + hz.num_rows() - gens.len();
        if dependent > 0 {
            log::info!("{name}: {dependent} dependent check rows kept for decoding");
        }
        let code = StabilizerCode::new(name, gens)?;
        Ok(CssCode {
            graph_x: TannerGraph::new(&hx),
            graph_z: TannerGraph::new(&hz),
            code,
            hx,
            hz,
        })
    }

    pub fn n(&self) -> usize {
        self.code.n
    }

    pub fn k(&self) -> usize {
        self.code.k
    }

    pub fn name(&self) -> &str {
        &self.code.name
    }

    /// Splits a stabilizer code whose generators are each purely X or Z.
    pub fn from_stabilizer(code: &StabilizerCode) -> Result<Self, CodeError> {
        if !code.is_css() {
            return Err(CodeError::NotCss(code.name.clone()));
        }
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for g in &code.generators {
            if g.z_bits().is_zero() {
                xs.push(g.x_bits().clone());
            } else {
                zs.push(g.z_bits().clone());
            }
        }
        let mut c = CssCode::new(
            &code.name,
            BitMatrix::from_rows(code.n, xs),
            BitMatrix::from_rows(code.n, zs),
        )?;
        c.code.generators = code.generators.clone();
        c.code.logical_x = code.logical_x.clone();
        c.code.logical_z = code.logical_z.clone();
        Ok(c)
    }

    /// X-part syndrome `H_Z x^T` and Z-part syndrome `H_X z^T` over all
    /// (including dependent) check rows.
    pub fn split_syndrome(&self, e: &Pauli) -> (BitVec, BitVec) {
        (self.hz.mul_vec(e.x_bits()), self.hx.mul_vec(e.z_bits()))
    }

    /// Residual trivial as a stabilizer: x in rowspace(H_X), z in rowspace(H_Z).
    pub fn in_stabilizer_span(&self, e: &Pauli) -> bool {
        self.code.in_stabilizer_span(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::p;

    #[test]
    fn five_qubit_code_is_valid() {
        let c = StabilizerCode::new(
            "five",
            ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].iter().map(|s| p(s)).collect(),
        )
        .unwrap();
        assert_eq!((c.n, c.k), (5, 1));
        assert!(!c.is_css());
    }

    #[test]
    fn anticommuting_generators_are_rejected() {
        let err = StabilizerCode::new("bad", vec![p("X"), p("Z")]).unwrap_err();
        assert!(err.to_string().contains("anticommute"));
    }

    #[test]
    fn yy_code_is_valid_non_css() {
        let c = StabilizerCode::new("yy", vec![p("YYI"), p("IYY")]).unwrap();
        assert_eq!(c.k, 1);
        assert!(!c.is_css());
    }

    #[test]
    fn flipped_hamming_bit_breaks_orthogonality() {
        let mut h = BitMatrix::from_strs(&["1010101", "0110011", "0001111"]);
        CssCode::new("steane", h.clone(), h.clone()).unwrap();
        let hz = h.clone();
        h.set(0, 0, false);
        assert!(matches!(
            CssCode::new("bad", h, hz),
            Err(CodeError::NotOrthogonal(_))
        ));
    }
}
