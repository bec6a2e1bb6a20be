//! Logical Pauli generation by simulated GHZ measurements.
//!
//! The code's generators are brought to the block form `[[0 H_Z], [H_1 H_2]]`
//! and measured, with forced `+1` outcomes, on the first subsystem of a
//! reduced table holding `Z_{A_i} Z_{B_i}` and `X_{A_i} X_{B_i} X_{C_i}`
//! rows. Rows that survive unreplaced and are independent of the code on
//! subsystem `A` are harvested as logical `Z` (from the `ZZ` half) and
//! logical `X` (from the `XXX` half); a final change of basis enforces the
//! symplectic pairing.

use crate::bits::{BitMatrix, IncrementalBasis};
use crate::codes::StabilizerCode;
use crate::pauli::{Pauli, Sign};
use crate::tableau::{RowTag, StabilizerTable, TableError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogicalError {
    #[error("harvested {got} logical {kind} operators, expected {expected}")]
    Count {
        kind: char,
        got: usize,
        expected: usize,
    },
    #[error("generator {0} commutes with every remaining row")]
    Stuck(usize),
    #[error("pairing matrix is singular")]
    Singular,
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Generators in block form: the first `r_z` rows are purely Z-type with
/// independent Z-parts, the remaining `r_x` rows have independent X-parts.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub rows: Vec<Pauli>,
    pub r_z: usize,
    pub r_x: usize,
}

impl StandardForm {
    pub fn h_matrix(&self) -> BitMatrix {
        let n = self.rows.first().map_or(0, |r| r.num_qubits());
        BitMatrix::from_rows(2 * n, self.rows.iter().map(|r| r.symplectic_vector()).collect())
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.rows.iter().map(|r| r.sign()).collect()
    }
}

/// Row-reduces the generators into block form with exact sign arithmetic.
///
/// Generators are scanned in order; one whose X-part depends on the X-parts
/// of earlier kept rows is multiplied by those rows and becomes purely
/// Z-type. Kept rows are never modified.
pub fn standard_form(code: &StabilizerCode) -> StandardForm {
    let mut basis = IncrementalBasis::new();
    // combination[i]: indices (into `kept`) whose product reduces to basis vector i.
    let mut combos: Vec<Vec<usize>> = Vec::new();
    let mut kept: Vec<Pauli> = Vec::new();
    let mut pure_z: Vec<Pauli> = Vec::new();
    for g in &code.generators {
        let mut r = g.x_bits().clone();
        let mut used = vec![false; kept.len()];
        for (bi, (b, p)) in basis.entries().enumerate() {
            if r.get(p) {
                r.xor_assign(b);
                for &c in &combos[bi] {
                    used[c] ^= true;
                }
            }
        }
        if r.is_zero() {
            let mut z = g.clone();
            for (i, u) in used.iter().enumerate() {
                if *u {
                    z.mul_assign_right(&kept[i]);
                }
            }
            debug_assert!(z.x_bits().is_zero());
            pure_z.push(z);
        } else {
            let mut combo: Vec<usize> = used
                .iter()
                .enumerate()
                .filter(|(_, u)| **u)
                .map(|(i, _)| i)
                .collect();
            combo.push(kept.len());
            basis.insert(g.x_bits());
            combos.push(combo);
            kept.push(g.clone());
        }
    }
    let r_z = pure_z.len();
    let r_x = kept.len();
    pure_z.extend(kept);
    StandardForm {
        rows: pure_z,
        r_z,
        r_x,
    }
}

#[derive(Clone, Debug)]
pub struct Logicals {
    pub z: Vec<Pauli>,
    pub x: Vec<Pauli>,
}

/// Logical `Z` and `X` generators of `code`, paired so that `Z̄_i`
/// anticommutes with `X̄_j` exactly when `i == j`.
pub fn logical_paulis(code: &StabilizerCode) -> Result<Logicals, LogicalError> {
    let n = code.n;
    let k = code.k;
    let sf = standard_form(code);
    let mut table = reduced_ghz_table(n);
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    for (i, h) in sf.rows.iter().enumerate() {
        let obs = h.embed(3 * n, 0);
        if table.rows().iter().all(|r| r.commutes(&obs)) {
            return Err(LogicalError::Stuck(i));
        }
        table.measure(&obs, Some(Sign::Plus), &mut rng)?;
    }

    let mut basis = IncrementalBasis::new();
    for h in &sf.rows {
        basis.insert(&h.symplectic_vector());
    }
    let a_part = |i: usize| -> Pauli {
        let r = table.row(i);
        r.slice(0, n)
    };
    let mut lz = Vec::new();
    for i in 0..n {
        if table.tags()[i] == RowTag::Replaced {
            continue;
        }
        let cand = a_part(i);
        if basis.insert(&cand.symplectic_vector()) {
            lz.push(cand);
        }
    }
    let mut lx = Vec::new();
    for i in n..2 * n {
        if table.tags()[i] == RowTag::Replaced {
            continue;
        }
        let cand = a_part(i);
        if basis.insert(&cand.symplectic_vector()) {
            lx.push(cand);
        }
    }
    if lz.len() != k {
        return Err(LogicalError::Count {
            kind: 'Z',
            got: lz.len(),
            expected: k,
        });
    }
    if lx.len() != k {
        return Err(LogicalError::Count {
            kind: 'X',
            got: lx.len(),
            expected: k,
        });
    }

    let mut t = BitMatrix::zeros(k, k);
    for (i, z) in lz.iter().enumerate() {
        for (j, x) in lx.iter().enumerate() {
            t.set(i, j, z.anticommutes(x));
        }
    }
    if t != BitMatrix::identity(k) {
        let inv = t.inverse().ok_or(LogicalError::Singular)?;
        lz = (0..k)
            .map(|i| {
                let mut acc = Pauli::identity(n);
                for j in inv.row(i).ones() {
                    acc.mul_assign_right(&lz[j]);
                }
                acc
            })
            .collect();
    }
    Ok(Logicals { z: lz, x: lx })
}

/// `n` rows `Z_{A_i} Z_{B_i}` followed by `n` rows `X_{A_i} X_{B_i} X_{C_i}`.
pub fn reduced_ghz_table(n: usize) -> StabilizerTable {
    let full = StabilizerTable::ghz(n, 3);
    let keep: Vec<usize> = (0..n).chain(2 * n..3 * n).collect();
    StabilizerTable::new(
        full.subsystems().to_vec(),
        keep.iter().map(|&i| full.row(i).clone()).collect(),
        keep.iter().map(|&i| full.tags()[i]).collect(),
    )
}

/// Attaches freshly computed logical operators to `code`.
pub fn with_logicals(code: StabilizerCode) -> Result<StabilizerCode, crate::codes::CodeError> {
    let name = code.name.clone();
    let l = logical_paulis(&code).map_err(|e| crate::codes::CodeError::Invalid {
        name,
        violations: vec![e.to_string()],
    })?;
    code.with_logicals(l.z, l.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::p;

    fn code(gens: &[&str]) -> StabilizerCode {
        StabilizerCode::new("t", gens.iter().map(|s| p(s)).collect()).unwrap()
    }

    #[test]
    fn standard_form_block_counts() {
        let sf = standard_form(&code(&["ZZI", "IZZ"]));
        assert_eq!((sf.r_z, sf.r_x), (2, 0));
        let sf = standard_form(&code(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]));
        assert_eq!((sf.r_z, sf.r_x), (0, 4));
        let sf = standard_form(&code(&[
            "IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ",
        ]));
        assert_eq!((sf.r_z, sf.r_x), (3, 3));
    }

    #[test]
    fn standard_form_tracks_signs() {
        // XX · YY = -ZZ.
        let sf = standard_form(&code(&["XX", "YY"]));
        assert_eq!(sf.rows[0], p("-ZZ"));
        assert_eq!(sf.rows[1], p("XX"));
    }

    #[test]
    fn five_qubit_logicals() {
        let l = logical_paulis(&code(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"])).unwrap();
        assert_eq!(l.z, vec![p("ZZZZZ")]);
        assert_eq!(l.x, vec![p("-YIZZI")]);
    }

    #[test]
    fn yy_logicals() {
        // The first harvested XXX-type row is -Y_{A1} Y_{B1} X_{C1}.
        let c = code(&["YYI", "IYY"]);
        let l = logical_paulis(&c).unwrap();
        assert_eq!(l.z, vec![p("ZZZ")]);
        assert_eq!(l.x, vec![p("-YII")]);
        let shifted = &l.x[0] * &p("YIY");
        assert_eq!(shifted, p("-IIY"));
    }
}
