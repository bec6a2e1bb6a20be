//! Diagonal Clifford operators `U_R` given by binary symmetric matrices.
//!
//! `U_R |x⟩ = i^{x R x^T} |x⟩` with the quadratic form evaluated over the
//! integers, so diagonal entries are phase gates and each off-diagonal pair
//! is a controlled-Z. Conjugation maps `E(a, b) -> ± E(a, b ⊕ aR)`, where
//! the sign collects `a (b * aR)^T` and the carries of `a R a^T`.

use crate::bits::{BitMatrix, BitVec};
use crate::pauli::Pauli;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalClifford {
    r: BitMatrix,
}

impl DiagonalClifford {
    /// Panics unless `r` is square and symmetric.
    pub fn new(r: BitMatrix) -> Self {
        assert_eq!(r.num_rows(), r.num_cols(), "R must be square");
        assert_eq!(r, r.transpose(), "R must be symmetric");
        DiagonalClifford { r }
    }

    pub fn identity(n: usize) -> Self {
        DiagonalClifford {
            r: BitMatrix::zeros(n, n),
        }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.r
    }

    pub fn num_qubits(&self) -> usize {
        self.r.num_rows()
    }

    /// `U_R p U_R^†`, with the phase of `p` carried through.
    pub fn conjugate(&self, p: &Pauli) -> Pauli {
        assert_eq!(p.num_qubits(), self.num_qubits(), "size mismatch");
        let a = p.x_bits();
        let b = p.z_bits();
        let ar = self.r.left_mul_vec(a);
        // aRa^T over the integers is sum_i |R_i * a| over i in a; each row
        // contributes its parity to |a * aR| and twice its half to the sign.
        let carries: usize = a.ones().map(|i| self.r.row(i).and_count(a) / 2).sum();
        let flip = (a.and(b).and_count(&ar) + carries) % 2 == 1;
        let out = Pauli::from_xz(a.clone(), b.xor(&ar));
        out.with_phase((p.phase_exp() + if flip { 2 } else { 0 }) % 4)
    }

    /// `U_R^† p U_R`, i.e. conjugation by `U_R^3`.
    pub fn conjugate_inverse(&self, p: &Pauli) -> Pauli {
        let mut q = p.clone();
        for _ in 0..3 {
            q = self.conjugate(&q);
        }
        q
    }

    /// Diagonal entries as phase gates, off-diagonal pairs as CZ gates.
    pub fn gates(&self) -> Vec<Gate> {
        let n = self.num_qubits();
        let mut g = Vec::new();
        for i in 0..n {
            if self.r.get(i, i) {
                g.push(Gate::Phase(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.r.get(i, j) {
                    g.push(Gate::Cz(i, j));
                }
            }
        }
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Phase(usize),
    Cz(usize, usize),
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Phase(i) => write!(f, "P({})", i + 1),
            Gate::Cz(i, j) => write!(f, "CZ({},{})", i + 1, j + 1),
        }
    }
}

impl fmt::Display for DiagonalClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gates().iter().map(|g| g.to_string()).collect();
        if g.is_empty() {
            write!(f, "I")
        } else {
            write!(f, "{}", g.join(" "))
        }
    }
}

/// Index of the upper-triangle unknown `R_{ij}`, `i <= j`.
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Symmetric `R` with `A R = B`, if one exists. Free unknowns are zero.
pub fn solve_symmetric(a: &BitMatrix, b: &BitMatrix) -> Option<DiagonalClifford> {
    assert_eq!(a.num_rows(), b.num_rows());
    assert_eq!(a.num_cols(), b.num_cols());
    let n = a.num_cols();
    let unknowns = n * (n + 1) / 2;
    let mut sys = BitMatrix::zeros(0, unknowns);
    let mut rhs = Vec::new();
    for (ar, br) in a.rows().iter().zip(b.rows()) {
        for j in 0..n {
            let mut eq = BitVec::zeros(unknowns);
            for i in ar.ones() {
                eq.flip(tri_index(n, i, j));
            }
            sys.push_row(eq);
            rhs.push(br.get(j));
        }
    }
    let x = sys.solve_right(&BitVec::from_bools(&rhs))?;
    let mut r = BitMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if x.get(tri_index(n, i, j)) {
                r.set(i, j, true);
                r.set(j, i, true);
            }
        }
    }
    Some(DiagonalClifford { r })
}

/// Clifford restoring `E(a_i, b_i)` from `E(a_i, 0)` for every operator in
/// `targets` that has a nonzero X-part.
pub fn restoring_clifford(targets: &[Pauli]) -> Option<DiagonalClifford> {
    let rows: Vec<&Pauli> = targets.iter().filter(|p| !p.x_bits().is_zero()).collect();
    let n = targets.first()?.num_qubits();
    let a = BitMatrix::from_rows(n, rows.iter().map(|p| p.x_bits().clone()).collect());
    let b = BitMatrix::from_rows(n, rows.iter().map(|p| p.z_bits().clone()).collect());
    solve_symmetric(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::p;

    #[test]
    fn walkthrough_system_gives_phase_on_all() {
        let a = BitMatrix::from_strs(&["110", "011", "001"]);
        let c = solve_symmetric(&a, &a).unwrap();
        assert_eq!(c.matrix(), &BitMatrix::identity(3));
        assert_eq!(c.to_string(), "P(1) P(2) P(3)");
    }

    #[test]
    fn single_qubit_and_cz() {
        let s = DiagonalClifford::new(BitMatrix::identity(1));
        assert_eq!(s.conjugate(&p("X")), p("Y"));
        assert_eq!(s.conjugate(&p("Y")), p("-X"));
        assert_eq!(s.conjugate(&p("-Z")), p("-Z"));
        let cz = DiagonalClifford::new(BitMatrix::from_strs(&["01", "10"]));
        assert_eq!(cz.conjugate(&p("XI")), p("XZ"));
        assert_eq!(cz.conjugate_inverse(&cz.conjugate(&p("YX"))), p("YX"));
    }

    #[test]
    fn infeasible_system() {
        // Row 10 -> 01 forces R_12 = 1, row 01 -> 00 forces R_21 = 0.
        let a = BitMatrix::identity(2);
        let b = BitMatrix::from_strs(&["01", "00"]);
        assert!(solve_symmetric(&a, &b).is_none());
    }

    #[test]
    fn tri_index_is_dense() {
        let n = 4;
        let mut seen = vec![false; n * (n + 1) / 2];
        for i in 0..n {
            for j in i..n {
                seen[tri_index(n, i, j)] = true;
            }
        }
        assert!(seen.iter().all(|s| *s));
    }
}
