//! Stabilizers induced on the remaining parties of a GHZ register when the
//! first party measures a code stabilizer.
//!
//! Measuring `ε E(a, b)` on subsystem `A` of `n` GHZ states shared by `ℓ`
//! parties leaves the other `ℓ - 1` subsystems stabilized by
//!
//! ```text
//! ε (-1)^{(b + Σ_{i<j} b_i * b_j) a^T}  E(a, b_1) ⊗ E(a, b_2) ⊗ ... ⊗ E(a, b_{ℓ-1})
//! ```
//!
//! for any split `b_1 ⊕ ... ⊕ b_{ℓ-1} = b`, together with the adjacent
//! `Z Z` pairs between consecutive non-root parties.

use crate::bits::BitVec;
use crate::codes::{CodeError, StabilizerCode};
use crate::pauli::{Pauli, Sign};
use crate::tableau::party_label;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GhzMapError {
    #[error("split has {got} pieces, expected {expected}")]
    SplitLength { expected: usize, got: usize },
    #[error("split pieces do not XOR to the Z-part")]
    SplitMismatch,
    #[error("need at least 3 parties, got {0}")]
    TooFewParties(usize),
    #[error("expected {expected} outcomes, got {got}")]
    Outcomes { expected: usize, got: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A signed tensor product over labelled subsystems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedStabilizer {
    pub sign: Sign,
    pub parts: Vec<(String, Pauli)>,
}

impl InducedStabilizer {
    /// The joint operator on the concatenated subsystems, as a signed Pauli.
    pub fn to_pauli(&self) -> Pauli {
        let mut acc = Pauli::identity(0);
        for (_, p) in &self.parts {
            acc = acc.tensor(&p.unsigned());
        }
        acc.times(self.sign)
    }
}

/// Pieces `b_1, ..., b_{ℓ-1}` whose XOR is the stabilizer's Z-part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSplit {
    pub pieces: Vec<BitVec>,
}

impl BSplit {
    /// `(b, 0, ..., 0)`.
    pub fn first(b: &BitVec, parts: usize) -> Self {
        let mut pieces = vec![BitVec::zeros(b.len()); parts];
        pieces[0] = b.clone();
        BSplit { pieces }
    }

    pub fn check(&self, b: &BitVec, parts: usize) -> Result<(), GhzMapError> {
        if self.pieces.len() != parts {
            return Err(GhzMapError::SplitLength {
                expected: parts,
                got: self.pieces.len(),
            });
        }
        let mut acc = BitVec::zeros(b.len());
        for p in &self.pieces {
            if p.len() != b.len() {
                return Err(GhzMapError::SplitMismatch);
            }
            acc.xor_assign(p);
        }
        if &acc != b {
            return Err(GhzMapError::SplitMismatch);
        }
        Ok(())
    }
}

/// Sign of `ε · stab` as a multiple of `E(a, b)`.
fn total_sign(stab: &Pauli, outcome: Sign) -> Sign {
    assert!(stab.is_hermitian_signed(), "stabilizer must be ±E(a,b)");
    stab.sign() * outcome
}

/// Three-party case: `ε (-1)^{a b^T} E(a, b)_B ⊗ E(a, 0)_C`.
pub fn induced_bc(stab: &Pauli, outcome: Sign) -> InducedStabilizer {
    let n = stab.num_qubits();
    induced_multi(stab, outcome, 3, &BSplit::first(stab.z_bits(), 2))
        .unwrap_or_else(|_| unreachable!("default split is valid for n = {n}"))
}

/// `Z_{B_i} Z_{C_i}` for `i = 1..n` on the `2n` qubits of `B` and `C`.
pub fn companions_bc(n: usize) -> Vec<Pauli> {
    companions(n, 3)
}

/// Adjacent `Z Z` pairs between consecutive non-root parties, on
/// `n(ℓ-1)` qubits, grouped by pair.
pub fn companions(n: usize, l: usize) -> Vec<Pauli> {
    let total = n * (l - 1);
    let mut out = Vec::with_capacity(n * (l - 2));
    for t in 0..l - 2 {
        for i in 0..n {
            let mut r = Pauli::identity(total);
            r.set_letter(t * n + i, 'Z');
            r.set_letter((t + 1) * n + i, 'Z');
            out.push(r);
        }
    }
    out
}

/// `ℓ`-party case with an explicit split of the Z-part.
pub fn induced_multi(
    stab: &Pauli,
    outcome: Sign,
    l: usize,
    split: &BSplit,
) -> Result<InducedStabilizer, GhzMapError> {
    if l < 3 {
        return Err(GhzMapError::TooFewParties(l));
    }
    let a = stab.x_bits();
    let b = stab.z_bits();
    split.check(b, l - 1)?;
    let mut exp = a.and_count(b);
    for i in 0..split.pieces.len() {
        for j in i + 1..split.pieces.len() {
            exp += split.pieces[i].and(&split.pieces[j]).and_count(a);
        }
    }
    let sign = total_sign(stab, outcome).flip_if(exp % 2 == 1);
    let parts = split
        .pieces
        .iter()
        .enumerate()
        .map(|(t, bt)| (party_label(t + 1), Pauli::from_xz(a.clone(), bt.clone())))
        .collect();
    Ok(InducedStabilizer { sign, parts })
}

/// The `[[n(ℓ-1), k]]` code jointly held by the non-root parties after the
/// root measured every generator of `code` with the given outcomes.
/// `splits[i] = None` selects the default split for generator `i`.
pub fn induced_code(
    code: &StabilizerCode,
    outcomes: &[Sign],
    l: usize,
    splits: Option<&[Option<BSplit>]>,
) -> Result<StabilizerCode, GhzMapError> {
    if outcomes.len() != code.generators.len() {
        return Err(GhzMapError::Outcomes {
            expected: code.generators.len(),
            got: outcomes.len(),
        });
    }
    let mut gens = Vec::with_capacity(code.n * (l - 1) - code.k);
    for (i, (g, &eps)) in code.generators.iter().zip(outcomes).enumerate() {
        let split = match splits.and_then(|s| s.get(i)).and_then(|s| s.as_ref()) {
            Some(s) => s.clone(),
            None => BSplit::first(g.z_bits(), l - 1),
        };
        gens.push(induced_multi(g, eps, l, &split)?.to_pauli());
    }
    gens.extend(companions(code.n, l));
    let name = format!("{}-induced-{l}", code.name);
    Ok(StabilizerCode::new(&name, gens)?)
}
