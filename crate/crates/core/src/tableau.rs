//! Sign-tracking stabilizer tables over named subsystems.
//!
//! A table is an ordered list of commuting, independent, Hermitian-signed
//! Pauli rows. Measurements follow the usual stabilizer update: if the
//! observable commutes with every row its outcome is fixed by the group;
//! otherwise one anticommuting row is replaced by the signed observable and
//! every other anticommuting row is multiplied by the removed row.

use crate::bits::{BitMatrix, BitVec};
use crate::pauli::{Pauli, Sign};
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("observable acts on {got} qubits, table has {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("observable is not Hermitian-signed: {0}")]
    NotHermitian(String),
    #[error("forced outcome {forced} contradicts the contained sign {contained}")]
    ForcedContradiction { forced: Sign, contained: Sign },
    #[error("unknown subsystem {0:?}")]
    UnknownSubsystem(String),
    #[error("row {0} acts outside the requested subsystems")]
    Straddles(usize),
    #[error("pivot row {0} does not anticommute with the observable")]
    BadPivot(usize),
    #[error("table invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowTag {
    GhzZz,
    GhzXxx,
    CodeStabilizer,
    Replaced,
    Updated,
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// The operator's `(x, z)` is generated and the signs agree.
    Yes,
    /// Generated, but the group contains the opposite sign.
    YesNegated,
    No,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    /// Outcome fixed by the group; table unchanged.
    Deterministic,
    /// Outcome random (or forced); row `pivot` was replaced.
    Random { pivot: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTable {
    subsystems: Vec<(String, usize)>,
    rows: Vec<Pauli>,
    tags: Vec<RowTag>,
}

impl StabilizerTable {
    pub fn new(subsystems: Vec<(String, usize)>, rows: Vec<Pauli>, tags: Vec<RowTag>) -> Self {
        assert_eq!(rows.len(), tags.len());
        let t = StabilizerTable {
            subsystems,
            rows,
            tags,
        };
        for r in &t.rows {
            assert_eq!(r.num_qubits(), t.num_qubits(), "row width mismatch");
        }
        t
    }

    /// `n` Bell pairs on subsystems `A`, `B`: all `X_{A_i} X_{B_i}` rows
    /// followed by all `Z_{A_i} Z_{B_i}` rows.
    pub fn bell(n: usize) -> Self {
        assert!(n >= 1);
        let mut rows = Vec::with_capacity(2 * n);
        let mut tags = Vec::with_capacity(2 * n);
        for (letter, tag) in [('X', RowTag::GhzXxx), ('Z', RowTag::GhzZz)] {
            for i in 0..n {
                let mut r = Pauli::identity(2 * n);
                r.set_letter(i, letter);
                r.set_letter(n + i, letter);
                rows.push(r);
                tags.push(tag);
            }
        }
        StabilizerTable::new(parties(2, n), rows, tags)
    }

    /// `n` GHZ states over `l` parties: `n(l-1)` adjacent-pair `ZZ` rows
    /// grouped by pair, then `n` all-`X` rows.
    pub fn ghz(n: usize, l: usize) -> Self {
        assert!(n >= 1 && l >= 2);
        let total = n * l;
        let mut rows = Vec::with_capacity(n * l);
        let mut tags = Vec::with_capacity(n * l);
        for t in 0..l - 1 {
            for i in 0..n {
                let mut r = Pauli::identity(total);
                r.set_letter(t * n + i, 'Z');
                r.set_letter((t + 1) * n + i, 'Z');
                rows.push(r);
                tags.push(RowTag::GhzZz);
            }
        }
        for i in 0..n {
            let mut r = Pauli::identity(total);
            for t in 0..l {
                r.set_letter(t * n + i, 'X');
            }
            rows.push(r);
            tags.push(RowTag::GhzXxx);
        }
        StabilizerTable::new(parties(l, n), rows, tags)
    }

    pub fn num_qubits(&self) -> usize {
        self.subsystems.iter().map(|(_, k)| k).sum()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Pauli] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Pauli {
        &self.rows[i]
    }

    pub fn tags(&self) -> &[RowTag] {
        &self.tags
    }

    pub fn subsystems(&self) -> &[(String, usize)] {
        &self.subsystems
    }

    /// Qubit offset and size of a named subsystem.
    pub fn subsystem_range(&self, label: &str) -> Result<(usize, usize), TableError> {
        let mut off = 0;
        for (l, k) in &self.subsystems {
            if l == label {
                return Ok((off, *k));
            }
            off += k;
        }
        Err(TableError::UnknownSubsystem(label.to_string()))
    }

    /// Embeds an operator acting on one subsystem into the full register.
    pub fn embed(&self, label: &str, p: &Pauli) -> Result<Pauli, TableError> {
        let (off, k) = self.subsystem_range(label)?;
        if p.num_qubits() != k {
            return Err(TableError::LengthMismatch {
                expected: k,
                got: p.num_qubits(),
            });
        }
        Ok(p.embed(self.num_qubits(), off))
    }

    fn check_observable(&self, obs: &Pauli) -> Result<(), TableError> {
        if obs.num_qubits() != self.num_qubits() {
            return Err(TableError::LengthMismatch {
                expected: self.num_qubits(),
                got: obs.num_qubits(),
            });
        }
        if !obs.is_hermitian_signed() {
            return Err(TableError::NotHermitian(obs.to_string()));
        }
        Ok(())
    }

    /// Measures `obs`, replacing the first anticommuting row when random.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        obs: &Pauli,
        forced: Option<Sign>,
        rng: &mut R,
    ) -> Result<(Sign, MeasureKind), TableError> {
        self.check_observable(obs)?;
        match self.rows.iter().position(|r| r.anticommutes(obs)) {
            None => self.deterministic_outcome(obs, forced),
            Some(pivot) => {
                let s = forced.unwrap_or_else(|| random_sign(rng));
                self.replace(obs, pivot, s);
                Ok((s, MeasureKind::Random { pivot }))
            }
        }
    }

    /// Measures `obs` with an explicit choice of the replaced row.
    pub fn measure_with_pivot(
        &mut self,
        obs: &Pauli,
        pivot: usize,
        outcome: Sign,
    ) -> Result<(Sign, MeasureKind), TableError> {
        self.check_observable(obs)?;
        if !self.rows.iter().any(|r| r.anticommutes(obs)) {
            return self.deterministic_outcome(obs, Some(outcome));
        }
        if !self.rows[pivot].anticommutes(obs) {
            return Err(TableError::BadPivot(pivot));
        }
        self.replace(obs, pivot, outcome);
        Ok((outcome, MeasureKind::Random { pivot }))
    }

    fn deterministic_outcome(
        &self,
        obs: &Pauli,
        forced: Option<Sign>,
    ) -> Result<(Sign, MeasureKind), TableError> {
        let contained = match self.contains(obs) {
            Membership::Yes => obs.sign(),
            Membership::YesNegated => -obs.sign(),
            Membership::No => {
                return Err(TableError::Invariant(format!(
                    "{obs} commutes with a maximal table but is not generated"
                )))
            }
        };
        // Outcome reported relative to the observable's own sign.
        let outcome = contained * obs.sign();
        if let Some(f) = forced {
            if f != outcome {
                return Err(TableError::ForcedContradiction {
                    forced: f,
                    contained: outcome,
                });
            }
        }
        Ok((outcome, MeasureKind::Deterministic))
    }

    fn replace(&mut self, obs: &Pauli, pivot: usize, outcome: Sign) {
        let removed = std::mem::replace(&mut self.rows[pivot], obs.times(outcome));
        self.tags[pivot] = RowTag::Replaced;
        for j in 0..self.rows.len() {
            if j != pivot && self.rows[j].anticommutes(obs) {
                self.rows[j].mul_assign_right(&removed);
                self.tags[j] = RowTag::Updated;
            }
        }
    }

    /// Decides whether `p` (with its sign) belongs to the group.
    pub fn contains(&self, p: &Pauli) -> Membership {
        match self.combination(p) {
            None => Membership::No,
            Some(sel) => {
                let mut acc = Pauli::identity(self.num_qubits());
                for i in sel.ones() {
                    acc.mul_assign_right(&self.rows[i]);
                }
                debug_assert!(acc.is_hermitian_signed());
                if acc.phase_exp() == p.phase_exp() {
                    Membership::Yes
                } else {
                    Membership::YesNegated
                }
            }
        }
    }

    /// Rows whose product has the same `(x, z)` as `p`, if any.
    pub fn combination(&self, p: &Pauli) -> Option<BitVec> {
        let m = BitMatrix::from_rows(
            2 * self.num_qubits(),
            self.rows.iter().map(|r| r.symplectic_vector()).collect(),
        );
        m.solve_left(&p.symplectic_vector())
    }

    /// Conjugates the state by the Pauli `e`: rows anticommuting with `e`
    /// change sign.
    pub fn apply_pauli(&mut self, e: &Pauli) {
        assert_eq!(e.num_qubits(), self.num_qubits());
        for r in &mut self.rows {
            if r.anticommutes(e) {
                *r = r.negate();
            }
        }
    }

    /// Replaces every row by `f(row)`; used for Clifford conjugation.
    pub fn map_rows<F: FnMut(&Pauli) -> Pauli>(&mut self, mut f: F) {
        for r in &mut self.rows {
            *r = f(r);
        }
    }

    /// `row[target] <- row[target] · row[source]`.
    pub fn multiply_row(&mut self, target: usize, source: usize) {
        assert_ne!(target, source);
        let s = self.rows[source].clone();
        self.rows[target].mul_assign_right(&s);
        self.tags[target] = RowTag::Updated;
    }

    pub fn set_tag(&mut self, row: usize, tag: RowTag) {
        self.tags[row] = tag;
    }

    /// Factors of the selected rows on the listed subsystems, after checking
    /// that each row is the identity elsewhere.
    pub fn restrict(&self, row_idx: &[usize], labels: &[&str]) -> Result<Vec<Pauli>, TableError> {
        let ranges: Vec<(usize, usize)> = labels
            .iter()
            .map(|l| self.subsystem_range(l))
            .collect::<Result<_, _>>()?;
        let mut inside = BitVec::zeros(self.num_qubits());
        for &(off, k) in &ranges {
            for q in off..off + k {
                inside.set(q, true);
            }
        }
        let mut out = Vec::with_capacity(row_idx.len());
        for &i in row_idx {
            let r = &self.rows[i];
            let support = r.x_bits().or(r.z_bits());
            if support.ones().any(|q| !inside.get(q)) {
                return Err(TableError::Straddles(i));
            }
            let mut acc: Option<Pauli> = None;
            for &(off, k) in &ranges {
                let part = r.slice(off, k).with_phase(0);
                acc = Some(match acc {
                    None => part,
                    Some(a) => a.tensor(&part),
                });
            }
            out.push(acc.expect("no subsystems").with_phase(r.phase_exp()));
        }
        Ok(out)
    }

    /// Indices of rows acting only on the listed subsystems.
    pub fn rows_supported_on(&self, labels: &[&str]) -> Result<Vec<usize>, TableError> {
        let mut idx = Vec::new();
        for i in 0..self.rows.len() {
            if self.restrict(&[i], labels).is_ok() {
                idx.push(i);
            }
        }
        Ok(idx)
    }

    /// Checks commutativity, independence and `±1` signs.
    pub fn check_invariants(&self) -> Result<(), TableError> {
        for (i, r) in self.rows.iter().enumerate() {
            if !r.is_hermitian_signed() {
                return Err(TableError::Invariant(format!("row {i} has phase ±i")));
            }
            for (j, s) in self.rows.iter().enumerate().skip(i + 1) {
                if r.anticommutes(s) {
                    return Err(TableError::Invariant(format!("rows {i} and {j} anticommute")));
                }
            }
        }
        let m = BitMatrix::from_rows(
            2 * self.num_qubits(),
            self.rows.iter().map(|r| r.symplectic_vector()).collect(),
        );
        if m.rank() != self.rows.len() {
            return Err(TableError::Invariant("rows are dependent".into()));
        }
        Ok(())
    }

    /// True when both tables generate the same signed group.
    pub fn same_group(&self, other: &StabilizerTable) -> bool {
        self.num_qubits() == other.num_qubits()
            && self.num_rows() == other.num_rows()
            && other.rows.iter().all(|r| self.contains(r) == Membership::Yes)
    }
}

fn parties(l: usize, n: usize) -> Vec<(String, usize)> {
    (0..l).map(|t| (party_label(t), n)).collect()
}

/// `A`, `B`, `C`, ... for `t = 0, 1, 2, ...`; `P<t>` beyond `Z`.
pub fn party_label(t: usize) -> String {
    if t < 26 {
        ((b'A' + t as u8) as char).to_string()
    } else {
        format!("P{t}")
    }
}

pub fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> Sign {
    Sign::from_negative(rng.gen::<bool>())
}

impl fmt::Display for StabilizerTable {
    /// `sign | X-components | Z-components | Pauli string`, subsystems
    /// separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let mut xs = String::new();
            let mut zs = String::new();
            let mut ps = String::new();
            let mut off = 0;
            for (i, (_, k)) in self.subsystems.iter().enumerate() {
                if i > 0 {
                    xs.push(' ');
                    zs.push(' ');
                    ps.push(' ');
                }
                for q in off..off + k {
                    xs.push(if r.x_bits().get(q) { '1' } else { '0' });
                    zs.push(if r.z_bits().get(q) { '1' } else { '0' });
                    ps.push(r.letter(q));
                }
                off += k;
            }
            writeln!(f, "{} | {xs} | {zs} | {ps}", r.sign())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::p;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn measure_z_on_bell_minus() {
        let mut t = StabilizerTable::bell(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (s, _) = t.measure(&p("ZI"), Some(Sign::Minus), &mut rng).unwrap();
        assert_eq!(s, Sign::Minus);
        assert_eq!(t.rows(), &[p("-ZI"), p("ZZ")]);
        assert_eq!(t.contains(&p("-IZ")), Membership::Yes);
    }

    #[test]
    fn measure_y_on_bell() {
        let mut t = StabilizerTable::bell(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        t.measure(&p("YI"), Some(Sign::Plus), &mut rng).unwrap();
        assert_eq!(t.contains(&p("YI")), Membership::Yes);
        assert_eq!(t.contains(&p("-IY")), Membership::Yes);
        t.check_invariants().unwrap();
    }

    #[test]
    fn measuring_a_row_is_deterministic() {
        let mut t = StabilizerTable::ghz(2, 3);
        let before = t.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = t.row(1).clone();
        let (s, k) = t.measure(&r, None, &mut rng).unwrap();
        assert_eq!((s, k), (Sign::Plus, MeasureKind::Deterministic));
        assert_eq!(t, before);
        assert!(matches!(
            t.measure(&r, Some(Sign::Minus), &mut rng),
            Err(TableError::ForcedContradiction { .. })
        ));
    }

    #[test]
    fn contains_signs() {
        let t = StabilizerTable::bell(1);
        assert_eq!(t.contains(&p("ZZ")), Membership::Yes);
        assert_eq!(t.contains(&p("-ZZ")), Membership::YesNegated);
        assert_eq!(t.contains(&p("-YY")), Membership::Yes);
        assert_eq!(t.contains(&p("ZI")), Membership::No);
    }

    #[test]
    fn ghz_two_parties_is_bell() {
        assert!(StabilizerTable::ghz(3, 2).same_group(&StabilizerTable::bell(3)));
    }

    #[test]
    fn restrict_rejects_straddling_rows() {
        let t = StabilizerTable::ghz(1, 3);
        assert_eq!(t.restrict(&[1], &["B", "C"]).unwrap(), vec![p("ZZ")]);
        assert_eq!(t.restrict(&[0], &["B", "C"]), Err(TableError::Straddles(0)));
    }
}
