//! Signed Pauli operators in binary symplectic form.
//!
//! A [`Pauli`] stores `i^phase · E(a, b)` where `E(a, b) = i^{a·b} X^a Z^b`
//! is Hermitian for every `(a, b)`. The `Y` letter in printed strings is
//! `E(1, 1)`, so a string such as `-XYZ` always denotes a Hermitian operator.

use crate::bits::BitVec;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cannot parse Pauli string {0:?}: {1}")]
    Parse(String, &'static str),
}

/// A `±1` eigenvalue, measurement outcome or stabilizer sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_negative(neg: bool) -> Sign {
        if neg {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    /// Phase exponent `0` or `2`.
    #[inline]
    pub fn phase(self) -> u8 {
        if self.is_minus() {
            2
        } else {
            0
        }
    }

    pub fn value(self) -> i8 {
        if self.is_minus() {
            -1
        } else {
            1
        }
    }

    #[inline]
    pub fn flip_if(self, cond: bool) -> Sign {
        if cond {
            -self
        } else {
            self
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_negative(self.is_minus() != rhs.is_minus())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_minus() { "-" } else { "+" })
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pauli {
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        Pauli {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    /// `i^phase · E(x, z)`.
    pub fn new(x: BitVec, z: BitVec, phase: u8) -> Self {
        assert_eq!(x.len(), z.len(), "x and z components differ in length");
        Pauli {
            x,
            z,
            phase: phase & 3,
        }
    }

    /// `+E(x, z)`.
    pub fn from_xz(x: BitVec, z: BitVec) -> Self {
        Pauli::new(x, z, 0)
    }

    /// `sign · E(x, z)` with `negative` selecting the minus sign.
    pub fn signed(x: BitVec, z: BitVec, negative: bool) -> Self {
        Pauli::new(x, z, if negative { 2 } else { 0 })
    }

    /// Single-qubit operator `letter` on qubit `q` of `n`.
    pub fn single(n: usize, q: usize, letter: char) -> Self {
        let mut p = Pauli::identity(n);
        p.set_letter(q, letter);
        p
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn is_hermitian_signed(&self) -> bool {
        self.phase & 1 == 0
    }

    /// True when the sign is `-1`. Panics for `±i` phases.
    #[inline]
    pub fn is_negative(&self) -> bool {
        assert!(self.is_hermitian_signed(), "operator has phase ±i");
        self.phase == 2
    }

    /// Sign of a Hermitian-signed operator. Panics for `±i` phases.
    pub fn sign(&self) -> Sign {
        Sign::from_negative(self.is_negative())
    }

    /// Multiplies the operator by `s`.
    pub fn times(&self, s: Sign) -> Pauli {
        let mut p = self.clone();
        p.phase = (p.phase + s.phase()) & 3;
        p
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    pub fn set_letter(&mut self, q: usize, letter: char) {
        let (x, z) = match letter {
            'I' => (false, false),
            'X' => (true, false),
            'Z' => (false, true),
            'Y' => (true, true),
            _ => panic!("invalid Pauli letter {letter:?}"),
        };
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// Same operator with the sign forced to `+1`.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    pub fn negate(&self) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + 2) & 3;
        p
    }

    pub fn multiply(&self, other: &Pauli) -> Result<Pauli, PauliError> {
        if self.num_qubits() != other.num_qubits() {
            return Err(PauliError::LengthMismatch(
                self.num_qubits(),
                other.num_qubits(),
            ));
        }
        // E(a,b)E(c,d) = i^{a.b + c.d + 2 b.c - (a^c).(b^d)} E(a^c, b^d),
        // with integer (not mod 2) inner products.
        let (a, b, c, d) = (&self.x, &self.z, &other.x, &other.z);
        let nx = a.xor(c);
        let nz = b.xor(d);
        let ab = a.and_count(b);
        let cd = c.and_count(d);
        let bc = b.and_count(c);
        let nn = nx.and_count(&nz);
        let k = (self.phase as usize + other.phase as usize + ab + cd + 2 * bc + 3 * nn) % 4;
        Ok(Pauli {
            x: nx,
            z: nz,
            phase: k as u8,
        })
    }

    /// In-place multiplication `self <- self · other`.
    pub fn mul_assign_right(&mut self, other: &Pauli) {
        *self = self.multiply(other).expect("qubit count mismatch");
    }

    /// Symplectic inner product `a·d + b·c (mod 2)`; false iff commuting.
    pub fn symplectic_inner(&self, other: &Pauli) -> Result<bool, PauliError> {
        if self.num_qubits() != other.num_qubits() {
            return Err(PauliError::LengthMismatch(
                self.num_qubits(),
                other.num_qubits(),
            ));
        }
        Ok(self.anticommutes(other))
    }

    /// Unchecked symplectic inner product for hot loops.
    #[inline]
    pub fn anticommutes(&self, other: &Pauli) -> bool {
        let (a, b) = (self.x.words(), self.z.words());
        let (c, d) = (other.x.words(), other.z.words());
        let mut acc = 0u64;
        for i in 0..a.len() {
            acc ^= (a[i] & d[i]) ^ (b[i] & c[i]);
        }
        acc.count_ones() & 1 == 1
    }

    #[inline]
    pub fn commutes(&self, other: &Pauli) -> bool {
        !self.anticommutes(other)
    }

    /// Matrix transpose: `E(a,b)^T = (-1)^{a·b} E(a,b)`.
    pub fn transpose(&self) -> Pauli {
        let mut p = self.clone();
        if self.x.dot(&self.z) {
            p.phase = (p.phase + 2) & 3;
        }
        p
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Pauli) -> Pauli {
        Pauli {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
            phase: (self.phase + other.phase) & 3,
        }
    }

    /// Places `self` at qubit offset `offset` inside an `n`-qubit register.
    pub fn embed(&self, n: usize, offset: usize) -> Pauli {
        assert!(offset + self.num_qubits() <= n, "embedding out of range");
        let mut x = BitVec::zeros(n);
        let mut z = BitVec::zeros(n);
        x.splice(offset, &self.x);
        z.splice(offset, &self.z);
        Pauli {
            x,
            z,
            phase: self.phase,
        }
    }

    /// The factor on qubits `offset..offset+len`, carrying the full phase.
    pub fn slice(&self, offset: usize, len: usize) -> Pauli {
        Pauli {
            x: self.x.slice(offset, len),
            z: self.z.slice(offset, len),
            phase: self.phase,
        }
    }

    /// True when the operator acts trivially outside `offset..offset+len`.
    pub fn supported_within(&self, offset: usize, len: usize) -> bool {
        self.x
            .or(&self.z)
            .ones()
            .all(|q| q >= offset && q < offset + len)
    }

    /// Concatenated `(x | z)` vector of length `2n`.
    pub fn symplectic_vector(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    /// Bit-flip pattern `x` and phase-flip pattern `z` as a key ordered by
    /// `(weight, x, z)` with lexicographic bit comparison.
    pub fn order_key_cmp(&self, other: &Pauli) -> std::cmp::Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.x.lex_cmp(&other.x))
            .then_with(|| self.z.lex_cmp(&other.z))
    }
}

impl std::ops::Mul for &Pauli {
    type Output = Pauli;
    fn mul(self, rhs: &Pauli) -> Pauli {
        self.multiply(rhs).expect("qubit count mismatch")
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for Pauli {
    type Err = PauliError;

    /// Accepts an optional `+`, `-`, `+i`, `-i` or `i` prefix and letters `IXYZ`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1, r)
        } else {
            (0, t)
        };
        if rest.is_empty() {
            return Err(PauliError::Parse(s.to_string(), "no qubits"));
        }
        let mut p = Pauli::identity(rest.chars().count());
        for (q, c) in rest.chars().enumerate() {
            match c {
                'I' | 'X' | 'Y' | 'Z' => p.set_letter(q, c),
                _ => return Err(PauliError::Parse(s.to_string(), "invalid letter")),
            }
        }
        p.phase = phase;
        Ok(p)
    }
}

/// Parses a Pauli string, panicking on malformed input. Intended for literals.
pub fn p(s: &str) -> Pauli {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_times_z_is_minus_i_y() {
        let r = &p("X") * &p("Z");
        assert_eq!(r.phase_exp(), 3);
        assert_eq!(r.letter(0), 'Y');
    }

    #[test]
    fn identity_is_neutral() {
        let q = p("-XYZI");
        assert_eq!(&q * &Pauli::identity(4), q);
        assert_eq!(&Pauli::identity(4) * &q, q);
    }

    #[test]
    fn zz_squares_to_identity() {
        let r = &p("ZZ") * &p("ZZ");
        assert!(r.is_identity());
        assert_eq!(r.phase_exp(), 0);
    }

    #[test]
    fn transpose_flips_y() {
        assert_eq!(p("Y").transpose(), p("-Y"));
        assert_eq!(p("X").transpose(), p("X"));
        assert_eq!(p("XZY").transpose(), p("-XZY"));
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("XX").symplectic_inner(&p("ZZ")).unwrap());
        assert!(p("X").symplectic_inner(&p("Z")).unwrap());
        assert!(p("X").multiply(&p("ZZ")).is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["+XZZXI", "-YIZZI", "+iXY", "-iZ"] {
            assert_eq!(p(s).to_string(), s);
        }
    }
}
