//! Word-packed bit vectors and GF(2) matrices.
//!
//! Bit `i` of a [`BitVec`] lives in word `i / 64` at position `i % 64`.
//! Index 0 is the leftmost tensor factor (qubit 1) everywhere in this crate.

use std::fmt;

const W: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(W)
}

/// Fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; other characters are skipped.
    pub fn from_str01(s: &str) -> Self {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| *c == '0' || *c == '1')
            .map(|c| c == '1')
            .collect();
        BitVec::from_bools(&bits)
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in idx {
            v.set(i, true);
        }
        v
    }

    /// Unit vector with a single one at position `i`.
    pub fn unit(len: usize, i: usize) -> Self {
        BitVec::from_indices(len, &[i])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % W);
        if b {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Integer inner product (number of positions where both are one).
    #[inline]
    pub fn and_count(&self, other: &BitVec) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (wi, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(wi * W + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * W + t)
                }
            })
        })
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut r = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            r.set(i, true);
        }
        for i in other.ones() {
            r.set(self.len + i, true);
        }
        r
    }

    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        let mut r = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                r.set(i, true);
            }
        }
        r
    }

    /// Writes `src` into positions `start..start + src.len()`.
    pub fn splice(&mut self, start: usize, src: &BitVec) {
        for i in 0..src.len {
            self.set(start + i, src.get(i));
        }
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Lexicographic comparison reading position 0 first.
    pub fn lex_cmp(&self, other: &BitVec) -> std::cmp::Ordering {
        for i in 0..self.len.min(other.len) {
            match (self.get(i), other.get(i)) {
                (false, true) => return std::cmp::Ordering::Less,
                (true, false) => return std::cmp::Ordering::Greater,
                _ => {}
            }
        }
        self.len.cmp(&other.len)
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Result of Gaussian elimination: the reduced matrix and its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: (0..rows).map(|_| BitVec::zeros(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        BitMatrix { cols, rows }
    }

    /// Builds a matrix from `0`/`1` strings, one per row.
    pub fn from_strs(rows: &[&str]) -> Self {
        let rows: Vec<BitVec> = rows.iter().map(|s| BitVec::from_str01(s)).collect();
        let cols = rows.first().map_or(0, |r| r.len());
        BitMatrix::from_rows(cols, rows)
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.rows[r].set(c, b)
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.rows[r]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.num_rows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(c) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.num_rows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.num_rows(), "dimension mismatch");
        let mut out = BitMatrix::zeros(self.num_rows(), other.cols);
        for (i, r) in self.rows.iter().enumerate() {
            let acc = out.row_mut(i);
            for k in r.ones() {
                acc.xor_assign(other.row(k));
            }
        }
        out
    }

    /// Computes `M v^T` as a bit vector of length `rows`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let mut out = BitVec::zeros(self.num_rows());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Computes `v M` (a combination of rows selected by `v`).
    pub fn left_mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(self.num_rows(), v.len(), "dimension mismatch");
        let mut out = BitVec::zeros(self.cols);
        for i in v.ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.num_rows(), other.num_rows());
        BitMatrix::from_rows(
            self.cols + other.cols,
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
        )
    }

    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BitMatrix::from_rows(self.cols, rows)
    }

    /// Kronecker product over GF(2).
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let (r1, c1) = (self.num_rows(), self.cols);
        let (r2, c2) = (other.num_rows(), other.cols);
        let mut out = BitMatrix::zeros(r1 * r2, c1 * c2);
        for i in 0..r1 {
            for j in self.rows[i].ones() {
                for k in 0..r2 {
                    for l in other.rows[k].ones() {
                        out.set(i * r2 + k, j * c2 + l, true);
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.num_rows() {
                break;
            }
            let Some(p) = (r..m.num_rows()).find(|&i| m.rows[i].get(c)) else {
                continue;
            };
            m.rows.swap(r, p);
            let pivot = m.rows[r].clone();
            for i in 0..m.num_rows() {
                if i != r && m.rows[i].get(c) {
                    m.rows[i].xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{x : M x^T = 0}`, one basis vector per free column.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let e = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, f);
            for (ri, &p) in e.pivots.iter().enumerate() {
                if e.reduced.get(ri, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `M x^T = rhs^T` for `x`; free variables are set to zero.
    pub fn solve_right(&self, rhs: &BitVec) -> Option<BitVec> {
        assert_eq!(rhs.len(), self.num_rows(), "rhs length mismatch");
        let aug = self.hstack(&BitMatrix::from_rows(
            1,
            (0..rhs.len())
                .map(|i| BitVec::from_bools(&[rhs.get(i)]))
                .collect(),
        ));
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        for (ri, &p) in e.pivots.iter().enumerate() {
            if e.reduced.get(ri, self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }

    /// Solves `x M = rhs` for `x` (expresses `rhs` as a row combination).
    pub fn solve_left(&self, rhs: &BitVec) -> Option<BitVec> {
        self.transpose().solve_right(rhs)
    }

    /// Inverse of a square matrix, if it is invertible.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.num_rows();
        assert_eq!(n, self.cols, "inverse of non-square matrix");
        let e = self.hstack(&BitMatrix::identity(n)).echelon();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(BitMatrix::from_rows(
            n,
            e.reduced.rows.iter().map(|r| r.slice(n, n)).collect(),
        ))
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.num_rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Incremental GF(2) basis with an explicit pivot record.
///
/// Each stored vector is reduced against the earlier ones, so membership
/// of a new vector is decided by a single forward sweep.
#[derive(Clone, Debug, Default)]
pub struct IncrementalBasis {
    vecs: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl IncrementalBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    /// Stored reduced vectors with their pivot positions, in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&BitVec, usize)> {
        self.vecs.iter().zip(self.pivots.iter().copied())
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (b, &p) in self.vecs.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(b);
            }
        }
        r
    }

    pub fn is_independent(&self, v: &BitVec) -> bool {
        !self.reduce(v).is_zero()
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                self.vecs.push(r);
                self.pivots.push(p);
                true
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, rng.gen_bool(0.5));
            }
        }
        m
    }

    #[test]
    fn index_zero_is_leftmost_character() {
        let v = BitVec::from_str01("100");
        assert!(v.get(0));
        assert!(!v.get(2));
        assert_eq!(v.to_string(), "100");
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let id = BitMatrix::identity(9);
        let rhs = BitVec::from_str01("101100111");
        assert_eq!(id.solve_right(&rhs).unwrap(), rhs);
    }

    #[test]
    fn zero_matrix_nonzero_rhs_has_no_solution() {
        let z = BitMatrix::zeros(4, 5);
        assert!(z.solve_right(&BitVec::from_str01("0100")).is_none());
    }

    #[test]
    fn random_systems_resubstitute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_matrix(&mut rng, 20, 30);
            let x0 = BitVec::from_bools(&(0..30).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let rhs = a.mul_vec(&x0);
            let x = a.solve_right(&rhs).expect("consistent system");
            assert_eq!(a.mul_vec(&x), rhs);
            let y = a.solve_left(&a.left_mul_vec(&BitVec::from_bools(
                &(0..20).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>(),
            )));
            assert!(y.is_some());
        }
    }

    #[test]
    fn nullspace_dimension_and_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let a = random_matrix(&mut rng, 12, 25);
            let ns = a.nullspace();
            assert_eq!(ns.len() + a.rank(), 25);
            for v in &ns {
                assert!(a.mul_vec(v).is_zero());
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut found = 0;
        while found < 10 {
            let a = random_matrix(&mut rng, 8, 8);
            if let Some(inv) = a.inverse() {
                assert_eq!(a.mul(&inv), BitMatrix::identity(8));
                found += 1;
            } else {
                assert!(a.rank() < 8);
            }
        }
    }

    #[test]
    fn kron_dimensions() {
        let a = BitMatrix::from_strs(&["11", "01"]);
        let b = BitMatrix::identity(3);
        let k = a.kron(&b);
        assert_eq!((k.num_rows(), k.num_cols()), (6, 6));
        assert_eq!(k.count_ones(), 9);
    }

    #[test]
    fn incremental_basis_matches_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 15, 10);
        let mut b = IncrementalBasis::new();
        for r in a.rows() {
            b.insert(r);
        }
        assert_eq!(b.len(), a.rank());
    }
}
