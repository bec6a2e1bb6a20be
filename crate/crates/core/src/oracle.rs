//! Dense state-vector reference for small instances.
//!
//! Qubit 0 is the most significant bit of the basis index, so the printed
//! left-to-right tensor order matches the index's binary expansion.

use crate::bits::BitVec;
use crate::clifford::DiagonalClifford;
use crate::codes::StabilizerCode;
use crate::ghz_map::{companions, induced_multi, BSplit};
use crate::pauli::{Pauli, Sign};
use crate::tableau::StabilizerTable;
use num_complex::Complex64;
use rand::Rng;
use std::fmt;

pub const MAX_QUBITS: usize = 16;

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Bit mask of `v` in basis-index order.
fn mask(v: &BitVec) -> usize {
    let n = v.len();
    v.ones().fold(0usize, |m, q| m | 1 << (n - 1 - q))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn basis(n: usize, index: usize) -> Self {
        assert!(n <= MAX_QUBITS, "dense oracle is capped at {MAX_QUBITS} qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Self {
        assert!(n <= MAX_QUBITS);
        assert_eq!(amps.len(), 1 << n);
        DenseState { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns false (and leaves the state) if the norm vanishes.
    pub fn normalize(&mut self) -> bool {
        let n = self.norm();
        if n < 1e-12 {
            return false;
        }
        for a in &mut self.amps {
            *a /= n;
        }
        true
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        self.inner(other).norm()
    }

    pub fn apply_pauli(&self, p: &Pauli) -> DenseState {
        assert_eq!(p.num_qubits(), self.n);
        let am = mask(p.x_bits());
        let bm = mask(p.z_bits());
        let base = p.phase_exp() as u32 + p.x_bits().and_count(p.z_bits()) as u32;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (y, a) in self.amps.iter().enumerate() {
            let k = base + 2 * ((bm & y).count_ones() % 2);
            out[y ^ am] += i_pow(k) * a;
        }
        DenseState {
            n: self.n,
            amps: out,
        }
    }

    /// `(I + P)/2 |ψ⟩`, unnormalized.
    pub fn project(&self, p: &Pauli) -> DenseState {
        let pp = self.apply_pauli(p);
        DenseState {
            n: self.n,
            amps: self
                .amps
                .iter()
                .zip(&pp.amps)
                .map(|(a, b)| (a + b) * 0.5)
                .collect(),
        }
    }

    /// Largest `‖Pψ - ψ‖` over `ops`.
    pub fn stabilizer_deviation(&self, ops: &[Pauli]) -> f64 {
        ops.iter()
            .map(|p| {
                let q = self.apply_pauli(p);
                q.amps
                    .iter()
                    .zip(&self.amps)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `U_R |ψ⟩` on the qubits `offset..offset+R.n`.
    pub fn apply_diagonal(&self, c: &DiagonalClifford, offset: usize) -> DenseState {
        let m = c.num_qubits();
        assert!(offset + m <= self.n);
        let r = c.matrix();
        let mut out = self.amps.clone();
        for (y, a) in out.iter_mut().enumerate() {
            let bit = |q: usize| (y >> (self.n - 1 - offset - q)) & 1 == 1;
            let mut k = 0u32;
            for i in 0..m {
                if !bit(i) {
                    continue;
                }
                for j in 0..m {
                    if bit(j) && r.get(i, j) {
                        k += 1;
                    }
                }
            }
            *a *= i_pow(k);
        }
        DenseState { n: self.n, amps: out }
    }

    /// `ℓ`-party GHZ register: qubits grouped by party, `n` per party.
    pub fn ghz(n: usize, l: usize) -> DenseState {
        let total = n * l;
        assert!(total <= MAX_QUBITS);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
        let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        for x in 0..1usize << n {
            let mut idx = 0;
            for _ in 0..l {
                idx = (idx << n) | x;
            }
            amps[idx] = amp;
        }
        DenseState { n: total, amps }
    }

    /// `n` Bell pairs `|Φ+⟩` with all `A` qubits first.
    pub fn bell(n: usize) -> DenseState {
        Self::ghz(n, 2)
    }
}

/// Applies `∏ (I + g)/2` to basis states until the result is nonzero.
pub fn state_from_table(table: &StabilizerTable) -> DenseState {
    state_from_rows(table.num_qubits(), table.rows())
}

pub fn state_from_rows(n: usize, rows: &[Pauli]) -> DenseState {
    assert!(n <= MAX_QUBITS);
    for start in 0..1usize << n {
        let mut s = DenseState::basis(n, start);
        for r in rows {
            s = s.project(r);
        }
        if s.normalize() {
            return s;
        }
    }
    unreachable!("a stabilizer group always has a nonzero code space")
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(dim);
        for a in &mut m.data {
            *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        m
    }

    pub fn of_pauli(p: &Pauli) -> Self {
        let n = p.num_qubits();
        let dim = 1 << n;
        let mut m = Self::zeros(dim);
        for col in 0..dim {
            let s = DenseState::basis(n, col).apply_pauli(p);
            for row in 0..dim {
                m.data[row * dim + col] = s.amps[row];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, other: &DenseMatrix, alpha: Complex64, beta: Complex64) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        DenseMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut t = self.transpose();
        for a in &mut t.data {
            *a = a.conj();
        }
        t
    }

    /// Maximum entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the matrix to the qubits `offset..offset+log2(dim)` of `s`.
    pub fn apply_on(&self, s: &DenseState, offset: usize) -> DenseState {
        let m = self.dim.trailing_zeros() as usize;
        assert_eq!(1 << m, self.dim);
        let n = s.n;
        assert!(offset + m <= n);
        let shift = n - offset - m;
        let sub = (self.dim - 1) << shift;
        let mut out = vec![Complex64::new(0.0, 0.0); s.amps.len()];
        for (y, a) in s.amps.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = (y & sub) >> shift;
            let rest = y & !sub;
            for row in 0..self.dim {
                out[rest | (row << shift)] += self.data[row * self.dim + col] * a;
            }
        }
        DenseState { n, amps: out }
    }
}

/// `Φ(M) = Σ M_xy |x...x⟩⟨y...y|` over `copies` subsystems.
pub fn ghz_map_dense(m: &DenseMatrix, copies: usize) -> DenseMatrix {
    let n = m.dim.trailing_zeros() as usize;
    let total = n * copies;
    assert!(total <= 12, "GHZ map image too large for the dense oracle");
    let rep = |x: usize| (0..copies).fold(0usize, |acc, _| (acc << n) | x);
    let mut out = DenseMatrix::zeros(1 << total);
    for x in 0..m.dim {
        for y in 0..m.dim {
            out.set(rep(x), rep(y), m.get(x, y));
        }
    }
    out
}

/// Outcome of an identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub kind: IdentityKind,
    pub instance: String,
    /// Size of the dense register the check ran on.
    pub qubits: usize,
    pub deviation: f64,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} [{}]: max deviation {:.3e}", self.kind, self.instance, self.deviation)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdentityKind {
    BellTranspose,
    GhzMap,
    Homomorphism,
    ThreeParty,
    MultiParty,
    CssBellPairs,
    Measurement,
    Clifford,
}

/// `(M ⊗ I)|Φ+_n⟩ = (I ⊗ M^T)|Φ+_n⟩`.
pub fn check_bell_transpose(m: &DenseMatrix) -> Report {
    let n = m.dim.trailing_zeros() as usize;
    let phi = DenseState::bell(n);
    let lhs = m.apply_on(&phi, 0);
    let rhs = m.transpose().apply_on(&phi, n);
    Report {
        kind: IdentityKind::BellTranspose,
        instance: format!("n={n}"),
        qubits: 2 * n,
        deviation: state_deviation(&lhs, &rhs),
    }
}

/// `(M ⊗ I)|GHZ⟩ = (I ⊗ Φ(M^T))|GHZ⟩` for `ℓ` parties.
pub fn check_ghz_identity(m: &DenseMatrix, l: usize) -> Report {
    let n = m.dim.trailing_zeros() as usize;
    let ghz = DenseState::ghz(n, l);
    let lhs = m.apply_on(&ghz, 0);
    let rhs = ghz_map_dense(&m.transpose(), l - 1).apply_on(&ghz, n);
    Report {
        kind: IdentityKind::GhzMap,
        instance: format!("n={n}, l={l}"),
        qubits: n * l,
        deviation: state_deviation(&lhs, &rhs),
    }
}

/// Linearity and multiplicativity of the GHZ map.
pub fn check_homomorphism(a: &DenseMatrix, b: &DenseMatrix, copies: usize) -> Report {
    let alpha = Complex64::new(0.3, -1.1);
    let beta = Complex64::new(-0.7, 0.4);
    let lin_l = ghz_map_dense(&a.add_scaled(b, alpha, beta), copies);
    let lin_r = ghz_map_dense(a, copies).add_scaled(&ghz_map_dense(b, copies), alpha, beta);
    let mul_l = ghz_map_dense(&a.mul(b), copies);
    let mul_r = ghz_map_dense(a, copies).mul(&ghz_map_dense(b, copies));
    Report {
        kind: IdentityKind::Homomorphism,
        instance: format!("dim={}, copies={copies}", a.dim),
        qubits: a.dim.trailing_zeros() as usize * copies,
        deviation: lin_l.max_deviation(&lin_r).max(mul_l.max_deviation(&mul_r)),
    }
}

/// Projects subsystem `A` of the `ℓ`-party GHZ register onto the outcome
/// `ε` of `stab` and measures how far the rest is from being stabilized by
/// the induced operator and the `Z Z` companions.
pub fn check_induced(stab: &Pauli, outcome: Sign, l: usize, split: Option<&BSplit>) -> Report {
    let n = stab.num_qubits();
    let ghz = DenseState::ghz(n, l);
    let obs = stab.times(outcome).embed(n * l, 0);
    let mut post = ghz.project(&obs);
    assert!(post.normalize(), "outcome has zero probability");
    let default = BSplit::first(stab.z_bits(), l - 1);
    let ind = induced_multi(stab, outcome, l, split.unwrap_or(&default)).expect("valid split");
    let mut ops = vec![ind.to_pauli().embed(n * l, n)];
    ops.extend(companions(n, l).iter().map(|c| c.embed(n * l, n)));
    Report {
        kind: if l == 3 {
            IdentityKind::ThreeParty
        } else {
            IdentityKind::MultiParty
        },
        instance: format!("{}{stab}, l={l}", outcome),
        qubits: n * l,
        deviation: post.stabilizer_deviation(&ops),
    }
}

/// For a CSS code with pure-X logical operators: projecting `A` of `n` Bell
/// pairs onto the code space gives `k` encoded Bell pairs.
pub fn check_css_bell_pairs(code: &StabilizerCode) -> Report {
    let n = code.n;
    let (_, lx) = code.logicals().expect("code needs logical operators");
    let mut s = DenseState::bell(n);
    for g in &code.generators {
        s = s.project(&g.embed(2 * n, 0));
    }
    assert!(s.normalize());
    // Σ_x |x̄⟩|x̄⟩ with |x̄⟩ ∝ Π_S X̄^x |0⟩.
    let mut target = DenseState::from_amplitudes(2 * n, vec![Complex64::new(0.0, 0.0); 1 << (2 * n)]);
    for x in 0..1usize << code.k {
        let mut v = DenseState::basis(n, 0);
        for (j, l) in lx.iter().enumerate() {
            if (x >> j) & 1 == 1 {
                v = v.apply_pauli(l);
            }
        }
        for g in &code.generators {
            v = v.project(g);
        }
        assert!(v.normalize());
        for (i, a) in v.amps.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in v.amps.iter().enumerate() {
                target.amps[(i << n) | j] += a * b;
            }
        }
    }
    assert!(target.normalize());
    Report {
        kind: IdentityKind::CssBellPairs,
        instance: code.name.clone(),
        qubits: 2 * n,
        deviation: 1.0 - s.fidelity(&target),
    }
}

/// Measures `obs` on `table` with the given outcome and compares the result
/// with the dense projector applied to the pre-measurement state.
pub fn check_measurement(table: &StabilizerTable, obs: &Pauli, outcome: Sign) -> Report {
    let before = state_from_table(table);
    let mut proj = before.project(&obs.times(outcome));
    let mut after = table.clone();
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    let deviation = match after.measure(obs, Some(outcome), &mut rng) {
        Ok(_) => {
            if proj.normalize() {
                let s = state_from_table(&after);
                (1.0 - s.fidelity(&proj)).abs() + after.check_invariants().map_or(1.0, |_| 0.0)
            } else {
                1.0
            }
        }
        // A forced outcome contradicting the group must have zero weight.
        Err(_) => proj.norm(),
    };
    Report {
        kind: IdentityKind::Measurement,
        instance: format!("{outcome}{obs} on {} rows", table.num_rows()),
        qubits: obs.num_qubits(),
        deviation,
    }
}

/// `U_R E U_R^†` densely versus the symbolic conjugation.
pub fn check_clifford(c: &DiagonalClifford, p: &Pauli) -> Report {
    let n = c.num_qubits();
    let mut u = DenseMatrix::zeros(1 << n);
    let id = DenseMatrix::identity(1 << n);
    for col in 0..1usize << n {
        let s = DenseState::basis(n, col).apply_diagonal(c, 0);
        for row in 0..1usize << n {
            u.set(row, col, s.amps[row]);
        }
    }
    let lhs = u.mul(&DenseMatrix::of_pauli(p)).mul(&u.adjoint());
    let rhs = DenseMatrix::of_pauli(&c.conjugate(p));
    Report {
        kind: IdentityKind::Clifford,
        instance: format!("R={:?}, {p}", c.matrix()),
        qubits: n,
        deviation: lhs.max_deviation(&rhs) + u.mul(&u.adjoint()).max_deviation(&id),
    }
}

/// Every identity family on fixed and seeded random instances of at most
/// 15 qubits.
pub fn standard_suite(seed: u64) -> Vec<Report> {
    use crate::bits::BitMatrix;
    use crate::codes::bundle;
    use crate::walkthrough;
    use rand::SeedableRng;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let random_pauli = |n: usize, rng: &mut rand_chacha::ChaCha8Rng| {
        let mut q = Pauli::identity(n);
        for i in 0..n {
            q.set_letter(i, ['I', 'X', 'Y', 'Z'][rng.gen_range(0..4)]);
        }
        if rng.gen() { q.negate() } else { q }
    };

    for n in 1..=4 {
        for _ in 0..3 {
            out.push(check_bell_transpose(&DenseMatrix::random(1 << n, &mut rng)));
        }
    }
    for (n, l) in [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 3), (3, 4)] {
        for _ in 0..2 {
            out.push(check_ghz_identity(&DenseMatrix::random(1 << n, &mut rng), l));
        }
    }
    for (n, copies) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
        let a = DenseMatrix::random(1 << n, &mut rng);
        let b = DenseMatrix::random(1 << n, &mut rng);
        out.push(check_homomorphism(&a, &b, copies));
    }

    // Three-party induced codes: every generator of the small codes.
    for name in ["bitflip3", "yy3", "five_qubit"] {
        let code = bundle::load(name).expect("bundled code");
        for g in &code.stabilizer().generators {
            for eps in [Sign::Plus, Sign::Minus] {
                out.push(check_induced(g, eps, 3, None));
            }
        }
    }
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let g = random_pauli(n, &mut rng);
        if g.is_identity() {
            continue;
        }
        out.push(check_induced(&g, Sign::from_negative(rng.gen()), 3, None));
    }
    // More parties, with random splits of the Z-part.
    for _ in 0..20 {
        let l = rng.gen_range(4..=5);
        let n = rng.gen_range(1..=(15 / l).min(3));
        let g = random_pauli(n, &mut rng);
        if g.is_identity() {
            continue;
        }
        let mut pieces = vec![BitVec::zeros(n); l - 1];
        for q in g.z_bits().ones() {
            let mut hits = 0;
            for piece in pieces.iter_mut() {
                if rng.gen() {
                    piece.flip(q);
                    hits += 1;
                }
            }
            if hits % 2 == 0 {
                pieces[0].flip(q);
            }
        }
        let split = BSplit { pieces };
        out.push(check_induced(&g, Sign::from_negative(rng.gen()), l, Some(&split)));
    }

    for name in ["bitflip3", "steane"] {
        let code = bundle::load(name).expect("bundled code");
        out.push(check_css_bell_pairs(code.stabilizer()));
    }

    // Measurements: both outcomes of random observables on protocol tables.
    let mut tables = vec![StabilizerTable::bell(3), StabilizerTable::ghz(2, 3), StabilizerTable::ghz(3, 4)];
    if let Ok(steps) = walkthrough::bell_five_qubit([Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus]) {
        tables.push(steps[4].clone());
    }
    if let Ok(steps) = walkthrough::ghz_yy3([Sign::Minus, Sign::Plus], [Sign::Plus, Sign::Minus]) {
        tables.extend(steps);
    }
    for t in &tables {
        for _ in 0..4 {
            let obs = random_pauli(t.num_qubits(), &mut rng).unsigned();
            if obs.is_identity() {
                continue;
            }
            for eps in [Sign::Plus, Sign::Minus] {
                out.push(check_measurement(t, &obs, eps));
            }
        }
    }

    for n in 1..=4 {
        for _ in 0..3 {
            let mut r = BitMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let b = rng.gen();
                    r.set(i, j, b);
                    r.set(j, i, b);
                }
            }
            let c = DiagonalClifford::new(r);
            out.push(check_clifford(&c, &random_pauli(n, &mut rng)));
        }
    }
    for name in ["yy3", "five_qubit"] {
        let code = bundle::load(name).expect("bundled code");
        if let Some(c) = crate::clifford::restoring_clifford(&code.stabilizer().generators) {
            for g in &code.stabilizer().generators {
                out.push(check_clifford(&c, g));
            }
        }
    }
    out
}

fn state_deviation(a: &DenseState, b: &DenseState) -> f64 {
    a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
