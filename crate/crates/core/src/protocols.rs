//! Distillation protocols as Monte Carlo trial executors.
//!
//! Bell distillation and the CSS GHZ protocol (including its network
//! generalization) are simulated as residual bookkeeping: each recipient's
//! syndrome equals the syndrome of its channel error, so only the error,
//! the estimate and their product are tracked. The joint-decoding GHZ
//! protocol is simulated by replaying the full `3n`-qubit table alongside
//! an error-free reference that is forced onto the same outcomes.

use crate::bits::BitVec;
use crate::channels::Depolarizing;
use crate::clifford::{restoring_clifford, DiagonalClifford};
use crate::codes::{CodeError, CssCode, StabilizerCode};
use crate::decoders::{css_decode, DecodeStatus, MlDecoder, MsaConfig};
use crate::ghz_map::induced_bc;
use crate::logical::standard_form;
use crate::pauli::{Pauli, Sign};
use crate::tableau::{party_label, MeasureKind, StabilizerTable, TableError};
use rand::Rng;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Largest generator count accepted by the lookup decoder.
pub const ML_MAX_GENERATORS: usize = 24;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("no diagonal Clifford restores the generators of {0}")]
    InfeasibleClifford(String),
    #[error("lookup decoding of {name} needs {r} generators (limit {ML_MAX_GENERATORS}); use msa")]
    TooLargeForMl { name: String, r: usize },
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decoder {
    Ml,
    Msa(MsaConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Success,
    LogicalError,
    HeraldedFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FailureMetric {
    /// Every party's residual lies in its stabilizer group.
    #[default]
    Strict,
    /// The combined residual stabilizes the logical entangled state.
    GhzEquivalent,
}

impl FromStr for FailureMetric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strict" => Ok(FailureMetric::Strict),
            "ghz-equivalent" | "ghz_equivalent" | "equivalent" => Ok(FailureMetric::GhzEquivalent),
            _ => Err(format!("unknown failure metric {s:?}")),
        }
    }
}

impl fmt::Display for FailureMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureMetric::Strict => "strict",
            FailureMetric::GhzEquivalent => "ghz-equivalent",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub classification: Classification,
    pub per_party_status: Vec<(String, DecodeStatus)>,
    /// Logical classes `(u, w)` of residuals that were not stabilizers.
    pub residual_logical: Option<String>,
    /// Largest iteration count among the trial's decodes.
    pub iterations: usize,
}

/// One prepared protocol instance; trials only read it.
pub trait Protocol: Sync {
    fn trial(&self, rng: &mut rand_chacha::ChaCha8Rng) -> TrialOutcome;
    fn code_name(&self) -> &str;
    fn n(&self) -> usize;
    fn k(&self) -> usize;
}

/// Decoder bound to one code and channel parameter.
pub struct PreparedDecoder {
    inner: Prepared,
}

#[allow(clippy::large_enum_variant)]
enum Prepared {
    Ml {
        code: StabilizerCode,
        table: MlDecoder,
    },
    Msa {
        code: CssCode,
        cfg: MsaConfig,
        p: f64,
        /// `gen_rows[i]`: (is X-type, row in `hx` or `hz`) for generator `i`.
        gen_rows: Vec<(bool, usize)>,
    },
}

pub struct DecodeOutcome {
    pub estimate: Pauli,
    pub status: DecodeStatus,
    pub iterations: usize,
}

impl PreparedDecoder {
    /// Lookup decoder over all syndromes of `code`.
    pub fn ml(code: &StabilizerCode) -> Result<Self, ProtocolError> {
        let r = code.num_generators();
        if r > ML_MAX_GENERATORS {
            return Err(ProtocolError::TooLargeForMl {
                name: code.name.clone(),
                r,
            });
        }
        Ok(PreparedDecoder {
            inner: Prepared::Ml {
                table: MlDecoder::complete(code),
                code: code.clone(),
            },
        })
    }

    /// Min-sum decoder; `code` keeps its (possibly redundant) check rows.
    pub fn msa(code: &CssCode, cfg: MsaConfig, p: f64) -> Self {
        let mut gen_rows = Vec::with_capacity(code.code.num_generators());
        for g in &code.code.generators {
            let row = if g.z_bits().is_zero() {
                (true, code.hx.rows().iter().position(|r| r == g.x_bits()))
            } else {
                (false, code.hz.rows().iter().position(|r| r == g.z_bits()))
            };
            gen_rows.push((row.0, row.1.unwrap_or(usize::MAX)));
        }
        PreparedDecoder {
            inner: Prepared::Msa {
                code: code.clone(),
                cfg,
                p,
                gen_rows,
            },
        }
    }

    /// Prepares `decoder` for a code that may not be CSS.
    pub fn for_code(code: &StabilizerCode, decoder: Decoder, p: f64) -> Result<Self, ProtocolError> {
        match decoder {
            Decoder::Ml => Self::ml(code),
            Decoder::Msa(cfg) => Ok(Self::msa(&CssCode::from_stabilizer(code)?, cfg, p)),
        }
    }

    /// Prepares `decoder` for a CSS code, keeping redundant checks for min-sum.
    pub fn for_css(code: &CssCode, decoder: Decoder, p: f64) -> Result<Self, ProtocolError> {
        match decoder {
            Decoder::Ml => Self::ml(&code.code),
            Decoder::Msa(cfg) => Ok(Self::msa(code, cfg, p)),
        }
    }

    pub fn code(&self) -> &StabilizerCode {
        match &self.inner {
            Prepared::Ml { code, .. } => code,
            Prepared::Msa { code, .. } => &code.code,
        }
    }

    /// Decodes the syndrome produced by the error `e`.
    pub fn decode_error(&self, e: &Pauli) -> DecodeOutcome {
        match &self.inner {
            Prepared::Ml { code, table } => lookup(table, &code.syndrome(e)),
            Prepared::Msa { code, cfg, p, .. } => {
                let (sx, sz) = code.split_syndrome(e);
                msa(code, &sx, &sz, *p, *cfg)
            }
        }
    }

    /// Decodes a syndrome given per generator of [`Self::code`].
    pub fn decode_syndrome(&self, s: &BitVec) -> DecodeOutcome {
        match &self.inner {
            Prepared::Ml { table, .. } => lookup(table, s),
            Prepared::Msa { code, .. } if code.hx.num_rows() + code.hz.num_rows() != s.len() => {
                panic!("{} has redundant checks; decode from the error instead", code.name())
            }
            Prepared::Msa {
                code,
                cfg,
                p,
                gen_rows,
            } => {
                let mut sx = BitVec::zeros(code.hz.num_rows());
                let mut sz = BitVec::zeros(code.hx.num_rows());
                for (i, &(is_x, row)) in gen_rows.iter().enumerate() {
                    assert!(row != usize::MAX, "generator {i} is not a check row");
                    if s.get(i) {
                        if is_x {
                            sz.set(row, true);
                        } else {
                            sx.set(row, true);
                        }
                    }
                }
                msa(code, &sx, &sz, *p, *cfg)
            }
        }
    }
}

fn lookup(table: &MlDecoder, s: &BitVec) -> DecodeOutcome {
    match table.decode(s) {
        Some(estimate) => DecodeOutcome {
            estimate,
            status: DecodeStatus::Converged,
            iterations: 0,
        },
        None => DecodeOutcome {
            estimate: Pauli::identity(table.num_qubits()),
            status: DecodeStatus::HeraldedFailure,
            iterations: 0,
        },
    }
}

fn msa(code: &CssCode, sx: &BitVec, sz: &BitVec, p: f64, cfg: MsaConfig) -> DecodeOutcome {
    let r = css_decode(code, sx, sz, p, cfg);
    DecodeOutcome {
        estimate: r.estimate(),
        status: r.status,
        iterations: r.iterations,
    }
}

fn class_string(code: &StabilizerCode, r: &Pauli) -> String {
    match code.logical_class(r) {
        Ok((u, w)) => format!("u={u} w={w}"),
        Err(_) => "unknown".into(),
    }
}

fn require_logicals(code: &StabilizerCode) -> Result<(), ProtocolError> {
    code.logicals()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Bell pairs

/// `n` Bell pairs to `k`: only Bob's `n` qubits are noisy and only Bob decodes.
pub struct BellProtocol {
    decoder: PreparedDecoder,
    channel: Depolarizing,
}

impl BellProtocol {
    pub fn new(code: &crate::codes::bundle::Code, decoder: Decoder, p: f64) -> Result<Self, ProtocolError> {
        require_logicals(code.stabilizer())?;
        let decoder = match (decoder, code.css()) {
            (Decoder::Msa(_), Some(css)) => PreparedDecoder::for_css(css, decoder, p)?,
            _ => PreparedDecoder::for_code(code.stabilizer(), decoder, p)?,
        };
        Ok(BellProtocol {
            decoder,
            channel: Depolarizing::new(p),
        })
    }

    /// Classifies a given channel error on Bob's qubits.
    pub fn classify(&self, e: &Pauli) -> TrialOutcome {
        let code = self.decoder.code();
        let d = self.decoder.decode_error(e);
        let r = e * &d.estimate;
        let (classification, residual_logical) = if d.status == DecodeStatus::HeraldedFailure {
            (Classification::HeraldedFailure, None)
        } else if code.in_stabilizer_span(&r) {
            (Classification::Success, None)
        } else {
            (Classification::LogicalError, Some(class_string(code, &r)))
        };
        TrialOutcome {
            classification,
            per_party_status: vec![("B".into(), d.status)],
            residual_logical,
            iterations: d.iterations,
        }
    }
}

impl Protocol for BellProtocol {
    fn trial(&self, rng: &mut rand_chacha::ChaCha8Rng) -> TrialOutcome {
        let e = self.channel.sample(self.n(), rng);
        self.classify(&e)
    }
    fn code_name(&self) -> &str {
        &self.decoder.code().name
    }
    fn n(&self) -> usize {
        self.decoder.code().n
    }
    fn k(&self) -> usize {
        self.decoder.code().k
    }
}

/// Prepares and runs one Bell trial; campaigns should reuse [`BellProtocol`].
pub fn run_bell_trial<R: Rng + ?Sized>(
    code: &crate::codes::bundle::Code,
    decoder: Decoder,
    p: f64,
    rng: &mut R,
) -> Result<TrialOutcome, ProtocolError> {
    let proto = BellProtocol::new(code, decoder, p)?;
    let e = proto.channel.sample(proto.n(), rng);
    Ok(proto.classify(&e))
}

// ---------------------------------------------------------------------------
// ghz1: joint decoding of B and C by Bob

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    CliffordByAlice,
    CliffordByBob,
    None,
}

impl FromStr for Placement {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alice" | "clifford_by_alice" | "clifford-by-alice" => Ok(Placement::CliffordByAlice),
            "bob" | "clifford_by_bob" | "clifford-by-bob" => Ok(Placement::CliffordByBob),
            "none" => Ok(Placement::None),
            _ => Err(format!("unknown placement {s:?}")),
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::CliffordByAlice => "clifford_by_alice",
            Placement::CliffordByBob => "clifford_by_bob",
            Placement::None => "none",
        })
    }
}

/// Joint-decoding GHZ distillation. Alice measures the code on `A`, Bob decodes the induced
/// `[[2n, k]]` code on `B C` and measures the code on `B`, Charlie decodes
/// what remains on `C`.
pub struct Ghz1Protocol {
    name: String,
    n: usize,
    k: usize,
    /// Generators in block form: `r_z` purely Z-type rows first.
    gens: Vec<Pauli>,
    r_z: usize,
    placement: Placement,
    clifford: DiagonalClifford,
    /// Unsigned Bob observables on the 2n qubits of `B C`.
    bob_obs: Vec<Pauli>,
    bob: PreparedDecoder,
    /// Unsigned Charlie observables on `C`.
    charlie_obs: Vec<Pauli>,
    charlie: PreparedDecoder,
    metric: FailureMetric,
    channel: Depolarizing,
}

impl Ghz1Protocol {
    pub fn new(
        code: &StabilizerCode,
        decoder: Decoder,
        p: f64,
        placement: Placement,
        metric: FailureMetric,
    ) -> Result<Self, ProtocolError> {
        require_logicals(code)?;
        let n = code.n;
        let sf = standard_form(code);
        let gens = sf.rows;
        let r_z = sf.r_z;
        let clifford = if placement == Placement::None {
            DiagonalClifford::identity(n)
        } else {
            let mut targets: Vec<Pauli> = gens[r_z..].to_vec();
            let (_, lx) = code.logicals()?;
            targets.extend(lx.iter().cloned());
            match restoring_clifford(&targets) {
                Some(c) => c,
                None => restoring_clifford(&gens[r_z..])
                    .or_else(|| (r_z == gens.len()).then(|| DiagonalClifford::identity(n)))
                    .ok_or_else(|| ProtocolError::InfeasibleClifford(code.name.clone()))?,
            }
        };
        let alice_frame = placement == Placement::CliffordByAlice;
        let c_part = |g: &Pauli, restored: bool| {
            let b = if restored { g.z_bits().clone() } else { BitVec::zeros(n) };
            Pauli::from_xz(g.x_bits().clone(), b)
        };
        let mut bob_obs = Vec::with_capacity(2 * n);
        for (i, g) in gens.iter().enumerate() {
            let b_part = g.unsigned();
            let c = if i < r_z { Pauli::identity(n) } else { c_part(g, alice_frame) };
            bob_obs.push(b_part.tensor(&c));
        }
        bob_obs.extend(crate::ghz_map::companions_bc(n));
        let charlie_restored = placement != Placement::None;
        let charlie_obs: Vec<Pauli> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| if i < r_z { g.unsigned() } else { c_part(g, charlie_restored) })
            .collect();
        let bob_code = StabilizerCode::new(&format!("{}-bc", code.name), bob_obs.clone())?;
        let charlie_code = StabilizerCode::new(&format!("{}-c", code.name), charlie_obs.clone())?;
        Ok(Ghz1Protocol {
            name: code.name.clone(),
            n,
            k: code.k,
            gens,
            r_z,
            placement,
            clifford,
            bob: PreparedDecoder::for_code(&bob_code, decoder, p)?,
            bob_obs,
            charlie: PreparedDecoder::for_code(&charlie_code, decoder, p)?,
            charlie_obs,
            metric,
            channel: Depolarizing::new(p),
        })
    }

    pub fn clifford(&self) -> &DiagonalClifford {
        &self.clifford
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    fn conjugate_c(&self, t: &mut StabilizerTable) {
        let n = self.n;
        t.map_rows(|r| {
            let c = self.clifford.conjugate(&r.slice(2 * n, n).with_phase(0));
            let head = r.slice(0, 2 * n).with_phase(0);
            head.tensor(&c).with_phase((r.phase_exp() + c.phase_exp()) & 3)
        });
    }

    /// Runs one trial with the given channel errors on `B C` and on `C`.
    pub fn run_with_errors<R: Rng + ?Sized>(&self, e1: &Pauli, e2: &Pauli, rng: &mut R) -> TrialOutcome {
        let n = self.n;
        let total = 3 * n;
        let mut noisy = StabilizerTable::ghz(n, 3);
        let mut reference = noisy.clone();

        // Alice measures the code on A.
        let mut eps_a = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            let obs = g.embed(total, 0);
            let s = lockstep(&mut noisy, &mut reference, &obs, rng);
            eps_a.push(s);
        }
        if self.placement == Placement::CliffordByAlice {
            self.conjugate_c(&mut noisy);
            self.conjugate_c(&mut reference);
        }

        // Channel to Bob on B and C.
        noisy.apply_pauli(&e1.embed(total, n));

        // Bob: joint syndrome on B C.
        let mut synd = BitVec::zeros(self.bob_obs.len());
        for (i, obs) in self.bob_obs.iter().enumerate() {
            let expected = match self.gens.get(i) {
                Some(g) => induced_bc(g, eps_a[i]).sign,
                None => Sign::Plus,
            };
            let full = obs.embed(total, n);
            let got = deterministic(&mut noisy, &full);
            debug_assert_eq!(deterministic(&mut reference, &full), expected, "Bob row {i}");
            synd.set(i, got != expected);
        }
        let d1 = self.bob.decode_syndrome(&synd);
        noisy.apply_pauli(&d1.estimate.embed(total, n));
        let r1 = e1 * &d1.estimate;

        if self.placement == Placement::CliffordByBob {
            self.conjugate_c(&mut noisy);
            self.conjugate_c(&mut reference);
        }

        // Bob measures the non-Z-type generators on B.
        let mut eps_b = vec![Sign::Plus; self.gens.len()];
        for (i, g) in self.gens.iter().enumerate().skip(self.r_z) {
            eps_b[i] = lockstep(&mut noisy, &mut reference, &g.embed(total, n), rng);
        }

        // Channel to Charlie.
        noisy.apply_pauli(&e2.embed(total, 2 * n));

        let mut synd = BitVec::zeros(self.charlie_obs.len());
        for (i, obs) in self.charlie_obs.iter().enumerate() {
            let g = &self.gens[i];
            let expected = if i < self.r_z {
                g.sign() * eps_a[i]
            } else {
                (eps_a[i] * eps_b[i]).flip_if(g.x_bits().and_count(g.z_bits()) % 2 == 1)
            };
            let full = obs.embed(total, 2 * n);
            let got = deterministic(&mut noisy, &full);
            debug_assert_eq!(deterministic(&mut reference, &full), expected, "Charlie row {i}");
            synd.set(i, got != expected);
        }
        let d2 = self.charlie.decode_syndrome(&synd);
        noisy.apply_pauli(&d2.estimate.embed(total, 2 * n));
        let r2 = e2 * &d2.estimate;

        let per_party_status = vec![("B".into(), d1.status), ("C".into(), d2.status)];
        let iterations = d1.iterations.max(d2.iterations);
        if d1.status == DecodeStatus::HeraldedFailure || d2.status == DecodeStatus::HeraldedFailure {
            return TrialOutcome {
                classification: Classification::HeraldedFailure,
                per_party_status,
                residual_logical: None,
                iterations,
            };
        }
        let equivalent = noisy.rows() == reference.rows();
        let strict = self.bob.code().in_stabilizer_span(&r1) && self.charlie.code().in_stabilizer_span(&r2);
        debug_assert!(!strict || equivalent);
        let ok = match self.metric {
            FailureMetric::Strict => strict,
            FailureMetric::GhzEquivalent => equivalent,
        };
        TrialOutcome {
            classification: if ok {
                Classification::Success
            } else {
                Classification::LogicalError
            },
            per_party_status,
            residual_logical: (!ok).then(|| {
                format!(
                    "B C: {}; C: {}",
                    class_string(self.bob.code(), &r1),
                    class_string(self.charlie.code(), &r2)
                )
            }),
            iterations,
        }
    }
}

/// Measures on the noisy table and forces a random outcome in the
/// reference onto the same value.
fn lockstep<R: Rng + ?Sized>(
    noisy: &mut StabilizerTable,
    reference: &mut StabilizerTable,
    obs: &Pauli,
    rng: &mut R,
) -> Sign {
    let (s, kind) = noisy.measure(obs, None, rng).expect("valid observable");
    if let MeasureKind::Random { .. } = kind {
        reference.measure(obs, Some(s), rng).expect("same structure as the noisy table");
    }
    s
}

fn deterministic(t: &mut StabilizerTable, obs: &Pauli) -> Sign {
    let mut never = rand::rngs::mock::StepRng::new(0, 0);
    match t.measure(obs, None, &mut never).expect("valid observable") {
        (s, MeasureKind::Deterministic) => s,
        (_, MeasureKind::Random { .. }) => panic!("{obs} was expected to be fixed by the group"),
    }
}

impl Protocol for Ghz1Protocol {
    fn trial(&self, rng: &mut rand_chacha::ChaCha8Rng) -> TrialOutcome {
        let e1 = self.channel.sample(2 * self.n, rng);
        let e2 = self.channel.sample(self.n, rng);
        self.run_with_errors(&e1, &e2, rng)
    }
    fn code_name(&self) -> &str {
        &self.name
    }
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> usize {
        self.k
    }
}

/// Prepares and runs one ghz1 trial.
pub fn run_ghz1_trial(
    code: &StabilizerCode,
    decoder: Decoder,
    p: f64,
    placement: Placement,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<TrialOutcome, ProtocolError> {
    Ok(Ghz1Protocol::new(code, decoder, p, placement, FailureMetric::Strict)?.trial(rng))
}

// ---------------------------------------------------------------------------
// ghz2: separate decoding, and its network form

/// Spanning tree of the parties, rooted at party 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkTopology {
    parties: Vec<String>,
    parent: Vec<Option<usize>>,
}

impl NetworkTopology {
    /// `edges` are `(parent, child)` index pairs.
    pub fn new(parties: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, ProtocolError> {
        let l = parties.len();
        if l < 2 {
            return Err(ProtocolError::Topology("need at least two parties".into()));
        }
        if edges.len() != l - 1 {
            return Err(ProtocolError::Topology(format!(
                "{} edges for {l} parties; a tree has {}",
                edges.len(),
                l - 1
            )));
        }
        let mut parent = vec![None; l];
        for &(a, b) in edges {
            if a >= l || b >= l {
                return Err(ProtocolError::Topology(format!("edge ({a}, {b}) out of range")));
            }
            if b == 0 {
                return Err(ProtocolError::Topology("the root cannot be a child".into()));
            }
            if parent[b].replace(a).is_some() {
                return Err(ProtocolError::Topology(format!("{} has two parents", parties[b])));
            }
        }
        let t = NetworkTopology { parties, parent };
        for v in 1..l {
            t.path(v)?;
        }
        Ok(t)
    }

    pub fn star(l: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..l).map(|t| (0, t)).collect();
        Self::new((0..l).map(party_label).collect(), &edges).expect("star is a tree")
    }

    pub fn chain(l: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..l).map(|t| (t - 1, t)).collect();
        Self::new((0..l).map(party_label).collect(), &edges).expect("chain is a tree")
    }

    /// `star`, `chain`, or comma-separated edges such as `A-B,B-C,A-D`.
    pub fn parse(spec: &str, l: usize) -> Result<Self, ProtocolError> {
        match spec {
            "star" => Ok(Self::star(l)),
            "chain" => Ok(Self::chain(l)),
            _ => {
                let labels: Vec<String> = (0..l).map(party_label).collect();
                let idx = |s: &str| {
                    labels
                        .iter()
                        .position(|x| x == s.trim())
                        .ok_or_else(|| ProtocolError::Topology(format!("unknown party {s:?}")))
                };
                let mut edges = Vec::new();
                for e in spec.split(',') {
                    let (a, b) = e
                        .split_once('-')
                        .ok_or_else(|| ProtocolError::Topology(format!("bad edge {e:?}")))?;
                    edges.push((idx(a)?, idx(b)?));
                }
                Self::new(labels, &edges)
            }
        }
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn label(&self, t: usize) -> &str {
        &self.parties[t]
    }

    /// Edges `(parent, child)` from the root down to `v`.
    pub fn path(&self, v: usize) -> Result<Vec<(usize, usize)>, ProtocolError> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            out.push((p, cur));
            cur = p;
            if out.len() > self.parties.len() {
                return Err(ProtocolError::Topology("cycle".into()));
            }
        }
        if cur != 0 {
            return Err(ProtocolError::Topology(format!("{} is unreachable", self.parties[v])));
        }
        out.reverse();
        Ok(out)
    }
}

/// Separate-decoding GHZ distillation on a tree: every non-root party holds the code with known
/// signs before its qubits leave the root, picks up one independent
/// error per edge on the way, and decodes on arrival.
pub struct Ghz2Protocol {
    code: CssCode,
    decoder: PreparedDecoder,
    topology: NetworkTopology,
    hops: Vec<usize>,
    metric: FailureMetric,
    channel: Depolarizing,
}

impl Ghz2Protocol {
    pub fn new(
        code: &CssCode,
        decoder: Decoder,
        p: f64,
        topology: NetworkTopology,
        metric: FailureMetric,
    ) -> Result<Self, ProtocolError> {
        require_logicals(&code.code)?;
        let hops = (1..topology.num_parties())
            .map(|v| topology.path(v).map(|p| p.len()))
            .collect::<Result<_, _>>()?;
        Ok(Ghz2Protocol {
            decoder: PreparedDecoder::for_css(code, decoder, p)?,
            code: code.clone(),
            topology,
            hops,
            metric,
            channel: Depolarizing::new(p),
        })
    }

    pub fn topology(&self) -> &NetworkTopology {
        &self.topology
    }

    /// Classifies given accumulated errors, one per non-root party.
    pub fn classify(&self, errors: &[Pauli]) -> TrialOutcome {
        let code = &self.code.code;
        let mut per_party_status = Vec::with_capacity(errors.len());
        let mut iterations = 0;
        let mut heralded = false;
        let mut strict = true;
        let mut uniform_z = true;
        let mut w_sum = BitVec::zeros(code.k);
        let mut classes = Vec::new();
        for (t, e) in errors.iter().enumerate() {
            let d = self.decoder.decode_error(e);
            per_party_status.push((self.topology.label(t + 1).to_string(), d.status));
            iterations = iterations.max(d.iterations);
            if d.status == DecodeStatus::HeraldedFailure {
                heralded = true;
                continue;
            }
            let r = e * &d.estimate;
            if !code.in_stabilizer_span(&r) {
                strict = false;
                let (u, w) = code.logical_class(&r).expect("logicals present");
                uniform_z &= u.is_zero();
                w_sum.xor_assign(&w);
                classes.push(format!("{}: u={u} w={w}", self.topology.label(t + 1)));
            }
        }
        let classification = if heralded {
            Classification::HeraldedFailure
        } else {
            let ok = match self.metric {
                FailureMetric::Strict => strict,
                FailureMetric::GhzEquivalent => uniform_z && w_sum.is_zero(),
            };
            if ok {
                Classification::Success
            } else {
                Classification::LogicalError
            }
        };
        TrialOutcome {
            classification,
            per_party_status,
            residual_logical: (!classes.is_empty()).then(|| classes.join("; ")),
            iterations,
        }
    }
}

impl Protocol for Ghz2Protocol {
    fn trial(&self, rng: &mut rand_chacha::ChaCha8Rng) -> TrialOutcome {
        let n = self.code.n();
        let errors: Vec<Pauli> = self
            .hops
            .iter()
            .map(|&h| {
                let mut e = self.channel.sample(n, rng);
                for _ in 1..h {
                    e = &e * &self.channel.sample(n, rng);
                }
                e
            })
            .collect();
        self.classify(&errors)
    }
    fn code_name(&self) -> &str {
        self.code.name()
    }
    fn n(&self) -> usize {
        self.code.n()
    }
    fn k(&self) -> usize {
        self.code.k()
    }
}

/// Prepares and runs one three-party ghz2 trial.
pub fn run_ghz2_trial(
    code: &CssCode,
    decoder: Decoder,
    p: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<TrialOutcome, ProtocolError> {
    Ok(Ghz2Protocol::new(code, decoder, p, NetworkTopology::star(3), FailureMetric::Strict)?.trial(rng))
}

/// Prepares and runs one ghz2 trial on a network.
pub fn run_ghz2_multi(
    code: &CssCode,
    decoder: Decoder,
    p: f64,
    topology: NetworkTopology,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<TrialOutcome, ProtocolError> {
    Ok(Ghz2Protocol::new(code, decoder, p, topology, FailureMetric::Strict)?.trial(rng))
}

// ---------------------------------------------------------------------------
// Output state

/// Mixture `(1 - P_f) |GHZ_0⟩⟨GHZ_0| + Σ P_f / (8^k - 1) |GHZ_j⟩⟨GHZ_j|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputModel {
    pub ideal_weight: f64,
    pub corrupted_weight: f64,
    pub corrupted_terms: f64,
}

impl OutputModel {
    pub fn total_weight(&self) -> f64 {
        self.ideal_weight + self.corrupted_weight * self.corrupted_terms
    }
}

pub fn estimate_fidelity(failure_rate: f64, k: usize) -> (f64, OutputModel) {
    assert!((0.0..=1.0).contains(&failure_rate));
    let terms = 8f64.powi(k as i32) - 1.0;
    let model = OutputModel {
        ideal_weight: 1.0 - failure_rate,
        corrupted_weight: if terms > 0.0 { failure_rate / terms } else { 0.0 },
        corrupted_terms: terms,
    };
    (1.0 - failure_rate, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::trial_rng;
    use crate::codes::bundle::{load, Code};

    fn five() -> Code {
        load("five_qubit").unwrap()
    }

    #[test]
    fn bell_five_qubit_weight_one_and_logical() {
        let proto = BellProtocol::new(&five(), Decoder::Ml, 0.0).unwrap();
        for q in 0..5 {
            for l in ['X', 'Y', 'Z'] {
                let out = proto.classify(&Pauli::single(5, q, l));
                assert_eq!(out.classification, Classification::Success, "{l}{q}");
            }
        }
        let out = proto.classify(&crate::pauli::p("ZZZZZ"));
        assert_eq!(out.classification, Classification::LogicalError);
        assert!(out.residual_logical.is_some());
    }

    #[test]
    fn zero_noise_always_succeeds() {
        for name in ["bitflip3", "yy3", "five_qubit", "steane"] {
            let code = load(name).unwrap();
            let bell = BellProtocol::new(&code, Decoder::Ml, 0.0).unwrap();
            for placement in [Placement::CliffordByAlice, Placement::CliffordByBob, Placement::None] {
                let g1 = Ghz1Protocol::new(code.stabilizer(), Decoder::Ml, 0.0, placement, FailureMetric::Strict)
                    .unwrap();
                for t in 0..20 {
                    let mut rng = trial_rng(5, 0, t);
                    assert_eq!(g1.trial(&mut rng).classification, Classification::Success, "{name} {placement}");
                    assert_eq!(bell.trial(&mut rng).classification, Classification::Success);
                }
            }
        }
    }

    #[test]
    fn ghz1_single_errors_on_bc_are_corrected() {
        let code = five();
        let proto =
            Ghz1Protocol::new(code.stabilizer(), Decoder::Ml, 0.0, Placement::CliffordByBob, FailureMetric::Strict)
                .unwrap();
        let id10 = Pauli::identity(10);
        let id5 = Pauli::identity(5);
        for q in 0..10 {
            for l in ['X', 'Y', 'Z'] {
                let mut rng = trial_rng(9, q as u64, l as u64);
                let e1 = Pauli::single(10, q, l);
                let out = proto.run_with_errors(&e1, &id5, &mut rng);
                assert_eq!(out.classification, Classification::Success, "B C {l}{q}");
            }
        }
        for q in 0..5 {
            for l in ['X', 'Y', 'Z'] {
                let mut rng = trial_rng(9, 100 + q as u64, l as u64);
                let out = proto.run_with_errors(&id10, &Pauli::single(5, q, l), &mut rng);
                assert_eq!(out.classification, Classification::Success, "C {l}{q}");
            }
        }
    }

    #[test]
    fn ghz1_noisy_trials_keep_reference_consistent() {
        // Debug builds cross-check every expected sign against the reference.
        let code = five();
        for placement in [Placement::CliffordByAlice, Placement::CliffordByBob, Placement::None] {
            let proto =
                Ghz1Protocol::new(code.stabilizer(), Decoder::Ml, 0.2, placement, FailureMetric::GhzEquivalent)
                    .unwrap();
            for t in 0..50 {
                proto.trial(&mut trial_rng(11, 0, t));
            }
        }
    }

    #[test]
    fn ghz2_steane_single_b_errors() {
        let code = load("steane").unwrap().into_css().unwrap();
        let proto = Ghz2Protocol::new(&code, Decoder::Ml, 0.0, NetworkTopology::star(3), FailureMetric::Strict)
            .unwrap();
        let id = Pauli::identity(7);
        for q in 0..7 {
            for l in ['X', 'Y', 'Z'] {
                let out = proto.classify(&[Pauli::single(7, q, l), id.clone()]);
                assert_eq!(out.classification, Classification::Success);
            }
        }
    }

    #[test]
    fn ghz2_equivalent_metric_accepts_matched_logical_z() {
        let code = load("steane").unwrap().into_css().unwrap();
        let zbar = code.code.logicals().unwrap().0[0].clone();
        for (metric, expect) in [
            (FailureMetric::Strict, Classification::LogicalError),
            (FailureMetric::GhzEquivalent, Classification::Success),
        ] {
            let proto = Ghz2Protocol::new(&code, Decoder::Ml, 0.0, NetworkTopology::star(3), metric).unwrap();
            assert_eq!(proto.classify(&[zbar.clone(), zbar.clone()]).classification, expect);
            assert_eq!(
                proto.classify(&[zbar.clone(), Pauli::identity(7)]).classification,
                Classification::LogicalError
            );
        }
    }

    #[test]
    fn star_of_three_matches_ghz2() {
        let code = load("steane").unwrap().into_css().unwrap();
        let a = Ghz2Protocol::new(&code, Decoder::Ml, 0.05, NetworkTopology::star(3), FailureMetric::Strict).unwrap();
        for t in 0..200 {
            let mut r1 = trial_rng(1, 0, t);
            let mut r2 = trial_rng(1, 0, t);
            let x = a.trial(&mut r1);
            let y = run_ghz2_trial(&code, Decoder::Ml, 0.05, &mut r2).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn topology_validation() {
        assert!(NetworkTopology::parse("A-B,B-C,A-D", 4).is_ok());
        assert!(NetworkTopology::parse("A-B,B-C", 4).is_err());
        assert!(NetworkTopology::parse("A-B,C-D,D-C", 4).is_err());
        assert!(NetworkTopology::parse("B-A,A-C,A-D", 4).is_err());
        let chain = NetworkTopology::chain(4);
        assert_eq!(chain.path(3).unwrap(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn fidelity_model() {
        let (f, m) = estimate_fidelity(0.25, 1);
        assert_eq!(f, 0.75);
        assert_eq!(m.corrupted_terms, 7.0);
        assert!((m.corrupted_weight - 0.25 / 7.0).abs() < 1e-15);
        for (pf, k) in [(0.0, 1), (0.3, 2), (1.0, 5), (0.01, 80)] {
            assert!((estimate_fidelity(pf, k).1.total_weight() - 1.0).abs() < 1e-12);
        }
    }
}
