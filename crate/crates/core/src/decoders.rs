//! Syndrome decoders: normalized min-sum on Tanner graphs and an exhaustive
//! minimum-weight lookup table for small stabilizer codes.

use crate::bits::BitVec;
use crate::codes::{CssCode, StabilizerCode, TannerGraph};
use crate::pauli::Pauli;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::str::FromStr;

const CLIP: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Checks updated one at a time in row order; variables absorb each
    /// new message immediately.
    Sequential,
    /// All checks from the previous posteriors, then all variables.
    Flooding,
}

impl FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sequential" | "layered" | "serial" => Ok(Schedule::Sequential),
            "flooding" => Ok(Schedule::Flooding),
            _ => Err(format!("unknown schedule {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MsaConfig {
    pub normalization: f64,
    pub max_iters: usize,
    pub schedule: Schedule,
    /// Per-bit error probability used for the channel log-ratio.
    pub prior: f64,
}

impl Default for MsaConfig {
    fn default() -> Self {
        MsaConfig {
            normalization: 0.8,
            max_iters: 100,
            schedule: Schedule::Sequential,
            prior: 0.05,
        }
    }
}

impl MsaConfig {
    pub fn with_prior(mut self, q: f64) -> Self {
        self.prior = q;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Converged,
    HeraldedFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub estimate: BitVec,
    pub status: DecodeStatus,
    pub iterations: usize,
}

fn llr(q: f64) -> f64 {
    ((1.0 - q) / q).ln().clamp(-CLIP, CLIP)
}

/// Min-sum decoder with reusable message buffers.
pub struct MinSum<'g> {
    graph: &'g TannerGraph,
    cfg: MsaConfig,
    c2v: Vec<f64>,
    v2c: Vec<f64>,
    post: Vec<f64>,
}

impl<'g> MinSum<'g> {
    pub fn new(graph: &'g TannerGraph, cfg: MsaConfig) -> Self {
        assert!(cfg.normalization > 0.0 && cfg.normalization <= 1.0);
        assert!(cfg.max_iters >= 1);
        MinSum {
            graph,
            cfg,
            c2v: vec![0.0; graph.num_edges()],
            v2c: vec![0.0; graph.num_edges()],
            post: vec![0.0; graph.num_vars()],
        }
    }

    pub fn decode(&mut self, syndrome: &BitVec) -> DecodeResult {
        let g = self.graph;
        assert_eq!(syndrome.len(), g.num_checks(), "syndrome length mismatch");
        let nv = g.num_vars();
        if syndrome.is_zero() {
            return DecodeResult {
                estimate: BitVec::zeros(nv),
                status: DecodeStatus::Converged,
                iterations: 0,
            };
        }
        let l0 = llr(self.cfg.prior);
        self.post.iter_mut().for_each(|x| *x = l0);
        self.c2v.iter_mut().for_each(|x| *x = 0.0);
        let mut est = BitVec::zeros(nv);
        for it in 1..=self.cfg.max_iters {
            match self.cfg.schedule {
                Schedule::Sequential => self.sweep_layered(syndrome),
                Schedule::Flooding => self.sweep_flooding(syndrome, l0),
            }
            est = BitVec::from_bools(&self.post.iter().map(|&l| l < 0.0).collect::<Vec<_>>());
            if &g.syndrome(&est) == syndrome {
                return DecodeResult {
                    estimate: est,
                    status: DecodeStatus::Converged,
                    iterations: it,
                };
            }
        }
        DecodeResult {
            estimate: est,
            status: DecodeStatus::HeraldedFailure,
            iterations: self.cfg.max_iters,
        }
    }

    /// Writes normalized min-sum outputs for the edges of check `c` from the
    /// incoming messages already stored in `v2c`.
    fn check_update(&mut self, c: usize, flip: bool) {
        let range = self.graph.check_edges(c);
        let mut min1 = f64::INFINITY;
        let mut min2 = f64::INFINITY;
        let mut arg = usize::MAX;
        let mut neg = flip;
        for e in range.clone() {
            let q = self.v2c[e];
            neg ^= q < 0.0;
            let m = q.abs();
            if m < min1 {
                min2 = min1;
                min1 = m;
                arg = e;
            } else if m < min2 {
                min2 = m;
            }
        }
        let alpha = self.cfg.normalization;
        for e in range {
            let q = self.v2c[e];
            let mag = if e == arg { min2 } else { min1 };
            let s = neg ^ (q < 0.0);
            let r = alpha * mag.min(CLIP);
            self.c2v[e] = if s { -r } else { r };
        }
    }

    fn sweep_layered(&mut self, syndrome: &BitVec) {
        let g = self.graph;
        for c in 0..g.num_checks() {
            for e in g.check_edges(c) {
                let v = g.edge_var(e);
                self.v2c[e] = (self.post[v] - self.c2v[e]).clamp(-CLIP, CLIP);
            }
            self.check_update(c, syndrome.get(c));
            for e in g.check_edges(c) {
                let v = g.edge_var(e);
                self.post[v] = (self.v2c[e] + self.c2v[e]).clamp(-CLIP, CLIP);
            }
        }
    }

    fn sweep_flooding(&mut self, syndrome: &BitVec, l0: f64) {
        let g = self.graph;
        for e in 0..g.num_edges() {
            let v = g.edge_var(e);
            self.v2c[e] = (self.post[v] - self.c2v[e]).clamp(-CLIP, CLIP);
        }
        for c in 0..g.num_checks() {
            self.check_update(c, syndrome.get(c));
        }
        for v in 0..g.num_vars() {
            let s: f64 = g.var_edges(v).iter().map(|&e| self.c2v[e]).sum();
            self.post[v] = (l0 + s).clamp(-CLIP, CLIP);
        }
    }
}

/// One-shot min-sum decode.
pub fn msa_decode(graph: &TannerGraph, syndrome: &BitVec, cfg: MsaConfig) -> DecodeResult {
    MinSum::new(graph, cfg).decode(syndrome)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssDecodeResult {
    pub x_estimate: BitVec,
    pub z_estimate: BitVec,
    pub status: DecodeStatus,
    pub iterations: usize,
}

impl CssDecodeResult {
    pub fn estimate(&self) -> Pauli {
        Pauli::from_xz(self.x_estimate.clone(), self.z_estimate.clone())
    }
}

/// Decodes X-type errors on `H_Z`'s graph and Z-type errors on `H_X`'s,
/// each with prior `2p/3`. `synd_x` is `H_Z x^T`, `synd_z` is `H_X z^T`.
pub fn css_decode(
    code: &CssCode,
    synd_x: &BitVec,
    synd_z: &BitVec,
    p: f64,
    cfg: MsaConfig,
) -> CssDecodeResult {
    let cfg = cfg.with_prior(2.0 * p / 3.0);
    let rx = msa_decode(&code.graph_z, synd_x, cfg);
    let rz = msa_decode(&code.graph_x, synd_z, cfg);
    let status = if rx.status == DecodeStatus::Converged && rz.status == DecodeStatus::Converged {
        DecodeStatus::Converged
    } else {
        DecodeStatus::HeraldedFailure
    };
    CssDecodeResult {
        x_estimate: rx.estimate,
        z_estimate: rz.estimate,
        status,
        iterations: rx.iterations.max(rz.iterations),
    }
}

/// `(weight, x, z)` order with bit 0 compared first.
fn ml_order(a: &Pauli, b: &Pauli) -> Ordering {
    a.weight()
        .cmp(&b.weight())
        .then_with(|| a.x_bits().lex_cmp(b.x_bits()))
        .then_with(|| a.z_bits().lex_cmp(b.z_bits()))
}

/// Minimum-weight error per syndrome, precomputed by enumeration.
#[derive(Clone, Debug)]
pub struct MlDecoder {
    n: usize,
    r: usize,
    table: HashMap<u64, Pauli>,
    complete: bool,
}

impl MlDecoder {
    /// Enumerates all errors of weight at most `max_weight`.
    pub fn new(code: &StabilizerCode, max_weight: usize) -> Self {
        Self::build(code, Some(max_weight))
    }

    /// Raises the weight until every syndrome has a representative.
    pub fn complete(code: &StabilizerCode) -> Self {
        Self::build(code, None)
    }

    fn build(code: &StabilizerCode, max_weight: Option<usize>) -> Self {
        let n = code.n;
        let r = code.num_generators();
        assert!(r < 64, "lookup decoding needs fewer than 64 generators");
        let letters = ['X', 'Y', 'Z'];
        let single: Vec<[u64; 3]> = (0..n)
            .map(|q| {
                let mut s = [0u64; 3];
                for (li, l) in letters.iter().enumerate() {
                    let e = Pauli::single(n, q, *l);
                    for (gi, g) in code.generators.iter().enumerate() {
                        if g.anticommutes(&e) {
                            s[li] |= 1 << gi;
                        }
                    }
                }
                s
            })
            .collect();
        let full = 1u64 << r;
        let mut table: HashMap<u64, Pauli> = HashMap::new();
        table.insert(0, Pauli::identity(n));
        let limit = max_weight.unwrap_or(n).min(n);
        for w in 1..=limit {
            if max_weight.is_none() && table.len() as u64 == full {
                break;
            }
            let mut best: HashMap<u64, Pauli> = HashMap::new();
            for_each_combination(n, w, |support| {
                let mut choice = vec![0usize; w];
                loop {
                    let mut s = 0u64;
                    for (i, &q) in support.iter().enumerate() {
                        s ^= single[q][choice[i]];
                    }
                    if !table.contains_key(&s) {
                        let mut e = Pauli::identity(n);
                        for (i, &q) in support.iter().enumerate() {
                            e.set_letter(q, letters[choice[i]]);
                        }
                        match best.get(&s) {
                            Some(cur) if ml_order(cur, &e) != Ordering::Greater => {}
                            _ => {
                                best.insert(s, e);
                            }
                        }
                    }
                    let mut i = 0;
                    while i < w {
                        choice[i] += 1;
                        if choice[i] < 3 {
                            break;
                        }
                        choice[i] = 0;
                        i += 1;
                    }
                    if i == w {
                        break;
                    }
                }
            });
            table.extend(best);
        }
        let complete = table.len() as u64 == full;
        MlDecoder { n, r, table, complete }
    }

    /// True when every syndrome has a representative.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn decode(&self, syndrome: &BitVec) -> Option<Pauli> {
        assert_eq!(syndrome.len(), self.r, "syndrome length mismatch");
        let mut key = 0u64;
        for i in syndrome.ones() {
            key |= 1 << i;
        }
        self.table.get(&key).cloned()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }
}

/// One-shot minimum-weight decode.
pub fn ml_decode(code: &StabilizerCode, syndrome: &BitVec, max_weight: usize) -> Option<Pauli> {
    MlDecoder::new(code, max_weight).decode(syndrome)
}

/// Calls `f` on every `w`-subset of `0..n` in lexicographic order.
fn for_each_combination<F: FnMut(&[usize])>(n: usize, w: usize, mut f: F) {
    if w > n {
        return;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        f(&idx);
        let mut i = w;
        let found = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if idx[i] < n - w + i {
                break true;
            }
        };
        if !found {
            return;
        }
        idx[i] += 1;
        for j in i + 1..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitMatrix;
    use crate::pauli::p;

    fn hamming() -> BitMatrix {
        BitMatrix::from_strs(&["1010101", "0110011", "0001111"])
    }

    #[test]
    fn zero_syndrome_costs_nothing() {
        let g = TannerGraph::new(&hamming());
        let r = msa_decode(&g, &BitVec::zeros(3), MsaConfig::default());
        assert_eq!(r.iterations, 0);
        assert!(r.estimate.is_zero());
        assert_eq!(r.status, DecodeStatus::Converged);
    }

    #[test]
    fn hamming_single_bit_errors() {
        let h = hamming();
        let g = TannerGraph::new(&h);
        for q in 0..7 {
            let e = BitVec::unit(7, q);
            let r = msa_decode(&g, &h.mul_vec(&e), MsaConfig::default());
            assert_eq!(r.status, DecodeStatus::Converged, "bit {q}");
            assert_eq!(r.estimate, e, "bit {q}");
        }
    }

    #[test]
    fn flooding_output_matches_syndrome_when_converged() {
        let h = hamming();
        let g = TannerGraph::new(&h);
        let cfg = MsaConfig {
            schedule: Schedule::Flooding,
            ..MsaConfig::default()
        };
        for q in 0..7 {
            let s = h.mul_vec(&BitVec::unit(7, q));
            let r = msa_decode(&g, &s, cfg);
            if r.status == DecodeStatus::Converged {
                assert_eq!(h.mul_vec(&r.estimate), s);
            }
        }
        // The degree-3 bit is overshadowed by its neighbours in the first
        // flooding pass and decodes to a weight-4 pattern.
        let r = msa_decode(&g, &h.mul_vec(&BitVec::unit(7, 6)), cfg);
        assert_eq!(r.estimate, BitVec::from_str01("0010111"));
    }

    #[test]
    fn beyond_the_radius_some_pattern_heralds() {
        let code = crate::codes::bundle::load("toric3").unwrap();
        let css = code.css().unwrap();
        let g = &css.graph_z;
        let n = g.num_vars();
        let cfg = MsaConfig::default().with_prior(0.05);
        let mut heralded = 0;
        for i in 0..n {
            for j in i + 1..n {
                let e = BitVec::from_indices(n, &[i, j]);
                let r = msa_decode(g, &g.syndrome(&e), cfg);
                match r.status {
                    DecodeStatus::Converged => assert_eq!(g.syndrome(&r.estimate), g.syndrome(&e)),
                    DecodeStatus::HeraldedFailure => heralded += 1,
                }
            }
        }
        assert!(heralded > 0);
    }

    #[test]
    fn combinations_enumerated() {
        let mut all = Vec::new();
        for_each_combination(4, 2, |c| all.push(c.to_vec()));
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        let mut n = 0;
        for_each_combination(3, 3, |_| n += 1);
        assert_eq!(n, 1);
    }

    #[test]
    fn five_qubit_lookup() {
        let c = StabilizerCode::new(
            "five",
            ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].iter().map(|s| p(s)).collect(),
        )
        .unwrap();
        let d = MlDecoder::complete(&c);
        assert!(d.is_complete());
        assert_eq!(d.decode(&c.syndrome(&p("XIIII"))), Some(p("XIIII")));
        assert_eq!(d.decode(&BitVec::zeros(4)), Some(p("IIIII")));
        for q in 0..5 {
            for l in ['X', 'Y', 'Z'] {
                let e = Pauli::single(5, q, l);
                assert_eq!(d.decode(&c.syndrome(&e)), Some(e));
            }
        }
    }
}
