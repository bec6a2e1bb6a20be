//! i.i.d. single-qubit depolarizing noise and per-trial random streams.

use crate::pauli::Pauli;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Below this error probability the sampler skips identity runs geometrically.
const SPARSE_BELOW: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Depolarizing {
    p: f64,
}

impl Depolarizing {
    pub fn new(p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "error probability {p} outside [0, 1]");
        Depolarizing { p }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Each qubit independently picks up X, Y or Z with probability `p/3`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Pauli {
        let mut e = Pauli::identity(n);
        if self.p == 0.0 {
            return e;
        }
        if self.p < SPARSE_BELOW {
            let log_q = (1.0 - self.p).ln();
            let mut q = 0usize;
            loop {
                let u: f64 = rng.gen();
                // Number of identity qubits before the next error.
                let skip = ((1.0 - u).ln() / log_q).floor();
                if !skip.is_finite() || skip >= (n - q) as f64 {
                    break;
                }
                q += skip as usize;
                e.set_letter(q, ['X', 'Y', 'Z'][rng.gen_range(0..3)]);
                q += 1;
                if q >= n {
                    break;
                }
            }
            return e;
        }
        let third = self.p / 3.0;
        for q in 0..n {
            let u: f64 = rng.gen();
            if u < third {
                e.set_letter(q, 'X');
            } else if u < 2.0 * third {
                e.set_letter(q, 'Y');
            } else if u < self.p {
                e.set_letter(q, 'Z');
            }
        }
        e
    }
}

/// Fidelity of a GHZ triple whose two transmitted qubits are depolarized.
pub fn fidelity_of_input(p: f64) -> f64 {
    (1.0 - p) * (1.0 - p)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream for one trial, determined only by its coordinates.
pub fn trial_rng(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let h = splitmix64(splitmix64(splitmix64(seed) ^ point) ^ trial);
    ChaCha8Rng::seed_from_u64(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let mut rng = trial_rng(1, 0, 0);
        assert!(Depolarizing::new(0.0).sample(100, &mut rng).is_identity());
        assert_eq!(Depolarizing::new(1.0).sample(1000, &mut rng).weight(), 1000);
    }

    #[test]
    fn input_fidelity() {
        assert_eq!(fidelity_of_input(0.0), 1.0);
        assert_eq!(fidelity_of_input(1.0), 0.0);
        assert!((fidelity_of_input(0.107) - 0.7974).abs() < 5e-5);
    }

    fn mean_weight(p: f64, n: usize, samples: usize) -> f64 {
        let ch = Depolarizing::new(p);
        let total: usize = (0..samples)
            .map(|t| ch.sample(n, &mut trial_rng(7, 0, t as u64)).weight())
            .sum();
        total as f64 / samples as f64
    }

    #[test]
    fn mean_weight_dense_and_sparse() {
        for (p, n, samples) in [(0.1, 544, 20_000), (0.01, 544, 20_000)] {
            let m = mean_weight(p, n, samples);
            let sigma = ((n as f64) * p * (1.0 - p) / samples as f64).sqrt();
            assert!((m - n as f64 * p).abs() < 3.0 * sigma, "p={p}: mean {m}");
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: u64 = trial_rng(3, 1, 2).gen();
        let b: u64 = trial_rng(3, 1, 2).gen();
        let c: u64 = trial_rng(3, 2, 1).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
