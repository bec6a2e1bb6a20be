use entpur::bits::{BitMatrix, BitVec};
use entpur::clifford::{restoring_clifford, solve_symmetric, DiagonalClifford};
use entpur::codes::{bundle, CodeError};
use entpur::codes::lifted::{lifted_product, Base};
use entpur::decoders::MsaConfig;
use entpur::oracle::{check_clifford, check_measurement, DenseMatrix};
use entpur::pauli::{Pauli, Sign};
use entpur::protocols::{Decoder, FailureMetric, Ghz2Protocol, NetworkTopology, PreparedDecoder, Protocol};
use entpur::tableau::{Membership, StabilizerTable};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pauli(n: usize) -> impl Strategy<Value = Pauli> {
    (prop::collection::vec(0u8..4, n), 0u8..4).prop_map(move |(letters, phase)| {
        let mut p = Pauli::identity(n);
        for (q, l) in letters.into_iter().enumerate() {
            p.set_letter(q, ['I', 'X', 'Y', 'Z'][l as usize]);
        }
        p.with_phase(phase)
    })
}

fn symmetric(n: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
        let mut r = BitMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                r.set(i, j, bits[i * n + j]);
                r.set(j, i, bits[i * n + j]);
            }
        }
        r
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(any::<bool>(), rows * cols).prop_map(move |bits| {
        BitMatrix::from_rows(cols, bits.chunks(cols).map(BitVec::from_bools).collect())
    })
}

fn paulis_on(n: usize, count: usize) -> impl Strategy<Value = Vec<Pauli>> {
    prop::collection::vec(pauli(n), count)
}

fn sign() -> impl Strategy<Value = Sign> {
    any::<bool>().prop_map(Sign::from_negative)
}

fn base(rows: usize, cols: usize, lift: u32) -> impl Strategy<Value = Base> {
    prop::collection::vec(prop::option::weighted(0.7, 0..lift), rows * cols)
        .prop_map(move |v| v.chunks(cols).map(|r| r.to_vec()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn multiplication_is_associative((a, b, c) in (1usize..6).prop_flat_map(|n| (pauli(n), pauli(n), pauli(n)))) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn multiplication_matches_dense((a, b) in (1usize..4).prop_flat_map(|n| (pauli(n), pauli(n)))) {
        let dense = DenseMatrix::of_pauli(&a).mul(&DenseMatrix::of_pauli(&b));
        prop_assert!(dense.max_deviation(&DenseMatrix::of_pauli(&(&a * &b))) < 1e-12);
        prop_assert_eq!(a.commutes(&b), (&a * &b) == (&b * &a));
    }

    #[test]
    fn transpose_is_an_involution(a in (1usize..6).prop_flat_map(pauli)) {
        prop_assert_eq!(a.transpose().transpose(), a.clone());
        let dense = DenseMatrix::of_pauli(&a).transpose();
        prop_assert!(dense.max_deviation(&DenseMatrix::of_pauli(&a.transpose())) < 1e-12);
    }

    #[test]
    fn measurement_keeps_a_stabilizer_group(
        (n, obs, outcomes) in (1usize..4).prop_flat_map(|n| (Just(n), paulis_on(3 * n, 4), prop::collection::vec(sign(), 4)))
    ) {
        let mut t = StabilizerTable::ghz(n, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (o, s) in obs.iter().zip(outcomes) {
            let o = o.clone().with_phase(o.phase_exp() & 2);
            let before = t.clone();
            match t.measure(&o, Some(s), &mut rng) {
                Ok((got, _)) => {
                    t.check_invariants().map_err(|e| TestCaseError::fail(e.to_string()))?;
                    prop_assert_eq!(t.contains(&o.times(got)), Membership::Yes);
                    prop_assert!(check_measurement(&before, &o, got).deviation < 1e-10);
                }
                Err(_) => {
                    // Only a deterministic outcome can be contradicted.
                    prop_assert_eq!(before.contains(&o.times(s)), Membership::YesNegated);
                    t = before;
                }
            }
        }
    }

    #[test]
    fn lifted_products_are_orthogonal(
        (l, a, b) in (1u32..6, 1usize..3, 1usize..4, 1usize..3, 1usize..4)
            .prop_flat_map(|(l, ma, na, mb, nb)| (Just(l), base(ma, na, l), base(mb, nb, l)))
    ) {
        match lifted_product(&a, &b, l as usize, "random") {
            Ok(code) => prop_assert!(code.hx.mul(&code.hz.transpose()).is_zero()),
            Err(e) => prop_assert!(!matches!(e, CodeError::NotOrthogonal(_)), "{}", e),
        }
    }

    #[test]
    fn symmetric_solution_exists_iff_abt_symmetric(
        (a, b) in (1usize..5).prop_flat_map(|n| (1..=n).prop_flat_map(move |r| (matrix(r, n), matrix(r, n))))
    ) {
        prop_assume!(a.rank() == a.num_rows());
        let abt = a.mul(&b.transpose());
        let sol = solve_symmetric(&a, &b);
        prop_assert_eq!(sol.is_some(), abt == abt.transpose());
        if let Some(c) = sol {
            prop_assert_eq!(a.mul(c.matrix()), b);
        }
    }

    #[test]
    fn diagonal_cliffords_are_automorphisms(
        (r, a, b) in (1usize..5).prop_flat_map(|n| (symmetric(n), pauli(n), pauli(n)))
    ) {
        let c = DiagonalClifford::new(r);
        prop_assert_eq!(c.conjugate(&(&a * &b)), &c.conjugate(&a) * &c.conjugate(&b));
        prop_assert_eq!(c.conjugate_inverse(&c.conjugate(&a)), a.clone());
        prop_assert_eq!(c.conjugate(&a).commutes(&c.conjugate(&b)), a.commutes(&b));
        prop_assert!(check_clifford(&c, &a).deviation < 1e-10);
    }

    #[test]
    fn decoding_is_deterministic(e in pauli(58), seed in any::<u64>()) {
        let code = bundle::load("hgp_hamming").unwrap();
        let css = code.css().unwrap();
        let dec = PreparedDecoder::msa(css, MsaConfig::default(), 0.05);
        let (x, y) = (dec.decode_error(&e), dec.decode_error(&e));
        prop_assert_eq!(x.estimate, y.estimate);
        prop_assert_eq!(x.status, y.status);
        prop_assert_eq!(x.iterations, y.iterations);
        let proto = Ghz2Protocol::new(css, Decoder::Msa(MsaConfig::default()), 0.08, NetworkTopology::star(3), FailureMetric::Strict).unwrap();
        let first = proto.trial(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(first, proto.trial(&mut ChaCha8Rng::seed_from_u64(seed)));
    }
}

#[test]
fn restoring_cliffords_recover_the_encoders() {
    for name in ["yy3", "five_qubit"] {
        let code = bundle::load(name).unwrap();
        let s = code.stabilizer();
        let (_, lx) = s.logicals().unwrap();
        let targets: Vec<Pauli> = s.generators.iter().chain(lx).cloned().collect();
        let c = restoring_clifford(&targets).unwrap_or_else(|| panic!("{name}: no diagonal Clifford"));
        for t in targets.iter().filter(|t| !t.x_bits().is_zero()) {
            let from = Pauli::from_xz(t.x_bits().clone(), BitVec::zeros(s.n));
            assert_same_up_to_sign(&c.conjugate(&from), t, name);
        }
    }
}

fn assert_same_up_to_sign(got: &Pauli, want: &Pauli, name: &str) {
    assert_eq!(got.unsigned(), want.unsigned(), "{name}: {got} vs {want}");
}
