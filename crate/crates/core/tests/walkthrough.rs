//! Forced-outcome replays against the expected tables.

mod common;

use common::{both, row, signs};
use entpur::pauli::Sign;
use entpur::tableau::Membership;
use entpur::walkthrough::{bell_five_qubit, bell_five_qubit_bob, ghz_yy3};

#[test]
fn bell_step_four() {
    for eps in signs() {
        let expected = common::bell_step_four(eps);
        let steps = bell_five_qubit(eps).unwrap();
        let last = &steps[4];
        assert_eq!(last.rows(), &expected[..], "eps {eps:?}");
        last.check_invariants().unwrap();
        for b in bell_five_qubit_bob(eps) {
            assert_eq!(last.contains(&b), Membership::Yes, "Bob's {b}");
        }
    }
}

#[test]
fn bell_intermediate_steps() {
    let steps = bell_five_qubit([Sign::Plus; 4]).unwrap();
    // Step 3, fourth row: the sign introduced by the product rule.
    assert_eq!(steps[3].row(3), &both(Sign::Minus, &[4, 5], &[5]));
    assert_eq!(steps[2].row(2), &both(Sign::Plus, &[3], &[4, 5]));
    assert_eq!(steps[1].row(5), &both(Sign::Plus, &[], &[1, 4]));
}

#[test]
fn ghz_step_four() {
    for eps in signs() {
        let (ea, eb) = ([eps[0], eps[1]], [eps[2], eps[3]]);
        let expected = common::ghz_step_four(ea, eb);
        let steps = ghz_yy3(ea, eb).unwrap();
        assert_eq!(steps.len(), 5);
        let last = &steps[4];
        assert_eq!(last.rows(), &expected[..], "eps_a {ea:?} eps_b {eb:?}");
        last.check_invariants().unwrap();
    }
}

#[test]
fn ghz_intermediate_steps() {
    let ea = [Sign::Minus, Sign::Plus];
    let steps = ghz_yy3(ea, [Sign::Plus; 2]).unwrap();
    let o = "000";
    // Step 0: the XXX rows carry -Y_A Y_B X_C.
    assert_eq!(steps[0].row(6), &row(Sign::Minus, &["100", "100", "100"], &["100", "100", o]));
    // Step 1: row 2 is Z_A2 Z_B2 Z_A1 Z_B1, row 7 splits onto B and C.
    assert_eq!(steps[1].row(1), &row(Sign::Plus, &[o, o, o], &["110", "110", o]));
    assert_eq!(steps[1].row(6), &row(ea[0], &[o, "110", "110"], &[o, "110", o]));
    // Step 2.
    assert_eq!(steps[2].row(2), &row(Sign::Plus, &[o, o, o], &["111", "111", o]));
    assert_eq!(steps[2].row(7), &row(ea[1], &[o, "011", "011"], &[o, "011", o]));
    // Step 3: the inverse phase turns X_C into Y_C and clears the sign of
    // the last row.
    assert_eq!(steps[3].row(6), &row(ea[0], &[o, "110", "110"], &[o, "110", "110"]));
    assert_eq!(steps[3].row(8), &row(Sign::Plus, &["001", "001", "001"], &["001", "001", "001"]));
}
