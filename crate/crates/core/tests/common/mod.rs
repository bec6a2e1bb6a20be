//! Final tables of the two forced-outcome walkthroughs.

#![allow(dead_code)]

use entpur::bits::BitVec;
use entpur::pauli::{Pauli, Sign};

/// `e_{i1} + e_{i2} + ...` in `F_2^n`, 1-based.
pub fn e(n: usize, idx: &[usize]) -> String {
    (1..=n).map(|i| if idx.contains(&i) { '1' } else { '0' }).collect()
}

/// A row given by its sign and per-subsystem X and Z components.
pub fn row(sign: Sign, x: &[&str], z: &[&str]) -> Pauli {
    let x = BitVec::from_str01(&x.concat());
    let z = BitVec::from_str01(&z.concat());
    Pauli::signed(x, z, sign.is_minus())
}

/// The 16 outcome patterns of four measurements.
pub fn signs() -> impl Iterator<Item = [Sign; 4]> {
    (0..16u32).map(|m| std::array::from_fn(|i| Sign::from_negative(m >> i & 1 == 1)))
}

/// A row with identical X and Z parts on both halves of a Bell register.
pub fn both(s: Sign, x: &[usize], z: &[usize]) -> Pauli {
    let (x, z) = (e(5, x), e(5, z));
    row(s, &[&x, &x], &[&z, &z])
}

/// Bell distillation with the five-qubit code, after Alice's measurements.
pub fn bell_step_four(eps: [Sign; 4]) -> Vec<Pauli> {
    let o = "00000";
    let [e1, e2, e3, e4] = eps;
    let plus = Sign::Plus;
    vec![
        row(e4, &["01010", o], &["10001", o]),
        both(plus, &[1, 2], &[4]),
        both(plus, &[1, 3], &[4, 5]),
        both(Sign::Minus, &[1, 4, 5], &[5]),
        row(e3, &["10100", o], &["00011", o]),
        both(plus, &[5], &[1, 4]),
        both(plus, &[1], &[2, 5]),
        both(plus, &[1, 5], &[3]),
        row(e1, &["10010", o], &["01100", o]),
        row(e2, &["01001", o], &["00110", o]),
    ]
}

/// GHZ distillation with the YY code, after Bob's measurements.
pub fn ghz_step_four(ea: [Sign; 2], eb: [Sign; 2]) -> Vec<Pauli> {
    let o = "000";
    let all = "111";
    let plus = Sign::Plus;
    vec![
        row(ea[0], &["110", o, o], &["110", o, o]),
        row(ea[1], &["011", o, o], &["011", o, o]),
        row(plus, &[o, o, o], &[all, all, o]),
        row(eb[0], &[o, "110", o], &[o, "110", o]),
        row(eb[1], &[o, "011", o], &[o, "011", o]),
        row(plus, &[o, o, o], &[o, all, all]),
        row(ea[0] * eb[0], &[o, o, "110"], &[o, o, "110"]),
        row(ea[1] * eb[1], &[o, o, "011"], &[o, o, "011"]),
        row(plus, &["001", "001", "001"], &["001", "001", "001"]),
    ]
}
