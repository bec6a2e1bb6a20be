//! Forced-outcome replays of the two worked protocol examples.
//!
//! Each replay returns the table after every step so that intermediate
//! states can be compared as well as the final one.

use crate::bits::BitMatrix;
use crate::clifford::DiagonalClifford;
use crate::pauli::{p, Pauli, Sign};
use crate::tableau::{RowTag, StabilizerTable, TableError};

/// Generators of the `[[5,1,3]]` code in measurement order.
pub const FIVE_QUBIT_GENERATORS: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];

/// Rows replaced by the four measurements of the Bell example.
pub const FIVE_QUBIT_PIVOTS: [usize; 4] = [8, 9, 4, 0];

/// Bell distillation with `[[5,1,3]]`: Alice measures the four generators
/// with outcomes `eps`; returns Steps (0) through (4).
pub fn bell_five_qubit(eps: [Sign; 4]) -> Result<Vec<StabilizerTable>, TableError> {
    let mut t = StabilizerTable::bell(5);
    let mut steps = vec![t.clone()];
    for ((g, &pivot), &e) in FIVE_QUBIT_GENERATORS.iter().zip(&FIVE_QUBIT_PIVOTS).zip(&eps) {
        let obs = t.embed("A", &p(g))?;
        t.measure_with_pivot(&obs, pivot, e)?;
        t.set_tag(pivot, RowTag::CodeStabilizer);
        steps.push(t.clone());
    }
    Ok(steps)
}

/// Bob's generators `ε_i g_i^T` on `B` after the Bell example.
pub fn bell_five_qubit_bob(eps: [Sign; 4]) -> Vec<Pauli> {
    FIVE_QUBIT_GENERATORS
        .iter()
        .zip(eps)
        .map(|(g, e)| p(g).transpose().times(e).embed(10, 5))
        .collect()
}

/// The ghz1 protocol with `⟨YYI, IYY⟩`: Alice measures on `A` with outcomes
/// `eps_a`, applies the inverse phase gate to every `C` qubit, and Bob
/// measures on `B` with outcomes `eps_b`. No channel errors. Returns
/// Steps (0) through (4).
pub fn ghz_yy3(eps_a: [Sign; 2], eps_b: [Sign; 2]) -> Result<Vec<StabilizerTable>, TableError> {
    let gens = [p("YYI"), p("IYY")];
    let mut t = yy3_initial();
    let mut steps = vec![t.clone()];
    let mut never = rand::rngs::mock::StepRng::new(0, 0);

    // Steps (1) and (2): measurement, then the XXX-type row of the
    // measured pair is combined with its neighbour and the new code row.
    for (i, g) in gens.iter().enumerate() {
        let obs = t.embed("A", g)?;
        t.measure(&obs, Some(eps_a[i]), &mut never)?;
        t.set_tag(i, RowTag::CodeStabilizer);
        t.multiply_row(6 + i, 7 + i);
        t.multiply_row(6 + i, i);
        steps.push(t.clone());
    }

    // Step 3: inverse phase gate on C.
    let s = DiagonalClifford::new(BitMatrix::identity(3));
    let (off, len) = t.subsystem_range("C")?;
    t.map_rows(|r| {
        let c = s.conjugate_inverse(&r.slice(off, len).with_phase(0));
        let head = r.slice(0, off).with_phase(0);
        head.tensor(&c).with_phase((r.phase_exp() + c.phase_exp()) & 3)
    });
    steps.push(t.clone());

    // Step 4: Bob measures on B; the BC rows are split into C-only rows.
    for (i, g) in gens.iter().enumerate() {
        let obs = t.embed("B", g)?;
        t.measure(&obs, Some(eps_b[i]), &mut never)?;
        t.set_tag(3 + i, RowTag::CodeStabilizer);
    }
    for i in 0..2 {
        t.multiply_row(6 + i, 3 + i);
        t.set_tag(6 + i, RowTag::CodeStabilizer);
    }
    steps.push(t);
    Ok(steps)
}

/// Step 0 of the `⟨YYI, IYY⟩` example: `Z_A Z_B`, `Z_B Z_C`, then the
/// `XXX` rows multiplied by the matching `Z_A Z_B` row.
fn yy3_initial() -> StabilizerTable {
    let ghz = StabilizerTable::ghz(3, 3);
    let mut rows: Vec<Pauli> = ghz.rows().to_vec();
    for i in 0..3 {
        rows[6 + i] = &rows[6 + i] * &rows[i];
    }
    StabilizerTable::new(ghz.subsystems().to_vec(), rows, ghz.tags().to_vec())
}
