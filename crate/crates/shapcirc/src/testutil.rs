//! Shared fixtures for unit tests.

use crate::circuit::{Circuit, VarId, VarSet};
use crate::numeric::rat;
use crate::scores::Probabilities;

/// `¬(¬(A∧a) ∧ ¬(C∧c))` over universe {1: A, 2: a, 3: C, 4: c}: the tight
/// d-D form of `(A∧a) ∨ (C∧c)`.
pub(crate) const RUNNING_EXAMPLE: &str = "\
# running example: not(and(not(and(A, a)), not(and(C, c))))
ddc 4
v 1
v 2
a 0 1
n 2
v 3
v 4
a 4 5
n 6
a 3 7
n 8
";

pub(crate) fn vs(vars: &[VarId]) -> VarSet {
    vars.iter().copied().collect()
}

pub(crate) fn ex_circuit() -> Circuit {
    Circuit::parse(RUNNING_EXAMPLE).unwrap()
}

/// The worked probabilities: A ↦ 0.4, a ↦ 0.5, C ↦ 0.6, c ↦ 0.8.
pub(crate) fn ex_probs() -> Probabilities {
    let mut p = Probabilities::new();
    p.set(1, rat(2, 5)).unwrap();
    p.set(2, rat(1, 2)).unwrap();
    p.set(3, rat(3, 5)).unwrap();
    p.set(4, rat(4, 5)).unwrap();
    p
}
