//! Structure-preserving circuit rewrites.
//!
//! [`tighten`] normalizes a d-D circuit into *tight* form — every AND/OR
//! binary, every OR smooth, output scope equal to the universe — without
//! changing its Boolean function. [`condition`] fixes one variable to a
//! constant and drops it from the universe (other variables keep their
//! identifiers). [`conjoin_fresh_variable`] extends the universe by one
//! fresh variable conjoined onto the output.

use std::collections::HashMap;

use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId, VarId, VarSet};
use crate::error::{Error, Result};

/// Tighten a decomposable circuit: collapse fan-in-1 gates, binarize AND/OR
/// left-to-left, smooth every OR gate, and pad the output scope up to the
/// universe, all via `(y ∨ ¬y)` gadgets shared per variable.
///
/// Preserves the Boolean function, decomposability, and determinism. A
/// circuit that is already tight is rebuilt structurally unchanged. Errors if
/// an AND gate's children overlap.
pub fn tighten(c: &Circuit) -> Result<Circuit> {
    if let Some(gate) = c.find_nondecomposable() {
        return Err(Error::NotDecomposable { gate: gate.0 });
    }
    let binary = binarize(c);
    smooth_and_pad(&binary)
}

/// Pass 1: rebuild with every AND/OR at fan-in exactly 2 (left-leaning
/// chains); fan-in-1 gates collapse onto their child.
fn binarize(c: &Circuit) -> Circuit {
    let mut b = CircuitBuilder::new(c.universe().clone());
    let mut map: Vec<GateId> = Vec::with_capacity(c.num_gates());
    for gate in c.gates() {
        let id = match gate {
            Gate::True => b.true_gate(),
            Gate::False => b.false_gate(),
            Gate::Var(v) => b.var(*v).expect("universe preserved"),
            Gate::Not(g) => b.not(map[g.0]),
            Gate::And(cs) | Gate::Or(cs) => {
                let is_and = matches!(gate, Gate::And(_));
                let mut acc = map[cs[0].0];
                for child in &cs[1..] {
                    let rhs = map[child.0];
                    acc = if is_and {
                        b.and_gate(vec![acc, rhs])
                    } else {
                        b.or_gate(vec![acc, rhs])
                    };
                }
                acc
            }
        };
        map.push(id);
    }
    b.finish(map[c.output().0])
}

/// Pass 2: smooth every (binary) OR gate and pad the output to the universe.
fn smooth_and_pad(c: &Circuit) -> Result<Circuit> {
    let mut b = CircuitBuilder::new(c.universe().clone());
    let mut gadgets: HashMap<VarId, GateId> = HashMap::new();
    let mut map: Vec<GateId> = Vec::with_capacity(c.num_gates());

    fn gadget(
        b: &mut CircuitBuilder,
        gadgets: &mut HashMap<VarId, GateId>,
        y: VarId,
    ) -> Result<GateId> {
        if let Some(&g) = gadgets.get(&y) {
            return Ok(g);
        }
        let var = b.var(y)?;
        let not = b.not(var);
        let or = b.or_gate(vec![var, not]);
        gadgets.insert(y, or);
        Ok(or)
    }

    // Conjoin `(y ∨ ¬y)` gadgets onto `g` until its scope reaches `target`.
    fn pad_to(
        b: &mut CircuitBuilder,
        gadgets: &mut HashMap<VarId, GateId>,
        g: GateId,
        target: &VarSet,
    ) -> Result<GateId> {
        let missing = target.difference(b.vars(g));
        let mut acc = g;
        for y in missing.iter() {
            let gad = gadget(b, gadgets, y)?;
            acc = b.and_gate(vec![acc, gad]);
        }
        Ok(acc)
    }

    for (i, gate) in c.gates().iter().enumerate() {
        let id = match gate {
            Gate::True => b.true_gate(),
            Gate::False => b.false_gate(),
            Gate::Var(v) => b.var(*v)?,
            Gate::Not(g) => b.not(map[g.0]),
            Gate::And(cs) => {
                let children: Vec<GateId> = cs.iter().map(|g| map[g.0]).collect();
                b.and_gate(children)
            }
            Gate::Or(cs) => {
                let scope = c.vars(GateId(i)).clone();
                let mut children = Vec::with_capacity(cs.len());
                for g in cs {
                    children.push(pad_to(&mut b, &mut gadgets, map[g.0], &scope)?);
                }
                b.or_gate(children)
            }
        };
        map.push(id);
    }

    let universe = c.universe().clone();
    let output = pad_to(&mut b, &mut gadgets, map[c.output().0], &universe)?;
    Ok(b.finish(output))
}

/// Fix variable `x` to `value`: replace its gates by constants and remove it
/// from the universe. The remaining variables keep their identifiers, so the
/// resulting universe need not be contiguous. Gate structure is otherwise
/// unchanged (the result is generally not tight).
pub fn condition(c: &Circuit, x: VarId, value: bool) -> Result<Circuit> {
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    let mut b = CircuitBuilder::new(c.universe().without(x));
    let mut map: Vec<GateId> = Vec::with_capacity(c.num_gates());
    for gate in c.gates() {
        let id = match gate {
            Gate::True => b.true_gate(),
            Gate::False => b.false_gate(),
            Gate::Var(v) if *v == x => {
                if value {
                    b.true_gate()
                } else {
                    b.false_gate()
                }
            }
            Gate::Var(v) => b.var(*v)?,
            Gate::Not(g) => b.not(map[g.0]),
            Gate::And(cs) => b.and_gate(cs.iter().map(|g| map[g.0]).collect()),
            Gate::Or(cs) => b.or_gate(cs.iter().map(|g| map[g.0]).collect()),
        };
        map.push(id);
    }
    Ok(b.finish(map[c.output().0]))
}

/// Conjoin a fresh variable `x ∉ V` onto the output: the result computes
/// `φ ∧ x` over universe `V ∪ {x}`, adding exactly two gates.
pub fn conjoin_fresh_variable(c: &Circuit, x: VarId) -> Result<Circuit> {
    let (mut b, out, var) = with_fresh(c, x)?;
    let and = b.and_gate(vec![out, var]);
    Ok(b.finish(and))
}

/// Disjoin a fresh variable `x ∉ V` onto the output as `¬(¬φ ∧ ¬x)`, the
/// d-D form of `φ ∨ x` (decomposable because `x` is fresh; no OR gate).
pub fn disjoin_fresh_variable(c: &Circuit, x: VarId) -> Result<Circuit> {
    let (mut b, out, var) = with_fresh(c, x)?;
    let not_out = b.not(out);
    let not_var = b.not(var);
    let and = b.and_gate(vec![not_out, not_var]);
    let not = b.not(and);
    Ok(b.finish(not))
}

fn with_fresh(c: &Circuit, x: VarId) -> Result<(CircuitBuilder, GateId, GateId)> {
    if c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    let mut universe = c.universe().clone();
    universe.insert(x);
    let mut b = CircuitBuilder::new(universe);
    let mut map: Vec<GateId> = Vec::with_capacity(c.num_gates());
    for gate in c.gates() {
        let id = match gate {
            Gate::True => b.true_gate(),
            Gate::False => b.false_gate(),
            Gate::Var(v) => b.var(*v)?,
            Gate::Not(g) => b.not(map[g.0]),
            Gate::And(cs) => b.and_gate(cs.iter().map(|g| map[g.0]).collect()),
            Gate::Or(cs) => b.or_gate(cs.iter().map(|g| map[g.0]).collect()),
        };
        map.push(id);
    }
    let out = map[c.output().0];
    let var = b.var(x)?;
    Ok((b, out, var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Determinism, DEFAULT_DETERMINISM_BUDGET};
    use crate::testutil::{ex_circuit, vs};

    fn subsets(universe: &VarSet) -> Vec<VarSet> {
        let vars: Vec<VarId> = universe.iter().collect();
        (0u64..(1 << vars.len()))
            .map(|mask| {
                vars.iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    }

    fn assert_same_function(a: &Circuit, b: &Circuit) {
        assert_eq!(a.universe(), b.universe());
        for z in subsets(a.universe()) {
            assert_eq!(a.evaluate(&z), b.evaluate(&z), "differ on {z}");
        }
    }

    #[test]
    fn tighten_leaves_a_tight_circuit_structurally_unchanged() {
        let c = ex_circuit();
        let t = tighten(&c).unwrap();
        assert_eq!(c, t);
    }

    #[test]
    fn tighten_smooths_a_deterministic_or() {
        // (1∧2) ∨ (¬1∧3∧4): deterministic (children disagree on 1) but the
        // child scopes {1,2} and {1,3,4} do not match.
        let text = "ddc 4\nv 1\nv 2\na 0 1\nn 0\nv 3\nv 4\na 4 5\na 3 6\no 2 7\n";
        let c = Circuit::parse(text).unwrap();
        let t = tighten(&c).unwrap();
        let report = t.analyze_structure(DEFAULT_DETERMINISM_BUDGET);
        assert!(report.tight);
        assert!(report.decomposable);
        assert_eq!(report.deterministic, Determinism::Verified);
        assert_same_function(&c, &t);
    }

    #[test]
    fn tighten_preserves_functions_and_hence_determinism_defects() {
        // (1∧2) ∨ (3∧4) is not deterministic: both children hold on
        // {1,2,3,4}. Tightening keeps the function (and so the defect) while
        // still making the circuit smooth, binary, and decomposable.
        let text = "ddc 4\nv 1\nv 2\na 0 1\nv 3\nv 4\na 3 4\no 2 5\n";
        let c = Circuit::parse(text).unwrap();
        let t = tighten(&c).unwrap();
        let report = t.analyze_structure(DEFAULT_DETERMINISM_BUDGET);
        assert!(report.tight);
        assert!(report.decomposable);
        assert!(matches!(report.deterministic, Determinism::Refuted { .. }));
        assert_same_function(&c, &t);
    }

    #[test]
    fn tighten_binarizes_wide_gates() {
        let text = "ddc 3\nv 1\nv 2\nv 3\na 0 1 2\n";
        let c = Circuit::parse(text).unwrap();
        let t = tighten(&c).unwrap();
        assert!(t.gates().iter().all(|g| g.fan_in() <= 2));
        assert!(t.analyze_structure(DEFAULT_DETERMINISM_BUDGET).tight);
        assert_same_function(&c, &t);
    }

    #[test]
    fn tighten_pads_missing_universe_variables() {
        let text = "ddc 3\nv 1\nv 2\nn 1\na 0 2\n";
        let c = Circuit::parse(text).unwrap();
        let t = tighten(&c).unwrap();
        assert_eq!(t.vars(t.output()), &vs(&[1, 2, 3]));
        assert!(t.analyze_structure(DEFAULT_DETERMINISM_BUDGET).tight);
        assert_same_function(&c, &t);
    }

    #[test]
    fn tighten_handles_constant_circuits() {
        let c = Circuit::parse("ddc 2\nf\n").unwrap();
        let t = tighten(&c).unwrap();
        assert!(t.analyze_structure(DEFAULT_DETERMINISM_BUDGET).tight);
        assert_same_function(&c, &t);
        for z in subsets(t.universe()) {
            assert!(!t.evaluate(&z));
        }
    }

    #[test]
    fn tighten_rejects_nondecomposable_input() {
        let c = Circuit::parse("ddc 1\nv 1\nv 1\na 0 1\n").unwrap();
        assert!(matches!(tighten(&c), Err(Error::NotDecomposable { .. })));
    }

    #[test]
    fn condition_fixes_a_variable_and_shrinks_the_universe() {
        let c = ex_circuit();
        let c1 = condition(&c, 1, true).unwrap();
        assert_eq!(c1.universe(), &vs(&[2, 3, 4]));
        // φ|A=1 ≡ a ∨ (C∧c)
        for z in subsets(c1.universe()) {
            let expected = z.contains(2) || (z.contains(3) && z.contains(4));
            assert_eq!(c1.evaluate(&z), expected, "on {z}");
        }
        let c0 = condition(&c, 1, false).unwrap();
        for z in subsets(c0.universe()) {
            let expected = z.contains(3) && z.contains(4);
            assert_eq!(c0.evaluate(&z), expected, "on {z}");
        }
    }

    #[test]
    fn condition_rejects_variables_outside_the_universe() {
        let c = ex_circuit();
        assert!(matches!(
            condition(&c, 9, true),
            Err(Error::UnknownVariable { var: 9 })
        ));
        let c1 = condition(&c, 1, true).unwrap();
        assert!(condition(&c1, 1, true).is_err());
    }

    #[test]
    fn conditioned_circuits_tighten_over_the_reduced_universe() {
        let c = ex_circuit();
        let c1 = condition(&c, 1, true).unwrap();
        let t = tighten(&c1).unwrap();
        assert!(t.analyze_structure(DEFAULT_DETERMINISM_BUDGET).tight);
        assert_same_function(&c1, &t);
    }

    #[test]
    fn conjoin_fresh_variable_adds_two_gates() {
        let c = ex_circuit();
        let d = conjoin_fresh_variable(&c, 5).unwrap();
        assert_eq!(d.num_gates(), c.num_gates() + 2);
        assert_eq!(d.universe(), &vs(&[1, 2, 3, 4, 5]));
        for z in subsets(d.universe()) {
            let phi = c.evaluate(&z);
            assert_eq!(d.evaluate(&z), phi && z.contains(5), "on {z}");
        }
        assert!(conjoin_fresh_variable(&c, 4).is_err());
    }

    #[test]
    fn disjoin_fresh_variable_is_dd_and_computes_or() {
        let c = ex_circuit();
        let d = disjoin_fresh_variable(&c, 5).unwrap();
        for z in subsets(d.universe()) {
            let phi = c.evaluate(&z);
            assert_eq!(d.evaluate(&z), phi || z.contains(5), "on {z}");
        }
        let report = d.analyze_structure(DEFAULT_DETERMINISM_BUDGET);
        assert!(report.decomposable);
        assert!(!matches!(report.deterministic, Determinism::Refuted { .. }));
    }
}
