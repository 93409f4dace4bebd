//! Polynomial-time score algorithms on decomposable circuits.
//!
//! The quantities computed here are defined over a product distribution: each
//! universe variable `x` is drawn independently with probability `p_x`, so a
//! random subset `Z ⊆ V` has weight `Π_V(Z) = Π_{x∈Z} p_x · Π_{x∉Z} (1−p_x)`.
//! On circuits whose ∧-gates have variable-disjoint children and whose
//! ∨-gates have mutually exclusive children, single bottom-up sweeps compute:
//!
//! - [`ev_dd`]: the expected value `Σ_Z Π_V(Z)·φ(Z)`,
//! - [`env_dd`]: the nested sum `Σ_Z Π_V(Z)·#{E ⊆ Z : φ(E)}`,
//! - [`count_sat_by_size`]: model counts stratified by assignment size,
//! - [`escore_dd`]: the expected score of one variable under any coefficient
//!   function, via per-gate dynamic-programming tables,
//! - [`ebanzhaf_dd`] and [`escore_equal_prob`]: faster specializations for
//!   the Banzhaf coefficients and for uniform probabilities.
//!
//! The sweeps require smooth gates with a full-universe output scope; use
//! [`crate::transform::tighten`] first (the `escore` entry points do so
//! internally), or the [`ev`]/[`env`] wrappers. ∨-gate determinism cannot be
//! validated cheaply and is trusted here; [`Circuit::analyze_structure`]
//! offers a budgeted check. Everything is exact over rationals by default;
//! `_f64` variants trade exactness for bounded number size.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, GateId, VarId, VarSet};
use crate::coeffs::{BinomialTable, CoefficientFunction};
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, to_f64, Rational};
use crate::transform::{condition, tighten};

/// Independent per-variable probabilities: one rational in [0, 1] per
/// universe variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Probabilities {
    map: BTreeMap<VarId, Rational>,
}

impl Probabilities {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assign `p` to `v`; rejects values outside [0, 1].
    pub fn set(&mut self, v: VarId, p: Rational) -> Result<()> {
        if p < Rational::zero() || p > Rational::one() {
            return Err(Error::ProbabilityOutOfRange {
                var: v,
                value: crate::numeric::render_rational(&p),
            });
        }
        self.map.insert(v, p);
        Ok(())
    }

    pub fn get(&self, v: VarId) -> Option<&Rational> {
        self.map.get(&v)
    }

    /// Probability of `v`, or an error if none was assigned.
    pub fn require(&self, v: VarId) -> Result<&Rational> {
        self.map.get(&v).ok_or(Error::MissingProbability { var: v })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Rational)> {
        self.map.iter().map(|(&v, p)| (v, p))
    }

    /// Uniform assignment over a universe.
    pub fn uniform(universe: &VarSet, p: &Rational) -> Result<Self> {
        let mut out = Self::new();
        for v in universe.iter() {
            out.set(v, p.clone())?;
        }
        Ok(out)
    }

    /// The common probability if the assignment is uniform and non-empty.
    pub fn uniform_value(&self) -> Option<&Rational> {
        let mut iter = self.map.values();
        let first = iter.next()?;
        iter.all(|p| p == first).then_some(first)
    }

    /// Parse the probability file format: one `<varId> <rational>` pair per
    /// line; `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let var_tok = parts.next().unwrap_or("");
            let val_tok = parts.next().ok_or(Error::Parse {
                line: line_no,
                column: 1,
                message: "expected `<varId> <probability>`".into(),
            })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: "trailing tokens after probability".into(),
                });
            }
            let var: VarId = var_tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: 1,
                message: format!("invalid variable id {var_tok:?}"),
            })?;
            if out.map.contains_key(&var) {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("duplicate probability for variable {var}"),
                });
            }
            out.set(var, parse_rational(val_tok)?)?;
        }
        Ok(out)
    }

    /// Check the assignment covers exactly the circuit universe.
    pub fn validate_for(&self, c: &Circuit) -> Result<()> {
        for v in c.universe().iter() {
            if !self.map.contains_key(&v) {
                return Err(Error::MissingProbability { var: v });
            }
        }
        for &v in self.map.keys() {
            if !c.universe().contains(v) {
                return Err(Error::UnexpectedProbability { var: v });
            }
        }
        Ok(())
    }

    /// Copy with `v` removed.
    pub fn without(&self, v: VarId) -> Self {
        let mut map = self.map.clone();
        map.remove(&v);
        Self { map }
    }

    /// Copy with `v` set to `p` (must be a valid probability).
    pub fn with(&self, v: VarId, p: Rational) -> Result<Self> {
        let mut out = self.clone();
        out.set(v, p)?;
        Ok(out)
    }

    /// Copy restricted to the variables of `universe`.
    pub fn restrict(&self, universe: &VarSet) -> Self {
        Self {
            map: self
                .map
                .iter()
                .filter(|(&v, _)| universe.contains(v))
                .map(|(&v, p)| (v, p.clone()))
                .collect(),
        }
    }
}

/// Arithmetic abstraction letting every sweep run either exactly over
/// rationals or approximately over `f64`.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + std::ops::Sub<Output = Self>
    + for<'a> std::ops::AddAssign<&'a Self>
    + for<'a> std::ops::MulAssign<&'a Self>
{
    fn from_rational(r: &Rational) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    /// Size of the representation in bits (0 for fixed-width types); feeds
    /// the arithmetic-growth metadata of [`ScoreReport`].
    fn bit_size(&self) -> u64;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_bigint(n: &BigInt) -> Self {
        Rational::from_integer(n.clone())
    }

    fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }

    fn bit_size(&self) -> u64 {
        0
    }
}

/// Validate the structure the bottom-up sweeps rely on: disjoint ∧-children,
/// ∨-children whose scope equals the gate scope, and an output gate covering
/// the whole universe. ∨-determinism is trusted, not checked.
fn ensure_sweep_structure(c: &Circuit) -> Result<()> {
    if let Some(gate) = c.find_nondecomposable() {
        return Err(Error::NotDecomposable { gate: gate.0 });
    }
    for (i, gate) in c.gates().iter().enumerate() {
        if let Gate::Or(children) = gate {
            for ch in children {
                if c.vars(*ch) != c.vars(GateId(i)) {
                    return Err(Error::StructureViolation {
                        gate: i,
                        message: "OR child scope differs from the gate scope (not smooth)"
                            .to_string(),
                    });
                }
            }
        }
    }
    if c.vars(c.output()) != c.universe() {
        return Err(Error::StructureViolation {
            gate: c.output().0,
            message: "output scope does not cover the universe".to_string(),
        });
    }
    Ok(())
}

/// `true` for every gate the output depends on.
fn live_mask(c: &Circuit) -> Vec<bool> {
    let mut live = vec![false; c.num_gates()];
    for g in c.reachable_from(&[c.output()]) {
        live[g.0] = true;
    }
    live
}

fn ev_dd_generic<S: Scalar>(c: &Circuit, p: &Probabilities) -> Result<S> {
    p.validate_for(c)?;
    ensure_sweep_structure(c)?;
    let live = live_mask(c);
    let mut alpha: Vec<Option<S>> = vec![None; c.num_gates()];
    for (i, gate) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let value = match gate {
            Gate::True => S::one(),
            Gate::False => S::zero(),
            Gate::Var(y) => S::from_rational(p.require(*y)?),
            Gate::Not(ch) => S::one() - alpha[ch.0].clone().expect("child computed"),
            Gate::Or(cs) => {
                let mut acc = S::zero();
                for ch in cs {
                    acc += alpha[ch.0].as_ref().expect("child computed");
                }
                acc
            }
            Gate::And(cs) => {
                let mut acc = S::one();
                for ch in cs {
                    acc *= alpha[ch.0].as_ref().expect("child computed");
                }
                acc
            }
        };
        alpha[i] = Some(value);
    }
    Ok(alpha[c.output().0].take().expect("output computed"))
}

/// Expected value `ev(φ) = Σ_{Z⊆V} Π_V(Z)·φ(Z)` of a tight circuit, by one
/// linear bottom-up pass (constants → 0/1, variable → p_y, ¬ → 1 − child,
/// ∨ → sum, ∧ → product).
pub fn ev_dd(c: &Circuit, p: &Probabilities) -> Result<Rational> {
    ev_dd_generic(c, p)
}

/// [`ev_dd`] in floating point.
pub fn ev_dd_f64(c: &Circuit, p: &Probabilities) -> Result<f64> {
    ev_dd_generic(c, p)
}

/// [`ev_dd`] on an arbitrary decomposable circuit: tightens first.
pub fn ev(c: &Circuit, p: &Probabilities) -> Result<Rational> {
    ev_dd(&tighten(c)?, p)
}

/// [`ev`] in floating point.
pub fn ev_f64(c: &Circuit, p: &Probabilities) -> Result<f64> {
    ev_dd_f64(&tighten(c)?, p)
}

fn env_dd_generic<S: Scalar>(c: &Circuit, p: &Probabilities) -> Result<S> {
    p.validate_for(c)?;
    ensure_sweep_structure(c)?;
    let live = live_mask(c);
    let mut alpha: Vec<Option<S>> = vec![None; c.num_gates()];
    for (i, gate) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let value = match gate {
            Gate::True => S::one(),
            Gate::False => S::zero(),
            Gate::Var(y) => S::from_rational(p.require(*y)?),
            Gate::Not(ch) => {
                // Σ_Z Π(Z)·#{E ⊆ Z} over the gate scope is Π_y (1 + p_y).
                let mut total = S::one();
                for y in c.vars(GateId(i)).iter() {
                    let f = S::from_rational(&(Rational::one() + p.require(y)?));
                    total *= &f;
                }
                total - alpha[ch.0].clone().expect("child computed")
            }
            Gate::Or(cs) => {
                let mut acc = S::zero();
                for ch in cs {
                    acc += alpha[ch.0].as_ref().expect("child computed");
                }
                acc
            }
            Gate::And(cs) => {
                let mut acc = S::one();
                for ch in cs {
                    acc *= alpha[ch.0].as_ref().expect("child computed");
                }
                acc
            }
        };
        alpha[i] = Some(value);
    }
    Ok(alpha[c.output().0].take().expect("output computed"))
}

/// Nested expected value `env(φ) = Σ_Z Π_V(Z)·#{E ⊆ Z : φ(E)}` of a tight
/// circuit, by one linear bottom-up pass.
pub fn env_dd(c: &Circuit, p: &Probabilities) -> Result<Rational> {
    env_dd_generic(c, p)
}

/// [`env_dd`] in floating point.
pub fn env_dd_f64(c: &Circuit, p: &Probabilities) -> Result<f64> {
    env_dd_generic(c, p)
}

/// [`env_dd`] on an arbitrary decomposable circuit: tightens first.
pub fn env(c: &Circuit, p: &Probabilities) -> Result<Rational> {
    env_dd(&tighten(c)?, p)
}

/// [`env`] in floating point.
pub fn env_f64(c: &Circuit, p: &Probabilities) -> Result<f64> {
    env_dd_f64(&tighten(c)?, p)
}

/// Model counts of a tight circuit stratified by assignment size: entry ℓ is
/// the number of sets `Z ⊆ V` with `|Z| = ℓ` and `φ(Z) = 1`. The returned
/// vector has `|V| + 1` entries.
pub fn count_sat_by_size(c: &Circuit) -> Result<Vec<BigInt>> {
    ensure_sweep_structure(c)?;
    let n = c.universe().len();
    let binom = BinomialTable::new(n);
    let live = live_mask(c);
    let mut counts: Vec<Option<Vec<BigInt>>> = vec![None; c.num_gates()];
    for (i, gate) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let value = match gate {
            Gate::True => vec![BigInt::one()],
            Gate::False => vec![BigInt::zero()],
            Gate::Var(_) => vec![BigInt::zero(), BigInt::one()],
            Gate::Not(ch) => {
                let child = counts[ch.0].as_ref().expect("child computed");
                let m = c.vars(GateId(i)).len();
                (0..=m).map(|l| binom.get(m, l) - &child[l]).collect()
            }
            Gate::Or(cs) => {
                let mut acc = counts[cs[0].0].clone().expect("child computed");
                for ch in &cs[1..] {
                    let child = counts[ch.0].as_ref().expect("child computed");
                    for (a, b) in acc.iter_mut().zip(child) {
                        *a += b;
                    }
                }
                acc
            }
            Gate::And(cs) => {
                let mut acc = counts[cs[0].0].clone().expect("child computed");
                for ch in &cs[1..] {
                    let child = counts[ch.0].as_ref().expect("child computed");
                    let mut next = vec![BigInt::zero(); acc.len() + child.len() - 1];
                    for (a, av) in acc.iter().enumerate() {
                        if av.is_zero() {
                            continue;
                        }
                        for (b, bv) in child.iter().enumerate() {
                            if bv.is_zero() {
                                continue;
                            }
                            next[a + b] += av * bv;
                        }
                    }
                    acc = next;
                }
                acc
            }
        };
        counts[i] = Some(value);
    }
    Ok(counts[c.output().0].take().expect("output computed"))
}

/// Triangular table: `t[k][l]` defined for `0 ≤ l ≤ k`.
type Tri<S> = Vec<Vec<S>>;

fn tri_zero<S: Scalar>(m: usize) -> Tri<S> {
    (0..=m).map(|k| vec![S::zero(); k + 1]).collect()
}

fn tri_add_assign<S: Scalar>(acc: &mut Tri<S>, rhs: &Tri<S>) {
    for (row_a, row_b) in acc.iter_mut().zip(rhs) {
        for (a, b) in row_a.iter_mut().zip(row_b) {
            *a += b;
        }
    }
}

/// Polynomial product of two size-weight vectors.
fn conv_poly<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, av) in a.iter().enumerate() {
        if av.is_zero() {
            continue;
        }
        for (j, bv) in b.iter().enumerate() {
            if bv.is_zero() {
                continue;
            }
            let mut t = av.clone();
            t *= bv;
            out[i + j] += &t;
        }
    }
    out
}

/// Double convolution of two triangular tables (indices add componentwise).
/// Ranges are truncated to the actual child table sizes; every skipped entry
/// is provably zero.
fn conv_tri<S: Scalar>(a: &Tri<S>, b: &Tri<S>) -> Tri<S> {
    let (ma, mb) = (a.len() - 1, b.len() - 1);
    let mut out = tri_zero(ma + mb);
    for (ka, row_a) in a.iter().enumerate() {
        for (la, av) in row_a.iter().enumerate() {
            if av.is_zero() {
                continue;
            }
            for (kb, row_b) in b.iter().enumerate() {
                for (lb, bv) in row_b.iter().enumerate() {
                    if bv.is_zero() {
                        continue;
                    }
                    let mut t = av.clone();
                    t *= bv;
                    out[ka + kb][la + lb] += &t;
                }
            }
        }
    }
    out
}

/// Per-gate dynamic-programming state. For a gate `g` with scope `W`, write
/// `W' = W ∖ {x}` for the distinguished variable `x` (when one is set) and
/// `m = |W'|`. Then for `0 ≤ l ≤ k ≤ m`:
///
/// - `delta[k]      = Σ_{Z⊆W', |Z|=k} Π_{W'}(Z)`,
/// - `with_x[k][l]  = Σ_{Z⊆W', |Z|=k} Π_{W'}(Z) · #{E ⊆ Z, |E|=l : g((E∪{x})∩W)}`,
/// - `without_x[k][l]` likewise counting `g(E ∩ W)`.
///
/// When `x ∉ W` (in particular whenever no `x` is set) the two tables
/// coincide and `without_x` is `None`; [`GateTables::without`] resolves the
/// shared view.
struct GateTables<S> {
    delta: Vec<S>,
    with_x: Tri<S>,
    without_x: Option<Tri<S>>,
}

impl<S: Scalar> GateTables<S> {
    fn without(&self) -> &Tri<S> {
        self.without_x.as_ref().unwrap_or(&self.with_x)
    }

    fn max_bits(&self) -> u64 {
        let mut max = 0;
        for v in &self.delta {
            max = max.max(v.bit_size());
        }
        for row in self.with_x.iter().chain(self.without_x.iter().flatten()) {
            for v in row {
                max = max.max(v.bit_size());
            }
        }
        max
    }
}

/// One bottom-up sweep over a tight circuit computing the [`GateTables`] of
/// every live gate and returning the output gate's tables together with the
/// largest intermediate bit size. Child tables are freed as soon as their
/// last parent has consumed them.
fn sweep_tables<S: Scalar>(
    c: &Circuit,
    p: &Probabilities,
    x: Option<VarId>,
) -> Result<(GateTables<S>, u64)> {
    p.validate_for(c)?;
    ensure_sweep_structure(c)?;
    if let Some(xv) = x {
        if !c.universe().contains(xv) {
            return Err(Error::UnknownVariable { var: xv });
        }
    }
    let binom = BinomialTable::new(c.universe().len());
    let live = live_mask(c);
    let mut refs = vec![0usize; c.num_gates()];
    for (i, gate) in c.gates().iter().enumerate() {
        if live[i] {
            for ch in gate.children() {
                refs[ch.0] += 1;
            }
        }
    }
    let mut tables: Vec<Option<GateTables<S>>> = (0..c.num_gates()).map(|_| None).collect();
    let mut max_bits = 0u64;
    for (i, gate) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let has_x = x.is_some_and(|xv| c.vars(GateId(i)).contains(xv));
        let t = match gate {
            Gate::True | Gate::False => GateTables {
                delta: vec![S::one()],
                with_x: vec![vec![if matches!(gate, Gate::True) {
                    S::one()
                } else {
                    S::zero()
                }]],
                without_x: None,
            },
            Gate::Var(y) if has_x => {
                debug_assert_eq!(Some(*y), x);
                GateTables {
                    delta: vec![S::one()],
                    with_x: vec![vec![S::one()]],
                    without_x: Some(vec![vec![S::zero()]]),
                }
            }
            Gate::Var(y) => {
                let py = p.require(*y)?;
                let hit = S::from_rational(py);
                GateTables {
                    delta: vec![S::from_rational(&(Rational::one() - py)), hit.clone()],
                    with_x: vec![vec![S::zero()], vec![S::zero(), hit]],
                    without_x: None,
                }
            }
            Gate::Not(ch) => {
                let child = tables[ch.0].as_ref().expect("child table alive");
                // #{E ⊆ Z, |E| = l} = C(k, l), so complementing the gate
                // turns a count `t` into C(k, l)·delta[k] − t.
                let complement = |tab: &Tri<S>| -> Tri<S> {
                    let mut out = tri_zero(child.delta.len() - 1);
                    for (k, row) in tab.iter().enumerate() {
                        for (l, v) in row.iter().enumerate() {
                            let mut full = S::from_bigint(binom.get(k, l));
                            full *= &child.delta[k];
                            out[k][l] = full - v.clone();
                        }
                    }
                    out
                };
                GateTables {
                    delta: child.delta.clone(),
                    with_x: complement(&child.with_x),
                    without_x: child.without_x.as_ref().map(&complement),
                }
            }
            Gate::Or(cs) => {
                let first = tables[cs[0].0].as_ref().expect("child table alive");
                let delta = first.delta.clone();
                let mut with_x = first.with_x.clone();
                let mut without_x = has_x.then(|| first.without().clone());
                for ch in &cs[1..] {
                    let child = tables[ch.0].as_ref().expect("child table alive");
                    tri_add_assign(&mut with_x, &child.with_x);
                    if let Some(w) = without_x.as_mut() {
                        tri_add_assign(w, child.without());
                    }
                }
                GateTables {
                    delta,
                    with_x,
                    without_x,
                }
            }
            Gate::And(cs) => {
                let first = tables[cs[0].0].as_ref().expect("child table alive");
                let mut delta = first.delta.clone();
                let mut with_x = first.with_x.clone();
                let mut without_x = has_x.then(|| first.without().clone());
                for ch in &cs[1..] {
                    let child = tables[ch.0].as_ref().expect("child table alive");
                    delta = conv_poly(&delta, &child.delta);
                    with_x = conv_tri(&with_x, &child.with_x);
                    without_x = without_x.map(|w| conv_tri(&w, child.without()));
                }
                GateTables {
                    delta,
                    with_x,
                    without_x,
                }
            }
        };
        max_bits = max_bits.max(t.max_bits());
        tables[i] = Some(t);
        for ch in gate.children() {
            refs[ch.0] -= 1;
            if refs[ch.0] == 0 {
                tables[ch.0] = None;
            }
        }
    }
    let out = tables[c.output().0].take().expect("output computed");
    Ok((out, max_bits))
}

/// Expected score of `x` on an already-tight circuit; also reports the
/// largest intermediate bit size.
fn escore_on_tight<S: Scalar>(
    c: &Circuit,
    p: &Probabilities,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<(S, u64)> {
    let (out, max_bits) = sweep_tables::<S>(c, p, Some(x))?;
    let binom = BinomialTable::new(c.universe().len());
    let mut acc = S::zero();
    for (k, (row_with, row_without)) in out.with_x.iter().zip(out.without()).enumerate() {
        for (l, (a, b)) in row_with.iter().zip(row_without).enumerate() {
            let diff = a.clone() - b.clone();
            if diff.is_zero() {
                continue;
            }
            let mut term = S::from_rational(&cf.eval(&binom, k + 1, l)?);
            term *= &diff;
            acc += &term;
        }
    }
    acc *= &S::from_rational(p.require(x)?);
    Ok((acc, max_bits))
}

/// Expected score of `x` under the coefficient function `cf`:
///
/// `escore_cf(φ, x) = Σ_{Z ∋ x} Π_V(Z) Σ_{E⊆Z∖{x}} cf(|Z|, |E|)·[φ(E∪{x}) − φ(E)]`.
///
/// Tightens the circuit, then runs one [`sweep_tables`] pass and combines
/// the output tables as `p_x · Σ_k Σ_l cf(k+1, l)·(with_x − without_x)`.
pub fn escore_dd(
    c: &Circuit,
    p: &Probabilities,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<Rational> {
    Ok(escore_on_tight::<Rational>(&tighten(c)?, p, x, cf)?.0)
}

/// [`escore_dd`] in floating point.
pub fn escore_dd_f64(
    c: &Circuit,
    p: &Probabilities,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<f64> {
    Ok(escore_on_tight::<f64>(&tighten(c)?, p, x, cf)?.0)
}

/// `ennv_{k,l}(φ) = Σ_{Z⊆V, |Z|=k} Π_V(Z) · #{E ⊆ Z, |E| = l : φ(E)}` on a
/// tight circuit, via the same table sweep as [`escore_dd`] with no
/// distinguished variable (0 whenever `l > k`).
pub fn ennv_dd(c: &Circuit, p: &Probabilities, k: usize, l: usize) -> Result<Rational> {
    let (out, _) = sweep_tables::<Rational>(c, p, None)?;
    Ok(out
        .with_x
        .get(k)
        .and_then(|row| row.get(l))
        .cloned()
        .unwrap_or_else(Rational::zero))
}

fn ebanzhaf_generic<S: Scalar>(c: &Circuit, p: &Probabilities, x: VarId) -> Result<S> {
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    p.validate_for(c)?;
    let on = tighten(&condition(c, x, true)?)?;
    let off = tighten(&condition(c, x, false)?)?;
    let rest = p.without(x);
    let mut diff = env_dd_generic::<S>(&on, &rest)? - env_dd_generic::<S>(&off, &rest)?;
    diff *= &S::from_rational(p.require(x)?);
    Ok(diff)
}

/// Expected Banzhaf score of `x`, computed as
/// `p_x · [env(φ|x=1) − env(φ|x=0)]` — two conditionings, two tightenings,
/// and two linear [`env_dd`] passes instead of the quartic table sweep.
pub fn ebanzhaf_dd(c: &Circuit, p: &Probabilities, x: VarId) -> Result<Rational> {
    ebanzhaf_generic(c, p, x)
}

/// [`ebanzhaf_dd`] in floating point.
pub fn ebanzhaf_dd_f64(c: &Circuit, p: &Probabilities, x: VarId) -> Result<f64> {
    ebanzhaf_generic(c, p, x)
}

/// Expected score of `x` when every universe variable shares one probability
/// `p`. Conditioning on `x` and counting models by size gives the closed
/// form
///
/// `Σ_l (#SAT_l(φ|x=1) − #SAT_l(φ|x=0)) · Σ_{k=l}^{n−1} C(n−1−l, k−l) · cf(k+1, l) · p^{k+1} (1−p)^{n−1−k}`
///
/// with `n = |V|`. At `p = 1` only `k = n−1` contributes and the expected
/// score degenerates to the deterministic score of `x` in the game over `V`.
pub fn escore_equal_prob(
    c: &Circuit,
    p: &Rational,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<Rational> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(Error::ProbabilityOutOfRange {
            var: x,
            value: crate::numeric::render_rational(p),
        });
    }
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    let n = c.universe().len();
    let on = count_sat_by_size(&tighten(&condition(c, x, true)?)?)?;
    let off = count_sat_by_size(&tighten(&condition(c, x, false)?)?)?;
    let binom = BinomialTable::new(n);
    let q = Rational::one() - p;
    let mut p_pow = vec![Rational::one()];
    let mut q_pow = vec![Rational::one()];
    for t in 1..=n {
        p_pow.push(&p_pow[t - 1] * p);
        q_pow.push(&q_pow[t - 1] * &q);
    }
    let mut acc = Rational::zero();
    for l in 0..n {
        let models = &on[l] - &off[l];
        if models.is_zero() {
            continue;
        }
        let mut weight = Rational::zero();
        for k in l..n {
            let spread = Rational::from_integer(binom.get(n - 1 - l, k - l).clone());
            weight += spread * cf.eval(&binom, k + 1, l)? * &p_pow[k + 1] * &q_pow[n - 1 - k];
        }
        acc += weight * Rational::from_integer(models);
    }
    Ok(acc)
}

/// Strategy used by [`score_all`] to produce expected scores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Per-gate table sweep ([`escore_dd`]); works for every coefficient
    /// function and probability assignment.
    Direct,
    /// Conditioning plus two linear nested-value passes ([`ebanzhaf_dd`]);
    /// Banzhaf coefficients only.
    BanzhafFast,
    /// Size-stratified model counting ([`escore_equal_prob`]); requires one
    /// shared probability value.
    EqualProb,
    /// Interpolation chain over an expected-value backend
    /// ([`crate::reductions::escore_via_ev`] with [`ev_dd`]).
    Reduction,
    /// Exhaustive enumeration ([`crate::oracle::brute_escore`]); small
    /// universes only.
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::BanzhafFast => "banzhaf-fast",
            Method::EqualProb => "equalprob",
            Method::Reduction => "reduction",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of a batch score computation.
#[derive(Clone, Debug)]
pub struct ScoreReport {
    /// Display name of the coefficient function.
    pub coefficient: String,
    pub method: Method,
    pub scores: BTreeMap<VarId, Rational>,
    pub elapsed: Duration,
    /// Largest intermediate numerator-plus-denominator bit size observed
    /// (0 for methods that do not track it).
    pub max_interior_bits: u64,
}

/// Compute the expected scores of `vars` with the chosen method. Variables
/// may be listed in any order; each must belong to the universe. The circuit
/// is tightened once and shared; per-variable sweeps run in parallel for the
/// methods that allow it.
pub fn score_all(
    c: &Circuit,
    p: &Probabilities,
    cf: &CoefficientFunction,
    method: Method,
    vars: &[VarId],
) -> Result<ScoreReport> {
    let start = Instant::now();
    let mut scores = BTreeMap::new();
    let mut max_interior_bits = 0;
    match method {
        Method::Direct => {
            let tight = tighten(c)?;
            let results: Vec<(VarId, Rational, u64)> = vars
                .par_iter()
                .map(|&x| {
                    escore_on_tight::<Rational>(&tight, p, x, cf)
                        .map(|(score, bits)| (x, score, bits))
                })
                .collect::<Result<_>>()?;
            for (x, score, bits) in results {
                scores.insert(x, score);
                max_interior_bits = max_interior_bits.max(bits);
            }
        }
        Method::BanzhafFast => {
            if !matches!(cf, CoefficientFunction::Banzhaf) {
                return Err(Error::CoefficientMismatch {
                    expected: "banzhaf",
                    got: cf.name().to_string(),
                });
            }
            let results: Vec<(VarId, Rational)> = vars
                .par_iter()
                .map(|&x| ebanzhaf_dd(c, p, x).map(|score| (x, score)))
                .collect::<Result<_>>()?;
            scores.extend(results);
        }
        Method::EqualProb => {
            let value = p.uniform_value().ok_or(Error::EqualProbabilityRequired)?;
            p.validate_for(c)?;
            for &x in vars {
                scores.insert(x, escore_equal_prob(c, value, x, cf)?);
            }
        }
        Method::Reduction => {
            let tight = tighten(c)?;
            for &x in vars {
                let score = crate::reductions::escore_via_ev(ev_dd, &tight, p, x, cf)?;
                scores.insert(x, score);
            }
        }
        Method::Oracle => {
            for &x in vars {
                scores.insert(x, crate::oracle::brute_escore(c, p, x, cf)?);
            }
        }
    }
    Ok(ScoreReport {
        coefficient: cf.to_string(),
        method,
        scores,
        elapsed: start.elapsed(),
        max_interior_bits,
    })
}

/// Floating-point batch scoring; only the sweep-based methods have float
/// implementations.
pub fn score_all_f64(
    c: &Circuit,
    p: &Probabilities,
    cf: &CoefficientFunction,
    method: Method,
    vars: &[VarId],
) -> Result<BTreeMap<VarId, f64>> {
    let mut scores = BTreeMap::new();
    match method {
        Method::Direct => {
            let tight = tighten(c)?;
            let results: Vec<(VarId, f64)> = vars
                .par_iter()
                .map(|&x| escore_on_tight::<f64>(&tight, p, x, cf).map(|(s, _)| (x, s)))
                .collect::<Result<_>>()?;
            scores.extend(results);
        }
        Method::BanzhafFast => {
            if !matches!(cf, CoefficientFunction::Banzhaf) {
                return Err(Error::CoefficientMismatch {
                    expected: "banzhaf",
                    got: cf.name().to_string(),
                });
            }
            let results: Vec<(VarId, f64)> = vars
                .par_iter()
                .map(|&x| ebanzhaf_dd_f64(c, p, x).map(|s| (x, s)))
                .collect::<Result<_>>()?;
            scores.extend(results);
        }
        Method::EqualProb => {
            let value = p.uniform_value().ok_or(Error::EqualProbabilityRequired)?;
            p.validate_for(c)?;
            for &x in vars {
                scores.insert(x, to_f64(&escore_equal_prob(c, value, x, cf)?));
            }
        }
        Method::Reduction | Method::Oracle => {
            return Err(Error::UnsupportedFloatMethod {
                method: method.as_str(),
            });
        }
    }
    Ok(scores)
}
