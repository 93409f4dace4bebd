//! Brute-force reference semantics and seeded random circuit generation.
//!
//! Everything in this module enumerates subsets exhaustively and is
//! intentionally naive: these functions define the meaning of the quantities
//! the fast algorithms compute, and the test suite holds the fast paths to
//! bit-exact agreement with them. Enumeration is guarded: singly-exponential
//! operations accept up to [`MAX_ENUM_VARS`] variables, doubly-exponential
//! ones up to [`MAX_NESTED_ENUM_VARS`].

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, CircuitBuilder, GateId, VarId, VarSet};
use crate::coeffs::{BinomialTable, CoefficientFunction};
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::scores::Probabilities;

/// Variable limit for single subset enumeration (`brute_ev`, `brute_ev_k`,
/// `brute_score`).
pub const MAX_ENUM_VARS: usize = 16;

/// Variable limit for nested subset enumeration (`brute_ennv`, `brute_env`,
/// `brute_escore`).
pub const MAX_NESTED_ENUM_VARS: usize = 12;

fn guard(what: &'static str, limit: usize, actual: usize) -> Result<()> {
    if actual > limit {
        return Err(Error::GuardExceeded {
            what,
            limit,
            actual,
        });
    }
    Ok(())
}

/// All subsets of `universe`, as sorted `VarSet`s, in mask order. The
/// universe may hold at most 63 variables; the brute-force guards keep
/// every caller in this module far below that.
pub fn subsets(universe: &VarSet) -> impl Iterator<Item = VarSet> + '_ {
    let vars = universe.as_slice();
    (0u64..(1u64 << vars.len())).map(move |mask| {
        VarSet::from_sorted(
            vars.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect(),
        )
    })
}

/// Π_V(Z): probability of drawing exactly `z` from `universe`.
pub fn subset_weight(universe: &VarSet, p: &Probabilities, z: &VarSet) -> Result<Rational> {
    let mut w = Rational::one();
    for v in universe.iter() {
        let pv = p.require(v)?;
        if z.contains(v) {
            w *= pv;
        } else {
            w *= Rational::one() - pv;
        }
    }
    Ok(w)
}

/// Expected value `ev(φ) = Σ_{Z⊆V} Π_V(Z)·φ(Z)` by full enumeration.
pub fn brute_ev(c: &Circuit, p: &Probabilities) -> Result<Rational> {
    guard("brute_ev", MAX_ENUM_VARS, c.universe().len())?;
    p.validate_for(c)?;
    let mut acc = Rational::zero();
    for z in subsets(c.universe()) {
        if c.evaluate(&z) {
            acc += subset_weight(c.universe(), p, &z)?;
        }
    }
    Ok(acc)
}

/// Size-stratified expected value `ev_k(φ) = Σ_{|Z|=k} Π_V(Z)·φ(Z)`.
pub fn brute_ev_k(c: &Circuit, p: &Probabilities, k: usize) -> Result<Rational> {
    guard("brute_ev_k", MAX_ENUM_VARS, c.universe().len())?;
    p.validate_for(c)?;
    let mut acc = Rational::zero();
    for z in subsets(c.universe()) {
        if z.len() == k && c.evaluate(&z) {
            acc += subset_weight(c.universe(), p, &z)?;
        }
    }
    Ok(acc)
}

/// Expected number of size-`l` sub-coalitions of a size-`k` draw satisfying
/// φ: `ennv_{k,l}(φ) = Σ_{|Z|=k} Π_V(Z) Σ_{E⊆Z, |E|=l} φ(E)`.
pub fn brute_ennv(c: &Circuit, p: &Probabilities, k: usize, l: usize) -> Result<Rational> {
    guard("brute_ennv", MAX_NESTED_ENUM_VARS, c.universe().len())?;
    p.validate_for(c)?;
    let mut acc = Rational::zero();
    for z in subsets(c.universe()) {
        if z.len() != k {
            continue;
        }
        let hits = subsets(&z).filter(|e| e.len() == l && c.evaluate(e)).count();
        if hits > 0 {
            acc += subset_weight(c.universe(), p, &z)? * Rational::from_integer(hits.into());
        }
    }
    Ok(acc)
}

/// Nested expected value `env(φ) = Σ_Z Π_V(Z) Σ_{E⊆Z} φ(E)`.
pub fn brute_env(c: &Circuit, p: &Probabilities) -> Result<Rational> {
    guard("brute_env", MAX_NESTED_ENUM_VARS, c.universe().len())?;
    p.validate_for(c)?;
    let mut acc = Rational::zero();
    for z in subsets(c.universe()) {
        let hits = subsets(&z).filter(|e| c.evaluate(e)).count();
        if hits > 0 {
            acc += subset_weight(c.universe(), p, &z)? * Rational::from_integer(hits.into());
        }
    }
    Ok(acc)
}

/// Σ_{E ⊆ game∖{x}} c(|game|, |E|)·[φ(E∪{x}) − φ(E)], the score of `x` in
/// the deterministic game over `game`.
fn marginal_score(
    c: &Circuit,
    game: &VarSet,
    x: VarId,
    cf: &CoefficientFunction,
    binom: &BinomialTable,
) -> Result<Rational> {
    let rest = game.without(x);
    let mut acc = Rational::zero();
    for e in subsets(&rest) {
        let mut with_x = e.clone();
        with_x.insert(x);
        let gain = i64::from(c.evaluate(&with_x)) - i64::from(c.evaluate(&e));
        if gain != 0 {
            let w = cf.eval(binom, game.len(), e.len())?;
            acc += w * Rational::from_integer(gain.into());
        }
    }
    Ok(acc)
}

/// Deterministic score of `x` in the game over the full universe:
/// `score_c(φ, V, x)`.
pub fn brute_score(c: &Circuit, x: VarId, cf: &CoefficientFunction) -> Result<Rational> {
    guard("brute_score", MAX_ENUM_VARS, c.universe().len())?;
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    let binom = BinomialTable::new(c.universe().len());
    marginal_score(c, c.universe(), x, cf, &binom)
}

/// Expected score of `x`:
/// `escore_c(φ, x) = Σ_{Z∋x} Π_V(Z)·score_c(φ, Z, x)`.
pub fn brute_escore(
    c: &Circuit,
    p: &Probabilities,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<Rational> {
    guard("brute_escore", MAX_NESTED_ENUM_VARS, c.universe().len())?;
    p.validate_for(c)?;
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    let binom = BinomialTable::new(c.universe().len());
    let mut acc = Rational::zero();
    for z in subsets(c.universe()) {
        if !z.contains(x) {
            continue;
        }
        let score = marginal_score(c, &z, x, cf, &binom)?;
        if !score.is_zero() {
            acc += subset_weight(c.universe(), p, &z)? * score;
        }
    }
    Ok(acc)
}

/// A binary decision tree: the generating structure behind [`random_dd`].
/// Each variable is tested at most once along any root-to-leaf path.
#[derive(Clone, Debug)]
pub struct DecisionTree {
    num_vars: u32,
    root: DtNode,
}

#[derive(Clone, Debug)]
enum DtNode {
    Leaf(bool),
    Split {
        var: VarId,
        hi: Box<DtNode>,
        lo: Box<DtNode>,
    },
}

impl DecisionTree {
    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn evaluate(&self, z: &VarSet) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                DtNode::Leaf(v) => return *v,
                DtNode::Split { var, hi, lo } => {
                    node = if z.contains(*var) { hi } else { lo };
                }
            }
        }
    }

    /// Compile to a circuit: each split becomes `(x ∧ hi) ∨ (¬x ∧ lo)`.
    /// The OR is deterministic (children disagree on `x`) and the ANDs are
    /// decomposable (`x` is tested once per path), so the result is d-D by
    /// construction.
    pub fn to_circuit(&self) -> Circuit {
        fn build(b: &mut CircuitBuilder, node: &DtNode) -> GateId {
            match node {
                DtNode::Leaf(true) => b.true_gate(),
                DtNode::Leaf(false) => b.false_gate(),
                DtNode::Split { var, hi, lo } => {
                    let hi_g = build(b, hi);
                    let lo_g = build(b, lo);
                    let v = b.var(*var).expect("split variable inside universe");
                    let nv = b.not(v);
                    let pos = b.and_gate(vec![v, hi_g]);
                    let neg = b.and_gate(vec![nv, lo_g]);
                    b.or_gate(vec![pos, neg])
                }
            }
        }
        let mut b = CircuitBuilder::new(VarSet::contiguous(self.num_vars));
        let out = build(&mut b, &self.root);
        b.finish(out)
    }
}

/// Seeded random decision tree over `{1, …, num_vars}` with split depth at
/// most `depth`. Same seed, same tree.
pub fn random_decision_tree(seed: u64, num_vars: u32, depth: u32) -> DecisionTree {
    fn gen(rng: &mut ChaCha8Rng, avail: &mut Vec<VarId>, depth: u32) -> DtNode {
        if depth == 0 || avail.is_empty() || rng.random_bool(0.25) {
            return DtNode::Leaf(rng.random_bool(0.5));
        }
        let var = avail.swap_remove(rng.random_range(0..avail.len()));
        let hi = Box::new(gen(rng, avail, depth - 1));
        let lo = Box::new(gen(rng, avail, depth - 1));
        avail.push(var);
        DtNode::Split { var, hi, lo }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut avail: Vec<VarId> = (1..=num_vars).collect();
    DecisionTree {
        num_vars,
        root: gen(&mut rng, &mut avail, depth),
    }
}

/// Seeded random d-D circuit: [`random_decision_tree`] compiled with
/// [`DecisionTree::to_circuit`].
pub fn random_dd(seed: u64, num_vars: u32, depth: u32) -> Circuit {
    random_decision_tree(seed, num_vars, depth).to_circuit()
}

/// Seeded random probabilities over a universe: numerators drawn over
/// denominators up to 64, endpoints 0 and 1 included.
pub fn random_probabilities(seed: u64, universe: &VarSet) -> Probabilities {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Probabilities::new();
    for v in universe.iter() {
        let den = rng.random_range(1u64..=64);
        let num = rng.random_range(0..=den);
        p.set(v, Rational::new(num.into(), den.into()))
            .expect("ratio in [0, 1]");
    }
    p
}
