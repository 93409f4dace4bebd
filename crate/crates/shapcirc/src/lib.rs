//! Expected Shapley-like scores of Boolean functions represented as
//! deterministic and decomposable (d-D) Boolean circuits, under independent
//! per-variable probabilities.
//!
//! The crate provides:
//!
//! * a circuit representation with a line-oriented text format, evaluation,
//!   and structural analysis ([`circuit`]);
//! * structure-preserving rewrites — tightening, conditioning, fresh-variable
//!   conjunction ([`transform`]);
//! * exact score algorithms on tight d-D circuits: expected value, nested
//!   expected value, size-stratified model counting, the general
//!   expected-score dynamic program, a linear-time expected-Banzhaf path, and
//!   a closed form for equal probabilities ([`scores`]);
//! * oracle-parameterized reductions connecting expected scores and expected
//!   values in both directions ([`reductions`]);
//! * brute-force reference semantics and seeded random circuit generation
//!   used to cross-check everything ([`oracle`]);
//! * a tuple-independent probabilistic-database front end: CSV tables, a
//!   small conjunctive-query evaluator with why-provenance, and per-fact
//!   scoring ([`provenance`]).
//!
//! All score computations are exact over arbitrary-precision rationals; an
//! opt-in `f64` mode exists for the direct algorithms only.

pub mod circuit;
pub mod coeffs;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod provenance;
pub mod reductions;
pub mod scores;
pub mod transform;

#[cfg(test)]
pub(crate) mod testutil;

pub use circuit::{Circuit, Gate, GateId, VarId, VarSet};
pub use error::{Error, Result};
pub use numeric::Rational;
pub use scores::Probabilities;
