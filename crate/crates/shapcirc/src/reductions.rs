//! Oracle-parameterized reductions between expected scores and expected
//! values.
//!
//! Every function here treats some expected-quantity computation as a black
//! box (`impl FnMut(...) -> Result<Rational>`) and answers a harder query
//! with a bounded number of oracle calls, by transforming probabilities and
//! interpolating polynomials over exact rationals. Together they show the
//! two directions of an equivalence: expected scores reduce to expected
//! values ([`escore_via_ev`]) and expected values reduce back to expected
//! Shapley or Banzhaf scores ([`ev_from_eshapley`], [`env_from_ebanzhaf`] +
//! [`ev_from_env`]).
//!
//! Oracle-call budgets are part of each function's contract and are asserted
//! by the test suite:
//!
//! | function            | oracle calls                       |
//! |---------------------|------------------------------------|
//! | `evs_from_ev`       | `|V| + 1`                          |
//! | `envss_from_evs`    | `|V| + 1`                          |
//! | `escore_from_envss` | `2·|V|²`                           |
//! | `escore_via_ev`     | `2·(|V| + 1)²`                     |
//! | `ev_from_eshapley`  | `|V|`                              |
//! | `env_from_ebanzhaf` | `1`                                |
//! | `ev_from_env`       | `m + 1`, `m` = variables with p < 1|

use num_traits::{One, Zero};

use crate::circuit::{Circuit, VarId, VarSet};
use crate::coeffs::{BinomialTable, CoefficientFunction};
use crate::error::{Error, Result};
use crate::numeric::{solve_vandermonde, InterpolationGrid, Rational};
use crate::scores::Probabilities;
use crate::transform::{condition, conjoin_fresh_variable};

/// All size-stratified expected values `ev_k(φ) = Σ_{|Z|=k} Π_V(Z)·φ(Z)` for
/// `k = 0, …, |V|`, from an expected-value oracle.
///
/// For a scale factor `z > 0`, replacing every `p_x` by
/// `z·p_x / (1 − p_x + z·p_x)` turns the expected value into a polynomial in
/// `z` whose coefficients are the `ev_k`:
/// `Π_x (1 − p_x + z·p_x) · ev^{z}(φ) = Σ_k z^k · ev_k(φ)`.
/// Evaluating at `|V| + 1` grid nodes and solving the Vandermonde system
/// recovers the coefficients. Exactly `|V| + 1` oracle calls.
pub fn evs_vector_from_ev(
    mut oracle: impl FnMut(&Circuit, &Probabilities) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
) -> Result<Vec<Rational>> {
    p.validate_for(c)?;
    let n = c.universe().len();
    let grid = InterpolationGrid::default_grid(n, None);
    let mut values = Vec::with_capacity(grid.len());
    for z in grid.nodes() {
        let mut scale_product = Rational::one();
        let mut transformed = Probabilities::new();
        for v in c.universe().iter() {
            let pv = p.require(v)?;
            let scale = Rational::one() - pv + z * pv;
            transformed.set(v, z * pv / &scale)?;
            scale_product *= scale;
        }
        values.push(scale_product * oracle(c, &transformed)?);
    }
    solve_vandermonde(&grid, &values)
}

/// `ev_k(φ)` from an expected-value oracle; see [`evs_vector_from_ev`].
pub fn evs_from_ev(
    oracle: impl FnMut(&Circuit, &Probabilities) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
    k: usize,
) -> Result<Rational> {
    let coefficients = evs_vector_from_ev(oracle, c, p)?;
    Ok(coefficients.get(k).cloned().unwrap_or_else(Rational::zero))
}

/// All `ennv_{j,l}(φ)` for fixed `l` and `j = 0, …, |V|`, from a
/// size-stratified expected-value oracle.
///
/// With `p_x` replaced by `z·p_x / (2·z·p_x + 1 − p_x)`, the fixed-size
/// expected value at size `l` satisfies
/// `Π_x (2·z·p_x + 1 − p_x) · ev^{z}_l(φ) = Σ_j z^j · ennv_{j,l}(φ)`,
/// so one interpolation recovers the whole column. Exactly `|V| + 1` oracle
/// calls.
pub fn ennv_column_from_evs(
    mut oracle: impl FnMut(&Circuit, &Probabilities, usize) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
    l: usize,
) -> Result<Vec<Rational>> {
    p.validate_for(c)?;
    let n = c.universe().len();
    let grid = InterpolationGrid::default_grid(n, None);
    let mut values = Vec::with_capacity(grid.len());
    for z in grid.nodes() {
        let mut scale_product = Rational::one();
        let mut transformed = Probabilities::new();
        for v in c.universe().iter() {
            let pv = p.require(v)?;
            let two_zp = Rational::from_integer(2.into()) * z * pv;
            let scale = &two_zp + Rational::one() - pv;
            transformed.set(v, z * pv / &scale)?;
            scale_product *= scale;
        }
        values.push(scale_product * oracle(c, &transformed, l)?);
    }
    solve_vandermonde(&grid, &values)
}

/// `ennv_{k,l}(φ) = Σ_{|Z|=k} Π_V(Z)·#{E ⊆ Z, |E|=l : φ(E)}` from a
/// size-stratified expected-value oracle; see [`ennv_column_from_evs`].
pub fn envss_from_evs(
    oracle: impl FnMut(&Circuit, &Probabilities, usize) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
    k: usize,
    l: usize,
) -> Result<Rational> {
    let column = ennv_column_from_evs(oracle, c, p, l)?;
    Ok(column.get(k).cloned().unwrap_or_else(Rational::zero))
}

/// Given the two `(n+1)×(n+1)` tables `with[k][l] = ennv_{k,l}(φ|x=1)` and
/// `without[k][l] = ennv_{k,l}(φ|x=0)` over `V ∖ {x}` (`n = |V| − 1`),
/// combine them into the expected score
/// `p_x · Σ_{k=0}^{n} Σ_{l=0}^{k} cf(k+1, l) · (with[k][l] − without[k][l])`.
fn combine_conditioned_tables(
    with: &[Vec<Rational>],
    without: &[Vec<Rational>],
    p_x: &Rational,
    n: usize,
    cf: &CoefficientFunction,
) -> Result<Rational> {
    let binom = BinomialTable::new(n + 1);
    let mut acc = Rational::zero();
    for k in 0..=n {
        for l in 0..=k {
            let diff = &with[k][l] - &without[k][l];
            if diff.is_zero() {
                continue;
            }
            acc += cf.eval(&binom, k + 1, l)? * diff;
        }
    }
    Ok(acc * p_x)
}

/// Expected score of `x` from an `ennv_{k,l}` oracle.
///
/// Conditioning is simulated through the probabilities rather than by
/// rewriting the circuit: querying the oracle with `p_x = 0` yields
/// `ennv_{k,l}(φ|x=0)` directly, and with `p_x = 1` it yields
/// `ennv_{k+1,l+1} = ennv_{k,l+1}(φ|x=0) + ennv_{k,l}(φ|x=1)`, from which the
/// conditioned-on-true table follows by subtraction. Exactly `2·|V|²` oracle
/// calls (`(n+1)²` per conditioning, `n = |V| − 1`).
pub fn escore_from_envss(
    mut oracle: impl FnMut(&Circuit, &Probabilities, usize, usize) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<Rational> {
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    p.validate_for(c)?;
    let n = c.universe().len() - 1;
    let p_x = p.require(x)?.clone();
    let absent = p.with(x, Rational::zero())?;
    let present = p.with(x, Rational::one())?;

    let mut without = vec![vec![Rational::zero(); n + 1]; n + 1];
    for (i, row) in without.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = oracle(c, &absent, i, j)?;
        }
    }
    let mut with = vec![vec![Rational::zero(); n + 1]; n + 1];
    for (k, row) in with.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            let shifted = oracle(c, &present, k + 1, l + 1)?;
            let spill = if l < n {
                without[k][l + 1].clone()
            } else {
                Rational::zero()
            };
            *entry = shifted - spill;
        }
    }
    combine_conditioned_tables(&with, &without, &p_x, n, cf)
}

/// The full `(|V|+1)×(|V|+1)` table `ennv_{k,l}(φ)` from an expected-value
/// backend, nesting the two interpolations so that the inner `|V| + 1` calls
/// are shared across every `l`: `(|V| + 1)²` backend calls in total.
fn ennv_matrix_from_ev(
    mut backend: impl FnMut(&Circuit, &Probabilities) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
) -> Result<Vec<Vec<Rational>>> {
    let n = c.universe().len();
    let grid = InterpolationGrid::default_grid(n, None);
    let mut scale_products = Vec::with_capacity(grid.len());
    let mut evs_per_node = Vec::with_capacity(grid.len());
    for z in grid.nodes() {
        let mut scale_product = Rational::one();
        let mut transformed = Probabilities::new();
        for v in c.universe().iter() {
            let pv = p.require(v)?;
            let scale = Rational::from_integer(2.into()) * z * pv + Rational::one() - pv;
            transformed.set(v, z * pv / &scale)?;
            scale_product *= scale;
        }
        evs_per_node.push(evs_vector_from_ev(&mut backend, c, &transformed)?);
        scale_products.push(scale_product);
    }
    let mut matrix = vec![vec![Rational::zero(); n + 1]; n + 1];
    for l in 0..=n {
        let values: Vec<Rational> = evs_per_node
            .iter()
            .zip(&scale_products)
            .map(|(evs, scale)| &evs[l] * scale)
            .collect();
        let column = solve_vandermonde(&grid, &values)?;
        for (j, value) in column.into_iter().enumerate() {
            matrix[j][l] = value;
        }
    }
    Ok(matrix)
}

/// Expected score of `x` from a plain expected-value backend: the
/// composition of the interpolation reductions, with the intermediate
/// vectors shared so the backend is consulted exactly `2·(|V| + 1)²` times.
pub fn escore_via_ev(
    mut backend: impl FnMut(&Circuit, &Probabilities) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
    x: VarId,
    cf: &CoefficientFunction,
) -> Result<Rational> {
    if !c.universe().contains(x) {
        return Err(Error::UnknownVariable { var: x });
    }
    p.validate_for(c)?;
    let n = c.universe().len() - 1;
    let p_x = p.require(x)?.clone();
    let absent_full = ennv_matrix_from_ev(&mut backend, c, &p.with(x, Rational::zero())?)?;
    let present_full = ennv_matrix_from_ev(&mut backend, c, &p.with(x, Rational::one())?)?;

    let mut without = vec![vec![Rational::zero(); n + 1]; n + 1];
    let mut with = vec![vec![Rational::zero(); n + 1]; n + 1];
    for k in 0..=n {
        for l in 0..=n {
            without[k][l] = absent_full[k][l].clone();
            let spill = if l < n {
                absent_full[k][l + 1].clone()
            } else {
                Rational::zero()
            };
            with[k][l] = &present_full[k + 1][l + 1] - spill;
        }
    }
    combine_conditioned_tables(&with, &without, &p_x, n, cf)
}

/// `ev(φ)` from an expected-Shapley oracle, via efficiency:
/// the expected Shapley scores of all variables sum to `ev(φ) − φ(∅)`.
/// Exactly `|V|` oracle calls.
pub fn ev_from_eshapley(
    mut oracle: impl FnMut(&Circuit, &Probabilities, VarId) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
) -> Result<Rational> {
    let mut acc = if c.evaluate(&VarSet::empty()) {
        Rational::one()
    } else {
        Rational::zero()
    };
    for x in c.universe().iter() {
        acc += oracle(c, p, x)?;
    }
    Ok(acc)
}

/// `env(φ)` from an expected-Banzhaf oracle, in one call: conjoin a fresh
/// always-present variable `t`, so that `φ′|t=1 = φ` and `φ′|t=0 ≡ 0`, and
/// observe `ebanzhaf(φ′, t) = 1·[env(φ) − 0]`.
pub fn env_from_ebanzhaf(
    mut oracle: impl FnMut(&Circuit, &Probabilities, VarId) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
) -> Result<Rational> {
    p.validate_for(c)?;
    let fresh: VarId = c.universe().max().map_or(1, |m| m + 1);
    let extended = conjoin_fresh_variable(c, fresh)?;
    let q = p.with(fresh, Rational::one())?;
    oracle(&extended, &q, fresh)
}

/// `ev(φ)` from a nested-expected-value oracle.
///
/// Variables with `p_x = 1` are first eliminated by conditioning (they are
/// present in every draw). For the rest, replacing `p_x` by
/// `z·p_x / (1 − p_x)` gives
/// `Π_x (1 − p_x) · env^{z}(φ) = Σ_j z^j · ev_j(φ)`,
/// valid for `z` below `1 − max_x p_x` (where the transformed values stay in
/// [0, 1]); interpolation recovers the `ev_j`, whose sum is `ev(φ)`.
/// Exactly `m + 1` oracle calls, `m` = number of surviving variables.
pub fn ev_from_env(
    mut oracle: impl FnMut(&Circuit, &Probabilities) -> Result<Rational>,
    c: &Circuit,
    p: &Probabilities,
) -> Result<Rational> {
    p.validate_for(c)?;
    let mut work = c.clone();
    for v in c.universe().iter() {
        if p.require(v)? == &Rational::one() {
            work = condition(&work, v, true)?;
        }
    }
    let survivors = work.universe().clone();
    let n = survivors.len();
    if n == 0 {
        return Ok(if work.evaluate(&VarSet::empty()) {
            Rational::one()
        } else {
            Rational::zero()
        });
    }
    let max_p = survivors
        .iter()
        .map(|v| p.require(v))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .expect("nonempty")
        .clone();
    let bound = Rational::one() - max_p;
    let grid = InterpolationGrid::default_grid(n, Some(&bound));
    let mut constant = Rational::one();
    for v in survivors.iter() {
        constant *= Rational::one() - p.require(v)?;
    }
    let mut values = Vec::with_capacity(grid.len());
    for z in grid.nodes() {
        let mut transformed = Probabilities::new();
        for v in survivors.iter() {
            let pv = p.require(v)?;
            transformed.set(v, z * pv / (Rational::one() - pv))?;
        }
        values.push(&constant * &oracle(&work, &transformed)?);
    }
    let coefficients = solve_vandermonde(&grid, &values)?;
    Ok(coefficients.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoefficientFunction;
    use crate::numeric::rat;
    use crate::oracle::{
        brute_ennv, brute_env, brute_escore, brute_ev, brute_ev_k, random_dd,
        random_probabilities,
    };
    use crate::scores::{ebanzhaf_dd, ennv_dd, env, escore_dd, ev_dd};
    use crate::testutil::{ex_circuit, ex_probs};
    use crate::transform::disjoin_fresh_variable;

    fn builtin_coeffs() -> [CoefficientFunction; 3] {
        [
            CoefficientFunction::Shapley,
            CoefficientFunction::Banzhaf,
            CoefficientFunction::PenroseBanzhaf,
        ]
    }

    #[test]
    fn evs_from_ev_matches_the_oracle_and_its_call_budget() {
        let c = ex_circuit();
        let p = ex_probs();
        let mut calls = 0usize;
        let value = evs_from_ev(
            |cc, pp| {
                calls += 1;
                brute_ev(cc, pp)
            },
            &c,
            &p,
            2,
        )
        .unwrap();
        assert_eq!(value, rat(4, 25));
        assert_eq!(calls, 5);
        for k in 0..=4 {
            assert_eq!(
                evs_from_ev(brute_ev, &c, &p, k).unwrap(),
                brute_ev_k(&c, &p, k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn evs_from_ev_boundary_cases() {
        let c = ex_circuit();
        let p = ex_probs();
        // k = 0 isolates the empty coalition, and φ_ex(∅) = 0.
        assert_eq!(evs_from_ev(brute_ev, &c, &p, 0).unwrap(), rat(0, 1));

        let top = Circuit::parse("ddc 3\nt\n").unwrap();
        let q = random_probabilities(2, top.universe());
        let all = q
            .iter()
            .fold(Rational::one(), |acc, (_, pv)| acc * pv.clone());
        assert_eq!(evs_from_ev(brute_ev, &top, &q, 3).unwrap(), all);
    }

    #[test]
    fn envss_from_evs_matches_the_oracle_and_its_call_budget() {
        let c = ex_circuit();
        let p = ex_probs();
        let mut calls = 0usize;
        let value = envss_from_evs(
            |cc, pp, l| {
                calls += 1;
                brute_ev_k(cc, pp, l)
            },
            &c,
            &p,
            3,
            2,
        )
        .unwrap();
        assert_eq!(value, brute_ennv(&c, &p, 3, 2).unwrap());
        assert_eq!(calls, 5);
        for k in 0..=4 {
            for l in 0..=4 {
                assert_eq!(
                    envss_from_evs(brute_ev_k, &c, &p, k, l).unwrap(),
                    brute_ennv(&c, &p, k, l).unwrap(),
                    "(k, l) = ({k}, {l})"
                );
            }
        }
        // Above the diagonal everything vanishes.
        assert_eq!(envss_from_evs(brute_ev_k, &c, &p, 1, 3).unwrap(), rat(0, 1));
    }

    #[test]
    fn escore_from_envss_matches_the_direct_algorithm() {
        let c = ex_circuit();
        let p = ex_probs();
        for cf in builtin_coeffs() {
            for x in 1..=4 {
                let mut calls = 0usize;
                let via_oracle = escore_from_envss(
                    |cc, pp, k, l| {
                        calls += 1;
                        ennv_dd(cc, pp, k, l)
                    },
                    &c,
                    &p,
                    x,
                    &cf,
                )
                .unwrap();
                assert_eq!(via_oracle, escore_dd(&c, &p, x, &cf).unwrap());
                assert_eq!(calls, 32, "2·(n+1)² with n = 3");
            }
        }
    }

    #[test]
    fn escore_from_envss_degenerate_inputs() {
        let shapley = CoefficientFunction::Shapley;
        // A variable the circuit never reads scores zero.
        let dummy = Circuit::parse("ddc 5\nv 1\nv 2\na 0 1\n").unwrap();
        let dp = random_probabilities(9, dummy.universe());
        assert_eq!(
            escore_from_envss(brute_ennv, &dummy, &dp, 4, &shapley).unwrap(),
            rat(0, 1)
        );
        // A variable that is never drawn scores zero.
        let c = ex_circuit();
        let p = ex_probs().with(1, rat(0, 1)).unwrap();
        assert_eq!(
            escore_from_envss(brute_ennv, &c, &p, 1, &shapley).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn escore_via_ev_matches_the_direct_algorithm() {
        let c = ex_circuit();
        let p = ex_probs();
        for cf in builtin_coeffs() {
            for x in 1..=4 {
                let mut calls = 0usize;
                let via_backend = escore_via_ev(
                    |cc, pp| {
                        calls += 1;
                        ev_dd(cc, pp)
                    },
                    &c,
                    &p,
                    x,
                    &cf,
                )
                .unwrap();
                assert_eq!(via_backend, escore_dd(&c, &p, x, &cf).unwrap());
                assert_eq!(calls, 50, "2·(|V|+1)² with |V| = 4");
            }
        }
    }

    #[test]
    fn escore_via_ev_matches_brute_force_on_random_circuits() {
        let shapley = CoefficientFunction::Shapley;
        for seed in 60..64u64 {
            let num_vars = 1 + (seed % 4) as u32;
            let c = random_dd(seed, num_vars, 4);
            let p = random_probabilities(seed, c.universe());
            for x in 1..=num_vars {
                assert_eq!(
                    escore_via_ev(brute_ev, &c, &p, x, &shapley).unwrap(),
                    brute_escore(&c, &p, x, &shapley).unwrap(),
                    "seed {seed}, variable {x}"
                );
            }
        }
    }

    #[test]
    fn ev_from_eshapley_reproduces_the_expected_value() {
        let c = ex_circuit();
        let p = ex_probs();
        let shapley = CoefficientFunction::Shapley;
        let mut calls = 0usize;
        let value = ev_from_eshapley(
            |cc, pp, x| {
                calls += 1;
                escore_dd(cc, pp, x, &shapley)
            },
            &c,
            &p,
        )
        .unwrap();
        assert_eq!(value, rat(73, 125));
        assert_eq!(calls, 4);

        // φ(∅) enters for functions satisfied by the empty coalition.
        let top = Circuit::parse("ddc 2\nt\n").unwrap();
        let q = random_probabilities(3, top.universe());
        let oracle = |cc: &Circuit, pp: &Probabilities, x| escore_dd(cc, pp, x, &shapley);
        assert_eq!(ev_from_eshapley(oracle, &top, &q).unwrap(), rat(1, 1));

        let single = Circuit::parse("ddc 1\nv 1\n").unwrap();
        let mut sp = Probabilities::new();
        sp.set(1, rat(2, 5)).unwrap();
        assert_eq!(ev_from_eshapley(oracle, &single, &sp).unwrap(), rat(2, 5));
    }

    #[test]
    fn env_from_ebanzhaf_matches_env_dd() {
        let calls = std::cell::Cell::new(0usize);
        let mut oracle = |cc: &Circuit, pp: &Probabilities, x| {
            calls.set(calls.get() + 1);
            ebanzhaf_dd(cc, pp, x)
        };

        let top = Circuit::parse("ddc 1\nt\n").unwrap();
        let half = Probabilities::uniform(top.universe(), &rat(1, 2)).unwrap();
        assert_eq!(env_from_ebanzhaf(&mut oracle, &top, &half).unwrap(), rat(3, 2));
        assert_eq!(calls.get(), 1);

        let bottom = Circuit::parse("ddc 1\nf\n").unwrap();
        assert_eq!(
            env_from_ebanzhaf(&mut oracle, &bottom, &half).unwrap(),
            rat(0, 1)
        );

        let c = ex_circuit();
        let p = ex_probs();
        assert_eq!(
            env_from_ebanzhaf(&mut oracle, &c, &p).unwrap(),
            env(&c, &p).unwrap()
        );
        assert_eq!(
            env_from_ebanzhaf(&mut oracle, &c, &p).unwrap(),
            brute_env(&c, &p).unwrap()
        );
    }

    #[test]
    fn env_also_follows_from_a_disjoined_fresh_variable() {
        // The dual closure: with φ″ = ¬(¬φ ∧ ¬t) and p_t = 1,
        // ebanzhaf(φ″, t) counts every subset, so
        // env(φ) = Π_y (1 + p_y) − ebanzhaf(φ″, t).
        let c = ex_circuit();
        let p = ex_probs();
        let fresh = 5;
        let extended = disjoin_fresh_variable(&c, fresh).unwrap();
        let q = p.with(fresh, rat(1, 1)).unwrap();
        let full = c
            .universe()
            .iter()
            .fold(Rational::one(), |acc, y| {
                acc * (Rational::one() + p.require(y).unwrap())
            });
        assert_eq!(
            full - ebanzhaf_dd(&extended, &q, fresh).unwrap(),
            env(&c, &p).unwrap()
        );
    }

    #[test]
    fn ev_from_env_matches_the_expected_value() {
        let c = ex_circuit();
        let p = ex_probs();
        let mut calls = 0usize;
        let value = ev_from_env(
            |cc, pp| {
                calls += 1;
                env(cc, pp)
            },
            &c,
            &p,
        )
        .unwrap();
        assert_eq!(value, rat(73, 125));
        assert_eq!(calls, 5);
    }

    #[test]
    fn ev_from_env_eliminates_certain_variables_first() {
        // p = 1 would break the z·p/(1−p) transform; conditioning removes it.
        let single = Circuit::parse("ddc 1\nv 1\n").unwrap();
        let one = Probabilities::uniform(single.universe(), &rat(1, 1)).unwrap();
        let mut calls = 0usize;
        let value = ev_from_env(
            |cc, pp| {
                calls += 1;
                env(cc, pp)
            },
            &single,
            &one,
        )
        .unwrap();
        assert_eq!(value, rat(1, 1));
        assert_eq!(calls, 0, "everything was eliminated by conditioning");

        let c = ex_circuit();
        let mut p = ex_probs();
        p.set(2, rat(1, 1)).unwrap();
        let mut counted = 0usize;
        let value = ev_from_env(
            |cc, pp| {
                counted += 1;
                env(cc, pp)
            },
            &c,
            &p,
        )
        .unwrap();
        assert_eq!(value, brute_ev(&c, &p).unwrap());
        assert_eq!(counted, 4, "three surviving variables, so four calls");
    }

    #[test]
    fn ev_from_env_matches_brute_force_on_random_circuits() {
        for seed in 70..78u64 {
            let num_vars = 1 + (seed % 8) as u32;
            let c = random_dd(seed, num_vars, 6);
            let p = random_probabilities(seed, c.universe());
            assert_eq!(
                ev_from_env(env, &c, &p).unwrap(),
                brute_ev(&c, &p).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn banzhaf_round_trip_recovers_the_expected_value() {
        let c = ex_circuit();
        let p = ex_probs();
        let value = ev_from_env(
            |cc, pp| env_from_ebanzhaf(ebanzhaf_dd, cc, pp),
            &c,
            &p,
        )
        .unwrap();
        assert_eq!(value, ev_dd(&c, &p).unwrap());

        for seed in 80..85u64 {
            let num_vars = 1 + (seed % 5) as u32;
            let rc = random_dd(seed, num_vars, 5);
            let rp = random_probabilities(seed, rc.universe());
            assert_eq!(
                ev_from_env(
                    |cc, pp| env_from_ebanzhaf(ebanzhaf_dd, cc, pp),
                    &rc,
                    &rp,
                )
                .unwrap(),
                brute_ev(&rc, &rp).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn interpolated_probabilities_stay_valid_at_extreme_inputs() {
        // The probability transforms must keep every value in [0, 1] even at
        // the endpoints; `Probabilities::set` rejects violations, so a
        // successful run is itself the assertion.
        let mixed = {
            let mut p = Probabilities::new();
            p.set(1, rat(0, 1)).unwrap();
            p.set(2, rat(1, 1)).unwrap();
            p.set(3, rat(1, 64)).unwrap();
            p
        };
        let tree = random_dd(91, 3, 3);
        assert_eq!(
            evs_from_ev(brute_ev, &tree, &mixed, 2).unwrap(),
            brute_ev_k(&tree, &mixed, 2).unwrap()
        );
        assert_eq!(
            envss_from_evs(brute_ev_k, &tree, &mixed, 2, 1).unwrap(),
            brute_ennv(&tree, &mixed, 2, 1).unwrap()
        );
        assert_eq!(
            ev_from_env(env, &tree, &mixed).unwrap(),
            brute_ev(&tree, &mixed).unwrap()
        );
    }
}
