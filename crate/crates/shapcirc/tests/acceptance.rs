//! Acceptance gate: eight end-to-end criteria covering expected values,
//! expected scores, the oracle reductions, circuit transforms, the
//! provenance pipeline, scaling behaviour, and cross-method agreement.
//! Each test prints one `criterion N: PASS — …` line (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

use std::cell::Cell;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use shapcirc::coeffs::CoefficientFunction;
use shapcirc::numeric::{rat, render_decimal, to_f64};
use shapcirc::oracle::{
    brute_ennv, brute_env, brute_escore, brute_ev, brute_ev_k, random_dd, random_probabilities,
    subset_weight, subsets,
};
use shapcirc::provenance::{eval_provenance, fact_escore, query_holds, ConjunctiveQuery, TidDatabase};
use shapcirc::reductions::{
    ennv_column_from_evs, env_from_ebanzhaf, escore_via_ev, ev_from_env, ev_from_eshapley,
    evs_vector_from_ev,
};
use shapcirc::scores::{
    ebanzhaf_dd, env, env_dd, escore_dd, escore_equal_prob, ev, ev_dd, score_all, Method,
};
use shapcirc::transform::tighten;
use shapcirc::{Circuit, Probabilities, Rational};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// The worked four-variable example: `(1 ∧ 2) ∨ (3 ∧ 4)` as a d-D circuit
/// with probabilities 2/5, 1/2, 3/5, 4/5.
fn example() -> (Circuit, Probabilities) {
    let c = Circuit::parse(&std::fs::read_to_string(fixture("phi_ex.ddc")).unwrap()).unwrap();
    let p = Probabilities::parse(&std::fs::read_to_string(fixture("ex.prob")).unwrap()).unwrap();
    (c, p)
}

/// Shared randomized corpus: 200 seeded circuits over 1–8 variables with
/// small-denominator probabilities (endpoints 0 and 1 included).
fn corpus() -> Vec<(Circuit, Probabilities)> {
    (0..200u64)
        .map(|i| {
            let num_vars = 1 + (i % 8) as u32;
            let depth = 2 + (i % 4) as u32;
            let c = random_dd(1000 + i, num_vars, depth);
            let p = random_probabilities(2000 + i, c.universe());
            (c, p)
        })
        .collect()
}

fn all_coefficients() -> [CoefficientFunction; 3] {
    [
        CoefficientFunction::Shapley,
        CoefficientFunction::Banzhaf,
        CoefficientFunction::PenroseBanzhaf,
    ]
}

#[test]
fn criterion_1_expected_value_four_ways() {
    let (c, p) = example();
    let want = rat(73, 125);
    let start = Instant::now();

    assert_eq!(ev_dd(&c, &p).unwrap(), want, "direct sweep");
    assert_eq!(brute_ev(&c, &p).unwrap(), want, "brute enumeration");
    assert_eq!(
        ev_from_env(env_dd, &c, &p).unwrap(),
        want,
        "reduction from expected nested value"
    );
    assert_eq!(
        ev_from_eshapley(
            |c, p, x| escore_dd(c, p, x, &CoefficientFunction::Shapley),
            &c,
            &p
        )
        .unwrap(),
        want,
        "reduction from expected Shapley scores"
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1: PASS — ev = 73/125 = {} via direct, brute force, \
         env reduction, and Shapley reduction in {elapsed:?}",
        render_decimal(&want)
    );
}

#[test]
fn criterion_2_worked_shapley_scores() {
    let (c, p) = example();
    let cf = CoefficientFunction::Shapley;
    let start = Instant::now();

    let scores: Vec<Rational> = (1..=4)
        .map(|x| escore_dd(&c, &p, x, &cf).unwrap())
        .collect();

    // Published decimals hold to within 5·10⁻⁴.
    for (x, want) in [(1usize, 0.076), (2, 0.076), (3, 0.216), (4, 0.216)] {
        let got = to_f64(&scores[x - 1]);
        assert!(
            (got - want).abs() < 5e-4,
            "variable {x}: got {got}, want ≈{want}"
        );
    }

    // Efficiency: the scores sum exactly to the expected value.
    let total: Rational = scores.iter().cloned().sum();
    assert_eq!(total, rat(73, 125));

    // With every probability at one the game is deterministic and the four
    // symmetric variables split the unit of value evenly.
    let ones = Probabilities::uniform(c.universe(), &Rational::one()).unwrap();
    for x in 1..=4 {
        assert_eq!(escore_dd(&c, &ones, x, &cf).unwrap(), rat(1, 4));
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 2: PASS — Shapley scores (0.076, 0.076, 0.216, 0.216), \
         sum exactly 73/125, all-certain case exactly 1/4 each, in {elapsed:?}"
    );
}

#[test]
fn criterion_3_randomized_against_brute_force() {
    let corpus = corpus();
    assert!(corpus.len() >= 200);
    let start = Instant::now();
    let mut checks = 0usize;

    for (c, p) in &corpus {
        let uniform_p = p.require(c.universe().iter().next().unwrap()).unwrap().clone();
        let uniform = Probabilities::uniform(c.universe(), &uniform_p).unwrap();
        for cf in all_coefficients() {
            for x in c.universe().iter() {
                let brute = brute_escore(c, p, x, &cf).unwrap();
                assert_eq!(escore_dd(c, p, x, &cf).unwrap(), brute, "escore_dd");
                assert_eq!(
                    escore_via_ev(ev, c, p, x, &cf).unwrap(),
                    brute,
                    "escore_via_ev"
                );
                checks += 2;
                if cf == CoefficientFunction::Banzhaf {
                    assert_eq!(ebanzhaf_dd(c, p, x).unwrap(), brute, "ebanzhaf_dd");
                    checks += 1;
                }

                let brute_uniform = brute_escore(c, &uniform, x, &cf).unwrap();
                assert_eq!(
                    escore_equal_prob(c, &uniform_p, x, &cf).unwrap(),
                    brute_uniform,
                    "escore_equal_prob"
                );
                checks += 1;
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    println!(
        "criterion 3: PASS — {checks} bit-exact comparisons against brute force \
         over {} circuits × 3 coefficient functions in {elapsed:?}",
        corpus.len()
    );
}

#[test]
fn criterion_4_interpolation_reductions() {
    let corpus = corpus();
    let start = Instant::now();
    let mut circuits = 0usize;

    for (c, p) in &corpus {
        let n = c.universe().len();

        // evs_from_ev: the whole size-stratified vector from |V|+1 oracle
        // calls, bit-exact against brute enumeration for every k.
        let calls = Cell::new(0usize);
        let vector = evs_vector_from_ev(
            |c, p| {
                calls.set(calls.get() + 1);
                ev(c, p)
            },
            c,
            p,
        )
        .unwrap();
        assert_eq!(calls.get(), n + 1, "evs_from_ev call budget");
        assert_eq!(vector.len(), n + 1);
        for (k, got) in vector.iter().enumerate() {
            assert_eq!(got, &brute_ev_k(c, p, k).unwrap(), "ev_{k}");
        }

        // envss_from_evs: each fixed-ℓ column from |V|+1 evs-oracle calls,
        // bit-exact against brute enumeration for every (k, ℓ).
        for l in 0..=n {
            let calls = Cell::new(0usize);
            let column = ennv_column_from_evs(
                |c, p, k| {
                    calls.set(calls.get() + 1);
                    let v = evs_vector_from_ev(ev, c, p)?;
                    Ok(v.get(k).cloned().unwrap_or_else(Rational::zero))
                },
                c,
                p,
                l,
            )
            .unwrap();
            assert_eq!(calls.get(), n + 1, "envss_from_evs call budget");
            for (k, got) in column.iter().enumerate() {
                assert_eq!(got, &brute_ennv(c, p, k, l).unwrap(), "ennv_{k},{l}");
            }
        }

        // env_from_ebanzhaf: one fresh-variable Banzhaf call recovers env.
        let calls = Cell::new(0usize);
        let via_banzhaf = env_from_ebanzhaf(
            |c, p, x| {
                calls.set(calls.get() + 1);
                ebanzhaf_dd(c, p, x)
            },
            c,
            p,
        )
        .unwrap();
        assert_eq!(calls.get(), 1, "env_from_ebanzhaf call budget");
        assert_eq!(via_banzhaf, env(c, p).unwrap());
        assert_eq!(via_banzhaf, brute_env(c, p).unwrap());

        circuits += 1;
    }

    let elapsed = start.elapsed();
    println!(
        "criterion 4: PASS — interpolation reductions bit-exact with exact \
         call budgets (|V|+1, |V|+1 per column, 1) over {circuits} circuits \
         in {elapsed:?}"
    );
}

#[test]
fn criterion_5_tighten_preserves_semantics() {
    let corpus = corpus();
    let start = Instant::now();
    const K: usize = 12;
    let mut worst_ratio = 0.0f64;

    for (c, _) in &corpus {
        let t = tighten(c).unwrap();

        // Exhaustive truth-table equivalence (universes here are ≤ 8 ≤ 10
        // variables).
        assert!(c.universe().len() <= 10);
        for z in subsets(c.universe()) {
            assert_eq!(t.evaluate(&z), c.evaluate(&z));
        }

        // The output is smooth and tight.
        let report = t.analyze_structure(0);
        assert!(report.smooth, "tightened circuit must be smooth");
        assert!(report.tight, "tightened circuit must be tight");

        // Size bound: |tighten(c)| ≤ K·|c|·|V| measured in gates + wires.
        let size = |c: &Circuit| c.num_gates() + c.num_wires();
        let bound = K * size(c) * c.universe().len().max(1);
        assert!(
            size(&t) <= bound,
            "tightened size {} exceeds {K}·{}·{}",
            size(&t),
            size(c),
            c.universe().len()
        );
        worst_ratio = worst_ratio
            .max(size(&t) as f64 / (size(c) * c.universe().len().max(1)) as f64);
    }

    let elapsed = start.elapsed();
    println!(
        "criterion 5: PASS — tighten preserves all truth tables, yields \
         smooth+tight circuits, size ≤ {K}·|c|·|V| (worst observed factor \
         {worst_ratio:.2}) over {} circuits in {elapsed:?}",
        corpus.len()
    );
}

#[test]
fn criterion_6_provenance_pipeline() {
    let db = TidDatabase::load_dir(fixture("tid")).unwrap();
    let q = ConjunctiveQuery::parse(&std::fs::read_to_string(fixture("q_ex.cq")).unwrap()).unwrap();

    // The provenance is the worked two-monomial DNF.
    let dnf = eval_provenance(&db, &q).unwrap();
    assert_eq!(
        dnf.render(&db),
        "(Grades#1 ∧ Students#1) ∨ (Grades#3 ∧ Students#3)"
    );

    let report = fact_escore(&db, &q, &CoefficientFunction::Shapley, Method::Direct).unwrap();
    assert_eq!(report.probability, rat(73, 125));
    assert_eq!(render_decimal(&report.probability), "0.584000000000000");

    // Contributing facts score the worked values; everything else is an
    // exact zero.
    let score = |id: &str| report.report.scores[&db.fact_var(id).unwrap()].clone();
    assert_eq!(score("Students#1"), rat(19, 250));
    assert_eq!(score("Grades#1"), rat(19, 250));
    assert_eq!(score("Students#3"), rat(27, 125));
    assert_eq!(score("Grades#3"), rat(27, 125));
    for id in ["Students#2", "Students#4", "Grades#2", "Grades#4"] {
        assert!(score(id).is_zero(), "{id} does not contribute");
    }
    let total: Rational = report.report.scores.values().cloned().sum();
    assert_eq!(total, report.probability);

    // Probabilistic query evaluation cross-check: enumerate all 2^8
    // subdatabases, run the join on each, and weight by its probability.
    let facts = db.universe();
    let p = db.probabilities();
    let mut direct = Rational::zero();
    let mut worlds = 0usize;
    for w in subsets(&facts) {
        if query_holds(&db, &q, &w).unwrap() {
            direct += subset_weight(&facts, &p, &w).unwrap();
        }
        worlds += 1;
    }
    assert_eq!(worlds, 256);
    assert_eq!(direct, report.probability);

    println!(
        "criterion 6: PASS — provenance {}, probability 73/125 = 0.584, \
         worked score table with exact zeros for non-contributing facts, \
         and 256-world enumeration agrees",
        dnf.render(&db)
    );
}

#[test]
fn criterion_7_scaling_separation() {
    // Deterministic seed search: the first seed from 7000 whose depth-14
    // tree compiles to at least 1000 gates over 50 variables.
    let (seed, c) = (7000u64..)
        .map(|s| (s, random_dd(s, 50, 14)))
        .find(|(_, c)| c.num_gates() >= 1000)
        .unwrap();
    assert!(c.num_gates() >= 1000);
    assert_eq!(c.universe().len(), 50);
    let p = random_probabilities(seed, c.universe());
    let x = 1;

    let start = Instant::now();
    let banzhaf = ebanzhaf_dd(&c, &p, x).unwrap();
    let banzhaf_elapsed = start.elapsed();
    assert!(
        banzhaf_elapsed < Duration::from_secs(5),
        "ebanzhaf_dd took {banzhaf_elapsed:?}"
    );

    let start = Instant::now();
    let shapley = escore_dd(&c, &p, x, &CoefficientFunction::Shapley).unwrap();
    let shapley_elapsed = start.elapsed();
    assert!(
        shapley_elapsed < Duration::from_secs(300),
        "escore_dd took {shapley_elapsed:?}"
    );

    // Shapley weights average single-step marginals, so it stays in
    // [−1, 1]; Banzhaf (coefficient 1) sums them and has no such bound.
    assert!(shapley >= rat(-1, 1) && shapley <= Rational::one());
    assert!(!banzhaf.denom().is_zero());

    // The linear Banzhaf pass must beat the quadratic-table sweep by at
    // least an order of magnitude; the margin, not the absolute times, is
    // the assertion.
    let ratio = shapley_elapsed.as_secs_f64() / banzhaf_elapsed.as_secs_f64();
    assert!(
        ratio >= 10.0,
        "expected ≥10× separation, got {ratio:.1}× \
         (shapley {shapley_elapsed:?}, banzhaf {banzhaf_elapsed:?})"
    );

    println!(
        "criterion 7: PASS — seed {seed}, {} gates, |V| = 50: exact Shapley \
         in {shapley_elapsed:?}, Banzhaf in {banzhaf_elapsed:?} ({ratio:.0}× \
         separation)",
        c.num_gates()
    );
}

#[test]
fn criterion_8_methods_agree() {
    let corpus = corpus();
    let start = Instant::now();
    let mut comparisons = 0usize;

    for (i, (c, p)) in corpus.iter().enumerate().take(60) {
        let vars: Vec<_> = c.universe().iter().collect();

        for cf in all_coefficients() {
            let direct = score_all(c, p, &cf, Method::Direct, &vars).unwrap().scores;
            let reduction = score_all(c, p, &cf, Method::Reduction, &vars).unwrap().scores;
            assert_eq!(direct, reduction, "reduction vs direct");
            let oracle = score_all(c, p, &cf, Method::Oracle, &vars).unwrap().scores;
            assert_eq!(direct, oracle, "oracle vs direct");
            comparisons += 2;
            if cf == CoefficientFunction::Banzhaf {
                let fast = score_all(c, p, &cf, Method::BanzhafFast, &vars).unwrap().scores;
                assert_eq!(direct, fast, "banzhaf-fast vs direct");
                comparisons += 1;
            }
        }

        // The equal-probability method applies once the assignment is
        // uniform; sweep small shared values including the endpoints.
        let shared = rat(i as i64 % 5, 4);
        let uniform = Probabilities::uniform(c.universe(), &shared).unwrap();
        assert_eq!(uniform.uniform_value(), Some(&shared));
        for cf in all_coefficients() {
            let direct = score_all(c, &uniform, &cf, Method::Direct, &vars).unwrap().scores;
            let equal = score_all(c, &uniform, &cf, Method::EqualProb, &vars).unwrap().scores;
            assert_eq!(direct, equal, "equalprob vs direct at p = {shared}");
            comparisons += 1;
        }
    }

    let elapsed = start.elapsed();
    println!(
        "criterion 8: PASS — {comparisons} whole-report method agreements \
         (direct, reduction, oracle, banzhaf-fast, equalprob) in {elapsed:?}"
    );
}
