//! Tuple-independent probabilistic databases: CSV loading, Boolean
//! conjunctive queries, Boolean provenance, and per-fact expected scores.
//!
//! A [`TidDatabase`] is a set of named relations whose rows each carry a
//! probability and a generated fact variable. Evaluating a self-join-free
//! Boolean conjunctive query ([`ConjunctiveQuery`]) over it yields the
//! query's Boolean provenance as a DNF over fact variables
//! ([`ProvenanceDnf`]); when the monomials are pairwise variable-disjoint
//! the DNF compiles to a decomposable circuit ([`dnf_to_dd`]) on which the
//! scoring algorithms run ([`fact_escore`]).
//!
//! Joins match column values as exact strings; filters compare numerically
//! whenever both sides parse as rationals, and lexicographically otherwise.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use num_traits::Zero;

use crate::circuit::{Circuit, CircuitBuilder, GateId, VarId, VarSet};
use crate::coeffs::CoefficientFunction;
use crate::error::{Error, Result};
use crate::numeric::{parse_rational, Rational};
use crate::scores::{ev, score_all, Method, Probabilities, ScoreReport};

/// One row of a relation: data cells (the `prob` column excluded), the
/// row's probability, and its allocated fact variable.
#[derive(Debug, Clone)]
pub struct Row {
    /// Data cells in column order.
    pub values: Vec<String>,
    /// Probability that the fact is present.
    pub prob: Rational,
    /// Fact variable backing this row in provenance formulas.
    pub var: VarId,
    /// Stable identifier `Table#rownum` (1-based).
    pub fact_id: String,
}

/// A named relation: data column names (the `prob` column excluded) and
/// rows in file order.
#[derive(Debug, Clone)]
pub struct Table {
    /// Relation name (the CSV file stem).
    pub name: String,
    /// Data column names in file order.
    pub columns: Vec<String>,
    /// Rows in file order.
    pub rows: Vec<Row>,
}

/// A tuple-independent probabilistic database.
///
/// Tables are kept sorted by name; fact variables are allocated
/// contiguously from 1 in that order, row by row, so a database with the
/// same files always produces the same variables.
#[derive(Debug, Clone, Default)]
pub struct TidDatabase {
    tables: Vec<Table>,
}

impl TidDatabase {
    /// Load every `*.csv` file of a directory as one relation each, named
    /// after the file stem. Files are processed in sorted name order.
    ///
    /// Each CSV must have a header row containing a `prob` column; all
    /// other columns are data. Probabilities may be written as rationals
    /// (`2/5`) or decimals (`0.4`) and must lie in [0, 1].
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let mut named = Vec::new();
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            let is_csv = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            if !path.is_file() || !is_csv {
                continue;
            }
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let text = std::fs::read_to_string(&path)?;
            named.push((stem, text));
        }
        Self::from_named_csvs(named)
    }

    /// Build a database from `(table name, CSV text)` pairs; the entries
    /// are sorted by table name before fact variables are allocated.
    pub fn from_named_csvs(mut named: Vec<(String, String)>) -> Result<Self> {
        named.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in named.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateTable(pair[0].0.clone()));
            }
        }
        let mut tables = Vec::with_capacity(named.len());
        let mut next_var: VarId = 1;
        for (name, text) in named {
            let table = parse_csv_table(name, &text, &mut next_var)?;
            tables.push(table);
        }
        Ok(TidDatabase { tables })
    }

    /// All tables, sorted by name.
    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// Look up a table by name.
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Total number of facts across all tables.
    pub fn num_facts(&self) -> usize {
        self.tables.iter().map(|t| t.rows.len()).sum()
    }

    /// The fact-variable universe `{1, …, num_facts}`.
    pub fn universe(&self) -> VarSet {
        VarSet::contiguous(self.num_facts() as u32)
    }

    /// The probability assignment of all facts.
    pub fn probabilities(&self) -> Probabilities {
        let mut p = Probabilities::new();
        for table in &self.tables {
            for row in &table.rows {
                p.set(row.var, row.prob.clone())
                    .expect("fact probabilities were validated at load time");
            }
        }
        p
    }

    /// The `Table#rownum` identifier of a fact variable.
    pub fn fact_label(&self, v: VarId) -> Option<&str> {
        self.row_of(v).map(|r| r.fact_id.as_str())
    }

    /// The row backing a fact variable.
    pub fn row_of(&self, v: VarId) -> Option<&Row> {
        self.tables
            .iter()
            .flat_map(|t| t.rows.iter())
            .find(|r| r.var == v)
    }

    /// The fact variable with a given `Table#rownum` identifier.
    pub fn fact_var(&self, fact_id: &str) -> Result<VarId> {
        self.tables
            .iter()
            .flat_map(|t| t.rows.iter())
            .find(|r| r.fact_id == fact_id)
            .map(|r| r.var)
            .ok_or_else(|| Error::UnknownFact(fact_id.to_string()))
    }
}

fn parse_csv_table(name: String, text: &str, next_var: &mut VarId) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let prob_idx = headers
        .iter()
        .position(|h| h == "prob")
        .ok_or_else(|| Error::MissingProbColumn {
            table: name.clone(),
        })?;
    let columns: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != prob_idx)
        .map(|(_, h)| h.to_string())
        .collect();
    let mut rows = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let var = *next_var;
        *next_var += 1;
        let prob_text = record.get(prob_idx).unwrap_or("");
        let prob = parse_rational(prob_text)?;
        if prob < Rational::from_integer(0.into()) || prob > Rational::from_integer(1.into()) {
            return Err(Error::ProbabilityOutOfRange {
                var,
                value: prob_text.to_string(),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != prob_idx)
            .map(|(_, cell)| cell.to_string())
            .collect();
        rows.push(Row {
            values,
            prob,
            var,
            fact_id: format!("{}#{}", name, row_idx + 1),
        });
    }
    Ok(Table {
        name,
        columns,
        rows,
    })
}

/// A term in a query atom: a join variable or a quoted constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// A named join variable.
    Var(String),
    /// A constant that the column value must equal exactly.
    Const(String),
}

/// A relation atom `Table(term, …)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    /// Relation name.
    pub table: String,
    /// One term per data column.
    pub terms: Vec<Term>,
}

/// A comparison operator usable in filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    /// `<`
    Lt,
    /// `<=`
    Le,
    /// `=`
    Eq,
    /// `>=`
    Ge,
    /// `>`
    Gt,
}

impl CompareOp {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "<" => Some(CompareOp::Lt),
            "<=" => Some(CompareOp::Le),
            "=" => Some(CompareOp::Eq),
            ">=" => Some(CompareOp::Ge),
            ">" => Some(CompareOp::Gt),
            _ => None,
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ge => ord != Ordering::Less,
            CompareOp::Gt => ord == Ordering::Greater,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Eq => "=",
            CompareOp::Ge => ">=",
            CompareOp::Gt => ">",
        };
        f.write_str(s)
    }
}

/// A filter `var op constant` applied after the join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    /// The join variable being constrained.
    pub var: String,
    /// Comparison operator.
    pub op: CompareOp,
    /// Right-hand constant.
    pub constant: String,
}

/// A self-join-free Boolean conjunctive query with constant filters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjunctiveQuery {
    /// Relation atoms, in query order.
    pub atoms: Vec<Atom>,
    /// Post-join filters.
    pub filters: Vec<Filter>,
}

impl ConjunctiveQuery {
    /// Parse the `cq` text format.
    ///
    /// The first significant line is `q :- Atom1, Atom2, …` where each atom
    /// is `Table(term, …)`; a term is a variable name or a double-quoted
    /// constant. Every further line is `filter <var> <op> <const>` with
    /// `<op>` one of `<`, `<=`, `=`, `>=`, `>`. Blank lines and `#`
    /// comments are ignored. Each relation may appear at most once, and
    /// filters may only use variables bound by some atom.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, column: usize, message: String| Error::Parse {
            line,
            column,
            message,
        };
        let mut atoms: Option<Vec<Atom>> = None;
        let mut filters = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if atoms.is_none() {
                let body = line
                    .strip_prefix('q')
                    .map(str::trim_start)
                    .and_then(|r| r.strip_prefix(":-"))
                    .ok_or_else(|| {
                        err(lineno, 1, "expected the rule head `q :- …`".to_string())
                    })?;
                atoms = Some(parse_atoms(body, lineno)?);
                continue;
            }
            let rest = line.strip_prefix("filter").ok_or_else(|| {
                err(lineno, 1, "expected a `filter <var> <op> <const>` line".to_string())
            })?;
            let mut parts = rest.split_whitespace();
            let var = parts
                .next()
                .ok_or_else(|| err(lineno, 1, "filter is missing its variable".to_string()))?;
            let op_text = parts
                .next()
                .ok_or_else(|| err(lineno, 1, "filter is missing its operator".to_string()))?;
            let op = CompareOp::parse(op_text).ok_or_else(|| {
                err(
                    lineno,
                    1,
                    format!("unknown comparison operator {op_text:?}"),
                )
            })?;
            let constant: String = parts.collect::<Vec<_>>().join(" ");
            if constant.is_empty() {
                return Err(err(lineno, 1, "filter is missing its constant".to_string()));
            }
            filters.push(Filter {
                var: var.to_string(),
                op,
                constant: unquote(&constant),
            });
        }
        let atoms = atoms
            .ok_or_else(|| err(1, 1, "query has no `q :- …` rule".to_string()))?;
        let mut seen_tables = BTreeSet::new();
        let mut bound = BTreeSet::new();
        for atom in &atoms {
            if !seen_tables.insert(atom.table.clone()) {
                return Err(Error::SelfJoin(atom.table.clone()));
            }
            for term in &atom.terms {
                if let Term::Var(v) = term {
                    bound.insert(v.clone());
                }
            }
        }
        for filter in &filters {
            if !bound.contains(&filter.var) {
                return Err(Error::UnboundFilterVariable(filter.var.clone()));
            }
        }
        Ok(ConjunctiveQuery { atoms, filters })
    }
}

fn unquote(s: &str) -> String {
    let t = s.trim();
    if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') {
        t[1..t.len() - 1].to_string()
    } else {
        t.to_string()
    }
}

fn parse_atoms(body: &str, lineno: usize) -> Result<Vec<Atom>> {
    let err = |message: String| Error::Parse {
        line: lineno,
        column: 1,
        message,
    };
    let mut atoms = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| err(format!("expected `Table(…)` in {rest:?}")))?;
        let table = rest[..open].trim();
        if table.is_empty() || !table.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(err(format!("invalid table name {table:?}")));
        }
        let close = rest[open..]
            .find(')')
            .map(|i| open + i)
            .ok_or_else(|| err(format!("unclosed parenthesis after {table:?}")))?;
        let mut terms = Vec::new();
        for raw_term in rest[open + 1..close].split(',') {
            let t = raw_term.trim();
            if t.is_empty() {
                return Err(err(format!("empty term in atom {table:?}")));
            }
            if t.starts_with('"') {
                if !(t.len() >= 2 && t.ends_with('"')) {
                    return Err(err(format!("unterminated constant {t:?}")));
                }
                terms.push(Term::Const(t[1..t.len() - 1].to_string()));
            } else if t.chars().all(|c| c.is_alphanumeric() || c == '_') {
                terms.push(Term::Var(t.to_string()));
            } else {
                return Err(err(format!("invalid term {t:?}")));
            }
        }
        if terms.is_empty() {
            return Err(err(format!("atom {table:?} has no terms")));
        }
        atoms.push(Atom {
            table: table.to_string(),
            terms,
        });
        rest = rest[close + 1..].trim_start();
        if let Some(after_comma) = rest.strip_prefix(',') {
            rest = after_comma.trim_start();
            if rest.is_empty() {
                return Err(err("trailing comma after the last atom".to_string()));
            }
        } else if !rest.is_empty() {
            return Err(err(format!("unexpected trailing input {rest:?}")));
        }
    }
    if atoms.is_empty() {
        return Err(err("query needs at least one atom".to_string()));
    }
    Ok(atoms)
}

/// Boolean provenance of a query: a DNF over fact variables. Each monomial
/// is the set of facts a satisfying join used; the formula is true on a
/// subdatabase exactly when some monomial's facts are all present.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProvenanceDnf {
    monomials: BTreeSet<Vec<VarId>>,
}

impl ProvenanceDnf {
    /// The always-false DNF with no monomials.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from monomials; each is sorted and deduplicated, and duplicate
    /// monomials collapse.
    pub fn from_monomials(monomials: impl IntoIterator<Item = Vec<VarId>>) -> Self {
        let monomials = monomials
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m.dedup();
                m
            })
            .collect();
        ProvenanceDnf { monomials }
    }

    /// The monomials, each sorted, in deterministic order.
    pub fn monomials(&self) -> impl Iterator<Item = &[VarId]> {
        self.monomials.iter().map(|m| m.as_slice())
    }

    /// Number of monomials.
    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }

    /// Whether the DNF is the constant false.
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Union of all fact variables appearing in some monomial.
    pub fn vars(&self) -> VarSet {
        let mut all: Vec<VarId> = self.monomials.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        VarSet::from_sorted(all)
    }

    /// Evaluate on a set of present facts.
    pub fn evaluate(&self, present: &VarSet) -> bool {
        self.monomials
            .iter()
            .any(|m| m.iter().all(|&v| present.contains(v)))
    }

    /// Render with fact labels, e.g. `(Grades#1 ∧ Students#1) ∨ (…)`.
    pub fn render(&self, db: &TidDatabase) -> String {
        if self.monomials.is_empty() {
            return "false".to_string();
        }
        self.monomials
            .iter()
            .map(|m| {
                let inner = m
                    .iter()
                    .map(|&v| db.fact_label(v).unwrap_or("?").to_string())
                    .collect::<Vec<_>>()
                    .join(" ∧ ");
                format!("({inner})")
            })
            .collect::<Vec<_>>()
            .join(" ∨ ")
    }
}

struct ResolvedAtom<'a> {
    table: &'a Table,
    terms: &'a [Term],
}

fn resolve_atoms<'a>(db: &'a TidDatabase, q: &'a ConjunctiveQuery) -> Result<Vec<ResolvedAtom<'a>>> {
    q.atoms
        .iter()
        .map(|atom| {
            let table = db
                .table(&atom.table)
                .ok_or_else(|| Error::UnknownTable(atom.table.clone()))?;
            if atom.terms.len() != table.columns.len() {
                return Err(Error::TableArity {
                    table: atom.table.clone(),
                    expected: table.columns.len(),
                    got: atom.terms.len(),
                });
            }
            Ok(ResolvedAtom {
                table,
                terms: &atom.terms,
            })
        })
        .collect()
}

/// Compare two cell values: numerically when both parse as rationals,
/// lexicographically otherwise.
fn compare_values(left: &str, right: &str) -> Ordering {
    match (parse_rational(left), parse_rational(right)) {
        (Ok(a), Ok(b)) => a.cmp(&b),
        _ => left.cmp(right),
    }
}

fn filters_hold(filters: &[Filter], bindings: &BTreeMap<&str, &str>) -> bool {
    filters.iter().all(|f| {
        let value = bindings
            .get(f.var.as_str())
            .expect("filter variables are checked to be bound at parse time");
        f.op.holds(compare_values(value, &f.constant))
    })
}

/// Nested-loop join over `atoms`, invoking `on_match` with one row per atom
/// for every binding that satisfies all equalities and filters. Rows for
/// which `admit` is false are skipped, which restricts the join to a
/// subdatabase.
fn join_walk<'a>(
    atoms: &[ResolvedAtom<'a>],
    filters: &[Filter],
    admit: &dyn Fn(&Row) -> bool,
    on_match: &mut dyn FnMut(&[&'a Row]) -> bool,
) -> bool {
    fn recurse<'a>(
        atoms: &[ResolvedAtom<'a>],
        filters: &[Filter],
        admit: &dyn Fn(&Row) -> bool,
        depth: usize,
        bindings: &mut BTreeMap<&'a str, &'a str>,
        picked: &mut Vec<&'a Row>,
        on_match: &mut dyn FnMut(&[&'a Row]) -> bool,
    ) -> bool {
        if depth == atoms.len() {
            if filters_hold(filters, bindings) {
                return on_match(picked);
            }
            return true;
        }
        let atom = &atoms[depth];
        'rows: for row in &atom.table.rows {
            if !admit(row) {
                continue;
            }
            let mut newly_bound = Vec::new();
            for (term, value) in atom.terms.iter().zip(&row.values) {
                match term {
                    Term::Const(c) => {
                        if c != value {
                            for k in newly_bound {
                                bindings.remove(k);
                            }
                            continue 'rows;
                        }
                    }
                    Term::Var(v) => match bindings.get(v.as_str()) {
                        Some(bound) => {
                            if *bound != value.as_str() {
                                for k in newly_bound {
                                    bindings.remove(k);
                                }
                                continue 'rows;
                            }
                        }
                        None => {
                            bindings.insert(v.as_str(), value.as_str());
                            newly_bound.push(v.as_str());
                        }
                    },
                }
            }
            picked.push(row);
            let keep_going = recurse(atoms, filters, admit, depth + 1, bindings, picked, on_match);
            picked.pop();
            for k in newly_bound {
                bindings.remove(k);
            }
            if !keep_going {
                return false;
            }
        }
        true
    }
    let mut bindings = BTreeMap::new();
    let mut picked = Vec::new();
    recurse(atoms, filters, admit, 0, &mut bindings, &mut picked, on_match)
}

/// Evaluate the Boolean provenance of `q` over `db`: every satisfying join
/// contributes the monomial of the facts it used.
pub fn eval_provenance(db: &TidDatabase, q: &ConjunctiveQuery) -> Result<ProvenanceDnf> {
    let atoms = resolve_atoms(db, q)?;
    let mut monomials = Vec::new();
    join_walk(&atoms, &q.filters, &|_| true, &mut |rows| {
        monomials.push(rows.iter().map(|r| r.var).collect());
        true
    });
    Ok(ProvenanceDnf::from_monomials(monomials))
}

/// Whether `q` holds on the subdatabase containing exactly the facts in
/// `present`, by running the join directly (no provenance involved).
pub fn query_holds(db: &TidDatabase, q: &ConjunctiveQuery, present: &VarSet) -> Result<bool> {
    let atoms = resolve_atoms(db, q)?;
    let mut satisfied = false;
    join_walk(&atoms, &q.filters, &|row| present.contains(row.var), &mut |_| {
        satisfied = true;
        false
    });
    Ok(satisfied)
}

/// Compile a variable-disjoint DNF into the decomposable circuit
/// `¬(⋀_i ¬m_i)` over the given universe (a single monomial stays a plain
/// conjunction, and an empty DNF is the constant false). The result has no
/// OR gates, so it is deterministic outright; sharing a variable between
/// monomials is an error, as the conjunction would not be decomposable.
pub fn dnf_to_dd(dnf: &ProvenanceDnf, universe: &VarSet) -> Result<Circuit> {
    let mut seen = VarSet::empty();
    for monomial in dnf.monomials() {
        for &v in monomial {
            if seen.contains(v) {
                return Err(Error::SharedMonomialVariable { var: v });
            }
            seen.insert(v);
        }
    }
    let mut builder = CircuitBuilder::new(universe.clone());
    let mut monomial_gates = Vec::new();
    for monomial in dnf.monomials() {
        let gate = if monomial.is_empty() {
            builder.true_gate()
        } else {
            let mut vars = monomial.iter();
            let first = builder.var(*vars.next().expect("nonempty"))?;
            vars.try_fold(first, |acc, &v| {
                let leaf = builder.var(v)?;
                Ok::<_, Error>(builder.and_gate(vec![acc, leaf]))
            })?
        };
        monomial_gates.push(gate);
    }
    let output = match monomial_gates.len() {
        0 => builder.false_gate(),
        1 => monomial_gates[0],
        _ => {
            let negated: Vec<GateId> = monomial_gates
                .into_iter()
                .map(|g| builder.not(g))
                .collect();
            let conj = negated
                .into_iter()
                .reduce(|acc, g| builder.and_gate(vec![acc, g]))
                .expect("at least two monomials");
            builder.not(conj)
        }
    };
    Ok(builder.finish(output))
}

/// Per-fact expected scores of a query over a TID, with the provenance and
/// query probability that back them.
#[derive(Debug, Clone)]
pub struct FactScoreReport {
    /// The query's Boolean provenance.
    pub dnf: ProvenanceDnf,
    /// `Pr(𝐃 ⊨ q)`: the expected value of the provenance.
    pub probability: Rational,
    /// Scores keyed by fact variable; every fact of the database has an
    /// entry, and facts outside the provenance score zero.
    pub report: ScoreReport,
}

/// Compute the expected score of every fact of `db` for `q`.
///
/// The scores are taken over the provenance's own variables (the natural
/// game: facts the query can actually use); facts absent from the
/// provenance are dummies and score exactly zero.
pub fn fact_escore(
    db: &TidDatabase,
    q: &ConjunctiveQuery,
    cf: &CoefficientFunction,
    method: Method,
) -> Result<FactScoreReport> {
    let dnf = eval_provenance(db, q)?;
    let game = dnf.vars();
    let circuit = dnf_to_dd(&dnf, &game)?;
    let p = db.probabilities().restrict(&game);
    let probability = ev(&circuit, &p)?;
    let contributing: Vec<VarId> = game.iter().collect();
    let mut report = score_all(&circuit, &p, cf, method, &contributing)?;
    for v in db.universe().iter() {
        report.scores.entry(v).or_insert_with(Rational::zero);
    }
    Ok(FactScoreReport {
        dnf,
        probability,
        report,
    })
}
