//! Boolean circuits over a universe of numbered variables: gate storage,
//! the `ddc` text format, evaluation, and structural analysis
//! (decomposability, determinism, smoothness, tightness).
//!
//! Gates live in one vector in topological order (children strictly before
//! parents); the last gate of a parsed circuit is its output. Every gate's
//! variable set is computed once bottom-up and cached, so structural checks
//! and the score algorithms never recompute scopes.

use std::fmt;

use crate::error::{Error, Result};

/// 1-based variable identifier.
pub type VarId = u32;

/// Index of a gate in its circuit's gate vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(pub usize);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single gate. `And`/`Or` hold at least two children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    True,
    False,
    Var(VarId),
    Not(GateId),
    And(Vec<GateId>),
    Or(Vec<GateId>),
}

impl Gate {
    /// Number of input wires.
    pub fn fan_in(&self) -> usize {
        match self {
            Gate::True | Gate::False | Gate::Var(_) => 0,
            Gate::Not(_) => 1,
            Gate::And(cs) | Gate::Or(cs) => cs.len(),
        }
    }

    /// Children in order.
    pub fn children(&self) -> &[GateId] {
        match self {
            Gate::True | Gate::False | Gate::Var(_) => &[],
            Gate::Not(c) => std::slice::from_ref(c),
            Gate::And(cs) | Gate::Or(cs) => cs,
        }
    }
}

/// A sorted, duplicate-free set of variable identifiers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarSet(Vec<VarId>);

impl VarSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn single(v: VarId) -> Self {
        Self(vec![v])
    }

    /// The contiguous universe `{1, …, n}`.
    pub fn contiguous(n: u32) -> Self {
        Self((1..=n).collect())
    }

    /// Build from a sorted, strictly increasing vector (checked in debug).
    pub fn from_sorted(v: Vec<VarId>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn max(&self) -> Option<VarId> {
        self.0.last().copied()
    }

    pub fn insert(&mut self, v: VarId) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VarSet(out)
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.iter().copied().filter(|&v| !other.contains(v)).collect())
    }

    pub fn without(&self, v: VarId) -> VarSet {
        VarSet(self.0.iter().copied().filter(|&w| w != v).collect())
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn is_subset_of(&self, other: &VarSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<T: IntoIterator<Item = VarId>>(iter: T) -> Self {
        let mut v: Vec<VarId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Determinism verdict from [`Circuit::analyze_structure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Determinism {
    /// Every OR gate was exhaustively checked and none overlaps.
    Verified,
    /// Two children of `gate` are satisfied by the same assignment.
    Refuted { gate: GateId, witness: VarSet },
    /// No overlap found, but at least one OR gate exceeded the check budget.
    Unchecked,
}

/// Structural analysis result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    /// Every AND gate has pairwise variable-disjoint children.
    pub decomposable: bool,
    /// OR-gate disjointness verdict (budgeted exhaustive check).
    pub deterministic: Determinism,
    /// Every OR gate's children cover exactly the gate's variables.
    pub smooth: bool,
    /// Smooth, all AND/OR binary, and the output gate spans the universe.
    pub tight: bool,
}

/// Default per-OR-gate budget (in variables) for determinism checking.
pub const DEFAULT_DETERMINISM_BUDGET: usize = 16;

/// Options for [`Circuit::parse_with`].
#[derive(Clone, Debug)]
pub struct ParseOptions {
    /// Collapse fan-in-1 AND/OR gates to their child (default). When off,
    /// such gates are a parse error.
    pub collapse_unary: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { collapse_unary: true }
    }
}

/// A Boolean circuit over a universe of variables.
///
/// The universe is an explicit variable set: conditioning removes a variable
/// without renumbering the rest, so it is not always contiguous.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    universe: VarSet,
    gates: Vec<Gate>,
    vars: Vec<VarSet>,
    output: GateId,
}

impl Circuit {
    pub fn universe(&self) -> &VarSet {
        &self.universe
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g.0]
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    /// Circuit size measured in wires (total fan-in).
    pub fn num_wires(&self) -> usize {
        self.gates.iter().map(Gate::fan_in).sum()
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    /// Cached variable scope of a gate.
    pub fn vars(&self, g: GateId) -> &VarSet {
        &self.vars[g.0]
    }

    /// Union of all variables occurring in the circuit.
    pub fn circuit_vars(&self) -> VarSet {
        self.gates
            .iter()
            .filter_map(|g| match g {
                Gate::Var(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Parse the `ddc` text format with default options.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, &ParseOptions::default())
    }

    /// Parse the `ddc` text format.
    ///
    /// Line 1: `ddc <universe_size>`. Every further non-comment line defines
    /// one gate: `t`, `f`, `v <varId>`, `n <gateId>`, `a <g1> <g2> […]`, or
    /// `o <g1> <g2> […]`. Gate ids are 0-based line indices and may only
    /// reference earlier lines; the last gate is the output. `#` starts a
    /// comment.
    pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<Self> {
        let mut universe_size: Option<u32> = None;
        // Maps file-level gate ids to slots in `gates` (they diverge when
        // fan-in-1 gates are collapsed).
        let mut file_ids: Vec<GateId> = Vec::new();
        let mut builder: Option<CircuitBuilder> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens = tokenize(content);
            if tokens.is_empty() {
                continue;
            }
            let err = |column: usize, message: String| Error::Parse {
                line: line_no,
                column,
                message,
            };

            if universe_size.is_none() {
                let (col, word) = tokens[0];
                if word != "ddc" {
                    return Err(err(col, format!("expected `ddc` header, got {word:?}")));
                }
                if tokens.len() != 2 {
                    return Err(err(col, "header must be `ddc <universe_size>`".into()));
                }
                let (ncol, ntok) = tokens[1];
                let n: u32 = ntok
                    .parse()
                    .map_err(|_| err(ncol, format!("invalid universe size {ntok:?}")))?;
                universe_size = Some(n);
                builder = Some(CircuitBuilder::new(VarSet::contiguous(n)));
                continue;
            }

            let b = builder.as_mut().expect("builder exists after header");
            let (opcol, op) = tokens[0];
            let args = &tokens[1..];
            let parse_ref = |(col, tok): (usize, &str)| -> Result<GateId> {
                let raw: usize = tok
                    .parse()
                    .map_err(|_| err(col, format!("invalid gate reference {tok:?}")))?;
                if raw >= file_ids.len() {
                    return Err(err(
                        col,
                        format!("gate reference {raw} is not an earlier gate"),
                    ));
                }
                Ok(file_ids[raw])
            };

            let id = match op {
                "t" | "f" => {
                    if !args.is_empty() {
                        return Err(err(args[0].0, format!("`{op}` takes no arguments")));
                    }
                    if op == "t" {
                        b.true_gate()
                    } else {
                        b.false_gate()
                    }
                }
                "v" => {
                    if args.len() != 1 {
                        return Err(err(opcol, "`v` takes exactly one variable id".into()));
                    }
                    let (col, tok) = args[0];
                    let v: u32 = tok
                        .parse()
                        .map_err(|_| err(col, format!("invalid variable id {tok:?}")))?;
                    b.var(v)
                        .map_err(|_| err(col, format!("variable {v} outside universe")))?
                }
                "n" => {
                    if args.len() != 1 {
                        return Err(err(opcol, "`n` takes exactly one gate reference".into()));
                    }
                    let child = parse_ref(args[0])?;
                    b.not(child)
                }
                "a" | "o" => {
                    if args.is_empty() {
                        return Err(err(opcol, format!("`{op}` gate with no children")));
                    }
                    let children: Vec<GateId> =
                        args.iter().map(|t| parse_ref(*t)).collect::<Result<_>>()?;
                    if children.len() == 1 {
                        if !opts.collapse_unary {
                            return Err(err(
                                opcol,
                                format!("`{op}` gate with fan-in 1 (normalization disabled)"),
                            ));
                        }
                        children[0]
                    } else if op == "a" {
                        b.and_gate(children)
                    } else {
                        b.or_gate(children)
                    }
                }
                other => {
                    return Err(err(opcol, format!("unknown gate kind {other:?}")));
                }
            };
            file_ids.push(id);
        }

        let builder = builder.ok_or(Error::Parse {
            line: text.lines().count() + 1,
            column: 1,
            message: "missing `ddc` header".into(),
        })?;
        let output = *file_ids.last().ok_or(Error::Parse {
            line: text.lines().count() + 1,
            column: 1,
            message: "circuit has no gates".into(),
        })?;
        Ok(builder.finish(output))
    }

    /// Serialize in the `ddc` text format. Requires a contiguous universe
    /// `{1, …, n}` (parsing a serialization reproduces the gate structure).
    pub fn serialize(&self) -> Result<String> {
        let n = self.universe.len() as u32;
        if self.universe != VarSet::contiguous(n) {
            return Err(Error::NonContiguousUniverse);
        }
        let mut out = format!("ddc {n}\n");
        for gate in &self.gates {
            match gate {
                Gate::True => out.push('t'),
                Gate::False => out.push('f'),
                Gate::Var(v) => {
                    out.push_str("v ");
                    out.push_str(&v.to_string());
                }
                Gate::Not(c) => {
                    out.push_str("n ");
                    out.push_str(&c.0.to_string());
                }
                Gate::And(cs) | Gate::Or(cs) => {
                    out.push(if matches!(gate, Gate::And(_)) { 'a' } else { 'o' });
                    for c in cs {
                        out.push(' ');
                        out.push_str(&c.0.to_string());
                    }
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    /// Evaluate the output gate on the assignment that sets exactly the
    /// variables in `z` to true.
    pub fn evaluate(&self, z: &VarSet) -> bool {
        let mut values = vec![false; self.gates.len()];
        for (i, gate) in self.gates.iter().enumerate() {
            values[i] = match gate {
                Gate::True => true,
                Gate::False => false,
                Gate::Var(v) => z.contains(*v),
                Gate::Not(c) => !values[c.0],
                Gate::And(cs) => cs.iter().all(|c| values[c.0]),
                Gate::Or(cs) => cs.iter().any(|c| values[c.0]),
            };
        }
        values[self.output.0]
    }

    /// Check decomposability, determinism (exhaustively, per OR gate, while
    /// the gate scope has at most `determinism_budget` variables), smoothness,
    /// and tightness.
    pub fn analyze_structure(&self, determinism_budget: usize) -> StructureReport {
        let decomposable = self.find_nondecomposable().is_none();
        let smooth = self.gates.iter().enumerate().all(|(i, gate)| match gate {
            Gate::Or(cs) => cs.iter().all(|c| self.vars[c.0] == self.vars[i]),
            _ => true,
        });
        let binary = self
            .gates
            .iter()
            .all(|g| !matches!(g, Gate::And(_) | Gate::Or(_)) || g.fan_in() == 2);
        let tight = smooth && binary && self.vars[self.output.0] == self.universe;

        let mut any_skipped = false;
        let mut refuted = None;
        'gates: for (i, gate) in self.gates.iter().enumerate() {
            let Gate::Or(cs) = gate else { continue };
            let scope = &self.vars[i];
            if scope.len() > determinism_budget {
                any_skipped = true;
                continue;
            }
            let needed = self.reachable_from(cs);
            let vars: Vec<VarId> = scope.iter().collect();
            let mut values = vec![false; self.gates.len()];
            for mask in 0u64..(1u64 << vars.len()) {
                let picked: Vec<VarId> = vars
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                let z = VarSet::from_sorted(picked);
                for &g in &needed {
                    values[g.0] = match &self.gates[g.0] {
                        Gate::True => true,
                        Gate::False => false,
                        Gate::Var(v) => z.contains(*v),
                        Gate::Not(c) => !values[c.0],
                        Gate::And(cs) => cs.iter().all(|c| values[c.0]),
                        Gate::Or(cs) => cs.iter().any(|c| values[c.0]),
                    };
                }
                if cs.iter().filter(|c| values[c.0]).count() > 1 {
                    refuted = Some((GateId(i), z));
                    break 'gates;
                }
            }
        }
        let deterministic = match refuted {
            Some((gate, witness)) => Determinism::Refuted { gate, witness },
            None if any_skipped => Determinism::Unchecked,
            None => Determinism::Verified,
        };

        StructureReport {
            decomposable,
            deterministic,
            smooth,
            tight,
        }
    }

    /// First AND gate with overlapping children, if any.
    pub(crate) fn find_nondecomposable(&self) -> Option<GateId> {
        for (i, gate) in self.gates.iter().enumerate() {
            if let Gate::And(cs) = gate {
                let child_sum: usize = cs.iter().map(|c| self.vars[c.0].len()).sum();
                if child_sum != self.vars[i].len() {
                    return Some(GateId(i));
                }
            }
        }
        None
    }

    /// Gates reachable from `roots`, ascending (hence topological) order.
    pub(crate) fn reachable_from(&self, roots: &[GateId]) -> Vec<GateId> {
        let mut seen = vec![false; self.gates.len()];
        let mut stack: Vec<GateId> = roots.to_vec();
        while let Some(g) = stack.pop() {
            if seen[g.0] {
                continue;
            }
            seen[g.0] = true;
            stack.extend_from_slice(self.gates[g.0].children());
        }
        (0..self.gates.len())
            .filter(|&i| seen[i])
            .map(GateId)
            .collect()
    }
}

fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Incremental circuit constructor maintaining the per-gate variable cache.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    universe: VarSet,
    gates: Vec<Gate>,
    vars: Vec<VarSet>,
}

impl CircuitBuilder {
    pub fn new(universe: VarSet) -> Self {
        Self {
            universe,
            gates: Vec::new(),
            vars: Vec::new(),
        }
    }

    pub fn universe(&self) -> &VarSet {
        &self.universe
    }

    pub fn num_gates(&self) -> usize {
        self.gates.len()
    }

    pub fn vars(&self, g: GateId) -> &VarSet {
        &self.vars[g.0]
    }

    fn push(&mut self, gate: Gate, vars: VarSet) -> GateId {
        let id = GateId(self.gates.len());
        self.gates.push(gate);
        self.vars.push(vars);
        id
    }

    pub fn true_gate(&mut self) -> GateId {
        self.push(Gate::True, VarSet::empty())
    }

    pub fn false_gate(&mut self) -> GateId {
        self.push(Gate::False, VarSet::empty())
    }

    pub fn var(&mut self, v: VarId) -> Result<GateId> {
        if !self.universe.contains(v) {
            return Err(Error::UnknownVariable { var: v });
        }
        Ok(self.push(Gate::Var(v), VarSet::single(v)))
    }

    pub fn not(&mut self, child: GateId) -> GateId {
        assert!(child.0 < self.gates.len(), "forward gate reference");
        let vars = self.vars[child.0].clone();
        self.push(Gate::Not(child), vars)
    }

    /// AND over two or more children (panics on fewer — callers normalize).
    pub fn and_gate(&mut self, children: Vec<GateId>) -> GateId {
        assert!(children.len() >= 2, "AND fan-in must be at least 2");
        let vars = self.union_of(&children);
        self.push(Gate::And(children), vars)
    }

    /// OR over two or more children (panics on fewer — callers normalize).
    pub fn or_gate(&mut self, children: Vec<GateId>) -> GateId {
        assert!(children.len() >= 2, "OR fan-in must be at least 2");
        let vars = self.union_of(&children);
        self.push(Gate::Or(children), vars)
    }

    fn union_of(&self, children: &[GateId]) -> VarSet {
        let mut acc = VarSet::empty();
        for c in children {
            assert!(c.0 < self.gates.len(), "forward gate reference");
            acc = acc.union(&self.vars[c.0]);
        }
        acc
    }

    pub fn finish(self, output: GateId) -> Circuit {
        assert!(output.0 < self.gates.len(), "output gate out of range");
        Circuit {
            universe: self.universe,
            gates: self.gates,
            vars: self.vars,
            output,
        }
    }
}
