//! Causal networks: DAGs annotated with conditional rank tables.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::{World, MAX_VARS};
use crate::rank::{Rank, ZERO};
use crate::ranking::RankingFunction;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    /// Surprise charged for an unexplained change of value. At least 1.
    pub persistence: u64,
}

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable { name: name.into(), persistence: 1 }
    }

    pub fn with_persistence(name: impl Into<String>, persistence: u64) -> Self {
        Variable { name: name.into(), persistence }
    }
}

/// Ranks of a child being true or false under one parent assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    pub if_true: Rank,
    pub if_false: Rank,
}

impl Row {
    pub fn new(if_true: Rank, if_false: Rank) -> Self {
        Row { if_true, if_false }
    }

    pub fn get(self, value: bool) -> Rank {
        if value {
            self.if_true
        } else {
            self.if_false
        }
    }

    pub fn is_normalized(self) -> bool {
        self.if_true.min(self.if_false) == ZERO
    }
}

/// `κ(X_i | pa_i)` for one node.
///
/// Parents are kept in ascending index order. Row `k` holds the parent
/// assignment whose bit `j` is the value of `parents[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankTable {
    parents: Vec<usize>,
    rows: Vec<Row>,
}

impl RankTable {
    /// `rows` are indexed by assignments to `parents` in the order given;
    /// parents are sorted here and rows permuted to match.
    pub fn new(parents: Vec<usize>, rows: Vec<Row>) -> Self {
        let mut order: Vec<usize> = (0..parents.len()).collect();
        order.sort_by_key(|&k| parents[k]);
        if order.iter().enumerate().all(|(a, &b)| a == b) {
            return RankTable { parents, rows };
        }
        let sorted: Vec<usize> = order.iter().map(|&k| parents[k]).collect();
        let mut permuted = rows.clone();
        for (old_idx, row) in rows.into_iter().enumerate() {
            let mut new_idx = 0;
            for (new_pos, &old_pos) in order.iter().enumerate() {
                if old_idx >> old_pos & 1 == 1 {
                    new_idx |= 1 << new_pos;
                }
            }
            if new_idx < permuted.len() {
                permuted[new_idx] = row;
            }
        }
        RankTable { parents: sorted, rows: permuted }
    }

    pub fn root(if_true: Rank, if_false: Rank) -> Self {
        RankTable { parents: Vec::new(), rows: vec![Row::new(if_true, if_false)] }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_index(&self, w: World) -> usize {
        self.parents
            .iter()
            .enumerate()
            .filter(|&(_, &p)| w.get(p))
            .fold(0, |acc, (j, _)| acc | 1 << j)
    }

    pub fn row(&self, w: World) -> Row {
        self.rows[self.row_index(w)]
    }

    /// True when every entry is 0 or infinite.
    pub fn is_functional(&self) -> bool {
        self.rows
            .iter()
            .all(|r| [r.if_true, r.if_false].iter().all(|x| x.is_zero() || !x.is_finite()))
    }
}

/// A problem found while validating a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    TooManyVariables(usize),
    DuplicateVariable(String),
    ZeroPersistence(String),
    UnknownVariable(usize),
    SelfLoop(String),
    DuplicateEdge(String, String),
    Cycle(Vec<String>),
    MissingTable(String),
    ParentMismatch { var: String, table: Vec<String>, graph: Vec<String> },
    WrongRowCount { var: String, got: usize, expected: usize },
    RowNotNormalized { var: String, row: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TooManyVariables(n) => {
                write!(f, "too many variables: {n} (limit {MAX_VARS})")
            }
            Diagnostic::DuplicateVariable(v) => write!(f, "duplicate variable `{v}`"),
            Diagnostic::ZeroPersistence(v) => write!(f, "persistence of `{v}` must be at least 1"),
            Diagnostic::UnknownVariable(i) => write!(f, "unknown variable index {i}"),
            Diagnostic::SelfLoop(v) => write!(f, "cycle: self loop on `{v}`"),
            Diagnostic::DuplicateEdge(a, b) => write!(f, "duplicate edge {a} -> {b}"),
            Diagnostic::Cycle(vs) => write!(f, "cycle: {}", vs.join(" -> ")),
            Diagnostic::MissingTable(v) => write!(f, "missing rank table for `{v}`"),
            Diagnostic::ParentMismatch { var, table, graph } => write!(
                f,
                "rank table of `{var}` conditions on [{}] but its graph parents are [{}]",
                table.join(", "),
                graph.join(", ")
            ),
            Diagnostic::WrongRowCount { var, got, expected } => {
                write!(f, "rank table of `{var}` has {got} rows, expected {expected}")
            }
            Diagnostic::RowNotNormalized { var, row } => {
                write!(f, "row not normalized: `{var}` row {row} has no zero entry")
            }
        }
    }
}

/// Unvalidated pieces of a network.
#[derive(Clone, Debug, Default)]
pub struct NetworkBuilder {
    variables: Vec<Variable>,
    edges: Vec<(usize, usize)>,
    tables: Vec<Option<RankTable>>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable(&mut self, var: Variable) -> usize {
        self.variables.push(var);
        self.tables.push(None);
        self.variables.len() - 1
    }

    pub fn edge(&mut self, from: usize, to: usize) -> &mut Self {
        self.edges.push((from, to));
        self
    }

    pub fn table(&mut self, var: usize, table: RankTable) -> &mut Self {
        if var >= self.tables.len() {
            self.tables.resize(var + 1, None);
        }
        self.tables[var] = Some(table);
        self
    }

    pub fn build(&self) -> Result<CausalNetwork> {
        let diags = validate_network(self);
        if !diags.is_empty() {
            return Err(Error::InvalidNetwork(diags));
        }
        let n = self.variables.len();
        let mut parents = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            parents[b].push(a);
        }
        for p in &mut parents {
            p.sort_unstable();
        }
        let tables: Vec<RankTable> = self.tables.iter().flatten().cloned().collect();
        let order = topological_order(n, &self.edges).expect("validated acyclic");
        Ok(CausalNetwork { variables: self.variables.clone(), parents, tables, order })
    }
}

fn name_of(vars: &[Variable], i: usize) -> String {
    vars.get(i).map(|v| v.name.clone()).unwrap_or_else(|| format!("#{i}"))
}

fn topological_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    for &(_, b) in edges {
        indeg[b] += 1;
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &(a, b) in edges {
            if a == i {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.insert(b);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Walks parent links from a node left over by Kahn's algorithm until a
/// node repeats.
fn find_cycle(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let order = {
        let mut indeg = vec![0usize; n];
        for &(_, b) in edges {
            indeg[b] += 1;
        }
        let mut removed = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                if !removed[i] && indeg[i] == 0 {
                    removed[i] = true;
                    changed = true;
                    for &(a, b) in edges {
                        if a == i {
                            indeg[b] -= 1;
                        }
                    }
                }
            }
        }
        removed
    };
    let Some(start) = (0..n).find(|&i| !order[i]) else {
        return Vec::new();
    };
    let mut path = vec![start];
    let mut cur = start;
    loop {
        let prev = edges
            .iter()
            .find(|&&(a, b)| b == cur && !order[a])
            .map(|&(a, _)| a)
            .expect("node on a cycle has a cyclic parent");
        if let Some(pos) = path.iter().position(|&x| x == prev) {
            let mut cycle: Vec<usize> = path[pos..].to_vec();
            cycle.reverse();
            cycle.push(cycle[0]);
            return cycle;
        }
        path.push(prev);
        cur = prev;
    }
}

/// Checks acyclicity, table/parent agreement and per-row normalization.
/// Returns every violation found; an empty list means the network is valid.
pub fn validate_network(b: &NetworkBuilder) -> Vec<Diagnostic> {
    let vars = &b.variables;
    let n = vars.len();
    let mut diags = Vec::new();
    if n > MAX_VARS {
        diags.push(Diagnostic::TooManyVariables(n));
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v.name.as_str()) {
            diags.push(Diagnostic::DuplicateVariable(v.name.clone()));
        }
        if v.persistence == 0 {
            diags.push(Diagnostic::ZeroPersistence(v.name.clone()));
        }
    }

    let mut edges = Vec::new();
    let mut edge_set = BTreeSet::new();
    for &(a, c) in &b.edges {
        if a >= n || c >= n {
            diags.push(Diagnostic::UnknownVariable(a.max(c)));
            continue;
        }
        if a == c {
            diags.push(Diagnostic::SelfLoop(name_of(vars, a)));
            continue;
        }
        if !edge_set.insert((a, c)) {
            diags.push(Diagnostic::DuplicateEdge(name_of(vars, a), name_of(vars, c)));
            continue;
        }
        edges.push((a, c));
    }
    if topological_order(n, &edges).is_none() {
        let cycle = find_cycle(n, &edges);
        diags.push(Diagnostic::Cycle(cycle.into_iter().map(|i| name_of(vars, i)).collect()));
    }

    for i in 0..n {
        let name = name_of(vars, i);
        let Some(table) = b.tables.get(i).and_then(|t| t.as_ref()) else {
            diags.push(Diagnostic::MissingTable(name));
            continue;
        };
        let mut graph: Vec<usize> = edges.iter().filter(|e| e.1 == i).map(|e| e.0).collect();
        graph.sort_unstable();
        if table.parents().iter().any(|&p| p >= n) {
            diags.push(Diagnostic::UnknownVariable(*table.parents().iter().max().unwrap()));
            continue;
        }
        if table.parents() != graph.as_slice() {
            diags.push(Diagnostic::ParentMismatch {
                var: name.clone(),
                table: table.parents().iter().map(|&p| name_of(vars, p)).collect(),
                graph: graph.iter().map(|&p| name_of(vars, p)).collect(),
            });
        }
        let expected = 1usize << table.parents().len().min(MAX_VARS);
        if table.rows().len() != expected {
            diags.push(Diagnostic::WrongRowCount { var: name.clone(), got: table.rows().len(), expected });
        }
        for (k, row) in table.rows().iter().enumerate() {
            if !row.is_normalized() {
                diags.push(Diagnostic::RowNotNormalized { var: name.clone(), row: k });
            }
        }
    }
    diags
}

/// A validated causal network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalNetwork {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    tables: Vec<RankTable>,
    order: Vec<usize>,
}

impl CausalNetwork {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::new()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn is_root(&self, i: usize) -> bool {
        self.parents[i].is_empty()
    }

    pub fn table(&self, i: usize) -> &RankTable {
        &self.tables[i]
    }

    pub fn persistence(&self, i: usize) -> u64 {
        self.variables[i].persistence
    }

    /// Parents precede children.
    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Edges as `(parent, child)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = self
            .parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (p, c)))
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Strict descendants of `i`.
    pub fn descendants(&self, i: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            for c in 0..self.num_vars() {
                if self.parents[c].contains(&v) && out.insert(c) {
                    stack.push(c);
                }
            }
        }
        out
    }

    /// `κ(X_i(ω) | pa_i(ω))`.
    pub fn local_rank(&self, i: usize, w: World) -> Rank {
        self.tables[i].row(w).get(w.get(i))
    }

    /// `κ(¬X_i(ω) | pa_i(ω))`.
    pub fn counter_rank(&self, i: usize, w: World) -> Rank {
        self.tables[i].row(w).get(!w.get(i))
    }

    /// Checks an already built network again. Always empty for values
    /// produced by [`NetworkBuilder::build`].
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut b = NetworkBuilder::new();
        for v in &self.variables {
            b.variable(v.clone());
        }
        for (p, c) in self.edges() {
            b.edge(p, c);
        }
        for (i, t) in self.tables.iter().enumerate() {
            b.table(i, t.clone());
        }
        validate_network(&b)
    }
}

/// `do(X_i = value)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AtomicAction {
    pub var: usize,
    pub value: bool,
}

impl AtomicAction {
    pub fn new(var: usize, value: bool) -> Self {
        AtomicAction { var, value }
    }
}

/// The joint ranking `κ(ω) = Σ_i κ(X_i(ω) | pa_i(ω))`.
pub fn stratified_joint(net: &CausalNetwork) -> RankingFunction {
    let n = net.num_vars();
    let ranks = World::all(n).map(|w| (0..n).map(|i| net.local_rank(i, w)).sum()).collect();
    RankingFunction::new(n, ranks).expect("normalized rows give a normalized joint")
}

/// Observation-free update for an atomic action: every other node keeps
/// its causal term, the acted-on node's term is dropped, and worlds that
/// violate the action are ruled out.
///
/// This is the legacy update; it cannot reinstate worlds excluded by
/// earlier observations and is not used when deciding oughts.
pub fn atomic_action_update(net: &CausalNetwork, a: AtomicAction) -> Result<RankingFunction> {
    let n = net.num_vars();
    if a.var >= n {
        return Err(Error::UnknownVariable(a.var));
    }
    let ranks = World::all(n)
        .map(|w| {
            if w.get(a.var) != a.value {
                return Rank::Infinite;
            }
            (0..n).filter(|&j| j != a.var).map(|j| net.local_rank(j, w)).sum()
        })
        .collect();
    RankingFunction::new(n, ranks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::INF;

    fn f(v: u64) -> Rank {
        Rank::Finite(v)
    }

    /// Light switch: u (switch up), n (normal switch), l (light on).
    /// l = (n & u) | (!n & !u).
    fn switch() -> CausalNetwork {
        let mut b = NetworkBuilder::new();
        let u = b.variable(Variable::new("u"));
        let n = b.variable(Variable::new("n"));
        let l = b.variable(Variable::new("l"));
        b.edge(u, l).edge(n, l);
        b.table(u, RankTable::root(f(0), f(0)));
        b.table(n, RankTable::root(f(0), f(1)));
        // rows indexed by (u, n) bits: 00, 10, 01, 11
        let rows = vec![
            Row::new(f(0), INF), // !u !n -> l
            Row::new(INF, f(0)), // u !n -> !l
            Row::new(INF, f(0)), // !u n -> !l
            Row::new(f(0), INF), // u n -> l
        ];
        b.table(l, RankTable::new(vec![u, n], rows));
        b.build().unwrap()
    }

    #[test]
    fn switch_network_is_valid() {
        assert!(switch().validate().is_empty());
        assert!(switch().table(2).is_functional());
    }

    #[test]
    fn switch_initial_ranking() {
        let k = stratified_joint(&switch());
        let at = |u: bool, n: bool, l: bool| {
            k.rank(World(0).with(0, u).with(1, n).with(2, l))
        };
        assert_eq!(at(true, true, true), f(0));
        assert_eq!(at(false, true, false), f(0));
        assert_eq!(at(true, false, false), f(1));
        assert_eq!(at(false, false, true), f(1));
        assert_eq!(k.support().count(), 4);
    }

    #[test]
    fn single_root_joint() {
        let mut b = NetworkBuilder::new();
        let x = b.variable(Variable::new("x"));
        b.table(x, RankTable::root(f(0), f(2)));
        let k = stratified_joint(&b.build().unwrap());
        assert_eq!(k.ranks(), &[f(2), f(0)]);
    }

    #[test]
    fn cycle_is_diagnosed() {
        let mut b = NetworkBuilder::new();
        let a = b.variable(Variable::new("a"));
        let c = b.variable(Variable::new("b"));
        b.edge(a, c).edge(c, a);
        b.table(a, RankTable::new(vec![c], vec![Row::new(f(0), f(0)); 2]));
        b.table(c, RankTable::new(vec![a], vec![Row::new(f(0), f(0)); 2]));
        let diags = validate_network(&b);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].to_string().starts_with("cycle"), "{}", diags[0]);
        assert!(matches!(b.build(), Err(Error::InvalidNetwork(_))));
    }

    #[test]
    fn unnormalized_row_is_diagnosed() {
        let mut b = NetworkBuilder::new();
        let x = b.variable(Variable::new("x"));
        b.table(x, RankTable::root(f(1), f(2)));
        let diags = validate_network(&b);
        assert_eq!(diags, vec![Diagnostic::RowNotNormalized { var: "x".into(), row: 0 }]);
        assert!(diags[0].to_string().contains("row not normalized"));
    }

    #[test]
    fn parent_mismatch_and_missing_table() {
        let mut b = NetworkBuilder::new();
        let x = b.variable(Variable::new("x"));
        let y = b.variable(Variable::new("y"));
        b.edge(x, y);
        b.table(y, RankTable::root(f(0), f(0)));
        let diags = validate_network(&b);
        assert!(diags.contains(&Diagnostic::MissingTable("x".into())));
        assert!(diags.iter().any(|d| matches!(d, Diagnostic::ParentMismatch { .. })));
    }

    #[test]
    fn table_parents_are_sorted_with_rows_permuted() {
        // given parent order (2, 0): bit 0 = var 2, bit 1 = var 0
        let rows = vec![
            Row::new(f(0), f(1)), // v2=F v0=F
            Row::new(f(0), f(2)), // v2=T v0=F
            Row::new(f(0), f(3)), // v2=F v0=T
            Row::new(f(0), f(4)), // v2=T v0=T
        ];
        let t = RankTable::new(vec![2, 0], rows);
        assert_eq!(t.parents(), &[0, 2]);
        assert_eq!(t.row(World(0b001)).if_false, f(3)); // v0=T v2=F
        assert_eq!(t.row(World(0b100)).if_false, f(2)); // v0=F v2=T
    }

    #[test]
    fn zero_rank_root_action_keeps_ranks() {
        let net = switch();
        let joint = stratified_joint(&net);
        let k = atomic_action_update(&net, AtomicAction::new(0, true)).unwrap();
        for (w, r) in k.iter() {
            if w.get(0) {
                assert_eq!(r, joint.rank(w));
            } else {
                assert_eq!(r, INF);
            }
        }
    }

    #[test]
    fn descendants_of_roots() {
        let net = switch();
        assert_eq!(net.descendants(0), BTreeSet::from([2]));
        assert!(net.descendants(2).is_empty());
    }
}
