//! (In)finiteness criteria and the verdict pipeline combining them with
//! dualization and sum decomposition.
//!
//! Every verdict is about the semigroup `⟨A⟩₊`. For invertible machines this
//! is the same question as for the group `⟨A⟩`: a finite semigroup of
//! bijections is a group.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helix::{helix_graph, is_union_of_cycles};
use crate::machine::{permutations, MealyMachine, State};
use crate::minimize::{is_md_trivial, minimize};
use crate::semigroup::{enumerate_order, Budget, Mode};
use crate::transform::{dual, inverse, sum_components};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Finite,
    Infinite,
    Unknown,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Finite => "finite",
            Decision::Infinite => "infinite",
            Decision::Unknown => "unknown",
        })
    }
}

/// Deduction rules, in priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    MdTrivial,
    Cycles,
    Finitary,
    Sidki,
    Limitary,
    Cayley,
    CayleyStar,
    Sum,
    Dual,
    Bfs,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::MdTrivial,
        Rule::Cycles,
        Rule::Finitary,
        Rule::Sidki,
        Rule::Limitary,
        Rule::Cayley,
        Rule::CayleyStar,
        Rule::Sum,
        Rule::Dual,
        Rule::Bfs,
    ];

    /// Criteria applied to a single machine, without transforming it.
    pub const BASE: [Rule; 7] =
        [Rule::MdTrivial, Rule::Cycles, Rule::Finitary, Rule::Sidki, Rule::Limitary, Rule::Cayley, Rule::CayleyStar];

    pub fn name(self) -> &'static str {
        match self {
            Rule::MdTrivial => "md-trivial",
            Rule::Cycles => "cycles",
            Rule::Finitary => "finitary",
            Rule::Sidki => "sidki",
            Rule::Limitary => "limitary",
            Rule::Cayley => "cayley",
            Rule::CayleyStar => "cayley-star",
            Rule::Sum => "sum",
            Rule::Dual => "dual",
            Rule::Bfs => "bfs",
        }
    }

    /// Criteria known before md-reduction and helix graphs.
    pub fn is_previous(self) -> bool {
        matches!(self, Rule::Finitary | Rule::Sidki | Rule::Limitary | Rule::Cayley | Rule::CayleyStar)
    }

    fn bit(self) -> u16 {
        1 << self as u16
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rule::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| Error::Parse(format!("unknown rule `{s}`")))
    }
}

/// A set of enabled rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RuleSet(u16);

impl RuleSet {
    pub fn empty() -> Self {
        RuleSet(0)
    }

    /// Every rule except BFS.
    pub fn all() -> Self {
        Rule::ALL.into_iter().filter(|&r| r != Rule::Bfs).collect()
    }

    pub fn contains(self, r: Rule) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn with(self, r: Rule) -> Self {
        RuleSet(self.0 | r.bit())
    }

    pub fn without(self, r: Rule) -> Self {
        RuleSet(self.0 & !r.bit())
    }

    pub fn iter(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |&r| self.contains(r))
    }
}

impl FromIterator<Rule> for RuleSet {
    fn from_iter<T: IntoIterator<Item = Rule>>(iter: T) -> Self {
        iter.into_iter().fold(RuleSet::empty(), RuleSet::with)
    }
}

/// Comma-separated rule names; `all`, `previous` and `new` name groups.
impl FromStr for RuleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut set = RuleSet::empty();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            set = match part {
                "all" => RuleSet(set.0 | RuleSet::all().0),
                "previous" => Rule::BASE.into_iter().filter(|r| r.is_previous()).fold(set, RuleSet::with),
                "new" => [Rule::MdTrivial, Rule::Cycles, Rule::Sum, Rule::Dual].into_iter().fold(set, RuleSet::with),
                name => set.with(name.parse()?),
            };
        }
        Ok(set)
    }
}

/// A transform applied on the way from the input machine to the machine a
/// base criterion was applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "step")]
pub enum Step {
    Minimize,
    Dual,
    /// Component `index` of [`sum_components`], out of `count`.
    Component {
        index: usize,
        count: usize,
    },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Minimize => f.write_str("minimize"),
            Step::Dual => f.write_str("dual"),
            Step::Component { index, count } => write!(f, "component {}/{}", index + 1, count),
        }
    }
}

/// How a decision was reached: transforms from the input, then the rule that
/// fired on the transformed machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub decision: Decision,
    pub path: Vec<Step>,
    pub rule: Rule,
    pub reason: String,
}

impl Derivation {
    fn leaf(decision: Decision, rule: Rule, reason: impl Into<String>) -> Self {
        Derivation { decision, path: Vec::new(), rule, reason: reason.into() }
    }

    fn behind(mut self, step: Step) -> Self {
        self.path.insert(0, step);
        self
    }

    /// Rule credited at the root: `Sum` or `Dual` when the path starts with
    /// that transform (minimization is transparent), the base rule otherwise.
    pub fn root_rule(&self) -> Rule {
        for step in &self.path {
            match step {
                Step::Minimize => continue,
                Step::Dual => return Rule::Dual,
                Step::Component { .. } => return Rule::Sum,
            }
        }
        self.rule
    }

    /// Replays the transforms of the path on `m`.
    pub fn target(&self, m: &MealyMachine) -> Result<MealyMachine> {
        let mut cur = m.clone();
        for step in &self.path {
            cur = match *step {
                Step::Minimize => minimize(&cur),
                Step::Dual => dual(&cur),
                Step::Component { index, count } => {
                    let comps = sum_components(&cur);
                    if comps.len() != count || index >= count {
                        return Err(Error::Invalid("derivation does not match the machine".into()));
                    }
                    comps[index].clone()
                }
            };
        }
        Ok(cur)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.path {
            write!(f, "{step} > ")?;
        }
        write!(f, "{}: {}", self.rule, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    /// Present unless the decision is unknown.
    pub derivation: Option<Derivation>,
}

impl Verdict {
    pub fn unknown() -> Self {
        Verdict { decision: Decision::Unknown, derivation: None }
    }

    fn from_derivation(d: Derivation) -> Self {
        Verdict { decision: d.decision, derivation: Some(d) }
    }

    fn from_option(d: Option<Derivation>) -> Self {
        d.map_or_else(Verdict::unknown, Verdict::from_derivation)
    }

    pub fn is_decided(&self) -> bool {
        self.decision != Decision::Unknown
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }
}

// ---------------------------------------------------------------------------
// Finite semigroups given by their tables.

/// A finite semigroup on `0..n`, `mul(a, b) = table[a * n + b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupTable {
    n: usize,
    table: Vec<usize>,
}

impl SemigroupTable {
    /// Checks the table entries and associativity.
    pub fn new(n: usize, table: Vec<usize>) -> Result<Self> {
        if n == 0 || table.len() != n * n || table.iter().any(|&v| v >= n) {
            return Err(Error::Invalid("semigroup table must be n×n over 0..n".into()));
        }
        let s = SemigroupTable { n, table };
        if !s.is_associative() {
            return Err(Error::Invalid("semigroup table is not associative".into()));
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    fn is_associative(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))))
    }

    /// `aS¹` as a membership vector.
    fn right_ideal(&self, a: usize) -> Vec<bool> {
        let mut set = vec![false; self.n];
        set[a] = true;
        for s in 0..self.n {
            set[self.mul(a, s)] = true;
        }
        set
    }

    fn left_ideal(&self, a: usize) -> Vec<bool> {
        let mut set = vec![false; self.n];
        set[a] = true;
        for s in 0..self.n {
            set[self.mul(s, a)] = true;
        }
        set
    }

    /// Whether Green's relation `H = R ∩ L` is the identity.
    pub fn is_h_trivial(&self) -> bool {
        let r: Vec<_> = (0..self.n).map(|a| self.right_ideal(a)).collect();
        let l: Vec<_> = (0..self.n).map(|a| self.left_ideal(a)).collect();
        (0..self.n).all(|a| (a + 1..self.n).all(|b| r[a] != r[b] || l[a] != l[b]))
    }

    /// Whether some subsemigroup with at least two elements satisfies
    /// `xy = y`. Any such subsemigroup contains one with exactly two.
    pub fn has_nontrivial_right_zero(&self) -> bool {
        let idempotent = |e: usize| self.mul(e, e) == e;
        (0..self.n).any(|e| {
            idempotent(e) && (0..self.n).any(|f| f != e && idempotent(f) && self.mul(e, f) == f && self.mul(f, e) == e)
        })
    }
}

// ---------------------------------------------------------------------------
// Graph helpers.

/// Strongly connected component id of every state of the δ-digraph
/// restricted to `keep`, plus whether the state lies on a cycle there.
fn components_and_cycles(m: &MealyMachine, keep: &[bool]) -> (Vec<usize>, Vec<bool>) {
    let q = m.states();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(q, q * m.letters());
    let nodes: Vec<_> = (0..q).map(|_| g.add_node(())).collect();
    for x in (0..q).filter(|&x| keep[x]) {
        for i in 0..m.letters() {
            let y = m.next(x, i);
            if keep[y] {
                g.add_edge(nodes[x], nodes[y], ());
            }
        }
    }
    let mut comp = vec![usize::MAX; q];
    let mut cyclic = vec![false; q];
    for (id, scc) in tarjan_scc(&g).into_iter().enumerate() {
        let multi = scc.len() > 1;
        for v in scc {
            let x = v.index();
            comp[x] = id;
            cyclic[x] = keep[x] && (multi || (0..m.letters()).any(|i| m.next(x, i) == x));
        }
    }
    (comp, cyclic)
}

/// States reachable from `start` (included) along edges kept by `keep`.
fn reachable(m: &MealyMachine, start: State, keep: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; m.states()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for i in 0..m.letters() {
            let y = m.next(x, i);
            if keep[y] && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// States acting as the identity on `Σ*`: the greatest set of states with
/// identity output whose successors all belong to the set.
pub fn identity_states(m: &MealyMachine) -> Vec<bool> {
    let mut id: Vec<bool> = (0..m.states()).map(|x| (0..m.letters()).all(|i| m.output(x, i) == i)).collect();
    loop {
        let mut changed = false;
        for x in 0..m.states() {
            if id[x] && (0..m.letters()).any(|i| !id[m.next(x, i)]) {
                id[x] = false;
                changed = true;
            }
        }
        if !changed {
            return id;
        }
    }
}

// ---------------------------------------------------------------------------
// Base criteria. Each returns the derivation it produces, if it fires.

fn md_trivial(m: &MealyMachine) -> Option<Derivation> {
    is_md_trivial(m)
        .then(|| Derivation::leaf(Decision::Finite, Rule::MdTrivial, "md-reduction ends at the trivial machine"))
}

fn is_ir_not_bireversible(m: &MealyMachine) -> bool {
    m.is_invertible() && m.is_reversible() && !helix_graph(m, 1, 1).map_or(true, |h| is_union_of_cycles(&h))
}

fn cycles(m: &MealyMachine) -> Option<Derivation> {
    if is_ir_not_bireversible(m) {
        return Some(Derivation::leaf(
            Decision::Infinite,
            Rule::Cycles,
            "IR machine whose (1,1) helix graph is not a union of cycles",
        ));
    }
    let inv = inverse(m).ok()?;
    is_ir_not_bireversible(&inv).then(|| {
        Derivation::leaf(
            Decision::Infinite,
            Rule::Cycles,
            "inverse is an IR machine whose (1,1) helix graph is not a union of cycles",
        )
    })
}

fn finitary(m: &MealyMachine) -> Option<Derivation> {
    let mm = minimize(m);
    let active: Vec<bool> = identity_states(&mm).into_iter().map(|id| !id).collect();
    let (_, cyclic) = components_and_cycles(&mm, &active);
    (!cyclic.iter().any(|&c| c)).then(|| {
        Derivation::leaf(
            Decision::Finite,
            Rule::Finitary,
            "non-identity states of the minimal machine form an acyclic digraph",
        )
    })
}

/// Boundedness tests for the Sidki criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    /// Every cyclic non-identity state reachable from `x` has exactly one
    /// transition to a non-identity state.
    OutDegreeOne,
    /// Every cyclic non-identity state reachable from `x` has exactly one
    /// transition to a state from which a cycle of non-identity states is
    /// reachable. This is the exact condition for the number of non-identity
    /// sections of `x` to stay bounded.
    SingleCycleExit,
}

/// States of the minimal machine `mm` whose non-identity sections are
/// bounded, according to `test`.
pub fn bounded_states(mm: &MealyMachine, test: Boundedness) -> Vec<bool> {
    let q = mm.states();
    let active: Vec<bool> = identity_states(mm).into_iter().map(|id| !id).collect();
    let (_, cyclic) = components_and_cycles(mm, &active);
    // states from which a cyclic non-identity state is reachable
    let reaches_cycle: Vec<bool> =
        (0..q).map(|x| active[x] && reachable(mm, x, &active).iter().zip(&cyclic).any(|(&r, &c)| r && c)).collect();
    let exits = |v: State| -> usize {
        (0..mm.letters())
            .filter(|&i| {
                let y = mm.next(v, i);
                match test {
                    Boundedness::OutDegreeOne => active[y],
                    Boundedness::SingleCycleExit => reaches_cycle[y],
                }
            })
            .count()
    };
    let good: Vec<bool> = (0..q).map(|v| !cyclic[v] || exits(v) == 1).collect();
    (0..q).map(|x| !active[x] || reachable(mm, x, &active).iter().enumerate().all(|(v, &r)| !r || good[v])).collect()
}

/// The boundedness test used by [`sidki_criterion`].
pub const SIDKI_BOUNDEDNESS: Boundedness = Boundedness::SingleCycleExit;

fn sidki_with(m: &MealyMachine, test: Boundedness) -> Option<Derivation> {
    if !m.is_invertible() {
        return None;
    }
    let mm = minimize(m);
    let bounded = bounded_states(&mm, test);
    let everything = vec![true; mm.states()];
    let (comp, _) = components_and_cycles(&mm, &everything);
    for x in (0..mm.states()).filter(|&x| bounded[x]) {
        for i in 0..mm.letters() {
            let (y, j) = (mm.next(x, i), mm.output(x, i));
            if j != i && comp[y] == comp[x] {
                return Some(Derivation::leaf(
                    Decision::Infinite,
                    Rule::Sidki,
                    format!(
                        "bounded state {x} of the minimal machine has an active transition {i}|{j} inside its strongly connected component"
                    ),
                ));
            }
        }
    }
    None
}

fn sidki(m: &MealyMachine) -> Option<Derivation> {
    sidki_with(m, SIDKI_BOUNDEDNESS)
}

fn limitary(m: &MealyMachine) -> Option<Derivation> {
    let everything = vec![true; m.states()];
    let (_, cyclic) = components_and_cycles(m, &everything);
    let mut below = vec![false; m.states()];
    for y in (0..m.states()).filter(|&y| cyclic[y]) {
        for (x, r) in reachable(m, y, &everything).into_iter().enumerate() {
            below[x] |= r;
        }
    }
    let branchless = |x: State| (1..m.letters()).all(|i| m.next(x, i) == m.next(x, 0));
    (0..m.states()).all(|x| !below[x] || branchless(x)).then(|| {
        Derivation::leaf(
            Decision::Finite,
            Rule::Limitary,
            "every state reachable from a cyclic state is without branch",
        )
    })
}

/// Which Cayley construction a machine was identified with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleyKind {
    /// `C(S)`: `x -y|xy-> xy`.
    Plain,
    /// `C*(S)`: `x -y|yx-> xy`.
    Star,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyMatch {
    pub kind: CayleyKind,
    /// Whether the inverse of the machine was identified.
    pub inverted: bool,
    /// The semigroup, carried by the states of the (possibly inverted)
    /// machine.
    pub semigroup: SemigroupTable,
    /// Letter `i` stands for the element carried by state `letter_to_state[i]`.
    pub letter_to_state: Vec<usize>,
}

impl CayleyMatch {
    /// The finiteness condition for the generated semigroup.
    pub fn is_finite(&self) -> bool {
        let s = &self.semigroup;
        match self.kind {
            CayleyKind::Plain => s.is_h_trivial(),
            CayleyKind::Star => s.is_h_trivial() && !s.has_nontrivial_right_zero(),
        }
    }
}

fn cayley_direct(m: &MealyMachine, kind: CayleyKind) -> Option<(SemigroupTable, Vec<usize>)> {
    let n = m.states();
    if m.letters() != n {
        return None;
    }
    'bijections: for f in permutations(n) {
        // mul(x, f(i)) = δ_i(x)
        let mut table = vec![0; n * n];
        for x in 0..n {
            for i in 0..n {
                table[x * n + f[i]] = m.next(x, i);
            }
        }
        for x in 0..n {
            for i in 0..n {
                let want = match kind {
                    CayleyKind::Plain => table[x * n + f[i]],
                    CayleyKind::Star => table[f[i] * n + x],
                };
                if f[m.output(x, i)] != want {
                    continue 'bijections;
                }
            }
        }
        if let Ok(s) = SemigroupTable::new(n, table) {
            return Some((s, f));
        }
    }
    None
}

/// Identifies `m`, or its inverse, with a Cayley machine `C(S)` or `C*(S)`
/// of the requested kind.
pub fn identify_cayley(m: &MealyMachine, kind: CayleyKind) -> Option<CayleyMatch> {
    let wrap =
        |inverted| move |(semigroup, letter_to_state)| CayleyMatch { kind, inverted, semigroup, letter_to_state };
    cayley_direct(m, kind).map(wrap(false)).or_else(|| {
        let inv = inverse(m).ok()?;
        cayley_direct(&inv, kind).map(wrap(true))
    })
}

fn cayley(m: &MealyMachine, kind: CayleyKind) -> Option<Derivation> {
    let found = identify_cayley(m, kind)?;
    let (rule, name) = match kind {
        CayleyKind::Plain => (Rule::Cayley, "C(S)"),
        CayleyKind::Star => (Rule::CayleyStar, "C*(S)"),
    };
    let what = if found.inverted { format!("inverse of {name}") } else { name.to_string() };
    let n = found.semigroup.len();
    let (decision, why) = match (found.is_finite(), kind) {
        (true, CayleyKind::Plain) => (Decision::Finite, "S is H-trivial"),
        (true, CayleyKind::Star) => (Decision::Finite, "S is H-trivial without non-trivial right zero subsemigroup"),
        (false, _) if !found.semigroup.is_h_trivial() => (Decision::Infinite, "S is not H-trivial"),
        (false, _) => (Decision::Infinite, "S has a non-trivial right zero subsemigroup"),
    };
    Some(Derivation::leaf(decision, rule, format!("isomorphic to the {what} of a {n}-element semigroup; {why}")))
}

/// A sum whose components all have a single state acts letter by letter, so
/// its semigroup embeds in the transformation monoid of the alphabet.
fn letterwise(m: &MealyMachine) -> Option<Derivation> {
    let count = sum_components(m).len();
    (count > 1 && count == m.states()).then(|| {
        Derivation::leaf(
            Decision::Finite,
            Rule::Sum,
            format!("sum of {count} one-state components; acts letter by letter"),
        )
    })
}

fn base(rule: Rule, m: &MealyMachine) -> Option<Derivation> {
    match rule {
        Rule::MdTrivial => md_trivial(m),
        Rule::Cycles => cycles(m),
        Rule::Finitary => finitary(m),
        Rule::Sidki => sidki(m),
        Rule::Limitary => limitary(m),
        Rule::Cayley => cayley(m, CayleyKind::Plain),
        Rule::CayleyStar => cayley(m, CayleyKind::Star),
        Rule::Sum => letterwise(m),
        Rule::Dual | Rule::Bfs => None,
    }
}

/// Applies one base criterion to `m` as given.
///
/// # Panics
/// If `rule` is not one of [`Rule::BASE`].
pub fn criterion(rule: Rule, m: &MealyMachine) -> Verdict {
    assert!(Rule::BASE.contains(&rule), "{rule} is not a base criterion");
    Verdict::from_option(base(rule, m))
}

/// Finite when md-reduction reaches the trivial machine.
pub fn md_trivial_criterion(m: &MealyMachine) -> Verdict {
    criterion(Rule::MdTrivial, m)
}

/// Infinite when the machine, or its inverse, is IR but not bireversible.
pub fn cycles_criterion(m: &MealyMachine) -> Verdict {
    criterion(Rule::Cycles, m)
}

/// Finite when every long enough section of every state is the identity.
pub fn finitary_criterion(m: &MealyMachine) -> Verdict {
    criterion(Rule::Finitary, m)
}

/// Infinite when a bounded state of an invertible machine has an active
/// transition inside its strongly connected component.
pub fn sidki_criterion(m: &MealyMachine) -> Verdict {
    criterion(Rule::Sidki, m)
}

/// Sidki's criterion with an explicit boundedness test.
pub fn sidki_criterion_with(m: &MealyMachine, test: Boundedness) -> Verdict {
    Verdict::from_option(sidki_with(m, test))
}

/// Finite when the δ-digraph has limitary cycles; the outputs are ignored.
pub fn limitary_cycles_criterion(m: &MealyMachine) -> Verdict {
    criterion(Rule::Limitary, m)
}

/// Decides machines isomorphic to a Cayley machine `C(S)` or `C*(S)`, or to
/// the inverse of one, by the semigroup condition on `S`. The plain
/// construction is tried first.
pub fn cayley_criterion(m: &MealyMachine) -> Verdict {
    Verdict::from_option(cayley(m, CayleyKind::Plain).or_else(|| cayley(m, CayleyKind::Star)))
}

// ---------------------------------------------------------------------------
// The pipeline.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideConfig {
    pub rules: RuleSet,
    /// Maximal number of dual and sum steps along a derivation.
    pub depth: usize,
    /// Budget for a BFS enumeration at the root, used when `Rule::Bfs` is
    /// enabled and nothing else fired.
    pub budget: Budget,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig { rules: RuleSet::all(), depth: 3, budget: Budget::default() }
    }
}

/// Every derivation the enabled rules produce for `m`, in priority order.
///
/// At each machine the base criteria are tried on the machine itself and on
/// its minimization, then every sum component (only infinite components
/// transfer), then the dual of the minimization. BFS is never used here.
pub fn derivations(m: &MealyMachine, config: &DecideConfig) -> Vec<Derivation> {
    let mut out = Vec::new();
    search(m, config.rules, config.depth, false, false, &mut out);
    out
}

/// Returns whether the search should stop. `from_dual` is set when `m` is
/// itself a dual, so that dualizing again (which leads back) is skipped.
fn search(
    m: &MealyMachine,
    rules: RuleSet,
    depth: usize,
    from_dual: bool,
    first: bool,
    out: &mut Vec<Derivation>,
) -> bool {
    let push = |d: Derivation, out: &mut Vec<Derivation>| {
        out.push(d);
        first
    };
    for rule in Rule::BASE.into_iter().filter(|&r| rules.contains(r)) {
        if let Some(d) = base(rule, m) {
            if push(d, out) {
                return true;
            }
        }
    }
    let mm = minimize(m);
    let minimized = mm != *m;
    if minimized {
        for rule in Rule::BASE.into_iter().filter(|&r| rules.contains(r)) {
            if let Some(d) = base(rule, &mm) {
                if push(d.behind(Step::Minimize), out) {
                    return true;
                }
            }
        }
    }
    if rules.contains(Rule::Sum) {
        if let Some(d) = letterwise(m) {
            if push(d, out) {
                return true;
            }
        }
    }
    if depth == 0 {
        return false;
    }
    if rules.contains(Rule::Sum) {
        let comps = sum_components(m);
        let count = comps.len();
        if count > 1 {
            for (index, c) in comps.iter().enumerate() {
                let mut sub = Vec::new();
                search(c, rules, depth - 1, false, false, &mut sub);
                if let Some(d) = sub.into_iter().find(|d| d.decision == Decision::Infinite) {
                    if push(d.behind(Step::Component { index, count }), out) {
                        return true;
                    }
                }
            }
        }
    }
    if rules.contains(Rule::Dual) && !from_dual {
        let mut sub = Vec::new();
        search(&dual(&mm), rules, depth - 1, true, first, &mut sub);
        for d in sub {
            let d = d.behind(Step::Dual);
            let d = if minimized { d.behind(Step::Minimize) } else { d };
            if push(d, out) {
                return true;
            }
        }
    }
    false
}

/// First derivation in priority order, falling back to a BFS enumeration
/// when enabled.
pub fn decide(m: &MealyMachine, config: &DecideConfig) -> Verdict {
    let mut out = Vec::new();
    search(m, config.rules, config.depth, false, true, &mut out);
    if let Some(d) = out.into_iter().next() {
        return Verdict::from_derivation(d);
    }
    if config.rules.contains(Rule::Bfs) {
        if let Ok(r) = enumerate_order(m, Mode::Semigroup, config.budget) {
            if let Some(order) = r.order {
                return Verdict::from_derivation(Derivation::leaf(
                    Decision::Finite,
                    Rule::Bfs,
                    format!("enumeration closed with {order} elements"),
                ));
            }
        }
    }
    Verdict::unknown()
}

/// Re-runs the rule named by a derivation on the machine its path leads to.
/// Sum and dual steps are checked by the recursion they stand for.
pub fn replay(m: &MealyMachine, d: &Derivation, budget: Budget) -> Result<Decision> {
    let target = d.target(m)?;
    Ok(match d.rule {
        Rule::Bfs => match enumerate_order(&target, Mode::Semigroup, budget)?.order {
            Some(_) => Decision::Finite,
            None => Decision::Unknown,
        },
        rule => base(rule, &target).map_or(Decision::Unknown, |d| d.decision),
    })
}
