//! Exhaustive censuses of small Mealy machines up to isomorphism: class
//! partition, criteria sweep and table emission.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{criterion, derivations, DecideConfig, Decision, Rule};
use crate::error::{Error, Result};
use crate::machine::{classify, permutations, MealyMachine, Relabelings};
use crate::semigroup::{enumerate_order, Budget, Mode};
use crate::size_limit;
use crate::transform::{dual, inverse};

/// The seven classes partitioning all machines, in table column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ClassTag {
    /// Inverses of machines in `JIR`.
    Ijir,
    /// Invertible machines in none of the classes of IR machines and their
    /// inverses.
    Ji,
    /// IR machines that are not bireversible.
    Jir,
    /// Bireversible machines.
    Bir,
    /// Duals of machines in `IJIR`.
    Dijir,
    /// Duals of machines in `JI`.
    Dji,
    /// Everything else.
    N,
}

impl ClassTag {
    pub const ALL: [ClassTag; 7] =
        [ClassTag::Ijir, ClassTag::Ji, ClassTag::Jir, ClassTag::Bir, ClassTag::Dijir, ClassTag::Dji, ClassTag::N];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Ijir => "IJIR",
            ClassTag::Ji => "JI",
            ClassTag::Jir => "JIR",
            ClassTag::Bir => "BIR",
            ClassTag::Dijir => "DIJIR",
            ClassTag::Dji => "DJI",
            ClassTag::N => "N",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classes decidable without looking at the dual.
#[derive(PartialEq, Eq)]
enum Own {
    Bir,
    Jir,
    Ijir,
    Ji,
    Other,
}

fn own_class(m: &MealyMachine) -> Own {
    let flags = classify(m);
    if flags.bireversible {
        Own::Bir
    } else if flags.ir {
        Own::Jir
    } else if flags.invertible {
        let inv = inverse(m).expect("invertible");
        let f = classify(&inv);
        if f.ir && !f.bireversible {
            Own::Ijir
        } else {
            Own::Ji
        }
    } else {
        Own::Other
    }
}

/// Class of `m`, testing BIR, JIR, IJIR, DIJIR, JI, DJI in that order.
pub fn partition_class(m: &MealyMachine) -> ClassTag {
    let own = own_class(m);
    match own {
        Own::Bir => return ClassTag::Bir,
        Own::Jir => return ClassTag::Jir,
        Own::Ijir => return ClassTag::Ijir,
        _ => {}
    }
    let of_dual = own_class(&dual(m));
    if of_dual == Own::Ijir {
        ClassTag::Dijir
    } else if own == Own::Ji {
        ClassTag::Ji
    } else if of_dual == Own::Ji {
        ClassTag::Dji
    } else {
        ClassTag::N
    }
}

/// Which raw tables a census ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    All,
    /// Every output function is a permutation.
    Invertible,
    /// Every transition function is a permutation.
    Reversible,
    InvOrRev,
}

impl Filter {
    pub fn name(self) -> &'static str {
        match self {
            Filter::All => "all",
            Filter::Invertible => "invertible",
            Filter::Reversible => "reversible",
            Filter::InvOrRev => "inv_or_rev",
        }
    }

    pub fn accepts(self, m: &MealyMachine) -> bool {
        match self {
            Filter::All => true,
            Filter::Invertible => m.is_invertible(),
            Filter::Reversible => m.is_reversible(),
            Filter::InvOrRev => m.is_invertible() || m.is_reversible(),
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Filter::All),
            "invertible" => Ok(Filter::Invertible),
            "reversible" => Ok(Filter::Reversible),
            "inv_or_rev" | "inv-or-rev" => Ok(Filter::InvOrRev),
            _ => Err(Error::Parse(format!("unknown filter `{s}`"))),
        }
    }
}

/// One block of raw tables: arbitrary or permutation rows for δ and ρ.
/// Indices are mixed radix with the ρ part least significant.
struct Block {
    q: usize,
    p: usize,
    /// δ columns (one per letter) drawn from permutations of the states.
    delta_perms: Option<Vec<Vec<usize>>>,
    /// ρ rows (one per state) drawn from permutations of the letters.
    rho_perms: Option<Vec<Vec<usize>>>,
}

impl Block {
    fn new(q: usize, p: usize, reversible: bool, invertible: bool) -> Self {
        Block { q, p, delta_perms: reversible.then(|| permutations(q)), rho_perms: invertible.then(|| permutations(p)) }
    }

    fn delta_count(&self) -> u128 {
        match &self.delta_perms {
            Some(perms) => (perms.len() as u128).pow(self.p as u32),
            None => (self.q as u128).pow((self.q * self.p) as u32),
        }
    }

    fn rho_count(&self) -> u128 {
        match &self.rho_perms {
            Some(perms) => (perms.len() as u128).pow(self.q as u32),
            None => (self.p as u128).pow((self.q * self.p) as u32),
        }
    }

    fn len(&self) -> u128 {
        self.delta_count() * self.rho_count()
    }

    fn machine(&self, index: usize) -> MealyMachine {
        let (q, p) = (self.q, self.p);
        let rho_count = self.rho_count() as usize;
        let (mut d, mut r) = (index / rho_count, index % rho_count);
        let mut delta = vec![0; q * p];
        let mut rho = vec![0; q * p];
        match &self.delta_perms {
            Some(perms) => {
                for i in (0..p).rev() {
                    let perm = &perms[d % perms.len()];
                    d /= perms.len();
                    for x in 0..q {
                        delta[x * p + i] = perm[x];
                    }
                }
            }
            None => {
                for k in (0..q * p).rev() {
                    delta[k] = d % q;
                    d /= q;
                }
            }
        }
        match &self.rho_perms {
            Some(perms) => {
                for x in (0..q).rev() {
                    let perm = &perms[r % perms.len()];
                    r /= perms.len();
                    rho[x * p..(x + 1) * p].copy_from_slice(perm);
                }
            }
            None => {
                for k in (0..q * p).rev() {
                    rho[k] = r % p;
                    r /= p;
                }
            }
        }
        MealyMachine::new(q, p, delta, rho).expect("decoded tables are in range")
    }
}

/// Raw blocks for a filter, each paired with a predicate excluding tables
/// already covered by an earlier block.
fn blocks(q: usize, p: usize, filter: Filter) -> Vec<(Block, bool)> {
    match filter {
        Filter::All => vec![(Block::new(q, p, false, false), false)],
        Filter::Invertible => vec![(Block::new(q, p, false, true), false)],
        Filter::Reversible => vec![(Block::new(q, p, true, false), false)],
        // reversible tables that are also invertible were listed in the first block
        Filter::InvOrRev => vec![(Block::new(q, p, false, true), false), (Block::new(q, p, true, false), true)],
    }
}

/// Number of raw tables scanned by a census.
pub fn raw_space(q: usize, p: usize, filter: Filter) -> u128 {
    blocks(q, p, filter).iter().map(|(b, _)| b.len()).sum()
}

const CHUNK: usize = 1 << 14;

/// One representative per isomorphism class (the lexicographically least
/// table), in a deterministic order independent of the worker count.
pub fn enumerate_classes(q: usize, p: usize, filter: Filter) -> Result<Vec<MealyMachine>> {
    if q == 0 || p == 0 {
        return Err(Error::Invalid("a census needs at least one state and one letter".into()));
    }
    let limit = size_limit() as u128;
    let needed = raw_space(q, p, filter);
    if needed > limit {
        return Err(Error::SizeLimit { what: "census raw space", needed, limit });
    }
    let rel = Relabelings::new(q, p);
    let mut out = Vec::new();
    for (block, skip_invertible) in blocks(q, p, filter) {
        let len = block.len() as usize;
        let chunks = len.div_ceil(CHUNK);
        let found: Vec<Vec<MealyMachine>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                (c * CHUNK..((c + 1) * CHUNK).min(len))
                    .map(|index| block.machine(index))
                    .filter(|m| !(skip_invertible && m.is_invertible()))
                    .filter(|m| rel.is_canonical(m))
                    .collect()
            })
            .collect();
        out.extend(found.into_iter().flatten());
    }
    Ok(out)
}

/// Outcome of a BFS enumeration used as ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruth {
    Finite(usize),
    BudgetExceeded,
}

/// Everything a census computes about one class representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub machine: MealyMachine,
    pub tag: ClassTag,
    /// Base criteria that fire on the representative itself.
    pub base: Vec<(Rule, Decision)>,
    /// Whether a derivation starting with a sum decomposition exists.
    pub via_sum: bool,
    /// Whether a derivation starting with dualization exists.
    pub via_dual: bool,
    /// Decisions reached by all derivations; more than one distinct value
    /// is a contradiction.
    pub decisions: Vec<Decision>,
    pub ground_truth: Option<GroundTruth>,
}

impl ClassRecord {
    pub fn fires(&self, rule: Rule) -> bool {
        match rule {
            Rule::Sum => self.via_sum,
            Rule::Dual => self.via_dual,
            _ => self.base.iter().any(|&(r, _)| r == rule),
        }
    }

    /// Combined decision of all derivations; `Unknown` if none fired.
    pub fn decision(&self) -> Decision {
        self.decisions.first().copied().unwrap_or(Decision::Unknown)
    }

    pub fn is_contradictory(&self) -> bool {
        self.decisions.len() > 1
    }

    /// A derivation disagrees with the BFS ground truth: infinite although
    /// the enumeration closed, or finite although it ran out of budget.
    pub fn contradicts_ground_truth(&self) -> bool {
        match self.ground_truth {
            Some(GroundTruth::Finite(_)) => self.decisions.contains(&Decision::Infinite),
            Some(GroundTruth::BudgetExceeded) => self.decisions.contains(&Decision::Finite),
            None => false,
        }
    }
}

/// States guard for ground-truth enumerations. Finite semigroups of small
/// census machines have tiny elements, while infinite ones grow elements of
/// thousands of states; a tight guard stops the latter early.
pub const GROUND_TRUTH_STATES_PER_ELEMENT: usize = 4;

/// Ground-truth budget with `elements` distinct elements.
pub fn ground_truth_budget(elements: usize) -> Budget {
    Budget::with_states_per_element(elements, GROUND_TRUTH_STATES_PER_ELEMENT)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CensusConfig {
    pub decide: DecideConfig,
    /// Run a BFS enumeration with this budget on every class.
    pub ground_truth: Option<Budget>,
}

pub fn analyse(m: &MealyMachine, config: &CensusConfig) -> ClassRecord {
    let base = Rule::BASE
        .into_iter()
        .filter(|&r| config.decide.rules.contains(r))
        .filter_map(|r| {
            let v = criterion(r, m);
            v.is_decided().then_some((r, v.decision))
        })
        .collect();
    let ders = derivations(m, &config.decide);
    let mut decisions: Vec<Decision> = ders.iter().map(|d| d.decision).collect();
    decisions.sort();
    decisions.dedup();
    let ground_truth = config.ground_truth.map(|budget| {
        match enumerate_order(m, Mode::Semigroup, budget).expect("positive budget").order {
            Some(order) => GroundTruth::Finite(order),
            None => GroundTruth::BudgetExceeded,
        }
    });
    ClassRecord {
        machine: m.clone(),
        tag: partition_class(m),
        base,
        via_sum: ders.iter().any(|d| d.root_rule() == Rule::Sum),
        via_dual: ders.iter().any(|d| d.root_rule() == Rule::Dual),
        decisions,
        ground_truth,
    }
}

/// Analyses every class representative, in enumeration order.
pub fn census_records(q: usize, p: usize, filter: Filter, config: &CensusConfig) -> Result<Vec<ClassRecord>> {
    let classes = enumerate_classes(q, p, filter)?;
    Ok(classes.par_iter().map(|m| analyse(m, config)).collect())
}

/// One table row: counts per class plus the total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub name: String,
    pub counts: [usize; 7],
    pub total: usize,
}

impl Row {
    fn count(name: &str, records: &[ClassRecord], pred: impl Fn(&ClassRecord) -> bool) -> Self {
        let mut counts = [0; 7];
        for r in records.iter().filter(|r| pred(r)) {
            counts[r.tag.index()] += 1;
        }
        Row { name: name.to_string(), counts, total: counts.iter().sum() }
    }

    pub fn get(&self, tag: ClassTag) -> usize {
        self.counts[tag.index()]
    }
}

/// Per-class and per-criterion counts of a census, laid out like the
/// published tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub states: usize,
    pub letters: usize,
    pub filter: Filter,
    pub depth: usize,
    pub rows: Vec<Row>,
}

pub const ROW_CLASSES: &str = "Mealy automata";
pub const ROW_PREVIOUS_UNION: &str = "previous union";
pub const ROW_NEW_UNION: &str = "new union";
pub const ROW_TOTAL_UNION: &str = "total union";
pub const ROW_CONTRADICTIONS: &str = "contradictions";

/// Row name of a rule in the report.
pub fn row_name(rule: Rule) -> &'static str {
    match rule {
        Rule::MdTrivial => "md-trivial",
        Rule::Cycles => "Cycles",
        Rule::Finitary => "Finitary",
        Rule::Sidki => "Sidki",
        Rule::Limitary => "Limitary cycles",
        Rule::Cayley => "Cayley±",
        Rule::CayleyStar => "Dual Cayley±",
        Rule::Sum => "+Sum",
        Rule::Dual => "+Dual",
        Rule::Bfs => "BFS finite",
    }
}

const PREVIOUS: [Rule; 5] = [Rule::Finitary, Rule::Sidki, Rule::Limitary, Rule::Cayley, Rule::CayleyStar];
const NEW: [Rule; 4] = [Rule::MdTrivial, Rule::Cycles, Rule::Sum, Rule::Dual];

impl CensusReport {
    pub fn from_records(q: usize, p: usize, filter: Filter, depth: usize, records: &[ClassRecord]) -> Self {
        let mut rows = vec![Row::count(ROW_CLASSES, records, |_| true)];
        for rule in PREVIOUS {
            rows.push(Row::count(row_name(rule), records, |r| r.fires(rule)));
        }
        rows.push(Row::count(ROW_PREVIOUS_UNION, records, |r| PREVIOUS.iter().any(|&x| r.fires(x))));
        for rule in NEW {
            rows.push(Row::count(row_name(rule), records, |r| r.fires(rule)));
        }
        rows.push(Row::count(ROW_NEW_UNION, records, |r| NEW.iter().any(|&x| r.fires(x))));
        rows.push(Row::count(ROW_TOTAL_UNION, records, |r| r.decision() != Decision::Unknown));
        rows.push(Row::count("decided finite", records, |r| r.decision() == Decision::Finite && !r.is_contradictory()));
        rows.push(Row::count("decided infinite", records, |r| {
            r.decision() == Decision::Infinite && !r.is_contradictory()
        }));
        rows.push(Row::count(ROW_CONTRADICTIONS, records, ClassRecord::is_contradictory));
        if records.iter().any(|r| r.ground_truth.is_some()) {
            rows.push(Row::count("BFS finite", records, |r| matches!(r.ground_truth, Some(GroundTruth::Finite(_)))));
            rows.push(Row::count("BFS budget exceeded", records, |r| {
                r.ground_truth == Some(GroundTruth::BudgetExceeded)
            }));
            rows.push(Row::count("ground truth contradictions", records, ClassRecord::contradicts_ground_truth));
        }
        CensusReport { states: q, letters: p, filter, depth, rows }
    }

    pub fn row(&self, name: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Class sizes in column order.
    pub fn class_totals(&self) -> [usize; 7] {
        self.row(ROW_CLASSES).expect("always present").counts
    }

    pub fn total(&self) -> usize {
        self.row(ROW_CLASSES).expect("always present").total
    }

    /// CSV with one line per row, columns `row,IJIR,JI,JIR,BIR,DIJIR,DJI,N,W`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for tag in ClassTag::ALL {
            out.push(',');
            out.push_str(tag.name());
        }
        out.push_str(",W\n");
        for row in &self.rows {
            out.push_str(&row.name);
            for c in row.counts {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{}\n", row.total));
        }
        out
    }

    /// Aligned text table.
    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
        let mut out = format!(
            "{}-letter {}-state Mealy automata ({}, depth {})\n",
            self.letters, self.states, self.filter, self.depth
        );
        out.push_str(&format!("{:width$}", ""));
        for tag in ClassTag::ALL {
            out.push_str(&format!(" {:>7}", tag.name()));
        }
        out.push_str(&format!(" {:>7}\n", "W"));
        for row in &self.rows {
            let pad = width - row.name.chars().count();
            out.push_str(&row.name);
            out.push_str(&" ".repeat(pad));
            for c in row.counts {
                out.push_str(&format!(" {c:>7}"));
            }
            out.push_str(&format!(" {:>7}\n", row.total));
        }
        out
    }
}

/// Enumerates, analyses and tabulates a census.
pub fn run_census(q: usize, p: usize, filter: Filter, config: &CensusConfig) -> Result<CensusReport> {
    let records = census_records(q, p, filter, config)?;
    Ok(CensusReport::from_records(q, p, filter, config.decide.depth, &records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use crate::machine::canonical_form;
    use std::collections::HashSet;

    #[test]
    fn raw_space_sizes() {
        assert_eq!(raw_space(2, 2, Filter::All), 256);
        assert_eq!(raw_space(3, 2, Filter::All), 46656);
        assert_eq!(raw_space(3, 3, Filter::Invertible), 216 * 19683);
        assert_eq!(raw_space(3, 3, Filter::InvOrRev), 2 * 216 * 19683);
    }

    #[test]
    fn blocks_decode_every_table_once() {
        for filter in [Filter::All, Filter::Invertible, Filter::Reversible] {
            for (block, _) in blocks(2, 2, filter) {
                let all: HashSet<_> = (0..block.len() as usize).map(|i| block.machine(i)).collect();
                assert_eq!(all.len() as u128, block.len());
                assert!(all.iter().all(|m| filter.accepts(m)));
            }
        }
    }

    #[test]
    fn two_by_two_has_76_classes() {
        let classes = enumerate_classes(2, 2, Filter::All).unwrap();
        assert_eq!(classes.len(), 76);
        let keys: HashSet<_> = classes.iter().map(canonical_form).collect();
        assert_eq!(keys.len(), 76);
    }

    #[test]
    fn filters_select_subsets() {
        let all = enumerate_classes(2, 2, Filter::All).unwrap();
        for filter in [Filter::Invertible, Filter::Reversible, Filter::InvOrRev] {
            let sub = enumerate_classes(2, 2, filter).unwrap();
            let want: Vec<_> = all.iter().filter(|m| filter.accepts(m)).cloned().collect();
            let mut got = sub.clone();
            got.sort_by_key(canonical_form);
            let mut want = want;
            want.sort_by_key(canonical_form);
            assert_eq!(got, want, "{filter}");
        }
    }

    #[test]
    fn class_examples() {
        assert_eq!(partition_class(&fixture("aleshin").unwrap()), ClassTag::Bir);
        assert_eq!(partition_class(&fixture("lamplighter").unwrap()), ClassTag::Jir);
        let inv = inverse(&fixture("lamplighter").unwrap()).unwrap();
        assert_eq!(partition_class(&inv), ClassTag::Ijir);
        assert_eq!(partition_class(&dual(&inv)), ClassTag::Dijir);
        let adding = fixture("adding_machine").unwrap();
        assert_eq!(partition_class(&adding), ClassTag::Ji);
        assert_eq!(partition_class(&dual(&adding)), ClassTag::Dji);
        assert_eq!(partition_class(&fixture("noninvertible2").unwrap()), ClassTag::N);
    }

    #[test]
    fn size_limit_is_enforced() {
        assert!(matches!(enumerate_classes(3, 3, Filter::All), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn csv_layout() {
        let report = run_census(2, 2, Filter::All, &CensusConfig::default()).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("row,IJIR,JI,JIR,BIR,DIJIR,DJI,N,W"));
        assert_eq!(lines.next(), Some("Mealy automata,1,14,1,8,1,14,37,76"));
    }
}
