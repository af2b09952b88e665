//! Nerode equivalence, minimization and md-reduction (alternating
//! minimization of a machine and its dual).

use std::collections::HashMap;

use crate::machine::{MealyMachine, State};
use crate::transform::dual;

/// Coarsest congruence on the states of a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerodePartition {
    /// Class id of every state; ids are numbered by first occurrence.
    pub class_of: Vec<usize>,
    /// Members of every class, ascending.
    pub classes: Vec<Vec<State>>,
}

impl NerodePartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Whether merging along this partition is compatible with outputs and
    /// transitions.
    pub fn is_congruence(&self, m: &MealyMachine) -> bool {
        (0..m.states()).all(|x| {
            (0..m.states()).all(|y| {
                self.class_of[x] != self.class_of[y]
                    || (0..m.letters()).all(|i| {
                        m.output(x, i) == m.output(y, i) && self.class_of[m.next(x, i)] == self.class_of[m.next(y, i)]
                    })
            })
        })
    }
}

/// Renumbers a signature vector into dense ids in order of first occurrence.
fn number_signatures<K: std::hash::Hash + Eq>(sigs: impl Iterator<Item = K>) -> (Vec<usize>, usize) {
    let mut ids: HashMap<K, usize> = HashMap::new();
    let class_of: Vec<usize> = sigs
        .map(|s| {
            let next = ids.len();
            *ids.entry(s).or_insert(next)
        })
        .collect();
    (class_of, ids.len())
}

/// Iterated signature refinement: start from output rows, then split by the
/// classes of the successors until stable.
pub fn nerode_partition(m: &MealyMachine) -> NerodePartition {
    let (q, p) = (m.states(), m.letters());
    let (mut class_of, mut count) = number_signatures((0..q).map(|x| m.output_row(x)));
    loop {
        let (next, next_count) = number_signatures((0..q).map(|x| {
            let mut sig = Vec::with_capacity(p + 1);
            sig.push(class_of[x]);
            sig.extend((0..p).map(|i| class_of[m.next(x, i)]));
            sig
        }));
        class_of = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }
    let mut classes = vec![Vec::new(); count];
    for (x, &c) in class_of.iter().enumerate() {
        classes[c].push(x);
    }
    NerodePartition { class_of, classes }
}

/// Quotient of `m` by its Nerode equivalence. Class `c` becomes state `c`,
/// so classes are ordered by their smallest member.
pub fn minimize(m: &MealyMachine) -> MealyMachine {
    let part = nerode_partition(m);
    quotient(m, &part)
}

pub(crate) fn quotient(m: &MealyMachine, part: &NerodePartition) -> MealyMachine {
    if part.len() == m.states() {
        return m.clone();
    }
    let p = m.letters();
    let mut delta = Vec::with_capacity(part.len() * p);
    let mut rho = Vec::with_capacity(part.len() * p);
    for members in &part.classes {
        let x = members[0];
        for i in 0..p {
            delta.push(part.class_of[m.next(x, i)] as u32);
            rho.push(m.output(x, i) as u32);
        }
    }
    MealyMachine::from_raw(part.len(), p, delta, rho)
}

pub fn is_minimal(m: &MealyMachine) -> bool {
    nerode_partition(m).len() == m.states()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The machine itself was minimized (its state count shrank).
    Primal,
    /// The dual was minimized (the letter count shrank).
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionStep {
    pub side: Side,
    /// `(states, letters)` of the machine before the step.
    pub before: (usize, usize),
    pub after: (usize, usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
}

/// Which side an md-reduction minimizes first. The result is the same up to
/// isomorphism either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    Primal,
    Dual,
}

/// Minimizes the machine and its dual alternately until both are minimal,
/// starting with the machine itself.
pub fn md_reduce(m: &MealyMachine) -> (MealyMachine, ReductionTrace) {
    md_reduce_from(m, Start::Primal)
}

pub fn md_reduce_from(m: &MealyMachine, start: Start) -> (MealyMachine, ReductionTrace) {
    let mut current = m.clone();
    let mut trace = ReductionTrace::default();
    let mut side = match start {
        Start::Primal => Side::Primal,
        Start::Dual => Side::Dual,
    };
    // number of consecutive attempts that changed nothing
    let mut idle = 0;
    while idle < 2 {
        let before = (current.states(), current.letters());
        let next = match side {
            Side::Primal => minimize(&current),
            Side::Dual => dual(&minimize(&dual(&current))),
        };
        let after = (next.states(), next.letters());
        if after == before {
            idle += 1;
        } else {
            idle = 0;
            trace.steps.push(ReductionStep { side, before, after });
            current = next;
        }
        side = match side {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        };
    }
    (current, trace)
}

pub fn is_md_trivial(m: &MealyMachine) -> bool {
    md_reduce(m).0.is_trivial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use crate::machine::is_isomorphic;
    use crate::transform::disjoint_union;

    #[test]
    fn single_class_when_everything_agrees() {
        let m: MealyMachine = "mealy 3 2 : 1/1 2/0 ; 2/1 0/0 ; 0/1 1/0".parse().unwrap();
        assert_eq!(nerode_partition(&m).len(), 1);
        assert!(minimize(&m).states() == 1);
    }

    #[test]
    fn order6_is_already_minimal() {
        let m = fixture("order6").unwrap();
        let part = nerode_partition(&m);
        assert_eq!(part.classes, vec![vec![0], vec![1]]);
        assert!(part.is_congruence(&m));
    }

    #[test]
    fn g16_dual_merges_letter_pairs() {
        let d = dual(&fixture("g16").unwrap());
        let part = nerode_partition(&d);
        assert_eq!(part.classes, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn duplicated_states_merge() {
        let k = fixture("klein").unwrap();
        let kk = disjoint_union(&k, &k).unwrap();
        assert!(is_isomorphic(&minimize(&kk), &minimize(&k)));
    }

    #[test]
    fn g16_reduction_chain() {
        let g16 = fixture("g16").unwrap();
        let (reduced, trace) = md_reduce(&g16);
        assert!(reduced.is_trivial());
        // g16 is minimal, so the first step minimizes the dual: 4 letters -> 2
        let sizes: Vec<_> = trace.steps.iter().map(|s| (s.side, s.after)).collect();
        assert_eq!(sizes, vec![(Side::Dual, (2, 2)), (Side::Primal, (1, 2)), (Side::Dual, (1, 1)),]);
    }

    #[test]
    fn reduction_sizes_strictly_decrease() {
        for name in ["g16", "grigorchuk", "s13597", "msharp_3_3", "grig_finite"] {
            let (_, trace) = md_reduce(&fixture(name).unwrap());
            for s in &trace.steps {
                assert!(s.after.0 * s.after.1 < s.before.0 * s.before.1);
            }
        }
    }

    #[test]
    fn order6_and_dihedral8_are_reduced_but_not_trivial() {
        for name in ["order6", "dihedral8"] {
            let m = fixture(name).unwrap();
            let (r, trace) = md_reduce(&m);
            assert!(trace.steps.is_empty(), "{name}");
            assert_eq!(r, m);
            assert!(!is_md_trivial(&m));
        }
    }
}
