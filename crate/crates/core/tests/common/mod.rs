//! Shared helpers for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use mealy::census::{enumerate_classes, Filter};
use mealy::fixtures::{fixture, fixture_names};
use mealy::transform::run;
use mealy::MealyMachine;

pub fn fx(name: &str) -> MealyMachine {
    fixture(name).unwrap()
}

pub fn all_fixtures() -> Vec<(&'static str, MealyMachine)> {
    fixture_names().into_iter().map(|n| (n, fx(n))).collect()
}

/// Classes with `q` states and `p` letters, computed once per process.
pub fn classes(q: usize, p: usize) -> &'static [MealyMachine] {
    static C22: OnceLock<Vec<MealyMachine>> = OnceLock::new();
    static C32: OnceLock<Vec<MealyMachine>> = OnceLock::new();
    static C23: OnceLock<Vec<MealyMachine>> = OnceLock::new();
    let cell = match (q, p) {
        (2, 2) => &C22,
        (3, 2) => &C32,
        (2, 3) => &C23,
        _ => panic!("no cached census for ({q}, {p})"),
    };
    cell.get_or_init(|| enumerate_classes(q, p, Filter::All).unwrap())
}

/// All words of length `len` over `0..radix`, first letter most significant.
pub fn words(radix: usize, len: usize) -> Vec<Vec<usize>> {
    (0..radix.pow(len as u32))
        .map(|mut k| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = k % radix;
                k /= radix;
            }
            w
        })
        .collect()
}

/// Words of length `1..=max`.
pub fn words_up_to(radix: usize, max: usize) -> Vec<Vec<usize>> {
    (1..=max).flat_map(|len| words(radix, len)).collect()
}

/// `ρ_u(w)` by running the states of `u` one after another on `w`, straight
/// from the tables.
pub fn act(m: &MealyMachine, u: &[usize], w: &[usize]) -> Vec<usize> {
    u.iter().fold(w.to_vec(), |w, &x| run(m, x, &w).unwrap().output_word)
}

/// Concatenated outputs of `ρ_u` on every input of length `1..=max`.
pub fn function_table(m: &MealyMachine, u: &[usize], inputs: &[Vec<usize>]) -> Vec<usize> {
    inputs.iter().flat_map(|w| act(m, u, w)).collect()
}

/// The transition set `{(x, i, j, y)}`.
pub fn transitions(m: &MealyMachine) -> BTreeSet<(usize, usize, usize, usize)> {
    let mut set = BTreeSet::new();
    for x in 0..m.states() {
        for i in 0..m.letters() {
            set.insert((x, i, m.output(x, i), m.next(x, i)));
        }
    }
    set
}
pub mod checks;

/// Order of the permutation group induced by the states on `Σ^k`, by
/// closing the generators under composition. Requires an invertible machine.
pub fn level_group_order(m: &MealyMachine, k: usize) -> usize {
    let inputs = words(m.letters(), k);
    let index = |w: &[usize]| w.iter().fold(0, |a, &i| a * m.letters() + i);
    let gens: Vec<Vec<usize>> =
        (0..m.states()).map(|x| inputs.iter().map(|w| index(&act(m, &[x], w))).collect()).collect();
    let mut seen: std::collections::HashSet<Vec<usize>> = gens.iter().cloned().collect();
    let mut stack: Vec<Vec<usize>> = gens.clone();
    while let Some(f) = stack.pop() {
        for g in &gens {
            let h: Vec<usize> = f.iter().map(|&v| g[v]).collect();
            if seen.insert(h.clone()) {
                stack.push(h);
            }
        }
    }
    seen.len()
}
