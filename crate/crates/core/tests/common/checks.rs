//! Theorem-level checks over census classes. Each returns a short summary on
//! success and the first counterexample on failure.

use std::collections::HashMap;

use mealy::census::{run_census, CensusConfig, ClassRecord, Filter, GroundTruth};
use mealy::criteria::Decision;
use mealy::helix::{helix_graph, is_union_of_cycles};
use mealy::minimize::{is_md_trivial, md_reduce_from, minimize, Start};
use mealy::semigroup::{
    compose, element_of_state, element_of_word, enumerate_elements, enumerate_order, Budget, Element, Mode,
};
use mealy::transform::dual;
use mealy::{canonical_form, classify, CanonicalKey, MealyMachine};

use super::{act, all_fixtures, words};

pub type Check = Result<String, String>;

/// Reducing the primal first or the dual first gives isomorphic pairs.
pub fn confluence(classes: &[MealyMachine]) -> Check {
    for m in classes {
        let (a, _) = md_reduce_from(m, Start::Primal);
        let (b, _) = md_reduce_from(m, Start::Dual);
        if canonical_form(&a) != canonical_form(&b) || canonical_form(&dual(&a)) != canonical_form(&dual(&b)) {
            return Err(format!("{m}: {a} vs {b}"));
        }
    }
    Ok(format!("{} classes", classes.len()))
}

/// For IR machines, bireversible iff the (1,1) helix graph is a union of
/// cycles.
pub fn helix_characterizes_bireversibility(classes: &[MealyMachine]) -> Check {
    let mut checked = 0;
    for m in classes.iter().filter(|m| classify(m).ir) {
        let cycles = is_union_of_cycles(&helix_graph(m, 1, 1).unwrap());
        if cycles != classify(m).bireversible {
            return Err(format!("{m}: helix {cycles}, bireversible {}", classify(m).bireversible));
        }
        checked += 1;
    }
    Ok(format!("{checked} IR classes"))
}

/// Orders `(n, k)` with `q^n p^k ≤ max_nodes`.
pub fn helix_orders(m: &MealyMachine, max_nodes: usize) -> Vec<(usize, usize)> {
    let (q, p) = (m.states().max(2), m.letters().max(2));
    let mut out = Vec::new();
    let mut n = 1;
    while q.pow(n as u32) * p <= max_nodes {
        let mut k = 1;
        while q.pow(n as u32) * p.pow(k as u32) <= max_nodes {
            out.push((n, k));
            k += 1;
        }
        n += 1;
    }
    out
}

fn all_helices_are_cycles(m: &MealyMachine, max_nodes: usize) -> Result<usize, (usize, usize)> {
    let orders = helix_orders(m, max_nodes);
    for &(n, k) in &orders {
        if !is_union_of_cycles(&helix_graph(m, n, k).unwrap()) {
            return Err((n, k));
        }
    }
    Ok(orders.len())
}

/// IR machines whose (1,1) helix graph is a union of cycles have all helix
/// graphs up to `max_nodes` nodes unions of cycles.
pub fn helix_propagation(classes: &[MealyMachine], max_nodes: usize) -> Check {
    let (mut machines, mut graphs) = (0, 0);
    for m in classes.iter().filter(|m| classify(m).ir) {
        if !is_union_of_cycles(&helix_graph(m, 1, 1).unwrap()) {
            continue;
        }
        graphs += all_helices_are_cycles(m, max_nodes).map_err(|(n, k)| format!("{m}: helix ({n},{k})"))?;
        machines += 1;
    }
    Ok(format!("{machines} machines, {graphs} graphs"))
}

fn proven_finite(r: &ClassRecord) -> bool {
    r.decision() == Decision::Finite || matches!(r.ground_truth, Some(GroundTruth::Finite(_)))
}

/// Finite IR machines have all helix graphs unions of cycles; in particular
/// no IR machine that is not bireversible is ever shown finite.
pub fn finite_ir_helices(records: &[ClassRecord], max_nodes: usize) -> Check {
    let (mut machines, mut graphs) = (0, 0);
    for r in records.iter().filter(|r| classify(&r.machine).ir && proven_finite(r)) {
        if !classify(&r.machine).bireversible {
            return Err(format!("{}: finite but not bireversible", r.machine));
        }
        graphs += all_helices_are_cycles(&r.machine, max_nodes)
            .map_err(|(n, k)| format!("{}: helix ({n},{k})", r.machine))?;
        machines += 1;
    }
    Ok(format!("{machines} machines, {graphs} graphs"))
}

/// Ground-truth orders keyed by canonical form.
pub fn ground_truth_orders(records: &[ClassRecord]) -> HashMap<CanonicalKey, Option<usize>> {
    records
        .iter()
        .map(|r| {
            let order = match r.ground_truth {
                Some(GroundTruth::Finite(n)) => Some(n),
                _ => None,
            };
            (canonical_form(&r.machine), order)
        })
        .collect()
}

/// `⟨A⟩₊` is finite iff `⟨d(A)⟩₊` is, and then
/// `#⟨A⟩₊ ≤ p^(p · (#⟨d(A)⟩₊ + 1))` with `p` the letter count of `A`: every
/// `ρ_w` is the output map of a transducer on the Cayley graph of the dual
/// monoid, whose vertices are the dual semigroup plus the identity `δ_ε`.
/// The summary also counts pairs that exceed the bound without the `+ 1`.
pub fn finiteness_duality(records: &[ClassRecord]) -> Check {
    let orders = ground_truth_orders(records);
    let mut both_finite = 0;
    let mut without_identity = 0;
    for r in records {
        let own = orders[&canonical_form(&r.machine)];
        let of_dual = *orders
            .get(&canonical_form(&dual(&r.machine)))
            .ok_or_else(|| format!("{}: dual not in the census", r.machine))?;
        match (own, of_dual) {
            (Some(a), Some(d)) => {
                let p = r.machine.letters() as f64;
                let order_log2 = (a as f64).log2();
                if order_log2 > p * (d + 1) as f64 * p.log2() {
                    return Err(format!("{}: order {a} exceeds the bound from {d}", r.machine));
                }
                if order_log2 > p * d as f64 * p.log2() {
                    without_identity += 1;
                }
                both_finite += 1;
            }
            (None, None) => {}
            _ => return Err(format!("{}: order {own:?}, dual order {of_dual:?}", r.machine)),
        }
    }
    Ok(format!("{both_finite} finite pairs, {without_identity} above the bound without the identity vertex"))
}

/// Minimization does not change the generated semigroup's order.
pub fn minimization_keeps_order(records: &[ClassRecord], budget: Budget) -> Check {
    let mut checked = 0;
    for r in records {
        if let Some(GroundTruth::Finite(n)) = r.ground_truth {
            let mm = minimize(&r.machine);
            let order = enumerate_order(&mm, Mode::Semigroup, budget).unwrap().order;
            if order != Some(n) {
                return Err(format!("{}: {n} vs {order:?}", r.machine));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} finite classes"))
}

/// md-trivial machines generate finite semigroups.
pub fn md_trivial_is_finite(records: &[ClassRecord]) -> Check {
    let mut checked = 0;
    for r in records.iter().filter(|r| is_md_trivial(&r.machine)) {
        if !matches!(r.ground_truth, Some(GroundTruth::Finite(_))) {
            return Err(format!("{}: md-trivial but {:?}", r.machine, r.ground_truth));
        }
        checked += 1;
    }
    Ok(format!("{checked} md-trivial classes"))
}

/// No criterion contradicts another or the ground truth.
pub fn no_contradictions(records: &[ClassRecord]) -> Check {
    if let Some(r) = records.iter().find(|r| r.is_contradictory() || r.contradicts_ground_truth()) {
        return Err(format!("{}: decisions {:?}, ground truth {:?}", r.machine, r.decisions, r.ground_truth));
    }
    Ok(format!("{} classes", records.len()))
}

pub fn bfs_finite_count(records: &[ClassRecord]) -> usize {
    records.iter().filter(|r| matches!(r.ground_truth, Some(GroundTruth::Finite(_)))).count()
}

const MAX_WORD: usize = 4;
const MAX_INPUT: usize = 6;
const MAX_CHAIN: usize = 5;

/// `ρ_x` on `Σ^MAX_INPUT` as a map between word indices, computed by runs.
/// Production functions preserve length and prefixes, so agreement on
/// `Σ^MAX_INPUT` is agreement on every shorter input as well.
fn state_maps(m: &MealyMachine) -> Vec<Vec<u32>> {
    let inputs = words(m.letters(), MAX_INPUT);
    let p = m.letters() as u32;
    (0..m.states())
        .map(|x| inputs.iter().map(|w| act(m, &[x], w).iter().fold(0, |a, &i| a * p + i as u32)).collect())
        .collect()
}

/// Key equality must coincide with equality of function tables on all state
/// words of length up to `MAX_WORD`. Returns the number of distinct elements.
fn keys_match_tables(m: &MealyMachine) -> Result<usize, String> {
    let maps = state_maps(m);
    let mut by_key: HashMap<Element, Vec<u32>> = HashMap::new();
    let mut by_table: HashMap<Vec<u32>, Element> = HashMap::new();
    // depth-first over state words, extending tables one state at a time
    let mut stack: Vec<(Vec<usize>, Vec<u32>)> = (0..m.states()).map(|x| (vec![x], maps[x].clone())).collect();
    while let Some((u, table)) = stack.pop() {
        let e = element_of_word(m, &u).unwrap();
        match by_key.get(&e) {
            Some(t) if *t != table => return Err(format!("{u:?}: equal keys, different tables")),
            Some(_) => {}
            None => {
                if by_table.contains_key(&table) {
                    return Err(format!("{u:?}: equal tables, different keys"));
                }
                by_key.insert(e.clone(), table.clone());
                by_table.insert(table.clone(), e);
            }
        }
        if u.len() < MAX_WORD {
            for (x, map) in maps.iter().enumerate() {
                let next = table.iter().map(|&v| map[v as usize]).collect();
                let mut w = u.clone();
                w.push(x);
                stack.push((w, next));
            }
        }
    }
    Ok(by_key.len())
}

pub fn keys_match_tables_on_fixtures() -> Check {
    let mut elements = 0;
    let fixtures = all_fixtures();
    for (name, m) in &fixtures {
        elements += keys_match_tables(m).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} fixtures, {elements} distinct elements", fixtures.len()))
}

/// Chained composition of generators equals the element of the word.
pub fn compose_chains_on_fixtures() -> Check {
    let mut checked = 0;
    for (name, m) in all_fixtures() {
        let gens: Vec<Element> = (0..m.states()).map(|x| element_of_state(&m, x)).collect();
        for len in 1..=MAX_CHAIN {
            if m.states().pow(len as u32) > 4096 {
                break;
            }
            for u in words(m.states(), len) {
                let chained = u[1..].iter().fold(gens[u[0]].clone(), |e, &x| compose(&e, &gens[x]).unwrap());
                if chained != element_of_word(&m, &u).unwrap() {
                    return Err(format!("{name} {u:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} words"))
}

/// Census CSV and element lists are identical across thread pools of 1, 2
/// and 4 threads and across repeated runs.
pub fn determinism(censuses: &[(usize, usize)], machines: &[MealyMachine]) -> Check {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let csv: Vec<String> = censuses
                .iter()
                .map(|&(q, p)| run_census(q, p, Filter::All, &CensusConfig::default()).unwrap().to_csv())
                .collect();
            let elements: Vec<Vec<Element>> = machines
                .iter()
                .map(|m| enumerate_elements(m, Mode::Semigroup, Budget::elements(20_000)).unwrap().1)
                .collect();
            (csv, elements)
        })
    };
    let reference = run(1);
    for threads in [1, 2, 4, 4] {
        if run(threads) != reference {
            return Err(format!("output differs with {threads} threads"));
        }
    }
    let elements: usize = reference.1.iter().map(Vec::len).sum();
    Ok(format!("{} censuses, {elements} elements, 1/2/4 threads", censuses.len()))
}
