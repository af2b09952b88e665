//! Word problem and enumeration of automaton (semi)groups.
//!
//! An element `ρ_u` is represented by the minimal pointed machine computing
//! it, with states renumbered in breadth-first order from the point. That
//! representation is unique, so its serialization is a canonical key and
//! equality of keys is equality of production functions on `Σ*`.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::machine::{MealyMachine, State};
use crate::transform::{disjoint_union, inverse};

/// A production function `ρ_u`, stored as its canonical key.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    key: Box<[u8]>,
}

// Key layout: states (u32 LE), letters (u32 LE), then for every state in BFS
// order and every letter the pair (target, output). Targets are one byte when
// the state count is at most 256, four bytes otherwise; outputs likewise
// against the letter count.
fn width(n: usize) -> usize {
    if n <= 256 {
        1
    } else {
        4
    }
}

fn put(buf: &mut Vec<u8>, v: u32, w: usize) {
    if w == 1 {
        buf.push(v as u8);
    } else {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

fn get(buf: &[u8], pos: &mut usize, w: usize) -> u32 {
    let v = if w == 1 { buf[*pos] as u32 } else { u32::from_le_bytes(buf[*pos..*pos + 4].try_into().unwrap()) };
    *pos += w;
    v
}

impl Element {
    pub fn states(&self) -> usize {
        u32::from_le_bytes(self.key[0..4].try_into().unwrap()) as usize
    }

    pub fn letters(&self) -> usize {
        u32::from_le_bytes(self.key[4..8].try_into().unwrap()) as usize
    }

    pub fn key(&self) -> &[u8] {
        &self.key
    }

    /// The minimal machine of this element; the point is state 0.
    pub fn machine(&self) -> MealyMachine {
        let (q, p) = (self.states(), self.letters());
        let (wq, wp) = (width(q), width(p));
        let mut pos = 8;
        let mut delta = Vec::with_capacity(q * p);
        let mut rho = Vec::with_capacity(q * p);
        for _ in 0..q * p {
            delta.push(get(&self.key, &mut pos, wq));
            rho.push(get(&self.key, &mut pos, wp));
        }
        MealyMachine::from_raw(q, p, delta, rho)
    }

    /// Whether this is the identity on `Σ*`.
    pub fn is_identity(&self) -> bool {
        self.states() == 1 && {
            let m = self.machine();
            (0..m.letters()).all(|i| m.output(0, i) == i)
        }
    }

    pub fn identity(letters: usize) -> Self {
        let rho: Vec<u32> = (0..letters as u32).collect();
        canonical_pointed(1, letters, &vec![0; letters], &rho, 0)
    }

    /// Applies the production function to a word.
    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        let m = self.machine();
        crate::transform::run(&m, 0, word).expect("word over the element's alphabet").output_word
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.machine())
    }
}

/// Nerode classes by Hopcroft refinement, O(p·q·log q). Elements of long
/// words are chain-like machines, where round-based refinement needs one
/// round per state.
fn nerode_classes(q: usize, p: usize, delta: &[u32], rho: &[u32]) -> (Vec<u32>, usize) {
    // initial blocks: equal output rows, numbered by first occurrence
    let mut blk: Vec<u32> = vec![0; q];
    let mut initial = 0;
    let rows = (p as u32).checked_pow(p as u32).filter(|&r| r <= 4096);
    if let Some(rows) = rows {
        // output rows read as base-p numbers index a dense table
        let mut ids = vec![u32::MAX; rows as usize];
        for x in 0..q {
            let code = rho[x * p..(x + 1) * p].iter().fold(0, |c, &o| c * p + o as usize);
            if ids[code] == u32::MAX {
                ids[code] = initial as u32;
                initial += 1;
            }
            blk[x] = ids[code];
        }
    } else {
        let mut ids: HashMap<&[u32], u32> = HashMap::default();
        for x in 0..q {
            let next = ids.len() as u32;
            blk[x] = *ids.entry(&rho[x * p..(x + 1) * p]).or_insert(next);
        }
        initial = ids.len();
    }
    if initial == q || q <= 1 {
        return (blk, initial);
    }
    // blocks are contiguous ranges of `elems`
    let mut start = vec![0u32; initial + 1];
    for &b in &blk {
        start[b as usize + 1] += 1;
    }
    for b in 0..initial {
        start[b + 1] += start[b];
    }
    let mut bstart: Vec<u32> = start[..initial].to_vec();
    let mut bend: Vec<u32> = bstart.clone();
    let mut elems = vec![0u32; q];
    let mut loc = vec![0u32; q];
    for x in 0..q {
        let b = blk[x] as usize;
        elems[bend[b] as usize] = x as u32;
        loc[x] = bend[b];
        bend[b] += 1;
    }
    // predecessors per letter, in CSR layout indexed by `i * q + y`
    let mut pstart = vec![0u32; p * q + 1];
    for x in 0..q {
        for i in 0..p {
            pstart[i * q + delta[x * p + i] as usize + 1] += 1;
        }
    }
    for k in 0..p * q {
        pstart[k + 1] += pstart[k];
    }
    let mut fill = pstart.clone();
    let mut preds = vec![0u32; q * p];
    for x in 0..q {
        for i in 0..p {
            let k = i * q + delta[x * p + i] as usize;
            preds[fill[k] as usize] = x as u32;
            fill[k] += 1;
        }
    }
    let mut marked = vec![0u32; initial];
    let mut pending: Vec<bool> = vec![true; initial * p];
    let mut work: Vec<(u32, u32)> = (0..initial as u32).flat_map(|b| (0..p as u32).map(move |i| (b, i))).collect();
    let mut splitter = Vec::new();
    let mut touched = Vec::new();
    while let Some((s, i)) = work.pop() {
        let (s, i) = (s as usize, i as usize);
        pending[s * p + i] = false;
        splitter.clear();
        splitter.extend_from_slice(&elems[bstart[s] as usize..bend[s] as usize]);
        for &y in &splitter {
            let k = i * q + y as usize;
            for &x in &preds[pstart[k] as usize..pstart[k + 1] as usize] {
                let b = blk[x as usize] as usize;
                let front = bstart[b] + marked[b];
                let at = loc[x as usize];
                if at >= front {
                    let other = elems[front as usize];
                    elems.swap(at as usize, front as usize);
                    loc[other as usize] = at;
                    loc[x as usize] = front;
                    if marked[b] == 0 {
                        touched.push(b);
                    }
                    marked[b] += 1;
                }
            }
        }
        for b in touched.drain(..) {
            let m = std::mem::take(&mut marked[b]);
            if m == bend[b] - bstart[b] {
                continue;
            }
            // the marked prefix becomes a new block
            let n = bstart.len();
            bstart.push(bstart[b]);
            bend.push(bstart[b] + m);
            bstart[b] += m;
            marked.push(0);
            for &x in &elems[bstart[n] as usize..bend[n] as usize] {
                blk[x as usize] = n as u32;
            }
            let smaller = if m <= bend[b] - bstart[b] { n } else { b };
            for j in 0..p {
                pending.push(false);
                let target = if pending[b * p + j] { n } else { smaller };
                if !pending[target * p + j] {
                    pending[target * p + j] = true;
                    work.push((target as u32, j as u32));
                }
            }
        }
    }
    (blk, bstart.len())
}

/// Minimizes the machine `(q, p, delta, rho)` restricted to the states
/// reachable from `point` and serializes it in breadth-first order.
///
/// Every state of the input must be reachable from `point`.
pub(crate) fn canonical_pointed(q: usize, p: usize, delta: &[u32], rho: &[u32], point: usize) -> Element {
    let (class, count) = nerode_classes(q, p, delta, rho);
    // one representative per class
    let mut rep = vec![usize::MAX; count];
    for x in 0..q {
        if rep[class[x] as usize] == usize::MAX {
            rep[class[x] as usize] = x;
        }
    }
    // breadth-first renumbering from the point's class
    let mut order = vec![u32::MAX; count];
    let mut queue = VecDeque::with_capacity(count);
    order[class[point] as usize] = 0;
    queue.push_back(class[point] as usize);
    let mut seq = Vec::with_capacity(count);
    let mut assigned = 1u32;
    while let Some(c) = queue.pop_front() {
        seq.push(c);
        let x = rep[c];
        for i in 0..p {
            let t = class[delta[x * p + i] as usize] as usize;
            if order[t] == u32::MAX {
                order[t] = assigned;
                assigned += 1;
                queue.push_back(t);
            }
        }
    }
    debug_assert_eq!(seq.len(), count, "all states must be reachable from the point");
    let (wq, wp) = (width(count), width(p));
    let mut key = Vec::with_capacity(8 + count * p * (wq + wp));
    key.extend_from_slice(&(count as u32).to_le_bytes());
    key.extend_from_slice(&(p as u32).to_le_bytes());
    for &c in &seq {
        let x = rep[c];
        for i in 0..p {
            put(&mut key, order[class[delta[x * p + i] as usize] as usize], wq);
            put(&mut key, rho[x * p + i], wp);
        }
    }
    Element { key: key.into_boxed_slice() }
}

/// The element `ρ_x` of a single state.
pub fn element_of_state(m: &MealyMachine, x: State) -> Element {
    element_of_word(m, &[x]).expect("single state word is valid")
}

/// The element `ρ_u = ρ_{u_n} ∘ ⋯ ∘ ρ_{u_1}`, computed from the state word
/// `u` of the power automaton: sections are explored by running columns of
/// the cross-diagram.
pub fn element_of_word(m: &MealyMachine, u: &[State]) -> Result<Element> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    if let Some(&bad) = u.iter().find(|&&x| x >= m.states()) {
        return Err(Error::StateOutOfRange { state: bad, states: m.states() });
    }
    let p = m.letters();
    let mut index: HashMap<Vec<State>, u32> = HashMap::default();
    let mut words: Vec<Vec<State>> = vec![u.to_vec()];
    index.insert(u.to_vec(), 0);
    let mut delta = Vec::new();
    let mut rho = Vec::new();
    let mut head = 0;
    while head < words.len() {
        let word = words[head].clone();
        head += 1;
        for i in 0..p {
            let mut letter = i;
            let mut next = word.clone();
            for x in next.iter_mut() {
                let out = m.output(*x, letter);
                *x = m.next(*x, letter);
                letter = out;
            }
            let len = words.len() as u32;
            let t = *index.entry(next.clone()).or_insert_with(|| {
                words.push(next);
                len
            });
            delta.push(t);
            rho.push(letter as u32);
        }
    }
    Ok(canonical_pointed(words.len(), p, &delta, &rho, 0))
}

/// `ρ(e2) ∘ ρ(e1)`: apply `e1` first, then `e2`, matching `ρ_{u·v}`.
pub fn compose(e1: &Element, e2: &Element) -> Result<Element> {
    if e1.letters() != e2.letters() {
        return Err(Error::AlphabetMismatch { left: e1.letters(), right: e2.letters() });
    }
    Ok(compose_machines(&e1.machine(), &e2.machine()))
}

fn compose_machines(a: &MealyMachine, b: &MealyMachine) -> Element {
    let p = a.letters();
    let qb = b.states();
    let dense = a.states().saturating_mul(qb) <= 1 << 20;
    let mut dense_index: Vec<u32> = if dense { vec![u32::MAX; a.states() * qb] } else { Vec::new() };
    let mut sparse_index: HashMap<(u32, u32), u32> = HashMap::default();
    let mut pairs: Vec<(u32, u32)> = vec![(0, 0)];
    if dense {
        dense_index[0] = 0;
    } else {
        sparse_index.insert((0, 0), 0);
    }
    let mut delta = Vec::new();
    let mut rho = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let (x, y) = pairs[head];
        head += 1;
        for i in 0..p {
            let mid = a.output(x as usize, i);
            let out = b.output(y as usize, mid);
            let nx = a.next(x as usize, i) as u32;
            let ny = b.next(y as usize, mid) as u32;
            let len = pairs.len() as u32;
            let t = if dense {
                let slot = &mut dense_index[nx as usize * qb + ny as usize];
                if *slot == u32::MAX {
                    *slot = len;
                    pairs.push((nx, ny));
                }
                *slot
            } else {
                *sparse_index.entry((nx, ny)).or_insert_with(|| {
                    pairs.push((nx, ny));
                    len
                })
            };
            delta.push(t);
            rho.push(out as u32);
        }
    }
    canonical_pointed(pairs.len(), p, &delta, &rho, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Semigroup,
    Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Finite,
    BudgetExceeded,
}

/// Default bound on the average size of stored element machines. Machines
/// whose elements keep growing hit it long before the element count.
pub const STATES_PER_ELEMENT: usize = 64;

/// Limits for an enumeration.
///
/// `elements` bounds the number of distinct elements. `states` bounds the
/// total size of the stored element machines; every state of a minimal
/// element machine is itself a distinct element of the semigroup, so an
/// element with more than `elements` states also proves the budget exceeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub elements: usize,
    pub states: usize,
}

impl Budget {
    pub fn elements(elements: usize) -> Self {
        Self::with_states_per_element(elements, STATES_PER_ELEMENT)
    }

    pub fn with_states_per_element(elements: usize, per_element: usize) -> Self {
        Self { elements, states: elements.saturating_mul(per_element) }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::elements(1_000_000)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    pub status: Status,
    /// Exact order when the closure completed.
    pub order: Option<usize>,
    pub elements_seen: usize,
    /// Longest generator word needed to reach a new element.
    pub max_word_length: usize,
    /// Total states of the stored element machines.
    pub budget_used: usize,
}

impl EnumerationResult {
    pub fn is_finite(&self) -> bool {
        self.status == Status::Finite
    }
}

/// Distinct generator elements `ρ_x`, in state order.
pub fn generators(m: &MealyMachine) -> Vec<Element> {
    let mut seen = HashSet::default();
    (0..m.states()).map(|x| element_of_state(m, x)).filter(|e| seen.insert(e.clone())).collect()
}

fn generating_machine(m: &MealyMachine, mode: Mode) -> Result<MealyMachine> {
    match mode {
        Mode::Semigroup => Ok(m.clone()),
        Mode::Group => disjoint_union(m, &inverse(m)?),
    }
}

/// Breadth-first closure of the generators under right multiplication by
/// generators. Group mode enumerates the semigroup of `A ⊔ A⁻¹`.
pub fn enumerate_order(m: &MealyMachine, mode: Mode, budget: Budget) -> Result<EnumerationResult> {
    let (result, _) = enumerate(m, mode, budget, false)?;
    Ok(result)
}

/// Like [`enumerate_order`], also returning the elements in discovery order.
pub fn enumerate_elements(m: &MealyMachine, mode: Mode, budget: Budget) -> Result<(EnumerationResult, Vec<Element>)> {
    enumerate(m, mode, budget, true)
}

fn enumerate(m: &MealyMachine, mode: Mode, budget: Budget, keep: bool) -> Result<(EnumerationResult, Vec<Element>)> {
    if budget.elements == 0 {
        return Err(Error::ZeroBudget);
    }
    let gen_machine = generating_machine(m, mode)?;
    let gens: Vec<MealyMachine> = generators(&gen_machine).iter().map(Element::machine).collect();
    let mut seen: HashSet<Element> = HashSet::default();
    let mut listed = Vec::new();
    let mut states_used = 0usize;
    let mut frontier: Vec<Element> = Vec::new();
    let mut exceeded = false;
    let mut level = 1;
    let mut max_word_length = 0;

    let mut admit = |e: Element,
                     frontier: &mut Vec<Element>,
                     seen: &mut HashSet<Element>,
                     states_used: &mut usize,
                     level: usize,
                     max_word_length: &mut usize|
     -> bool {
        if seen.contains(&e) {
            return true;
        }
        *states_used += e.states();
        if seen.len() >= budget.elements || e.states() > budget.elements || *states_used > budget.states {
            return false;
        }
        *max_word_length = level;
        if keep {
            listed.push(e.clone());
        }
        seen.insert(e.clone());
        frontier.push(e);
        true
    };

    for g in &gens {
        let e = canonical_pointed(g.states(), g.letters(), g.delta_raw(), g.rho_raw(), 0);
        if !admit(e, &mut frontier, &mut seen, &mut states_used, level, &mut max_word_length) {
            exceeded = true;
            break;
        }
    }
    while !exceeded && !frontier.is_empty() {
        level += 1;
        let candidates: Vec<Element> = frontier
            .par_iter()
            .flat_map_iter(|e| {
                let em = e.machine();
                gens.iter().map(move |g| compose_machines(&em, g)).collect::<Vec<_>>()
            })
            .collect();
        let mut next = Vec::new();
        for c in candidates {
            if !admit(c, &mut next, &mut seen, &mut states_used, level, &mut max_word_length) {
                exceeded = true;
                break;
            }
        }
        frontier = next;
    }
    let result = EnumerationResult {
        status: if exceeded { Status::BudgetExceeded } else { Status::Finite },
        order: (!exceeded).then_some(seen.len()),
        elements_seen: seen.len(),
        max_word_length,
        budget_used: states_used,
    };
    Ok((result, listed))
}

/// Number of distinct elements `ρ_u` over words `u` of length exactly `n`,
/// for `n = 1..=max_n`. Stops early (shorter output) if a level exceeds
/// `level_cap` elements.
pub fn growth_series(m: &MealyMachine, max_n: usize) -> Vec<usize> {
    growth_series_capped(m, max_n, usize::MAX)
}

pub fn growth_series_capped(m: &MealyMachine, max_n: usize, level_cap: usize) -> Vec<usize> {
    let gens: Vec<MealyMachine> = generators(m).iter().map(Element::machine).collect();
    let mut level: Vec<Element> = generators(m);
    let mut counts = Vec::new();
    for n in 1..=max_n {
        if n > 1 {
            let candidates: Vec<Element> = level
                .par_iter()
                .flat_map_iter(|e| {
                    let em = e.machine();
                    gens.iter().map(move |g| compose_machines(&em, g)).collect::<Vec<_>>()
                })
                .collect();
            let mut seen = HashSet::default();
            level = candidates.into_iter().filter(|e| seen.insert(e.clone())).collect();
        }
        counts.push(level.len());
        if level.len() > level_cap {
            break;
        }
    }
    counts
}

/// Index and period of the cyclic subsemigroup generated by an element:
/// `e^(index + period) = e^index` with both minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite { index: usize, period: usize },
    BudgetExceeded,
}

impl ElementOrder {
    /// Group order of the element: the period when the powers return to the
    /// element itself (`index = 1`), which holds for invertible elements.
    pub fn group_order(&self) -> Option<usize> {
        match *self {
            ElementOrder::Finite { index: 1, period } => Some(period),
            _ => None,
        }
    }
}

pub fn element_order(e: &Element, budget: usize) -> ElementOrder {
    let mut seen: HashMap<Element, usize> = HashMap::default();
    let base = e.machine();
    let mut power = e.clone();
    for k in 1..=budget {
        if let Some(&j) = seen.get(&power) {
            return ElementOrder::Finite { index: j, period: k - j };
        }
        seen.insert(power.clone(), k);
        power = compose_machines(&power.machine(), &base);
    }
    ElementOrder::BudgetExceeded
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    #[test]
    fn lamplighter_state_a_squares_to_identity_on_first_letter_only() {
        let m = fixture("lamplighter").unwrap();
        let a = element_of_word(&m, &[0]).unwrap();
        assert!(!a.is_identity());
        let b = element_of_word(&m, &[1]).unwrap();
        assert!(!b.is_identity());
        let id = Element::identity(2);
        assert!(id.is_identity());
    }

    #[test]
    fn klein_is_abelian() {
        let m = fixture("klein").unwrap();
        assert_eq!(element_of_word(&m, &[0, 1]).unwrap(), element_of_word(&m, &[1, 0]).unwrap());
        let a = element_of_state(&m, 0);
        assert!(compose(&a, &a).unwrap().is_identity());
    }

    #[test]
    fn trivial_machine_elements_are_identity() {
        let e = element_of_word(&MealyMachine::trivial(), &[0, 0, 0]).unwrap();
        assert!(e.is_identity());
        assert_eq!(e, Element::identity(1));
    }

    #[test]
    fn empty_word_and_bad_states_are_rejected() {
        let m = fixture("klein").unwrap();
        assert_eq!(element_of_word(&m, &[]), Err(Error::EmptyWord));
        assert!(element_of_word(&m, &[2]).is_err());
    }

    #[test]
    fn identity_is_neutral() {
        let m = fixture("grigorchuk").unwrap();
        let id = Element::identity(2);
        for x in 0..m.states() {
            let e = element_of_state(&m, x);
            assert_eq!(compose(&e, &id).unwrap(), e);
            assert_eq!(compose(&id, &e).unwrap(), e);
        }
        assert!(compose(&id, &Element::identity(3)).is_err());
    }

    #[test]
    fn order6_element_is_not_identity() {
        let m = fixture("order6").unwrap();
        assert!(!element_of_state(&m, 0).is_identity());
        assert_eq!(element_of_state(&m, 0).apply(&[0]), vec![1]);
    }

    #[test]
    fn small_orders() {
        let klein = fixture("klein").unwrap();
        let r = enumerate_order(&klein, Mode::Group, Budget::default()).unwrap();
        assert_eq!(r.order, Some(4));
        let r = enumerate_order(&fixture("order6").unwrap(), Mode::Semigroup, Budget::default()).unwrap();
        assert_eq!(r.order, Some(6));
        assert!(enumerate_order(&fixture("order6").unwrap(), Mode::Group, Budget::default()).is_err());
        assert_eq!(enumerate_order(&klein, Mode::Semigroup, Budget::elements(0)), Err(Error::ZeroBudget));
    }

    #[test]
    fn budget_is_reported_for_infinite_groups() {
        let r = enumerate_order(&fixture("adding_machine").unwrap(), Mode::Group, Budget::elements(500)).unwrap();
        assert_eq!(r.status, Status::BudgetExceeded);
        assert_eq!(r.order, None);
        assert!(r.elements_seen <= 500);
    }

    #[test]
    fn element_orders() {
        let klein = fixture("klein").unwrap();
        assert_eq!(element_order(&element_of_state(&klein, 0), 100), ElementOrder::Finite { index: 1, period: 2 });
        assert_eq!(element_order(&Element::identity(2), 10).group_order(), Some(1));
        let add = fixture("adding_machine").unwrap();
        assert_eq!(element_order(&element_of_state(&add, 0), 200), ElementOrder::BudgetExceeded);
    }

    #[test]
    fn growth_of_trivial_and_finite_machines() {
        assert_eq!(growth_series(&MealyMachine::trivial(), 5), vec![1; 5]);
        let g = growth_series(&fixture("klein").unwrap(), 8);
        assert!(g.iter().all(|&c| c <= 4));
        assert_eq!(g[6], g[7]);
    }
}
