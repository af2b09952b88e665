//! Helix graphs: the functional digraph `(x, u) → (δ_u(x), ρ_x(u))` on
//! `A^n × Σ^k`, union-of-cycles tests and cycle-length profiles.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::machine::MealyMachine;
use crate::transform::{checked_size, decode_word, encode_word, extend_ir, run_cross_diagram};

/// Helix graph of order `(n, k)`. Node `(x, u)` is numbered
/// `index(x) * p^k + index(u)` with words in mixed radix, first letter most
/// significant; this matches the state/letter numbering of
/// [`crate::transform::power`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelixGraph {
    pub n: usize,
    pub k: usize,
    pub states: usize,
    pub letters: usize,
    successor: Vec<u32>,
}

impl HelixGraph {
    pub fn node_count(&self) -> usize {
        self.successor.len()
    }

    pub fn successor(&self, node: usize) -> usize {
        self.successor[node] as usize
    }

    fn letter_words(&self) -> usize {
        self.letters.pow(self.k as u32)
    }

    pub fn encode(&self, xs: &[usize], us: &[usize]) -> usize {
        encode_word(xs, self.states) * self.letter_words() + encode_word(us, self.letters)
    }

    pub fn decode(&self, node: usize) -> (Vec<usize>, Vec<usize>) {
        let lw = self.letter_words();
        (decode_word(node / lw, self.states, self.n), decode_word(node % lw, self.letters, self.k))
    }
}

pub fn helix_graph(m: &MealyMachine, n: usize, k: usize) -> Result<HelixGraph> {
    if n == 0 || k == 0 {
        return Err(Error::Invalid("helix orders must be positive".into()));
    }
    let (q, p) = (m.states(), m.letters());
    let nodes = checked_size("helix graph", q, n as u32, p, k as u32)?;
    let lw = p.pow(k as u32);
    let mut successor = vec![0u32; nodes];
    let mut xs = vec![0; n];
    let mut us = vec![0; k];
    for (node, slot) in successor.iter_mut().enumerate() {
        xs.copy_from_slice(&decode_word(node / lw, q, n));
        us.copy_from_slice(&decode_word(node % lw, p, k));
        run_cross_diagram(m, &mut xs, &mut us);
        *slot = (encode_word(&xs, q) * lw + encode_word(&us, p)) as u32;
    }
    Ok(HelixGraph { n, k, states: q, letters: p, successor })
}

/// A finite self-map is a permutation iff every node has exactly one
/// predecessor.
pub fn is_union_of_cycles(h: &HelixGraph) -> bool {
    let mut hit = vec![false; h.node_count()];
    for &s in &h.successor {
        if std::mem::replace(&mut hit[s as usize], true) {
            return false;
        }
    }
    true
}

/// Lengths of the disjoint cycles, ascending.
pub fn cycle_lengths(h: &HelixGraph) -> Result<Vec<usize>> {
    if !is_union_of_cycles(h) {
        return Err(Error::NotUnionOfCycles);
    }
    let mut seen = vec![false; h.node_count()];
    let mut lengths = Vec::new();
    for start in 0..h.node_count() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            len += 1;
            v = h.successor(v);
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    Ok(lengths)
}

/// One row of a cycle profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub k: usize,
    pub l: usize,
    pub nodes: usize,
    pub is_union_of_cycles: bool,
    /// Cycle length multiset as `length → count`; empty when the graph is not
    /// a union of cycles.
    pub cycle_lengths: BTreeMap<usize, usize>,
}

impl ProfileRow {
    pub fn min_len(&self) -> Option<usize> {
        self.cycle_lengths.keys().next().copied()
    }

    pub fn max_len(&self) -> Option<usize> {
        self.cycle_lengths.keys().next_back().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleProfile {
    /// Whether rows describe the extension `Ã`. Non-bireversible IR machines
    /// have no extension; their rows describe the machine itself and are
    /// never unions of cycles.
    pub extended: bool,
    pub rows: Vec<ProfileRow>,
}

impl CycleProfile {
    /// Largest cycle length over all rows that are unions of cycles.
    pub fn max_len(&self) -> Option<usize> {
        self.rows.iter().filter_map(ProfileRow::max_len).max()
    }

    pub fn all_unions_of_cycles(&self) -> bool {
        self.rows.iter().all(|r| r.is_union_of_cycles)
    }

    /// CSV with columns `k,l,nodes,is_cycles,min_len,max_len,distinct_lens`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,nodes,is_cycles,min_len,max_len,distinct_lens\n");
        for r in &self.rows {
            let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k,
                r.l,
                r.nodes,
                r.is_union_of_cycles,
                opt(r.min_len()),
                opt(r.max_len()),
                r.cycle_lengths.len()
            ));
        }
        out
    }
}

fn profile_row(m: &MealyMachine, k: usize, l: usize) -> Result<ProfileRow> {
    let h = helix_graph(m, k, l)?;
    let is_cycles = is_union_of_cycles(&h);
    let mut lengths = BTreeMap::new();
    if is_cycles {
        for len in cycle_lengths(&h)? {
            *lengths.entry(len).or_insert(0) += 1;
        }
    }
    Ok(ProfileRow { k, l, nodes: h.node_count(), is_union_of_cycles: is_cycles, cycle_lengths: lengths })
}

/// Helix graphs of `Ã` for all orders up to `(max_k, max_l)`.
pub fn cycle_profile(m: &MealyMachine, max_k: usize, max_l: usize) -> Result<CycleProfile> {
    let (target, extended) = match extend_ir(m) {
        Ok(ext) => (ext, true),
        Err(Error::NotBireversible) => (m.clone(), false),
        Err(e) => return Err(e),
    };
    let mut rows = Vec::new();
    for k in 1..=max_k {
        for l in 1..=max_l {
            rows.push(profile_row(&target, k, l)?);
        }
    }
    Ok(CycleProfile { extended, rows })
}
