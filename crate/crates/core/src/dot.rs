//! Graphviz export. Node and edge order follow state order, so the output is
//! deterministic.

use std::fmt::Write;

use crate::helix::HelixGraph;
use crate::machine::MealyMachine;

fn word(w: &[usize]) -> String {
    w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".")
}

/// States become nodes; transitions sharing source and target are merged
/// into one edge labelled `i|j, i'|j'`.
pub fn machine_to_dot(m: &MealyMachine, name: &str) -> String {
    machine_to_dot_with(m, name, |x| x.to_string())
}

/// Like [`machine_to_dot`] with custom state labels, e.g. the state words of
/// a power automaton.
pub fn machine_to_dot_with(m: &MealyMachine, name: &str, label: impl Fn(usize) -> String) -> String {
    let mut out = format!("digraph \"{name}\" {{\n  rankdir=LR;\n  node [shape=circle];\n");
    for x in 0..m.states() {
        writeln!(out, "  {x} [label=\"{}\"];", label(x)).unwrap();
    }
    for x in 0..m.states() {
        for y in 0..m.states() {
            let labels: Vec<String> =
                (0..m.letters()).filter(|&i| m.next(x, i) == y).map(|i| format!("{i}|{}", m.output(x, i))).collect();
            if !labels.is_empty() {
                writeln!(out, "  {x} -> {y} [label=\"{}\"];", labels.join(", ")).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Power automaton with states labelled by their state words.
pub fn power_to_dot(m: &MealyMachine, n: usize, name: &str) -> String {
    let q0 = (m.states() as f64).powf(1.0 / n as f64).round() as usize;
    machine_to_dot_with(m, name, |x| word(&crate::transform::decode_word(x, q0, n)))
}

/// Helix graph; node `(x, u)` is labelled `x/u`.
pub fn helix_to_dot(h: &HelixGraph, name: &str) -> String {
    let mut out = format!("digraph \"{name}\" {{\n  node [shape=box];\n");
    for v in 0..h.node_count() {
        let (xs, us) = h.decode(v);
        writeln!(out, "  {v} [label=\"{}/{}\"];", word(&xs), word(&us)).unwrap();
    }
    for v in 0..h.node_count() {
        writeln!(out, "  {v} -> {};", h.successor(v)).unwrap();
    }
    out.push_str("}\n");
    out
}
