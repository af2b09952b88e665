//! Dualization, inversion, power automata, the IR extension, disjoint unions,
//! sum decomposition and word execution.

use crate::error::{Error, Result};
use crate::machine::{Letter, MealyMachine, State};
use crate::size_limit;

/// Output and end state of a run `x -u|v-> y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub output_word: Vec<Letter>,
    pub end_state: State,
}

/// Exchanges states and letters: `x -i|j-> y` becomes `i -x|y-> j`.
pub fn dual(m: &MealyMachine) -> MealyMachine {
    let (q, p) = (m.states(), m.letters());
    let mut delta = vec![0u32; q * p];
    let mut rho = vec![0u32; q * p];
    for i in 0..p {
        for x in 0..q {
            delta[i * q + x] = m.output(x, i) as u32;
            rho[i * q + x] = m.next(x, i) as u32;
        }
    }
    MealyMachine::from_raw(p, q, delta, rho)
}

/// The inverse machine: `x -i|j-> y` becomes `x⁻¹ -j|i-> y⁻¹`, keeping state
/// indices.
pub fn inverse(m: &MealyMachine) -> Result<MealyMachine> {
    if !m.is_invertible() {
        return Err(Error::NotInvertible);
    }
    let (q, p) = (m.states(), m.letters());
    let mut delta = vec![0u32; q * p];
    let mut rho = vec![0u32; q * p];
    for x in 0..q {
        for i in 0..p {
            let j = m.output(x, i);
            delta[x * p + j] = m.next(x, i) as u32;
            rho[x * p + j] = i as u32;
        }
    }
    Ok(MealyMachine::from_raw(q, p, delta, rho))
}

/// Runs `u` from state `x`.
pub fn run(m: &MealyMachine, x: State, u: &[Letter]) -> Result<RunResult> {
    if x >= m.states() {
        return Err(Error::StateOutOfRange { state: x, states: m.states() });
    }
    let mut state = x;
    let mut output_word = Vec::with_capacity(u.len());
    for &i in u {
        if i >= m.letters() {
            return Err(Error::LetterOutOfRange { letter: i, letters: m.letters() });
        }
        output_word.push(m.output(state, i));
        state = m.next(state, i);
    }
    Ok(RunResult { output_word, end_state: state })
}

/// Mixed-radix decoding, most significant digit first.
pub fn decode_word(mut index: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut word = vec![0; len];
    for slot in word.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
    word
}

/// Mixed-radix encoding, most significant digit first.
pub fn encode_word(word: &[usize], radix: usize) -> usize {
    word.iter().fold(0, |acc, &d| acc * radix + d)
}

/// Runs the rectangular cross-diagram with state word `xs` (rows, top row
/// applied first) on letter word `us`, overwriting both with the new state
/// word `δ_u(x)` and the output `ρ_x(u)`.
pub(crate) fn run_cross_diagram(m: &MealyMachine, xs: &mut [State], us: &mut [Letter]) {
    for x in xs.iter_mut() {
        for u in us.iter_mut() {
            let i = *u;
            *u = m.output(*x, i);
            *x = m.next(*x, i);
        }
    }
}

pub(crate) fn checked_size(what: &'static str, base: usize, exp: u32, base2: usize, exp2: u32) -> Result<usize> {
    let needed = (base as u128)
        .checked_pow(exp)
        .and_then(|a| (base2 as u128).checked_pow(exp2).and_then(|b| a.checked_mul(b)))
        .unwrap_or(u128::MAX);
    let limit = size_limit() as u128;
    if needed > limit {
        return Err(Error::SizeLimit { what, needed, limit });
    }
    Ok(needed as usize)
}

/// The Mealy automaton of order `(n, k)`: states `A^n`, letters `Σ^k`.
///
/// Words are indexed in mixed radix with the first letter most significant;
/// the first state of a state word is the first to act on the input.
pub fn power(m: &MealyMachine, n: usize, k: usize) -> Result<MealyMachine> {
    if n == 0 || k == 0 {
        return Err(Error::Invalid("power orders must be positive".into()));
    }
    let (q, p) = (m.states(), m.letters());
    let entries = checked_size("power automaton", q, n as u32, p, k as u32)?;
    let big_q = q.pow(n as u32);
    let big_p = p.pow(k as u32);
    let mut delta = vec![0u32; entries];
    let mut rho = vec![0u32; entries];
    for xi in 0..big_q {
        for ui in 0..big_p {
            let mut xs = decode_word(xi, q, n);
            let mut us = decode_word(ui, p, k);
            run_cross_diagram(m, &mut xs, &mut us);
            delta[xi * big_p + ui] = encode_word(&xs, q) as u32;
            rho[xi * big_p + ui] = encode_word(&us, p) as u32;
        }
    }
    Ok(MealyMachine::from_raw(big_q, big_p, delta, rho))
}

/// Stacks the states of `m2` after those of `m1`; transitions are unchanged.
pub fn disjoint_union(m1: &MealyMachine, m2: &MealyMachine) -> Result<MealyMachine> {
    if m1.letters() != m2.letters() {
        return Err(Error::AlphabetMismatch { left: m1.letters(), right: m2.letters() });
    }
    let offset = m1.states() as u32;
    let delta = m1.delta_raw().iter().copied().chain(m2.delta_raw().iter().map(|&t| t + offset)).collect();
    let rho = m1.rho_raw().iter().chain(m2.rho_raw()).copied().collect();
    Ok(MealyMachine::from_raw(m1.states() + m2.states(), m1.letters(), delta, rho))
}

/// The extension `Ã = A' ⊔ (A')⁻¹` with `A' = d(d(A) ⊔ d(A)⁻¹)`, on states
/// `A ⊔ A⁻¹` and letters `Σ ⊔ Σ⁻¹`.
///
/// `A'` is invertible exactly when `A` is bireversible, so the composite only
/// exists for bireversible machines; other IR machines are reported as
/// [`Error::NotBireversible`].
pub fn extend_ir(m: &MealyMachine) -> Result<MealyMachine> {
    if !(m.is_invertible() && m.is_reversible()) {
        return Err(Error::NotIr);
    }
    let d = dual(m);
    let d_inv = inverse(&d)?;
    let a_prime = dual(&disjoint_union(&d, &d_inv)?);
    let a_prime_inv = inverse(&a_prime).map_err(|_| Error::NotBireversible)?;
    disjoint_union(&a_prime, &a_prime_inv)
}

/// Sum decomposition along the weakly connected components of the
/// δ-digraph. Each component is returned with the original indices of its
/// states (ascending); components are ordered by their smallest state.
pub fn sum_decomposition(m: &MealyMachine) -> Vec<(MealyMachine, Vec<State>)> {
    let q = m.states();
    let mut parent: Vec<usize> = (0..q).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for x in 0..q {
        for i in 0..m.letters() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, m.next(x, i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<State>)> = Vec::new();
    for x in 0..q {
        let root = find(&mut parent, x);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, members)) => members.push(x),
            None => groups.push((root, vec![x])),
        }
    }
    groups.into_iter().map(|(_, members)| (restrict(m, &members), members)).collect()
}

/// The components of [`sum_decomposition`] as machines.
pub fn sum_components(m: &MealyMachine) -> Vec<MealyMachine> {
    sum_decomposition(m).into_iter().map(|(c, _)| c).collect()
}

/// Restriction of `m` to a δ-closed set of states, relabeled in the given
/// order.
pub(crate) fn restrict(m: &MealyMachine, members: &[State]) -> MealyMachine {
    let mut index = vec![usize::MAX; m.states()];
    for (new, &old) in members.iter().enumerate() {
        index[old] = new;
    }
    let p = m.letters();
    let mut delta = Vec::with_capacity(members.len() * p);
    let mut rho = Vec::with_capacity(members.len() * p);
    for &x in members {
        for i in 0..p {
            let t = index[m.next(x, i)];
            debug_assert!(t != usize::MAX, "restriction to a set that is not δ-closed");
            delta.push(t as u32);
            rho.push(m.output(x, i) as u32);
        }
    }
    MealyMachine::from_raw(members.len(), p, delta, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;

    #[test]
    fn dual_swaps_roles() {
        let m = fixture("lamplighter").unwrap();
        let d = dual(&m);
        assert_eq!((d.states(), d.letters()), (2, 2));
        for x in 0..2 {
            for i in 0..2 {
                assert_eq!(d.next(i, x), m.output(x, i));
                assert_eq!(d.output(i, x), m.next(x, i));
            }
        }
        assert_eq!(dual(&d), m);
    }

    #[test]
    fn inverse_rejects_non_invertible() {
        let m: MealyMachine = "mealy 2 2 : 1/0 0/0 ; 1/1 0/1".parse().unwrap();
        assert_eq!(inverse(&m), Err(Error::NotInvertible));
        assert_eq!(inverse(&MealyMachine::trivial()).unwrap(), MealyMachine::trivial());
    }

    #[test]
    fn run_examples() {
        let lamp = fixture("lamplighter").unwrap();
        let r = run(&lamp, 0, &[1, 1, 1, 1, 1]).unwrap();
        assert_eq!(r.output_word, vec![0; 5]);
        assert_eq!(r.end_state, 0);
        assert_eq!(run(&lamp, 1, &[]).unwrap(), RunResult { output_word: vec![], end_state: 1 });
        let gf = fixture("grig_finite").unwrap();
        let r = run(&gf, 0, &[0, 1]).unwrap();
        assert_eq!((r.output_word, r.end_state), (vec![1, 0], 0));
        assert!(run(&gf, 0, &[2]).is_err());
        assert!(run(&gf, 3, &[0]).is_err());
    }

    #[test]
    fn power_of_order_two_one_matches_the_figure() {
        // states aa=0, ab=1, ba=2, bb=3 over letters 0, 1
        let p = power(&fixture("lamplighter").unwrap(), 2, 1).unwrap();
        let expected: MealyMachine = "mealy 4 2 : 2/0 1/1 ; 3/1 0/0 ; 1/1 2/0 ; 0/0 3/1".parse().unwrap();
        assert_eq!(p, expected);
        let m = fixture("aleshin").unwrap();
        assert_eq!(power(&m, 1, 1).unwrap(), m);
    }

    #[test]
    fn power_respects_size_limit() {
        let m = fixture("grigorchuk").unwrap();
        assert!(matches!(power(&m, 40, 40), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn disjoint_union_requires_same_alphabet() {
        let a = fixture("klein").unwrap();
        let b = fixture("g16").unwrap();
        assert_eq!(disjoint_union(&a, &b), Err(Error::AlphabetMismatch { left: 2, right: 4 }));
    }

    #[test]
    fn sum_components_of_a_union() {
        let k = fixture("klein").unwrap();
        let o = fixture("order6").unwrap();
        let comps = sum_components(&disjoint_union(&k, &o).unwrap());
        assert_eq!(comps, vec![k, o]);
        assert_eq!(sum_components(&fixture("aleshin").unwrap()).len(), 1);
    }

    #[test]
    fn extend_ir_sizes() {
        let e = extend_ir(&fixture("g16").unwrap()).unwrap();
        assert_eq!((e.states(), e.letters()), (4, 8));
        assert!(e.is_invertible() && e.is_reversible());
        assert_eq!(extend_ir(&fixture("order6").unwrap()), Err(Error::NotIr));
        assert_eq!(extend_ir(&fixture("lamplighter").unwrap()), Err(Error::NotBireversible));
    }
}
