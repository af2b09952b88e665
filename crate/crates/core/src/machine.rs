//! Mealy machines: representation, text formats, classification flags and
//! canonical forms up to joint relabeling of states and letters.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type State = usize;
pub type Letter = usize;

/// A complete deterministic letter-to-letter transducer with states `0..q`
/// and letters `0..p`.
///
/// Both tables are stored row-major, state outer and letter inner: the entry
/// for `(x, i)` lives at `x * p + i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MealyMachine {
    q: usize,
    p: usize,
    delta: Vec<u32>,
    rho: Vec<u32>,
}

impl MealyMachine {
    /// Builds a machine from its row-major tables, checking every entry.
    pub fn new(q: usize, p: usize, delta: Vec<usize>, rho: Vec<usize>) -> Result<Self> {
        if q == 0 || p == 0 {
            return Err(Error::Invalid("a machine needs at least one state and one letter".into()));
        }
        if delta.len() != q * p || rho.len() != q * p {
            return Err(Error::Invalid(format!(
                "expected {} table entries, got {} transitions and {} outputs",
                q * p,
                delta.len(),
                rho.len()
            )));
        }
        if let Some(&bad) = delta.iter().find(|&&t| t >= q) {
            return Err(Error::StateOutOfRange { state: bad, states: q });
        }
        if let Some(&bad) = rho.iter().find(|&&o| o >= p) {
            return Err(Error::LetterOutOfRange { letter: bad, letters: p });
        }
        Ok(Self {
            q,
            p,
            delta: delta.into_iter().map(|v| v as u32).collect(),
            rho: rho.into_iter().map(|v| v as u32).collect(),
        })
    }

    /// Builds a machine from a closure returning `(next_state, output)` for
    /// each `(state, letter)`.
    pub fn from_fn(q: usize, p: usize, mut f: impl FnMut(State, Letter) -> (State, Letter)) -> Result<Self> {
        let mut delta = Vec::with_capacity(q * p);
        let mut rho = Vec::with_capacity(q * p);
        for x in 0..q {
            for i in 0..p {
                let (t, o) = f(x, i);
                delta.push(t);
                rho.push(o);
            }
        }
        Self::new(q, p, delta, rho)
    }

    /// Internal constructor for tables already known to be in range.
    pub(crate) fn from_raw(q: usize, p: usize, delta: Vec<u32>, rho: Vec<u32>) -> Self {
        debug_assert_eq!(delta.len(), q * p);
        debug_assert_eq!(rho.len(), q * p);
        debug_assert!(delta.iter().all(|&t| (t as usize) < q));
        debug_assert!(rho.iter().all(|&o| (o as usize) < p));
        Self { q, p, delta, rho }
    }

    /// The one-state machine over a one-letter alphabet.
    pub fn trivial() -> Self {
        Self::from_raw(1, 1, vec![0], vec![0])
    }

    pub fn states(&self) -> usize {
        self.q
    }

    pub fn letters(&self) -> usize {
        self.p
    }

    /// `δ_i(x)`
    #[inline]
    pub fn next(&self, x: State, i: Letter) -> State {
        self.delta[x * self.p + i] as usize
    }

    /// `ρ_x(i)`
    #[inline]
    pub fn output(&self, x: State, i: Letter) -> Letter {
        self.rho[x * self.p + i] as usize
    }

    pub(crate) fn delta_raw(&self) -> &[u32] {
        &self.delta
    }

    pub(crate) fn rho_raw(&self) -> &[u32] {
        &self.rho
    }

    /// Output row `ρ_x` as a slice over letters.
    pub fn output_row(&self, x: State) -> &[u32] {
        &self.rho[x * self.p..(x + 1) * self.p]
    }

    pub fn is_trivial(&self) -> bool {
        self.q == 1 && self.p == 1
    }

    /// Whether every output function `ρ_x` is a permutation of the letters.
    pub fn is_invertible(&self) -> bool {
        (0..self.q).all(|x| is_permutation(self.output_row(x).iter().map(|&v| v as usize), self.p))
    }

    /// Whether every transition function `δ_i` is a permutation of the states.
    pub fn is_reversible(&self) -> bool {
        (0..self.p).all(|i| is_permutation((0..self.q).map(|x| self.next(x, i)), self.q))
    }

    /// Relabels states by `sigma` and letters by `tau`: the transition
    /// `x -i|j-> y` becomes `sigma(x) -tau(i)|tau(j)-> sigma(y)`.
    pub fn relabel(&self, sigma: &[usize], tau: &[usize]) -> Self {
        let (q, p) = (self.q, self.p);
        let mut delta = vec![0u32; q * p];
        let mut rho = vec![0u32; q * p];
        for x in 0..q {
            for i in 0..p {
                let k = sigma[x] * p + tau[i];
                delta[k] = sigma[self.next(x, i)] as u32;
                rho[k] = tau[self.output(x, i)] as u32;
            }
        }
        Self::from_raw(q, p, delta, rho)
    }

    /// Serialization used for canonical forms: `[q, p, t, o, t, o, ...]` in
    /// row-major order.
    fn serialize(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 2 * self.q * self.p);
        out.push(self.q as u8);
        out.push(self.p as u8);
        for k in 0..self.q * self.p {
            out.push(self.delta[k] as u8);
            out.push(self.rho[k] as u8);
        }
        out
    }
}

impl fmt::Debug for MealyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut count = 0;
    for v in values {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
        count += 1;
    }
    count == n
}

// ---------------------------------------------------------------------------
// Compact text format: `mealy <q> <p> : t/o t/o ; t/o t/o`

impl fmt::Display for MealyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mealy {} {} :", self.q, self.p)?;
        for x in 0..self.q {
            if x > 0 {
                write!(f, " ;")?;
            }
            for i in 0..self.p {
                write!(f, " {}/{}", self.next(x, i), self.output(x, i))?;
            }
        }
        Ok(())
    }
}

impl FromStr for MealyMachine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // `#` starts a comment running to the end of the line
        let mut tokens =
            s.lines().map(|line| line.split_once('#').map_or(line, |(code, _)| code)).flat_map(str::split_whitespace);
        if tokens.next() != Some("mealy") {
            return Err(Error::Parse("expected leading `mealy`".into()));
        }
        let mut number = |what: &str| -> Result<usize> {
            let tok = tokens.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?;
            tok.parse().map_err(|_| Error::Parse(format!("bad {what} `{tok}`")))
        };
        let q = number("state count")?;
        let p = number("letter count")?;
        if tokens.next() != Some(":") {
            return Err(Error::Parse("expected `:` after the sizes".into()));
        }
        let mut delta = Vec::with_capacity(q * p);
        let mut rho = Vec::with_capacity(q * p);
        let mut row_len = 0;
        let mut rows = 1;
        for tok in tokens {
            if tok == ";" {
                if row_len != p {
                    return Err(Error::Parse(format!("row {} has {row_len} entries, expected {p}", rows - 1)));
                }
                rows += 1;
                row_len = 0;
                continue;
            }
            let (t, o) = tok.split_once('/').ok_or_else(|| Error::Parse(format!("expected `t/o`, got `{tok}`")))?;
            let t: usize = t.parse().map_err(|_| Error::Parse(format!("bad target state in `{tok}`")))?;
            let o: usize = o.parse().map_err(|_| Error::Parse(format!("bad output letter in `{tok}`")))?;
            delta.push(t);
            rho.push(o);
            row_len += 1;
        }
        if row_len != p || rows != q {
            return Err(Error::Parse(format!(
                "expected {q} rows of {p} entries, got {rows} rows (last has {row_len})"
            )));
        }
        Self::new(q, p, delta, rho)
    }
}

// ---------------------------------------------------------------------------
// Structured interchange format (JSON).

/// Attribute/value mirror of [`MealyMachine`]: `delta[x][i]` and `rho[x][i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineRecord {
    pub states: usize,
    pub letters: usize,
    pub delta: Vec<Vec<usize>>,
    pub rho: Vec<Vec<usize>>,
}

impl From<&MealyMachine> for MachineRecord {
    fn from(m: &MealyMachine) -> Self {
        let rows = |table: &[u32]| table.chunks(m.p).map(|row| row.iter().map(|&v| v as usize).collect()).collect();
        Self { states: m.q, letters: m.p, delta: rows(&m.delta), rho: rows(&m.rho) }
    }
}

impl TryFrom<MachineRecord> for MealyMachine {
    type Error = Error;

    fn try_from(r: MachineRecord) -> Result<Self> {
        if r.delta.len() != r.states || r.rho.len() != r.states {
            return Err(Error::Parse(format!("expected {} rows per table", r.states)));
        }
        if r.delta.iter().chain(&r.rho).any(|row| row.len() != r.letters) {
            return Err(Error::Parse(format!("expected {} entries per row", r.letters)));
        }
        MealyMachine::new(
            r.states,
            r.letters,
            r.delta.into_iter().flatten().collect(),
            r.rho.into_iter().flatten().collect(),
        )
    }
}

impl MealyMachine {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MachineRecord::from(self)).expect("record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let record: MachineRecord = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        record.try_into()
    }

    /// Accepts either text format.
    pub fn parse_any(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.starts_with('{') {
            Self::from_json(trimmed)
        } else {
            trimmed.parse()
        }
    }
}

// ---------------------------------------------------------------------------
// Classification.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassificationFlags {
    pub invertible: bool,
    pub reversible: bool,
    pub ir: bool,
    pub bireversible: bool,
}

/// Invertible, reversible, IR and bireversible flags.
///
/// Bireversibility is tested as: invertible, reversible, and the inverse
/// machine is reversible as well.
pub fn classify(m: &MealyMachine) -> ClassificationFlags {
    let invertible = m.is_invertible();
    let reversible = m.is_reversible();
    let ir = invertible && reversible;
    let bireversible = ir && crate::transform::inverse(m).map(|inv| inv.is_reversible()).unwrap_or(false);
    ClassificationFlags { invertible, reversible, ir, bireversible }
}

// ---------------------------------------------------------------------------
// Canonical forms.

/// Serialized lexicographically minimal relabeling of a machine. Two machines
/// have equal keys iff they are isomorphic under joint state and letter
/// permutations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Decodes the representative machine carried by the key.
    pub fn machine(&self) -> MealyMachine {
        let (q, p) = (self.0[0] as usize, self.0[1] as usize);
        let body = &self.0[2..];
        let delta = body.iter().step_by(2).map(|&v| v as u32).collect();
        let rho = body.iter().skip(1).step_by(2).map(|&v| v as u32).collect();
        MealyMachine::from_raw(q, p, delta, rho)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

/// Largest size for which canonical forms are computed by exhaustive
/// relabeling; keys store every entry as one byte.
pub const CANONICAL_MAX: usize = 8;

/// Lexicographically minimal serialization over all `q!·p!` relabelings.
///
/// # Panics
/// If the machine has more than [`CANONICAL_MAX`] states or letters.
pub fn canonical_form(m: &MealyMachine) -> CanonicalKey {
    assert!(
        m.q <= CANONICAL_MAX && m.p <= CANONICAL_MAX,
        "canonical forms are limited to {CANONICAL_MAX} states and letters"
    );
    let sigmas = permutations(m.q);
    let taus = permutations(m.p);
    let mut best: Option<Vec<u8>> = None;
    for sigma in &sigmas {
        for tau in &taus {
            let s = m.relabel(sigma, tau).serialize();
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    CanonicalKey(best.expect("at least the identity relabeling"))
}

pub fn is_isomorphic(m1: &MealyMachine, m2: &MealyMachine) -> bool {
    if m1.q != m2.q || m1.p != m2.p {
        return false;
    }
    if m1 == m2 {
        return true;
    }
    let sigmas = permutations(m1.q);
    let taus = permutations(m1.p);
    sigmas.iter().any(|sigma| taus.iter().any(|tau| m1.relabel(sigma, tau) == *m2))
}

/// Precomputed relabelings for a fixed `(q, p)`, used to test whether a
/// machine is the canonical representative of its class without building
/// any relabeled copy.
pub struct Relabelings {
    q: usize,
    p: usize,
    /// Identity excluded.
    pairs: Vec<Relabeling>,
}

/// `(sigma, sigma_inverse, tau, tau_inverse)`.
type Relabeling = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>);

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (a, &b) in perm.iter().enumerate() {
        inv[b] = a;
    }
    inv
}

impl Relabelings {
    pub fn new(q: usize, p: usize) -> Self {
        let mut pairs = Vec::new();
        for sigma in permutations(q) {
            for tau in permutations(p) {
                let identity =
                    sigma.iter().enumerate().all(|(a, &b)| a == b) && tau.iter().enumerate().all(|(a, &b)| a == b);
                if !identity {
                    let (si, ti) = (invert(&sigma), invert(&tau));
                    pairs.push((sigma.clone(), si, tau, ti));
                }
            }
        }
        Self { q, p, pairs }
    }

    /// Whether `m` is the lexicographically least member of its class, that
    /// is, whether `canonical_form(m)` is `m` itself.
    pub fn is_canonical(&self, m: &MealyMachine) -> bool {
        debug_assert!(m.q == self.q && m.p == self.p);
        let p = self.p;
        'pairs: for (sigma, sigma_inv, tau, tau_inv) in &self.pairs {
            // compare relabeled serialization against the original, entry by entry
            for (nx, &x) in sigma_inv.iter().enumerate() {
                for (ni, &i) in tau_inv.iter().enumerate() {
                    let k = nx * p + ni;
                    let t = sigma[m.next(x, i)] as u32;
                    match t.cmp(&m.delta[k]) {
                        std::cmp::Ordering::Less => return false,
                        std::cmp::Ordering::Greater => continue 'pairs,
                        std::cmp::Ordering::Equal => {}
                    }
                    let o = tau[m.output(x, i)] as u32;
                    match o.cmp(&m.rho[k]) {
                        std::cmp::Ordering::Less => return false,
                        std::cmp::Ordering::Greater => continue 'pairs,
                        std::cmp::Ordering::Equal => {}
                    }
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Cross-product construction realizing a prescribed pair of groups.

/// Machine with states `A1 × A2` and letters `Σ1 × Σ2` whose transitions are
/// `(a, b) -(i, j) | (a(i), j)-> (a, j(b))`.
///
/// `gens_on_letters` are permutations of `Σ1 = 0..n1` (the set `A1`),
/// `gens_on_states` are permutations of `A2 = 0..n2` (the set `Σ2`). The
/// machine generates `⟨A1⟩` and its dual generates `⟨Σ2⟩`. State `(a, b)` is
/// encoded as `a * n2 + b` and letter `(i, j)` as `i * |Σ2| + j`.
pub fn cross_product_machine(gens_on_letters: &[Vec<usize>], gens_on_states: &[Vec<usize>]) -> Result<MealyMachine> {
    let check = |gens: &[Vec<usize>], side: &str| -> Result<usize> {
        let first = gens.first().ok_or_else(|| Error::BadPermutation(format!("no generators on {side}")))?;
        let n = first.len();
        for g in gens {
            if g.len() != n || !is_permutation(g.iter().copied(), n) {
                return Err(Error::BadPermutation(format!("{g:?} is not a permutation of 0..{n}")));
            }
        }
        if n == 0 {
            return Err(Error::BadPermutation(format!("empty point set on {side}")));
        }
        Ok(n)
    };
    let n1 = check(gens_on_letters, "letters")?;
    let n2 = check(gens_on_states, "states")?;
    let (a1, s2) = (gens_on_letters.len(), gens_on_states.len());
    MealyMachine::from_fn(a1 * n2, n1 * s2, |state, letter| {
        let (a, b) = (state / n2, state % n2);
        let (i, j) = (letter / s2, letter % s2);
        let out = gens_on_letters[a][i] * s2 + j;
        let next = a * n2 + gens_on_states[j][b];
        (next, out)
    })
}
