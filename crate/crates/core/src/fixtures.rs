//! Named machines from the literature. Alphabets are mapped in reading order
//! (`a, b, c, … → 0, 1, 2, …`; digit letters keep their value).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::machine::MealyMachine;

const COMPACT: &[(&str, &str)] = &[
    // lamplighter group Z ≀ Z2
    ("lamplighter", "mealy 2 2 : 1/1 0/0 ; 0/0 1/1"),
    // Klein four-group
    ("klein", "mealy 2 2 : 0/1 0/0 ; 0/0 0/1"),
    // md-reduced, yet generates a semigroup of order 6
    ("order6", "mealy 2 2 : 0/1 0/1 ; 1/1 0/0"),
    // smallest machine with intermediate growth
    ("s_i2", "mealy 2 2 : 0/1 0/0 ; 1/1 0/1"),
    // binary odometer, generates Z
    ("adding_machine", "mealy 2 2 : 1/1 0/0 ; 1/0 1/1"),
    // Z2 × D4
    ("grig_finite", "mealy 3 2 : 0/1 0/0 ; 0/0 0/1 ; 0/0 1/1"),
    ("basilica", "mealy 3 2 : 1/1 2/0 ; 0/0 2/1 ; 2/0 2/1"),
    // free group of rank 3
    ("aleshin", "mealy 3 2 : 2/1 1/0 ; 1/1 2/0 ; 0/0 0/1"),
    // free product Z2 * Z2 * Z2
    ("babyaleshin", "mealy 3 2 : 2/1 2/0 ; 0/0 1/1 ; 1/0 0/1"),
    ("grigorchuk", "mealy 5 2 : 4/1 4/0 ; 0/0 2/1 ; 0/0 3/1 ; 4/0 1/1 ; 4/0 4/1"),
    // group of order 36
    ("aleshin_finite", "mealy 2 3 : 1/1 1/2 1/0 ; 0/1 0/0 0/2"),
    // semigroup of order 13597
    ("s13597", "mealy 2 3 : 1/0 1/2 1/0 ; 1/1 1/0 0/2"),
    // group of order 16, <a, b : a^4 = b^4 = abab = 1, ab^3 = ba^3>
    ("g16", "mealy 2 4 : 1/1 0/0 1/3 0/2 ; 0/3 1/0 0/1 1/2"),
    // dual of the lamplighter machine, states 0, 1 over letters a, b
    ("lamplighter_dual", "mealy 2 2 : 1/1 0/0 ; 0/0 1/1"),
    // non-invertible companion of the lamplighter machine (ρ_a is constant)
    ("noninvertible2", "mealy 2 2 : 1/0 0/0 ; 1/1 0/1"),
    // 3-state 3-letter machine whose dual splits into a sum with a component
    // isomorphic to the dual of the BabyAleshin machine
    ("sum_example", "mealy 3 3 : 2/1 2/0 0/2 ; 0/0 1/1 2/2 ; 1/0 0/1 1/2"),
    // Cayley machine of Z2
    ("cayley_z2", "mealy 2 2 : 0/0 1/1 ; 1/1 0/0"),
    // Cayley machine of the semilattice ({0, 1}, min)
    ("cayley_semilattice", "mealy 2 2 : 0/0 0/0 ; 0/0 1/1"),
];

const DIHEDRAL8: &str = include_str!("../data/dihedral8.mealy");

/// Names accepted by [`fixture`]; `msharp_<p>_<q>` is accepted for every
/// `p, q ≥ 2` as well.
pub fn fixture_names() -> Vec<&'static str> {
    let mut names: Vec<_> = COMPACT.iter().map(|(n, _)| *n).collect();
    names.push("dihedral8");
    names.push("msharp_2_2");
    names
}

pub fn fixture(name: &str) -> Result<MealyMachine> {
    if let Some((_, s)) = COMPACT.iter().find(|(n, _)| *n == name) {
        return Ok(s.parse().expect("fixture encodings are valid"));
    }
    if name == "dihedral8" {
        return Ok(DIHEDRAL8.parse().expect("dihedral8 data file is valid"));
    }
    if let Some(rest) = name.strip_prefix("msharp_") {
        if let Some((p, q)) = rest.split_once('_') {
            if let (Ok(p), Ok(q)) = (p.parse(), q.parse()) {
                return msharp(p, q);
            }
        }
    }
    Err(Error::UnknownFixture(name.to_string()))
}

/// The bireversible family `M♯(p, q)` on `p` letters and `q` states.
///
/// Reading of the diagram (letters `1..p` become `0..p-1`, states
/// `a_1..a_q` become `0..q-1`):
/// - `a_1` adds one to every letter modulo `p` and moves to `a_2`;
/// - `a_2` fixes the first letter, cycles the remaining ones
///   (`i ↦ i+1`, last ↦ second) and moves to `a_3`;
/// - every further state (the dotted chain) acts as the identity and moves
///   to its successor, `a_q` moving back to `a_1`.
///
/// For `q = 2` the successor of `a_2` is `a_1`.
pub fn msharp(p: usize, q: usize) -> Result<MealyMachine> {
    if p < 2 || q < 2 {
        return Err(Error::Invalid("msharp needs p ≥ 2 letters and q ≥ 2 states".into()));
    }
    MealyMachine::from_fn(q, p, |x, i| {
        let next = (x + 1) % q;
        let out = match x {
            0 => (i + 1) % p,
            1 if i == 0 => 0,
            1 if i == p - 1 => 1,
            1 => i + 1,
            _ => i,
        };
        (next, out)
    })
}

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 2024;

/// Which tables a random machine is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    Any,
    Invertible,
    Bireversible,
}

/// Uniform random machine of the given kind. Bireversible machines are drawn
/// by rejection and may take many attempts for larger sizes.
pub fn random_machine(q: usize, p: usize, kind: RandomKind, rng: &mut impl Rng) -> Result<MealyMachine> {
    if q == 0 || p == 0 {
        return Err(Error::Invalid("random machines need q ≥ 1 and p ≥ 1".into()));
    }
    loop {
        let delta: Vec<usize> = (0..q * p).map(|_| rng.gen_range(0..q)).collect();
        let rho: Vec<usize> = match kind {
            RandomKind::Any => (0..q * p).map(|_| rng.gen_range(0..p)).collect(),
            _ => (0..q)
                .flat_map(|_| {
                    let mut row: Vec<usize> = (0..p).collect();
                    row.shuffle(rng);
                    row
                })
                .collect(),
        };
        let m = MealyMachine::new(q, p, delta, rho)?;
        if kind != RandomKind::Bireversible || crate::machine::classify(&m).bireversible {
            return Ok(m);
        }
    }
}

/// `count` random machines from a ChaCha stream seeded with `seed`.
pub fn random_machines(q: usize, p: usize, kind: RandomKind, count: usize, seed: u64) -> Result<Vec<MealyMachine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_machine(q, p, kind, &mut rng)).collect()
}
