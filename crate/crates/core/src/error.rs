use thiserror::Error;

/// Everything that can go wrong while building, transforming or analysing a
/// machine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid machine: {0}")]
    Invalid(String),

    #[error("machine is not invertible (some output function is not a permutation of letters)")]
    NotInvertible,

    #[error("machine is not an IR-automaton (invertible and reversible)")]
    NotIr,

    #[error("machine is not bireversible")]
    NotBireversible,

    #[error("alphabet mismatch: {left} letters vs {right} letters")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("size limit exceeded: {what} needs {needed} entries, limit is {limit}")]
    SizeLimit { what: &'static str, needed: u128, limit: u128 },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("malformed permutation: {0}")]
    BadPermutation(String),

    #[error("letter {letter} out of range for a {letters}-letter alphabet")]
    LetterOutOfRange { letter: usize, letters: usize },

    #[error("state {state} out of range for a {states}-state machine")]
    StateOutOfRange { state: usize, states: usize },

    #[error("the empty word has no element in semigroup mode")]
    EmptyWord,

    #[error("budget must be positive")]
    ZeroBudget,

    #[error("helix graph is not a union of cycles")]
    NotUnionOfCycles,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors that stem from a violated precondition on an otherwise valid
    /// input (as opposed to malformed input or exhausted resources).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotInvertible
                | Error::NotIr
                | Error::NotBireversible
                | Error::AlphabetMismatch { .. }
                | Error::LetterOutOfRange { .. }
                | Error::StateOutOfRange { .. }
                | Error::EmptyWord
                | Error::ZeroBudget
                | Error::NotUnionOfCycles
                | Error::UnknownFixture(_)
        )
    }
}
