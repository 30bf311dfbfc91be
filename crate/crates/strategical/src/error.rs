use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects built over different move alphabets were combined.
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    /// Intersection of two Buchi automata whose acceptance sets are both
    /// proper subsets of their states is not supported.
    #[error(
        "cannot intersect two Buchi automata with nontrivial acceptance sets; \
         at most one operand may have accepting states != all states"
    )]
    UnsupportedBuchiIntersection,

    /// An operation that needs at least one state was given the empty automaton.
    #[error("operation requires a nonempty automaton")]
    EmptyAutomaton,

    /// A match was supplied to a good-match check but lies outside the
    /// ambient language.
    #[error("match is not a member of the ambient language")]
    MatchOutsideLanguage,

    /// Equilibrium notions quantify over the opponents of each player and are
    /// undefined for a single player.
    #[error("equilibrium queries require at least two players")]
    SinglePlayerEquilibrium,

    /// Exhaustive expansion would exceed the configured bound.
    #[error("expansion limit exceeded: {needed} words requested, limit is {limit}")]
    ExpansionLimit { needed: usize, limit: usize },

    /// A numeric parameter was outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A textual input failed to parse.
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// An internal consistency check failed; this indicates a bug in the
    /// library, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Parse failure in one of the textual formats, with source position.
#[derive(Debug, Clone, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
