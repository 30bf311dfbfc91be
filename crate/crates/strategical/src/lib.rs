//! Analysis of the omega-languages generated by strategies in infinitely
//! repeated games.
//!
//! A match of a simultaneous repeated game is an infinite word over the
//! product alphabet of moves. This crate builds the language generated by a
//! finite-memory strategy vector, decides whether a language can be generated
//! by any strategy at all (equivalently: whether it is closed in the prefix
//! topology), extracts the minimal generating strategy, and checks Nash
//! equilibria of the discounted repeated game by comparing each match against
//! its best single-player deviations.
//!
//! The main pieces:
//!
//! - [`alphabet`]: product move alphabets;
//! - [`words`]: finite words, lasso (ultimately periodic) words, the prefix
//!   metric;
//! - [`automata`]: deterministic Buchi and safety automata with the prefix,
//!   left-quotient, arrow and closure operators, containment with lasso
//!   counterexamples;
//! - [`strategy`]: finite-memory strategies and vectors, the generated
//!   language, the minimal strategy, the pointwise order;
//! - [`game`]: discounted payoffs, good matches, Nash verification and
//!   discount-threshold search;
//! - [`format`]: the textual file formats shared with the command-line tool;
//! - [`presets`]: ready-made games, strategies and languages used throughout
//!   the documentation and tests.

pub mod alphabet;
pub mod automata;
pub mod error;
pub mod format;
pub mod game;
pub mod presets;
pub mod strategy;
pub mod words;

pub use alphabet::{MoveAlphabet, MoveLetter};
pub use automata::{
    contains, equivalent, AutomatonBuilder, Containment, DetBuchiAutomaton, Dfa, SafetyAutomaton,
};
pub use error::{Error, Result};
pub use game::{
    best_deviation_value, equilibrium_family, is_good_match, is_nash, nash_threshold,
    DiscountFactor, Game, GoodMatchReport, NashOutcome, ThresholdReport,
};
pub use strategy::{
    enumerate_prefixes, gamma, minimal_strategy, strategy_leq, FiniteMemoryStrategy,
    MemoryStrategy, ProductStrategyVector, ProgrammaticStrategy,
};
pub use words::{metric_distance, FiniteWord, LassoWord};
