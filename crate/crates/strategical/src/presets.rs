//! Ready-made games, strategies and languages used across tests, docs and
//! the bundled fixture files.

use std::collections::BTreeSet;
use std::sync::Arc;

use num::rational::BigRational;
use num::BigInt;

use crate::alphabet::{MoveAlphabet, MoveLetter};
use crate::automata::{AutomatonBuilder, SafetyAutomaton};
use crate::game::Game;
use crate::strategy::ProductStrategyVector;

/// The two-player cooperate/defect alphabet `{c,d} x {c,d}`.
pub fn pd_alphabet() -> Arc<MoveAlphabet> {
    MoveAlphabet::new(vec![vec!["c", "d"], vec!["c", "d"]]).expect("valid alphabet")
}

fn pd_letter(alpha: &Arc<MoveAlphabet>, first: usize, second: usize) -> MoveLetter {
    alpha.letter(&[first, second])
}

fn rat(n: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(1))
}

/// The Prisoner's Dilemma stage game:
/// `(c,c) -> (4,4)`, `(c,d) -> (0,5)`, `(d,c) -> (5,0)`, `(d,d) -> (1,1)`.
pub fn prisoners_dilemma() -> Game {
    let alpha = pd_alphabet();
    let table = alpha
        .letters()
        .map(|l| match (alpha.component(l, 0), alpha.component(l, 1)) {
            (0, 0) => vec![rat(4), rat(4)],
            (0, 1) => vec![rat(0), rat(5)],
            (1, 0) => vec![rat(5), rat(0)],
            _ => vec![rat(1), rat(1)],
        })
        .collect();
    Game::new(alpha, vec!["row".into(), "col".into()], table).expect("valid game")
}

/// The one-sided grim-trigger vector on three memory states: player 1
/// cooperates until player 2 defects and punishes forever after; player 2 is
/// unconstrained until the play leaves the pattern, where the move set is
/// empty. Its language is `(c,c)^w + (c,c)*(c,d)((d,c)+(d,d))^w`.
pub fn grim_trigger() -> ProductStrategyVector {
    let alpha = pd_alphabet();
    let c: BTreeSet<usize> = [0].into();
    let d: BTreeSet<usize> = [1].into();
    let both: BTreeSet<usize> = [0, 1].into();
    let none: BTreeSet<usize> = BTreeSet::new();
    let coop = 0;
    let punish = 1;
    let sink = 2;
    let mut update = vec![vec![sink; alpha.len()]; 3];
    update[coop][pd_letter(&alpha, 0, 0).index()] = coop;
    update[coop][pd_letter(&alpha, 0, 1).index()] = punish;
    update[punish][pd_letter(&alpha, 1, 0).index()] = punish;
    update[punish][pd_letter(&alpha, 1, 1).index()] = punish;
    ProductStrategyVector::new(
        alpha,
        vec!["coop".into(), "punish".into(), "sink".into()],
        coop,
        update,
        vec![
            vec![c, both.clone()],
            vec![d, both],
            vec![none.clone(), none],
        ],
    )
    .expect("valid vector")
}

/// The grim-trigger profile: both players cooperate until the opponent
/// defects and punish forever after. Memory tracks, per player, whether the
/// opponent has ever defected; the generated language is `(c,c)^w`.
pub fn grim_trigger_both() -> ProductStrategyVector {
    let alpha = pd_alphabet();
    // State index encodes the pair of defection flags (f1, f2).
    let state = |f1: usize, f2: usize| f1 * 2 + f2;
    let names = vec![
        "peace".into(),
        "p2defected".into(),
        "p1defected".into(),
        "war".into(),
    ];
    let mut update = vec![vec![0usize; alpha.len()]; 4];
    for f1 in 0..2 {
        for f2 in 0..2 {
            for letter in alpha.letters() {
                let g1 = f1 | alpha.component(letter, 0);
                let g2 = f2 | alpha.component(letter, 1);
                update[state(f1, f2)][letter.index()] = state(g1, g2);
            }
        }
    }
    let c: BTreeSet<usize> = [0].into();
    let d: BTreeSet<usize> = [1].into();
    let allowed = (0..4)
        .map(|s| {
            let (f1, f2) = (s / 2, s % 2);
            // Player 1 punishes once player 2 has defected and vice versa.
            vec![
                if f2 == 1 { d.clone() } else { c.clone() },
                if f1 == 1 { d.clone() } else { c.clone() },
            ]
        })
        .collect();
    ProductStrategyVector::new(alpha, names, 0, update, allowed).expect("valid vector")
}

/// Both players defect forever, on a single memory state.
pub fn always_defect() -> ProductStrategyVector {
    let alpha = pd_alphabet();
    let d: BTreeSet<usize> = [1].into();
    let update = vec![vec![0; alpha.len()]];
    ProductStrategyVector::new(
        alpha,
        vec!["war".into()],
        0,
        update,
        vec![vec![d.clone(), d]],
    )
    .expect("valid vector")
}

/// The language `(c,c)^w + (c,c)*(c,d)((d,c)+(d,d))^w` generated by
/// [`grim_trigger`], as a safety automaton.
pub fn grim_language() -> SafetyAutomaton {
    let alpha = pd_alphabet();
    let mut b = AutomatonBuilder::with_names(alpha.clone(), vec!["coop".into(), "punish".into()]);
    b.add(0, pd_letter(&alpha, 0, 0), 0).expect("deterministic");
    b.add(0, pd_letter(&alpha, 0, 1), 1).expect("deterministic");
    b.add(1, pd_letter(&alpha, 1, 0), 1).expect("deterministic");
    b.add(1, pd_letter(&alpha, 1, 1), 1).expect("deterministic");
    b.into_safety()
}

/// The language `(d,d)^w + (d,d)*(d,c)((c,c)+(c,d))^w`: player 1 defects as
/// long as the opponent does and cooperates forever from the opponent's first
/// cooperation; player 2 is free.
pub fn defect_until_cooperation() -> SafetyAutomaton {
    let alpha = pd_alphabet();
    let mut b =
        AutomatonBuilder::with_names(alpha.clone(), vec!["standoff".into(), "thaw".into()]);
    b.add(0, pd_letter(&alpha, 1, 1), 0).expect("deterministic");
    b.add(0, pd_letter(&alpha, 1, 0), 1).expect("deterministic");
    b.add(1, pd_letter(&alpha, 0, 0), 1).expect("deterministic");
    b.add(1, pd_letter(&alpha, 0, 1), 1).expect("deterministic");
    b.into_safety()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::equivalent;
    use crate::strategy::MemoryStrategy;

    #[test]
    fn grim_vector_generates_the_grim_language() {
        assert!(equivalent(
            &grim_trigger().gamma().to_buchi(),
            &grim_language().to_buchi()
        ));
    }

    #[test]
    fn grim_profile_generates_bare_cooperation() {
        let alpha = pd_alphabet();
        let x = grim_trigger_both().gamma();
        assert_eq!(x.state_count(), 1);
        let cc = crate::words::LassoWord::periodic(crate::words::FiniteWord::new(vec![
            pd_letter(&alpha, 0, 0),
        ]));
        assert!(x.accepts(&cc));
    }

    #[test]
    fn preset_vectors_have_the_documented_sizes() {
        assert_eq!(grim_trigger().memory_count(), 3);
        assert_eq!(grim_trigger_both().memory_count(), 4);
        assert_eq!(always_defect().memory_count(), 1);
    }
}
