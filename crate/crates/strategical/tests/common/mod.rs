//! Shared random generators and independent oracles for the integration
//! tests. Everything is seeded, so failures reproduce.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use strategical::alphabet::{MoveAlphabet, MoveLetter};
use strategical::automata::{AutomatonBuilder, DetBuchiAutomaton};
use strategical::strategy::{FiniteMemoryStrategy, MemoryStrategy, ProductStrategyVector};
use strategical::words::{FiniteWord, LassoWord};

pub fn single_letter_alphabet(k: usize) -> Arc<MoveAlphabet> {
    let names = ["a", "b", "c", "d"];
    MoveAlphabet::single_player(names[..k].to_vec()).unwrap()
}

/// An assortment of small alphabets, single- and two-player, with at most
/// four letters.
pub fn small_alphabets() -> Vec<Arc<MoveAlphabet>> {
    vec![
        single_letter_alphabet(2),
        single_letter_alphabet(3),
        single_letter_alphabet(4),
        MoveAlphabet::new(vec![vec!["c", "d"], vec!["c", "d"]]).unwrap(),
        MoveAlphabet::new(vec![vec!["x", "y"], vec!["l", "r"]]).unwrap(),
    ]
}

/// Deterministic Buchi automaton with up to `max_states` states; transition
/// density and acceptance are random, state 0 is initial.
pub fn random_buchi(
    rng: &mut StdRng,
    alphabet: &Arc<MoveAlphabet>,
    max_states: usize,
) -> DetBuchiAutomaton {
    let n = rng.gen_range(1..=max_states);
    let mut builder = AutomatonBuilder::new(alphabet.clone(), n);
    for q in 0..n {
        for a in alphabet.letters() {
            if rng.gen_bool(0.8) {
                let r = rng.gen_range(0..n);
                builder.add(q, a, r).unwrap();
            }
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    builder.into_buchi(&accepting)
}

/// Random two-player product vector with up to `max_memory` memory states.
pub fn random_product_vector(
    rng: &mut StdRng,
    alphabet: &Arc<MoveAlphabet>,
    max_memory: usize,
) -> ProductStrategyVector {
    let n = rng.gen_range(1..=max_memory);
    let names = (0..n).map(|i| format!("m{i}")).collect();
    let update = (0..n)
        .map(|_| (0..alphabet.len()).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let allowed = (0..n)
        .map(|_| {
            (0..alphabet.player_count())
                .map(|p| {
                    (0..alphabet.action_count(p))
                        .filter(|_| rng.gen_bool(0.7))
                        .collect::<BTreeSet<usize>>()
                })
                .collect()
        })
        .collect();
    ProductStrategyVector::new(alphabet.clone(), names, 0, update, allowed).unwrap()
}

pub fn random_lasso(
    rng: &mut StdRng,
    alphabet: &Arc<MoveAlphabet>,
    max_stem: usize,
    max_cycle: usize,
) -> LassoWord {
    let stem_len = rng.gen_range(0..=max_stem);
    let cycle_len = rng.gen_range(1..=max_cycle);
    let mut pick = |_: usize| MoveLetter::from_index_unchecked(rng.gen_range(0..alphabet.len()));
    let stem: FiniteWord = (0..stem_len).map(&mut pick).collect();
    let cycle: FiniteWord = (0..cycle_len).map(&mut pick).collect();
    LassoWord::new(stem, cycle)
}

/// Every lasso with `|stem| + |cycle| <= bound`, without normalization
/// deduplication. Exponential in the bound; keep it small.
pub fn all_lassos(alphabet: &Arc<MoveAlphabet>, bound: usize) -> Vec<LassoWord> {
    let letters: Vec<MoveLetter> = alphabet.letters().collect();
    let mut words_by_len: Vec<Vec<Vec<MoveLetter>>> = vec![vec![Vec::new()]];
    for len in 1..=bound {
        let mut next = Vec::new();
        for w in &words_by_len[len - 1] {
            for &a in &letters {
                let mut e = w.clone();
                e.push(a);
                next.push(e);
            }
        }
        words_by_len.push(next);
    }
    let mut out = Vec::new();
    for total in 1..=bound {
        for cycle_len in 1..=total {
            let stem_len = total - cycle_len;
            for stem in &words_by_len[stem_len] {
                for cycle in &words_by_len[cycle_len] {
                    out.push(LassoWord::new(
                        FiniteWord::new(stem.clone()),
                        FiniteWord::new(cycle.clone()),
                    ));
                }
            }
        }
    }
    out
}

/// Brute-force containment: the first enumerated lasso of total length at
/// most `bound` accepted by `a` and rejected by `b`.
pub fn containment_counterexample_oracle(
    a: &DetBuchiAutomaton,
    b: &DetBuchiAutomaton,
    bound: usize,
) -> Option<LassoWord> {
    all_lassos(a.alphabet(), bound)
        .into_iter()
        .find(|h| a.accepts(h) && !b.accepts(h))
}

/// Language-preserving random mutations of a finite-memory strategy: state
/// splitting (bisimulation), dead-end escape chains at empty-move states, and
/// state order permutation. The generated language never changes, and the
/// original strategy stays pointwise below the mutant.
pub fn mutate_preserving_language(
    rng: &mut StdRng,
    strategy: &FiniteMemoryStrategy,
) -> FiniteMemoryStrategy {
    let alphabet = strategy.alphabet().clone();
    let n0 = strategy.memory_count();
    let mut names: Vec<String> = (0..n0).map(|m| format!("s{m}")).collect();
    let mut update: Vec<Vec<usize>> = (0..n0)
        .map(|m| alphabet.letters().map(|a| strategy.update(m, a)).collect())
        .collect();
    let mut allowed: Vec<BTreeSet<MoveLetter>> = (0..n0)
        .map(|m| strategy.allowed(m).into_iter().collect())
        .collect();
    let mut initial = strategy.initial();

    for _ in 0..rng.gen_range(1..=3) {
        match rng.gen_range(0..3) {
            // Split a state: clone it and redirect a random subset of the
            // incoming transitions to the clone.
            0 => {
                let q = rng.gen_range(0..update.len());
                let clone = update.len();
                names.push(format!("s{q}x"));
                update.push(update[q].clone());
                allowed.push(allowed[q].clone());
                for row in update.iter_mut() {
                    for slot in row.iter_mut() {
                        if *slot == q && rng.gen_bool(0.5) {
                            *slot = clone;
                        }
                    }
                }
            }
            // Attach a two-step escape chain to a state with no moves: the
            // extra histories die within two steps, so no new infinite play
            // appears.
            1 => {
                if let Some(q) = (0..allowed.len()).find(|&m| allowed[m].is_empty()) {
                    let d1 = update.len();
                    let d2 = d1 + 1;
                    names.push("escape".into());
                    names.push("deadend".into());
                    update.push(vec![d2; alphabet.len()]);
                    update.push(vec![d2; alphabet.len()]);
                    allowed.push(
                        alphabet
                            .letters()
                            .filter(|_| rng.gen_bool(0.5))
                            .collect(),
                    );
                    allowed.push(BTreeSet::new());
                    let escape_letters: Vec<MoveLetter> = alphabet
                        .letters()
                        .filter(|_| rng.gen_bool(0.5))
                        .collect();
                    for a in &escape_letters {
                        allowed[q].insert(*a);
                        update[q][a.index()] = d1;
                    }
                }
            }
            // Permute the state indices.
            _ => {
                let n = update.len();
                let mut perm: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                // perm[old] = new position
                let mut new_names = names.clone();
                let mut new_update = update.clone();
                let mut new_allowed = allowed.clone();
                for old in 0..n {
                    new_names[perm[old]] = names[old].clone();
                    new_update[perm[old]] =
                        update[old].iter().map(|&t| perm[t]).collect();
                    new_allowed[perm[old]] = allowed[old].clone();
                }
                names = new_names;
                update = new_update;
                allowed = new_allowed;
                initial = perm[initial];
            }
        }
    }
    FiniteMemoryStrategy::new(alphabet, names, initial, update, allowed).unwrap()
}
