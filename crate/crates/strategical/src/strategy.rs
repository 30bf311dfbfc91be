//! Strategies as relations from finite histories to permitted moves.
//!
//! A finite-memory strategy keeps a memory state, updates it on every move
//! (also on moves it did not permit), and permits a move set per memory
//! state. A product strategy vector stores per-player action sets instead;
//! its move set at each state is their product. Programmatic strategies wrap
//! an arbitrary pure function and only support bounded-horizon queries.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::alphabet::{assert_same_alphabet, MoveAlphabet, MoveLetter};
use crate::automata::{AutomatonBuilder, DetBuchiAutomaton, SafetyAutomaton};
use crate::error::{Error, Result};
use crate::words::FiniteWord;

/// Common interface of the finite-memory strategy representations.
pub trait MemoryStrategy {
    fn alphabet(&self) -> &Arc<MoveAlphabet>;
    fn memory_count(&self) -> usize;
    fn initial(&self) -> usize;
    fn memory_name(&self, m: usize) -> &str;
    /// Memory successor; total, defined for every letter.
    fn update(&self, m: usize, a: MoveLetter) -> usize;
    /// Moves permitted at memory state `m`, in letter order.
    fn allowed(&self, m: usize) -> Vec<MoveLetter>;

    /// Memory state reached by a history.
    fn run(&self, w: &FiniteWord) -> usize {
        w.letters()
            .iter()
            .fold(self.initial(), |m, &a| self.update(m, a))
    }

    /// The move set permitted after history `w`.
    fn moves(&self, w: &FiniteWord) -> BTreeSet<MoveLetter> {
        self.allowed(self.run(w)).into_iter().collect()
    }
}

/// Strategy in general relation form: an explicit move set per memory state.
#[derive(Debug, Clone)]
pub struct FiniteMemoryStrategy {
    alphabet: Arc<MoveAlphabet>,
    names: Vec<String>,
    initial: usize,
    update: Vec<Vec<usize>>,
    allowed: Vec<BTreeSet<MoveLetter>>,
}

impl FiniteMemoryStrategy {
    pub fn new(
        alphabet: Arc<MoveAlphabet>,
        names: Vec<String>,
        initial: usize,
        update: Vec<Vec<usize>>,
        allowed: Vec<BTreeSet<MoveLetter>>,
    ) -> Result<FiniteMemoryStrategy> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidParameter("strategy needs memory states".into()));
        }
        if initial >= n || update.len() != n || allowed.len() != n {
            return Err(Error::InvalidParameter("inconsistent strategy shape".into()));
        }
        for row in &update {
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidParameter("update map is not total".into()));
            }
        }
        for set in &allowed {
            if set.iter().any(|&a| !alphabet.contains(a)) {
                return Err(Error::InvalidParameter(
                    "allowed move outside the alphabet".into(),
                ));
            }
        }
        Ok(FiniteMemoryStrategy {
            alphabet,
            names,
            initial,
            update,
            allowed,
        })
    }

    /// The generated language: all matches every letter of which is permitted
    /// at its history.
    pub fn gamma(&self) -> SafetyAutomaton {
        gamma(self)
    }

    /// First reachable memory state whose move set is not the product of its
    /// per-player projections, if any.
    pub fn first_non_rectangular_state(&self) -> Option<usize> {
        let alphabet = &self.alphabet;
        for m in self.reachable_states() {
            let set = &self.allowed[m];
            if set.is_empty() {
                continue;
            }
            let product_size: usize = (0..alphabet.player_count())
                .map(|p| {
                    set.iter()
                        .map(|&a| alphabet.component(a, p))
                        .collect::<BTreeSet<_>>()
                        .len()
                })
                .product();
            if product_size != set.len() {
                return Some(m);
            }
        }
        None
    }

    /// True if every reachable move set is a product of per-player sets.
    pub fn is_rectangular(&self) -> bool {
        self.first_non_rectangular_state().is_none()
    }

    fn reachable_states(&self) -> Vec<usize> {
        let mut seen = vec![false; self.names.len()];
        let mut order = vec![self.initial];
        seen[self.initial] = true;
        let mut head = 0;
        while head < order.len() {
            let m = order[head];
            head += 1;
            for a in self.alphabet.letters() {
                let r = self.update[m][a.index()];
                if !seen[r] {
                    seen[r] = true;
                    order.push(r);
                }
            }
        }
        order
    }
}

impl MemoryStrategy for FiniteMemoryStrategy {
    fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.alphabet
    }

    fn memory_count(&self) -> usize {
        self.names.len()
    }

    fn initial(&self) -> usize {
        self.initial
    }

    fn memory_name(&self, m: usize) -> &str {
        &self.names[m]
    }

    fn update(&self, m: usize, a: MoveLetter) -> usize {
        self.update[m][a.index()]
    }

    fn allowed(&self, m: usize) -> Vec<MoveLetter> {
        self.allowed[m].iter().copied().collect()
    }
}

/// Strategy vector in product form: per-player action sets per memory state.
/// The permitted move set at a state is their product, so it is rectangular
/// by construction (and empty as soon as one factor is empty).
#[derive(Debug, Clone)]
pub struct ProductStrategyVector {
    alphabet: Arc<MoveAlphabet>,
    names: Vec<String>,
    initial: usize,
    update: Vec<Vec<usize>>,
    allowed_per_player: Vec<Vec<BTreeSet<usize>>>,
}

impl ProductStrategyVector {
    pub fn new(
        alphabet: Arc<MoveAlphabet>,
        names: Vec<String>,
        initial: usize,
        update: Vec<Vec<usize>>,
        allowed_per_player: Vec<Vec<BTreeSet<usize>>>,
    ) -> Result<ProductStrategyVector> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidParameter("strategy needs memory states".into()));
        }
        if initial >= n || update.len() != n || allowed_per_player.len() != n {
            return Err(Error::InvalidParameter("inconsistent strategy shape".into()));
        }
        for row in &update {
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidParameter("update map is not total".into()));
            }
        }
        for state_sets in &allowed_per_player {
            if state_sets.len() != alphabet.player_count() {
                return Err(Error::InvalidParameter(
                    "one action set per player is required".into(),
                ));
            }
            for (p, set) in state_sets.iter().enumerate() {
                if set.iter().any(|&a| a >= alphabet.action_count(p)) {
                    return Err(Error::InvalidParameter(format!(
                        "action index out of range for player {}",
                        p + 1
                    )));
                }
            }
        }
        Ok(ProductStrategyVector {
            alphabet,
            names,
            initial,
            update,
            allowed_per_player,
        })
    }

    /// The vector permitting every action of every player, on one memory
    /// state.
    pub fn unpredictable(alphabet: Arc<MoveAlphabet>) -> ProductStrategyVector {
        let full: Vec<BTreeSet<usize>> = (0..alphabet.player_count())
            .map(|p| (0..alphabet.action_count(p)).collect())
            .collect();
        let update = vec![vec![0; alphabet.len()]];
        ProductStrategyVector {
            alphabet,
            names: vec!["free".into()],
            initial: 0,
            update,
            allowed_per_player: vec![full],
        }
    }

    pub fn player_count(&self) -> usize {
        self.alphabet.player_count()
    }

    pub fn allowed_actions(&self, m: usize, player: usize) -> &BTreeSet<usize> {
        &self.allowed_per_player[m][player]
    }

    /// Replaces every component except player `i`'s by the unpredictable
    /// strategy, keeping the memory structure.
    pub fn isolate_player(&self, i: usize) -> ProductStrategyVector {
        let mut out = self.clone();
        for state_sets in &mut out.allowed_per_player {
            for (p, set) in state_sets.iter_mut().enumerate() {
                if p != i {
                    *set = (0..self.alphabet.action_count(p)).collect();
                }
            }
        }
        out
    }

    /// Replaces player `i`'s component by the unpredictable strategy, keeping
    /// the memory structure.
    pub fn free_player(&self, i: usize) -> ProductStrategyVector {
        let mut out = self.clone();
        for state_sets in &mut out.allowed_per_player {
            state_sets[i] = (0..self.alphabet.action_count(i)).collect();
        }
        out
    }

    /// The same strategy in general relation form.
    pub fn to_general(&self) -> FiniteMemoryStrategy {
        let allowed = (0..self.names.len())
            .map(|m| self.allowed(m).into_iter().collect())
            .collect();
        FiniteMemoryStrategy {
            alphabet: self.alphabet.clone(),
            names: self.names.clone(),
            initial: self.initial,
            update: self.update.clone(),
            allowed,
        }
    }

    pub fn gamma(&self) -> SafetyAutomaton {
        gamma(self)
    }
}

impl MemoryStrategy for ProductStrategyVector {
    fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.alphabet
    }

    fn memory_count(&self) -> usize {
        self.names.len()
    }

    fn initial(&self) -> usize {
        self.initial
    }

    fn memory_name(&self, m: usize) -> &str {
        &self.names[m]
    }

    fn update(&self, m: usize, a: MoveLetter) -> usize {
        self.update[m][a.index()]
    }

    fn allowed(&self, m: usize) -> Vec<MoveLetter> {
        let sets = &self.allowed_per_player[m];
        self.alphabet
            .letters()
            .filter(|&letter| {
                (0..self.alphabet.player_count())
                    .all(|p| sets[p].contains(&self.alphabet.component(letter, p)))
            })
            .collect()
    }
}

/// Strategy given by an arbitrary pure function on histories. Only bounded
/// queries are possible, and only the unrolling semantics is available: the
/// generated language need not be omega-regular.
pub struct ProgrammaticStrategy {
    alphabet: Arc<MoveAlphabet>,
    function: Arc<dyn Fn(&FiniteWord) -> BTreeSet<MoveLetter> + Send + Sync>,
}

impl ProgrammaticStrategy {
    pub fn new<F>(alphabet: Arc<MoveAlphabet>, function: F) -> ProgrammaticStrategy
    where
        F: Fn(&FiniteWord) -> BTreeSet<MoveLetter> + Send + Sync + 'static,
    {
        ProgrammaticStrategy {
            alphabet,
            function: Arc::new(function),
        }
    }

    pub fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.alphabet
    }

    pub fn moves(&self, w: &FiniteWord) -> BTreeSet<MoveLetter> {
        (self.function)(w)
    }

    /// The depth-`k` unrolling: words whose every step was permitted. This is
    /// a superset of the length-`k` prefixes of the generated language, since
    /// a word is kept even when no infinite continuation survives.
    pub fn enumerate_prefixes(&self, k: usize, limit: usize) -> Result<BTreeSet<FiniteWord>> {
        let mut frontier: Vec<FiniteWord> = vec![FiniteWord::empty()];
        for _ in 0..k {
            let mut next = Vec::new();
            for w in &frontier {
                for a in self.moves(w) {
                    let mut e = w.clone();
                    e.push(a);
                    next.push(e);
                }
                if next.len() > limit {
                    return Err(Error::ExpansionLimit {
                        needed: next.len(),
                        limit,
                    });
                }
            }
            frontier = next;
        }
        Ok(frontier.into_iter().collect())
    }
}

impl std::fmt::Debug for ProgrammaticStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProgrammaticStrategy")
            .field("players", &self.alphabet.player_count())
            .finish()
    }
}

/// The language generated by a finite-memory strategy, as a trim safety
/// automaton: memory states become automaton states and permitted moves
/// become transitions.
pub fn gamma<S: MemoryStrategy>(s: &S) -> SafetyAutomaton {
    let names = (0..s.memory_count())
        .map(|m| s.memory_name(m).to_string())
        .collect();
    let mut builder = AutomatonBuilder::with_names(s.alphabet().clone(), names);
    builder.set_initial(s.initial());
    for m in 0..s.memory_count() {
        for a in s.allowed(m) {
            builder
                .add(m, a, s.update(m, a))
                .expect("memory update is deterministic");
        }
    }
    builder.into_safety()
}

/// The minimal strategy of a language: after history `w` it permits exactly
/// the letters that keep `w` inside the prefixes of the language. Built over
/// the safety closure's states plus one absorbing sink with an empty move
/// set, so it is defined on every history. Its language is the safety closure
/// of the input, which is the input itself whenever that is closed.
pub fn minimal_strategy(language: &DetBuchiAutomaton) -> FiniteMemoryStrategy {
    let alphabet = language.alphabet().clone();
    let closure = language.safety_closure();
    let n = closure.state_count();
    let sink = n;
    let mut names: Vec<String> = (0..n).map(|q| closure.state_name(q).to_string()).collect();
    names.push("sink".to_string());
    let mut update = vec![vec![sink; alphabet.len()]; n + 1];
    let mut allowed: Vec<BTreeSet<MoveLetter>> = vec![BTreeSet::new(); n + 1];
    for (q, a, r) in closure.transitions() {
        update[q][a.index()] = r;
        allowed[q].insert(a);
    }
    let initial = closure.initial().unwrap_or(sink);
    FiniteMemoryStrategy {
        alphabet,
        names,
        initial,
        update,
        allowed,
    }
}

/// Pointwise order on strategies: true when the first permits, after every
/// history, only moves the second also permits. Decided exactly on the
/// reachable pairs of the synchronized memory product (update maps are total,
/// so those pairs cover all histories).
pub fn strategy_leq<S: MemoryStrategy, T: MemoryStrategy>(s: &S, t: &T) -> bool {
    assert_same_alphabet(s.alphabet(), t.alphabet());
    let alphabet = s.alphabet().clone();
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(s.initial(), t.initial())];
    seen.insert((s.initial(), t.initial()));
    while let Some((ms, mt)) = stack.pop() {
        let s_moves: BTreeSet<MoveLetter> = s.allowed(ms).into_iter().collect();
        let t_moves: BTreeSet<MoveLetter> = t.allowed(mt).into_iter().collect();
        if !s_moves.is_subset(&t_moves) {
            return false;
        }
        for a in alphabet.letters() {
            let next = (s.update(ms, a), t.update(mt, a));
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    true
}

/// The length-`k` prefixes of the generated language. Exact for
/// finite-memory strategies: the walk stays inside the trimmed language
/// automaton, so every returned word extends to a member.
pub fn enumerate_prefixes<S: MemoryStrategy>(
    s: &S,
    k: usize,
    limit: usize,
) -> Result<BTreeSet<FiniteWord>> {
    let automaton = gamma(s);
    let mut frontier: Vec<(FiniteWord, usize)> = match automaton.initial() {
        Some(q) => vec![(FiniteWord::empty(), q)],
        None => Vec::new(),
    };
    for _ in 0..k {
        let mut next = Vec::new();
        for (w, q) in &frontier {
            for (a, r) in automaton.available(*q) {
                let mut e = w.clone();
                e.push(a);
                next.push((e, r));
            }
            if next.len() > limit {
                return Err(Error::ExpansionLimit {
                    needed: next.len(),
                    limit,
                });
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(w, _)| w).collect())
}
