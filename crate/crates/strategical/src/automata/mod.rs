//! Finite representations of omega-languages.
//!
//! Two acceptance regimes are supported: deterministic Buchi automata for
//! omega-regular languages, and safety automata (trim, partial, deterministic,
//! no acceptance set) whose infinite runs define the closed languages. A
//! [`Dfa`] over finite words carries the prefix languages in between.
//!
//! All automata are immutable after construction. Constructions renumber
//! states in breadth-first order from the initial state, so equal inputs give
//! byte-identical outputs.

mod product;

pub use product::{contains, equivalent, Containment};

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::sync::Arc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::alphabet::{assert_same_alphabet, MoveAlphabet, MoveLetter};
use crate::error::{Error, Result};
use crate::words::{FiniteWord, LassoWord};

/// Shared deterministic transition structure.
///
/// The empty (void) automaton has no states at all; otherwise `initial` is a
/// valid state index and `table[q][a]` is the successor of `q` on letter `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Core {
    alphabet: Arc<MoveAlphabet>,
    names: Vec<String>,
    initial: usize,
    table: Vec<Vec<Option<usize>>>,
}

impl Core {
    fn void(alphabet: Arc<MoveAlphabet>) -> Core {
        Core {
            alphabet,
            names: Vec::new(),
            initial: 0,
            table: Vec::new(),
        }
    }

    fn is_void(&self) -> bool {
        self.names.is_empty()
    }

    fn state_count(&self) -> usize {
        self.names.len()
    }

    fn next(&self, q: usize, a: MoveLetter) -> Option<usize> {
        self.table.get(q)?.get(a.index()).copied().flatten()
    }

    /// Runs a finite word from `q`; `None` if the word leaves the domain.
    fn run(&self, mut q: usize, w: &FiniteWord) -> Option<usize> {
        for &a in w.letters() {
            q = self.next(q, a)?;
        }
        Some(q)
    }

    fn successors(&self, q: usize) -> impl Iterator<Item = (MoveLetter, usize)> + '_ {
        self.table[q]
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|r| (MoveLetter(i as u32), r)))
    }

    /// Restricts to the kept states reachable from the initial one and
    /// renumbers them in breadth-first order (letters in index order).
    /// Returns the new core and the old-to-new state map.
    fn restrict(&self, keep: &[bool]) -> (Core, Vec<Option<usize>>) {
        let mut map: Vec<Option<usize>> = vec![None; self.state_count()];
        if self.is_void() || !keep[self.initial] {
            return (Core::void(self.alphabet.clone()), map);
        }
        let mut order: Vec<usize> = Vec::new();
        map[self.initial] = Some(0);
        order.push(self.initial);
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            for (_, r) in self.successors(q) {
                if keep[r] && map[r].is_none() {
                    map[r] = Some(order.len());
                    order.push(r);
                }
            }
        }
        let names = order.iter().map(|&q| self.names[q].clone()).collect();
        let table = order
            .iter()
            .map(|&q| {
                self.table[q]
                    .iter()
                    .map(|t| t.and_then(|r| if keep[r] { map[r] } else { None }))
                    .collect()
            })
            .collect();
        let core = Core {
            alphabet: self.alphabet.clone(),
            names,
            initial: 0,
            table,
        };
        (core, map)
    }

    /// Strongly connected components of the transition graph.
    fn sccs(&self) -> Vec<Vec<usize>> {
        let mut graph: DiGraph<(), ()> = DiGraph::new();
        for _ in 0..self.state_count() {
            graph.add_node(());
        }
        for q in 0..self.state_count() {
            for (_, r) in self.successors(q) {
                graph.add_edge(NodeIndex::new(q), NodeIndex::new(r), ());
            }
        }
        tarjan_scc(&graph)
            .into_iter()
            .map(|c| c.into_iter().map(|n| n.index()).collect())
            .collect()
    }

    /// States from which some state in `targets` is reachable (including the
    /// targets themselves).
    fn coreachable(&self, targets: &[bool]) -> Vec<bool> {
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); self.state_count()];
        for q in 0..self.state_count() {
            for (_, r) in self.successors(q) {
                reverse[r].push(q);
            }
        }
        let mut seen: Vec<bool> = targets.to_vec();
        let mut stack: Vec<usize> = (0..self.state_count()).filter(|&q| seen[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &reverse[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Shortest path of letters from the initial state to any target state;
    /// also returns the target reached. Targets must be reachable.
    fn path_to(&self, targets: &[bool]) -> Option<(FiniteWord, usize)> {
        if self.is_void() {
            return None;
        }
        let mut prev: Vec<Option<(usize, MoveLetter)>> = vec![None; self.state_count()];
        let mut seen = vec![false; self.state_count()];
        let mut queue = std::collections::VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            if targets[q] {
                let mut letters = Vec::new();
                let mut cur = q;
                while let Some((p, a)) = prev[cur] {
                    letters.push(a);
                    cur = p;
                }
                letters.reverse();
                return Some((FiniteWord::new(letters), q));
            }
            for (a, r) in self.successors(q) {
                if !seen[r] {
                    seen[r] = true;
                    prev[r] = Some((q, a));
                    queue.push_back(r);
                }
            }
        }
        None
    }

    /// Shortest nonempty cycle through `q` whose intermediate states stay
    /// inside `allowed`.
    fn cycle_through(&self, q: usize, allowed: &[bool]) -> Option<FiniteWord> {
        let mut prev: Vec<Option<(usize, MoveLetter)>> = vec![None; self.state_count()];
        let mut seen = vec![false; self.state_count()];
        let mut queue = std::collections::VecDeque::new();
        for (a, r) in self.successors(q) {
            if r == q {
                return Some(FiniteWord::new(vec![a]));
            }
            if allowed[r] && !seen[r] {
                seen[r] = true;
                prev[r] = Some((q, a));
                queue.push_back(r);
            }
        }
        while let Some(s) = queue.pop_front() {
            for (a, r) in self.successors(s) {
                if r == q {
                    // Path q -> ... -> s recovered backwards, then edge a.
                    let mut letters = vec![a];
                    let mut cur = s;
                    while let Some((p, b)) = prev[cur] {
                        letters.push(b);
                        cur = p;
                    }
                    letters.reverse();
                    return Some(FiniteWord::new(letters));
                }
                if allowed[r] && !seen[r] {
                    seen[r] = true;
                    prev[r] = Some((s, a));
                    queue.push_back(r);
                }
            }
        }
        None
    }
}

/// Builder for deterministic automata of any of the three kinds.
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    alphabet: Arc<MoveAlphabet>,
    names: Vec<String>,
    initial: usize,
    table: Vec<Vec<Option<usize>>>,
}

impl AutomatonBuilder {
    /// Builder with `state_count` anonymous states `q0, q1, ...`; state 0 is
    /// initial unless changed.
    pub fn new(alphabet: Arc<MoveAlphabet>, state_count: usize) -> AutomatonBuilder {
        let names = (0..state_count).map(|i| format!("q{i}")).collect();
        AutomatonBuilder::with_names(alphabet, names)
    }

    pub fn with_names(alphabet: Arc<MoveAlphabet>, names: Vec<String>) -> AutomatonBuilder {
        let table = vec![vec![None; alphabet.len()]; names.len()];
        AutomatonBuilder {
            alphabet,
            names,
            initial: 0,
            table,
        }
    }

    pub fn set_initial(&mut self, q: usize) -> &mut Self {
        assert!(q < self.names.len());
        self.initial = q;
        self
    }

    /// Adds the transition `q --letter--> r`. Redefining a pair with a
    /// different target is rejected (determinism).
    pub fn add(&mut self, q: usize, letter: MoveLetter, r: usize) -> Result<&mut Self> {
        assert!(q < self.names.len() && r < self.names.len());
        assert!(self.alphabet.contains(letter));
        let slot = &mut self.table[q][letter.index()];
        match *slot {
            Some(existing) if existing != r => Err(Error::InvalidParameter(format!(
                "nondeterministic transition from `{}` on `{}`",
                self.names[q],
                self.alphabet.display_letter(letter)
            ))),
            _ => {
                *slot = Some(r);
                Ok(self)
            }
        }
    }

    fn core(self) -> Core {
        Core {
            alphabet: self.alphabet,
            names: self.names,
            initial: self.initial,
            table: self.table,
        }
    }

    /// Finishes as a safety automaton; the raw graph is trimmed.
    pub fn into_safety(self) -> SafetyAutomaton {
        SafetyAutomaton::trim(self.core())
    }

    /// Finishes as a deterministic Buchi automaton with the given accepting
    /// states; unreachable states are dropped.
    pub fn into_buchi(self, accepting: &[usize]) -> DetBuchiAutomaton {
        let mut flags = vec![false; self.names.len()];
        for &q in accepting {
            flags[q] = true;
        }
        DetBuchiAutomaton::from_core(self.core(), flags)
    }

    /// Finishes as a DFA over finite words with the given accepting states.
    pub fn into_dfa(self, accepting: &[usize]) -> Dfa {
        let mut flags = vec![false; self.names.len()];
        for &q in accepting {
            flags[q] = true;
        }
        let core = self.core();
        let keep = vec![true; core.state_count()];
        let (core, map) = core.restrict(&keep);
        let flags = remap_flags(&flags, &map, core.state_count());
        Dfa { core, accepting: flags }
    }
}

fn remap_flags(flags: &[bool], map: &[Option<usize>], new_len: usize) -> Vec<bool> {
    let mut out = vec![false; new_len];
    for (old, &m) in map.iter().enumerate() {
        if let Some(new) = m {
            out[new] = flags[old];
        }
    }
    out
}

/// Deterministic automaton over finite words, used for prefix languages and
/// as the operand of the arrow operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    core: Core,
    accepting: Vec<bool>,
}

impl Dfa {
    pub fn empty(alphabet: Arc<MoveAlphabet>) -> Dfa {
        Dfa {
            core: Core::void(alphabet),
            accepting: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.core.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.core.state_count()
    }

    pub fn is_void(&self) -> bool {
        self.core.is_void()
    }

    pub fn accepts_finite(&self, w: &FiniteWord) -> bool {
        if self.core.is_void() {
            return false;
        }
        match self.core.run(self.core.initial, w) {
            Some(q) => self.accepting[q],
            None => false,
        }
    }

    /// All accepted words of length at most `max_len`, in length-then-letter
    /// order. Intended for small test instances.
    pub fn accepted_words_up_to(&self, max_len: usize) -> Vec<FiniteWord> {
        let mut out = Vec::new();
        if self.core.is_void() {
            return out;
        }
        let mut frontier: Vec<(FiniteWord, usize)> =
            vec![(FiniteWord::empty(), self.core.initial)];
        for len in 0..=max_len {
            for (w, q) in &frontier {
                if self.accepting[*q] {
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, q) in &frontier {
                for (a, r) in self.core.successors(*q) {
                    let mut extended = w.clone();
                    extended.push(a);
                    next.push((extended, r));
                }
            }
            frontier = next;
        }
        out
    }

    /// The arrow operator: the Buchi automaton accepting exactly the infinite
    /// words with infinitely many prefixes in this DFA's language. Built by
    /// completing with a rejecting sink and reading the accepting set as a
    /// Buchi condition.
    pub fn arrow(&self) -> DetBuchiAutomaton {
        if self.core.is_void() {
            return DetBuchiAutomaton::empty(self.core.alphabet.clone());
        }
        let n = self.core.state_count();
        let needs_sink = self
            .core
            .table
            .iter()
            .any(|row| row.iter().any(Option::is_none));
        let mut names = self.core.names.clone();
        let mut table = self.core.table.clone();
        let mut accepting = self.accepting.clone();
        if needs_sink {
            let sink = n;
            names.push("reject".to_string());
            for row in &mut table {
                for slot in row.iter_mut() {
                    if slot.is_none() {
                        *slot = Some(sink);
                    }
                }
            }
            table.push(vec![Some(sink); self.core.alphabet.len()]);
            accepting.push(false);
        }
        let core = Core {
            alphabet: self.core.alphabet.clone(),
            names,
            initial: self.core.initial,
            table,
        };
        DetBuchiAutomaton::from_core(core, accepting)
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.core.names[q]
    }

    pub fn initial(&self) -> Option<usize> {
        (!self.core.is_void()).then_some(self.core.initial)
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, MoveLetter, usize)> + '_ {
        (0..self.state_count()).flat_map(move |q| {
            self.core.successors(q).map(move |(a, r)| (q, a, r))
        })
    }
}

/// Deterministic Buchi automaton: a run is accepting when it stays inside the
/// transition domain and visits the accepting set infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetBuchiAutomaton {
    core: Core,
    accepting: Vec<bool>,
}

impl DetBuchiAutomaton {
    pub fn empty(alphabet: Arc<MoveAlphabet>) -> DetBuchiAutomaton {
        DetBuchiAutomaton {
            core: Core::void(alphabet),
            accepting: Vec::new(),
        }
    }

    /// Restricts to reachable states and wraps up.
    pub(crate) fn from_core(core: Core, accepting: Vec<bool>) -> DetBuchiAutomaton {
        if core.is_void() {
            let alphabet = core.alphabet.clone();
            return DetBuchiAutomaton::empty(alphabet);
        }
        let keep = vec![true; core.state_count()];
        let (core, map) = core.restrict(&keep);
        let accepting = remap_flags(&accepting, &map, core.state_count());
        DetBuchiAutomaton { core, accepting }
    }

    pub fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.core.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.core.state_count()
    }

    pub fn is_void(&self) -> bool {
        self.core.is_void()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.core.names[q]
    }

    pub fn initial(&self) -> Option<usize> {
        (!self.core.is_void()).then_some(self.core.initial)
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.state_count()).filter(|&q| self.accepting[q]).collect()
    }

    pub fn transition(&self, q: usize, a: MoveLetter) -> Option<usize> {
        self.core.next(q, a)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, MoveLetter, usize)> + '_ {
        (0..self.state_count()).flat_map(move |q| {
            self.core.successors(q).map(move |(a, r)| (q, a, r))
        })
    }

    /// Membership of an ultimately periodic word: the run is walked until the
    /// (lasso phase, state) pair repeats; the word is accepted when that
    /// eventual loop contains an accepting state.
    pub fn accepts(&self, h: &LassoWord) -> bool {
        match eventual_loop(&self.core, h) {
            Some(loop_states) => loop_states.iter().any(|&q| self.accepting[q]),
            None => false,
        }
    }

    /// States from which some run visits the accepting set infinitely often,
    /// i.e. states that can reach a cycle through an accepting state.
    fn alive(&self) -> Vec<bool> {
        let n = self.state_count();
        let mut base = vec![false; n];
        for scc in self.core.sccs() {
            let nontrivial = scc.len() > 1
                || self
                    .core
                    .successors(scc[0])
                    .any(|(_, r)| r == scc[0]);
            if nontrivial && scc.iter().any(|&q| self.accepting[q]) {
                for &q in &scc {
                    base[q] = true;
                }
            }
        }
        self.core.coreachable(&base)
    }

    /// The DFA of all prefixes of members: the alive states with every state
    /// accepting. `Pref` of the empty language is empty (it has no words, so
    /// not even the empty word qualifies).
    pub fn pref_automaton(&self) -> Dfa {
        if self.core.is_void() {
            return Dfa::empty(self.core.alphabet.clone());
        }
        let (core, _) = self.core.restrict(&self.alive());
        let n = core.state_count();
        Dfa {
            core,
            accepting: vec![true; n],
        }
    }

    /// The smallest closed language containing this one, as a trim safety
    /// automaton over the alive states.
    pub fn safety_closure(&self) -> SafetyAutomaton {
        if self.core.is_void() {
            return SafetyAutomaton::empty(self.core.alphabet.clone());
        }
        let (core, _) = self.core.restrict(&self.alive());
        SafetyAutomaton { core }
    }

    /// The left quotient by `w`: the automaton re-rooted at the state reached
    /// by `w`, or the empty automaton when `w` leaves the domain.
    pub fn left_quotient(&self, w: &FiniteWord) -> DetBuchiAutomaton {
        if self.core.is_void() {
            return DetBuchiAutomaton::empty(self.core.alphabet.clone());
        }
        match self.core.run(self.core.initial, w) {
            None => DetBuchiAutomaton::empty(self.core.alphabet.clone()),
            Some(q) => {
                let mut core = self.core.clone();
                core.initial = q;
                DetBuchiAutomaton::from_core(core, self.accepting.clone())
            }
        }
    }

    /// A member of the language, or `None` when the language is empty.
    pub fn witness(&self) -> Option<LassoWord> {
        if self.core.is_void() {
            return None;
        }
        let alive = self.alive();
        if !alive[self.core.initial] {
            return None;
        }
        // Nearest accepting state lying on a cycle within the alive part.
        let on_good_cycle: Vec<bool> = (0..self.state_count())
            .map(|q| self.accepting[q] && alive[q] && self.core.cycle_through(q, &alive).is_some())
            .collect();
        let (stem, q) = self.core.path_to(&on_good_cycle)?;
        let cycle = self.core.cycle_through(q, &alive)?;
        Some(LassoWord::new(stem, cycle))
    }

    /// Language intersection. At most one operand may have a nontrivial
    /// acceptance set (one that is not all of its states); two genuinely
    /// Buchi-constrained operands are out of scope.
    pub fn intersect(&self, other: &DetBuchiAutomaton) -> Result<DetBuchiAutomaton> {
        assert_same_alphabet(self.alphabet(), other.alphabet());
        let self_trivial = self.accepting.iter().all(|&b| b);
        let other_trivial = other.accepting.iter().all(|&b| b);
        if !self_trivial && !other_trivial {
            return Err(Error::UnsupportedBuchiIntersection);
        }
        if self.core.is_void() || other.core.is_void() {
            return Ok(DetBuchiAutomaton::empty(self.core.alphabet.clone()));
        }
        let (core, pairs) = product_core(&self.core, &other.core);
        let accepting = pairs
            .iter()
            .map(|&(qa, qb)| {
                if !self_trivial {
                    self.accepting[qa]
                } else if !other_trivial {
                    other.accepting[qb]
                } else {
                    true
                }
            })
            .collect();
        Ok(DetBuchiAutomaton::from_core(core, accepting))
    }

    /// True exactly when the language is closed, equivalently when it is
    /// generated by some strategy. Decided through the safety closure and
    /// cross-checked against the arrow-of-prefixes route.
    pub fn is_strategical(&self) -> bool {
        let via_closure = contains(&self.safety_closure().to_buchi(), self).holds();
        let arrow_route = self.pref_automaton().arrow();
        let via_arrow = equivalent(&arrow_route, self);
        assert_eq!(
            via_closure, via_arrow,
            "closure and arrow routes must agree"
        );
        via_closure
    }
}

/// Trim partial deterministic automaton; every infinite path from the initial
/// state spells a member, so the language is closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyAutomaton {
    core: Core,
}

impl SafetyAutomaton {
    pub fn empty(alphabet: Arc<MoveAlphabet>) -> SafetyAutomaton {
        SafetyAutomaton {
            core: Core::void(alphabet),
        }
    }

    /// Trims a raw deterministic graph: states without outgoing transitions
    /// are removed iteratively, then unreachable states are dropped. The
    /// omega-language is preserved; the result may be empty.
    pub(crate) fn trim(core: Core) -> SafetyAutomaton {
        if core.is_void() {
            return SafetyAutomaton { core };
        }
        let n = core.state_count();
        let mut keep = vec![true; n];
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                if keep[q] && !core.successors(q).any(|(_, r)| keep[r]) {
                    keep[q] = false;
                    changed = true;
                }
            }
        }
        let (core, _) = core.restrict(&keep);
        SafetyAutomaton { core }
    }

    pub fn alphabet(&self) -> &Arc<MoveAlphabet> {
        &self.core.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.core.state_count()
    }

    pub fn is_void(&self) -> bool {
        self.core.is_void()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.core.names[q]
    }

    pub fn initial(&self) -> Option<usize> {
        (!self.core.is_void()).then_some(self.core.initial)
    }

    pub fn transition(&self, q: usize, a: MoveLetter) -> Option<usize> {
        self.core.next(q, a)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, MoveLetter, usize)> + '_ {
        (0..self.state_count()).flat_map(move |q| {
            self.core.successors(q).map(move |(a, r)| (q, a, r))
        })
    }

    /// Letters with a transition defined at `q`.
    pub fn available(&self, q: usize) -> impl Iterator<Item = (MoveLetter, usize)> + '_ {
        self.core.successors(q)
    }

    /// Runs a finite word from the initial state.
    pub fn run(&self, w: &FiniteWord) -> Option<usize> {
        if self.core.is_void() {
            return None;
        }
        self.core.run(self.core.initial, w)
    }

    pub fn accepts(&self, h: &LassoWord) -> bool {
        eventual_loop(&self.core, h).is_some()
    }

    /// The same structure read as a Buchi automaton with every state
    /// accepting.
    pub fn to_buchi(&self) -> DetBuchiAutomaton {
        DetBuchiAutomaton {
            core: self.core.clone(),
            accepting: vec![true; self.core.state_count()],
        }
    }

    /// Product construction; the result is trimmed.
    pub fn intersect(&self, other: &SafetyAutomaton) -> SafetyAutomaton {
        assert_same_alphabet(self.alphabet(), other.alphabet());
        if self.core.is_void() || other.core.is_void() {
            return SafetyAutomaton::empty(self.core.alphabet.clone());
        }
        let (core, _) = product_core(&self.core, &other.core);
        SafetyAutomaton::trim(core)
    }

    /// A member of the language, or `None` when the automaton is empty. The
    /// witness follows least-index letters until a state repeats.
    pub fn witness(&self) -> Option<LassoWord> {
        if self.core.is_void() {
            return None;
        }
        let mut path: Vec<MoveLetter> = Vec::new();
        let mut visited_at: HashMap<usize, usize> = HashMap::new();
        let mut q = self.core.initial;
        loop {
            if let Some(&j) = visited_at.get(&q) {
                let stem = FiniteWord::new(path[..j].to_vec());
                let cycle = FiniteWord::new(path[j..].to_vec());
                return Some(LassoWord::new(stem, cycle));
            }
            visited_at.insert(q, path.len());
            let (a, r) = self
                .core
                .successors(q)
                .next()
                .expect("trim automaton state has a successor");
            path.push(a);
            q = r;
        }
    }

    /// All distinct ultimately periodic members realizable by a path of at
    /// most `bound` letters that closes a state cycle, ordered by total
    /// length then lexicographically. Used by the bounded Nash search.
    pub fn enumerate_lassos(&self, bound: usize) -> Vec<LassoWord> {
        let mut found: BTreeSet<(FiniteWord, FiniteWord)> = BTreeSet::new();
        if self.core.is_void() {
            return Vec::new();
        }
        // Depth-first over all paths of length <= bound.
        let mut letters: Vec<MoveLetter> = Vec::new();
        let mut states: Vec<usize> = vec![self.core.initial];
        fn successors_of(core: &Core, q: usize) -> Vec<(MoveLetter, usize)> {
            core.successors(q).collect()
        }
        let mut stack: Vec<Vec<(MoveLetter, usize)>> =
            vec![successors_of(&self.core, self.core.initial)];
        while let Some(options) = stack.last_mut() {
            match options.pop() {
                None => {
                    stack.pop();
                    states.pop();
                    letters.pop();
                }
                Some((a, r)) => {
                    letters.push(a);
                    states.push(r);
                    for (j, &s) in states[..states.len() - 1].iter().enumerate() {
                        if s == r {
                            let stem = FiniteWord::new(letters[..j].to_vec());
                            let cycle = FiniteWord::new(letters[j..].to_vec());
                            let norm = LassoWord::new(stem, cycle).normalize();
                            found.insert((norm.stem().clone(), norm.cycle().clone()));
                        }
                    }
                    if letters.len() < bound {
                        stack.push(successors_of(&self.core, r));
                    } else {
                        letters.pop();
                        states.pop();
                    }
                }
            }
        }
        let mut out: Vec<LassoWord> = found
            .into_iter()
            .map(|(stem, cycle)| LassoWord::new(stem, cycle))
            .collect();
        out.sort_by_key(|l| {
            (
                l.stem().len() + l.cycle().len(),
                l.stem().clone(),
                l.cycle().clone(),
            )
        });
        out
    }
}

/// Walks a lasso through a deterministic core until the (phase, state) pair
/// repeats. Returns the states visited in the eventual loop, or `None` if the
/// run leaves the transition domain.
fn eventual_loop(core: &Core, h: &LassoWord) -> Option<Vec<usize>> {
    if core.is_void() {
        return None;
    }
    let stem_len = h.stem().len();
    let cycle_len = h.cycle().len();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut trace: Vec<usize> = Vec::new();
    let mut q = core.initial;
    let mut t = 0usize;
    loop {
        let phase = if t < stem_len {
            t
        } else {
            stem_len + (t - stem_len) % cycle_len
        };
        if let Some(&t0) = seen.get(&(phase, q)) {
            return Some(trace[t0..].to_vec());
        }
        seen.insert((phase, q), t);
        trace.push(q);
        q = core.next(q, h.letter_at(t))?;
        t += 1;
    }
}

/// Synchronized product of two cores over pairs where both transitions are
/// defined, restricted to reachable pairs. Returns the core and, per new
/// state, the originating pair.
fn product_core(a: &Core, b: &Core) -> (Core, Vec<(usize, usize)>) {
    let alphabet = a.alphabet.clone();
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut table: Vec<Vec<Option<usize>>> = Vec::new();
    let start = (a.initial, b.initial);
    index.insert(start, 0);
    pairs.push(start);
    table.push(vec![None; alphabet.len()]);
    let mut head = 0;
    while head < pairs.len() {
        let (qa, qb) = pairs[head];
        for letter in alphabet.letters() {
            if let (Some(ra), Some(rb)) = (a.next(qa, letter), b.next(qb, letter)) {
                let key = (ra, rb);
                let target = *index.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    table.push(vec![None; alphabet.len()]);
                    pairs.len() - 1
                });
                table[head][letter.index()] = Some(target);
            }
        }
        head += 1;
    }
    let names = pairs
        .iter()
        .map(|&(qa, qb)| format!("{}*{}", a.names[qa], b.names[qb]))
        .collect();
    (
        Core {
            alphabet,
            names,
            initial: 0,
            table,
        },
        pairs,
    )
}
