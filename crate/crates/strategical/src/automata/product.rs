//! Language containment for deterministic Buchi automata, with lasso
//! counterexamples extracted from the product graph.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::alphabet::{assert_same_alphabet, MoveLetter};
use crate::words::{FiniteWord, LassoWord};

use super::DetBuchiAutomaton;

/// Outcome of a containment check.
#[derive(Debug, Clone)]
pub enum Containment {
    Contained,
    /// A lasso accepted by the left operand and rejected by the right one.
    NotContained(LassoWord),
}

impl Containment {
    pub fn holds(&self) -> bool {
        matches!(self, Containment::Contained)
    }

    pub fn counterexample(&self) -> Option<&LassoWord> {
        match self {
            Containment::Contained => None,
            Containment::NotContained(w) => Some(w),
        }
    }
}

/// Product state: the left run's state paired with the right run's state,
/// where `None` means the right run has already left its domain.
type Pair = (usize, Option<usize>);

struct Product {
    pairs: Vec<Pair>,
    /// edges[p] = (letter, successor index)
    edges: Vec<Vec<(MoveLetter, usize)>>,
}

fn build_product(a: &DetBuchiAutomaton, b: &DetBuchiAutomaton) -> Product {
    let alphabet = a.alphabet().clone();
    let mut index: HashMap<Pair, usize> = HashMap::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut edges: Vec<Vec<(MoveLetter, usize)>> = Vec::new();
    let start: Pair = (
        a.initial().expect("nonvoid left operand"),
        b.initial(),
    );
    index.insert(start, 0);
    pairs.push(start);
    edges.push(Vec::new());
    let mut head = 0;
    while head < pairs.len() {
        let (qa, qb) = pairs[head];
        for letter in alphabet.letters() {
            let Some(ra) = a.transition(qa, letter) else {
                continue;
            };
            let rb = qb.and_then(|q| b.transition(q, letter));
            let key = (ra, rb);
            let target = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                edges.push(Vec::new());
                pairs.len() - 1
            });
            edges[head].push((letter, target));
        }
        head += 1;
    }
    Product { pairs, edges }
}

/// Decides `L(a) <= L(b)`.
///
/// A counterexample is a reachable lasso whose eventual cycle contains a
/// state accepting for `a` and no state accepting for `b` (a right run that
/// has left its domain accepts nothing). For deterministic operands this
/// search is exact.
pub fn contains(a: &DetBuchiAutomaton, b: &DetBuchiAutomaton) -> Containment {
    assert_same_alphabet(a.alphabet(), b.alphabet());
    if a.is_void() {
        return Containment::Contained;
    }
    let product = build_product(a, b);
    let n = product.pairs.len();
    let a_accepting: Vec<bool> = product
        .pairs
        .iter()
        .map(|&(qa, _)| a.is_accepting(qa))
        .collect();
    let b_accepting: Vec<bool> = product
        .pairs
        .iter()
        .map(|&(_, qb)| qb.is_some_and(|q| b.is_accepting(q)))
        .collect();

    // SCCs of the product restricted to states not accepting for b; a cycle
    // there through an a-accepting state spells a counterexample tail.
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    for _ in 0..n {
        graph.add_node(());
    }
    for (p, out) in product.edges.iter().enumerate() {
        if b_accepting[p] {
            continue;
        }
        for &(_, r) in out {
            if !b_accepting[r] {
                graph.add_edge(NodeIndex::new(p), NodeIndex::new(r), ());
            }
        }
    }
    let mut anchor: Vec<bool> = vec![false; n];
    for scc in tarjan_scc(&graph) {
        let scc: Vec<usize> = scc.into_iter().map(|x| x.index()).collect();
        if scc.iter().any(|&p| b_accepting[p]) {
            // Trivial component made of an excluded state.
            continue;
        }
        let nontrivial = scc.len() > 1
            || product.edges[scc[0]]
                .iter()
                .any(|&(_, r)| r == scc[0] && !b_accepting[scc[0]]);
        if !nontrivial {
            continue;
        }
        if !scc.iter().any(|&p| a_accepting[p]) {
            continue;
        }
        // Anchor on the a-accepting states of the component.
        for &p in &scc {
            if a_accepting[p] {
                anchor[p] = true;
            }
        }
    }
    if !anchor.iter().any(|&x| x) {
        return Containment::Contained;
    }

    // Shortest path (over the full product) to an anchor, then the cycle.
    let (stem, target) = bfs_path(&product, &anchor).expect("anchor is reachable");
    let scc_of = scc_membership(&product, &b_accepting);
    let allowed: Vec<bool> = (0..n).map(|p| scc_of[p] == scc_of[target]).collect();
    let cycle =
        cycle_back(&product, target, &allowed).expect("anchor lies on a cycle in its component");
    Containment::NotContained(LassoWord::new(stem, cycle))
}

/// Component id per product state in the b-avoiding subgraph; states that are
/// b-accepting get a unique negative-like id so they never match.
fn scc_membership(product: &Product, excluded: &[bool]) -> Vec<usize> {
    let n = product.pairs.len();
    let mut graph: DiGraph<(), ()> = DiGraph::new();
    for _ in 0..n {
        graph.add_node(());
    }
    for (p, out) in product.edges.iter().enumerate() {
        if excluded[p] {
            continue;
        }
        for &(_, r) in out {
            if !excluded[r] {
                graph.add_edge(NodeIndex::new(p), NodeIndex::new(r), ());
            }
        }
    }
    let mut ids = vec![usize::MAX; n];
    for (i, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        for node in scc {
            ids[node.index()] = i;
        }
    }
    // Give excluded states distinct ids after the real ones.
    let mut next = ids.iter().copied().filter(|&i| i != usize::MAX).max().map_or(0, |m| m + 1);
    for (p, id) in ids.iter_mut().enumerate() {
        if excluded[p] || *id == usize::MAX {
            *id = next;
            next += 1;
        }
    }
    ids
}

fn bfs_path(product: &Product, targets: &[bool]) -> Option<(FiniteWord, usize)> {
    let mut prev: Vec<Option<(usize, MoveLetter)>> = vec![None; product.pairs.len()];
    let mut seen = vec![false; product.pairs.len()];
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0usize);
    while let Some(p) = queue.pop_front() {
        if targets[p] {
            let mut letters = Vec::new();
            let mut cur = p;
            while let Some((prv, a)) = prev[cur] {
                letters.push(a);
                cur = prv;
            }
            letters.reverse();
            return Some((FiniteWord::new(letters), p));
        }
        for &(a, r) in &product.edges[p] {
            if !seen[r] {
                seen[r] = true;
                prev[r] = Some((p, a));
                queue.push_back(r);
            }
        }
    }
    None
}

fn cycle_back(product: &Product, start: usize, allowed: &[bool]) -> Option<FiniteWord> {
    let mut prev: Vec<Option<(usize, MoveLetter)>> = vec![None; product.pairs.len()];
    let mut seen = vec![false; product.pairs.len()];
    let mut queue = VecDeque::new();
    for &(a, r) in &product.edges[start] {
        if r == start {
            return Some(FiniteWord::new(vec![a]));
        }
        if allowed[r] && !seen[r] {
            seen[r] = true;
            prev[r] = Some((start, a));
            queue.push_back(r);
        }
    }
    while let Some(p) = queue.pop_front() {
        for &(a, r) in &product.edges[p] {
            if r == start {
                let mut letters = vec![a];
                let mut cur = p;
                while let Some((prv, b)) = prev[cur] {
                    letters.push(b);
                    cur = prv;
                }
                letters.reverse();
                return Some(FiniteWord::new(letters));
            }
            if allowed[r] && !seen[r] {
                seen[r] = true;
                prev[r] = Some((p, a));
                queue.push_back(r);
            }
        }
    }
    None
}

/// Language equivalence by mutual containment.
pub fn equivalent(a: &DetBuchiAutomaton, b: &DetBuchiAutomaton) -> bool {
    contains(a, b).holds() && contains(b, a).holds()
}
