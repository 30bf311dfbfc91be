//! Textual formats for alphabets, words, automata, strategies and games.
//!
//! All formats are line based; `#` starts a comment and blank lines are
//! ignored. Keyword lines look like `key: value`, transition lines like
//! `state , letter -> state` with whitespace between tokens. Letters are
//! comma-joined action names, one per player; single-player alphabets may
//! omit the comma. Every printer in this module emits text that re-parses to
//! an equivalent object.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use crate::alphabet::{MoveAlphabet, MoveLetter};
use crate::automata::{AutomatonBuilder, DetBuchiAutomaton, Dfa, SafetyAutomaton};
use crate::error::{Error, ParseError, Result};
use crate::game::{DiscountFactor, Game};
use crate::strategy::{FiniteMemoryStrategy, MemoryStrategy, ProductStrategyVector};
use crate::words::{FiniteWord, LassoWord};

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError::new(line, column, message))
}

/// Parses `c d | c d`: per-player action lists separated by `|`.
pub fn parse_alphabet(text: &str) -> Result<Arc<MoveAlphabet>> {
    let lists: Vec<Vec<String>> = text
        .split('|')
        .map(|part| part.split_whitespace().map(str::to_string).collect())
        .collect();
    MoveAlphabet::new(lists)
}

pub fn display_alphabet(alpha: &MoveAlphabet) -> String {
    (0..alpha.player_count())
        .map(|p| alpha.action_names(p).join(" "))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Parses one letter token: comma-joined action names, or a bare action name
/// for single-player alphabets.
pub fn parse_letter(alpha: &MoveAlphabet, token: &str) -> Result<MoveLetter> {
    let parts: Vec<&str> = token.split(',').collect();
    if parts.len() != alpha.player_count() {
        return Err(Error::InvalidParameter(format!(
            "letter `{token}` has {} components, expected {}",
            parts.len(),
            alpha.player_count()
        )));
    }
    let mut comps = Vec::with_capacity(parts.len());
    for (p, name) in parts.iter().enumerate() {
        match alpha.action_by_name(p, name) {
            Some(a) => comps.push(a),
            None => {
                return Err(Error::InvalidParameter(format!(
                    "unknown action `{name}` for player {}",
                    p + 1
                )))
            }
        }
    }
    Ok(alpha.letter(&comps))
}

/// Parses a whitespace-separated sequence of letters; the empty string is the
/// empty word.
pub fn parse_word(alpha: &MoveAlphabet, text: &str) -> Result<FiniteWord> {
    text.split_whitespace()
        .map(|t| parse_letter(alpha, t))
        .collect()
}

/// Parses lasso syntax: stem letters, then the cycle in parentheses, e.g.
/// `c,c c,d ( d,d )`.
pub fn parse_lasso(alpha: &MoveAlphabet, text: &str) -> Result<LassoWord> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let open = tokens
        .iter()
        .position(|&t| t == "(")
        .ok_or_else(|| Error::InvalidParameter("lasso needs a cycle in parentheses".into()))?;
    let close = tokens.len().checked_sub(1).filter(|&i| tokens[i] == ")");
    let close = match close {
        Some(i) if i > open => i,
        _ => {
            return Err(Error::InvalidParameter(
                "the cycle parenthesis must close at the end of the lasso".into(),
            ))
        }
    };
    let stem: FiniteWord = tokens[..open]
        .iter()
        .map(|t| parse_letter(alpha, t))
        .collect::<Result<_>>()?;
    let cycle: FiniteWord = tokens[open + 1..close]
        .iter()
        .map(|t| parse_letter(alpha, t))
        .collect::<Result<_>>()?;
    if cycle.is_empty() {
        return Err(Error::InvalidParameter("lasso cycle must be nonempty".into()));
    }
    Ok(LassoWord::new(stem, cycle))
}

pub fn display_word(alpha: &MoveAlphabet, w: &FiniteWord) -> String {
    w.letters()
        .iter()
        .map(|&l| alpha.display_letter(l))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn display_lasso(alpha: &MoveAlphabet, h: &LassoWord) -> String {
    let mut out = String::new();
    if !h.stem().is_empty() {
        out.push_str(&display_word(alpha, h.stem()));
        out.push(' ');
    }
    out.push_str("( ");
    out.push_str(&display_word(alpha, h.cycle()));
    out.push_str(" )");
    out
}

/// A parsed line: keyword line, transition line, or strategy move-set line.
enum Line<'a> {
    Keyword {
        line: usize,
        key: &'a str,
        value: &'a str,
    },
    Transition {
        line: usize,
        src: &'a str,
        letter: &'a str,
        dst: &'a str,
    },
    /// `allow state : ...` or `moves state : ...`
    MoveSet {
        line: usize,
        kind: &'a str,
        state: &'a str,
        value: &'a str,
    },
}

fn scan_lines(text: &str) -> Result<Vec<Line<'_>>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(arrow) = content.find("->") {
            let (lhs, rhs) = content.split_at(arrow);
            let dst = rhs[2..].trim();
            let lhs_tokens: Vec<&str> = lhs.split_whitespace().collect();
            if lhs_tokens.len() != 3 || lhs_tokens[1] != "," || dst.is_empty() {
                return Err(err(
                    line,
                    1,
                    "transition lines look like `state , letter -> state`",
                ));
            }
            if dst.split_whitespace().count() != 1 {
                return Err(err(line, arrow + 3, "one target state expected"));
            }
            out.push(Line::Transition {
                line,
                src: lhs_tokens[0],
                letter: lhs_tokens[2],
                dst,
            });
            continue;
        }
        if content.starts_with("allow ") || content.starts_with("moves ") {
            let kind = &content[..5];
            let rest = content[5..].trim();
            let Some(colon) = rest.find(':') else {
                return Err(err(line, 1, format!("`{kind}` lines need a `:`")));
            };
            let state = rest[..colon].trim();
            if state.split_whitespace().count() != 1 {
                return Err(err(line, 1, "exactly one state name expected"));
            }
            out.push(Line::MoveSet {
                line,
                kind,
                state,
                value: rest[colon + 1..].trim(),
            });
            continue;
        }
        if let Some(colon) = content.find(':') {
            out.push(Line::Keyword {
                line,
                key: content[..colon].trim(),
                value: content[colon + 1..].trim(),
            });
            continue;
        }
        return Err(err(line, 1, format!("cannot parse `{content}`")));
    }
    Ok(out)
}

fn validate_name(line: usize, name: &str) -> Result<()> {
    if name.is_empty()
        || name == "_"
        || name == "-"
        || name
            .chars()
            .any(|c| c.is_whitespace() || [',', '(', ')', '|', ':', '#'].contains(&c))
    {
        return Err(err(line, 1, format!("invalid name `{name}`")));
    }
    Ok(())
}

struct NameTable {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl NameTable {
    fn parse(line: usize, value: &str) -> Result<NameTable> {
        let mut names = Vec::new();
        let mut index = BTreeMap::new();
        for token in value.split_whitespace() {
            validate_name(line, token)?;
            if index.insert(token.to_string(), names.len()).is_some() {
                return Err(err(line, 1, format!("duplicate state `{token}`")));
            }
            names.push(token.to_string());
        }
        if names.is_empty() {
            return Err(err(line, 1, "at least one state is required"));
        }
        Ok(NameTable { names, index })
    }

    fn lookup(&self, line: usize, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| err(line, 1, format!("unknown state `{name}`")))
    }
}

/// A parsed automaton file. The `accepting:` line distinguishes a Buchi (or
/// finite-word) automaton from a safety one; conversion decides the reading.
#[derive(Debug, Clone)]
pub struct AutomatonFile {
    pub alphabet: Arc<MoveAlphabet>,
    pub names: Vec<String>,
    pub initial: usize,
    pub transitions: Vec<(usize, MoveLetter, usize)>,
    pub accepting: Option<Vec<usize>>,
}

impl AutomatonFile {
    pub fn parse(text: &str) -> Result<AutomatonFile> {
        let lines = scan_lines(text)?;
        let mut alphabet: Option<(usize, Arc<MoveAlphabet>)> = None;
        let mut states: Option<(usize, NameTable)> = None;
        let mut initial: Option<(usize, String)> = None;
        let mut accepting: Option<(usize, String)> = None;
        let mut raw_transitions: Vec<(usize, String, String, String)> = Vec::new();
        for entry in &lines {
            match entry {
                Line::Keyword { line, key, value } => match *key {
                    "alphabet" => {
                        let alpha = parse_alphabet(value)
                            .map_err(|e| err(*line, 1, e.to_string()))?;
                        alphabet = Some((*line, alpha));
                    }
                    "states" => states = Some((*line, NameTable::parse(*line, value)?)),
                    "initial" => initial = Some((*line, value.to_string())),
                    "accepting" => accepting = Some((*line, value.to_string())),
                    other => return Err(err(*line, 1, format!("unknown keyword `{other}`"))),
                },
                Line::Transition {
                    line,
                    src,
                    letter,
                    dst,
                } => raw_transitions.push((
                    *line,
                    src.to_string(),
                    letter.to_string(),
                    dst.to_string(),
                )),
                Line::MoveSet { line, .. } => {
                    return Err(err(*line, 1, "move-set lines belong to strategy files"))
                }
            }
        }
        let (_, alphabet) =
            alphabet.ok_or_else(|| err(1, 1, "missing `alphabet:` declaration"))?;
        let (_, states) = states.ok_or_else(|| err(1, 1, "missing `states:` declaration"))?;
        let (iline, iname) = initial.ok_or_else(|| err(1, 1, "missing `initial:` state"))?;
        let initial = states.lookup(iline, iname.trim())?;
        let accepting = match accepting {
            None => None,
            Some((aline, value)) => {
                let mut acc = Vec::new();
                for token in value.split_whitespace() {
                    acc.push(states.lookup(aline, token)?);
                }
                Some(acc)
            }
        };
        let mut transitions = Vec::new();
        for (line, src, letter, dst) in raw_transitions {
            let q = states.lookup(line, &src)?;
            let a = parse_letter(&alphabet, &letter).map_err(|e| err(line, 1, e.to_string()))?;
            let r = states.lookup(line, &dst)?;
            transitions.push((q, a, r));
        }
        Ok(AutomatonFile {
            alphabet,
            names: states.names,
            initial,
            transitions,
            accepting,
        })
    }

    fn builder(&self) -> Result<AutomatonBuilder> {
        let mut b = AutomatonBuilder::with_names(self.alphabet.clone(), self.names.clone());
        b.set_initial(self.initial);
        for &(q, a, r) in &self.transitions {
            b.add(q, a, r)?;
        }
        Ok(b)
    }

    /// Reads the file as a safety automaton; an `accepting:` line is
    /// rejected.
    pub fn to_safety(&self) -> Result<SafetyAutomaton> {
        if self.accepting.is_some() {
            return Err(Error::InvalidParameter(
                "safety automata have no `accepting:` line; remove it or use a Buchi reading"
                    .into(),
            ));
        }
        Ok(self.builder()?.into_safety())
    }

    /// Reads the file as a deterministic Buchi automaton; without an
    /// `accepting:` line every state accepts (the safety reading).
    pub fn to_buchi(&self) -> Result<DetBuchiAutomaton> {
        let accepting: Vec<usize> = match &self.accepting {
            Some(list) => list.clone(),
            None => (0..self.names.len()).collect(),
        };
        Ok(self.builder()?.into_buchi(&accepting))
    }

    /// Reads the file as a DFA over finite words; the `accepting:` line is
    /// required.
    pub fn to_dfa(&self) -> Result<Dfa> {
        let accepting = self.accepting.as_ref().ok_or_else(|| {
            Error::InvalidParameter("a DFA needs an `accepting:` line".into())
        })?;
        Ok(self.builder()?.into_dfa(accepting))
    }
}

/// Makes state names unique for printing, appending `_2`, `_3`, ... to
/// repeats.
fn unique_names(names: Vec<String>) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    names
        .into_iter()
        .map(|n| {
            let count = seen.entry(n.clone()).or_insert(0);
            *count += 1;
            if *count == 1 {
                n
            } else {
                format!("{n}_{count}")
            }
        })
        .collect()
}

fn automaton_text(
    alpha: &MoveAlphabet,
    names: Vec<String>,
    initial: Option<usize>,
    transitions: impl Iterator<Item = (usize, MoveLetter, usize)>,
    accepting: Option<Vec<usize>>,
) -> String {
    let names = unique_names(names);
    let mut out = String::new();
    out.push_str(&format!("alphabet: {}\n", display_alphabet(alpha)));
    if names.is_empty() {
        // The empty automaton still needs a syntactically valid file: one
        // dead state.
        out.push_str("states: dead\ninitial: dead\n");
        if accepting.is_some() {
            out.push_str("accepting:\n");
        }
        return out;
    }
    out.push_str(&format!("states: {}\n", names.join(" ")));
    out.push_str(&format!("initial: {}\n", names[initial.unwrap_or(0)]));
    if let Some(acc) = &accepting {
        let list: Vec<&str> = acc.iter().map(|&q| names[q].as_str()).collect();
        out.push_str(&format!("accepting: {}\n", list.join(" ")));
    }
    for (q, a, r) in transitions {
        out.push_str(&format!(
            "{} , {} -> {}\n",
            names[q],
            alpha.display_letter(a),
            names[r]
        ));
    }
    out
}

pub fn safety_to_text(automaton: &SafetyAutomaton) -> String {
    let names = (0..automaton.state_count())
        .map(|q| automaton.state_name(q).to_string())
        .collect();
    automaton_text(
        automaton.alphabet(),
        names,
        automaton.initial(),
        automaton.transitions(),
        None,
    )
}

pub fn buchi_to_text(automaton: &DetBuchiAutomaton) -> String {
    let names = (0..automaton.state_count())
        .map(|q| automaton.state_name(q).to_string())
        .collect();
    automaton_text(
        automaton.alphabet(),
        names,
        automaton.initial(),
        automaton.transitions(),
        Some(automaton.accepting_states()),
    )
}

pub fn dfa_to_text(automaton: &Dfa) -> String {
    let names = (0..automaton.state_count())
        .map(|q| automaton.state_name(q).to_string())
        .collect();
    let accepting = (0..automaton.state_count())
        .filter(|&q| automaton.is_accepting(q))
        .collect();
    automaton_text(
        automaton.alphabet(),
        names,
        automaton.initial(),
        automaton.transitions(),
        Some(accepting),
    )
}

/// A parsed strategy file, in whichever of the two forms it used.
#[derive(Debug)]
pub enum LoadedStrategy {
    Product(ProductStrategyVector),
    General(FiniteMemoryStrategy),
}

impl LoadedStrategy {
    pub fn alphabet(&self) -> &Arc<MoveAlphabet> {
        match self {
            LoadedStrategy::Product(s) => s.alphabet(),
            LoadedStrategy::General(s) => s.alphabet(),
        }
    }

    /// The general-relation view of the strategy.
    pub fn to_general(&self) -> FiniteMemoryStrategy {
        match self {
            LoadedStrategy::Product(s) => s.to_general(),
            LoadedStrategy::General(s) => s.clone(),
        }
    }

    /// The product view, when the file used it.
    pub fn as_product(&self) -> Option<&ProductStrategyVector> {
        match self {
            LoadedStrategy::Product(s) => Some(s),
            LoadedStrategy::General(_) => None,
        }
    }

    pub fn gamma(&self) -> SafetyAutomaton {
        match self {
            LoadedStrategy::Product(s) => s.gamma(),
            LoadedStrategy::General(s) => s.gamma(),
        }
    }
}

/// Parses a strategy file.
///
/// Keyword lines: `alphabet:`, `memory:`, `initial:`, and optionally
/// `default: state` as the target of every transition left undeclared.
/// Exactly one move-set line per memory state: `allow state : c | c d`
/// (product form, `-` for an empty list) or `moves state : c,c c,d` (general
/// form, `-` for the empty set). Transition lines as in automaton files, with
/// `_` as the letter wildcard for all remaining letters of that state.
pub fn parse_strategy(text: &str) -> Result<LoadedStrategy> {
    let lines = scan_lines(text)?;
    let mut alphabet: Option<Arc<MoveAlphabet>> = None;
    let mut states: Option<NameTable> = None;
    let mut initial: Option<(usize, String)> = None;
    let mut default: Option<(usize, String)> = None;
    let mut movesets: Vec<(usize, &str, &str, &str)> = Vec::new();
    let mut raw_transitions: Vec<(usize, &str, &str, &str)> = Vec::new();
    for entry in &lines {
        match entry {
            Line::Keyword { line, key, value } => match *key {
                "alphabet" => {
                    alphabet =
                        Some(parse_alphabet(value).map_err(|e| err(*line, 1, e.to_string()))?)
                }
                "memory" => states = Some(NameTable::parse(*line, value)?),
                "initial" => initial = Some((*line, value.to_string())),
                "default" => default = Some((*line, value.to_string())),
                other => return Err(err(*line, 1, format!("unknown keyword `{other}`"))),
            },
            Line::MoveSet {
                line,
                kind,
                state,
                value,
            } => movesets.push((*line, kind, state, value)),
            Line::Transition {
                line,
                src,
                letter,
                dst,
            } => raw_transitions.push((*line, src, letter, dst)),
        }
    }
    let alphabet = alphabet.ok_or_else(|| err(1, 1, "missing `alphabet:` declaration"))?;
    let states = states.ok_or_else(|| err(1, 1, "missing `memory:` declaration"))?;
    let n = states.names.len();
    let (iline, iname) = initial.ok_or_else(|| err(1, 1, "missing `initial:` state"))?;
    let initial = states.lookup(iline, iname.trim())?;

    // Transitions: explicit first, then per-state wildcard, then the default.
    let mut update: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet.len()]; n];
    let mut wildcards: Vec<Option<usize>> = vec![None; n];
    for (line, src, letter, dst) in &raw_transitions {
        let q = states.lookup(*line, src)?;
        let r = states.lookup(*line, dst)?;
        if *letter == "_" {
            if wildcards[q].replace(r).is_some() {
                return Err(err(*line, 1, format!("duplicate wildcard for `{src}`")));
            }
            continue;
        }
        let a = parse_letter(&alphabet, letter).map_err(|e| err(*line, 1, e.to_string()))?;
        if update[q][a.index()].replace(r).is_some() {
            return Err(err(
                *line,
                1,
                format!("duplicate transition from `{src}` on `{letter}`"),
            ));
        }
    }
    let default = match default {
        None => None,
        Some((dline, name)) => Some(states.lookup(dline, name.trim())?),
    };
    for q in 0..n {
        for slot in update[q].iter_mut() {
            if slot.is_none() {
                *slot = wildcards[q].or(default);
            }
        }
    }
    let update: Vec<Vec<usize>> = update
        .into_iter()
        .enumerate()
        .map(|(q, row)| {
            row.into_iter()
                .enumerate()
                .map(|(a, t)| {
                    t.ok_or_else(|| {
                        err(
                            1,
                            1,
                            format!(
                                "state `{}` has no transition on `{}`; add one, a `_` line, or a `default:`",
                                states.names[q],
                                alphabet.display_letter(MoveLetter(a as u32))
                            ),
                        )
                    })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // Move sets: one line per state, all of one kind.
    let kinds: BTreeSet<&str> = movesets.iter().map(|&(_, kind, _, _)| kind).collect();
    if kinds.len() > 1 {
        return Err(err(
            movesets[0].0,
            1,
            "cannot mix `allow` (product form) and `moves` (general form)",
        ));
    }
    let mut seen_states = vec![false; n];
    match kinds.iter().next() {
        Some(&"moves") => {
            let mut allowed: Vec<BTreeSet<MoveLetter>> = vec![BTreeSet::new(); n];
            for (line, _, state, value) in &movesets {
                let q = states.lookup(*line, state)?;
                if std::mem::replace(&mut seen_states[q], true) {
                    return Err(err(*line, 1, format!("duplicate move set for `{state}`")));
                }
                if value.trim() == "-" {
                    continue;
                }
                for token in value.split_whitespace() {
                    let a = parse_letter(&alphabet, token)
                        .map_err(|e| err(*line, 1, e.to_string()))?;
                    allowed[q].insert(a);
                }
            }
            missing_move_set(&states, &seen_states)?;
            Ok(LoadedStrategy::General(FiniteMemoryStrategy::new(
                alphabet,
                states.names,
                initial,
                update,
                allowed,
            )?))
        }
        Some(&"allow") => {
            let empty_sets: Vec<BTreeSet<usize>> =
                vec![BTreeSet::new(); alphabet.player_count()];
            let mut allowed: Vec<Vec<BTreeSet<usize>>> = vec![empty_sets; n];
            for (line, _, state, value) in &movesets {
                let q = states.lookup(*line, state)?;
                if std::mem::replace(&mut seen_states[q], true) {
                    return Err(err(*line, 1, format!("duplicate move set for `{state}`")));
                }
                let parts: Vec<&str> = value.split('|').collect();
                if parts.len() != alphabet.player_count() {
                    return Err(err(
                        *line,
                        1,
                        format!(
                            "expected {} `|`-separated action lists",
                            alphabet.player_count()
                        ),
                    ));
                }
                for (p, part) in parts.iter().enumerate() {
                    for token in part.split_whitespace() {
                        if token == "-" {
                            continue;
                        }
                        match alphabet.action_by_name(p, token) {
                            Some(a) => {
                                allowed[q][p].insert(a);
                            }
                            None => {
                                return Err(err(
                                    *line,
                                    1,
                                    format!("unknown action `{token}` for player {}", p + 1),
                                ))
                            }
                        }
                    }
                }
            }
            missing_move_set(&states, &seen_states)?;
            Ok(LoadedStrategy::Product(ProductStrategyVector::new(
                alphabet,
                states.names,
                initial,
                update,
                allowed,
            )?))
        }
        _ => Err(err(
            1,
            1,
            "a strategy file needs `allow` or `moves` lines for its states",
        )),
    }
}

fn missing_move_set(states: &NameTable, seen: &[bool]) -> Result<()> {
    match seen.iter().position(|&s| !s) {
        Some(q) => Err(err(
            1,
            1,
            format!("state `{}` has no move-set line", states.names[q]),
        )),
        None => Ok(()),
    }
}

/// Prints a strategy in general form. Transitions shared by all remaining
/// letters of a state are folded into a `_` wildcard line.
pub fn strategy_to_text(s: &FiniteMemoryStrategy) -> String {
    let alpha = s.alphabet().clone();
    let names = unique_names(
        (0..s.memory_count())
            .map(|m| s.memory_name(m).to_string())
            .collect(),
    );
    let mut out = String::new();
    out.push_str(&format!("alphabet: {}\n", display_alphabet(&alpha)));
    out.push_str(&format!("memory: {}\n", names.join(" ")));
    out.push_str(&format!("initial: {}\n", names[s.initial()]));
    for m in 0..s.memory_count() {
        let moves = s.allowed(m);
        if moves.is_empty() {
            out.push_str(&format!("moves {} : -\n", names[m]));
        } else {
            let list: Vec<String> = moves.iter().map(|&a| alpha.display_letter(a)).collect();
            out.push_str(&format!("moves {} : {}\n", names[m], list.join(" ")));
        }
    }
    for m in 0..s.memory_count() {
        // Most common target becomes the wildcard.
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for a in alpha.letters() {
            *counts.entry(s.update(m, a)).or_insert(0) += 1;
        }
        let (&wildcard, _) = counts.iter().max_by_key(|&(_, c)| *c).expect("nonempty");
        for a in alpha.letters() {
            let target = s.update(m, a);
            if target != wildcard {
                out.push_str(&format!(
                    "{} , {} -> {}\n",
                    names[m],
                    alpha.display_letter(a),
                    names[target]
                ));
            }
        }
        out.push_str(&format!("{} , _ -> {}\n", names[m], names[wildcard]));
    }
    out
}

/// Prints a strategy vector in product form.
pub fn product_to_text(s: &ProductStrategyVector) -> String {
    let alpha = s.alphabet().clone();
    let names = unique_names(
        (0..s.memory_count())
            .map(|m| s.memory_name(m).to_string())
            .collect(),
    );
    let mut out = String::new();
    out.push_str(&format!("alphabet: {}\n", display_alphabet(&alpha)));
    out.push_str(&format!("memory: {}\n", names.join(" ")));
    out.push_str(&format!("initial: {}\n", names[s.initial()]));
    for m in 0..s.memory_count() {
        let lists: Vec<String> = (0..alpha.player_count())
            .map(|p| {
                let set = s.allowed_actions(m, p);
                if set.is_empty() {
                    "-".to_string()
                } else {
                    set.iter()
                        .map(|&a| alpha.action_name(p, a).to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                }
            })
            .collect();
        out.push_str(&format!("allow {} : {}\n", names[m], lists.join(" | ")));
    }
    for m in 0..s.memory_count() {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for a in alpha.letters() {
            *counts.entry(s.update(m, a)).or_insert(0) += 1;
        }
        let (&wildcard, _) = counts.iter().max_by_key(|&(_, c)| *c).expect("nonempty");
        for a in alpha.letters() {
            let target = s.update(m, a);
            if target != wildcard {
                out.push_str(&format!(
                    "{} , {} -> {}\n",
                    names[m],
                    alpha.display_letter(a),
                    names[target]
                ));
            }
        }
        out.push_str(&format!("{} , _ -> {}\n", names[m], names[wildcard]));
    }
    out
}

/// Parses a game file: `players:` names, `actions:` per-player lists, then
/// one payoff line `letter : v1 v2 ... vn` per move letter, with rational
/// values.
pub fn parse_game(text: &str) -> Result<Game> {
    let lines = scan_lines(text)?;
    let mut players: Option<(usize, Vec<String>)> = None;
    let mut actions: Option<Arc<MoveAlphabet>> = None;
    let mut payoff_lines: Vec<(usize, &str, &str)> = Vec::new();
    for entry in &lines {
        match entry {
            Line::Keyword { line, key, value } => match *key {
                "players" => {
                    let names: Vec<String> =
                        value.split_whitespace().map(str::to_string).collect();
                    if names.is_empty() {
                        return Err(err(*line, 1, "at least one player is required"));
                    }
                    players = Some((*line, names));
                }
                "actions" => {
                    actions =
                        Some(parse_alphabet(value).map_err(|e| err(*line, 1, e.to_string()))?)
                }
                other => {
                    // A payoff line for a single-player game can look like a
                    // keyword line; dispatch on whether the key parses as a
                    // letter once the alphabet is known.
                    payoff_lines.push((*line, *key, *value));
                    let _ = other;
                }
            },
            Line::Transition { line, .. } => {
                return Err(err(*line, 1, "game files have no transitions"))
            }
            Line::MoveSet { line, .. } => {
                return Err(err(*line, 1, "game files have no move sets"))
            }
        }
    }
    let (pline, player_names) = players.ok_or_else(|| err(1, 1, "missing `players:`"))?;
    let alphabet = actions.ok_or_else(|| err(1, 1, "missing `actions:`"))?;
    if player_names.len() != alphabet.player_count() {
        return Err(err(
            pline,
            1,
            format!(
                "{} players named but {} action lists given",
                player_names.len(),
                alphabet.player_count()
            ),
        ));
    }
    let mut utilities: Vec<Option<Vec<BigRational>>> = vec![None; alphabet.len()];
    for (line, key, value) in payoff_lines {
        let letter = parse_letter(&alphabet, key).map_err(|e| err(line, 1, e.to_string()))?;
        let values: Vec<BigRational> = value
            .split_whitespace()
            .map(|t| parse_rational(t).map_err(|e| err(line, 1, e.to_string())))
            .collect::<Result<_>>()?;
        if values.len() != alphabet.player_count() {
            return Err(err(
                line,
                1,
                format!("expected {} payoff values", alphabet.player_count()),
            ));
        }
        if utilities[letter.index()].replace(values).is_some() {
            return Err(err(line, 1, format!("duplicate payoff line for `{key}`")));
        }
    }
    let utilities: Vec<Vec<BigRational>> = utilities
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.ok_or_else(|| {
                err(
                    1,
                    1,
                    format!(
                        "missing payoff line for `{}`",
                        alphabet.display_letter(MoveLetter(i as u32))
                    ),
                )
            })
        })
        .collect::<Result<_>>()?;
    Game::new(alphabet, player_names, utilities)
}

pub fn game_to_text(game: &Game) -> String {
    let alpha = game.alphabet();
    let mut out = String::new();
    let names: Vec<String> = (0..game.player_count())
        .map(|p| game.player_name(p).to_string())
        .collect();
    out.push_str(&format!("players: {}\n", names.join(" ")));
    out.push_str(&format!("actions: {}\n", display_alphabet(alpha)));
    for letter in alpha.letters() {
        let values: Vec<String> = (0..game.player_count())
            .map(|p| display_rational(game.utility(letter, p)))
            .collect();
        out.push_str(&format!(
            "{} : {}\n",
            alpha.display_letter(letter),
            values.join(" ")
        ));
    }
    out
}

/// Parses an integer, a fraction `p/q`, or a decimal, into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("cannot parse `{text}` as a rational"));
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = frac.parse().map_err(|_| bad())?;
        let mut scale = BigInt::one();
        for _ in 0..frac.len() {
            scale *= 10;
        }
        let fractional = BigRational::new(digits, scale);
        let whole_part = BigRational::from_integer(w);
        return Ok(if negative {
            whole_part - fractional
        } else {
            whole_part + fractional
        });
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

pub fn display_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a discount factor as an exact rational in (0, 1).
pub fn parse_discount(text: &str) -> Result<DiscountFactor> {
    DiscountFactor::from_rational(parse_rational(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::equivalent;
    use crate::presets;
    use crate::strategy::strategy_leq;

    #[test]
    fn lasso_text_roundtrip() {
        let alpha = presets::pd_alphabet();
        for text in ["( c,c )", "c,c c,d ( d,d )", "c,d ( d,c d,d )"] {
            let lasso = parse_lasso(&alpha, text).unwrap();
            assert_eq!(display_lasso(&alpha, &lasso), text);
        }
        let single = MoveAlphabet::single_player(vec!["a", "b"]).unwrap();
        let lasso = parse_lasso(&single, "a ( a b )").unwrap();
        assert_eq!(display_lasso(&single, &lasso), "a ( a b )");
    }

    #[test]
    fn lasso_parse_errors() {
        let alpha = presets::pd_alphabet();
        assert!(parse_lasso(&alpha, "c,c").is_err());
        assert!(parse_lasso(&alpha, "( )").is_err());
        assert!(parse_lasso(&alpha, "( c,c ) c,d").is_err());
        assert!(parse_lasso(&alpha, "( c,x )").is_err());
    }

    const GRIM_AUT: &str = "
# the one-sided grim-trigger language
alphabet: c d | c d
states: coop punish
initial: coop
coop , c,c -> coop
coop , c,d -> punish
punish , d,c -> punish
punish , d,d -> punish
";

    #[test]
    fn automaton_file_roundtrip() {
        let file = AutomatonFile::parse(GRIM_AUT).unwrap();
        let safety = file.to_safety().unwrap();
        assert!(equivalent(
            &safety.to_buchi(),
            &presets::grim_language().to_buchi()
        ));
        let printed = safety_to_text(&safety);
        let reparsed = AutomatonFile::parse(&printed).unwrap().to_safety().unwrap();
        assert!(equivalent(&reparsed.to_buchi(), &safety.to_buchi()));
    }

    #[test]
    fn automaton_parse_errors_carry_line_numbers() {
        let text = "alphabet: c d | c d\nstates: q0\ninitial: q0\nq0 , c,c -> nowhere\n";
        match AutomatonFile::parse(text) {
            Err(Error::Parse(e)) => assert_eq!(e.line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "alphabet: c d | c d\nstates: q0\ninitial: q0\nq0 c,c -> q0\n";
        match AutomatonFile::parse(text) {
            Err(Error::Parse(e)) => assert_eq!(e.line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = "alphabet: c d | c d\nstates: q0\ninitial: q0\nq0 , c,x -> q0\n";
        assert!(AutomatonFile::parse(text).is_err());
    }

    const GRIM_STRAT: &str = "
alphabet: c d | c d
memory: coop punish sink
initial: coop
allow coop : c | c d
allow punish : d | c d
allow sink : - | -
coop , c,c -> coop
coop , c,d -> punish
coop , _ -> sink
punish , d,c -> punish
punish , d,d -> punish
punish , _ -> sink
sink , _ -> sink
";

    #[test]
    fn product_strategy_file_parses() {
        let loaded = parse_strategy(GRIM_STRAT).unwrap();
        let vector = loaded.as_product().expect("product form");
        assert_eq!(vector.memory_count(), 3);
        assert!(equivalent(
            &vector.gamma().to_buchi(),
            &presets::grim_language().to_buchi()
        ));
        // Round trip through the printer.
        let printed = product_to_text(vector);
        let again = parse_strategy(&printed).unwrap();
        assert!(equivalent(
            &again.gamma().to_buchi(),
            &vector.gamma().to_buchi()
        ));
    }

    #[test]
    fn general_strategy_file_parses() {
        let text = "
alphabet: c d | c d
memory: m0 dead
initial: m0
moves m0 : c,c d,d
moves dead : -
default: dead
m0 , c,c -> m0
m0 , d,d -> m0
";
        let loaded = parse_strategy(text).unwrap();
        let general = loaded.to_general();
        assert!(loaded.as_product().is_none());
        assert!(!general.is_rectangular());
        let printed = strategy_to_text(&general);
        let again = parse_strategy(&printed).unwrap().to_general();
        assert!(strategy_leq(&general, &again) && strategy_leq(&again, &general));
    }

    #[test]
    fn strategy_file_requires_totality() {
        let text = "
alphabet: c d | c d
memory: m0
initial: m0
allow m0 : c | c
m0 , c,c -> m0
";
        assert!(parse_strategy(text).is_err());
    }

    #[test]
    fn mixed_strategy_forms_are_rejected() {
        let text = "
alphabet: c d | c d
memory: a b
initial: a
allow a : c | c
moves b : -
default: b
";
        assert!(parse_strategy(text).is_err());
    }

    const PD_GAME: &str = "
players: row col
actions: c d | c d
c,c : 4 4
c,d : 0 5
d,c : 5 0
d,d : 1 1
";

    #[test]
    fn game_file_matches_the_preset() {
        let game = parse_game(PD_GAME).unwrap();
        let preset = presets::prisoners_dilemma();
        for letter in game.alphabet().letters() {
            for p in 0..2 {
                assert_eq!(game.utility(letter, p), preset.utility(letter, p));
            }
        }
        let printed = game_to_text(&game);
        let again = parse_game(&printed).unwrap();
        for letter in game.alphabet().letters() {
            for p in 0..2 {
                assert_eq!(game.utility(letter, p), again.utility(letter, p));
            }
        }
    }

    #[test]
    fn game_file_rejects_missing_payoffs() {
        let text = "players: row col\nactions: c d | c d\nc,c : 4 4\n";
        assert!(parse_game(text).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("4").unwrap(), BigRational::from_integer(4.into()));
        assert_eq!(
            parse_rational("-3/7").unwrap(),
            BigRational::new((-3).into(), 7.into())
        );
        assert_eq!(
            parse_rational("0.25").unwrap(),
            BigRational::new(1.into(), 4.into())
        );
        assert_eq!(
            parse_rational("-1.5").unwrap(),
            BigRational::new((-3).into(), 2.into())
        );
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_discount("1/4").is_ok());
        assert!(parse_discount("1").is_err());
        assert!(parse_discount("0").is_err());
    }
}
