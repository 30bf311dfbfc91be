//! Move alphabets for simultaneous games.
//!
//! A move is one action per player, so the alphabet is the product of the
//! per-player action sets. Letters are stored as a single flat index into
//! that product (row-major, player 1 most significant), which keeps them
//! `Copy` and lets transition tables be indexed directly.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Characters that would collide with the textual formats.
const FORBIDDEN_CHARS: &[char] = &[',', '(', ')', '|', ':', '#'];

/// The product alphabet of simultaneous moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveAlphabet {
    /// Per-player ordered action names.
    actions: Vec<Vec<String>>,
}

/// One simultaneous move, stored as a flat index into the product alphabet.
///
/// The per-player components are recovered through [`MoveAlphabet::component`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MoveLetter(pub(crate) u32);

impl MoveLetter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl MoveAlphabet {
    /// Builds an alphabet from per-player action name lists.
    ///
    /// Every list must be nonempty and duplicate-free, and names must not
    /// contain whitespace or the characters reserved by the text formats.
    pub fn new<S: Into<String>>(per_player: Vec<Vec<S>>) -> Result<Arc<MoveAlphabet>> {
        if per_player.is_empty() {
            return Err(Error::InvalidParameter(
                "an alphabet needs at least one player".into(),
            ));
        }
        let mut actions: Vec<Vec<String>> = Vec::with_capacity(per_player.len());
        for (player, list) in per_player.into_iter().enumerate() {
            let list: Vec<String> = list.into_iter().map(Into::into).collect();
            if list.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "player {} has an empty action list",
                    player + 1
                )));
            }
            for name in &list {
                validate_action_name(name)?;
            }
            for (i, name) in list.iter().enumerate() {
                if list[..i].contains(name) {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate action `{}` for player {}",
                        name,
                        player + 1
                    )));
                }
            }
            actions.push(list);
        }
        let size: usize = actions.iter().map(Vec::len).product();
        if size > u32::MAX as usize {
            return Err(Error::InvalidParameter("alphabet too large".into()));
        }
        Ok(Arc::new(MoveAlphabet { actions }))
    }

    /// Convenience constructor for a single-player alphabet.
    pub fn single_player<S: Into<String>>(actions: Vec<S>) -> Result<Arc<MoveAlphabet>> {
        MoveAlphabet::new(vec![actions])
    }

    pub fn player_count(&self) -> usize {
        self.actions.len()
    }

    /// Number of actions of one player.
    pub fn action_count(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    pub fn action_name(&self, player: usize, action: usize) -> &str {
        &self.actions[player][action]
    }

    pub fn action_names(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    /// Total number of move letters (product of the per-player sizes).
    pub fn len(&self) -> usize {
        self.actions.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Encodes per-player action indices into a letter.
    pub fn letter(&self, components: &[usize]) -> MoveLetter {
        assert_eq!(components.len(), self.player_count(), "wrong arity");
        let mut index = 0usize;
        for (player, &a) in components.iter().enumerate() {
            assert!(a < self.actions[player].len(), "action index out of range");
            index = index * self.actions[player].len() + a;
        }
        MoveLetter(index as u32)
    }

    /// The action index of `player` inside `letter`.
    pub fn component(&self, letter: MoveLetter, player: usize) -> usize {
        let mut index = letter.index();
        for p in (player + 1..self.player_count()).rev() {
            index /= self.actions[p].len();
        }
        index % self.actions[player].len()
    }

    /// Decodes a letter into per-player action indices.
    pub fn components(&self, letter: MoveLetter) -> Vec<usize> {
        (0..self.player_count())
            .map(|p| self.component(letter, p))
            .collect()
    }

    /// All letters in index order.
    pub fn letters(&self) -> impl Iterator<Item = MoveLetter> + '_ {
        (0..self.len() as u32).map(MoveLetter)
    }

    /// The letter with the given flat index.
    pub fn nth_letter(&self, index: usize) -> MoveLetter {
        assert!(index < self.len(), "letter index out of range");
        MoveLetter(index as u32)
    }

    /// True if `letter` is a valid index into this alphabet.
    pub fn contains(&self, letter: MoveLetter) -> bool {
        letter.index() < self.len()
    }

    /// Looks up one player's action index by name.
    pub fn action_by_name(&self, player: usize, name: &str) -> Option<usize> {
        self.actions[player].iter().position(|a| a == name)
    }

    /// Builds the letter whose components differ from `letter` only in
    /// `player`'s action, replaced by `action`.
    pub fn replace_component(&self, letter: MoveLetter, player: usize, action: usize) -> MoveLetter {
        let mut comps = self.components(letter);
        comps[player] = action;
        self.letter(&comps)
    }

    /// Renders a letter in the textual syntax: action names joined by commas,
    /// with the comma omitted for single-player alphabets.
    pub fn display_letter(&self, letter: MoveLetter) -> String {
        let comps = self.components(letter);
        comps
            .iter()
            .enumerate()
            .map(|(p, &a)| self.actions[p][a].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn validate_action_name(name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::InvalidParameter("empty action name".into()));
    }
    if name == "_" || name == "-" || name == "->" {
        return Err(Error::InvalidParameter(format!(
            "action name `{name}` is reserved"
        )));
    }
    if name
        .chars()
        .any(|c| c.is_whitespace() || FORBIDDEN_CHARS.contains(&c))
    {
        return Err(Error::InvalidParameter(format!(
            "action name `{name}` contains a reserved character"
        )));
    }
    Ok(())
}

/// Checks that two carriers use the same alphabet, by identity or by value.
pub fn require_same_alphabet(a: &Arc<MoveAlphabet>, b: &Arc<MoveAlphabet>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(format!(
            "{} players vs {} players",
            a.player_count(),
            b.player_count()
        )))
    }
}

/// Panicking variant of [`require_same_alphabet`] for operations whose
/// contract already demands a shared alphabet.
pub fn assert_same_alphabet(a: &Arc<MoveAlphabet>, b: &Arc<MoveAlphabet>) {
    assert!(
        Arc::ptr_eq(a, b) || a == b,
        "operands use different move alphabets"
    );
}
