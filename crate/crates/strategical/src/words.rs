//! Finite words and ultimately periodic infinite words over a move alphabet.
//!
//! Infinite words are represented as lassos `stem . cycle^w`; this covers
//! every match produced by a finite automaton or finite-memory strategy.
//! Equality of the denoted infinite words is decided by a synchronized walk,
//! and [`LassoWord::normalize`] computes the unique minimal representative.

use num::rational::BigRational;
use num::{BigInt, One, Zero};

use crate::alphabet::MoveLetter;

/// A finite sequence of moves, possibly empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteWord {
    letters: Vec<MoveLetter>,
}

impl FiniteWord {
    pub fn new(letters: Vec<MoveLetter>) -> Self {
        FiniteWord { letters }
    }

    pub fn empty() -> Self {
        FiniteWord::default()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[MoveLetter] {
        &self.letters
    }

    pub fn push(&mut self, letter: MoveLetter) {
        self.letters.push(letter);
    }

    /// Number of occurrences of `letter` in this word.
    pub fn count_occurrences(&self, letter: MoveLetter) -> usize {
        self.letters.iter().filter(|&&l| l == letter).count()
    }

    /// Concatenation `self . other`.
    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        FiniteWord { letters }
    }

    /// True if `self` is a prefix of `other`.
    pub fn is_prefix_of(&self, other: &FiniteWord) -> bool {
        other.letters.starts_with(&self.letters)
    }
}

impl From<Vec<MoveLetter>> for FiniteWord {
    fn from(letters: Vec<MoveLetter>) -> Self {
        FiniteWord { letters }
    }
}

impl FromIterator<MoveLetter> for FiniteWord {
    fn from_iter<I: IntoIterator<Item = MoveLetter>>(iter: I) -> Self {
        FiniteWord {
            letters: iter.into_iter().collect(),
        }
    }
}

/// An ultimately periodic infinite word `stem . cycle^w` with nonempty cycle.
///
/// Structural equality (`==`) compares representations; use
/// [`LassoWord::same_word`] or compare [`LassoWord::normalize`] outputs for
/// equality of the denoted infinite words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LassoWord {
    stem: FiniteWord,
    cycle: FiniteWord,
}

impl LassoWord {
    /// Builds `stem . cycle^w`. Panics on an empty cycle.
    pub fn new(stem: FiniteWord, cycle: FiniteWord) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        LassoWord { stem, cycle }
    }

    /// The purely periodic word `cycle^w`.
    pub fn periodic(cycle: FiniteWord) -> Self {
        LassoWord::new(FiniteWord::empty(), cycle)
    }

    pub fn stem(&self) -> &FiniteWord {
        &self.stem
    }

    pub fn cycle(&self) -> &FiniteWord {
        &self.cycle
    }

    /// The letter at position `t`.
    pub fn letter_at(&self, t: usize) -> MoveLetter {
        if t < self.stem.len() {
            self.stem.letters()[t]
        } else {
            self.cycle.letters()[(t - self.stem.len()) % self.cycle.len()]
        }
    }

    /// The prefix of length `k`.
    pub fn prefix(&self, k: usize) -> FiniteWord {
        (0..k).map(|t| self.letter_at(t)).collect()
    }

    /// The suffix obtained by dropping the first `t` letters, as a lasso.
    pub fn suffix(&self, t: usize) -> LassoWord {
        if t <= self.stem.len() {
            let stem = FiniteWord::new(self.stem.letters()[t..].to_vec());
            LassoWord::new(stem, self.cycle.clone())
        } else {
            let shift = (t - self.stem.len()) % self.cycle.len();
            let mut cycle = self.cycle.letters().to_vec();
            cycle.rotate_left(shift);
            LassoWord::periodic(FiniteWord::new(cycle))
        }
    }

    /// The unique canonical representative of the denoted infinite word:
    /// the stem is rolled into the cycle as far as possible and the cycle is
    /// reduced to its primitive root. Idempotent.
    pub fn normalize(&self) -> LassoWord {
        let mut stem = self.stem.letters().to_vec();
        let mut cycle = self.cycle.letters().to_vec();
        // Absorb stem letters that merely rotate the cycle.
        while let Some(&last) = stem.last() {
            if last == *cycle.last().expect("nonempty cycle") {
                stem.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        primitive_root_inplace(&mut cycle);
        LassoWord {
            stem: FiniteWord::new(stem),
            cycle: FiniteWord::new(cycle),
        }
    }

    /// Number of positions after which the synchronized walk of two lassos
    /// must have entered a repeating configuration.
    fn walk_bound(&self, other: &LassoWord) -> usize {
        let stems = self.stem.len().max(other.stem.len());
        stems + num::integer::lcm(self.cycle.len(), other.cycle.len())
    }

    /// True if both lassos denote the same infinite word.
    ///
    /// Decided by comparing letters up to `max(|stems|) + lcm(|cycles|)`;
    /// past that point the pair of cycle phases repeats, so agreement there
    /// implies agreement everywhere.
    pub fn same_word(&self, other: &LassoWord) -> bool {
        first_mismatch(self, other).is_none()
    }
}

/// Reduces `cycle` to its primitive root (the shortest word it is a power of).
fn primitive_root_inplace(cycle: &mut Vec<MoveLetter>) {
    let n = cycle.len();
    for p in 1..=n / 2 {
        if n % p == 0 && cycle[..n - p] == cycle[p..] {
            cycle.truncate(p);
            return;
        }
    }
}

/// Position of the first letter where the two infinite words differ.
fn first_mismatch(x: &LassoWord, y: &LassoWord) -> Option<usize> {
    (0..x.walk_bound(y)).find(|&t| x.letter_at(t) != y.letter_at(t))
}

/// The prefix distance `d(x, y) = 1 / (1 + |longest common prefix|)`, with
/// `d = 0` for equal words. Returned as an exact rational in `[0, 1]`.
pub fn metric_distance(x: &LassoWord, y: &LassoWord) -> BigRational {
    match first_mismatch(x, y) {
        None => BigRational::zero(),
        Some(m) => BigRational::new(BigInt::one(), BigInt::from(m + 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::MoveAlphabet;
    use num::ToPrimitive;
    use proptest::prelude::*;

    fn letters(ids: &[u32]) -> FiniteWord {
        ids.iter().map(|&i| MoveLetter(i)).collect()
    }

    fn lasso(stem: &[u32], cycle: &[u32]) -> LassoWord {
        LassoWord::new(letters(stem), letters(cycle))
    }

    /// Oracle: expand a lasso letter-by-letter to `depth`.
    fn expand(x: &LassoWord, depth: usize) -> Vec<MoveLetter> {
        (0..depth).map(|t| x.letter_at(t)).collect()
    }

    #[test]
    fn normalize_reduces_cycle_power() {
        // (abab)^w == (ab)^w
        let x = lasso(&[], &[0, 1, 0, 1]);
        let n = x.normalize();
        assert_eq!(n, lasso(&[], &[0, 1]));
    }

    #[test]
    fn normalize_rolls_stem_into_cycle() {
        // a(ba)^w == (ab)^w; checked against expansion to depth 2*(1+2).
        let x = lasso(&[0], &[1, 0]);
        let n = x.normalize();
        let depth = 2 * (x.stem().len() + x.cycle().len());
        assert_eq!(expand(&x, depth), expand(&n, depth));
        assert_eq!(n, lasso(&[], &[0, 1]));
    }

    #[test]
    fn normalize_is_identity_on_canonical() {
        let x = lasso(&[], &[0]);
        assert_eq!(x.normalize(), x);
    }

    #[test]
    fn prefix_examples() {
        // (ab)^w prefix 3 = aba
        assert_eq!(lasso(&[], &[0, 1]).prefix(3), letters(&[0, 1, 0]));
        // c(d)^w prefix 0 = empty
        assert_eq!(lasso(&[2], &[3]).prefix(0), FiniteWord::empty());
        // ab(c)^w prefix 4 = abcc, by direct expansion
        assert_eq!(lasso(&[0, 1], &[2]).prefix(4), letters(&[0, 1, 2, 2]));
    }

    #[test]
    fn count_occurrences_examples() {
        assert_eq!(FiniteWord::empty().count_occurrences(MoveLetter(0)), 0);
        assert_eq!(letters(&[0, 1, 1]).count_occurrences(MoveLetter(1)), 2);
    }

    #[test]
    fn count_occurrences_matches_naive_scan() {
        let alpha = MoveAlphabet::single_player(vec!["a", "b", "c"]).unwrap();
        let word: FiniteWord = (0..20u32).map(|i| MoveLetter(i * 7 % 3)).collect();
        for l in alpha.letters() {
            let naive = word.letters().iter().filter(|&&x| x == l).count();
            assert_eq!(word.count_occurrences(l), naive);
        }
        let total: usize = alpha.letters().map(|l| word.count_occurrences(l)).sum();
        assert_eq!(total, word.len());
    }

    #[test]
    fn distance_examples() {
        let x = lasso(&[], &[0, 1]);
        assert!(metric_distance(&x, &x).is_zero());
        // different first letters: distance 1
        let d = metric_distance(&lasso(&[], &[0]), &lasso(&[], &[1]));
        assert_eq!(d.to_f64().unwrap(), 1.0);
        // (ab)^w vs a(ba)^w denote the same word
        let y = lasso(&[0], &[1, 0]);
        assert!(metric_distance(&x, &y).is_zero());
        // (ab)^w vs a(bb)^w: common prefix "ab", mismatch at position 2
        let z = lasso(&[0], &[1, 1]);
        let d = metric_distance(&x, &z);
        assert_eq!(d, BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn suffix_agrees_with_shifted_expansion() {
        let x = lasso(&[0, 1], &[2, 3, 4]);
        for t in 0..10 {
            let s = x.suffix(t);
            for k in 0..12 {
                assert_eq!(s.letter_at(k), x.letter_at(t + k), "t={t} k={k}");
            }
        }
    }

    prop_compose! {
        fn arb_lasso(max_letter: u32)
            (stem in prop::collection::vec(0..max_letter, 0..5),
             cycle in prop::collection::vec(0..max_letter, 1..5))
            -> LassoWord
        {
            LassoWord::new(
                stem.into_iter().map(MoveLetter).collect(),
                cycle.into_iter().map(MoveLetter).collect(),
            )
        }
    }

    proptest! {
        #[test]
        fn normalize_idempotent_and_preserves_prefixes(x in arb_lasso(3)) {
            let n = x.normalize();
            prop_assert_eq!(n.normalize(), n.clone());
            let depth = 3 * (x.stem().len() + x.cycle().len());
            prop_assert_eq!(expand(&x, depth), expand(&n, depth));
        }

        #[test]
        fn distance_zero_iff_same_normal_form(x in arb_lasso(2), y in arb_lasso(2)) {
            let zero = metric_distance(&x, &y).is_zero();
            prop_assert_eq!(zero, x.normalize() == y.normalize());
            prop_assert_eq!(zero, x.same_word(&y));
        }

        #[test]
        fn distance_symmetric(x in arb_lasso(3), y in arb_lasso(3)) {
            prop_assert_eq!(metric_distance(&x, &y), metric_distance(&y, &x));
        }

        #[test]
        fn ultrametric_inequality(x in arb_lasso(2), y in arb_lasso(2), z in arb_lasso(2)) {
            let dxz = metric_distance(&x, &z);
            let dxy = metric_distance(&x, &y);
            let dyz = metric_distance(&y, &z);
            prop_assert!(dxz <= dxy.max(dyz));
        }

        #[test]
        fn prefix_extends_by_one_letter(x in arb_lasso(3), k in 0usize..20) {
            let shorter = x.prefix(k);
            let longer = x.prefix(k + 1);
            prop_assert_eq!(longer.len(), k + 1);
            prop_assert!(shorter.is_prefix_of(&longer));
        }
    }
}
