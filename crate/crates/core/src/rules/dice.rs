//! Dice faces, digit sets and the seeded generator every game owns.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RulesError;

/// One face of a six-sided die.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Digit(u8);

impl Digit {
    pub const ALL: [Digit; 6] = [Digit(1), Digit(2), Digit(3), Digit(4), Digit(5), Digit(6)];

    pub fn new(value: u8) -> Result<Self, RulesError> {
        if (1..=6).contains(&value) {
            Ok(Digit(value))
        } else {
            Err(RulesError::DigitOutOfRange(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Digit {
    type Error = RulesError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Digit::new(value)
    }
}

impl From<Digit> for u8 {
    fn from(d: Digit) -> u8 {
        d.0
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of dice faces, stored as a bitmask over bits 1..=6.
///
/// Serialized as an ascending list of digits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct DigitSet(u8);

impl DigitSet {
    pub const EMPTY: DigitSet = DigitSet(0);
    pub const FULL: DigitSet = DigitSet(0b0111_1110);

    pub fn from_bits(bits: u8) -> Self {
        DigitSet(bits & Self::FULL.0)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, d: Digit) -> bool {
        self.0 & (1 << d.0) != 0
    }

    pub fn insert(&mut self, d: Digit) -> bool {
        let fresh = !self.contains(d);
        self.0 |= 1 << d.0;
        fresh
    }

    pub fn remove(&mut self, d: Digit) -> bool {
        let present = self.contains(d);
        self.0 &= !(1 << d.0);
        present
    }

    pub fn union(self, other: DigitSet) -> DigitSet {
        DigitSet(self.0 | other.0)
    }

    pub fn difference(self, other: DigitSet) -> DigitSet {
        DigitSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: DigitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self) -> DigitSet {
        DigitSet(!self.0 & Self::FULL.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Digit> {
        Digit::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

impl FromIterator<Digit> for DigitSet {
    fn from_iter<I: IntoIterator<Item = Digit>>(iter: I) -> Self {
        let mut set = DigitSet::EMPTY;
        for d in iter {
            set.insert(d);
        }
        set
    }
}

impl TryFrom<Vec<u8>> for DigitSet {
    type Error = RulesError;

    fn try_from(values: Vec<u8>) -> Result<Self, Self::Error> {
        values.into_iter().map(Digit::new).collect()
    }
}

impl From<DigitSet> for Vec<u8> {
    fn from(set: DigitSet) -> Vec<u8> {
        set.iter().map(u8::from).collect()
    }
}

impl fmt::Display for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, d) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

/// The two work dice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiceRoll {
    pub first: Digit,
    pub second: Digit,
}

impl DiceRoll {
    pub fn new(first: Digit, second: Digit) -> Self {
        DiceRoll { first, second }
    }

    /// Panics on faces outside 1..=6; meant for tests and fixtures.
    pub fn of(first: u8, second: u8) -> Self {
        DiceRoll {
            first: Digit::new(first).expect("face in 1..=6"),
            second: Digit::new(second).expect("face in 1..=6"),
        }
    }

    pub fn is_double(self) -> bool {
        self.first == self.second
    }

    pub fn max(self) -> Digit {
        self.first.max(self.second)
    }

    pub fn digits(self) -> DigitSet {
        [self.first, self.second].into_iter().collect()
    }

    /// All 36 equiprobable outcomes, first die major.
    pub fn all() -> impl Iterator<Item = DiceRoll> {
        Digit::ALL
            .into_iter()
            .flat_map(|a| Digit::ALL.into_iter().map(move |b| DiceRoll::new(a, b)))
    }
}

impl fmt::Display for DiceRoll {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// Source of randomness for rule resolution.
///
/// The engine only ever asks for dice and for uniform picks; tests swap in
/// [`ScriptedDice`] to force specific rolls.
pub trait Dice {
    fn roll(&mut self) -> DiceRoll;

    /// Uniform integer in `0..n`. `n` must be non-zero.
    fn pick(&mut self, n: usize) -> usize;
}

/// The per-game generator. Cloning it forks the stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRng(ChaCha8Rng);

impl GameRng {
    pub fn seeded(seed: u64) -> Self {
        GameRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        // Fisher-Yates via `pick` so the same stream drives every random choice.
        for i in (1..items.len()).rev() {
            let j = self.pick(i + 1);
            items.swap(i, j);
        }
    }
}

impl Dice for GameRng {
    fn roll(&mut self) -> DiceRoll {
        let a = self.0.gen_range(1..=6u8);
        let b = self.0.gen_range(1..=6u8);
        DiceRoll::new(Digit(a), Digit(b))
    }

    fn pick(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }
}

/// Dice that replay a fixed list of rolls, falling back to a generator for
/// everything else.
#[derive(Debug, Clone)]
pub struct ScriptedDice {
    rolls: VecDeque<DiceRoll>,
    fallback: GameRng,
}

impl ScriptedDice {
    pub fn new(rolls: impl IntoIterator<Item = DiceRoll>) -> Self {
        ScriptedDice {
            rolls: rolls.into_iter().collect(),
            fallback: GameRng::seeded(0),
        }
    }

    pub fn remaining(&self) -> usize {
        self.rolls.len()
    }
}

impl Dice for ScriptedDice {
    fn roll(&mut self) -> DiceRoll {
        self.rolls.pop_front().unwrap_or_else(|| self.fallback.roll())
    }

    fn pick(&mut self, n: usize) -> usize {
        self.fallback.pick(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_range() {
        assert!(Digit::new(0).is_err());
        assert!(Digit::new(7).is_err());
        for v in 1..=6 {
            assert_eq!(Digit::new(v).unwrap().value(), v);
        }
    }

    #[test]
    fn digit_set_ops() {
        let a: DigitSet = [1, 2].iter().map(|v| Digit::new(*v).unwrap()).collect();
        let b = DigitSet::try_from(vec![2, 5]).unwrap();
        assert_eq!(a.union(b), DigitSet::try_from(vec![1, 2, 5]).unwrap());
        assert_eq!(a.difference(b).len(), 1);
        assert_eq!(DigitSet::FULL.len(), 6);
        assert_eq!(DigitSet::EMPTY.complement(), DigitSet::FULL);
        assert_eq!(b.to_string(), "{2,5}");
        assert!(DigitSet::try_from(vec![9]).is_err());
    }

    #[test]
    fn digit_set_serializes_as_sorted_list() {
        let set = DigitSet::try_from(vec![6, 1, 3, 1]).unwrap();
        assert_eq!(serde_json::to_string(&set).unwrap(), "[1,3,6]");
    }

    #[test]
    fn thirty_six_outcomes() {
        assert_eq!(DiceRoll::all().count(), 36);
        assert_eq!(DiceRoll::all().filter(|r| r.is_double()).count(), 6);
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        let mut a = GameRng::seeded(42);
        let mut b = GameRng::seeded(42);
        for _ in 0..100 {
            assert_eq!(a.roll(), b.roll());
        }
    }

    #[test]
    fn scripted_dice_pop_in_order() {
        let mut dice = ScriptedDice::new([DiceRoll::of(1, 2), DiceRoll::of(6, 6)]);
        assert_eq!(dice.roll(), DiceRoll::of(1, 2));
        assert_eq!(dice.roll(), DiceRoll::of(6, 6));
        assert_eq!(dice.remaining(), 0);
    }
}
