//! Words over the generators `a, b, c, d` and their free reduction.
//!
//! Every generator is an involution, so a word never needs inverse letters:
//! the inverse of a word is its reversal. Reduction uses the relations
//! `x² = I` and `bc = cb = d`, `bd = db = c`, `cd = dc = b`, which leaves an
//! alternating spelling `(a) * a * ... * (a)` with `*` one of `b, c, d`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Letter {
    A = 0,
    B = 1,
    C = 2,
    D = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::B, Letter::C, Letter::D];

    pub fn from_char(ch: char) -> Option<Letter> {
        match ch {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            'd' => Some(Letter::D),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
        }
    }

    /// True for `b`, `c`, `d`: the letters fixing the first level.
    #[inline]
    pub fn is_star(self) -> bool {
        self != Letter::A
    }

    /// Product of two distinct letters of `{b, c, d}`.
    #[inline]
    pub(crate) fn third(self, other: Letter) -> Letter {
        debug_assert!(self.is_star() && other.is_star() && self != other);
        // b=1, c=2, d=3 and 1^2=3, 1^3=2, 2^3=1.
        match (self as u8) ^ (other as u8) {
            1 => Letter::B,
            2 => Letter::C,
            _ => Letter::D,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An arbitrary spelling over `{a, b, c, d}`. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    /// Number of occurrences of `letter`.
    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// Group inverse; generators are involutions so this is the reversal.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// `self` repeated `times` times.
    pub fn pow(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    /// Conjugate `g^h = h⁻¹ g h`.
    pub fn conjugate_by(&self, h: &Word) -> Word {
        h.inverse().concat(self).concat(h)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(letters)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(position, found)| {
                Letter::from_char(found).ok_or(Error::Parse { position, found })
            })
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Shape of a reduced spelling, read off its boundary letters.
///
/// | tag | shape |
/// |-----|-------|
/// | I   | `a * a ... * a` |
/// | II  | `a * a ... a *` |
/// | III | `* a * ... * a` |
/// | IV  | `* a * ... a *` |
///
/// The empty spelling is tagged II (zero `a*` blocks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    I,
    II,
    III,
    IV,
}

impl TypeTag {
    /// Tag of an already reduced letter sequence.
    pub fn of_reduced(letters: &[Letter]) -> TypeTag {
        match (letters.first(), letters.last()) {
            (None, _) | (_, None) => TypeTag::II,
            (Some(first), Some(last)) => match (first.is_star(), last.is_star()) {
                (false, false) => TypeTag::I,
                (false, true) => TypeTag::II,
                (true, false) => TypeTag::III,
                (true, true) => TypeTag::IV,
            },
        }
    }

    /// Whether two tags may describe spellings of the same element
    /// (II and III are interchangeable, the others are rigid).
    pub fn compatible(self, other: TypeTag) -> bool {
        use TypeTag::*;
        self == other || matches!((self, other), (II, III) | (III, II))
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeTag::I => "I",
            TypeTag::II => "II",
            TypeTag::III => "III",
            TypeTag::IV => "IV",
        };
        f.write_str(s)
    }
}

/// A spelling with no adjacent equal letters and no adjacent pair from `{b, c, d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    letters: Vec<Letter>,
    type_tag: TypeTag,
}

impl ReducedWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn type_tag(&self) -> TypeTag {
        self.type_tag
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of `a` letters; its parity decides membership in the first-level stabilizer.
    pub fn a_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::A).count()
    }

    pub fn to_word(&self) -> Word {
        Word(self.letters.clone())
    }

    pub fn into_word(self) -> Word {
        Word(self.letters)
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Single left-to-right stack pass over `letters`.
pub(crate) fn reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &x in letters {
        match out.last_mut() {
            Some(top) if *top == x => {
                out.pop();
            }
            Some(top) if top.is_star() && x.is_star() => {
                // The letter below a star is always `a`, so the fused letter cannot cancel further.
                *top = top.third(x);
            }
            _ => out.push(x),
        }
    }
    out
}

pub fn reduce(w: &Word) -> ReducedWord {
    let letters = reduce_letters(w.letters());
    let type_tag = TypeTag::of_reduced(&letters);
    ReducedWord { letters, type_tag }
}

pub fn classify_type(w: &ReducedWord) -> TypeTag {
    w.type_tag
}

/// True if no rewrite of `reduce` applies to `letters`.
pub fn is_reduced(letters: &[Letter]) -> bool {
    letters
        .windows(2)
        .all(|p| p[0] != p[1] && !(p[0].is_star() && p[1].is_star()))
}
