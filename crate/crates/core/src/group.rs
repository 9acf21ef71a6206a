//! The group `G = ⟨a, b, c, d⟩` acting on the binary tree.
//!
//! `a` swaps the two branches at the root; `b`, `c`, `d` fix the first level
//! and are determined by the wreath recursion
//!
//! ```text
//! b = φ(a, c),   c = φ(a, d),   d = φ(I, b).
//! ```
//!
//! For a word `w`, the sections at vertex `x ∈ {0, 1}` are read letter by
//! letter: a star letter preceded by `p` copies of `a` contributes its own
//! section at vertex `x ⊕ (p mod 2)`, and `a` contributes nothing. The table
//! [`SECTION`] drives both components.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::portrait::{Portrait, Vertex};
use crate::word::{reduce, reduce_letters, Letter, Word};

/// `SECTION[letter][x]`: restriction of a star letter to the branch below `x`,
/// `None` standing for the identity. The `a` row is unused (it has trivial sections).
const SECTION: [[Option<Letter>; 2]; 4] = [
    [None, None],
    [Some(Letter::A), Some(Letter::C)],
    [Some(Letter::A), Some(Letter::D)],
    [None, Some(Letter::B)],
];

/// Output of the component-`component` rewriting rule for `letter` when the
/// number of preceding `a`s has parity `parity`. `a` always maps to the identity.
#[inline]
pub fn phi(component: usize, parity: usize, letter: Letter) -> Option<Letter> {
    if letter == Letter::A {
        None
    } else {
        SECTION[letter as usize][component ^ parity]
    }
}

/// `ψ(g) = (g₀, g₁; σ)` realized on spellings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WreathSplit {
    pub w0: Word,
    pub w1: Word,
    /// Root swap: set iff the word contains an odd number of `a`s.
    pub sigma: bool,
}

/// Applies both rewriting rules to `letters` as given, dropping identities.
/// Valid for any spelling, reduced or not.
pub(crate) fn split_letters(letters: &[Letter]) -> (Vec<Letter>, Vec<Letter>, bool) {
    let mut w0 = Vec::with_capacity(letters.len() / 2 + 1);
    let mut w1 = Vec::with_capacity(letters.len() / 2 + 1);
    let mut parity = 0usize;
    for &l in letters {
        if l == Letter::A {
            parity ^= 1;
            continue;
        }
        let row = &SECTION[l as usize];
        if let Some(x) = row[parity] {
            w0.push(x);
        }
        if let Some(x) = row[1 ^ parity] {
            w1.push(x);
        }
    }
    (w0, w1, parity == 1)
}

/// Splits the spelling without reducing it first.
pub fn split_raw(w: &Word) -> WreathSplit {
    let (w0, w1, sigma) = split_letters(w.letters());
    WreathSplit {
        w0: Word::new(w0),
        w1: Word::new(w1),
        sigma,
    }
}

/// Reduces `w` and applies the rewriting rules.
pub fn psi_split(w: &Word) -> WreathSplit {
    split_raw(&reduce(w).into_word())
}

/// Decides `w = I` in `G`.
///
/// Reduce; an odd number of `a`s means the root is swapped. Otherwise split
/// and require both components to be trivial. Reduced spellings of length
/// `n ≥ 2` split into pieces of length at most `(n + 1) / 2`, so there are
/// `O(log n)` rounds of linear work.
pub fn is_identity(w: &Word) -> bool {
    is_identity_letters(w.letters())
}

pub(crate) fn is_identity_letters(letters: &[Letter]) -> bool {
    let mut pending: Vec<Vec<Letter>> = vec![reduce_letters(letters)];
    while let Some(word) = pending.pop() {
        match word.len() {
            0 => continue,
            1 => return false,
            _ => {}
        }
        let (w0, w1, sigma) = split_letters(&word);
        if sigma {
            return false;
        }
        for part in [w0, w1] {
            let part = reduce_letters(&part);
            if !part.is_empty() {
                pending.push(part);
            }
        }
    }
    true
}

pub fn are_equal(u: &Word, v: &Word) -> bool {
    let mut letters = Vec::with_capacity(u.len() + v.len());
    letters.extend_from_slice(u.letters());
    letters.extend(v.letters().iter().rev());
    is_identity_letters(&letters)
}

pub const DEFAULT_ORDER_BUDGET: u32 = 30;
/// Longest spelling `order` will build before giving up.
pub const ORDER_LENGTH_LIMIT: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    /// The order is `2^exponent`.
    PowerOfTwo { exponent: u32 },
    /// No `k ≤ k_max` found, or the doubled spelling grew past the length limit.
    Exceeded { k_max: u32 },
}

impl Order {
    pub fn value(&self) -> Option<u128> {
        match *self {
            Order::PowerOfTwo { exponent } => 1u128.checked_shl(exponent),
            Order::Exceeded { .. } => None,
        }
    }
}

/// Smallest `k ≤ k_max` with `w^(2^k) = I`, squaring the reduced spelling at each step.
pub fn order(w: &Word, k_max: u32) -> Order {
    let mut power = reduce_letters(w.letters());
    for k in 0..=k_max {
        if is_identity_letters(&power) {
            return Order::PowerOfTwo { exponent: k };
        }
        if k == k_max || power.len() * 2 > ORDER_LENGTH_LIMIT {
            break;
        }
        let mut doubled = power.clone();
        doubled.extend_from_slice(&power);
        power = reduce_letters(&doubled);
    }
    Order::Exceeded { k_max }
}

/// The substitution `a → aba, b → d, c → b, d → c`.
pub fn eta(w: &Word) -> Word {
    let mut out = Vec::with_capacity(w.len() * 2);
    for &l in w.letters() {
        match l {
            Letter::A => out.extend_from_slice(&[Letter::A, Letter::B, Letter::A]),
            Letter::B => out.push(Letter::D),
            Letter::C => out.push(Letter::B),
            Letter::D => out.push(Letter::C),
        }
    }
    Word::new(out)
}

/// `x₁ = a`, `x_{i+1} = η(x_i)`, for `i = 1..=count`.
pub fn eta_iterates(count: usize) -> Vec<Word> {
    let mut out = Vec::with_capacity(count);
    let mut x = Word::new(vec![Letter::A]);
    for _ in 0..count {
        let next = eta(&x);
        out.push(x);
        x = next;
    }
    out
}

/// Depth-`depth` portrait of a single generator, from the explicit products
/// `b = Π a_{1^k 0}` over `k mod 3 ∈ {0, 1}`, `c` over `{0, 2}` and `d` over `{1, 2}`.
pub fn generator_portrait(letter: Letter, depth: u32) -> Result<Portrait> {
    let residues: &[u32] = match letter {
        Letter::A => return Portrait::from_fn(depth, |v| v == Vertex::ROOT),
        Letter::B => &[0, 1],
        Letter::C => &[0, 2],
        Letter::D => &[1, 2],
    };
    let mut p = Portrait::identity(depth)?;
    let mut k = 0;
    while k + 1 < depth {
        if residues.contains(&(k % 3)) {
            p.toggle(Vertex::ones_then_zero(k));
        }
        k += 1;
    }
    Ok(p)
}

/// Precomputed generator portraits for one depth.
#[derive(Debug, Clone)]
pub struct PortraitRealizer {
    depth: u32,
    generators: [Portrait; 4],
}

impl PortraitRealizer {
    pub fn new(depth: u32) -> Result<Self> {
        Ok(PortraitRealizer {
            depth,
            generators: [
                generator_portrait(Letter::A, depth)?,
                generator_portrait(Letter::B, depth)?,
                generator_portrait(Letter::C, depth)?,
                generator_portrait(Letter::D, depth)?,
            ],
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn generator(&self, letter: Letter) -> &Portrait {
        &self.generators[letter as usize]
    }

    pub fn realize(&self, w: &Word) -> Portrait {
        let mut p = Portrait::identity(self.depth).expect("depth already checked");
        for &l in w.letters() {
            p = self.right_multiply(&p, l);
        }
        p
    }

    pub fn right_multiply(&self, p: &Portrait, letter: Letter) -> Portrait {
        p.compose(self.generator(letter)).expect("same depth")
    }
}

/// The action of `w` on the first `depth` levels.
pub fn portrait_of(w: &Word, depth: u32) -> Result<Portrait> {
    Ok(PortraitRealizer::new(depth)?.realize(w))
}

/// Portrait depth that separates every nontrivial element of length `≤ length`.
///
/// If `L ≤ 2^k`, `k` rounds of splitting leave sections of length at most 1.
/// Either some round swaps (visible by depth `k + 1`) or the level-`k`
/// sections are letters; `a` swaps one level down, `b` and `c` two, `d` three.
pub fn faithful_depth(length: usize) -> u32 {
    let k = if length <= 1 {
        0
    } else {
        usize::BITS - (length - 1).leading_zeros()
    };
    k + 3
}

/// Depth rule used when a depth is derived from a word length:
/// `⌈log₂(len + 2)⌉ + 3`.
pub fn oracle_depth(length: usize) -> u32 {
    let n = length + 2;
    (usize::BITS - (n - 1).leading_zeros()) + 3
}

/// Batch equality checks, run in parallel with deterministic output order.
pub fn are_equal_batch(pairs: &[(Word, Word)]) -> Vec<bool> {
    use rayon::prelude::*;
    pairs.par_iter().map(|(u, v)| are_equal(u, v)).collect()
}

/// Distinct group elements among `words`, by pairwise solver comparison.
/// Quadratic; meant as an oracle for small inputs.
pub fn distinct_elements(words: &[Word]) -> Vec<Word> {
    let mut reps: Vec<Word> = Vec::new();
    let mut by_parity: HashMap<bool, Vec<usize>> = HashMap::new();
    for w in words {
        let parity = w.count(Letter::A) % 2 == 1;
        let bucket = by_parity.entry(parity).or_default();
        if !bucket.iter().any(|&i| are_equal(&reps[i], w)) {
            bucket.push(reps.len());
            reps.push(w.clone());
        }
    }
    reps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::TypeTag;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn split_examples() {
        let b = psi_split(&w("b"));
        assert_eq!(
            (b.w0.to_string(), b.w1.to_string(), b.sigma),
            ("a".into(), "c".into(), false)
        );
        let d = psi_split(&w("d"));
        assert_eq!(
            (d.w0.to_string(), d.w1.to_string(), d.sigma),
            ("".into(), "b".into(), false)
        );
        let a = psi_split(&w("a"));
        assert_eq!(
            (a.w0.to_string(), a.w1.to_string(), a.sigma),
            ("".into(), "".into(), true)
        );
        let ba = psi_split(&w("aba"));
        assert_eq!(
            (ba.w0.to_string(), ba.w1.to_string()),
            ("c".into(), "a".into())
        );
    }

    #[test]
    fn phi_table_rows() {
        // component 0, even parity: b→a, c→a, d→I; odd parity: b→c, c→d, d→b.
        assert_eq!(phi(0, 0, Letter::B), Some(Letter::A));
        assert_eq!(phi(0, 0, Letter::D), None);
        assert_eq!(phi(0, 1, Letter::C), Some(Letter::D));
        assert_eq!(phi(1, 0, Letter::D), Some(Letter::B));
        assert_eq!(phi(1, 1, Letter::B), Some(Letter::A));
        assert_eq!(phi(1, 1, Letter::A), None);
    }

    #[test]
    fn relations() {
        for s in ["", "aa", "bb", "cc", "dd", "bcd", "adadadad"] {
            assert!(is_identity(&w(s)), "{s}");
        }
        assert!(is_identity(&w("ac").pow(8)));
        assert!(is_identity(&w("ab").pow(16)));
        assert!(!is_identity(&w("ab").pow(8)));
        assert!(!is_identity(&w("ac").pow(4)));
        assert!(!is_identity(&w("ad").pow(2)));
        assert!(!is_identity(&w("a")));
        assert!(!is_identity(&w("b")));
    }

    #[test]
    fn equality_examples() {
        assert!(are_equal(&w("adad"), &w("dada")));
        assert!(!are_equal(&w("ab"), &w("ba")));
        assert!(are_equal(&w("abcab"), &w("abcab")));
        let p = portrait_of(&w("ab"), 5).unwrap();
        let q = portrait_of(&w("ba"), 5).unwrap();
        assert_ne!(p, q);
    }

    #[test]
    fn orders() {
        assert_eq!(order(&w("ad"), 30), Order::PowerOfTwo { exponent: 2 });
        assert_eq!(order(&w("ac"), 30), Order::PowerOfTwo { exponent: 3 });
        assert_eq!(order(&w("ab"), 30), Order::PowerOfTwo { exponent: 4 });
        assert_eq!(order(&w(""), 30), Order::PowerOfTwo { exponent: 0 });
        assert_eq!(order(&w("ab"), 3), Order::Exceeded { k_max: 3 });
        assert_eq!(Order::PowerOfTwo { exponent: 4 }.value(), Some(16));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(&w("a")).to_string(), "aba");
        assert_eq!(eta(&w("aba")).to_string(), "abadaba");
        let xs = eta_iterates(4);
        assert_eq!(xs[3].len(), 15);
    }

    #[test]
    fn generator_portraits() {
        assert!(portrait_of(&w("d"), 2).unwrap().is_identity());
        assert_eq!(
            portrait_of(&w("b"), 1).unwrap(),
            portrait_of(&w("c"), 1).unwrap()
        );
        assert_eq!(portrait_of(&w("b"), 1).unwrap().to_string(), "0");
        assert_eq!(portrait_of(&w("b"), 3).unwrap().to_string(), "0|10|0010");
        assert_eq!(portrait_of(&w("d"), 3).unwrap().to_string(), "0|00|0010");
        assert_eq!(
            portrait_of(&w("c"), 4).unwrap().to_string(),
            "0|10|0000|00000010"
        );
    }

    #[test]
    fn wreath_recursion_holds_on_portraits() {
        for depth in 1..=10 {
            let p = |s: &str, m: u32| portrait_of(&w(s), m).unwrap();
            let phi = |x: &Portrait, y: &Portrait| Portrait::wreath_compose(x, y, false).unwrap();
            let m = depth - 1;
            assert_eq!(p("b", depth), phi(&p("a", m), &p("c", m)));
            assert_eq!(p("c", depth), phi(&p("a", m), &p("d", m)));
            assert_eq!(p("d", depth), phi(&p("", m), &p("b", m)));
        }
    }

    #[test]
    fn faithful_depths() {
        assert_eq!(faithful_depth(1), 3);
        assert_eq!(faithful_depth(2), 4);
        assert_eq!(faithful_depth(29), 8);
        assert_eq!(faithful_depth(32), 8);
        assert_eq!(faithful_depth(33), 9);
        assert_eq!(oracle_depth(14), 7);
        assert_eq!(oracle_depth(16), 8);
    }

    #[test]
    fn split_length_bounds_on_spelling() {
        for s in ["a", "aba", "abacada", "ab", "ba", "bab", "bacad", "adad"] {
            let r = reduce(&w(s));
            let split = psi_split(&r.to_word());
            let n = r.len();
            let bound = match r.type_tag() {
                TypeTag::I => (n - 1) / 2,
                TypeTag::II | TypeTag::III => n / 2,
                TypeTag::IV => n.div_ceil(2),
            };
            assert!(split.w0.len() <= bound && split.w1.len() <= bound, "{s}");
        }
    }

    #[test]
    fn distinct_elements_small_ball() {
        let words: Vec<Word> = ["", "a", "b", "c", "d", "aa", "bc", "ab", "ba"]
            .iter()
            .map(|s| w(s))
            .collect();
        assert_eq!(distinct_elements(&words).len(), 7);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_word(max: usize) -> impl Strategy<Value = Word> {
            prop::collection::vec(0u8..4, 0..max)
                .prop_map(|v| v.into_iter().map(|i| Letter::ALL[i as usize]).collect())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]

            #[test]
            fn reduce_preserves_element(word in any_word(1000)) {
                let r = reduce(&word).into_word();
                prop_assert!(are_equal(&word, &r));
                let depth = 6;
                prop_assert_eq!(portrait_of(&word, depth).unwrap(), portrait_of(&r, depth).unwrap());
            }

            #[test]
            fn sigma_is_a_parity(word in any_word(200)) {
                let split = psi_split(&word);
                prop_assert_eq!(split.sigma, word.count(Letter::A) % 2 == 1);
                if split.sigma {
                    prop_assert!(!is_identity(&word));
                }
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]

            #[test]
            fn split_matches_portrait_sections(word in any_word(120)) {
                let depth = 7;
                let split = psi_split(&word);
                let p = portrait_of(&word, depth).unwrap();
                let (p0, p1, s) = p.wreath_split().unwrap();
                prop_assert_eq!(s, split.sigma);
                prop_assert_eq!(p0, portrait_of(&split.w0, depth - 1).unwrap());
                prop_assert_eq!(p1, portrait_of(&split.w1, depth - 1).unwrap());
            }

            #[test]
            fn portrait_is_a_homomorphism(u in any_word(40), v in any_word(40)) {
                let depth = 6;
                let uv = portrait_of(&u.concat(&v), depth).unwrap();
                let composed = portrait_of(&u, depth).unwrap().compose(&portrait_of(&v, depth).unwrap()).unwrap();
                prop_assert_eq!(uv, composed);
            }

            #[test]
            fn squaring_is_monotone(word in any_word(12)) {
                if let Order::PowerOfTwo { exponent } = order(&word, DEFAULT_ORDER_BUDGET) {
                    let mut power = word.clone();
                    for k in 0..exponent + 3 {
                        prop_assert_eq!(is_identity(&power), k >= exponent);
                        power = reduce(&power.concat(&power)).into_word();
                    }
                } else {
                    prop_assert!(false, "order budget exhausted for {}", word);
                }
            }
        }
    }
}
