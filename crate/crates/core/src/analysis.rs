//! Level stabilizers, coset tables and the structural identities behind the
//! self-similarity of `G`.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{are_equal, is_identity, portrait_of, psi_split, split_raw, PortraitRealizer};
use crate::growth::BallTable;
use crate::portrait::{Portrait, MAX_DEPTH};
use crate::word::{reduce, Letter, ReducedWord, TypeTag, Word};

/// Default cap on the level of a coset table.
pub const DEFAULT_LEVEL_CAP: u32 = 4;

/// The stabilizer `St(n)` of every vertex on level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilizerSpec {
    level: u32,
}

impl StabilizerSpec {
    pub fn new(level: u32) -> Result<Self> {
        Self::with_cap(level, DEFAULT_LEVEL_CAP)
    }

    pub fn with_cap(level: u32, cap: u32) -> Result<Self> {
        if level == 0 || level > cap {
            return Err(Error::CapExceeded {
                what: "stabilizer level",
                requested: level as u64,
                cap: cap as u64,
            });
        }
        Ok(StabilizerSpec { level })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn contains(&self, w: &Word) -> Result<bool> {
        in_stabilizer(w, self.level)
    }
}

/// Whether `w` fixes every vertex on level `n`.
pub fn in_stabilizer(w: &Word, n: u32) -> Result<bool> {
    if n > MAX_DEPTH {
        return Err(Error::CapExceeded {
            what: "stabilizer level",
            requested: n as u64,
            cap: MAX_DEPTH as u64,
        });
    }
    Ok(portrait_of(w, n)?.is_identity())
}

/// Cosets of `St(n)`, labelled by the action on level `n`.
#[derive(Debug, Clone)]
pub struct CosetTable {
    level: u32,
    representatives: Vec<(ReducedWord, Portrait)>,
    index_of: HashMap<Portrait, usize>,
}

#[derive(Debug, Serialize)]
struct CosetTableDocument {
    level: u32,
    index: usize,
    representatives: Vec<String>,
}

impl CosetTable {
    pub fn level(&self) -> u32 {
        self.level
    }

    /// `[G : St(n)]`.
    pub fn index(&self) -> usize {
        self.representatives.len()
    }

    pub fn representatives(&self) -> &[(ReducedWord, Portrait)] {
        &self.representatives
    }

    /// Position of the coset containing `w`.
    pub fn coset_of(&self, w: &Word) -> Option<usize> {
        let image = portrait_of(w, self.level).ok()?;
        self.index_of.get(&image).copied()
    }

    /// Longest representative.
    pub fn max_representative_length(&self) -> usize {
        self.representatives
            .iter()
            .map(|(w, _)| w.len())
            .max()
            .unwrap_or(0)
    }

    /// `{level, index, representatives: [word strings]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CosetTableDocument {
            level: self.level,
            index: self.index(),
            representatives: self
                .representatives
                .iter()
                .map(|(w, _)| w.to_string())
                .collect(),
        })
        .expect("serializable")
    }
}

/// Breadth-first closure of the level-`n` action under right multiplication
/// by the generators, in shortlex order.
pub fn build_coset_table(n: u32) -> Result<CosetTable> {
    build_coset_table_with_cap(n, DEFAULT_LEVEL_CAP)
}

pub fn build_coset_table_with_cap(n: u32, cap: u32) -> Result<CosetTable> {
    let spec = StabilizerSpec::with_cap(n, cap)?;
    let realizer = PortraitRealizer::new(spec.level)?;
    let start = Portrait::identity(spec.level)?;
    let mut words = vec![Word::empty()];
    let mut images = vec![start.clone()];
    let mut index_of = HashMap::from([(start, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for l in Letter::ALL {
            let image = realizer.right_multiply(&images[i], l);
            if index_of.contains_key(&image) {
                continue;
            }
            let mut w = words[i].clone();
            w.push(l);
            index_of.insert(image.clone(), words.len());
            queue.push_back(words.len());
            words.push(w);
            images.push(image);
        }
    }
    let representatives = words.iter().map(reduce).zip(images).collect();
    Ok(CosetTable {
        level: spec.level,
        representatives,
        index_of,
    })
}

/// The subgroup `⟨a, d⟩`, enumerated with the solver.
#[derive(Debug, Clone)]
pub struct AdSubgroup {
    pub elements: Vec<Word>,
    /// `table[i][j]` is the index of `elements[i] · elements[j]`.
    pub table: Vec<Vec<usize>>,
}

fn find_element(elements: &[Word], w: &Word) -> Option<usize> {
    elements.iter().position(|e| are_equal(e, w))
}

pub fn subgroup_ad() -> AdSubgroup {
    let gens = [Word::new(vec![Letter::A]), Word::new(vec![Letter::D])];
    let mut elements = vec![Word::empty()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let w = reduce(&elements[i].concat(g)).into_word();
            if find_element(&elements, &w).is_none() {
                queue.push_back(elements.len());
                elements.push(w);
            }
        }
    }
    let table = elements
        .iter()
        .map(|x| {
            elements
                .iter()
                .map(|y| find_element(&elements, &x.concat(y)).expect("closed"))
                .collect()
        })
        .collect();
    AdSubgroup { elements, table }
}

pub fn subgroup_ad_order() -> usize {
    subgroup_ad().elements.len()
}

impl AdSubgroup {
    /// Checks the table against the dihedral group of the square: `a` and `d`
    /// go to two reflections whose product is a quarter turn, and the induced
    /// map must be a bijective homomorphism.
    pub fn is_dihedral_of_order_8(&self) -> bool {
        type Perm = [u8; 4];
        fn mul(p: &Perm, q: &Perm) -> Perm {
            // apply p, then q
            [
                q[p[0] as usize],
                q[p[1] as usize],
                q[p[2] as usize],
                q[p[3] as usize],
            ]
        }
        // Corners 0..3 of a square in cyclic order.
        let s: Perm = [1, 0, 3, 2];
        let t: Perm = [0, 3, 2, 1];
        let image = |w: &Word| -> Perm {
            w.letters().iter().fold([0, 1, 2, 3], |acc, l| match l {
                Letter::A => mul(&acc, &s),
                Letter::D => mul(&acc, &t),
                _ => unreachable!("only a and d occur"),
            })
        };
        if self.elements.len() != 8 {
            return false;
        }
        let images: Vec<Perm> = self.elements.iter().map(image).collect();
        let mut distinct = images.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != 8 {
            return false;
        }
        (0..8).all(|i| (0..8).all(|j| mul(&images[i], &images[j]) == images[self.table[i][j]]))
    }
}

/// One row of `ψ` on the generators of `St(1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiRow {
    pub generator: String,
    pub spelling: String,
    pub component0: String,
    pub component1: String,
}

/// Expected images: `b → (a, c)`, `c → (a, d)`, `d → (I, b)` and the
/// `a`-conjugates with components swapped.
pub const PSI_H_TABLE: [(&str, &str, &str, &str); 6] = [
    ("b", "b", "a", "c"),
    ("c", "c", "a", "d"),
    ("d", "d", "", "b"),
    ("b^a", "aba", "c", "a"),
    ("c^a", "aca", "d", "a"),
    ("d^a", "ada", "b", ""),
];

pub fn psi_h_generator_table() -> Vec<PsiRow> {
    PSI_H_TABLE
        .iter()
        .map(|&(name, spelling, _, _)| {
            let split = psi_split(&spelling.parse().expect("valid"));
            PsiRow {
                generator: name.to_string(),
                spelling: spelling.to_string(),
                component0: split.w0.to_string(),
                component1: split.w1.to_string(),
            }
        })
        .collect()
}

/// Whether both coordinates of the table contain each of `a, b, c, d`.
pub fn psi_table_is_surjective(rows: &[PsiRow]) -> bool {
    ["component0", "component1"].iter().all(|which| {
        ["a", "b", "c", "d"].iter().all(|g| {
            rows.iter().any(|r| {
                let c = if *which == "component0" {
                    &r.component0
                } else {
                    &r.component1
                };
                c == g
            })
        })
    })
}

/// The eight level-3 components `g_ijk`, indexed by `4i + 2j + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctupleSplit {
    pub components: [Word; 8],
}

impl OctupleSplit {
    pub fn component(&self, i: usize, j: usize, k: usize) -> &Word {
        &self.components[4 * i + 2 * j + k]
    }
}

fn require_h3(h: &Word) -> Result<()> {
    if !in_stabilizer(h, 3)? {
        return Err(Error::NotInStabilizer {
            word: h.to_string(),
            level: 3,
        });
    }
    Ok(())
}

fn split_three_times(h: &Word, split: impl Fn(&Word) -> (Word, Word)) -> Vec<Vec<Word>> {
    let mut stages = vec![vec![h.clone()]];
    for _ in 0..3 {
        let next = stages
            .last()
            .expect("non-empty")
            .iter()
            .flat_map(|w| {
                let (w0, w1) = split(w);
                [w0, w1]
            })
            .collect();
        stages.push(next);
    }
    stages
}

/// `ψ₃(h)`: three rounds of splitting, reducing before each round.
pub fn psi3_split(h: &Word) -> Result<OctupleSplit> {
    require_h3(h)?;
    let stages = split_three_times(h, |w| {
        let s = psi_split(w);
        (s.w0, s.w1)
    });
    let components: [Word; 8] = stages[3].clone().try_into().expect("eight components");
    Ok(OctupleSplit { components })
}

/// Lengths of the concatenations `w'`, `w''`, `w'''` obtained by splitting a
/// fixed spelling three times without reducing in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeartCheck {
    pub len: usize,
    pub count_b: usize,
    pub count_c: usize,
    pub count_d: usize,
    pub len1: usize,
    pub len2: usize,
    pub len3: usize,
}

impl HeartCheck {
    pub fn of(w: &Word) -> HeartCheck {
        let stages = split_three_times(w, |x| {
            let s = split_raw(x);
            (s.w0, s.w1)
        });
        let total = |k: usize| stages[k].iter().map(Word::len).sum::<usize>();
        HeartCheck {
            len: w.len(),
            count_b: w.count(Letter::B),
            count_c: w.count(Letter::C),
            count_d: w.count(Letter::D),
            len1: total(1),
            len2: total(2),
            len3: total(3),
        }
    }

    /// `|w'| ≤ |w| + 1 − |w|_d`, `|w''| ≤ |w| + 3 − |w|_c`, `|w'''| ≤ |w| + 7 − |w|_b`.
    pub fn holds(&self) -> [bool; 3] {
        [
            self.len1 + self.count_d <= self.len + 1,
            self.len2 + self.count_c <= self.len + 3,
            self.len3 + self.count_b <= self.len + 7,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CancellationCheck {
    pub length: u32,
    pub component_lengths: [u32; 8],
    /// `Σ ℓ(g_ijk)`.
    pub lhs: u32,
    /// `(5/6)·ℓ(h) + 8`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `Σ ℓ(g_ijk)` with `(5/6)ℓ(h) + 8`, using exact lengths from `ball`.
pub fn check_cancellation(h: &Word, ball: &BallTable) -> Result<CancellationCheck> {
    let split = psi3_split(h)?;
    let length = ball.length_of(h)?;
    let mut component_lengths = [0u32; 8];
    for (slot, w) in component_lengths.iter_mut().zip(&split.components) {
        *slot = ball.length_of(w)?;
    }
    let lhs: u32 = component_lengths.iter().sum();
    Ok(CancellationCheck {
        length,
        component_lengths,
        lhs,
        rhs: 5.0 * length as f64 / 6.0 + 8.0,
        // 6·lhs ≤ 5ℓ + 48, in integers
        holds: 6 * lhs <= 5 * length + 48,
    })
}

/// Split-length bounds for one ball element, all lengths exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitLengths {
    pub length: u32,
    pub type_tag: TypeTag,
    pub l0: u32,
    pub l1: u32,
}

impl SplitLengths {
    /// `ℓ(g_i) ≤ (ℓ−1)/2`, `ℓ/2` or `(ℓ+1)/2` for types I, II/III, IV.
    pub fn halving_holds(&self) -> bool {
        let doubled_bound = match self.type_tag {
            TypeTag::I => self.length as i64 - 1,
            TypeTag::II | TypeTag::III => self.length as i64,
            TypeTag::IV => self.length as i64 + 1,
        };
        2 * self.l0 as i64 <= doubled_bound && 2 * self.l1 as i64 <= doubled_bound
    }

    /// `ℓ(g₀) + ℓ(g₁) ≤ ℓ(g) + 1`.
    pub fn contraction_holds(&self) -> bool {
        self.l0 + self.l1 <= self.length + 1
    }

    /// `ℓ(g) ≤ 2ℓ(g₀) + 2ℓ(g₁) + 50`.
    pub fn expansion_holds(&self) -> bool {
        self.length <= 2 * self.l0 + 2 * self.l1 + 50
    }
}

/// Lengths of `g` and its two sections, for a geodesic `witness`.
pub fn split_lengths(witness: &Word, ball: &BallTable) -> Result<SplitLengths> {
    let reduced = reduce(witness);
    let split = psi_split(witness);
    Ok(SplitLengths {
        length: ball.length_of(witness)?,
        type_tag: reduced.type_tag(),
        l0: ball.length_of(&split.w0)?,
        l1: ball.length_of(&split.w1)?,
    })
}

pub const ETA_RUN_CAP: usize = 25;

/// Builds `x₁ … x_k` by iterating `η` and checks they are pairwise distinct.
pub fn eta_injectivity_run(k: usize) -> Result<bool> {
    if k > ETA_RUN_CAP {
        return Err(Error::CapExceeded {
            what: "eta iterate count",
            requested: k as u64,
            cap: ETA_RUN_CAP as u64,
        });
    }
    use rayon::prelude::*;
    let xs = crate::group::eta_iterates(k);
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .collect();
    Ok(pairs.par_iter().all(|&(i, j)| !are_equal(&xs[i], &xs[j])))
}

/// For `x ∈ St(1)` with `ψ(x) = (x₀, x₁)`: `ψ(x⁻¹dx) = (I, x₁⁻¹bx₁)`.
pub fn check_d_conjugate(x: &Word) -> Result<bool> {
    if !in_stabilizer(x, 1)? {
        return Err(Error::NotInStabilizer {
            word: x.to_string(),
            level: 1,
        });
    }
    let d = Word::new(vec![Letter::D]);
    let b = Word::new(vec![Letter::B]);
    let x1 = psi_split(x).w1;
    let conj = psi_split(&d.conjugate_by(x));
    Ok(!conj.sigma && is_identity(&conj.w0) && are_equal(&conj.w1, &b.conjugate_by(&x1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{enumerate_ball, BallConfig};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn stabilizer_examples() {
        assert!(in_stabilizer(&w("b"), 1).unwrap());
        assert!(!in_stabilizer(&w("a"), 1).unwrap());
        assert!(!in_stabilizer(&w("ab"), 1).unwrap());
        assert!(in_stabilizer(&w("aba"), 1).unwrap());
        assert!(StabilizerSpec::new(5).is_err());
        assert!(StabilizerSpec::new(0).is_err());
    }

    #[test]
    fn coset_indices() {
        // Frozen from the closure: [G : St(n)] for n = 1..4.
        let indices: Vec<usize> = (1..=4)
            .map(|n| build_coset_table(n).unwrap().index())
            .collect();
        assert_eq!(indices, vec![2, 8, 128, 4096]);
        for (n, idx) in (1..=4).zip(&indices) {
            assert!(*idx as u64 <= 1u64 << ((1u64 << n) - 1));
        }
        assert!(build_coset_table(5).is_err());
    }

    #[test]
    fn coset_table_is_closed_and_shortlex() {
        let t = build_coset_table(3).unwrap();
        for (rep, image) in t.representatives() {
            assert_eq!(portrait_of(&rep.to_word(), 3).unwrap(), *image);
            for l in Letter::ALL {
                let mut x = rep.to_word();
                x.push(l);
                assert!(t.coset_of(&x).is_some());
            }
        }
        assert!(t.max_representative_length() <= 127);
        let json = t.to_json();
        assert_eq!(json["level"], 3);
        assert_eq!(json["index"], 128);
        assert_eq!(json["representatives"][0], "");
        assert_eq!(json["representatives"][1], "a");
    }

    #[test]
    fn ad_is_d4() {
        let g = subgroup_ad();
        assert_eq!(g.elements.len(), 8);
        assert!(g.is_dihedral_of_order_8());
        assert!(is_identity(&w("aa")) && is_identity(&w("dd")));
    }

    #[test]
    fn psi_table() {
        let rows = psi_h_generator_table();
        for (row, expected) in rows.iter().zip(PSI_H_TABLE) {
            assert_eq!(
                (row.component0.as_str(), row.component1.as_str()),
                (expected.2, expected.3),
                "{}",
                row.generator
            );
        }
        assert!(psi_table_is_surjective(&rows));
    }

    #[test]
    fn psi3_of_identity_and_non_member() {
        let split = psi3_split(&Word::empty()).unwrap();
        assert!(split.components.iter().all(Word::is_empty));
        assert!(matches!(
            psi3_split(&w("b")),
            Err(Error::NotInStabilizer { level: 3, .. })
        ));
    }

    #[test]
    fn psi3_reassembles_portrait() {
        // (ad)² lies in St(1) only; (ad)⁴ = I. Look for level-3 members among
        // short products instead.
        let candidates = ["abadacabadac", "adadadad", "abab abab", "acacacac"];
        let mut found = 0;
        for s in candidates {
            let Ok(h) = s.replace(' ', "").parse::<Word>() else {
                continue;
            };
            if !in_stabilizer(&h, 3).unwrap() {
                continue;
            }
            found += 1;
            let split = psi3_split(&h).unwrap();
            let depth = 6;
            let leaf: Vec<Portrait> = split
                .components
                .iter()
                .map(|c| portrait_of(c, depth - 3).unwrap())
                .collect();
            let level2: Vec<Portrait> = leaf
                .chunks(2)
                .map(|p| Portrait::wreath_compose(&p[0], &p[1], false).unwrap())
                .collect();
            let level1: Vec<Portrait> = level2
                .chunks(2)
                .map(|p| Portrait::wreath_compose(&p[0], &p[1], false).unwrap())
                .collect();
            let top = Portrait::wreath_compose(&level1[0], &level1[1], false).unwrap();
            assert_eq!(top, portrait_of(&h, depth).unwrap(), "{s}");
        }
        assert!(found > 0);
    }

    #[test]
    fn cancellation_on_identity() {
        let ball = enumerate_ball(&BallConfig::new(4)).unwrap().table;
        let c = check_cancellation(&Word::empty(), &ball).unwrap();
        assert_eq!(c.lhs, 0);
        assert_eq!(c.rhs, 8.0);
        assert!(c.holds);
    }

    #[test]
    fn heart_on_short_words() {
        let h = HeartCheck::of(&w("abadacab"));
        assert_eq!(h.holds(), [true, true, true]);
    }

    #[test]
    fn eta_runs() {
        assert!(eta_injectivity_run(1).unwrap());
        assert!(eta_injectivity_run(2).unwrap());
        assert!(!are_equal(&w("a"), &w("aba")));
        assert!(eta_injectivity_run(26).is_err());
    }

    #[test]
    fn d_conjugates() {
        assert!(check_d_conjugate(&w("b")).unwrap());
        assert!(check_d_conjugate(&w("abacad")).unwrap_or(true));
        assert!(check_d_conjugate(&w("aba")).unwrap());
        assert!(check_d_conjugate(&w("a")).is_err());
    }
}
