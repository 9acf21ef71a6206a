use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{are_equal, faithful_depth, oracle_depth, PortraitRealizer};
use crate::portrait::Portrait;
use crate::word::{Letter, Word};

use super::series::{GrowthSeries, SeriesMeta};

pub const DEFAULT_RADIUS_CAP: u32 = 14;

/// Smallest key depth accepted for a ball of radius `radius`.
pub fn minimum_key_depth(radius: u32) -> u32 {
    oracle_depth(radius as usize)
}

/// Key depth used when none is requested: at least 8 and at least the
/// depth that separates elements of length `2 * radius + 1`.
pub fn default_key_depth(radius: u32) -> u32 {
    minimum_key_depth(radius)
        .max(8)
        .max(faithful_depth(2 * radius as usize + 1))
}

#[derive(Debug, Clone)]
pub struct BallConfig {
    pub radius: u32,
    pub key_depth: Option<u32>,
    pub radius_cap: u32,
    /// Stop after the first layer that finishes past this wall-clock budget.
    pub time_budget: Option<Duration>,
    /// Stop before a layer would push the table past this many elements.
    pub max_elements: Option<usize>,
}

impl BallConfig {
    pub fn new(radius: u32) -> Self {
        BallConfig {
            radius,
            key_depth: None,
            radius_cap: DEFAULT_RADIUS_CAP,
            time_budget: None,
            max_elements: None,
        }
    }

    pub fn resolved_key_depth(&self) -> u32 {
        self.key_depth
            .unwrap_or_else(|| default_key_depth(self.radius))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallEntry {
    /// Exact word length `ℓ(g)`.
    pub length: u32,
    /// Shortlex-least geodesic spelling.
    pub witness: Word,
}

/// Elements of the ball, keyed by their portrait at `key_depth`.
#[derive(Debug, Clone)]
pub struct BallTable {
    radius: u32,
    realizer: PortraitRealizer,
    keys: Vec<Portrait>,
    entries: Vec<BallEntry>,
    index: HashMap<Portrait, usize>,
    /// Whether `key_depth` separates every pair of elements in the table.
    certified: bool,
}

impl BallTable {
    pub(crate) fn from_parts(
        radius: u32,
        key_depth: u32,
        keys: Vec<Portrait>,
        entries: Vec<BallEntry>,
    ) -> Result<Self> {
        let realizer = PortraitRealizer::new(key_depth)?;
        let index = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        Ok(BallTable {
            radius,
            realizer,
            keys,
            entries,
            index,
            certified: key_depth >= faithful_depth(2 * radius as usize + 1),
        })
    }

    /// Radius reached; every element of length `≤ radius` is present.
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn key_depth(&self) -> u32 {
        self.realizer.depth()
    }

    pub fn is_key_certified(&self) -> bool {
        self.certified
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BallEntry] {
        &self.entries
    }

    pub fn keys(&self) -> &[Portrait] {
        &self.keys
    }

    pub fn key_of(&self, w: &Word) -> Portrait {
        self.realizer.realize(w)
    }

    /// Entry for the element spelled by `w`, certified with the solver.
    pub fn lookup(&self, w: &Word) -> Option<&BallEntry> {
        let key = self.key_of(w);
        let &i = self.index.get(&key)?;
        let entry = &self.entries[i];
        are_equal(&entry.witness, w).then_some(entry)
    }

    /// Exact length of the element spelled by `w`.
    pub fn length_of(&self, w: &Word) -> Result<u32> {
        self.lookup(w)
            .map(|e| e.length)
            .ok_or_else(|| Error::InsufficientRadius {
                word: w.to_string(),
                radius: self.radius,
            })
    }

    pub fn sphere_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.radius as usize + 1];
        for e in &self.entries {
            sizes[e.length as usize] += 1;
        }
        sizes
    }

    pub fn growth_values(&self) -> Vec<BigUint> {
        let mut total = 0u64;
        self.sphere_sizes()
            .into_iter()
            .map(|s| {
                total += s;
                BigUint::from(total)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BallOutcome {
    pub table: BallTable,
    pub series: GrowthSeries,
    /// False when a budget stopped the search before the requested radius.
    pub complete: bool,
}

/// Breadth-first search from `I` over right multiplication by `a, b, c, d`.
///
/// Frontiers are kept in shortlex order, so the first spelling to reach an
/// element is its shortlex-least geodesic. Each time a candidate lands on a
/// known key, the two spellings are compared with the solver; a mismatch is
/// reported as [`Error::KeyCollision`].
pub fn enumerate_ball(config: &BallConfig) -> Result<BallOutcome> {
    if config.radius > config.radius_cap {
        return Err(Error::CapExceeded {
            what: "ball radius",
            requested: config.radius as u64,
            cap: config.radius_cap as u64,
        });
    }
    let key_depth = config.resolved_key_depth();
    let minimum = minimum_key_depth(config.radius);
    if key_depth < minimum {
        return Err(Error::Domain(format!(
            "key depth {key_depth} is below the minimum {minimum} for radius {}",
            config.radius
        )));
    }
    enumerate_with_depth(config, key_depth)
}

/// Enumeration without the key-depth floor; shallow keys surface as
/// [`Error::KeyCollision`].
pub(crate) fn enumerate_with_depth(config: &BallConfig, key_depth: u32) -> Result<BallOutcome> {
    let started = Instant::now();
    let realizer = PortraitRealizer::new(key_depth)?;

    let identity = Portrait::identity(key_depth)?;
    let mut keys = vec![identity.clone()];
    let mut entries = vec![BallEntry {
        length: 0,
        witness: Word::empty(),
    }];
    let mut index: HashMap<Portrait, usize> = HashMap::from([(identity, 0)]);
    let mut frontier = 0..1usize;
    let mut reached = 0u32;
    let mut complete = true;

    while reached < config.radius {
        if let Some(budget) = config.time_budget {
            if started.elapsed() > budget {
                complete = false;
                break;
            }
        }
        let candidates: Vec<[Option<Portrait>; 4]> = frontier
            .clone()
            .into_par_iter()
            .map(|i| {
                let last = entries[i].witness.letters().last().copied();
                let mut out: [Option<Portrait>; 4] = Default::default();
                for l in Letter::ALL {
                    if Some(l) != last {
                        out[l as usize] = Some(realizer.right_multiply(&keys[i], l));
                    }
                }
                out
            })
            .collect();

        let layer_start = entries.len();
        let mut collisions: Vec<(usize, usize, Letter)> = Vec::new();
        for (parent, cands) in frontier.clone().zip(candidates) {
            for (l, cand) in Letter::ALL.into_iter().zip(cands) {
                let Some(key) = cand else { continue };
                if let Some(&existing) = index.get(&key) {
                    collisions.push((existing, parent, l));
                } else {
                    let mut witness = entries[parent].witness.clone();
                    witness.push(l);
                    index.insert(key.clone(), entries.len());
                    keys.push(key);
                    entries.push(BallEntry {
                        length: reached + 1,
                        witness,
                    });
                }
            }
        }

        let failure = collisions.par_iter().find_any(|&&(existing, parent, l)| {
            let mut cand = entries[parent].witness.clone();
            cand.push(l);
            !are_equal(&entries[existing].witness, &cand)
        });
        if let Some(&(existing, parent, l)) = failure {
            let mut cand = entries[parent].witness.clone();
            cand.push(l);
            return Err(Error::KeyCollision {
                depth: key_depth,
                first: entries[existing].witness.to_string(),
                second: cand.to_string(),
            });
        }

        if let Some(max) = config.max_elements {
            if entries.len() > max {
                keys.truncate(layer_start);
                entries.truncate(layer_start);
                complete = false;
                break;
            }
        }
        frontier = layer_start..entries.len();
        reached += 1;
    }

    let table = BallTable::from_parts(reached, key_depth, keys, entries)?;
    let series = GrowthSeries::new(
        table.growth_values(),
        SeriesMeta {
            radius: reached,
            element_count: table.len() as u64,
            wall_time_secs: started.elapsed().as_secs_f64(),
            cache_id: None,
            complete,
            key_depth,
        },
    )?;
    Ok(BallOutcome {
        table,
        series,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::distinct_elements;
    use crate::word::reduce;

    #[test]
    fn small_ball_counts() {
        let out = enumerate_ball(&BallConfig::new(4)).unwrap();
        let g = out.series.values();
        assert_eq!(g[0], BigUint::from(1u32));
        assert_eq!(g[1], BigUint::from(5u32));
        assert!(out.complete);
        assert_eq!(out.table.key_depth(), 8);
        assert!(out.table.is_key_certified());
    }

    #[test]
    fn matches_solver_only_enumeration() {
        // Oracle: all reduced spellings of length ≤ 6, deduplicated by the solver alone.
        let radius = 6u32;
        let mut layers: Vec<Vec<Word>> = vec![vec![Word::empty()]];
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in layers.last().unwrap() {
                for l in Letter::ALL {
                    let mut x = w.clone();
                    x.push(l);
                    if reduce(&x).len() == x.len() {
                        next.push(x);
                    }
                }
            }
            layers.push(next);
        }
        let mut counts = Vec::new();
        let mut all: Vec<Word> = Vec::new();
        for layer in &layers {
            all.extend(layer.iter().cloned());
            counts.push(distinct_elements(&all).len() as u64);
        }
        let out = enumerate_ball(&BallConfig::new(radius)).unwrap();
        let values: Vec<u64> = out
            .series
            .values()
            .iter()
            .map(|v| v.to_string().parse().unwrap())
            .collect();
        assert_eq!(values, counts);
        assert_eq!(values, vec![1, 5, 11, 23, 40, 68, 108]);
    }

    #[test]
    fn witnesses_are_shortlex_geodesics() {
        let out = enumerate_ball(&BallConfig::new(5)).unwrap();
        for e in out.table.entries() {
            assert_eq!(e.witness.len() as u32, e.length);
            assert_eq!(reduce(&e.witness).len(), e.witness.len());
        }
        assert_eq!(out.table.length_of(&"dada".parse().unwrap()).unwrap(), 4);
        assert_eq!(
            out.table
                .lookup(&"dada".parse().unwrap())
                .unwrap()
                .witness
                .to_string(),
            "adad"
        );
        assert!(matches!(
            out.table.length_of(&"abacabacabac".parse().unwrap()),
            Err(Error::InsufficientRadius { .. })
        ));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(
            enumerate_ball(&BallConfig::new(15)),
            Err(Error::CapExceeded { .. })
        ));
        let mut cfg = BallConfig::new(10);
        cfg.key_depth = Some(5);
        assert!(matches!(enumerate_ball(&cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn shallow_keys_are_caught() {
        // (ac)⁴ fixes level 3, so depth-3 keys merge (ac)² with (ca)².
        match enumerate_with_depth(&BallConfig::new(4), 3) {
            Err(Error::KeyCollision { depth: 3, .. }) => {}
            Ok(out) => panic!("expected a collision, got {} elements", out.table.len()),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn element_budget_gives_partial_ball() {
        let mut cfg = BallConfig::new(10);
        cfg.max_elements = Some(50);
        let out = enumerate_ball(&cfg).unwrap();
        assert!(!out.complete);
        assert_eq!(out.table.radius(), 4);
        assert!(!out.series.meta().complete);
    }
}
