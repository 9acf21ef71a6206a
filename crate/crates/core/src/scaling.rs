//! Timing harness for the word-problem solver.
//!
//! The default workload is uniformly random reduced words. Many of those are
//! rejected after the first parity count, so a second workload builds words
//! that spell the identity from random conjugates of the relators `(ad)⁴`,
//! `(ac)⁸`, `(ab)¹⁶`; on those the solver recurses all the way down.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::is_identity;
use crate::word::{reduce, Letter, Word};

pub const DEFAULT_SEED: u64 = 0x6772_6967;
pub const MAX_BENCH_LEN: usize = 1 << 24;
/// Acceptance thresholds for the scaling check.
pub const MAX_DOUBLING_RATIO: f64 = 2.5;
pub const MAX_LOGLOG_SLOPE: f64 = 1.5;
/// Lengths below this are dominated by call overhead and left out of the fit.
pub const FIT_FROM_LEN: usize = 1 << 10;
/// Each timing sample repeats the call until at least this much time passed.
const MIN_SAMPLE: Duration = Duration::from_millis(2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Workload {
    IdentityWords,
    RandomReduced,
}

impl std::str::FromStr for Workload {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "identity-words" => Ok(Workload::IdentityWords),
            "random" | "random-reduced" => Ok(Workload::RandomReduced),
            _ => Err(Error::Domain(format!("unknown workload {s:?}"))),
        }
    }
}

/// A uniformly random reduced word with exactly `len` letters.
pub fn random_reduced_word(len: usize, rng: &mut impl Rng) -> Word {
    const STARS: [Letter; 3] = [Letter::B, Letter::C, Letter::D];
    let mut letters = Vec::with_capacity(len);
    let mut star_next = rng.gen_bool(0.5);
    for _ in 0..len {
        letters.push(if star_next {
            STARS[rng.gen_range(0..3)]
        } else {
            Letter::A
        });
        star_next = !star_next;
    }
    Word::new(letters)
}

fn relators() -> [Word; 3] {
    let ad: Word = "ad".parse().expect("valid");
    let ac: Word = "ac".parse().expect("valid");
    let ab: Word = "ab".parse().expect("valid");
    [ad.pow(4), ac.pow(8), ab.pow(16)]
}

/// A reduced word of length about `len` that spells the identity.
pub fn identity_word(len: usize, rng: &mut impl Rng) -> Word {
    let rels = relators();
    let mut letters: Vec<Letter> = Vec::with_capacity(len + 64);
    while letters.len() < len {
        let h = random_reduced_word(rng.gen_range(0..=32), rng);
        let r = &rels[rng.gen_range(0..rels.len())];
        let piece = r.conjugate_by(&h);
        letters.extend_from_slice(piece.letters());
        if letters.len() >= len {
            letters = reduce(&Word::new(letters)).into_word().into_letters();
        }
    }
    Word::new(letters)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub min_len: usize,
    pub max_len: usize,
    pub reps: usize,
    pub seed: u64,
    pub workload: Workload,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            min_len: 1 << 4,
            max_len: 1 << 20,
            reps: 5,
            seed: DEFAULT_SEED,
            workload: Workload::RandomReduced,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchPoint {
    pub target_len: usize,
    pub actual_len: usize,
    /// Median seconds per solver call.
    pub median_secs: f64,
    pub min_secs: f64,
    pub verdict_identity: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub points: Vec<BenchPoint>,
}

fn time_call(w: &Word) -> (f64, bool) {
    let started = Instant::now();
    let mut calls = 0u32;
    let mut verdict = false;
    while calls == 0 || started.elapsed() < MIN_SAMPLE {
        verdict = std::hint::black_box(is_identity(std::hint::black_box(w)));
        calls += 1;
    }
    (started.elapsed().as_secs_f64() / calls as f64, verdict)
}

/// Times the solver at lengths `min_len, 2·min_len, …, max_len`.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    if config.max_len > MAX_BENCH_LEN {
        return Err(Error::CapExceeded {
            what: "benchmark length",
            requested: config.max_len as u64,
            cap: MAX_BENCH_LEN as u64,
        });
    }
    if config.min_len == 0 || config.min_len > config.max_len || config.reps == 0 {
        return Err(Error::Domain(
            "benchmark needs 0 < min_len ≤ max_len and reps ≥ 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = Vec::new();
    let mut len = config.min_len;
    while len <= config.max_len {
        let mut samples = Vec::with_capacity(config.reps);
        let mut actual_len = 0;
        let mut verdict_identity = true;
        for _ in 0..config.reps {
            let w = match config.workload {
                Workload::IdentityWords => identity_word(len, &mut rng),
                Workload::RandomReduced => random_reduced_word(len, &mut rng),
            };
            actual_len = w.len();
            let (secs, verdict) = time_call(&w);
            verdict_identity &= verdict;
            samples.push(secs);
        }
        samples.sort_by(f64::total_cmp);
        points.push(BenchPoint {
            target_len: len,
            actual_len,
            median_secs: samples[samples.len() / 2],
            min_secs: samples[0],
            verdict_identity,
        });
        len *= 2;
    }
    Ok(BenchReport {
        config: config.clone(),
        points,
    })
}

impl BenchReport {
    /// `t(2n) / t(n)` for consecutive points.
    pub fn doubling_ratios(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|p| p[1].median_secs / p[0].median_secs)
            .collect()
    }

    /// The last `count` doubling ratios.
    pub fn top_doubling_ratios(&self, count: usize) -> Vec<f64> {
        let r = self.doubling_ratios();
        r[r.len().saturating_sub(count)..].to_vec()
    }

    /// Least-squares slope of `ln t` against `ln n` over the points whose
    /// length is at least `from_len`.
    pub fn loglog_slope(&self, from_len: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.target_len >= from_len)
            .map(|p| ((p.actual_len as f64).ln(), p.median_secs.ln()))
            .collect();
        least_squares_slope(&pts)
    }

    /// Slope of `ln(t/n)` against `ln log₂ n`; close to 1 for `n log n`.
    pub fn nlogn_exponent(&self, from_len: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|p| p.target_len >= from_len && p.actual_len > 2)
            .map(|p| {
                let n = p.actual_len as f64;
                (n.log2().ln(), (p.median_secs / n).ln())
            })
            .collect();
        least_squares_slope(&pts)
    }

    /// Top three doubling ratios `≤ 2.5` and log-log slope `< 1.5`.
    pub fn verdict(&self) -> ScalingVerdict {
        let top_ratios = self.top_doubling_ratios(3);
        let slope = self.loglog_slope(FIT_FROM_LEN);
        let passed = top_ratios.len() == 3
            && top_ratios.iter().all(|&r| r <= MAX_DOUBLING_RATIO)
            && slope.is_some_and(|s| s < MAX_LOGLOG_SLOPE);
        ScalingVerdict {
            passed,
            top_ratios,
            slope,
            nlogn_exponent: self.nlogn_exponent(FIT_FROM_LEN),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# seed={}", self.config.seed).unwrap();
        writeln!(out, "# workload={:?}", self.config.workload).unwrap();
        writeln!(out, "# reps={}", self.config.reps).unwrap();
        writeln!(out, "target_len,actual_len,median_secs,min_secs,identity").unwrap();
        for p in &self.points {
            writeln!(
                out,
                "{},{},{:.6e},{:.6e},{}",
                p.target_len, p.actual_len, p.median_secs, p.min_secs, p.verdict_identity
            )
            .unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingVerdict {
    pub passed: bool,
    pub top_ratios: Vec<f64>,
    pub slope: Option<f64>,
    pub nlogn_exponent: Option<f64>,
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
