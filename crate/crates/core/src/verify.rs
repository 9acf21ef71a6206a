//! Named check suites. Each check is a concrete, finite computation with a
//! pass/fail verdict; the CLI and the acceptance tests both run them.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    build_coset_table, check_cancellation, check_d_conjugate, eta_injectivity_run, in_stabilizer,
    psi_h_generator_table, psi_table_is_surjective, split_lengths, subgroup_ad, HeartCheck,
    PSI_H_TABLE,
};
use crate::error::{Error, Result};
use crate::group::{
    are_equal, generator_portrait, is_identity, order, Order, DEFAULT_ORDER_BUDGET,
};
use crate::growth::{
    cache::cached_ball, check_monotone, check_submultiplicative, lower_bound_constants,
    search_lower_recursion, star_convolution, verify_sandwich, verify_upper_recursion,
    verify_upper_recursion_shifted, BallConfig, BallOutcome, BallTable, BoundReport,
};
use crate::portrait::{enumerate_am, Portrait};
use crate::word::{Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Relations,
    Portraits,
    SectionLengths,
    Cancellation,
    GrowthBounds,
    Indices,
    Periodicity,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Relations,
        Suite::Portraits,
        Suite::Indices,
        Suite::SectionLengths,
        Suite::Cancellation,
        Suite::Periodicity,
        Suite::GrowthBounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Relations => "relations",
            Suite::Portraits => "portraits",
            Suite::SectionLengths => "lemma7",
            Suite::Cancellation => "cancellation",
            Suite::GrowthBounds => "growth-bounds",
            Suite::Indices => "indices",
            Suite::Periodicity => "periodicity",
        }
    }

    /// Parses a suite name; `all` expands to every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        match s {
            "all" => return Ok(Suite::ALL.to_vec()),
            "section-lengths" => return Ok(vec![Suite::SectionLengths]),
            _ => {}
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .map(|suite| vec![suite])
            .ok_or_else(|| Error::Domain(format!("unknown suite {s:?}")))
    }

    fn needs_ball(self) -> bool {
        matches!(
            self,
            Suite::SectionLengths | Suite::Cancellation | Suite::GrowthBounds | Suite::Periodicity
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_report(report: &BoundReport) -> Self {
        let fails = report.failures().count();
        let detail = match report.failures().next() {
            Some(f) => format!("{fails} failures, first at {:?}: {}", f.point, f.detail),
            None => format!(
                "{} instances, {} skipped",
                report.verdicts.len(),
                report.count(crate::growth::Outcome::Skipped)
            ),
        };
        Check::new(report.id.clone(), report.passed(), detail)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed_secs: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Ball radius for the suites that need exact lengths.
    pub radius: u32,
    /// Radius for the periodicity scan.
    pub periodicity_radius: u32,
    pub cache_dir: Option<PathBuf>,
    pub time_budget: Option<Duration>,
    /// Number of random pairs for the key/solver agreement check.
    pub key_samples: usize,
    pub eta_count: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            radius: 12,
            periodicity_radius: 8,
            cache_dir: None,
            time_budget: None,
            key_samples: 100_000,
            eta_count: 15,
            seed: crate::scaling::DEFAULT_SEED,
        }
    }
}

/// Runs suites in order, sharing one enumerated ball.
pub struct Verifier {
    options: VerifyOptions,
    ball: Option<BallOutcome>,
}

impl Verifier {
    pub fn new(options: VerifyOptions) -> Self {
        Verifier {
            options,
            ball: None,
        }
    }

    /// The enumerated ball, loaded from cache or computed on first use.
    pub fn ball(&mut self) -> Result<&BallOutcome> {
        if self.ball.is_none() {
            let mut config = BallConfig::new(self.options.radius);
            config.time_budget = self.options.time_budget;
            let (outcome, _) = cached_ball(&config, self.options.cache_dir.as_deref())?;
            if !outcome.complete {
                return Err(Error::BudgetExhausted {
                    requested: self.options.radius,
                    reached: outcome.table.radius(),
                });
            }
            self.ball = Some(outcome);
        }
        Ok(self.ball.as_ref().expect("initialized"))
    }

    pub fn run(&mut self, suite: Suite) -> Result<SuiteReport> {
        let started = Instant::now();
        if suite.needs_ball() {
            self.ball()?;
        }
        let opts = &self.options;
        let ball = self.ball.as_ref();
        let checks = match suite {
            Suite::Relations => relation_checks(),
            Suite::Portraits => portrait_checks()?,
            Suite::Indices => index_checks(opts.eta_count)?,
            Suite::SectionLengths => section_length_checks(&ball.expect("ball").table, opts)?,
            Suite::Cancellation => cancellation_checks(&ball.expect("ball").table)?,
            Suite::Periodicity => {
                periodicity_checks(&ball.expect("ball").table, opts.periodicity_radius)
            }
            Suite::GrowthBounds => growth_bound_checks(ball.expect("ball"))?,
        };
        Ok(SuiteReport {
            suite,
            checks,
            elapsed_secs: started.elapsed().as_secs_f64(),
        })
    }
}

fn w(s: &str) -> Word {
    s.parse().expect("valid literal")
}

/// Defining relations and the orders of `ad`, `ac`, `ab`.
pub fn relation_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    for s in ["aa", "bb", "cc", "dd", "bcd", "bcbc", "bdbd", "cdcd"] {
        checks.push(Check::new(format!("{s} = I"), is_identity(&w(s)), ""));
    }
    for (base, k) in [("ad", 2u32), ("ac", 3), ("ab", 4)] {
        let g = w(base);
        let full = g.pow(1 << k);
        let half = g.pow(1 << (k - 1));
        checks.push(Check::new(
            format!("({base})^{} = I", 1 << k),
            is_identity(&full),
            "",
        ));
        checks.push(Check::new(
            format!("({base})^{} != I", 1 << (k - 1)),
            !is_identity(&half),
            "",
        ));
        let found = order(&g, DEFAULT_ORDER_BUDGET);
        checks.push(Check::new(
            format!("order({base}) = {}", 1 << k),
            found == Order::PowerOfTwo { exponent: k },
            format!("{found:?}"),
        ));
    }
    checks
}

/// Sizes of the finite groups `A_m` and the wreath identities for `b, c, d`.
pub fn portrait_checks() -> Result<Vec<Check>> {
    let mut checks = finite_group_checks()?;
    checks.extend(wreath_checks()?);
    Ok(checks)
}

/// `|A_m| = 2^(2^m − 1)` for `m = 1..4`, by closure.
pub fn finite_group_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m in 1..=4u32 {
        let size = enumerate_am(m)?.len();
        let expected = 1usize << ((1 << m) - 1);
        checks.push(Check::new(
            format!("|A_{m}| = {expected}"),
            size == expected,
            format!("closure has {size} elements"),
        ));
    }
    Ok(checks)
}

/// `b = φ(a, c)`, `c = φ(a, d)`, `d = φ(I, b)` as portraits at depths 1..8.
pub fn wreath_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let rules = [
        (Letter::B, Some(Letter::A), Some(Letter::C)),
        (Letter::C, Some(Letter::A), Some(Letter::D)),
        (Letter::D, None, Some(Letter::B)),
    ];
    for (g, left, right) in rules {
        let mut ok = true;
        for depth in 1..=8u32 {
            let sub = |l: Option<Letter>| match l {
                Some(l) => generator_portrait(l, depth - 1),
                None => Portrait::identity(depth - 1),
            };
            let built = Portrait::wreath_compose(&sub(left)?, &sub(right)?, false)?;
            ok &= built == generator_portrait(g, depth)?;
        }
        let name = |l: Option<Letter>| l.map_or("I".to_string(), |l| l.to_string());
        checks.push(Check::new(
            format!("{g} = phi({}, {}) at depths 1..8", name(left), name(right)),
            ok,
            "",
        ));
    }
    Ok(checks)
}

/// Stabilizer indices, `⟨a, d⟩`, the `ψ` table and the `η` iterates.
pub fn index_checks(eta_count: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut indices = Vec::new();
    for n in 1..=4u32 {
        let index = build_coset_table(n)?.index();
        let bound = 1u64 << ((1u64 << n) - 1);
        indices.push(index);
        checks.push(Check::new(
            format!("[G:St({n})] <= {bound}"),
            (index as u64) <= bound && (n != 1 || index == 2),
            format!("exact index {index}"),
        ));
    }
    let ad = subgroup_ad();
    checks.push(Check::new(
        "|<a,d>| = 8",
        ad.elements.len() == 8,
        format!("{} elements", ad.elements.len()),
    ));
    checks.push(Check::new(
        "<a,d> is dihedral of order 8",
        ad.is_dihedral_of_order_8(),
        "",
    ));
    checks.push(Check::new(
        "G = <a,b,d>",
        are_equal(&w("c"), &w("bd")),
        "c = bd",
    ));

    checks.extend(psi_table_checks());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    let mut tested = 0;
    while tested < 100 {
        let x = crate::scaling::random_reduced_word(rng.gen_range(0..40), &mut rng);
        if !in_stabilizer(&x, 1)? {
            continue;
        }
        ok &= check_d_conjugate(&x)?;
        tested += 1;
    }
    checks.push(Check::new(
        "psi(x^-1 d x) = (I, x1^-1 b x1) for 100 random x in H",
        ok,
        "",
    ));

    checks.push(Check::new(
        format!("eta iterates x_1..x_{eta_count} pairwise distinct"),
        eta_injectivity_run(eta_count)?,
        "",
    ));
    Ok(checks)
}

/// `ψ` on the generators of `H` and its surjectivity onto each coordinate.
pub fn psi_table_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let rows = psi_h_generator_table();
    for (row, expected) in rows.iter().zip(PSI_H_TABLE) {
        let shown = |s: &str| {
            if s.is_empty() {
                "I".to_string()
            } else {
                s.to_string()
            }
        };
        checks.push(Check::new(
            format!(
                "psi({}) = ({}, {})",
                row.generator,
                shown(expected.2),
                shown(expected.3)
            ),
            row.component0 == expected.2 && row.component1 == expected.3,
            format!("({}, {})", shown(&row.component0), shown(&row.component1)),
        ));
    }
    checks.push(Check::new(
        "psi(H) projects onto each coordinate",
        psi_table_is_surjective(&rows),
        "",
    ));
    checks
}

/// Per-type halving, `ℓ(g₀) + ℓ(g₁) ≤ ℓ(g) + 1`, `ℓ(g) ≤ 2ℓ(g₀) + 2ℓ(g₁) + 50`,
/// and key/solver agreement on random pairs.
pub fn section_length_checks(table: &BallTable, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let results: Vec<_> = table
        .entries()
        .par_iter()
        .map(|e| split_lengths(&e.witness, table).map(|s| (e.witness.clone(), s)))
        .collect::<Result<_>>()?;
    let first_bad = |f: &dyn Fn(&crate::analysis::SplitLengths) -> bool| {
        let bad: Vec<_> = results.iter().filter(|(_, s)| !f(s)).collect();
        match bad.first() {
            None => (true, format!("{} elements", results.len())),
            Some((w, s)) => (false, format!("{} violations, first {w}: {s:?}", bad.len())),
        }
    };
    let mut checks = Vec::new();
    let (ok, d) = first_bad(&|s| s.halving_holds());
    checks.push(Check::new("per-type halving of section lengths", ok, d));
    let (ok, d) = first_bad(&|s| s.contraction_holds());
    checks.push(Check::new("l(g0) + l(g1) <= l(g) + 1", ok, d));
    let (ok, d) = first_bad(&|s| s.expansion_holds());
    checks.push(Check::new("l(g) <= 2 l(g0) + 2 l(g1) + 50", ok, d));

    let (mismatches, equal_pairs) = key_agreement(table, opts.key_samples, opts.seed);
    checks.push(Check::new(
        format!(
            "portrait keys agree with the solver on {} pairs",
            opts.key_samples
        ),
        mismatches == 0,
        format!("{mismatches} mismatches, {equal_pairs} pairs spell one element"),
    ));
    Ok(checks)
}

/// Samples pairs of spellings of ball elements and compares key equality with
/// the solver. Half the pairs respell the same element by inserting a random
/// conjugate of a relator. Returns `(mismatches, equal pairs)`.
pub fn key_agreement(table: &BallTable, samples: usize, seed: u64) -> (usize, usize) {
    let entries = table.entries();
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9));
            let u = entries[rng.gen_range(0..entries.len())].witness.clone();
            let v = if rng.gen_bool(0.5) {
                let cut = rng.gen_range(0..=u.len());
                let filler = crate::scaling::identity_word(rng.gen_range(1..24), &mut rng);
                let letters = u.letters();
                let mut x = letters[..cut].to_vec();
                x.extend_from_slice(filler.letters());
                x.extend_from_slice(&letters[cut..]);
                Word::new(x)
            } else {
                entries[rng.gen_range(0..entries.len())].witness.clone()
            };
            let keys_equal = table.key_of(&u) == table.key_of(&v);
            let equal = are_equal(&u, &v);
            ((keys_equal != equal) as usize, equal as usize)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// The level-3 cancellation bound and the raw split inequalities on every
/// ball element in `St(3)`.
pub fn cancellation_checks(table: &BallTable) -> Result<Vec<Check>> {
    let members: Vec<Word> = table
        .entries()
        .par_iter()
        .filter_map(|e| match in_stabilizer(&e.witness, 3) {
            Ok(true) => Some(Ok(e.witness.clone())),
            Ok(false) => None,
            Err(err) => Some(Err(err)),
        })
        .collect::<Result<_>>()?;
    let results: Vec<_> = members
        .par_iter()
        .map(|h| check_cancellation(h, table).map(|c| (h.clone(), c)))
        .collect::<Result<_>>()?;
    let bad: Vec<_> = results.iter().filter(|(_, c)| !c.holds).collect();
    let max_ratio = results
        .iter()
        .filter(|(_, c)| c.length > 0)
        .map(|(_, c)| c.lhs as f64 / (5.0 * c.length as f64 / 6.0 + 8.0))
        .fold(0.0, f64::max);
    let mut checks = vec![Check::new(
        format!("cancellation bound on {} elements of St(3)", members.len()),
        bad.is_empty(),
        match bad.first() {
            None => format!("largest lhs/rhs ratio {max_ratio:.4}"),
            Some((h, c)) => format!("{} violations, first {h}: {c:?}", bad.len()),
        },
    )];
    let hearts: Vec<HeartCheck> = members.iter().map(HeartCheck::of).collect();
    for (i, label) in [
        "|w'| <= |w| + 1 - |w|_d",
        "|w''| <= |w| + 3 - |w|_c",
        "|w'''| <= |w| + 7 - |w|_b",
    ]
    .into_iter()
    .enumerate()
    {
        let violations = hearts.iter().filter(|h| !h.holds()[i]).count();
        checks.push(Check::new(
            label,
            violations == 0,
            format!("{violations} violations over {} words", hearts.len()),
        ));
    }
    Ok(checks)
}

/// Order of every element of length `≤ radius`, as a histogram of exponents.
pub fn order_distribution(table: &BallTable, radius: u32) -> (BTreeMap<u32, usize>, usize) {
    let orders: Vec<Order> = table
        .entries()
        .par_iter()
        .filter(|e| e.length <= radius)
        .map(|e| order(&e.witness, DEFAULT_ORDER_BUDGET))
        .collect();
    let mut histogram = BTreeMap::new();
    let mut exceeded = 0;
    for o in orders {
        match o {
            Order::PowerOfTwo { exponent } => *histogram.entry(exponent).or_insert(0) += 1,
            Order::Exceeded { .. } => exceeded += 1,
        }
    }
    (histogram, exceeded)
}

pub fn periodicity_checks(table: &BallTable, radius: u32) -> Vec<Check> {
    let radius = radius.min(table.radius());
    let (histogram, exceeded) = order_distribution(table, radius);
    let total: usize = histogram.values().sum::<usize>() + exceeded;
    vec![Check::new(
        format!("every element of length <= {radius} has order 2^k, k <= {DEFAULT_ORDER_BUDGET}"),
        exceeded == 0,
        format!("{total} elements, exponent histogram {histogram:?}"),
    )]
}

/// Growth series properties and the recursion bounds on the computed range.
pub fn growth_bound_checks(ball: &BallOutcome) -> Result<Vec<Check>> {
    let series = &ball.series;
    let mut checks = vec![
        Check::new(
            format!("ball radius {}", series.radius()),
            ball.complete,
            format!(
                "gamma = {:?}",
                series
                    .values()
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
            ),
        ),
        Check::from_report(&check_monotone(series)),
        Check::from_report(&check_submultiplicative(series)),
        Check::from_report(&verify_upper_recursion(series)?),
        Check::from_report(&verify_sandwich(series, 2..=8)?),
    ];
    let shifted = verify_upper_recursion_shifted(series)?;
    checks.push(Check::new(
        shifted.id.clone(),
        shifted.passed(),
        format!(
            "{} of {} instances lie beyond the computed radius",
            shifted.count(crate::growth::Outcome::Skipped),
            shifted.verdicts.len()
        ),
    ));

    let mut ok = true;
    for k in 1..=3 {
        let f: Vec<BigUint> = series.values().to_vec();
        for n in 0..=12.min(series.radius() as usize) {
            ok &= star_convolution(&f, k, n)? == brute_star(&f, k, n);
        }
    }
    checks.push(Check::new(
        "star convolution matches tuple enumeration (n <= 12, k <= 3)",
        ok,
        "",
    ));

    let mut max_err = 0.0f64;
    for (m, alpha) in [
        (2, 0.5),
        (2, 0.25),
        (3, 0.5),
        (4, 0.5),
        (2, 0.9),
        (5, 0.3),
        (8, 0.125),
        (3, 0.75),
        (6, 0.6),
        (10, 0.1),
    ] {
        let k = lower_bound_constants(m, alpha, 2.0)?;
        let expected = (m as f64).ln() / (1.0 / alpha).ln();
        max_err = max_err.max((k.nu - expected).abs());
    }
    checks.push(Check::new(
        "nu = ln m / ln(1/alpha) on a 10-point grid",
        max_err <= 1e-12,
        format!("max abs error {max_err:e}"),
    ));
    checks.push(Check::new(
        "alpha >= 1 rejected",
        lower_bound_constants(2, 1.0, 1.0).is_err() && lower_bound_constants(2, 1.5, 1.0).is_err(),
        "",
    ));
    let lower = search_lower_recursion(series)?;
    checks.push(Check::new(
        "lower recursion instances (grid search, informational)",
        lower.passed(),
        format!("best grid point {:?}", lower.params),
    ));
    Ok(checks)
}

/// Sum over all `k`-tuples by direct enumeration.
fn brute_star(f: &[BigUint], k: usize, budget: usize) -> BigUint {
    if k == 0 {
        return BigUint::from(1u32);
    }
    (0..=budget)
        .map(|i| &f[i] * brute_star(f, k - 1, budget - i))
        .sum()
}
