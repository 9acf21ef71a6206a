//! Finite-range checks of growth inequalities.
//!
//! Asymptotic statements cannot be decided from a finite series; each check
//! here evaluates concrete instances over the computed range and reports a
//! verdict per point.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

use super::series::{ln_big, GrowthSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Pass,
    Fail,
    /// The instance is out of range or its hypothesis does not hold.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointVerdict {
    /// Parameters of the instance, usually just `[n]`.
    pub point: Vec<u64>,
    pub outcome: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub id: String,
    pub params: Vec<(String, String)>,
    pub range: (u64, u64),
    pub verdicts: Vec<PointVerdict>,
}

impl BoundReport {
    fn new(id: &str, range: (u64, u64)) -> Self {
        BoundReport {
            id: id.to_string(),
            params: Vec::new(),
            range,
            verdicts: Vec::new(),
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    fn push(&mut self, point: Vec<u64>, outcome: Outcome, detail: String) {
        self.verdicts.push(PointVerdict {
            point,
            outcome,
            detail,
        });
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.verdicts
            .iter()
            .filter(|v| v.outcome == outcome)
            .count()
    }

    /// No instance failed.
    pub fn passed(&self) -> bool {
        self.count(Outcome::Fail) == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &PointVerdict> {
        self.verdicts.iter().filter(|v| v.outcome == Outcome::Fail)
    }
}

fn star_series(f: &[BigUint], k: usize, n: usize) -> BigUint {
    let at = |j: usize| f.get(j).cloned().unwrap_or_default();
    let base: Vec<BigUint> = (0..=n).map(at).collect();
    // exact[j]: sum of f(n₁)⋯f(n_i) over tuples with n₁ + … + n_i = j
    let mut exact = base.clone();
    for _ in 1..k {
        let mut next = vec![BigUint::zero(); n + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            for t in 0..=j {
                if !exact[t].is_zero() && !base[j - t].is_zero() {
                    *slot += &exact[t] * &base[j - t];
                }
            }
        }
        exact = next;
    }
    exact.into_iter().sum()
}

/// `f^{⋆k}(n)`: the sum of `f(n₁)⋯f(n_k)` over `k`-tuples with `n₁ + … + n_k ≤ n`.
pub fn star_convolution(f: &[BigUint], k: usize, n: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Domain("star convolution needs k ≥ 1".into()));
    }
    if n >= f.len() {
        return Err(Error::Domain(format!(
            "star convolution at n = {n} needs f on 0..={n}, have 0..={}",
            f.len() as i64 - 1
        )));
    }
    Ok(star_series(f, k, n))
}

/// Same sum with `f` taken as zero past its known range: a lower bound for
/// the true value when `f` is nonnegative.
pub fn star_convolution_lower(f: &[BigUint], k: usize, n: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Domain("star convolution needs k ≥ 1".into()));
    }
    // Tuples using only the known range have sum at most k·(len − 1).
    let reach = n.min(k * f.len().saturating_sub(1));
    Ok(star_series(f, k, reach))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstantBranch {
    /// `c = ln C ≥ 0`.
    NonNegative,
    /// `c < 0`.
    Negative,
}

/// Constants turning `π(n) ≥ c + m·π(αn)` into `π(n) ≥ A·n^ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBoundConstants {
    pub m: u32,
    pub alpha: f64,
    /// `c = ln C`.
    pub c: f64,
    /// `ν = ln m / ln(1/α)`.
    pub nu: f64,
    /// Guaranteed constant (the lower end of the admissible bracket).
    pub a_lower: f64,
    pub a_upper: f64,
    pub branch: ConstantBranch,
}

pub fn lower_bound_constants(m: u32, alpha: f64, big_c: f64) -> Result<LowerBoundConstants> {
    if m < 2 {
        return Err(Error::Domain(format!("need m > 1, got {m}")));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::Domain(format!("need α > 0, got {alpha}")));
    }
    if alpha >= 1.0 {
        return Err(Error::Domain(format!(
            "α = {alpha} ≥ 1 contradicts the recursion for an unbounded series"
        )));
    }
    if big_c.is_nan() || big_c <= 0.0 || big_c.is_infinite() {
        return Err(Error::Domain(format!("need C > 0, got {big_c}")));
    }
    let mf = m as f64;
    let c = big_c.ln();
    let ln_alpha = alpha.ln();
    let nu = mf.ln() / (1.0 / alpha).ln();
    let (a_upper, a_lower, branch) = if c >= 0.0 {
        (
            mf.powf(1.0 / ln_alpha),
            mf.powf(1.0 / ln_alpha - 1.0),
            ConstantBranch::NonNegative,
        )
    } else {
        (
            mf.powf(-(c - 1.0) / ln_alpha),
            mf.powf(-1.0 - (c - 1.0) / ln_alpha),
            ConstantBranch::Negative,
        )
    };
    Ok(LowerBoundConstants {
        m,
        alpha,
        c,
        nu,
        a_lower,
        a_upper,
        branch,
    })
}

const LOG_TOLERANCE: f64 = 1e-12;

/// Checks `f(n) ≥ C·f(⌊αn⌋)^m` at each `n`, and where it holds, the
/// conclusion `ln f(n) ≥ A·n^ν`. `log_f[n]` is `ln f(n)`.
pub fn verify_lower_recursion(
    log_f: &[f64],
    m: u32,
    alpha: f64,
    big_c: f64,
    range: RangeInclusive<usize>,
) -> Result<BoundReport> {
    let k = lower_bound_constants(m, alpha, big_c)?;
    let hi = (*range.end()).min(log_f.len().saturating_sub(1));
    let mut report = BoundReport::new("lower-recursion", (*range.start() as u64, hi as u64))
        .param("m", m)
        .param("alpha", alpha)
        .param("C", big_c)
        .param("nu", k.nu)
        .param("A", k.a_lower);
    for n in *range.start()..=hi {
        let j = (alpha * n as f64).floor() as usize;
        let rhs = k.c + m as f64 * log_f[j];
        let premise = log_f[n] + LOG_TOLERANCE * log_f[n].abs().max(1.0) >= rhs;
        if !premise {
            report.push(
                vec![n as u64],
                Outcome::Skipped,
                format!("premise fails: ln f({n}) = {} < {rhs}", log_f[n]),
            );
            continue;
        }
        let bound = k.a_lower * (n as f64).powf(k.nu);
        let holds = log_f[n] + LOG_TOLERANCE * log_f[n].abs().max(1.0) >= bound;
        report.push(
            vec![n as u64],
            if holds { Outcome::Pass } else { Outcome::Fail },
            format!("ln f({n}) = {} vs A·n^ν = {bound}", log_f[n]),
        );
    }
    Ok(report)
}

/// Natural logs of a series.
pub fn log_values(values: &[BigUint]) -> Vec<f64> {
    values.iter().map(ln_big).collect()
}

/// Best `(α, C)` for `f ⪰ f²` over a small grid: every `n ≥ 1` in range must
/// satisfy the premise; among those, prefer larger `α`, then larger `C`.
/// Falls back to the grid point satisfying the most instances.
pub fn search_lower_recursion(series: &GrowthSeries) -> Result<BoundReport> {
    let log_f = log_values(series.values());
    let n_max = series.radius() as usize;
    let alphas = [0.9, 0.8, 0.75, 0.7, 0.6, 0.5, 0.4, 0.3, 0.25];
    let cs = [1.0, 0.5, 0.25, 0.1, 0.05, 0.01];
    let mut best: Option<(usize, BoundReport)> = None;
    for &alpha in &alphas {
        for &c in &cs {
            let report = verify_lower_recursion(&log_f, 2, alpha, c, 1..=n_max)?;
            let held = report.verdicts.len() - report.count(Outcome::Skipped);
            if best.as_ref().is_none_or(|(h, _)| held > *h) {
                best = Some((held, report));
            }
        }
    }
    let (_, report) = best.expect("grid is non-empty");
    Ok(report)
}

/// `γ(n) ≤ 128 · γ^{⋆8}(⌊5n/6⌋ + 114)` for every computed `n`.
///
/// The right side needs `γ` far past the computed radius; it is bounded
/// below by truncating the series, so a pass is certified.
pub fn verify_upper_recursion(series: &GrowthSeries) -> Result<BoundReport> {
    let f = series.values();
    let n_max = series.radius() as u64;
    let mut report = BoundReport::new("upper-recursion", (0, n_max))
        .param("k", 8)
        .param("factor", 128)
        .param("shift", 114);
    for n in 0..=n_max {
        let arg = (5 * n / 6 + 114) as usize;
        let rhs = BigUint::from(128u32) * star_convolution_lower(f, 8, arg)?;
        let lhs = &f[n as usize];
        let outcome = if *lhs <= rhs {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        report.push(
            vec![n],
            outcome,
            format!("gamma({n}) = {lhs} <= 128*gamma^*8({arg}) >= {rhs}"),
        );
    }
    Ok(report)
}

/// `γ(m) ≤ 2^281 · γ^{⋆8}(⌊5m/6⌋)` for `m = n + 137` inside the computed range.
pub fn verify_upper_recursion_shifted(series: &GrowthSeries) -> Result<BoundReport> {
    let f = series.values();
    let n_max = series.radius() as u64;
    let mut report = BoundReport::new("upper-recursion-shifted", (137, n_max + 137))
        .param("k", 8)
        .param("factor", "2^281");
    let factor = BigUint::one() << 281u32;
    for n in 0..=n_max {
        let m = n + 137;
        if m > n_max {
            report.push(
                vec![m],
                Outcome::Skipped,
                format!("gamma({m}) lies beyond radius {n_max}"),
            );
            continue;
        }
        let arg = (5 * m / 6) as usize;
        let rhs = &factor * star_convolution_lower(f, 8, arg)?;
        let lhs = &f[m as usize];
        let outcome = if *lhs <= rhs {
            Outcome::Pass
        } else {
            Outcome::Fail
        };
        report.push(vec![m], outcome, format!("gamma({m}) = {lhs} vs {rhs}"));
    }
    Ok(report)
}

/// `f^k(⌊n/k⌋) ≤ f^{⋆k}(n) ≤ n^k f^k(n)` for `n ≥ 1` and each `k` in `ks`.
pub fn verify_sandwich(series: &GrowthSeries, ks: RangeInclusive<usize>) -> Result<BoundReport> {
    let f = series.values();
    let n_max = series.radius() as usize;
    let mut report = BoundReport::new("sandwich", (1, n_max as u64))
        .param("k_min", ks.start())
        .param("k_max", ks.end());
    for k in ks {
        for n in 1..=n_max {
            let mid = star_convolution(f, k, n)?;
            let lower = f[n / k].pow(k as u32);
            let upper = BigUint::from(n).pow(k as u32) * f[n].pow(k as u32);
            let ok = lower <= mid && mid <= upper;
            report.push(
                vec![k as u64, n as u64],
                if ok { Outcome::Pass } else { Outcome::Fail },
                format!("{lower} <= {mid} <= {upper}"),
            );
        }
    }
    Ok(report)
}

/// Strict increase `γ(n) < γ(n + 1)` across the series.
pub fn check_monotone(series: &GrowthSeries) -> BoundReport {
    let f = series.values();
    let mut report = BoundReport::new("strictly-increasing", (0, series.radius() as u64));
    for n in 0..f.len().saturating_sub(1) {
        let ok = f[n] < f[n + 1];
        report.push(
            vec![n as u64],
            if ok { Outcome::Pass } else { Outcome::Fail },
            format!("{} < {}", f[n], f[n + 1]),
        );
    }
    report
}

/// `γ(m + n) ≤ γ(m)·γ(n)` for all `m + n` in range.
pub fn check_submultiplicative(series: &GrowthSeries) -> BoundReport {
    let f = series.values();
    let n_max = series.radius() as usize;
    let mut report = BoundReport::new("submultiplicative", (0, n_max as u64));
    for m in 0..=n_max {
        for n in m..=(n_max - m) {
            let lhs = &f[m + n];
            let rhs = &f[m] * &f[n];
            report.push(
                vec![m as u64, n as u64],
                if *lhs <= rhs {
                    Outcome::Pass
                } else {
                    Outcome::Fail
                },
                format!("{lhs} <= {rhs}"),
            );
        }
    }
    report
}

/// First `(C, α)` from the grid with `f(n) ≤ C·g(⌊αn⌋)` for every `n ≥ 1`
/// where both sides are known. A hit means the data is consistent with
/// `f ⪯ g`; it proves nothing asymptotically.
pub fn preceq_witness(
    f: &[BigUint],
    g: &[BigUint],
    cs: &[f64],
    alphas: &[f64],
) -> Option<(f64, f64)> {
    let lf = log_values(f);
    let lg = log_values(g);
    for &c in cs {
        for &alpha in alphas {
            let ok = (1..lf.len()).all(|n| {
                let j = (alpha * n as f64).floor() as usize;
                j >= lg.len() || lf[n] <= c.ln() + lg[j] + LOG_TOLERANCE * lf[n].abs().max(1.0)
            });
            if ok {
                return Some((c, alpha));
            }
        }
    }
    None
}
