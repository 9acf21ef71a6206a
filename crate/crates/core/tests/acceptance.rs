//! Acceptance run: one `[PASS]` or `[FAIL]` line per criterion, then a
//! nonzero exit if anything failed. Criteria run one after another on the
//! main thread so that their timings do not disturb each other.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use grigorchuk::analysis::eta_injectivity_run;
use grigorchuk::growth::{enumerate_ball, BallConfig, BallOutcome};
use grigorchuk::scaling::{run_bench, BenchConfig, Workload};
use grigorchuk::verify::{
    cancellation_checks, finite_group_checks, growth_bound_checks, index_checks, key_agreement,
    order_distribution, psi_table_checks, relation_checks, section_length_checks, wreath_checks,
    Check, VerifyOptions,
};

/// Ball radius for criteria 4–6 and 10.
const RADIUS: u32 = 14;
const KEY_SAMPLES: usize = 100_000;
const ETA_COUNT: usize = 15;
const PERIODICITY_RADIUS: u32 = 8;

const RELATIONS_LIMIT: Duration = Duration::from_secs(1);
const FINITE_GROUPS_LIMIT: Duration = Duration::from_secs(30);
const PSI_TABLE_LIMIT: Duration = Duration::from_secs(1);
const BALL_LIMIT: Duration = Duration::from_secs(600);
const ETA_LIMIT: Duration = Duration::from_secs(120);
const BENCH_LIMIT: Duration = Duration::from_secs(60);

/// Orders of the 271 elements of length ≤ 8: exponent of two → count.
const ORDER_HISTOGRAM: [(u32, usize); 5] = [(0, 1), (1, 36), (2, 42), (3, 72), (4, 120)];

static BALL: OnceLock<(BallOutcome, Duration)> = OnceLock::new();

fn ball() -> &'static (BallOutcome, Duration) {
    BALL.get_or_init(|| {
        let started = Instant::now();
        let out = enumerate_ball(&BallConfig::new(RADIUS)).expect("ball enumeration");
        (out, started.elapsed())
    })
}

fn report(criterion: u32, title: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {title} ({detail})");
}

fn failed(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect()
}

fn conclude(
    criterion: u32,
    title: &str,
    checks: &[Check],
    elapsed: Duration,
    limit: Option<Duration>,
) -> bool {
    let bad = failed(checks);
    let in_time = limit.is_none_or(|l| elapsed < l);
    let passed = bad.is_empty() && in_time;
    let detail = format!("{} checks, {:.3}s", checks.len(), elapsed.as_secs_f64());
    report(criterion, title, passed, &detail);
    for b in &bad {
        eprintln!("    failed: {b}");
    }
    if !in_time {
        eprintln!("    took {elapsed:?}, limit {limit:?}");
    }
    passed
}

fn criterion_01_relations() -> bool {
    let started = Instant::now();
    let checks = relation_checks();
    conclude(
        1,
        "relations and orders 4/8/16",
        &checks,
        started.elapsed(),
        Some(RELATIONS_LIMIT),
    )
}

fn criterion_02_finite_quotient_sizes() -> bool {
    let started = Instant::now();
    let checks = finite_group_checks().unwrap();
    assert_eq!(checks.len(), 4);
    conclude(
        2,
        "|A_m| = 2, 8, 128, 32768",
        &checks,
        started.elapsed(),
        Some(FINITE_GROUPS_LIMIT),
    )
}

fn criterion_03_psi_table_and_wreath_identities() -> bool {
    let started = Instant::now();
    let mut checks = wreath_checks().unwrap();
    checks.extend(psi_table_checks());
    assert_eq!(checks.len(), 10);
    conclude(
        3,
        "psi table and b, c, d as wreath products",
        &checks,
        started.elapsed(),
        Some(PSI_TABLE_LIMIT),
    )
}

fn criterion_04_ball_growth_and_key_agreement() -> bool {
    let started = Instant::now();
    let (out, ball_time) = ball();
    let series = &out.series;
    let mut checks = vec![Check {
        name: format!("radius {} >= 10 reached", series.radius()),
        passed: out.complete && series.radius() >= 10,
        detail: format!(
            "{} elements in {:.3}s",
            out.table.len(),
            ball_time.as_secs_f64()
        ),
    }];
    let growth = growth_bound_checks(out).unwrap();
    checks.extend(
        growth
            .into_iter()
            .filter(|c| c.name == "strictly-increasing" || c.name == "submultiplicative"),
    );
    let (mismatches, equal_pairs) = key_agreement(&out.table, KEY_SAMPLES, 4);
    checks.push(Check {
        name: format!("keys vs solver on {KEY_SAMPLES} pairs"),
        passed: mismatches == 0,
        detail: format!("{mismatches} mismatches, {equal_pairs} equal pairs"),
    });
    assert_eq!(checks.len(), 4);
    conclude(
        4,
        "ball to radius 14, monotone, submultiplicative, keys faithful",
        &checks,
        started.elapsed(),
        Some(BALL_LIMIT),
    )
}

fn criterion_05_section_length_bounds() -> bool {
    let (out, _) = ball();
    let started = Instant::now();
    let opts = VerifyOptions {
        key_samples: 0,
        ..VerifyOptions::default()
    };
    let checks: Vec<Check> = section_length_checks(&out.table, &opts)
        .unwrap()
        .into_iter()
        .take(3)
        .collect();
    conclude(
        5,
        "section length bounds on every ball element",
        &checks,
        started.elapsed(),
        None,
    )
}

fn criterion_06_cancellation() -> bool {
    let (out, _) = ball();
    let started = Instant::now();
    let checks = cancellation_checks(&out.table).unwrap();
    assert_eq!(checks.len(), 4);
    conclude(
        6,
        "level-3 cancellation and split inequalities",
        &checks,
        started.elapsed(),
        None,
    )
}

fn criterion_07_periodicity() -> bool {
    let (out, _) = ball();
    let started = Instant::now();
    let (histogram, exceeded) = order_distribution(&out.table, PERIODICITY_RADIUS);
    let expected: BTreeMap<u32, usize> = ORDER_HISTOGRAM.into_iter().collect();
    let checks = vec![
        Check {
            name: "every order is 2^k with k <= 30".into(),
            passed: exceeded == 0,
            detail: format!("{exceeded} exceeded"),
        },
        Check {
            name: "order distribution matches fixture".into(),
            passed: histogram == expected,
            detail: format!("{histogram:?}"),
        },
    ];
    conclude(
        7,
        "orders on the radius-8 ball",
        &checks,
        started.elapsed(),
        None,
    )
}

fn criterion_08_indices() -> bool {
    let started = Instant::now();
    let checks: Vec<Check> = index_checks(1)
        .unwrap()
        .into_iter()
        .filter(|c| c.name.starts_with("[G:St") || c.name.contains("<a,d>"))
        .collect();
    assert_eq!(checks.len(), 6);
    conclude(
        8,
        "stabilizer indices and <a,d>",
        &checks,
        started.elapsed(),
        None,
    )
}

fn criterion_09_eta_iterates() -> bool {
    let started = Instant::now();
    let distinct = eta_injectivity_run(ETA_COUNT).unwrap();
    let checks = vec![Check {
        name: format!("x_1..x_{ETA_COUNT} pairwise distinct"),
        passed: distinct,
        detail: String::new(),
    }];
    conclude(
        9,
        "eta iterates distinct",
        &checks,
        started.elapsed(),
        Some(ETA_LIMIT),
    )
}

fn criterion_10_growth_recursion() -> bool {
    let (out, _) = ball();
    let started = Instant::now();
    let checks: Vec<Check> = growth_bound_checks(out)
        .unwrap()
        .into_iter()
        .filter(|c| {
            c.name == "upper-recursion"
                || c.name == "sandwich"
                || c.name.starts_with("star convolution")
        })
        .collect();
    assert_eq!(checks.len(), 3);
    conclude(
        10,
        "upper recursion, star convolution oracle, sandwich",
        &checks,
        started.elapsed(),
        None,
    )
}

fn criterion_11_lower_bound_constants() -> bool {
    let (out, _) = ball();
    let started = Instant::now();
    let checks: Vec<Check> = growth_bound_checks(out)
        .unwrap()
        .into_iter()
        .filter(|c| c.name.starts_with("nu =") || c.name.starts_with("alpha >= 1"))
        .collect();
    assert_eq!(checks.len(), 2);
    conclude(
        11,
        "exponent formula and alpha >= 1 rejection",
        &checks,
        started.elapsed(),
        None,
    )
}

fn criterion_12_solver_scaling() -> bool {
    let started = Instant::now();
    let mut checks = Vec::new();
    for workload in [Workload::RandomReduced, Workload::IdentityWords] {
        let report = run_bench(&BenchConfig {
            max_len: 1 << 20,
            reps: 7,
            workload,
            ..BenchConfig::default()
        })
        .unwrap();
        let verdict = report.verdict();
        checks.push(Check {
            name: format!("{workload:?} up to 2^20 letters"),
            passed: verdict.passed,
            detail: format!(
                "top doubling ratios {:.3?}, log-log slope {:.3?}",
                verdict.top_ratios, verdict.slope
            ),
        });
    }
    for c in &checks {
        println!("    {}: {}", c.name, c.detail);
    }
    conclude(
        12,
        "solver time per doubling",
        &checks,
        started.elapsed(),
        Some(BENCH_LIMIT),
    )
}

type Criterion = (u32, &'static str, fn() -> bool);

const CRITERIA: [Criterion; 12] = [
    (1, "relations", criterion_01_relations),
    (
        2,
        "finite quotient sizes",
        criterion_02_finite_quotient_sizes,
    ),
    (
        3,
        "psi table and wreath identities",
        criterion_03_psi_table_and_wreath_identities,
    ),
    (
        4,
        "ball growth and key agreement",
        criterion_04_ball_growth_and_key_agreement,
    ),
    (
        5,
        "section length bounds",
        criterion_05_section_length_bounds,
    ),
    (6, "cancellation", criterion_06_cancellation),
    (7, "periodicity", criterion_07_periodicity),
    (8, "indices", criterion_08_indices),
    (9, "eta iterates", criterion_09_eta_iterates),
    (10, "growth recursion", criterion_10_growth_recursion),
    (
        11,
        "lower bound constants",
        criterion_11_lower_bound_constants,
    ),
    (12, "solver scaling", criterion_12_solver_scaling),
];

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failures = 0;
    let mut ran = 0;
    for (n, name, run) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        match catch_unwind(AssertUnwindSafe(run)) {
            Ok(true) => {}
            Ok(false) => failures += 1,
            Err(_) => {
                // the panic message is already on stderr
                println!("[FAIL] criterion {n}: {name} (panicked)");
                failures += 1;
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
