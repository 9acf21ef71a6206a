//! Cayley-ball enumeration and growth-series checks.

mod ball;
pub mod bounds;
pub mod cache;
mod series;

pub use ball::{
    default_key_depth, enumerate_ball, minimum_key_depth, BallConfig, BallEntry, BallOutcome,
    BallTable, DEFAULT_RADIUS_CAP,
};
pub use bounds::{
    check_monotone, check_submultiplicative, lower_bound_constants, preceq_witness,
    search_lower_recursion, star_convolution, star_convolution_lower, verify_lower_recursion,
    verify_sandwich, verify_upper_recursion, verify_upper_recursion_shifted, BoundReport,
    ConstantBranch, LowerBoundConstants, Outcome, PointVerdict,
};
pub use series::{export_series, ln_big, GrowthSeries, SeriesFormat, SeriesMeta, SeriesRow};
