//! Independent reference implementations: exhaustive offset-grid search with
//! exact allocation pricing, the angle-based trapezoid volume baseline, and
//! the model-versus-model comparison harness.

mod angle;
mod brute;
mod compare;
mod flow;

pub use angle::{angle_baseline_fit, AngleFit, LOW_R_SQUARED};
pub use brute::{brute_force_optimum, grid_values, BruteForceResult, GridSpec};
pub use compare::{
    angle_fit_set, compare_models, write_comparison_csv, ComparisonRow, ComparisonTable, Variant,
    COMPARISON_HEADER,
};
