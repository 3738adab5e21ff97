//! Built-in solvers for assembled instances: a simplex LP core, depth-first
//! branch-and-bound for the slab binaries, outer approximation for the
//! convex quadratic volume bounds, and MPS export for external solvers.

mod lp;
pub mod milp;
pub mod mps;
pub mod oa;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelInstance;

pub use lp::solve_lp;
pub use milp::solve_milp;
pub use mps::{export_mps, read_mps, write_mps};
pub use oa::solve_convex_qcqp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchRule {
    /// Binary closest to one half; ties go to the lowest index.
    #[default]
    MostFractional,
    /// Lowest-index fractional binary.
    FirstFractional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Row and bound slack accepted for incumbents.
    pub feasibility_tol: f64,
    /// Relative gap at which a node is pruned and the search stops.
    pub optimality_tol: f64,
    /// Largest quadratic violation left when outer approximation stops.
    pub cut_tol: f64,
    /// Distance from an integer below which a binary counts as integral.
    pub integrality_tol: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    /// Outer-approximation rounds before giving up.
    pub max_cut_rounds: usize,
    pub branching: BranchRule,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-6,
            cut_tol: 1e-6,
            integrality_tol: 1e-6,
            node_limit: 100_000,
            time_limit: None,
            max_cut_rounds: 500,
            branching: BranchRule::MostFractional,
        }
    }
}

impl SolverOptions {
    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(Duration::from_secs_f64(seconds));
        self
    }

    pub fn check(&self) -> Result<()> {
        let tols = [
            self.feasibility_tol,
            self.optimality_tol,
            self.cut_tol,
            self.integrality_tol,
        ];
        if tols.iter().all(|t| t.is_finite() && *t > 0.0) && self.integrality_tol < 0.5 {
            Ok(())
        } else {
            Err(Error::Solver("tolerances must be positive".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    LimitHit,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub lp_solves: usize,
    pub iterations: u64,
    pub nodes: usize,
    pub cuts: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    /// Best point found; empty when none exists.
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven lower bound.
    pub bound: f64,
    pub stats: SolveStats,
    pub message: Option<String>,
}

impl Solution {
    pub(crate) fn without_point(status: Status, stats: SolveStats, message: Option<String>) -> Self {
        let (objective, bound) = match status {
            Status::Unbounded => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            _ => (f64::INFINITY, f64::INFINITY),
        };
        Self {
            status,
            values: Vec::new(),
            objective,
            bound,
            stats,
            message,
        }
    }

    pub fn has_point(&self) -> bool {
        !self.values.is_empty()
    }

    /// Relative distance between objective and bound.
    pub fn gap(&self) -> f64 {
        if !self.objective.is_finite() || !self.bound.is_finite() {
            return f64::INFINITY;
        }
        (self.objective - self.bound).abs() / self.objective.abs().max(1.0)
    }
}

/// Picks the solver that matches the instance: outer approximation when it
/// carries quadratics, branch-and-bound when it carries binaries, else LP.
pub fn solve(instance: &ModelInstance, options: &SolverOptions) -> Result<Solution> {
    if !instance.quadratics.is_empty() {
        solve_convex_qcqp(instance, options)
    } else if !instance.integer_vars().is_empty() {
        solve_milp(instance, options)
    } else {
        solve_lp(instance, options)
    }
}
