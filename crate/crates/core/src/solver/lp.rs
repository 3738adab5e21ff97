use std::time::{Duration, Instant};

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, SolveOptions, Variable};

use super::{Solution, SolveStats, SolverOptions, Status};
use crate::error::{Error, Result};
use crate::model::{ModelInstance, Relation};

/// Continuous relaxation of an instance, ready for the simplex core.
pub(crate) struct Relaxation {
    problem: Problem,
    vars: Vec<Variable>,
}

/// Outcome of one LP solve or warm-started edit.
pub(crate) enum LpResult {
    Optimal(Box<microlp::Solution>),
    Infeasible,
    Unbounded,
    Limit(String),
}

fn op(relation: Relation) -> ComparisonOp {
    match relation {
        Relation::Le => ComparisonOp::Le,
        Relation::Eq => ComparisonOp::Eq,
        Relation::Ge => ComparisonOp::Ge,
    }
}

pub(crate) fn expr(vars: &[Variable], terms: &[(usize, f64)]) -> LinearExpr {
    let mut e = LinearExpr::empty();
    for &(j, a) in terms {
        e.add(vars[j], a);
    }
    e
}

pub(crate) fn remaining(deadline: Option<Instant>) -> Option<Duration> {
    deadline.map(|d| d.saturating_duration_since(Instant::now()))
}

pub(crate) fn classify(outcome: std::result::Result<microlp::SolveOutcome, microlp::Error>) -> LpResult {
    match outcome {
        Ok(microlp::SolveOutcome::Solution(s)) => LpResult::Optimal(Box::new(s)),
        Ok(microlp::SolveOutcome::Interrupted(_)) => LpResult::Limit("time limit".into()),
        Err(microlp::Error::Infeasible) => LpResult::Infeasible,
        Err(microlp::Error::Unbounded) => LpResult::Unbounded,
        Err(e) => LpResult::Limit(format!("numerical breakdown: {e}")),
    }
}

impl Relaxation {
    /// Integer variables become continuous within their bounds.
    pub fn new(instance: &ModelInstance) -> Self {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = instance
            .catalog
            .iter()
            .zip(&instance.objective)
            .map(|(v, &c)| problem.add_var(c, (v.lower, v.upper)))
            .collect();
        for row in &instance.constraints {
            problem.add_constraint(expr(&vars, &row.terms), op(row.relation), row.rhs);
        }
        Self { problem, vars }
    }

    pub fn add_row(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        self.problem
            .add_constraint(expr(&self.vars, terms), op(relation), rhs);
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn solve(&self, deadline: Option<Instant>) -> LpResult {
        let mut options = SolveOptions::default();
        options.time_limit = remaining(deadline);
        classify(self.problem.solve_with(options))
    }

    pub fn values(&self, solution: &microlp::Solution) -> Vec<f64> {
        self.vars
            .iter()
            .map(|&v| solution.var_value_raw(v))
            .collect()
    }
}

/// Adds a row to a solved LP and re-optimizes from the previous basis.
pub(crate) fn add_row_warm(
    solution: microlp::Solution,
    vars: &[Variable],
    terms: &[(usize, f64)],
    relation: Relation,
    rhs: f64,
) -> LpResult {
    classify(solution.add_constraint(expr(vars, terms), op(relation), rhs))
}

/// Fixes a variable of a solved LP and re-optimizes from the previous basis.
pub(crate) fn fix_warm(solution: microlp::Solution, var: Variable, value: f64) -> LpResult {
    classify(solution.fix_var(var, value))
}

pub(crate) fn iterations(solution: &microlp::Solution) -> u64 {
    solution.stats().lp_iterations
}

/// Solves an instance with no binaries and no quadratic rows.
pub fn solve_lp(instance: &ModelInstance, options: &SolverOptions) -> Result<Solution> {
    options.check()?;
    if !instance.quadratics.is_empty() {
        return Err(Error::Solver(
            "instance has quadratic constraints; use solve_convex_qcqp".into(),
        ));
    }
    if !instance.integer_vars().is_empty() {
        return Err(Error::Solver(
            "instance has integer variables; use solve_milp".into(),
        ));
    }
    let start = Instant::now();
    let deadline = options.time_limit.map(|t| start + t);
    let relaxation = Relaxation::new(instance);
    let result = relaxation.solve(deadline);
    let mut stats = SolveStats {
        lp_solves: 1,
        ..SolveStats::default()
    };
    let out = match result {
        LpResult::Optimal(s) => {
            stats.iterations = iterations(&s);
            let values = relaxation.values(&s);
            let objective = instance.objective_value(&values);
            Solution {
                status: Status::Optimal,
                values,
                objective,
                bound: objective,
                stats,
                message: None,
            }
        }
        LpResult::Infeasible => Solution::without_point(Status::Infeasible, stats, None),
        LpResult::Unbounded => Solution::without_point(Status::Unbounded, stats, None),
        LpResult::Limit(msg) => Solution::without_point(Status::LimitHit, stats, Some(msg)),
    };
    Ok(finish(out, start))
}

/// Values this close to zero are simplex round-off.
const ZERO_SNAP: f64 = 1e-12;

pub(crate) fn finish(mut solution: Solution, start: Instant) -> Solution {
    for x in &mut solution.values {
        if x.abs() <= ZERO_SNAP {
            *x = 0.0;
        }
    }
    solution.stats.wall_seconds = start.elapsed().as_secs_f64();
    solution
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Family, InstanceBuilder, ModelKind};

    fn tiny() -> InstanceBuilder {
        let mut b = InstanceBuilder::new();
        let x = b.free("x".into());
        b.objective[x] = 1.0;
        b.row("LB".into(), Family::Other, vec![(x, 1.0)], Relation::Ge, 3.0);
        b
    }

    #[test]
    fn min_x_above_three() {
        let inst = tiny().finish(ModelKind::Cuva, None);
        let s = solve_lp(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.values[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut b = tiny();
        b.row("UB".into(), Family::Other, vec![(0, 1.0)], Relation::Le, 1.0);
        let s = solve_lp(&b.finish(ModelKind::Cuva, None), &SolverOptions::default()).unwrap();
        assert_eq!(s.status, Status::Infeasible);

        let mut b = InstanceBuilder::new();
        let x = b.free("x".into());
        b.objective[x] = -1.0;
        let s = solve_lp(&b.finish(ModelKind::Cuva, None), &SolverOptions::default()).unwrap();
        assert_eq!(s.status, Status::Unbounded);
    }
}
