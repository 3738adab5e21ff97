use std::time::Instant;

use log::debug;

use super::lp::{add_row_warm, finish, iterations, LpResult, Relaxation};
use super::{solve_lp, Solution, SolveStats, SolverOptions, Status};
use crate::error::{Error, Result};
use crate::model::{ModelInstance, QuadraticConstraint, Relation};

/// Rounds without a shrinking violation before the loop gives up.
const STAGNATION_ROUNDS: usize = 25;

fn offset_range(instance: &ModelInstance, q: &QuadraticConstraint) -> (f64, f64) {
    let v = instance.catalog.get(q.offset_var);
    let lo = if v.lower.is_finite() { v.lower } else { -10.0 };
    let hi = if v.upper.is_finite() { v.upper } else { 10.0 };
    (lo, hi)
}

type Cut = (Vec<(usize, f64)>, f64);

/// One tangent per quadratic at the offset nearest zero on the side where
/// the bound is positive. Optimal offsets sit close to zero, and extra seeds
/// further out only enlarge the first LP without removing later cuts.
fn seed_cuts(instance: &ModelInstance) -> Vec<Cut> {
    instance
        .quadratics
        .iter()
        .map(|q| {
            let (lo, hi) = offset_range(instance, q);
            let u0 = if lo <= 0.0 && hi >= 0.0 {
                0.0
            } else if hi < 0.0 {
                hi
            } else {
                lo
            };
            q.tangent(u0)
        })
        .collect()
}

/// Outer approximation: solve the LP over the tangent cuts collected so far,
/// add a tangent at the current offset for every violated quadratic, repeat
/// until no quadratic is violated by more than the cut tolerance.
pub fn solve_convex_qcqp(instance: &ModelInstance, options: &SolverOptions) -> Result<Solution> {
    options.check()?;
    if !instance.integer_vars().is_empty() {
        return Err(Error::Solver(
            "instance has integer variables; outer approximation needs a convex model".into(),
        ));
    }
    if let Some(q) = instance.quadratics.iter().find(|q| q.chi[0] < 0.0) {
        return Err(Error::Convexity(format!(
            "{}: leading coefficient {} < 0",
            q.name, q.chi[0]
        )));
    }
    if instance.quadratics.is_empty() {
        return solve_lp(instance, options);
    }
    let start = Instant::now();
    let deadline = options.time_limit.map(|t| start + t);
    let mut stats = SolveStats::default();
    let cuts = seed_cuts(instance);
    stats.cuts = cuts.len();
    let mut relaxation = Relaxation::new(instance);
    for (terms, rhs) in &cuts {
        relaxation.add_row(terms, Relation::Ge, *rhs);
    }
    let vars = relaxation.vars().to_vec();
    let mut result = relaxation.solve(deadline);
    stats.lp_solves += 1;

    let mut best_violation = f64::INFINITY;
    let mut stale = 0;
    let mut last_objective = f64::NEG_INFINITY;
    for round in 0..options.max_cut_rounds {
        let sol = match result {
            LpResult::Optimal(s) => s,
            LpResult::Infeasible => {
                let s = Solution::without_point(Status::Infeasible, stats, None);
                return Ok(finish(s, start));
            }
            LpResult::Unbounded => {
                let s = Solution::without_point(Status::Unbounded, stats, None);
                return Ok(finish(s, start));
            }
            LpResult::Limit(msg) => {
                let s = Solution::without_point(Status::LimitHit, stats, Some(msg));
                return Ok(finish(s, start));
            }
        };
        stats.iterations = stats.iterations.max(iterations(&sol));
        let x = relaxation_values(&vars, &sol);
        let objective = instance.objective_value(&x);
        debug_assert!(objective >= last_objective - 1e-7 * last_objective.abs().max(1.0));
        last_objective = objective;

        let violated: Vec<(&QuadraticConstraint, f64)> = instance
            .quadratics
            .iter()
            .map(|q| (q, q.violation(&x)))
            .filter(|&(_, v)| v > options.cut_tol)
            .collect();
        let worst = violated.iter().map(|&(_, v)| v).fold(0.0, f64::max);
        debug!(
            "round {round}: objective {objective}, {} violated, worst {worst}, {:.3}s",
            violated.len(),
            start.elapsed().as_secs_f64()
        );
        if violated.is_empty() {
            stats.nodes = round + 1;
            let s = Solution {
                status: Status::Optimal,
                values: x,
                objective,
                bound: objective,
                stats,
                message: None,
            };
            return Ok(finish(s, start));
        }
        if worst < best_violation * 0.999 {
            best_violation = worst;
            stale = 0;
        } else {
            stale += 1;
        }
        let limit = if stale >= STAGNATION_ROUNDS {
            Some(format!("cut stagnation: violation stuck at {best_violation:e}"))
        } else if deadline.is_some_and(|d| Instant::now() >= d) {
            Some("time limit".into())
        } else {
            None
        };
        if let Some(msg) = limit {
            let s = Solution {
                status: Status::LimitHit,
                values: x,
                objective,
                bound: objective,
                stats,
                message: Some(msg),
            };
            return Ok(finish(s, start));
        }

        let fresh: Vec<Cut> = violated
            .iter()
            .map(|(q, _)| q.tangent(x[q.offset_var]))
            .collect();
        stats.cuts += fresh.len();
        // each cut re-optimizes from the previous basis
        let mut current = LpResult::Optimal(sol);
        for (terms, rhs) in &fresh {
            current = match current {
                LpResult::Optimal(s) => {
                    stats.lp_solves += 1;
                    add_row_warm(*s, &vars, terms, Relation::Ge, *rhs)
                }
                other => other,
            };
        }
        result = current;
    }
    let s = Solution::without_point(
        Status::LimitHit,
        stats,
        Some(format!("{} cut rounds", options.max_cut_rounds)),
    );
    Ok(finish(s, start))
}

fn relaxation_values(vars: &[microlp::Variable], sol: &microlp::Solution) -> Vec<f64> {
    vars.iter().map(|&v| sol.var_value_raw(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Family, InstanceBuilder, ModelKind};
    use proptest::prelude::*;

    /// One section with cut fit (1, -10, 0), offset forced to -2.
    fn parabola() -> ModelInstance {
        let mut b = InstanceBuilder::new();
        let v = b.nonneg("VP".into());
        let u = b.var("U".into(), -3.0, 3.0);
        b.objective[v] = 1.0;
        b.row("FIX".into(), Family::Other, vec![(u, 1.0)], Relation::Eq, -2.0);
        b.quadratics.push(QuadraticConstraint {
            name: "VOLQ_0_0_0_CUT".into(),
            volume_vars: vec![v],
            offset_var: u,
            chi: [1.0, -10.0, 0.0],
        });
        b.finish(ModelKind::Cuva, None)
    }

    #[test]
    fn converges_on_the_parabola() {
        let s = solve_convex_qcqp(&parabola(), &SolverOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.values[0] - 24.0).abs() < 1e-6, "{}", s.values[0]);
        assert!(s.bound <= s.objective + 1e-9);
    }

    #[test]
    fn without_quadratics_it_is_an_lp() {
        let mut inst = parabola();
        inst.quadratics.clear();
        let a = solve_convex_qcqp(&inst, &SolverOptions::default()).unwrap();
        let b = solve_lp(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(a, Solution { stats: a.stats.clone(), ..b });
    }

    #[test]
    fn concave_is_refused() {
        let mut inst = parabola();
        inst.quadratics[0].chi[0] = -1.0;
        assert!(matches!(
            solve_convex_qcqp(&inst, &SolverOptions::default()),
            Err(Error::Convexity(_))
        ));
    }

    proptest! {
        #[test]
        fn tangents_never_cut_feasible_points(
            q in 0.0..5.0f64, l in -20.0..20.0f64, c in -5.0..5.0f64,
            u0 in -3.0..3.0f64, u in -3.0..3.0f64, slack in 0.0..10.0f64,
        ) {
            let quad = QuadraticConstraint {
                name: "Q".into(),
                volume_vars: vec![0],
                offset_var: 1,
                chi: [q, l, c],
            };
            let x = [quad.bound(u) + slack, u];
            let (terms, rhs) = quad.tangent(u0);
            let lhs: f64 = terms.iter().map(|&(j, a)| a * x[j]).sum();
            prop_assert!(lhs >= rhs - 1e-9 * (1.0 + rhs.abs()));
        }
    }
}
