use std::rc::Rc;
use std::time::Instant;

use log::debug;

use super::lp::{finish, fix_warm, iterations, LpResult, Relaxation};
use super::{BranchRule, Solution, SolveStats, SolverOptions, Status};
use crate::error::{Error, Result};
use crate::model::ModelInstance;

struct Node {
    parent: Rc<microlp::Solution>,
    var: usize,
    value: f64,
    /// Relaxation value of the parent, a lower bound for this node.
    bound: f64,
}

struct Incumbent {
    values: Vec<f64>,
    objective: f64,
}

/// Whether `x` satisfies every row and bound up to a magnitude-scaled
/// tolerance.
pub(crate) fn satisfies(instance: &ModelInstance, x: &[f64], tol: f64) -> bool {
    let rows_ok = instance.constraints.iter().all(|c| {
        let scale = c
            .terms
            .iter()
            .map(|&(j, a)| (a * x[j]).abs())
            .fold(c.rhs.abs(), f64::max);
        c.violation(x) <= tol * (1.0 + scale)
    });
    let bounds_ok = instance
        .catalog
        .iter()
        .zip(x)
        .all(|(v, &xi)| xi >= v.lower - tol * (1.0 + xi.abs()) && xi <= v.upper + tol * (1.0 + xi.abs()));
    rows_ok && bounds_ok
}

fn fractional(x: f64, tol: f64) -> Option<f64> {
    let f = x - x.floor();
    if f > tol && f < 1.0 - tol {
        Some(f)
    } else {
        None
    }
}

fn pick_branch(integers: &[usize], x: &[f64], tol: f64, rule: BranchRule) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in integers {
        let Some(f) = fractional(x[j], tol) else {
            continue;
        };
        match rule {
            BranchRule::FirstFractional => return Some(j),
            BranchRule::MostFractional => {
                let score = f.min(1.0 - f);
                if best.is_none_or(|(_, s)| score > s) {
                    best = Some((j, score));
                }
            }
        }
    }
    best.map(|(j, _)| j)
}

/// Refills the slab chains of a relaxation point and rounds the remaining
/// binaries; returns the point when it stays feasible.
fn repair(instance: &ModelInstance, x: &[f64], integers: &[usize], tol: f64) -> Option<Vec<f64>> {
    let mut y = x.to_vec();
    for chain in &instance.slab_chains {
        chain.refill(&mut y);
    }
    for &j in integers {
        y[j] = y[j].round();
    }
    satisfies(instance, &y, tol).then_some(y)
}

/// Branch-and-bound over the LP relaxation: most-fractional branching,
/// depth-first dives toward the rounded value, and best-bound restarts when
/// a dive ends.
pub fn solve_milp(instance: &ModelInstance, options: &SolverOptions) -> Result<Solution> {
    options.check()?;
    if !instance.quadratics.is_empty() {
        return Err(Error::Solver(
            "instance has quadratic constraints; use solve_convex_qcqp".into(),
        ));
    }
    let start = Instant::now();
    let deadline = options.time_limit.map(|t| start + t);
    let integers = instance.integer_vars();
    let relaxation = Relaxation::new(instance);
    let mut stats = SolveStats::default();

    let root = relaxation.solve(deadline);
    stats.lp_solves += 1;
    let root = match root {
        LpResult::Optimal(s) => s,
        LpResult::Infeasible => {
            return Ok(finish(
                Solution::without_point(Status::Infeasible, stats, None),
                start,
            ))
        }
        LpResult::Unbounded => {
            return Ok(finish(
                Solution::without_point(Status::Unbounded, stats, None),
                start,
            ))
        }
        LpResult::Limit(msg) => {
            return Ok(finish(
                Solution::without_point(Status::LimitHit, stats, Some(msg)),
                start,
            ))
        }
    };

    let mut incumbent: Option<Incumbent> = None;
    let mut pool: Vec<Node> = Vec::new();
    // smallest bound among nodes discarded by the incumbent test
    let mut pruned_bound = f64::INFINITY;
    let mut limit: Option<String> = None;
    let mut current: Option<Box<microlp::Solution>> = Some(root);

    let cutoff = |inc: &Option<Incumbent>| {
        inc.as_ref().map_or(f64::INFINITY, |i| {
            i.objective - options.optimality_tol * i.objective.abs().max(1.0)
        })
    };

    loop {
        if let Some(sol) = current.take() {
            stats.nodes += 1;
            stats.iterations = stats.iterations.max(iterations(&sol));
            let x = relaxation.values(&sol);
            let obj = instance.objective_value(&x);
            if obj >= cutoff(&incumbent) {
                pruned_bound = pruned_bound.min(obj);
            } else {
                match pick_branch(&integers, &x, options.integrality_tol, options.branching) {
                    None => {
                        let mut values = x;
                        for &j in &integers {
                            values[j] = values[j].round();
                        }
                        debug!("node {}: integral point {obj}", stats.nodes);
                        incumbent = Some(Incumbent {
                            values,
                            objective: obj,
                        });
                    }
                    Some(var) => {
                        if let Some(y) = repair(instance, &x, &integers, options.feasibility_tol) {
                            let value = instance.objective_value(&y);
                            if incumbent.as_ref().is_none_or(|i| value < i.objective) {
                                debug!("node {}: repaired incumbent {value}", stats.nodes);
                                incumbent = Some(Incumbent {
                                    values: y,
                                    objective: value,
                                });
                            }
                        }
                        if obj >= cutoff(&incumbent) {
                            pruned_bound = pruned_bound.min(obj);
                        } else {
                            let parent = Rc::new(*sol);
                            let up_first = x[var] >= 0.5;
                            let (first, second) = if up_first { (1.0, 0.0) } else { (0.0, 1.0) };
                            pool.push(Node {
                                parent: Rc::clone(&parent),
                                var,
                                value: second,
                                bound: obj,
                            });
                            pool.push(Node {
                                parent,
                                var,
                                value: first,
                                bound: obj,
                            });
                        }
                    }
                }
            }
        }

        if stats.nodes >= options.node_limit {
            limit = Some(format!("node limit {}", options.node_limit));
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            limit = Some("time limit".into());
            break;
        }

        // dive into the newest child when it was just pushed, else restart
        // from the best bound
        let node = match pool.last() {
            Some(last) if last.bound < cutoff(&incumbent) && last.parent_is_fresh() => pool.pop(),
            _ => {
                let best = pool
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.bound.total_cmp(&b.1.bound))
                    .map(|(k, _)| k);
                best.map(|k| pool.swap_remove(k))
            }
        };
        let Some(node) = node else { break };
        if node.bound >= cutoff(&incumbent) {
            pruned_bound = pruned_bound.min(node.bound);
            continue;
        }
        let parent = Rc::try_unwrap(node.parent).unwrap_or_else(|rc| (*rc).clone());
        stats.lp_solves += 1;
        match fix_warm(parent, relaxation.vars()[node.var], node.value) {
            LpResult::Optimal(s) => current = Some(s),
            LpResult::Infeasible => {}
            LpResult::Unbounded => {
                return Ok(finish(
                    Solution::without_point(Status::Unbounded, stats, None),
                    start,
                ))
            }
            LpResult::Limit(msg) => {
                limit = Some(msg);
                break;
            }
        }
    }

    let open_bound = pool
        .iter()
        .map(|n| n.bound)
        .fold(f64::INFINITY, f64::min);
    let out = match (incumbent, limit) {
        (Some(inc), None) => Solution {
            status: Status::Optimal,
            bound: pruned_bound.min(inc.objective),
            objective: inc.objective,
            values: inc.values,
            stats,
            message: None,
        },
        (Some(inc), Some(msg)) => Solution {
            status: Status::LimitHit,
            bound: open_bound.min(pruned_bound).min(inc.objective),
            objective: inc.objective,
            values: inc.values,
            stats,
            message: Some(msg),
        },
        (None, None) => Solution::without_point(Status::Infeasible, stats, None),
        (None, Some(msg)) => {
            let mut s = Solution::without_point(Status::LimitHit, stats, Some(msg));
            s.bound = open_bound.min(pruned_bound);
            s
        }
    };
    Ok(finish(out, start))
}

impl Node {
    /// Children of the node processed last still share its solution with
    /// their sibling.
    fn parent_is_fresh(&self) -> bool {
        Rc::strong_count(&self.parent) == 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Family, InstanceBuilder, ModelKind, Relation};
    use crate::solver::solve_lp;

    /// max 5a + 4b + 3c s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11,
    /// 3a + 4b + 2c <= 8, binaries.
    fn knapsack() -> ModelInstance {
        let mut b = InstanceBuilder::new();
        let v: Vec<usize> = (0..3).map(|k| b.binary(format!("B{k}"))).collect();
        for (k, c) in [5.0, 4.0, 3.0].into_iter().enumerate() {
            b.objective[v[k]] = -c;
        }
        for (r, (coef, rhs)) in [([2.0, 3.0, 1.0], 5.0), ([4.0, 1.0, 2.0], 11.0), ([3.0, 4.0, 2.0], 8.0)]
            .into_iter()
            .enumerate()
        {
            let terms = v.iter().zip(coef).map(|(&j, a)| (j, a)).collect();
            b.row(format!("R{r}"), Family::Other, terms, Relation::Le, rhs);
        }
        b.finish(ModelKind::Uva, None)
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let inst = knapsack();
        let mut best = f64::INFINITY;
        for mask in 0..8u32 {
            let x: Vec<f64> = (0..3).map(|k| f64::from((mask >> k) & 1)).collect();
            if satisfies(&inst, &x, 0.0) {
                best = best.min(inst.objective_value(&x));
            }
        }
        let s = solve_milp(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.objective - best).abs() < 1e-9, "{} vs {best}", s.objective);
        assert!(s.bound <= s.objective + 1e-9);
    }

    #[test]
    fn no_binaries_matches_lp() {
        let mut b = InstanceBuilder::new();
        let x = b.var("x".into(), 0.0, 10.0);
        let y = b.var("y".into(), 0.0, 10.0);
        b.objective[x] = 1.0;
        b.objective[y] = 2.0;
        b.row("S".into(), Family::Other, vec![(x, 1.0), (y, 1.0)], Relation::Ge, 4.0);
        let inst = b.finish(ModelKind::Uva, None);
        let a = solve_milp(&inst, &SolverOptions::default()).unwrap();
        let l = solve_lp(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(a.values, l.values);
        assert_eq!(a.objective, l.objective);
    }

    #[test]
    fn node_limit_reports_bound() {
        let opts = SolverOptions {
            node_limit: 1,
            ..SolverOptions::default()
        };
        let s = solve_milp(&knapsack(), &opts).unwrap();
        if s.status == Status::LimitHit {
            assert!(s.bound <= s.objective || !s.has_point());
        }
    }

    #[test]
    fn branch_picks_most_fractional_lowest_index() {
        let x = [0.5, 0.3, 0.5, 1.0];
        assert_eq!(pick_branch(&[0, 1, 2, 3], &x, 1e-6, BranchRule::MostFractional), Some(0));
        assert_eq!(pick_branch(&[1, 2], &x, 1e-6, BranchRule::MostFractional), Some(2));
        assert_eq!(pick_branch(&[3], &x, 1e-6, BranchRule::MostFractional), None);
        assert_eq!(pick_branch(&[1, 2], &x, 1e-6, BranchRule::FirstFractional), Some(1));
    }
}
