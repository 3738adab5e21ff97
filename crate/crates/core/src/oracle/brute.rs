use log::debug;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::flow::FlowGraph;
use crate::error::{Error, Result};
use crate::geometry::CrossSectionSet;
use crate::model::{Owner, SlabSet, VolumeCaps};
use crate::network::{PitKind, RoadNetwork};

const CONSISTENCY_TOL: f64 = 1e-7;
const GRADE_TOL: f64 = 1e-9;
const SATURATION_TOL: f64 = 1e-9;

/// Offset grid: every owner takes the multiples of `step` inside its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step: f64,
    /// Largest number of combinations the search may enumerate.
    pub cap: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    /// Best cost; infinite when no grid point is feasible.
    pub cost: f64,
    /// Offsets of every road section at the best grid point.
    pub offsets: Option<Vec<Vec<f64>>>,
    pub intersection_offsets: Option<Vec<f64>>,
    pub combinations: u128,
    /// Grid points admitting a spline within the grade bounds.
    pub spline_feasible: usize,
    /// Grid points whose volumes can also be allocated.
    pub allocation_feasible: usize,
}

/// Multiples of `step` inside `[lo, hi]`.
pub fn grid_values(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Whether a road's section elevations admit a quadratic spline with value
/// and slope continuity at the knots and grades within bounds.
struct SplineCheck {
    rows: DMatrix<f64>,
    /// Left inverse of `rows` when it has full column rank.
    pinv: Option<DMatrix<f64>>,
    /// Slope rows at both ends of every segment.
    slopes: DMatrix<f64>,
    continuity_rows: usize,
    grade: (f64, f64),
}

impl SplineCheck {
    fn new(net: &RoadNetwork, road: usize) -> Result<Self> {
        let r = &net.roads[road];
        let ng = r.segments.len();
        let cont = 2 * (ng - 1);
        let mut rows = DMatrix::zeros(cont + r.sections.len(), 3 * ng);
        for g in 1..ng {
            let t = r.segments[g].start_station - r.segments[g - 1].start_station;
            let (p, c) = (3 * (g - 1), 3 * g);
            let k = 2 * (g - 1);
            rows[(k, p)] = 1.0;
            rows[(k, p + 1)] = t;
            rows[(k, p + 2)] = t * t;
            rows[(k, c)] = -1.0;
            rows[(k + 1, p + 1)] = 1.0;
            rows[(k + 1, p + 2)] = 2.0 * t;
            rows[(k + 1, c + 1)] = -1.0;
        }
        for (j, sec) in r.sections.iter().enumerate() {
            let (g, _) = net.segment_of(road, j)?;
            let t = sec.station - r.segments[g].start_station;
            rows[(cont + j, 3 * g)] = 1.0;
            rows[(cont + j, 3 * g + 1)] = t;
            rows[(cont + j, 3 * g + 2)] = t * t;
        }
        let mut slopes = DMatrix::zeros(2 * ng, 3 * ng);
        for (g, seg) in r.segments.iter().enumerate() {
            slopes[(2 * g, 3 * g + 1)] = 1.0;
            slopes[(2 * g + 1, 3 * g + 1)] = 1.0;
            slopes[(2 * g + 1, 3 * g + 2)] = 2.0 * seg.length;
        }
        let svd = rows.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let full_rank = svd.rank(1e-10 * smax.max(1.0)) == 3 * ng;
        let pinv = if full_rank {
            Some(
                svd.pseudo_inverse(1e-10 * smax.max(1.0))
                    .map_err(|e| Error::SingularGeometry(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self {
            rows,
            pinv,
            slopes,
            continuity_rows: cont,
            grade: (net.config.grade_min, net.config.grade_max),
        })
    }

    fn feasible(&self, elevations: &[f64]) -> bool {
        let mut b = DVector::zeros(self.rows.nrows());
        for (j, &e) in elevations.iter().enumerate() {
            b[self.continuity_rows + j] = e;
        }
        match &self.pinv {
            Some(pinv) => {
                let a = pinv * &b;
                let scale = 1.0 + b.amax();
                let residual = (&self.rows * &a - &b).amax();
                if residual > CONSISTENCY_TOL * scale {
                    return false;
                }
                (&self.slopes * &a)
                    .iter()
                    .all(|&s| s >= self.grade.0 - GRADE_TOL && s <= self.grade.1 + GRADE_TOL)
            }
            None => self.feasible_lp(&b),
        }
    }

    /// Feasibility LP for roads whose spline is not pinned down by the
    /// section values alone.
    fn feasible_lp(&self, b: &DVector<f64>) -> bool {
        use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = (0..self.rows.ncols())
            .map(|_| p.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        let expr = |m: &DMatrix<f64>, r: usize| {
            let mut e = LinearExpr::empty();
            for (k, &v) in vars.iter().enumerate() {
                if m[(r, k)] != 0.0 {
                    e.add(v, m[(r, k)]);
                }
            }
            e
        };
        for r in 0..self.rows.nrows() {
            p.add_constraint(expr(&self.rows, r), ComparisonOp::Eq, b[r]);
        }
        for r in 0..self.slopes.nrows() {
            p.add_constraint(expr(&self.slopes, r), ComparisonOp::Ge, self.grade.0);
            p.add_constraint(expr(&self.slopes, r), ComparisonOp::Le, self.grade.1);
        }
        p.solve().is_ok()
    }
}

/// Where a road end meets an intersection: `(e, start?)`.
fn junction_ends(net: &RoadNetwork) -> Vec<(usize, usize, usize, bool)> {
    let mut out = Vec::new();
    for (e, inter) in net.intersections.iter().enumerate() {
        for a in &inter.attachments {
            out.push((e, a.road, a.section, a.section == 0));
        }
    }
    out
}

/// Prices one material: volumes are lower-bounded by `required`, per-haul
/// volumes and injections respect the caps, flows move along the road in
/// both directions, through intersections and to or from pits.
struct Transport<'a> {
    net: &'a RoadNetwork,
    owners: &'a [Owner],
    caps: &'a VolumeCaps,
    junctions: Vec<(usize, usize, usize, bool)>,
}

impl Transport<'_> {
    /// `required[o] = (cut, fill)`; returns `None` when the volumes cannot
    /// be moved.
    fn price(&self, m: usize, required: &[(f64, f64)]) -> Option<f64> {
        let net = self.net;
        let nh = net.haul_count();
        let mat = &net.materials[m];
        let (p, q) = (mat.excavation_cost, mat.embankment_cost);
        let transfer = net.config.intersection_transfer_cost;
        let c = |h: usize| net.haul_types[h].haul_cost[m];
        let y = |h: usize| net.haul_types[h].loading_cost[m];

        let longest: f64 = net
            .roads
            .iter()
            .map(|r| r.end_station() - r.start_station())
            .sum::<f64>()
            + 2.0 * net.pits.iter().map(|k| k.dead_haul_distance).fold(0.0, f64::max);
        let bound = (0..nh)
            .map(|h| p + y(h) + q + c(h) * longest)
            .fold(0.0, f64::max)
            + 2.0 * transfer * (net.intersections.len() as f64 + 1.0);
        let big = 10.0 * (1.0 + bound);

        let mut g = FlowGraph::new(2);
        let (s, t) = (0, 1);
        let mut priced: Vec<(usize, f64)> = Vec::new();
        let mut required_edges: Vec<(usize, f64)> = Vec::new();
        let mut edge = |g: &mut FlowGraph, a: usize, b: usize, cap: f64, cost: f64| {
            let id = g.add_edge(a, b, cap, cost);
            if cost != 0.0 {
                priced.push((id, cost));
            }
            id
        };

        // layer[i][j][h] = (forward node, backward node)
        let layer: Vec<Vec<Vec<(usize, usize)>>> = net
            .roads
            .iter()
            .map(|r| {
                (0..r.sections.len())
                    .map(|_| (0..nh).map(|_| (g.add_node(), g.add_node())).collect())
                    .collect()
            })
            .collect();
        let junction: Vec<Vec<usize>> = net
            .intersections
            .iter()
            .map(|_| (0..nh).map(|_| g.add_node()).collect())
            .collect();

        for (i, r) in net.roads.iter().enumerate() {
            for arc in 0..r.sections.len().saturating_sub(1) {
                let d = r.station_distance(arc);
                for h in 0..nh {
                    let (f0, b0) = layer[i][arc][h];
                    let (f1, b1) = layer[i][arc + 1][h];
                    edge(&mut g, f0, f1, f64::INFINITY, c(h) * d);
                    edge(&mut g, b1, b0, f64::INFINITY, c(h) * d);
                }
            }
        }
        for &(e, i, j, start) in &self.junctions {
            for h in 0..nh {
                let (f, b) = layer[i][j][h];
                let x = junction[e][h];
                if start {
                    edge(&mut g, x, f, f64::INFINITY, transfer);
                    edge(&mut g, b, x, f64::INFINITY, transfer);
                } else {
                    edge(&mut g, f, x, f64::INFINITY, transfer);
                    edge(&mut g, x, b, f64::INFINITY, transfer);
                }
            }
        }

        for (o, &owner) in self.owners.iter().enumerate() {
            let (need_cut, need_fill) = required[o];
            let (m_cut, m_fill) = match owner {
                Owner::Section(i, j) => self.caps.section[i][j][m],
                Owner::Intersection(e) => self.caps.intersection[e][m],
            };
            let cut = g.add_node();
            let pool = g.add_node();
            let gather = g.add_node();
            let fill = g.add_node();
            required_edges.push((g.add_edge(s, cut, need_cut, -big), need_cut));
            g.add_edge(s, cut, f64::INFINITY, 0.0);
            for h in 0..nh {
                edge(&mut g, cut, pool, m_cut, p + y(h));
            }
            edge(&mut g, gather, fill, nh as f64 * m_fill, q);
            required_edges.push((g.add_edge(fill, t, need_fill, -big), need_fill));
            g.add_edge(fill, t, f64::INFINITY, 0.0);
            match owner {
                Owner::Section(i, j) => {
                    for h in 0..nh {
                        let (f, b) = layer[i][j][h];
                        for node in [f, b] {
                            g.add_edge(pool, node, m_cut, 0.0);
                            g.add_edge(node, gather, m_fill, 0.0);
                        }
                    }
                }
                Owner::Intersection(e) => {
                    for h in 0..nh {
                        g.add_edge(pool, junction[e][h], m_cut, 0.0);
                        g.add_edge(junction[e][h], gather, m_fill, 0.0);
                    }
                }
            }
        }

        for pit in &net.pits {
            let cap = match (&pit.capacity, net.config.capacity_constraints) {
                (Some(caps), true) => caps.get(m).copied().unwrap_or(f64::INFINITY),
                _ => f64::INFINITY,
            };
            let hub = g.add_node();
            match pit.kind {
                PitKind::Borrow => {
                    g.add_edge(s, hub, cap, 0.0);
                }
                PitKind::Waste => {
                    g.add_edge(hub, t, cap, 0.0);
                }
            }
            for h in 0..nh {
                let (f, b) = layer[pit.road][pit.section][h];
                for node in [f, b] {
                    let dead = c(h) * pit.dead_haul_distance;
                    match pit.kind {
                        PitKind::Borrow => edge(&mut g, hub, node, f64::INFINITY, p + y(h) + dead),
                        PitKind::Waste => edge(&mut g, node, hub, f64::INFINITY, q + dead),
                    };
                }
            }
        }

        g.min_cost_free_flow(s, t);
        let saturated = required_edges
            .iter()
            .all(|&(e, need)| g.flow(e) >= need - SATURATION_TOL * (1.0 + need));
        saturated.then(|| priced.iter().map(|&(e, cost)| g.flow(e) * cost).sum())
    }
}

/// Exhaustive search over gridded offsets: every grid point is screened for
/// a grade-feasible spline, its volumes are read off the slab
/// approximations, and the earth allocation is priced exactly as a
/// min-cost flow. Returns the cheapest point.
pub fn brute_force_optimum(
    net: &RoadNetwork,
    tables: &CrossSectionSet,
    slabs: &SlabSet,
    grid: GridSpec,
) -> Result<BruteForceResult> {
    if !(grid.step.is_finite() && grid.step > 0.0) {
        return Err(Error::Domain(format!("grid step {} must be positive", grid.step)));
    }
    net.ensure_valid()?;
    let owners = Owner::all(net);
    let values: Vec<Vec<f64>> = owners
        .iter()
        .map(|&o| {
            let (lo, hi) = match o {
                Owner::Section(i, j) => {
                    let s = &net.roads[i].sections[j];
                    (s.offset_min, s.offset_max)
                }
                Owner::Intersection(e) => {
                    let x = &net.intersections[e];
                    (x.offset_min, x.offset_max)
                }
            };
            grid_values(lo, hi, grid.step)
        })
        .collect();
    let combinations = values
        .iter()
        .try_fold(1u128, |acc, v| acc.checked_mul(v.len() as u128))
        .unwrap_or(u128::MAX);
    if combinations > grid.cap {
        return Err(Error::CapExceeded {
            combinations,
            cap: grid.cap,
        });
    }

    let checks: Vec<SplineCheck> = (0..net.roads.len())
        .map(|i| SplineCheck::new(net, i))
        .collect::<Result<_>>()?;
    // owner index behind every section's offset
    let attached = net.attachment_index();
    let owner_of: Vec<Vec<usize>> = net
        .roads
        .iter()
        .enumerate()
        .map(|(i, r)| {
            (0..r.sections.len())
                .map(|j| {
                    let owner = match attached.get(&(i, j)) {
                        Some(&e) => Owner::Intersection(e),
                        None => Owner::Section(i, j),
                    };
                    owners.iter().position(|&o| o == owner).expect("owner listed")
                })
                .collect()
        })
        .collect();
    let approx = owners
        .iter()
        .map(|&o| {
            (0..net.material_count())
                .map(|m| {
                    slabs.get(o, m).cloned().ok_or_else(|| {
                        Error::Emission(format!("missing slabs for {} material {m}", o.label()))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let caps = VolumeCaps::compute(net, tables)?;
    let transport = Transport {
        net,
        owners: &owners,
        caps: &caps,
        junctions: junction_ends(net),
    };

    let mut best = BruteForceResult {
        cost: f64::INFINITY,
        offsets: None,
        intersection_offsets: None,
        combinations,
        spline_feasible: 0,
        allocation_feasible: 0,
    };
    if values.iter().any(|v| v.is_empty()) {
        return Ok(best);
    }
    let mut index = vec![0usize; owners.len()];
    let mut u = vec![0.0; owners.len()];
    loop {
        for (k, &at) in index.iter().enumerate() {
            u[k] = values[k][at];
        }
        let splines_ok = net.roads.iter().enumerate().all(|(i, r)| {
            let elevations: Vec<f64> = r
                .sections
                .iter()
                .enumerate()
                .map(|(j, s)| s.ground_elevation + u[owner_of[i][j]])
                .collect();
            checks[i].feasible(&elevations)
        });
        if splines_ok {
            best.spline_feasible += 1;
            let mut total = Some(0.0);
            for m in 0..net.material_count() {
                let required: Vec<(f64, f64)> = approx
                    .iter()
                    .zip(&u)
                    .map(|(a, &x)| {
                        let s = &a[m];
                        (
                            if x < 0.0 { s.cut.volume(-x) } else { 0.0 },
                            if x > 0.0 { s.fill.volume(x) } else { 0.0 },
                        )
                    })
                    .collect();
                total = total.and_then(|acc| transport.price(m, &required).map(|c| acc + c));
                if total.is_none() {
                    break;
                }
            }
            if let Some(cost) = total {
                best.allocation_feasible += 1;
                if cost < best.cost {
                    best.cost = cost;
                    best.offsets = Some(
                        owner_of
                            .iter()
                            .map(|road| road.iter().map(|&o| u[o]).collect())
                            .collect(),
                    );
                    best.intersection_offsets = Some(
                        owners
                            .iter()
                            .zip(&u)
                            .filter(|(o, _)| matches!(o, Owner::Intersection(_)))
                            .map(|(_, &x)| x)
                            .collect(),
                    );
                }
            }
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == index.len() {
                debug!(
                    "brute force: {combinations} points, {} spline-feasible, {} priced, best {}",
                    best.spline_feasible, best.allocation_feasible, best.cost
                );
                return Ok(best);
            }
            index[k] += 1;
            if index[k] < values[k].len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}
