use std::collections::HashMap;

use super::catalog::CommonVars;
use super::instance::{Family, InstanceBuilder, Relation};
use crate::network::{PitKind, RoadNetwork};

/// Where a road end meets an intersection.
#[derive(Clone, Copy)]
enum Junction {
    /// Attached at the road's first section.
    Start { e: usize, n: usize },
    /// Attached at the road's last section.
    End { e: usize, n: usize },
}

fn junctions(net: &RoadNetwork) -> HashMap<(usize, usize), Junction> {
    let mut map = HashMap::new();
    for (e, inter) in net.intersections.iter().enumerate() {
        for (n, a) in inter.attachments.iter().enumerate() {
            let j = if a.section == 0 {
                Junction::Start { e, n }
            } else {
                Junction::End { e, n }
            };
            map.insert((a.road, a.section), j);
        }
    }
    map
}

/// Transit-node conservation for every (road, section, material, haul), the
/// junction-node conservation, and the zero-sum rows that keep attached
/// sections from loading or unloading on their own.
pub fn emit_flow_constraints(b: &mut InstanceBuilder, net: &RoadNetwork, vars: &CommonVars) {
    let nm = net.material_count();
    let nh = net.haul_count();
    let junctions = junctions(net);
    let mut pits_at: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, p) in net.pits.iter().enumerate() {
        pits_at.entry((p.road, p.section)).or_default().push(k);
    }

    for (i, road) in net.roads.iter().enumerate() {
        let n = road.sections.len();
        for j in 0..n {
            let junction = junctions.get(&(i, j)).copied();
            let pits = pits_at.get(&(i, j)).cloned().unwrap_or_default();
            for m in 0..nm {
                for h in 0..nh {
                    // outflow - inflow = 0 on each node
                    let mut plus: Vec<(usize, f64)> = Vec::new();
                    let mut minus: Vec<(usize, f64)> = Vec::new();
                    if j + 1 < n {
                        plus.push((vars.transit_plus[i][j][m][h], 1.0));
                        minus.push((vars.transit_minus[i][j][m][h], -1.0));
                    }
                    if j > 0 {
                        plus.push((vars.transit_plus[i][j - 1][m][h], -1.0));
                        minus.push((vars.transit_minus[i][j - 1][m][h], 1.0));
                    }
                    match junction {
                        None => {
                            plus.push((vars.load_plus[i][j][m][h], 1.0));
                            plus.push((vars.unload_plus[i][j][m][h], -1.0));
                            minus.push((vars.load_minus[i][j][m][h], 1.0));
                            minus.push((vars.unload_minus[i][j][m][h], -1.0));
                        }
                        Some(Junction::Start { e, n }) => {
                            plus.push((vars.outflow[e][n][m][h], -1.0));
                            minus.push((vars.inflow[e][n][m][h], 1.0));
                        }
                        Some(Junction::End { e, n }) => {
                            plus.push((vars.inflow[e][n][m][h], 1.0));
                            minus.push((vars.outflow[e][n][m][h], -1.0));
                        }
                    }
                    for &k in &pits {
                        let sign = match net.pits[k].kind {
                            PitKind::Borrow => -1.0,
                            PitKind::Waste => 1.0,
                        };
                        plus.push((vars.pit_plus[k][m][h], sign));
                        minus.push((vars.pit_minus[k][m][h], sign));
                    }
                    b.row(
                        format!("FLOWP_{i}_{j}_{m}_{h}"),
                        Family::Flow,
                        plus,
                        Relation::Eq,
                        0.0,
                    );
                    b.row(
                        format!("FLOWM_{i}_{j}_{m}_{h}"),
                        Family::Flow,
                        minus,
                        Relation::Eq,
                        0.0,
                    );
                }
            }
        }
    }

    for (e, inter) in net.intersections.iter().enumerate() {
        for m in 0..nm {
            for h in 0..nh {
                let mut node = Vec::new();
                for n in 0..inter.attachments.len() {
                    node.push((vars.outflow[e][n][m][h], 1.0));
                    node.push((vars.inflow[e][n][m][h], -1.0));
                }
                node.push((vars.junction_load[e][m][h], 1.0));
                node.push((vars.junction_unload[e][m][h], -1.0));
                b.row(
                    format!("FLOWE_{e}_{m}_{h}"),
                    Family::Flow,
                    node,
                    Relation::Eq,
                    0.0,
                );

                let mut unload = Vec::new();
                let mut load = Vec::new();
                for a in &inter.attachments {
                    let (i, j) = (a.road, a.section);
                    unload.push((vars.unload_plus[i][j][m][h], 1.0));
                    unload.push((vars.unload_minus[i][j][m][h], 1.0));
                    load.push((vars.load_plus[i][j][m][h], 1.0));
                    load.push((vars.load_minus[i][j][m][h], 1.0));
                }
                b.row(
                    format!("ZEROU_{e}_{m}_{h}"),
                    Family::Flow,
                    unload,
                    Relation::Eq,
                    0.0,
                );
                b.row(
                    format!("ZEROL_{e}_{m}_{h}"),
                    Family::Flow,
                    load,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }
}

/// Unloaded material equals the cut volume and loaded material equals the
/// fill volume, summed over hauls.
pub fn emit_balance_constraints(b: &mut InstanceBuilder, net: &RoadNetwork, vars: &CommonVars) {
    let nm = net.material_count();
    let nh = net.haul_count();
    for (i, road) in net.roads.iter().enumerate() {
        for j in 0..road.sections.len() {
            for m in 0..nm {
                let mut cut = Vec::with_capacity(3 * nh);
                let mut fill = Vec::with_capacity(3 * nh);
                for h in 0..nh {
                    cut.push((vars.unload_plus[i][j][m][h], 1.0));
                    cut.push((vars.unload_minus[i][j][m][h], 1.0));
                    cut.push((vars.cut[i][j][m][h], -1.0));
                    fill.push((vars.load_plus[i][j][m][h], 1.0));
                    fill.push((vars.load_minus[i][j][m][h], 1.0));
                    fill.push((vars.fill[i][j][m][h], -1.0));
                }
                b.row(
                    format!("BALC_{i}_{j}_{m}"),
                    Family::Balance,
                    cut,
                    Relation::Eq,
                    0.0,
                );
                b.row(
                    format!("BALF_{i}_{j}_{m}"),
                    Family::Balance,
                    fill,
                    Relation::Eq,
                    0.0,
                );
            }
        }
    }
    for e in 0..net.intersections.len() {
        for m in 0..nm {
            let mut cut = Vec::with_capacity(2 * nh);
            let mut fill = Vec::with_capacity(2 * nh);
            for h in 0..nh {
                cut.push((vars.junction_unload[e][m][h], 1.0));
                cut.push((vars.junction_cut[e][m][h], -1.0));
                fill.push((vars.junction_load[e][m][h], 1.0));
                fill.push((vars.junction_fill[e][m][h], -1.0));
            }
            b.row(
                format!("BALCE_{e}_{m}"),
                Family::Balance,
                cut,
                Relation::Eq,
                0.0,
            );
            b.row(
                format!("BALFE_{e}_{m}"),
                Family::Balance,
                fill,
                Relation::Eq,
                0.0,
            );
        }
    }
}

/// Pit throughput limited by the per-material capacity.
pub fn emit_capacity_constraints(b: &mut InstanceBuilder, net: &RoadNetwork, vars: &CommonVars) {
    if !net.config.capacity_constraints {
        return;
    }
    for (k, pit) in net.pits.iter().enumerate() {
        let Some(cap) = &pit.capacity else { continue };
        let tag = match pit.kind {
            PitKind::Borrow => "CAPB",
            PitKind::Waste => "CAPW",
        };
        for (m, &c) in cap.iter().enumerate() {
            if !c.is_finite() {
                continue;
            }
            let terms = (0..net.haul_count())
                .flat_map(|h| {
                    [
                        (vars.pit_plus[k][m][h], 1.0),
                        (vars.pit_minus[k][m][h], 1.0),
                    ]
                })
                .collect();
            b.row(
                format!("{tag}_{k}_{m}"),
                Family::Capacity,
                terms,
                Relation::Le,
                c,
            );
        }
    }
}
