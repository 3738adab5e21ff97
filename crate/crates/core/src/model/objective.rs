use super::catalog::CommonVars;
use super::instance::InstanceBuilder;
use crate::network::{PitKind, RoadNetwork};

/// Writes the cost of every shared variable into the objective: excavation
/// plus loading on cut volumes, embankment on fill volumes, distance-priced
/// transit, junction transfers, and pit traffic including dead haul.
pub fn assemble_objective(b: &mut InstanceBuilder, net: &RoadNetwork, vars: &CommonVars) {
    let obj = &mut b.objective;
    let transfer = net.config.intersection_transfer_cost;
    for (m, mat) in net.materials.iter().enumerate() {
        let (p, q) = (mat.excavation_cost, mat.embankment_cost);
        for (h, haul) in net.haul_types.iter().enumerate() {
            let (c, y) = (haul.haul_cost[m], haul.loading_cost[m]);
            for (i, road) in net.roads.iter().enumerate() {
                for j in 0..road.sections.len() {
                    obj[vars.cut[i][j][m][h]] = p + y;
                    obj[vars.fill[i][j][m][h]] = q;
                }
                for arc in 0..road.sections.len().saturating_sub(1) {
                    let d = road.station_distance(arc);
                    obj[vars.transit_plus[i][arc][m][h]] = c * d;
                    obj[vars.transit_minus[i][arc][m][h]] = c * d;
                }
            }
            for e in 0..net.intersections.len() {
                obj[vars.junction_cut[e][m][h]] = p + y;
                obj[vars.junction_fill[e][m][h]] = q;
                for n in 0..net.intersections[e].attachments.len() {
                    obj[vars.inflow[e][n][m][h]] = transfer;
                    obj[vars.outflow[e][n][m][h]] = transfer;
                }
            }
            for (k, pit) in net.pits.iter().enumerate() {
                let cost = match pit.kind {
                    PitKind::Borrow => p + y + c * pit.dead_haul_distance,
                    PitKind::Waste => q + c * pit.dead_haul_distance,
                };
                obj[vars.pit_plus[k][m][h]] = cost;
                obj[vars.pit_minus[k][m][h]] = cost;
            }
        }
    }
}
