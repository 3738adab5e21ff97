use super::catalog::CommonVars;
use super::instance::{Family, InstanceBuilder, Relation};
use crate::error::{Error, Result};
use crate::network::RoadNetwork;

/// Value, slope and gap rows of the quadratic spline profile, plus the
/// elevation and offset coupling at intersections.
pub fn emit_profile_constraints(
    b: &mut InstanceBuilder,
    net: &RoadNetwork,
    vars: &CommonVars,
) -> Result<()> {
    let (g_lo, g_hi) = (net.config.grade_min, net.config.grade_max);
    for (i, road) in net.roads.iter().enumerate() {
        let a = &vars.spline[i];
        for g in 1..road.segments.len() {
            let knot = road.segments[g].start_station;
            let t = knot - road.segments[g - 1].start_station;
            let (p, c) = (a[g - 1], a[g]);
            b.row(
                format!("CONT0_{i}_{g}"),
                Family::Continuity,
                vec![(p[0], 1.0), (p[1], t), (p[2], t * t), (c[0], -1.0)],
                Relation::Eq,
                0.0,
            );
            b.row(
                format!("CONT1_{i}_{g}"),
                Family::Continuity,
                vec![(p[1], 1.0), (p[2], 2.0 * t), (c[1], -1.0)],
                Relation::Eq,
                0.0,
            );
        }

        let mut j = 0;
        for (g, seg) in road.segments.iter().enumerate() {
            if seg.section_count == 0 {
                return Err(Error::Emission(format!(
                    "road {i} segment {g} has no sections"
                )));
            }
            let c = a[g];
            for _ in 0..seg.section_count {
                let sec = &road.sections[j];
                let t = sec.station - seg.start_station;
                b.row(
                    format!("GAP_{i}_{j}"),
                    Family::Gap,
                    vec![
                        (c[0], 1.0),
                        (c[1], t),
                        (c[2], t * t),
                        (vars.offset[i][j], -1.0),
                    ],
                    Relation::Eq,
                    sec.ground_elevation,
                );
                j += 1;
            }
            for (end, t) in [(0, 0.0), (1, seg.length)] {
                let slope = vec![(c[1], 1.0), (c[2], 2.0 * t)];
                b.row(
                    format!("GRADELO_{i}_{g}_{end}"),
                    Family::Grade,
                    slope.clone(),
                    Relation::Ge,
                    g_lo,
                );
                b.row(
                    format!("GRADEHI_{i}_{g}_{end}"),
                    Family::Grade,
                    slope,
                    Relation::Le,
                    g_hi,
                );
            }
        }
    }

    for (e, inter) in net.intersections.iter().enumerate() {
        let elevation = |n: usize| -> Result<Vec<(usize, f64)>> {
            let att = inter.attachments[n];
            let (g, _) = net.segment_of(att.road, att.section)?;
            let road = &net.roads[att.road];
            let t = road.sections[att.section].station - road.segments[g].start_station;
            let c = vars.spline[att.road][g];
            Ok(vec![(c[0], 1.0), (c[1], t), (c[2], t * t)])
        };
        for n in 1..inter.attachments.len() {
            let mut terms = elevation(n - 1)?;
            terms.extend(elevation(n)?.into_iter().map(|(k, v)| (k, -v)));
            b.row(
                format!("ELEV_{e}_{n}"),
                Family::IntersectionElevation,
                terms,
                Relation::Eq,
                0.0,
            );
        }
        for (n, att) in inter.attachments.iter().enumerate() {
            b.row(
                format!("ZGAP_{e}_{n}"),
                Family::IntersectionGap,
                vec![(vars.z[e], 1.0), (vars.offset[att.road][att.section], -1.0)],
                Relation::Eq,
                0.0,
            );
        }
    }
    Ok(())
}
