use super::catalog::CommonVars;
use super::flow::{emit_balance_constraints, emit_capacity_constraints, emit_flow_constraints};
use super::instance::{InstanceBuilder, ModelInstance, ModelKind};
use super::objective::assemble_objective;
use super::profile::emit_profile_constraints;
use super::volume::{emit_volume_fitted, emit_volume_milp, FitSet, SlabSet, VolumeCaps};
use crate::error::Result;
use crate::geometry::CrossSectionSet;
use crate::network::RoadNetwork;

/// Shared variables, rows and objective of both models, in a fixed order.
fn common(net: &RoadNetwork, tables: &CrossSectionSet) -> Result<(InstanceBuilder, CommonVars)> {
    net.ensure_valid()?;
    let caps = VolumeCaps::compute(net, tables)?;
    let mut b = InstanceBuilder::new();
    let vars = CommonVars::create(&mut b, net, &caps);
    emit_profile_constraints(&mut b, net, &vars)?;
    emit_flow_constraints(&mut b, net, &vars);
    emit_balance_constraints(&mut b, net, &vars);
    emit_capacity_constraints(&mut b, net, &vars);
    assemble_objective(&mut b, net, &vars);
    Ok((b, vars))
}

/// Mixed-integer model with slab-based volumes.
pub fn build_uva(
    net: &RoadNetwork,
    tables: &CrossSectionSet,
    slabs: &SlabSet,
) -> Result<ModelInstance> {
    let (mut b, vars) = common(net, tables)?;
    emit_volume_milp(&mut b, net, &vars, slabs)?;
    Ok(b.finish(ModelKind::Uva, Some(vars)))
}

/// Convex model with least-squares fitted volumes.
pub fn build_cuva(
    net: &RoadNetwork,
    tables: &CrossSectionSet,
    fits: &FitSet,
) -> Result<ModelInstance> {
    let (mut b, vars) = common(net, tables)?;
    emit_volume_fitted(&mut b, net, &vars, fits)?;
    Ok(b.finish(ModelKind::Cuva, Some(vars)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FitMode, Side};
    use crate::model::{validate_solution, Family, FitSet, SlabSet};
    use crate::network::{Attachment, Intersection, Road, Section};
    use crate::synth::{generate, SectionShape, SynthInstance, SynthSpec};

    fn small(sections: usize, segment_size: usize, shape: SectionShape) -> SynthInstance {
        let mut inst = generate(&SynthSpec {
            sections_per_road: sections,
            segment_size,
            shape,
            pits: false,
            ..SynthSpec::default()
        })
        .unwrap();
        inst.network.haul_types.truncate(1);
        inst
    }

    fn uva(inst: &SynthInstance, slabs: usize) -> ModelInstance {
        let set = SlabSet::build(&inst.network, &inst.tables, (slabs, slabs)).unwrap();
        build_uva(&inst.network, &inst.tables, &set).unwrap()
    }

    fn cuva(inst: &SynthInstance, mode: FitMode) -> ModelInstance {
        let fits = FitSet::build(&inst.network, &inst.tables, mode).unwrap();
        build_cuva(&inst.network, &inst.tables, &fits).unwrap()
    }

    #[test]
    fn two_segments_give_one_knot() {
        let inst = small(4, 2, SectionShape::Rectangular);
        assert_eq!(uva(&inst, 1).family_count(Family::Continuity), 2);
    }

    #[test]
    fn single_segment_counts() {
        let inst = small(3, 3, SectionShape::Rectangular);
        let m = uva(&inst, 1);
        assert_eq!(m.family_count(Family::Continuity), 0);
        assert_eq!(m.family_count(Family::Gap), 3);
        // two endpoints, each bounded from both sides
        assert_eq!(m.family_count(Family::Grade), 4);
        assert_eq!(m.family_count(Family::Flow), 6);
        assert_eq!(m.family_count(Family::Balance), 6);
        assert!(m.integer_vars().is_empty());
    }

    #[test]
    fn slab_binaries_per_side() {
        let inst = small(3, 3, SectionShape::Trapezoid);
        assert_eq!(uva(&inst, 3).integer_vars().len(), 12);
        assert_eq!(uva(&inst, 1).integer_vars().len(), 0);
    }

    #[test]
    fn rectangular_cuva_is_linear() {
        let inst = small(5, 2, SectionShape::Rectangular);
        let m = cuva(&inst, FitMode::Auto);
        assert!(m.quadratics.is_empty());
        assert_eq!(m.family_count(Family::VolumeFit), 10);
    }

    #[test]
    fn quadratic_count_matches_fits() {
        let inst = small(5, 2, SectionShape::Trapezoid);
        let fits = FitSet::build(&inst.network, &inst.tables, FitMode::Auto).unwrap();
        let m = build_cuva(&inst.network, &inst.tables, &fits).unwrap();
        assert_eq!(m.quadratics.len(), fits.quadratic_count());
        assert!(m.quadratics.iter().all(|q| q.chi[0] >= 0.0));
        assert!(m.integer_vars().is_empty());
    }

    #[test]
    fn shared_blocks_are_identical() {
        let mut inst = generate(&SynthSpec {
            shape: SectionShape::NoisyTrapezoid,
            ..SynthSpec::medium(2, 11)
        })
        .unwrap();
        inst.network.pits[0].capacity = Some(vec![500.0, 500.0]);
        let a = uva(&inst, 4);
        let b = cuva(&inst, FitMode::Auto);
        let shared = |m: &ModelInstance| {
            m.constraints
                .iter()
                .filter(|c| !matches!(c.family, Family::VolumeSlab | Family::VolumeFit))
                .cloned()
                .collect::<Vec<_>>()
        };
        assert_eq!(shared(&a), shared(&b));
        let n = b.var_count();
        assert_eq!(a.objective[..n], b.objective[..]);
        for k in 0..n {
            assert_eq!(a.catalog.get(k), b.catalog.get(k));
        }
        assert!(a.family_count(Family::Capacity) == 2);
    }

    fn section(_: usize, station: f64) -> Section {
        Section {
            station,
            length: 20.0,
            ground_elevation: 50.0,
            offset_min: -1.0,
            offset_max: 1.0,
            width: 6.0,
        }
    }

    #[test]
    fn three_way_intersection_chains_elevations() {
        let mut inst = small(3, 3, SectionShape::Rectangular);
        let net = &mut inst.network;
        net.roads = (0..3)
            .map(|i| Road::uniform(format!("r{i}"), 0.0, 20.0, &[3], section))
            .collect();
        net.intersections = vec![Intersection {
            id: "y".into(),
            attachments: vec![
                Attachment { road: 0, section: 2 },
                Attachment { road: 1, section: 0 },
                Attachment { road: 2, section: 0 },
            ],
            offset_min: -1.0,
            offset_max: 1.0,
        }];
        let table = inst.tables.get(0, 0, 0).unwrap().clone();
        for i in 0..3 {
            for j in 0..3 {
                inst.tables.insert((i, j, 0), table.clone());
            }
        }
        let m = uva(&inst, 1);
        assert_eq!(m.family_count(Family::IntersectionElevation), 2);
        assert_eq!(m.family_count(Family::IntersectionGap), 3);
        // one junction row plus the two zero-sum rows
        let junction_rows = m
            .constraints
            .iter()
            .filter(|c| c.name.starts_with("FLOWE") || c.name.starts_with("ZERO"))
            .count();
        assert_eq!(junction_rows, 3);
        let nm = 2;
        let two = generate(&SynthSpec {
            roads: 2,
            intersections: 1,
            materials: nm,
            ..SynthSpec::default()
        })
        .unwrap();
        let m = uva(&two, 1);
        let bal = m
            .constraints
            .iter()
            .filter(|c| c.name.starts_with("BALCE") || c.name.starts_with("BALFE"))
            .count();
        assert_eq!(bal, 4);
    }

    #[test]
    fn gap_off_by_one_is_flagged() {
        let inst = small(3, 3, SectionShape::Rectangular);
        let m = uva(&inst, 1);
        let vars = m.vars.as_ref().unwrap();
        let mut x = vec![0.0; m.var_count()];
        let elev = inst.network.roads[0].sections[0].ground_elevation;
        x[vars.spline[0][0][0]] = elev;
        let clean = validate_solution(&m, &x, 1e-9).unwrap();
        assert!(clean.is_feasible(), "{:?}", clean.violations);
        assert_eq!(clean.max_residual(), 0.0);

        x[vars.spline[0][0][0]] = elev + 1.0;
        let report = validate_solution(&m, &x, 1e-9).unwrap();
        let gap = report.family(Family::Gap).unwrap();
        assert_eq!(gap.max_residual, 1.0);
        assert!(report.violations.iter().any(|v| v.starts_with("GAP_0_")));
        assert!(validate_solution(&m, &x[1..], 1e-9).is_err());
    }

    #[test]
    fn non_convex_fit_is_rejected() {
        let inst = small(3, 3, SectionShape::Trapezoid);
        let mut fits = FitSet::build(&inst.network, &inst.tables, FitMode::Quadratic).unwrap();
        fits.entries[0].cut.chi[0] = -1.0;
        let err = build_cuva(&inst.network, &inst.tables, &fits).unwrap_err();
        assert!(matches!(err, crate::Error::Convexity(_)), "{err}");
        assert_eq!(fits.entries[0].cut.side, Side::Cut);
    }
}
