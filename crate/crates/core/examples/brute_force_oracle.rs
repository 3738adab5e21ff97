//! Checks the branch-and-bound optimum of a short level-ground road against
//! exhaustive enumeration of gridded offsets.

use vertalign::model::{build_uva, SlabSet};
use vertalign::oracle::{brute_force_optimum, GridSpec};
use vertalign::solver::{solve_milp, SolverOptions};
use vertalign::synth::{generate, SynthSpec, Terrain};

fn main() -> vertalign::Result<()> {
    let mut inst = generate(&SynthSpec {
        sections_per_road: 4,
        terrain: Terrain::Flat,
        ..SynthSpec::default()
    })?;
    // a bump in the middle forces earthwork
    inst.network.roads[0].sections[1].ground_elevation += 3.0;
    inst.network.roads[0].sections[2].ground_elevation += 1.5;
    inst.network.haul_types.truncate(1);

    let slabs = SlabSet::build(&inst.network, &inst.tables, (2, 2))?;
    let model = build_uva(&inst.network, &inst.tables, &slabs)?;
    let milp = solve_milp(&model, &SolverOptions::default())?;

    for step in [0.5, 0.25] {
        let bf = brute_force_optimum(
            &inst.network,
            &inst.tables,
            &slabs,
            GridSpec {
                step,
                cap: 10_000_000,
            },
        )?;
        println!(
            "grid {step}: {} points, {} grade-feasible, best {:.6} at {:?}",
            bf.combinations, bf.spline_feasible, bf.cost, bf.offsets
        );
    }
    let offsets = model.vars.as_ref().map(|v| v.offsets(&milp.values));
    println!("branch and bound: {:.6} at {:?}", milp.objective, offsets);
    Ok(())
}
