//! Builds the mixed-integer model for a 12-road network with two materials
//! and solves it by branch and bound.

use vertalign::io::{summary_text, Report};
use vertalign::model::{build_uva, SlabSet};
use vertalign::solver::{solve, SolverOptions};
use vertalign::synth::{generate, SynthSpec};

fn main() -> vertalign::Result<()> {
    let inst = generate(&SynthSpec::medium(2, 1))?;
    let slabs = SlabSet::build(&inst.network, &inst.tables, (10, 10))?;
    let model = build_uva(&inst.network, &inst.tables, &slabs)?;
    println!(
        "{} variables ({} binary), {} rows",
        model.var_count(),
        model.integer_vars().len(),
        model.constraints.len()
    );
    let sol = solve(&model, &SolverOptions::default().with_time_limit(60.0))?;
    let report = Report::new(&inst.network, &model, &sol, 1e-6)?;
    print!("{}", summary_text(&report));
    Ok(())
}
