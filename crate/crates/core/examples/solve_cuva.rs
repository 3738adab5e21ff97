//! Solves the convex quadratically constrained model by outer approximation
//! and prints the offsets of the first road.

use vertalign::geometry::FitMode;
use vertalign::io::{summary_text, Report};
use vertalign::model::{build_cuva, FitSet};
use vertalign::solver::{solve, SolverOptions};
use vertalign::synth::{generate, SynthSpec};

fn main() -> vertalign::Result<()> {
    let inst = generate(&SynthSpec::medium(2, 1))?;
    let fits = FitSet::build(&inst.network, &inst.tables, FitMode::Auto)?;
    let model = build_cuva(&inst.network, &inst.tables, &fits)?;
    println!(
        "{} variables, {} rows, {} quadratic bounds",
        model.var_count(),
        model.constraints.len(),
        model.quadratics.len()
    );
    let sol = solve(&model, &SolverOptions::default())?;
    println!(
        "{} LP solves, {} tangent cuts",
        sol.stats.lp_solves, sol.stats.cuts
    );
    let report = Report::new(&inst.network, &model, &sol, 1e-6)?;
    print!("{}", summary_text(&report));
    if let Some(vars) = &model.vars {
        let offsets = vars.offsets(&sol.values);
        println!("road 0 offsets: {:?}", offsets[0]);
    }
    Ok(())
}
