//! Solves both models and reports constraint residuals by family and the
//! per-material earth balance.

use vertalign::geometry::FitMode;
use vertalign::model::{build_cuva, build_uva, material_balance, validate_solution, FitSet, SlabSet};
use vertalign::solver::{solve, SolverOptions};
use vertalign::synth::{generate, SynthSpec};

fn main() -> vertalign::Result<()> {
    let inst = generate(&SynthSpec::medium(2, 3))?;
    let (net, tables) = (&inst.network, &inst.tables);
    let models = [
        ("UVA", build_uva(net, tables, &SlabSet::build(net, tables, (8, 8))?)?),
        ("CUVA", build_cuva(net, tables, &FitSet::build(net, tables, FitMode::Auto)?)?),
    ];
    for (name, model) in &models {
        let sol = solve(model, &SolverOptions::default())?;
        println!("{name}: {:?}, objective {:.4}", sol.status, sol.objective);
        let res = validate_solution(model, &sol.values, 1e-6)?;
        for f in &res.families {
            println!("  {:?}: {} rows, max residual {:.2e}", f.family, f.rows, f.max_residual);
        }
        for b in material_balance(net, model, &sol.values)? {
            println!(
                "  {}: cut {:.2} + borrow {:.2} = fill {:.2} + waste {:.2} (relative imbalance {:.1e})",
                b.material,
                b.cut,
                b.borrow,
                b.fill,
                b.waste,
                b.relative_imbalance()
            );
        }
    }
    Ok(())
}
