//! Times the mixed-integer model, the convex model and the angle baseline
//! on one network and prints the comparison table as CSV.

use vertalign::geometry::FitMode;
use vertalign::oracle::{compare_models, write_comparison_csv, Variant};
use vertalign::solver::SolverOptions;
use vertalign::synth::{generate, SynthSpec};

fn main() -> vertalign::Result<()> {
    let runs = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let inst = generate(&SynthSpec::medium(2, 1))?;
    let variants = [
        Variant::Uva { slabs: 20 },
        Variant::Cuva { fit: FitMode::Auto },
        Variant::AngleBaseline,
    ];
    let table = compare_models(
        &inst.network,
        &inst.tables,
        &variants,
        runs,
        &SolverOptions::default(),
    )?;
    write_comparison_csv(&table, std::io::stdout())
}
