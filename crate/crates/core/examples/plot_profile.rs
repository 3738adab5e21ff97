//! Solves a three-road network and draws ground and design profiles as SVG.

use std::path::PathBuf;

use vertalign::geometry::FitMode;
use vertalign::io::write_profile_svg;
use vertalign::model::{build_cuva, FitSet};
use vertalign::solver::{solve, SolverOptions};
use vertalign::synth::{generate, SynthSpec, Terrain};

fn main() -> vertalign::Result<()> {
    let inst = generate(&SynthSpec {
        roads: 3,
        intersections: 2,
        sections_per_road: 12,
        terrain: Terrain::Sinusoidal {
            amplitude: 3.0,
            wavelength: 150.0,
        },
        ..SynthSpec::default()
    })?;
    let fits = FitSet::build(&inst.network, &inst.tables, FitMode::Auto)?;
    let model = build_cuva(&inst.network, &inst.tables, &fits)?;
    let sol = solve(&model, &SolverOptions::default())?;
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("vertalign_profile.svg"));
    write_profile_svg(&inst.network, &model, &sol.values, &path)?;
    println!("objective {:.3}, plot written to {}", sol.objective, path.display());
    Ok(())
}
