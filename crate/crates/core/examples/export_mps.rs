//! Writes the mixed-integer model as free-format MPS, reads it back and
//! checks that both copies solve to the same objective.

use std::path::PathBuf;

use vertalign::model::{build_uva, SlabSet};
use vertalign::solver::{export_mps, read_mps, solve, SolverOptions};
use vertalign::synth::{generate, SynthSpec, Terrain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(&SynthSpec {
        roads: 3,
        intersections: 2,
        terrain: Terrain::Sinusoidal {
            amplitude: 2.0,
            wavelength: 120.0,
        },
        ..SynthSpec::default()
    })?;
    let slabs = SlabSet::build(&inst.network, &inst.tables, (4, 4))?;
    let model = build_uva(&inst.network, &inst.tables, &slabs)?;

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("vertalign_uva.mps"));
    export_mps(&model, &path)?;
    let text = std::fs::read_to_string(&path)?;
    println!("wrote {} ({} lines)", path.display(), text.lines().count());

    let back = read_mps(&text, &path)?;
    let a = solve(&model, &SolverOptions::default())?;
    let b = solve(&back, &SolverOptions::default())?;
    println!("objective {} / re-read {}", a.objective, b.objective);
    Ok(())
}
