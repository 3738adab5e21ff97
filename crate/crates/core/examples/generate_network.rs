//! Generates a synthetic network and writes the three input files the CLI
//! reads: network TOML, cross-section CSV and ground profile CSV.

use std::fs::File;
use std::path::PathBuf;

use vertalign::io::{load_cross_sections, load_network, save_cross_sections, save_network, write_profile};
use vertalign::synth::{generate, SectionShape, SynthSpec, Terrain};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("vertalign_network"));
    std::fs::create_dir_all(&dir)?;
    let inst = generate(&SynthSpec {
        roads: 4,
        intersections: 3,
        materials: 2,
        terrain: Terrain::Noisy { amplitude: 0.5 },
        shape: SectionShape::NoisyTrapezoid,
        seed: 7,
        ..SynthSpec::default()
    })?;
    save_network(&inst.network, dir.join("network.toml"))?;
    save_cross_sections(&inst.tables, &inst.network, dir.join("sections.csv"))?;
    write_profile(&inst.network, File::create(dir.join("profile.csv"))?)?;

    let net = load_network(dir.join("network.toml"))?;
    let tables = load_cross_sections(dir.join("sections.csv"), &net)?;
    println!(
        "{}: {} roads, {} stations, {} intersections, {} materials, {} tables",
        dir.display(),
        net.roads.len(),
        net.section_count(),
        net.intersections.len(),
        net.materials.len(),
        tables.len()
    );
    Ok(())
}
