//! Fits cut and fill volume bounds to every cross-section table of a small
//! synthetic road and compares them with the angle-based trapezoid fit.

use vertalign::geometry::{mape, rmse, FitMode, Side};
use vertalign::model::volume::volume_source;
use vertalign::model::{FitSet, Owner};
use vertalign::oracle::angle_baseline_fit;
use vertalign::synth::{generate, SectionShape, SynthSpec};

fn main() -> vertalign::Result<()> {
    let inst = generate(&SynthSpec {
        sections_per_road: 8,
        shape: SectionShape::NoisyTrapezoid,
        ..SynthSpec::default()
    })?;
    let (net, tables) = (&inst.network, &inst.tables);
    let fits = FitSet::build(net, tables, FitMode::Auto)?;

    println!("section\tside\tkind\tchi\tR2\tMAPE%\tRMSE\tangle MAPE%\tangle RMSE");
    for entry in &fits.entries {
        let Owner::Section(i, j) = entry.owner else { continue };
        let src = volume_source(net, tables, entry.owner, entry.material)?;
        let angle = angle_baseline_fit(src.table, net.roads[i].sections[j].width, src.length)?;
        for side in [Side::Cut, Side::Fill] {
            let samples: Vec<(f64, f64)> = src
                .table
                .samples()
                .iter()
                .filter_map(|s| match side {
                    Side::Cut if s.offset < 0.0 => Some((s.offset, src.length * s.cut_area)),
                    Side::Fill if s.offset > 0.0 => Some((s.offset, src.length * s.fill_area)),
                    _ => None,
                })
                .collect();
            if samples.is_empty() {
                continue;
            }
            let actual = vec![samples.iter().map(|p| p.1).collect::<Vec<_>>()];
            let fitted = vec![samples.iter().map(|p| entry.side(side).evaluate(p.0)).collect()];
            let base = vec![samples
                .iter()
                .map(|p| angle.geometry.volume(p.0))
                .collect::<vertalign::Result<Vec<_>>>()?];
            let m = entry.side(side);
            println!(
                "{i}/{j}\t{}\t{:?}\t{:?}\t{:.4}\t{:.2}\t{:.3}\t{:.2}\t{:.3}",
                side.label(),
                m.kind,
                m.chi.iter().map(|c| format!("{c:.2}")).collect::<Vec<_>>(),
                m.r_squared,
                mape(&actual, &fitted)?,
                rmse(&actual, &fitted)?,
                mape(&actual, &base)?,
                rmse(&actual, &base)?,
            );
        }
    }
    Ok(())
}
