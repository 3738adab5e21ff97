use std::io::Write;

use serde::{Deserialize, Serialize};

use super::angle::angle_baseline_fit;
use crate::error::{Error, Result};
use crate::geometry::{CrossSectionSet, FitKind, FitMode, FittedVolumeModel, Side};
use crate::model::volume::volume_source;
use crate::model::{build_cuva, build_uva, FitEntry, FitSet, ModelInstance, Owner, SlabSet};
use crate::network::RoadNetwork;
use crate::solver::{solve, SolverOptions, Status};

/// One model configuration to time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Variant {
    /// Mixed-integer model with `slabs` slabs per side.
    Uva { slabs: usize },
    /// Convex model with least-squares volume fits.
    Cuva { fit: FitMode },
    /// Convex model with angle-based trapezoid volumes.
    AngleBaseline,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Uva { .. } => "UVA",
            Variant::Cuva { .. } => "CUVA",
            Variant::AngleBaseline => "CUVA-angle",
        }
    }

    /// Parses `uva`, `cuva` or `angle`, filling in the slab count and fit
    /// mode.
    pub fn parse(name: &str, slabs: usize, fit: FitMode) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "uva" => Ok(Variant::Uva { slabs }),
            "cuva" => Ok(Variant::Cuva { fit }),
            "angle" => Ok(Variant::AngleBaseline),
            other => Err(Error::Domain(format!(
                "unknown model {other:?} (uva|cuva|angle)"
            ))),
        }
    }

    pub fn build(&self, net: &RoadNetwork, tables: &CrossSectionSet) -> Result<ModelInstance> {
        match *self {
            Variant::Uva { slabs } => {
                build_uva(net, tables, &SlabSet::build(net, tables, (slabs, slabs))?)
            }
            Variant::Cuva { fit } => build_cuva(net, tables, &FitSet::build(net, tables, fit)?),
            Variant::AngleBaseline => build_cuva(net, tables, &angle_fit_set(net, tables)?),
        }
    }
}

fn width_of(net: &RoadNetwork, owner: Owner) -> f64 {
    match owner {
        Owner::Section(i, j) => net.roads[i].sections[j].width,
        Owner::Intersection(e) => {
            let a = net.intersections[e].attachments[0];
            net.roads[a.road].sections[a.section].width
        }
    }
}

/// Volume bounds `L (W |u| + k u²)` from the fitted angles, falling back to
/// the linear term when the quadratic would turn positive on the opposite
/// side.
pub fn angle_fit_set(net: &RoadNetwork, tables: &CrossSectionSet) -> Result<FitSet> {
    let mut entries = Vec::new();
    for owner in Owner::all(net) {
        let width = width_of(net, owner);
        for m in 0..net.material_count() {
            let src = volume_source(net, tables, owner, m)?;
            let fit = angle_baseline_fit(src.table, width, src.length)?;
            let side_model = |side: Side| -> Result<FittedVolumeModel> {
                let (sign, opposite, r2) = match side {
                    Side::Cut => (-1.0, (0.0, src.bounds.1), fit.r_squared_cut),
                    Side::Fill => (1.0, (src.bounds.0, 0.0), fit.r_squared_fill),
                };
                let spread = fit.geometry.slopes(side).spread()?;
                let (l, q) = (sign * src.length * width, 0.5 * src.length * spread);
                let linear = FittedVolumeModel {
                    kind: FitKind::Linear,
                    chi: vec![l, 0.0],
                    r_squared: r2,
                    side,
                    domain: src.bounds,
                };
                if q == 0.0 {
                    return Ok(linear);
                }
                let quadratic = FittedVolumeModel {
                    kind: FitKind::Quadratic,
                    chi: vec![q, l, 0.0],
                    ..linear.clone()
                };
                Ok(if quadratic.opposite_side_peak(opposite) > 0.0 {
                    linear
                } else {
                    quadratic
                })
            };
            entries.push(FitEntry {
                owner,
                material: m,
                cut: side_model(Side::Cut)?,
                fill: side_model(Side::Fill)?,
            });
        }
    }
    Ok(FitSet {
        mode: FitMode::Quadratic,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub roads: usize,
    pub stations: usize,
    pub intersections: usize,
    /// Slabs per side; only the mixed-integer model has them.
    pub slabs: Option<usize>,
    pub model: String,
    pub status: Status,
    pub objective: f64,
    /// Mean solve time over the runs.
    pub seconds: f64,
    /// Time of the first variant divided by this one.
    pub speedup: f64,
    /// Objective relative to the first variant, in percent.
    pub cost_difference_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub runs: usize,
    pub rows: Vec<ComparisonRow>,
}

/// Builds every variant once, solves it `runs` times and compares the mean
/// solve times and objectives against the first variant.
pub fn compare_models(
    net: &RoadNetwork,
    tables: &CrossSectionSet,
    variants: &[Variant],
    runs: usize,
    options: &SolverOptions,
) -> Result<ComparisonTable> {
    if variants.is_empty() || runs == 0 {
        return Err(Error::Domain("need at least one variant and one run".into()));
    }
    let mut rows: Vec<ComparisonRow> = Vec::with_capacity(variants.len());
    for variant in variants {
        let instance = variant.build(net, tables)?;
        let mut total = 0.0;
        let mut last = None;
        for _ in 0..runs {
            let sol = solve(&instance, options)?;
            total += sol.stats.wall_seconds;
            last = Some(sol);
        }
        let sol = last.expect("runs >= 1");
        rows.push(ComparisonRow {
            roads: net.roads.len(),
            stations: net.section_count(),
            intersections: net.intersections.len(),
            slabs: match variant {
                Variant::Uva { slabs } => Some(*slabs),
                _ => None,
            },
            model: variant.label().to_string(),
            status: sol.status,
            objective: sol.objective,
            seconds: total / runs as f64,
            speedup: 1.0,
            cost_difference_pct: 0.0,
        });
    }
    let (base_time, base_obj) = (rows[0].seconds, rows[0].objective);
    for row in &mut rows {
        row.speedup = base_time / row.seconds;
        row.cost_difference_pct = if row.objective == base_obj {
            0.0
        } else {
            (row.objective - base_obj) / base_obj.abs() * 100.0
        };
    }
    Ok(ComparisonTable { runs, rows })
}

pub const COMPARISON_HEADER: [&str; 10] = [
    "Roads",
    "Stations",
    "Intersections",
    "Slabs",
    "Model",
    "Objective",
    "Time in seconds",
    "Speedup",
    "Cost difference %",
    "Status",
];

pub fn write_comparison_csv<W: Write>(table: &ComparisonTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let fail = |e: csv::Error| Error::Emission(format!("comparison CSV: {e}"));
    w.write_record(COMPARISON_HEADER).map_err(fail)?;
    for r in &table.rows {
        let status = serde_json::to_value(r.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        w.write_record([
            r.roads.to_string(),
            r.stations.to_string(),
            r.intersections.to_string(),
            r.slabs.map_or_else(String::new, |k| k.to_string()),
            r.model.clone(),
            r.objective.to_string(),
            format!("{:.6}", r.seconds),
            format!("{:.4}", r.speedup),
            format!("{:.6}", r.cost_difference_pct),
            status,
        ])
        .map_err(fail)?;
    }
    w.flush()
        .map_err(|e| Error::Emission(format!("comparison CSV: {e}")))
}
