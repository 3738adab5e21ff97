use serde::{Deserialize, Serialize};

use super::catalog::{CommonVars, Owner};
use super::instance::{Family, InstanceBuilder, QuadraticConstraint, Relation, SlabChain};
use crate::error::{Error, Result};
use crate::geometry::{
    build_slabs, fit_side, AreaCurve, CrossSectionSet, CrossSectionTable, FitKind, FitMode,
    FittedVolumeModel, Side, SlabApproximation,
};
use crate::network::RoadNetwork;

/// Slack allowed when checking that a fitted bound is non-positive on the
/// opposite side.
const SIGN_TOL: f64 = 1e-9;

/// Cross-section data backing the volume of one owner and material.
pub struct VolumeSource<'a> {
    pub table: &'a CrossSectionTable,
    pub length: f64,
    pub bounds: (f64, f64),
}

/// Resolves the table, section length and offset bounds of an owner. An
/// intersection uses the table of its first attachment.
pub fn volume_source<'a>(
    net: &RoadNetwork,
    tables: &'a CrossSectionSet,
    owner: Owner,
    m: usize,
) -> Result<VolumeSource<'a>> {
    match owner {
        Owner::Section(i, j) => {
            let s = &net.roads[i].sections[j];
            Ok(VolumeSource {
                table: tables.require(i, j, m)?,
                length: s.length,
                bounds: (s.offset_min, s.offset_max),
            })
        }
        Owner::Intersection(e) => {
            let inter = &net.intersections[e];
            let a = inter.attachments[0];
            Ok(VolumeSource {
                table: tables.require(a.road, a.section, m)?,
                length: net.roads[a.road].sections[a.section].length,
                bounds: (inter.offset_min, inter.offset_max),
            })
        }
    }
}

/// Upper bounds `(M+, M-)` on the per-haul volume and load/unload variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeCaps {
    /// `[road][section][material]`
    pub section: Vec<Vec<Vec<(f64, f64)>>>,
    /// `[intersection][material]`
    pub intersection: Vec<Vec<(f64, f64)>>,
}

fn cap(table: &CrossSectionTable, length: f64, bounds: (f64, f64)) -> (f64, f64) {
    let at = |side: Side, depth: f64| (1.1 * length * table.area(side, depth)).max(1.0);
    (at(Side::Cut, -bounds.0), at(Side::Fill, bounds.1))
}

impl VolumeCaps {
    /// 110% of the table volume at the extreme offsets, at least 1 m³, unless
    /// the network config fixes a uniform cap.
    pub fn compute(net: &RoadNetwork, tables: &CrossSectionSet) -> Result<Self> {
        let nm = net.material_count();
        let fixed = net.config.volume_cap.map(|c| (c, c));
        let mut section = Vec::with_capacity(net.roads.len());
        for i in 0..net.roads.len() {
            let mut road = Vec::new();
            for j in 0..net.roads[i].sections.len() {
                let mut per = Vec::with_capacity(nm);
                for m in 0..nm {
                    let src = volume_source(net, tables, Owner::Section(i, j), m)?;
                    per.push(fixed.unwrap_or_else(|| cap(src.table, src.length, src.bounds)));
                }
                road.push(per);
            }
            section.push(road);
        }
        let mut intersection = Vec::with_capacity(net.intersections.len());
        for e in 0..net.intersections.len() {
            let mut per = Vec::with_capacity(nm);
            for m in 0..nm {
                let src = volume_source(net, tables, Owner::Intersection(e), m)?;
                per.push(fixed.unwrap_or_else(|| cap(src.table, src.length, src.bounds)));
            }
            intersection.push(per);
        }
        Ok(Self {
            section,
            intersection,
        })
    }
}

/// Slab approximations of every volume owner and material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabSet {
    pub counts: (usize, usize),
    pub entries: Vec<(Owner, usize, SlabApproximation)>,
}

impl SlabSet {
    pub fn build(
        net: &RoadNetwork,
        tables: &CrossSectionSet,
        counts: (usize, usize),
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for owner in Owner::all(net) {
            for m in 0..net.material_count() {
                let src = volume_source(net, tables, owner, m)?;
                let slabs =
                    build_slabs(src.table, src.length, (-src.bounds.0, src.bounds.1), counts)?;
                entries.push((owner, m, slabs));
            }
        }
        Ok(Self { counts, entries })
    }

    pub fn get(&self, owner: Owner, m: usize) -> Option<&SlabApproximation> {
        self.entries
            .binary_search_by(|(o, k, _)| (*o, *k).cmp(&(owner, m)))
            .ok()
            .map(|p| &self.entries[p].2)
    }

    /// Total binaries an instance built from this set will carry.
    pub fn binary_count(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, _, s)| s.cut.len().saturating_sub(1) + s.fill.len().saturating_sub(1))
            .sum()
    }
}

/// Cut and fill volume fits of one owner and material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub owner: Owner,
    pub material: usize,
    pub cut: FittedVolumeModel,
    pub fill: FittedVolumeModel,
}

impl FitEntry {
    pub fn side(&self, side: Side) -> &FittedVolumeModel {
        match side {
            Side::Cut => &self.cut,
            Side::Fill => &self.fill,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSet {
    pub mode: FitMode,
    pub entries: Vec<FitEntry>,
}

impl FitSet {
    pub fn build(net: &RoadNetwork, tables: &CrossSectionSet, mode: FitMode) -> Result<Self> {
        let mut entries = Vec::new();
        for owner in Owner::all(net) {
            for m in 0..net.material_count() {
                let src = volume_source(net, tables, owner, m)?;
                entries.push(FitEntry {
                    owner,
                    material: m,
                    cut: fit_side(src.table, src.length, Side::Cut, src.bounds, mode)?,
                    fill: fit_side(src.table, src.length, Side::Fill, src.bounds, mode)?,
                });
            }
        }
        Ok(Self { mode, entries })
    }

    pub fn get(&self, owner: Owner, m: usize) -> Option<&FitEntry> {
        self.entries
            .binary_search_by(|f| (f.owner, f.material).cmp(&(owner, m)))
            .ok()
            .map(|p| &self.entries[p])
    }

    pub fn quadratic_count(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|f| [&f.cut, &f.fill])
            .filter(|f| f.kind == FitKind::Quadratic)
            .count()
    }
}

/// Depth-ordered slab encoding: fractions `δ_k` of each slab in use, with
/// binaries forcing slab `k` to fill before slab `k + 1` opens.
pub fn emit_volume_milp(
    b: &mut InstanceBuilder,
    net: &RoadNetwork,
    vars: &CommonVars,
    slabs: &SlabSet,
) -> Result<()> {
    for owner in Owner::all(net) {
        let label = owner.label();
        let u = vars.offset_var(owner);
        for m in 0..net.material_count() {
            let approx = slabs.get(owner, m).ok_or_else(|| {
                Error::Emission(format!("missing slabs for {label} material {m}"))
            })?;
            approx.check()?;
            for side in Side::BOTH {
                let (tag, depth_sign) = match side {
                    Side::Cut => ('C', 1.0),
                    Side::Fill => ('F', -1.0),
                };
                let volume: Vec<(usize, f64)> = vars
                    .volume_vars(owner, m, side == Side::Cut)
                    .iter()
                    .map(|&v| (v, 1.0))
                    .collect();
                let layers = &approx.side(side).slabs;
                if layers.len() == 1 {
                    let mut row = volume;
                    row.push((u, depth_sign * layers[0].area));
                    b.row(
                        format!("VOL{tag}_{label}_{m}"),
                        Family::VolumeSlab,
                        row,
                        Relation::Ge,
                        0.0,
                    );
                    continue;
                }
                let delta: Vec<usize> = (0..layers.len())
                    .map(|k| b.var(format!("D{tag}_{label}_{m}_{k}"), 0.0, 1.0))
                    .collect();
                let bins: Vec<usize> = (0..layers.len() - 1)
                    .map(|k| b.binary(format!("B{tag}_{label}_{m}_{k}")))
                    .collect();
                let mut depth: Vec<(usize, f64)> = layers
                    .iter()
                    .zip(&delta)
                    .map(|(s, &d)| (d, s.height))
                    .collect();
                depth.push((u, depth_sign));
                b.row(
                    format!("DEP{tag}_{label}_{m}"),
                    Family::VolumeSlab,
                    depth,
                    Relation::Ge,
                    0.0,
                );
                let mut row = volume;
                row.extend(
                    layers
                        .iter()
                        .zip(&delta)
                        .map(|(s, &d)| (d, -s.area * s.height)),
                );
                b.row(
                    format!("VOL{tag}_{label}_{m}"),
                    Family::VolumeSlab,
                    row,
                    Relation::Ge,
                    0.0,
                );
                b.slab_chains.push(SlabChain {
                    fractions: delta.clone(),
                    heights: layers.iter().map(|s| s.height).collect(),
                    binaries: bins.clone(),
                });
                for (k, &bin) in bins.iter().enumerate() {
                    b.row(
                        format!("ORD{tag}_{label}_{m}_{k}_A"),
                        Family::VolumeSlab,
                        vec![(delta[k + 1], 1.0), (bin, -1.0)],
                        Relation::Le,
                        0.0,
                    );
                    b.row(
                        format!("ORD{tag}_{label}_{m}_{k}_B"),
                        Family::VolumeSlab,
                        vec![(bin, 1.0), (delta[k], -1.0)],
                        Relation::Le,
                        0.0,
                    );
                }
            }
        }
    }
    Ok(())
}

/// Fitted volume bounds: linear fits become rows, quadratic fits become
/// convex quadratic constraints.
pub fn emit_volume_fitted(
    b: &mut InstanceBuilder,
    net: &RoadNetwork,
    vars: &CommonVars,
    fits: &FitSet,
) -> Result<()> {
    for owner in Owner::all(net) {
        let label = owner.label();
        let u = vars.offset_var(owner);
        let bounds = match owner {
            Owner::Section(i, j) => {
                let s = &net.roads[i].sections[j];
                (s.offset_min, s.offset_max)
            }
            Owner::Intersection(e) => {
                let x = &net.intersections[e];
                (x.offset_min, x.offset_max)
            }
        };
        for m in 0..net.material_count() {
            let entry = fits
                .get(owner, m)
                .ok_or_else(|| Error::Emission(format!("missing fit for {label} material {m}")))?;
            for side in Side::BOTH {
                let fit = entry.side(side);
                let opposite = match side {
                    Side::Cut => (0.0, bounds.1),
                    Side::Fill => (bounds.0, 0.0),
                };
                let (q, l, c) = fit.terms();
                if q < 0.0 {
                    return Err(Error::Convexity(format!(
                        "{label} material {m} {}: leading coefficient {q} < 0",
                        side.label()
                    )));
                }
                let peak = fit.opposite_side_peak(opposite);
                if peak > SIGN_TOL * c.abs().max(1.0) {
                    return Err(Error::Convexity(format!(
                        "{label} material {m} {}: bound reaches {peak} on the opposite side",
                        side.label()
                    )));
                }
                let volume = vars.volume_vars(owner, m, side == Side::Cut);
                match fit.kind {
                    FitKind::Linear => {
                        let mut row: Vec<(usize, f64)> = volume.iter().map(|&v| (v, 1.0)).collect();
                        row.push((u, -l));
                        b.row(
                            format!("VOLL_{label}_{m}_{}", side.label()),
                            Family::VolumeFit,
                            row,
                            Relation::Ge,
                            c,
                        );
                    }
                    FitKind::Quadratic => b.quadratics.push(QuadraticConstraint {
                        name: format!("VOLQ_{label}_{m}_{}", side.label()),
                        volume_vars: volume.to_vec(),
                        offset_var: u,
                        chi: [q, l, c],
                    }),
                }
            }
        }
    }
    Ok(())
}
