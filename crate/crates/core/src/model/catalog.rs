use serde::{Deserialize, Serialize};

use super::instance::InstanceBuilder;
use super::volume::VolumeCaps;
use crate::network::{PitKind, RoadNetwork};

/// `[material][haul]` variable indices.
pub type PerHaul = Vec<Vec<usize>>;

/// Structured indices of every variable shared by both models. Created in a
/// fixed order so that the two models agree column by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonVars {
    /// `[road][segment]` spline coefficients.
    pub spline: Vec<Vec<[usize; 3]>>,
    /// `[road][section]` offsets.
    pub offset: Vec<Vec<usize>>,
    /// `[intersection]` offsets.
    pub z: Vec<usize>,
    /// `[road][section]` per-haul cut and fill volumes.
    pub cut: Vec<Vec<PerHaul>>,
    pub fill: Vec<Vec<PerHaul>>,
    /// `[road][arc]` transit flows; arc `j` joins sections `j` and `j + 1`.
    pub transit_plus: Vec<Vec<PerHaul>>,
    pub transit_minus: Vec<Vec<PerHaul>>,
    /// `[road][section]` unload (section to node) and load (node to section).
    pub unload_plus: Vec<Vec<PerHaul>>,
    pub unload_minus: Vec<Vec<PerHaul>>,
    pub load_plus: Vec<Vec<PerHaul>>,
    pub load_minus: Vec<Vec<PerHaul>>,
    /// `[pit]` flows into (borrow) or out of (waste) the attached section.
    pub pit_plus: Vec<PerHaul>,
    pub pit_minus: Vec<PerHaul>,
    /// `[intersection][attachment]` flows into and out of the junction node.
    pub inflow: Vec<Vec<PerHaul>>,
    pub outflow: Vec<Vec<PerHaul>>,
    /// `[intersection]` junction load/unload flows and volumes.
    pub junction_load: Vec<PerHaul>,
    pub junction_unload: Vec<PerHaul>,
    pub junction_cut: Vec<PerHaul>,
    pub junction_fill: Vec<PerHaul>,
}

fn per_haul(
    b: &mut InstanceBuilder,
    materials: usize,
    hauls: usize,
    mut make: impl FnMut(&mut InstanceBuilder, usize, usize) -> usize,
) -> PerHaul {
    (0..materials)
        .map(|m| (0..hauls).map(|h| make(b, m, h)).collect())
        .collect()
}

impl CommonVars {
    pub fn create(b: &mut InstanceBuilder, net: &RoadNetwork, caps: &VolumeCaps) -> Self {
        let nm = net.material_count();
        let nh = net.haul_count();
        let roads = &net.roads;

        let spline = roads
            .iter()
            .enumerate()
            .map(|(i, r)| {
                (0..r.segments.len())
                    .map(|g| [1, 2, 3].map(|k| b.free(format!("A_{i}_{g}_{k}"))))
                    .collect()
            })
            .collect();
        let offset = roads
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.sections
                    .iter()
                    .enumerate()
                    .map(|(j, s)| b.var(format!("U_{i}_{j}"), s.offset_min, s.offset_max))
                    .collect()
            })
            .collect();
        let z = net
            .intersections
            .iter()
            .enumerate()
            .map(|(e, x)| b.var(format!("Z_{e}"), x.offset_min, x.offset_max))
            .collect();

        let section_block =
            |b: &mut InstanceBuilder, tag: &str, cap: &dyn Fn(usize, usize, usize) -> f64| {
                roads
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        (0..r.sections.len())
                            .map(|j| {
                                per_haul(b, nm, nh, |b, m, h| {
                                    b.var(format!("{tag}_{i}_{j}_{m}_{h}"), 0.0, cap(i, j, m))
                                })
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            };
        let m_cut = |i: usize, j: usize, m: usize| caps.section[i][j][m].0;
        let m_fill = |i: usize, j: usize, m: usize| caps.section[i][j][m].1;

        let cut = section_block(b, "VP", &m_cut);
        let fill = section_block(b, "VM", &m_fill);
        let unload_plus = section_block(b, "FUP", &m_cut);
        let unload_minus = section_block(b, "FUM", &m_cut);
        let load_plus = section_block(b, "FLP", &m_fill);
        let load_minus = section_block(b, "FLM", &m_fill);

        let arc_block = |b: &mut InstanceBuilder, tag: &str| {
            roads
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    (0..r.sections.len().saturating_sub(1))
                        .map(|j| {
                            per_haul(b, nm, nh, |b, m, h| {
                                b.nonneg(format!("{tag}_{i}_{j}_{m}_{h}"))
                            })
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        };
        let transit_plus = arc_block(b, "FTP");
        let transit_minus = arc_block(b, "FTM");

        let pit_tag = |kind: PitKind, plus: bool| match (kind, plus) {
            (PitKind::Borrow, true) => "FBP",
            (PitKind::Borrow, false) => "FBM",
            (PitKind::Waste, true) => "FWP",
            (PitKind::Waste, false) => "FWM",
        };
        let pit_plus = net
            .pits
            .iter()
            .enumerate()
            .map(|(k, p)| {
                per_haul(b, nm, nh, |b, m, h| {
                    b.nonneg(format!("{}_{k}_{m}_{h}", pit_tag(p.kind, true)))
                })
            })
            .collect();
        let pit_minus = net
            .pits
            .iter()
            .enumerate()
            .map(|(k, p)| {
                per_haul(b, nm, nh, |b, m, h| {
                    b.nonneg(format!("{}_{k}_{m}_{h}", pit_tag(p.kind, false)))
                })
            })
            .collect();

        let attach_block = |b: &mut InstanceBuilder, tag: &str| {
            net.intersections
                .iter()
                .enumerate()
                .map(|(e, x)| {
                    x.attachments
                        .iter()
                        .map(|a| {
                            per_haul(b, nm, nh, |b, m, h| {
                                b.nonneg(format!("{tag}_{e}_{}_{}_{m}_{h}", a.road, a.section))
                            })
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        };
        let inflow = attach_block(b, "FIN");
        let outflow = attach_block(b, "FOUT");

        let junction_block = |b: &mut InstanceBuilder, tag: &str, fill_side: bool| {
            (0..net.intersections.len())
                .map(|e| {
                    per_haul(b, nm, nh, |b, m, h| {
                        let (c, f) = caps.intersection[e][m];
                        b.var(
                            format!("{tag}_{e}_{m}_{h}"),
                            0.0,
                            if fill_side { f } else { c },
                        )
                    })
                })
                .collect::<Vec<_>>()
        };
        let junction_load = junction_block(b, "FLE", true);
        let junction_unload = junction_block(b, "FUE", false);
        let junction_cut = junction_block(b, "UP", false);
        let junction_fill = junction_block(b, "UM", true);

        Self {
            spline,
            offset,
            z,
            cut,
            fill,
            transit_plus,
            transit_minus,
            unload_plus,
            unload_minus,
            load_plus,
            load_minus,
            pit_plus,
            pit_minus,
            inflow,
            outflow,
            junction_load,
            junction_unload,
            junction_cut,
            junction_fill,
        }
    }

    /// Volume variables of one owner and material on one side.
    pub fn volume_vars(&self, owner: Owner, m: usize, cut_side: bool) -> &[usize] {
        match (owner, cut_side) {
            (Owner::Section(i, j), true) => &self.cut[i][j][m],
            (Owner::Section(i, j), false) => &self.fill[i][j][m],
            (Owner::Intersection(e), true) => &self.junction_cut[e][m],
            (Owner::Intersection(e), false) => &self.junction_fill[e][m],
        }
    }

    pub fn offset_var(&self, owner: Owner) -> usize {
        match owner {
            Owner::Section(i, j) => self.offset[i][j],
            Owner::Intersection(e) => self.z[e],
        }
    }

    /// Offsets of every road section, read from a solution vector.
    pub fn offsets(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.offset
            .iter()
            .map(|r| r.iter().map(|&k| x[k]).collect())
            .collect()
    }

    /// Spline coefficients of one road, flattened per segment.
    pub fn road_coefficients(&self, road: usize, x: &[f64]) -> Vec<f64> {
        self.spline[road]
            .iter()
            .flat_map(|c| c.iter().map(|&k| x[k]))
            .collect()
    }
}

/// Who carries a volume constraint: an unattached section or an intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Owner {
    Section(usize, usize),
    Intersection(usize),
}

impl Owner {
    pub fn label(&self) -> String {
        match self {
            Owner::Section(i, j) => format!("{i}_{j}"),
            Owner::Intersection(e) => format!("E{e}"),
        }
    }

    /// Every volume owner of a network: sections not attached to an
    /// intersection, followed by the intersections.
    pub fn all(net: &RoadNetwork) -> Vec<Owner> {
        let attached = net.attachment_index();
        let mut owners: Vec<Owner> = net
            .roads
            .iter()
            .enumerate()
            .flat_map(|(i, r)| (0..r.sections.len()).map(move |j| (i, j)))
            .filter(|key| !attached.contains_key(key))
            .map(|(i, j)| Owner::Section(i, j))
            .collect();
        owners.extend((0..net.intersections.len()).map(Owner::Intersection));
        owners
    }
}
