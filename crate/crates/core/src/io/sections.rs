use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::network::records;
use crate::error::{Error, Result};
use crate::geometry::{AreaSample, CrossSectionSet, CrossSectionTable, TableKey};
use crate::network::RoadNetwork;

pub const SECTION_HEADER: [&str; 6] = [
    "road_id",
    "section",
    "material",
    "offset_m",
    "cut_area_m2",
    "fill_area_m2",
];

#[derive(Debug, Serialize, Deserialize)]
struct SectionRow {
    road_id: String,
    section: usize,
    material: String,
    offset_m: f64,
    cut_area_m2: f64,
    fill_area_m2: f64,
}

/// Reads cross-section rows, groups them per (road, section, material) and
/// builds the tables. Sections are zero-based indices along their road;
/// roads and materials are referenced by id. A non-empty file must cover
/// every section and material of the network.
pub fn read_cross_sections<R: Read>(
    reader: R,
    net: &RoadNetwork,
    origin: &Path,
) -> Result<CrossSectionSet> {
    let rows: Vec<SectionRow> = records(reader, &SECTION_HEADER, origin)?;
    let mut groups: BTreeMap<TableKey, Vec<AreaSample>> = BTreeMap::new();
    for row in rows {
        let road = net
            .roads
            .iter()
            .position(|r| r.id == row.road_id)
            .ok_or_else(|| Error::parse(origin, format!("unknown road {:?}", row.road_id)))?;
        if row.section >= net.roads[road].sections.len() {
            return Err(Error::parse(
                origin,
                format!("road {} has no section {}", row.road_id, row.section),
            ));
        }
        let material = net
            .materials
            .iter()
            .position(|m| m.id == row.material)
            .ok_or_else(|| Error::parse(origin, format!("unknown material {:?}", row.material)))?;
        groups
            .entry((road, row.section, material))
            .or_default()
            .push(AreaSample {
                offset: row.offset_m,
                cut_area: row.cut_area_m2,
                fill_area: row.fill_area_m2,
            });
    }
    let mut set = CrossSectionSet::default();
    for ((i, j, m), samples) in groups {
        let key = format!("{}/{j}/{}", net.roads[i].id, net.materials[m].id);
        set.insert((i, j, m), CrossSectionTable::new(&key, samples)?);
    }
    if !set.is_empty() {
        for (i, road) in net.roads.iter().enumerate() {
            for j in 0..road.sections.len() {
                for (m, mat) in net.materials.iter().enumerate() {
                    if set.get(i, j, m).is_none() {
                        return Err(Error::parse(
                            origin,
                            format!("no rows for road {} section {j} material {}", road.id, mat.id),
                        ));
                    }
                }
            }
        }
    }
    Ok(set)
}

pub fn load_cross_sections(path: impl AsRef<Path>, net: &RoadNetwork) -> Result<CrossSectionSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_cross_sections(file, net, path)
}

pub fn write_cross_sections<W: Write>(
    set: &CrossSectionSet,
    net: &RoadNetwork,
    writer: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    let fail = |e: csv::Error| Error::Emission(format!("cross-section CSV: {e}"));
    w.write_record(SECTION_HEADER).map_err(fail)?;
    for (&(i, j, m), table) in &set.tables {
        let road = net
            .roads
            .get(i)
            .ok_or_else(|| Error::Domain(format!("table for missing road {i}")))?;
        let mat = net
            .materials
            .get(m)
            .ok_or_else(|| Error::Domain(format!("table for missing material {m}")))?;
        for s in table.samples() {
            w.serialize(SectionRow {
                road_id: road.id.clone(),
                section: j,
                material: mat.id.clone(),
                offset_m: s.offset,
                cut_area_m2: s.cut_area,
                fill_area_m2: s.fill_area,
            })
            .map_err(fail)?;
        }
    }
    w.flush()
        .map_err(|e| Error::Emission(format!("cross-section CSV: {e}")))
}

pub fn save_cross_sections(
    set: &CrossSectionSet,
    net: &RoadNetwork,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_cross_sections(set, net, std::io::BufWriter::new(file))
}
