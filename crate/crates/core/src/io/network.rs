use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_text, write_text};
use crate::error::{Error, Result};
use crate::network::RoadNetwork;

pub const PROFILE_HEADER: [&str; 3] = ["road_id", "station_m", "elevation_m"];

/// Parses and validates a TOML network document. `origin` names the source
/// in error messages.
pub fn network_from_toml(text: &str, origin: &Path) -> Result<RoadNetwork> {
    let net: RoadNetwork =
        toml::from_str(text).map_err(|e| Error::parse(origin, e.to_string()))?;
    net.ensure_valid()?;
    Ok(net)
}

pub fn network_to_toml(net: &RoadNetwork) -> Result<String> {
    toml::to_string(net).map_err(|e| Error::Emission(format!("network serialization: {e}")))
}

pub fn load_network(path: impl AsRef<Path>) -> Result<RoadNetwork> {
    let path = path.as_ref();
    network_from_toml(&read_text(path)?, path)
}

pub fn save_network(net: &RoadNetwork, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &network_to_toml(net)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    road_id: String,
    station_m: f64,
    elevation_m: f64,
}

/// Ground stations per road id, sorted by station.
pub type GroundProfile = BTreeMap<String, Vec<(f64, f64)>>;

fn check_header(headers: &csv::StringRecord, expected: &[&str], origin: &Path) -> Result<()> {
    if headers.iter().eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(Error::parse(
            origin,
            format!(
                "header {:?} does not match {:?}",
                headers.iter().collect::<Vec<_>>(),
                expected
            ),
        ))
    }
}

pub(crate) fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader)
}

pub(crate) fn records<R: Read, T: serde::de::DeserializeOwned>(
    reader: R,
    header: &[&str],
    origin: &Path,
) -> Result<Vec<T>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(origin, e.to_string()))?
        .clone();
    check_header(&headers, header, origin)?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::parse(origin, e.to_string())))
        .collect()
}

pub fn read_profile<R: Read>(reader: R, origin: &Path) -> Result<GroundProfile> {
    let rows: Vec<ProfileRow> = records(reader, &PROFILE_HEADER, origin)?;
    let mut out = GroundProfile::new();
    for row in rows {
        if !(row.station_m.is_finite() && row.elevation_m.is_finite()) {
            return Err(Error::parse(
                origin,
                format!("road {}: non-finite station or elevation", row.road_id),
            ));
        }
        out.entry(row.road_id)
            .or_default()
            .push((row.station_m, row.elevation_m));
    }
    for (road, points) in &mut out {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::parse(
                origin,
                format!("road {road}: duplicate station {}", w[0].0),
            ));
        }
    }
    Ok(out)
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<GroundProfile> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_profile(file, path)
}

/// Linear interpolation of the ground line at `station`.
fn interpolate(points: &[(f64, f64)], station: f64) -> Option<f64> {
    let k = points.partition_point(|p| p.0 < station);
    if k < points.len() && points[k].0 == station {
        return Some(points[k].1);
    }
    if k == 0 || k == points.len() {
        return None;
    }
    let (s0, e0) = points[k - 1];
    let (s1, e1) = points[k];
    Some(e0 + (e1 - e0) * (station - s0) / (s1 - s0))
}

/// Replaces the ground elevation of every section of the listed roads with
/// the profile interpolated at its station, then revalidates.
pub fn apply_profile(net: &mut RoadNetwork, profile: &GroundProfile) -> Result<()> {
    for (id, points) in profile {
        let road = net
            .roads
            .iter_mut()
            .find(|r| &r.id == id)
            .ok_or_else(|| Error::Domain(format!("profile names unknown road {id:?}")))?;
        for (j, sec) in road.sections.iter_mut().enumerate() {
            sec.ground_elevation = interpolate(points, sec.station).ok_or_else(|| {
                Error::Domain(format!(
                    "road {id} section {j}: station {} outside the profile",
                    sec.station
                ))
            })?;
        }
    }
    net.ensure_valid()
}

/// Writes the section stations and ground elevations of every road.
pub fn write_profile<W: Write>(net: &RoadNetwork, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let fail = |e: csv::Error| Error::Emission(format!("profile CSV: {e}"));
    for road in &net.roads {
        for sec in &road.sections {
            w.serialize(ProfileRow {
                road_id: road.id.clone(),
                station_m: sec.station,
                elevation_m: sec.ground_elevation,
            })
            .map_err(fail)?;
        }
    }
    w.flush()
        .map_err(|e| Error::Emission(format!("profile CSV: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthSpec, Terrain};

    fn origin() -> &'static Path {
        Path::new("test")
    }

    #[test]
    fn toml_round_trip_is_exact() {
        let net = generate(&SynthSpec {
            roads: 3,
            intersections: 2,
            terrain: Terrain::Sinusoidal {
                amplitude: 2.5,
                wavelength: 77.0,
            },
            ..SynthSpec::default()
        })
        .unwrap()
        .network;
        let text = network_to_toml(&net).unwrap();
        let back = network_from_toml(&text, origin()).unwrap();
        assert_eq!(back, net);
        assert_eq!(network_to_toml(&back).unwrap(), text);
    }

    const MINIMAL: &str = r#"
[[roads]]
id = "R1"
segments = [{ start_station = 0.0, length = 40.0, section_count = 3 }]
sections = [
  { station = 0.0, length = 10.0, ground_elevation = 5.0, offset_min = -2.0, offset_max = 2.0, width = 8.0 },
  { station = 20.0, length = 20.0, ground_elevation = 5.0, offset_min = -2.0, offset_max = 2.0, width = 8.0 },
  { station = 40.0, length = 10.0, ground_elevation = 5.0, offset_min = -2.0, offset_max = 2.0, width = 8.0 },
]

[[materials]]
id = "soil"
excavation_cost = 1.0
embankment_cost = 1.0

[[haul_types]]
id = "truck"
haul_cost = [0.01]
loading_cost = [1.0]
"#;

    #[test]
    fn minimal_document() {
        let net = network_from_toml(MINIMAL, origin()).unwrap();
        assert_eq!(net.roads.len(), 1);
        assert!(net.intersections.is_empty());
        assert_eq!(net.config, Default::default());
    }

    #[test]
    fn unknown_field_is_named() {
        let text = MINIMAL.replace("id = \"soil\"", "id = \"soil\"\ndensity = 1.8");
        let err = network_from_toml(&text, origin()).unwrap_err().to_string();
        assert!(err.contains("density"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn invalid_document_forwards_report() {
        let text = MINIMAL.replace("section_count = 3", "section_count = 2");
        assert!(matches!(
            network_from_toml(&text, origin()),
            Err(Error::InvalidNetwork(_))
        ));
    }

    #[test]
    fn profile_round_trip_and_order() {
        let net = network_from_toml(MINIMAL, origin()).unwrap();
        let mut buf = Vec::new();
        write_profile(&net, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("road_id,station_m,elevation_m\n"));
        let a = read_profile(text.as_bytes(), origin()).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        lines[1..].reverse();
        let b = read_profile(lines.join("\n").as_bytes(), origin()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a["R1"], vec![(0.0, 5.0), (20.0, 5.0), (40.0, 5.0)]);
    }

    #[test]
    fn profile_interpolates_onto_sections() {
        let mut net = network_from_toml(MINIMAL, origin()).unwrap();
        let csv = "road_id,station_m,elevation_m\nR1,0,4\nR1,40,8\n";
        apply_profile(&mut net, &read_profile(csv.as_bytes(), origin()).unwrap()).unwrap();
        let elev: Vec<f64> = net.roads[0].sections.iter().map(|s| s.ground_elevation).collect();
        assert_eq!(elev, vec![4.0, 6.0, 8.0]);
    }

    #[test]
    fn profile_errors() {
        let bad_header = "road,station_m,elevation_m\nR1,0,4\n";
        assert!(read_profile(bad_header.as_bytes(), origin()).is_err());
        let dup = "road_id,station_m,elevation_m\nR1,0,4\nR1,0,5\n";
        assert!(read_profile(dup.as_bytes(), origin()).is_err());
        let mut net = network_from_toml(MINIMAL, origin()).unwrap();
        let short = "road_id,station_m,elevation_m\nR1,0,4\nR1,30,8\n";
        let p = read_profile(short.as_bytes(), origin()).unwrap();
        assert!(apply_profile(&mut net, &p).is_err());
    }

    #[test]
    fn decimal_comma_is_rejected() {
        let text = "road_id,station_m,elevation_m\nR1,\"0,5\",4\n";
        assert!(read_profile(text.as_bytes(), origin()).is_err());
    }
}
