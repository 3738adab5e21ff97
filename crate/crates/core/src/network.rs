//! Road-network data model: roads split into spline segments and sections,
//! intersections joining road endpoints, borrow/waste pits, materials and
//! haul types, together with the index-mapping functions used by the model
//! builders.
//!
//! All indices are zero-based. Sections are numbered per road; segment `g`
//! owns a contiguous run of `section_count` sections.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STATION_TOL: f64 = 1e-9;
const ELEVATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadNetwork {
    pub roads: Vec<Road>,
    #[serde(default)]
    pub intersections: Vec<Intersection>,
    #[serde(default)]
    pub pits: Vec<Pit>,
    pub materials: Vec<Material>,
    pub haul_types: Vec<HaulType>,
    #[serde(default)]
    pub config: NetworkConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Road {
    pub id: String,
    pub segments: Vec<Segment>,
    pub sections: Vec<Section>,
}

/// One quadratic piece of a road's vertical profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub start_station: f64,
    pub length: f64,
    pub section_count: usize,
}

impl Segment {
    pub fn end_station(&self) -> f64 {
        self.start_station + self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    /// Arc-length position along the road, meters.
    pub station: f64,
    /// Effective length used to turn areas into volumes, meters.
    pub length: f64,
    pub ground_elevation: f64,
    /// Lowest admissible offset (deepest cut), negative.
    pub offset_min: f64,
    /// Highest admissible offset (tallest fill), positive.
    pub offset_max: f64,
    /// Road formation width.
    pub width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attachment {
    pub road: usize,
    pub section: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intersection {
    pub id: String,
    pub attachments: Vec<Attachment>,
    pub offset_min: f64,
    pub offset_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PitKind {
    Borrow,
    Waste,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pit {
    pub id: String,
    pub kind: PitKind,
    pub road: usize,
    pub section: usize,
    /// Per-material capacity in cubic meters; `None` means unlimited.
    #[serde(default)]
    pub capacity: Option<Vec<f64>>,
    pub dead_haul_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub id: String,
    pub excavation_cost: f64,
    pub embankment_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaulType {
    pub id: String,
    /// Cost per cubic meter per meter hauled, indexed by material.
    pub haul_cost: Vec<f64>,
    /// Cost per cubic meter loaded, indexed by material.
    pub loading_cost: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub grade_min: f64,
    pub grade_max: f64,
    /// Uniform override for the per-section volume caps; derived from the
    /// cross-section data when absent.
    #[serde(default)]
    pub volume_cap: Option<f64>,
    /// Unit cost charged on transfers through an intersection node.
    pub intersection_transfer_cost: f64,
    /// Emit pit capacity rows.
    pub capacity_constraints: bool,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            grade_min: -0.1,
            grade_max: 0.1,
            volume_cap: None,
            intersection_transfer_cost: 0.0,
            capacity_constraints: true,
        }
    }
}

pub const DEFAULT_HAUL_COUNT: usize = 3;

/// Short, middle and long haul equipment classes with costs replicated for
/// every material: cheap loading with expensive distance, and the reverse.
pub fn default_haul_types(material_count: usize) -> Vec<HaulType> {
    let spec = [
        ("short", 0.02, 0.5),
        ("middle", 0.01, 1.5),
        ("long", 0.005, 3.0),
    ];
    spec.iter()
        .take(DEFAULT_HAUL_COUNT)
        .map(|&(id, haul, load)| HaulType {
            id: id.to_string(),
            haul_cost: vec![haul; material_count],
            loading_cost: vec![load; material_count],
        })
        .collect()
}

/// Quadratic profile polynomial of one segment, in local coordinate
/// `s - start_station`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPolynomial {
    pub start_station: f64,
    pub coefficients: [f64; 3],
}

impl SegmentPolynomial {
    pub fn elevation(&self, station: f64) -> f64 {
        let t = station - self.start_station;
        let [a, b, c] = self.coefficients;
        a + b * t + c * t * t
    }

    pub fn grade(&self, station: f64) -> f64 {
        let t = station - self.start_station;
        self.coefficients[1] + 2.0 * self.coefficients[2] * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    EmptyIndexSet,
    CostVector,
    GradeBounds,
    Segment,
    SegmentContinuity,
    SectionCount,
    Section,
    IntersectionArity,
    IntersectionNotAtEndpoint,
    IntersectionReference,
    IntersectionElevation,
    DuplicateAttachment,
    Pit,
    Config,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {:?}: {}", v.kind, v.message)?;
        }
        Ok(())
    }
}

fn finite_nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl RoadNetwork {
    pub fn material_count(&self) -> usize {
        self.materials.len()
    }

    pub fn haul_count(&self) -> usize {
        self.haul_types.len()
    }

    pub fn section_count(&self) -> usize {
        self.roads.iter().map(|r| r.sections.len()).sum()
    }

    /// Checks every structural invariant and lists all problems found.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let m = self.materials.len();

        if self.materials.is_empty() {
            report.push(ViolationKind::EmptyIndexSet, "no materials");
        }
        if self.haul_types.is_empty() {
            report.push(ViolationKind::EmptyIndexSet, "no haul types");
        }
        for mat in &self.materials {
            if !finite_nonneg(mat.excavation_cost) || !finite_nonneg(mat.embankment_cost) {
                report.push(
                    ViolationKind::CostVector,
                    format!("material {}: costs must be finite and >= 0", mat.id),
                );
            }
        }
        for haul in &self.haul_types {
            if haul.haul_cost.len() != m || haul.loading_cost.len() != m {
                report.push(
                    ViolationKind::CostVector,
                    format!("haul type {}: expected {m} per-material costs", haul.id),
                );
            }
            if !haul
                .haul_cost
                .iter()
                .chain(&haul.loading_cost)
                .all(|&c| finite_nonneg(c))
            {
                report.push(
                    ViolationKind::CostVector,
                    format!("haul type {}: costs must be finite and >= 0", haul.id),
                );
            }
        }
        let cfg = &self.config;
        if !(cfg.grade_min.is_finite()
            && cfg.grade_max.is_finite()
            && cfg.grade_min < cfg.grade_max)
        {
            report.push(
                ViolationKind::GradeBounds,
                format!(
                    "grade bounds [{}, {}] are not ordered",
                    cfg.grade_min, cfg.grade_max
                ),
            );
        }
        if let Some(cap) = cfg.volume_cap {
            if !(cap.is_finite() && cap > 0.0) {
                report.push(ViolationKind::Config, "volume cap must be positive");
            }
        }
        if !finite_nonneg(cfg.intersection_transfer_cost) {
            report.push(
                ViolationKind::Config,
                "intersection transfer cost must be >= 0",
            );
        }

        for (i, road) in self.roads.iter().enumerate() {
            self.validate_road(i, road, &mut report);
        }
        self.validate_intersections(&mut report);
        self.validate_pits(&mut report);
        report
    }

    fn validate_road(&self, i: usize, road: &Road, report: &mut ValidationReport) {
        if road.segments.is_empty() || road.sections.is_empty() {
            report.push(
                ViolationKind::EmptyIndexSet,
                format!("road {} ({i}) has no segments or no sections", road.id),
            );
            return;
        }
        let declared: usize = road.segments.iter().map(|s| s.section_count).sum();
        if declared != road.sections.len() {
            report.push(
                ViolationKind::SectionCount,
                format!(
                    "road {}: segments declare {declared} sections but {} are listed",
                    road.id,
                    road.sections.len()
                ),
            );
        }
        for (g, seg) in road.segments.iter().enumerate() {
            if !(seg.length.is_finite() && seg.length > 0.0) || seg.section_count == 0 {
                report.push(
                    ViolationKind::Segment,
                    format!(
                        "road {} segment {g}: needs length > 0 and >= 1 section",
                        road.id
                    ),
                );
            }
            if g > 0 {
                let prev = road.segments[g - 1];
                let scale = 1.0 + prev.end_station().abs();
                if (prev.end_station() - seg.start_station).abs() > STATION_TOL * scale {
                    report.push(
                        ViolationKind::SegmentContinuity,
                        format!(
                            "road {} segment {g} starts at {} but segment {} ends at {}",
                            road.id,
                            seg.start_station,
                            g - 1,
                            prev.end_station()
                        ),
                    );
                }
            }
        }
        for (j, sec) in road.sections.iter().enumerate() {
            let ok = sec.length.is_finite()
                && sec.length > 0.0
                && sec.offset_min < 0.0
                && sec.offset_max > 0.0
                && sec.offset_min.is_finite()
                && sec.offset_max.is_finite()
                && sec.ground_elevation.is_finite()
                && sec.station.is_finite()
                && finite_nonneg(sec.width);
            if !ok {
                report.push(
                    ViolationKind::Section,
                    format!(
                        "road {} section {j}: needs length > 0, finite data and offset_min < 0 < offset_max",
                        road.id
                    ),
                );
            }
            if j > 0 && sec.station <= road.sections[j - 1].station {
                report.push(
                    ViolationKind::Section,
                    format!(
                        "road {} section {j}: stations must strictly increase",
                        road.id
                    ),
                );
            }
        }
        if declared == road.sections.len() {
            let mut j = 0;
            for (g, seg) in road.segments.iter().enumerate() {
                let tol = STATION_TOL * (1.0 + seg.end_station().abs());
                for sec in &road.sections[j..j + seg.section_count] {
                    if sec.station < seg.start_station - tol
                        || sec.station > seg.end_station() + tol
                    {
                        report.push(
                            ViolationKind::Section,
                            format!(
                                "road {} section at station {} lies outside segment {g}",
                                road.id, sec.station
                            ),
                        );
                    }
                }
                j += seg.section_count;
            }
        }
    }

    fn validate_intersections(&self, report: &mut ValidationReport) {
        let mut owner: HashMap<Attachment, usize> = HashMap::new();
        for (e, inter) in self.intersections.iter().enumerate() {
            let mut distinct = inter.attachments.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() < 2 {
                report.push(
                    ViolationKind::IntersectionArity,
                    format!("intersection {} needs >= 2 distinct attachments", inter.id),
                );
            }
            if distinct.len() != inter.attachments.len() {
                report.push(
                    ViolationKind::DuplicateAttachment,
                    format!("intersection {} lists an attachment twice", inter.id),
                );
            }
            if !(inter.offset_min < 0.0 && inter.offset_max > 0.0) {
                report.push(
                    ViolationKind::IntersectionReference,
                    format!(
                        "intersection {}: needs offset_min < 0 < offset_max",
                        inter.id
                    ),
                );
            }
            let mut elevations = Vec::new();
            for att in &inter.attachments {
                let Some(road) = self.roads.get(att.road) else {
                    report.push(
                        ViolationKind::IntersectionReference,
                        format!("intersection {}: unknown road {}", inter.id, att.road),
                    );
                    continue;
                };
                let n = road.sections.len();
                if att.section >= n {
                    report.push(
                        ViolationKind::IntersectionReference,
                        format!(
                            "intersection {}: road {} has no section {}",
                            inter.id, road.id, att.section
                        ),
                    );
                    continue;
                }
                if att.section != 0 && att.section != n - 1 {
                    report.push(
                        ViolationKind::IntersectionNotAtEndpoint,
                        format!(
                            "intersection not at road endpoint: {} attaches road {} section {}",
                            inter.id, road.id, att.section
                        ),
                    );
                }
                if let Some(prev) = owner.insert(*att, e) {
                    if prev != e {
                        report.push(
                            ViolationKind::DuplicateAttachment,
                            format!(
                                "road {} section {} attached to intersections {} and {}",
                                road.id, att.section, self.intersections[prev].id, inter.id
                            ),
                        );
                    }
                }
                elevations.push(road.sections[att.section].ground_elevation);
            }
            if let (Some(lo), Some(hi)) = (
                elevations.iter().cloned().reduce(f64::min),
                elevations.iter().cloned().reduce(f64::max),
            ) {
                if hi - lo > ELEVATION_TOL * (1.0 + hi.abs()) {
                    report.push(
                        ViolationKind::IntersectionElevation,
                        format!(
                            "intersection {}: attached ground elevations differ ({lo} vs {hi})",
                            inter.id
                        ),
                    );
                }
            }
        }
    }

    fn validate_pits(&self, report: &mut ValidationReport) {
        for pit in &self.pits {
            let located = self
                .roads
                .get(pit.road)
                .is_some_and(|r| pit.section < r.sections.len());
            if !located {
                report.push(
                    ViolationKind::Pit,
                    format!(
                        "pit {}: unknown road/section ({}, {})",
                        pit.id, pit.road, pit.section
                    ),
                );
            }
            if !finite_nonneg(pit.dead_haul_distance) {
                report.push(
                    ViolationKind::Pit,
                    format!("pit {}: dead haul distance must be >= 0", pit.id),
                );
            }
            if let Some(cap) = &pit.capacity {
                if cap.len() != self.materials.len()
                    || !cap.iter().all(|&c| c >= 0.0 && !c.is_nan())
                {
                    report.push(
                        ViolationKind::Pit,
                        format!("pit {}: capacity must be >= 0 for every material", pit.id),
                    );
                }
            }
        }
    }

    /// Validates and turns a non-empty report into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidNetwork(report))
        }
    }

    /// Maps (road, segment, local section) to the road's section index.
    pub fn section_lookup(&self, road: usize, segment: usize, local: usize) -> Result<usize> {
        let r = self
            .roads
            .get(road)
            .ok_or_else(|| Error::Domain(format!("road {road}")))?;
        let seg = r
            .segments
            .get(segment)
            .ok_or_else(|| Error::Domain(format!("road {road} segment {segment}")))?;
        if local >= seg.section_count {
            return Err(Error::Domain(format!(
                "road {road} segment {segment} local section {local} (segment has {})",
                seg.section_count
            )));
        }
        let offset: usize = r.segments[..segment].iter().map(|s| s.section_count).sum();
        Ok(offset + local)
    }

    /// Inverse of [`section_lookup`](Self::section_lookup).
    pub fn segment_of(&self, road: usize, section: usize) -> Result<(usize, usize)> {
        let r = self
            .roads
            .get(road)
            .ok_or_else(|| Error::Domain(format!("road {road}")))?;
        let mut start = 0;
        for (g, seg) in r.segments.iter().enumerate() {
            if section < start + seg.section_count {
                return Ok((g, section - start));
            }
            start += seg.section_count;
        }
        Err(Error::Domain(format!("road {road} section {section}")))
    }

    /// Roads joined at intersection `e`.
    pub fn roads_at(&self, e: usize) -> Vec<usize> {
        let mut roads: Vec<usize> = self.intersections[e]
            .attachments
            .iter()
            .map(|a| a.road)
            .collect();
        roads.dedup();
        roads
    }

    /// Sections of `road` attached to intersection `e`.
    pub fn sections_at(&self, e: usize, road: usize) -> Vec<usize> {
        self.intersections[e]
            .attachments
            .iter()
            .filter(|a| a.road == road)
            .map(|a| a.section)
            .collect()
    }

    /// Segment and local index of the `n`-th attachment of intersection `e`.
    pub fn attachment_segment(&self, e: usize, n: usize) -> Result<(usize, usize)> {
        let att = self.intersections[e].attachments[n];
        self.segment_of(att.road, att.section)
    }

    /// Builds the reverse lookup from (road, section) to intersection.
    pub fn attachment_index(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::new();
        for (e, inter) in self.intersections.iter().enumerate() {
            for att in &inter.attachments {
                map.insert((att.road, att.section), e);
            }
        }
        map
    }

    /// Intersection attached at (road, section), if any.
    pub fn intersection_of(&self, road: usize, section: usize) -> Option<usize> {
        self.intersections.iter().position(|inter| {
            inter
                .attachments
                .iter()
                .any(|a| a.road == road && a.section == section)
        })
    }

    pub fn pits_of(&self, kind: PitKind) -> impl Iterator<Item = (usize, &Pit)> {
        self.pits
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.kind == kind)
    }

    /// Segment polynomials of a road from a flat coefficient slice laid out
    /// as `[a_g1, a_g2, a_g3]` per segment.
    pub fn road_polynomials(&self, road: usize, coefficients: &[f64]) -> Vec<SegmentPolynomial> {
        self.roads[road]
            .segments
            .iter()
            .enumerate()
            .map(|(g, seg)| SegmentPolynomial {
                start_station: seg.start_station,
                coefficients: [
                    coefficients[3 * g],
                    coefficients[3 * g + 1],
                    coefficients[3 * g + 2],
                ],
            })
            .collect()
    }
}

impl Road {
    pub fn station_distance(&self, arc: usize) -> f64 {
        self.sections[arc + 1].station - self.sections[arc].station
    }

    pub fn start_station(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.start_station)
    }

    pub fn end_station(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end_station())
    }

    /// Splits sections evenly-spaced from `start` into segments of the given
    /// sizes; knots sit on the first station of each segment and the road ends
    /// at its last station.
    pub fn uniform(
        id: impl Into<String>,
        start: f64,
        spacing: f64,
        segment_sizes: &[usize],
        section: impl Fn(usize, f64) -> Section,
    ) -> Road {
        let n: usize = segment_sizes.iter().sum();
        let sections: Vec<Section> = (0..n)
            .map(|j| section(j, start + spacing * j as f64))
            .collect();
        let mut segments = Vec::with_capacity(segment_sizes.len());
        let mut first = 0;
        for (g, &size) in segment_sizes.iter().enumerate() {
            let s0 = start + spacing * first as f64;
            let end = if g + 1 == segment_sizes.len() {
                start + spacing * (n - 1) as f64
            } else {
                start + spacing * (first + size) as f64
            };
            segments.push(Segment {
                start_station: s0,
                length: end - s0,
                section_count: size,
            });
            first += size;
        }
        Road {
            id: id.into(),
            segments,
            sections,
        }
    }
}
