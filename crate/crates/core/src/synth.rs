//! Seeded synthetic networks and cross-section tables, so that every test and
//! benchmark runs without external data.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AreaSample, CrossSectionSet, CrossSectionTable};
use crate::network::{
    default_haul_types, Attachment, Intersection, Material, NetworkConfig, Pit, PitKind, Road,
    RoadNetwork, Section,
};

/// Ground elevation as a function of global chainage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Terrain {
    Flat,
    Ramp { slope: f64 },
    Sinusoidal { amplitude: f64, wavelength: f64 },
    /// Random walk with steps in `[-amplitude, amplitude]`.
    Noisy { amplitude: f64 },
}

impl std::str::FromStr for Terrain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "flat" => Ok(Terrain::Flat),
            "ramp" => Ok(Terrain::Ramp { slope: 0.05 }),
            "steep" => Ok(Terrain::Ramp { slope: 0.2 }),
            "sinusoidal" => Ok(Terrain::Sinusoidal {
                amplitude: 3.0,
                wavelength: 200.0,
            }),
            "noisy" => Ok(Terrain::Noisy { amplitude: 0.5 }),
            other => Err(format!(
                "unknown terrain {other:?} (flat|ramp|steep|sinusoidal|noisy)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionShape {
    /// Vertical walls: area is `width · depth`.
    Rectangular,
    /// Random side-slope angles per section.
    Trapezoid,
    /// Trapezoid with multiplicative noise on every sample.
    NoisyTrapezoid,
    /// Area grows like `depth^0.6`.
    Concave,
    /// Random non-negative increments.
    Irregular,
}

impl std::str::FromStr for SectionShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rectangular" => Ok(SectionShape::Rectangular),
            "trapezoid" => Ok(SectionShape::Trapezoid),
            "noisy-trapezoid" => Ok(SectionShape::NoisyTrapezoid),
            "concave" => Ok(SectionShape::Concave),
            "irregular" => Ok(SectionShape::Irregular),
            other => Err(format!(
                "unknown section shape {other:?} (rectangular|trapezoid|noisy-trapezoid|concave|irregular)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub roads: usize,
    /// Intersections join the end of road `e` to the start of road `e + 1`.
    pub intersections: usize,
    pub sections_per_road: usize,
    /// Sections per spline segment; the last segment takes the remainder.
    pub segment_size: usize,
    pub spacing: f64,
    pub materials: usize,
    pub width: f64,
    pub offset_bound: f64,
    pub base_elevation: f64,
    pub terrain: Terrain,
    pub shape: SectionShape,
    /// Samples per side in each cross-section table.
    pub table_points: usize,
    pub pits: bool,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            roads: 1,
            intersections: 0,
            sections_per_road: 6,
            segment_size: 2,
            spacing: 20.0,
            materials: 1,
            width: 8.0,
            offset_bound: 2.0,
            base_elevation: 100.0,
            terrain: Terrain::Flat,
            shape: SectionShape::Trapezoid,
            table_points: 10,
            pits: true,
            seed: 0,
        }
    }
}

impl SynthSpec {
    /// The 12-road, 5-intersection benchmark layout.
    pub fn medium(materials: usize, seed: u64) -> Self {
        Self {
            roads: 12,
            intersections: 5,
            materials,
            terrain: Terrain::Sinusoidal {
                amplitude: 2.0,
                wavelength: 160.0,
            },
            seed,
            ..Self::default()
        }
    }

    /// The 32-road, 16-intersection benchmark layout.
    pub fn large(materials: usize, seed: u64) -> Self {
        Self {
            roads: 32,
            intersections: 16,
            ..Self::medium(materials, seed)
        }
    }
}

/// A generated network with its cross-section tables.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthInstance {
    pub network: RoadNetwork,
    pub tables: CrossSectionSet,
}

fn segment_sizes(n: usize, size: usize) -> Vec<usize> {
    let size = size.max(1);
    let mut sizes = vec![size; n / size];
    match n % size {
        0 => {}
        r if sizes.is_empty() => sizes.push(r),
        r => *sizes.last_mut().unwrap() += r,
    }
    sizes
}

/// Builds a network and tables from a spec. The same spec always yields the
/// same output.
pub fn generate(spec: &SynthSpec) -> Result<SynthInstance> {
    if spec.roads == 0 || spec.sections_per_road < 2 || spec.materials == 0 {
        return Err(Error::Domain(
            "synthetic network needs >= 1 road, >= 2 sections per road and >= 1 material".into(),
        ));
    }
    if spec.intersections >= spec.roads {
        return Err(Error::Domain(format!(
            "{} intersections need at least {} roads",
            spec.intersections,
            spec.intersections + 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.sections_per_road;
    let span = spec.spacing * (n - 1) as f64;

    // ground along one long chainage so that chained roads meet at equal height
    let total = spec.roads * (n - 1) + 1;
    let mut walk = Vec::with_capacity(total);
    let mut level = 0.0;
    for k in 0..total {
        let x = spec.spacing * k as f64;
        let h = match spec.terrain {
            Terrain::Flat => 0.0,
            Terrain::Ramp { slope } => slope * x,
            Terrain::Sinusoidal {
                amplitude,
                wavelength,
            } => amplitude * (2.0 * PI * x / wavelength).sin(),
            Terrain::Noisy { amplitude } => {
                if k > 0 {
                    level += rng.gen_range(-amplitude..=amplitude);
                }
                level
            }
        };
        walk.push(spec.base_elevation + h);
    }

    let sizes = segment_sizes(n, spec.segment_size);
    let roads: Vec<Road> = (0..spec.roads)
        .map(|i| {
            Road::uniform(format!("R{i}"), 0.0, spec.spacing, &sizes, |j, station| {
                Section {
                    station,
                    length: spec.spacing,
                    ground_elevation: walk[i * (n - 1) + j],
                    offset_min: -spec.offset_bound,
                    offset_max: spec.offset_bound,
                    width: spec.width,
                }
            })
        })
        .collect();
    debug_assert!(roads.iter().all(|r| (r.end_station() - span).abs() < 1e-9));

    let intersections = (0..spec.intersections)
        .map(|e| Intersection {
            id: format!("X{e}"),
            attachments: vec![
                Attachment {
                    road: e,
                    section: n - 1,
                },
                Attachment {
                    road: e + 1,
                    section: 0,
                },
            ],
            offset_min: -spec.offset_bound,
            offset_max: spec.offset_bound,
        })
        .collect();

    let last = spec.roads - 1;
    let pits = if spec.pits {
        vec![
            Pit {
                id: "borrow".into(),
                kind: PitKind::Borrow,
                road: 0,
                section: 0,
                capacity: None,
                dead_haul_distance: 200.0,
            },
            Pit {
                id: "waste".into(),
                kind: PitKind::Waste,
                road: last,
                section: n - 1,
                capacity: None,
                dead_haul_distance: 200.0,
            },
        ]
    } else {
        Vec::new()
    };

    let materials: Vec<Material> = (0..spec.materials)
        .map(|m| Material {
            id: format!("M{m}"),
            excavation_cost: 2.0 + m as f64,
            embankment_cost: 1.0 + 0.5 * m as f64,
        })
        .collect();

    let network = RoadNetwork {
        roads,
        intersections,
        pits,
        materials,
        haul_types: default_haul_types(spec.materials),
        config: NetworkConfig::default(),
    };

    let mut tables = CrossSectionSet::default();
    for (i, road) in network.roads.iter().enumerate() {
        for j in 0..road.sections.len() {
            let shares = material_shares(&mut rng, spec.materials);
            let profile = section_profile(&mut rng, spec);
            for (m, share) in shares.iter().enumerate() {
                let samples = profile
                    .iter()
                    .map(|s| AreaSample {
                        offset: s.offset,
                        cut_area: s.cut_area * share,
                        fill_area: s.fill_area * share,
                    })
                    .collect();
                let key = format!("R{i}/{j}/M{m}");
                tables.insert((i, j, m), CrossSectionTable::new(&key, samples)?);
            }
        }
    }
    Ok(SynthInstance { network, tables })
}

fn material_shares(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![1.0];
    }
    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.5..1.5)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|r| r / sum).collect()
}

/// Random side-slope angle between 30 and 80 degrees.
fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(30.0_f64..80.0).to_radians()
}

fn cot(angle: f64) -> f64 {
    if angle >= FRAC_PI_2 {
        0.0
    } else {
        1.0 / angle.tan()
    }
}

/// Offset grid covering the section bounds, `table_points` samples per side.
fn section_profile(rng: &mut ChaCha8Rng, spec: &SynthSpec) -> Vec<AreaSample> {
    let k = spec.table_points.max(2);
    let w = spec.width;
    let depths: Vec<f64> = (1..=k)
        .map(|p| spec.offset_bound * p as f64 / k as f64)
        .collect();
    let side = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        match spec.shape {
            SectionShape::Rectangular => depths.iter().map(|d| w * d).collect(),
            SectionShape::Trapezoid | SectionShape::NoisyTrapezoid => {
                let spread = cot(random_angle(rng)) + cot(random_angle(rng));
                let noisy = spec.shape == SectionShape::NoisyTrapezoid;
                let mut prev = 0.0;
                depths
                    .iter()
                    .map(|d| {
                        let exact = w * d + 0.5 * spread * d * d;
                        let a: f64 = if noisy {
                            exact * (1.0 + rng.gen_range(-0.05..0.05))
                        } else {
                            exact
                        };
                        prev = a.max(prev);
                        prev
                    })
                    .collect()
            }
            SectionShape::Concave => {
                let scale = w * spec.offset_bound.powf(0.4) * rng.gen_range(0.8..1.2);
                depths.iter().map(|d| scale * d.powf(0.6)).collect()
            }
            SectionShape::Irregular => {
                let mut acc = 0.0;
                depths
                    .iter()
                    .map(|_| {
                        acc += w * spec.offset_bound / k as f64 * rng.gen_range(0.0..3.0);
                        acc
                    })
                    .collect()
            }
        }
    };
    let cut = side(rng);
    let fill = side(rng);
    let mut samples = Vec::with_capacity(2 * k + 1);
    for p in (0..k).rev() {
        samples.push(AreaSample {
            offset: -depths[p],
            cut_area: cut[p],
            fill_area: 0.0,
        });
    }
    samples.push(AreaSample {
        offset: 0.0,
        cut_area: 0.0,
        fill_area: 0.0,
    });
    for p in 0..k {
        samples.push(AreaSample {
            offset: depths[p],
            cut_area: 0.0,
            fill_area: fill[p],
        });
    }
    samples
}
