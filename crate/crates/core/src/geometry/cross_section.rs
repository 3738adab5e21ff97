use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AREA_TOL: f64 = 1e-9;

/// Cut or fill side of a cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Cut,
    Fill,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Cut, Side::Fill];

    pub fn label(self) -> &'static str {
        match self {
            Side::Cut => "CUT",
            Side::Fill => "FILL",
        }
    }

    /// Signed offset for a non-negative depth on this side.
    pub fn offset(self, depth: f64) -> f64 {
        match self {
            Side::Cut => -depth,
            Side::Fill => depth,
        }
    }
}

/// Cross-section area as a function of depth below (cut) or height above
/// (fill) the ground line.
pub trait AreaCurve {
    /// Area in m² at `depth >= 0` on `side`.
    fn area(&self, side: Side, depth: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaSample {
    pub offset: f64,
    pub cut_area: f64,
    pub fill_area: f64,
}

/// Sampled offset → area data of one (road, section, material).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionTable {
    samples: Vec<AreaSample>,
}

impl CrossSectionTable {
    /// Sorts the samples, inserts the implicit zero row at `u = 0` when it is
    /// missing, and checks the sign and monotonicity rules.
    pub fn new(key: &str, mut samples: Vec<AreaSample>) -> Result<Self> {
        let fail = |reason: String| Error::CrossSection {
            key: key.to_string(),
            reason,
        };
        if samples.is_empty() {
            return Err(fail("no samples".into()));
        }
        for s in &samples {
            if !(s.offset.is_finite() && s.cut_area.is_finite() && s.fill_area.is_finite()) {
                return Err(fail(format!("non-finite sample at offset {}", s.offset)));
            }
        }
        samples.sort_by(|a, b| a.offset.total_cmp(&b.offset));
        for w in samples.windows(2) {
            if w[0].offset == w[1].offset {
                return Err(fail(format!("duplicate offset {}", w[0].offset)));
            }
        }
        if !samples.iter().any(|s| s.offset == 0.0) {
            let at = samples.partition_point(|s| s.offset < 0.0);
            samples.insert(
                at,
                AreaSample {
                    offset: 0.0,
                    cut_area: 0.0,
                    fill_area: 0.0,
                },
            );
        }
        let scale = samples
            .iter()
            .map(|s| s.cut_area.abs().max(s.fill_area.abs()))
            .fold(1.0, f64::max);
        let tol = AREA_TOL * scale;
        for s in &samples {
            if s.cut_area < -tol || s.fill_area < -tol {
                return Err(fail(format!("negative area at offset {}", s.offset)));
            }
            if s.offset >= 0.0 && s.cut_area > tol {
                return Err(fail(format!(
                    "cut area {} at non-negative offset {}",
                    s.cut_area, s.offset
                )));
            }
            if s.offset <= 0.0 && s.fill_area > tol {
                return Err(fail(format!(
                    "fill area {} at non-positive offset {}",
                    s.fill_area, s.offset
                )));
            }
        }
        for w in samples.windows(2) {
            if w[1].offset <= 0.0 && w[1].cut_area > w[0].cut_area + tol {
                return Err(fail(format!(
                    "non-monotone cut area: {} at offset {} exceeds {} at offset {}",
                    w[1].cut_area, w[1].offset, w[0].cut_area, w[0].offset
                )));
            }
            if w[0].offset >= 0.0 && w[1].fill_area < w[0].fill_area - tol {
                return Err(fail(format!(
                    "non-monotone fill area: {} at offset {} below {} at offset {}",
                    w[1].fill_area, w[1].offset, w[0].fill_area, w[0].offset
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[AreaSample] {
        &self.samples
    }

    /// Sampled offset range `[lowest, highest]`.
    pub fn offset_range(&self) -> (f64, f64) {
        (
            self.samples[0].offset,
            self.samples[self.samples.len() - 1].offset,
        )
    }

    /// Deepest sampled depth on `side`.
    pub fn max_depth(&self, side: Side) -> f64 {
        let (lo, hi) = self.offset_range();
        match side {
            Side::Cut => -lo,
            Side::Fill => hi,
        }
    }

    /// Piecewise-linear interpolation of the area at signed offset `u`,
    /// extrapolating the outermost piece beyond the sampled range.
    pub fn area_at(&self, side: Side, u: f64) -> f64 {
        let value = |s: &AreaSample| match side {
            Side::Cut => s.cut_area,
            Side::Fill => s.fill_area,
        };
        let n = self.samples.len();
        if n == 1 {
            return value(&self.samples[0]);
        }
        let k = self
            .samples
            .partition_point(|s| s.offset <= u)
            .clamp(1, n - 1);
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        let t = (u - a.offset) / (b.offset - a.offset);
        let area = value(a) + t * (value(b) - value(a));
        area.max(0.0)
    }

    /// Largest area in the table on `side`.
    pub fn peak_area(&self, side: Side) -> f64 {
        self.samples
            .iter()
            .map(|s| match side {
                Side::Cut => s.cut_area,
                Side::Fill => s.fill_area,
            })
            .fold(0.0, f64::max)
    }
}

impl AreaCurve for CrossSectionTable {
    fn area(&self, side: Side, depth: f64) -> f64 {
        match side {
            Side::Cut if depth > 0.0 => self.area_at(side, -depth),
            Side::Fill if depth > 0.0 => self.area_at(side, depth),
            _ => 0.0,
        }
    }
}

/// Key of a cross-section table: (road, section, material), all zero-based.
pub type TableKey = (usize, usize, usize);

/// All cross-section tables of a network.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionSet {
    pub tables: BTreeMap<TableKey, CrossSectionTable>,
}

impl CrossSectionSet {
    pub fn get(&self, road: usize, section: usize, material: usize) -> Option<&CrossSectionTable> {
        self.tables.get(&(road, section, material))
    }

    pub fn insert(&mut self, key: TableKey, table: CrossSectionTable) {
        self.tables.insert(key, table);
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn require(
        &self,
        road: usize,
        section: usize,
        material: usize,
    ) -> Result<&CrossSectionTable> {
        self.get(road, section, material).ok_or_else(|| {
            Error::Emission(format!(
                "missing cross-section table for road {road} section {section} material {material}"
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(a: f64) -> Vec<AreaSample> {
        (-4..=4)
            .map(|k| {
                let u = k as f64 * 0.5;
                AreaSample {
                    offset: u,
                    cut_area: if u < 0.0 { -a * u } else { 0.0 },
                    fill_area: if u > 0.0 { a * u } else { 0.0 },
                }
            })
            .collect()
    }

    #[test]
    fn interpolation_and_curve() {
        let t = CrossSectionTable::new("t", rect(10.0)).unwrap();
        assert_eq!(t.offset_range(), (-2.0, 2.0));
        assert!((t.area(Side::Cut, 1.25) - 12.5).abs() < 1e-12);
        assert!((t.area(Side::Fill, 0.75) - 7.5).abs() < 1e-12);
        assert_eq!(t.area(Side::Cut, 0.0), 0.0);
        assert_eq!(t.area_at(Side::Cut, 1.0), 0.0);
        // linear extrapolation past the deepest sample
        assert!((t.area(Side::Cut, 2.5) - 25.0).abs() < 1e-12);
    }

    #[test]
    fn order_independent() {
        let mut shuffled = rect(3.0);
        shuffled.reverse();
        shuffled.swap(1, 6);
        assert_eq!(
            CrossSectionTable::new("a", rect(3.0)).unwrap(),
            CrossSectionTable::new("b", shuffled).unwrap()
        );
    }

    #[test]
    fn zero_row_is_inserted() {
        let samples = vec![
            AreaSample {
                offset: -1.0,
                cut_area: 4.0,
                fill_area: 0.0,
            },
            AreaSample {
                offset: 1.0,
                cut_area: 0.0,
                fill_area: 5.0,
            },
        ];
        let t = CrossSectionTable::new("t", samples).unwrap();
        assert_eq!(t.samples().len(), 3);
        assert!((t.area(Side::Cut, 0.5) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_monotone_cut() {
        let mut s = rect(10.0);
        s[1].cut_area = 40.0;
        let err = CrossSectionTable::new("r1/s0/m0", s).unwrap_err();
        assert!(err.to_string().contains("non-monotone cut area"), "{err}");
        assert!(err.to_string().contains("-1.5"), "{err}");
    }

    #[test]
    fn rejects_sign_violation() {
        let mut s = rect(10.0);
        s[7].cut_area = 1.0;
        assert!(CrossSectionTable::new("t", s).is_err());
    }
}
