use serde::{Deserialize, Serialize};

use super::cross_section::{AreaCurve, Side};
use crate::error::{Error, Result};

/// One rectangular layer: `area` is the volume per meter of height (m²
/// scaled by the section length), `height` its thickness in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub area: f64,
    pub height: f64,
}

/// Slabs of one side, ordered outward from the ground line.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SideSlabs {
    pub slabs: Vec<Slab>,
}

impl SideSlabs {
    pub fn len(&self) -> usize {
        self.slabs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slabs.is_empty()
    }

    pub fn total_height(&self) -> f64 {
        self.slabs.iter().map(|s| s.height).sum()
    }

    /// Piecewise-linear volume at `depth >= 0`; the last slab extends past
    /// the covered height.
    pub fn volume(&self, depth: f64) -> f64 {
        let mut remaining = depth.max(0.0);
        let mut v = 0.0;
        for (k, s) in self.slabs.iter().enumerate() {
            let used = if k + 1 == self.slabs.len() {
                remaining
            } else {
                remaining.min(s.height)
            };
            v += s.area * used;
            remaining -= used;
            if remaining <= 0.0 {
                break;
            }
        }
        v
    }

    /// Merges neighbours whose areas fail to strictly increase, replacing
    /// each pooled run by its height-weighted mean area.
    fn pool_violators(&mut self) {
        let mut pooled: Vec<Slab> = Vec::with_capacity(self.slabs.len());
        for s in self.slabs.drain(..) {
            pooled.push(s);
            while pooled.len() >= 2 {
                let b = pooled[pooled.len() - 1];
                let a = pooled[pooled.len() - 2];
                let tol = 1e-12 * a.area.abs().max(1.0);
                if b.area > a.area + tol {
                    break;
                }
                pooled.pop();
                let h = a.height + b.height;
                *pooled.last_mut().unwrap() = Slab {
                    area: (a.area * a.height + b.area * b.height) / h,
                    height: h,
                };
            }
        }
        self.slabs = pooled;
    }

    fn check_order(&self) -> Result<()> {
        for w in self.slabs.windows(2) {
            if w[1].area <= w[0].area {
                return Err(Error::Emission(format!(
                    "slab areas must strictly increase ({} then {})",
                    w[0].area, w[1].area
                )));
            }
        }
        if self.slabs.iter().any(|s| s.area < 0.0 || s.height <= 0.0) {
            return Err(Error::Emission(
                "slab with negative area or empty height".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SlabApproximation {
    pub cut: SideSlabs,
    pub fill: SideSlabs,
}

impl SlabApproximation {
    pub fn side(&self, side: Side) -> &SideSlabs {
        match side {
            Side::Cut => &self.cut,
            Side::Fill => &self.fill,
        }
    }

    /// Volume at signed offset `u`.
    pub fn volume(&self, u: f64) -> f64 {
        if u < 0.0 {
            self.cut.volume(-u)
        } else {
            self.fill.volume(u)
        }
    }

    /// Verifies the strict-increase ordering on both sides.
    pub fn check(&self) -> Result<()> {
        self.cut.check_order()?;
        self.fill.check_order()
    }
}

/// Builds slabs over uniform depth bands of `[0, depth]` on each side:
/// each slab area is `length * (area(d_k) - area(d_{k-1})) / h_k`.
pub fn build_slabs(
    curve: &impl AreaCurve,
    length: f64,
    depths: (f64, f64),
    counts: (usize, usize),
) -> Result<SlabApproximation> {
    let side = |side: Side, depth: f64, count: usize| -> Result<SideSlabs> {
        if count == 0 {
            return Err(Error::Emission("slab count must be >= 1".into()));
        }
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::Emission(format!(
                "slab depth must be positive, got {depth}"
            )));
        }
        let h = depth / count as f64;
        let mut prev = curve.area(side, 0.0);
        let mut slabs = Vec::with_capacity(count);
        for k in 1..=count {
            let d = if k == count { depth } else { h * k as f64 };
            let a = curve.area(side, d);
            slabs.push(Slab {
                area: length * (a - prev) / h,
                height: h,
            });
            prev = a;
        }
        let mut out = SideSlabs { slabs };
        out.pool_violators();
        Ok(out)
    };
    let approx = SlabApproximation {
        cut: side(Side::Cut, depths.0, counts.0)?,
        fill: side(Side::Fill, depths.1, counts.1)?,
    };
    approx.check()?;
    Ok(approx)
}
