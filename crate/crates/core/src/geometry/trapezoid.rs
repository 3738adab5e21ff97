use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::cross_section::{AreaCurve, Side};
use crate::error::{Error, Result};

/// Left and right side-slope angles of one side, radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideSlopes {
    pub alpha: f64,
    pub beta: f64,
}

impl SideSlopes {
    pub fn vertical() -> Self {
        Self {
            alpha: FRAC_PI_2,
            beta: FRAC_PI_2,
        }
    }

    /// `cot(alpha) + cot(beta)`, exactly zero for vertical walls.
    pub fn spread(&self) -> Result<f64> {
        Ok(cot(self.alpha)? + cot(self.beta)?)
    }
}

fn cot(angle: f64) -> Result<f64> {
    if !(angle > 0.0 && angle <= FRAC_PI_2 + 1e-12) {
        return Err(Error::SingularGeometry(format!(
            "side-slope angle {angle} outside (0, pi/2]"
        )));
    }
    if (angle - FRAC_PI_2).abs() <= 1e-12 {
        Ok(0.0)
    } else {
        Ok(1.0 / angle.tan())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidGeometry {
    pub width: f64,
    pub length: f64,
    pub cut: SideSlopes,
    pub fill: SideSlopes,
}

impl TrapezoidGeometry {
    pub fn slopes(&self, side: Side) -> SideSlopes {
        match side {
            Side::Cut => self.cut,
            Side::Fill => self.fill,
        }
    }

    /// Cross-section area at `depth >= 0`.
    pub fn cross_section_area(&self, side: Side, depth: f64) -> Result<f64> {
        let spread = self.slopes(side).spread()?;
        Ok(self.width * depth + 0.5 * depth * depth * spread)
    }

    /// Closed-form section volume at signed offset `u`.
    pub fn volume(&self, u: f64) -> Result<f64> {
        trapezoid_volume(self, u)
    }
}

/// `A|u| + u²(cot α + cot β)L/2` with `A = W·L`, using the cut angles for
/// `u < 0` and the fill angles otherwise.
pub fn trapezoid_volume(geom: &TrapezoidGeometry, u: f64) -> Result<f64> {
    let side = if u < 0.0 { Side::Cut } else { Side::Fill };
    let spread = geom.slopes(side).spread()?;
    let a = geom.width * geom.length;
    Ok(a * u.abs() + 0.5 * u * u * spread * geom.length)
}

impl AreaCurve for TrapezoidGeometry {
    fn area(&self, side: Side, depth: f64) -> f64 {
        self.cross_section_area(side, depth.max(0.0))
            .expect("trapezoid angles validated on construction")
    }
}
