use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CrossSectionTable, Side, SideSlopes, TrapezoidGeometry};

/// Fits with an R² below this on either side are flagged as
/// non-trapezoidal.
pub const LOW_R_SQUARED: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleFit {
    pub geometry: TrapezoidGeometry,
    pub r_squared_cut: f64,
    pub r_squared_fill: f64,
    /// The table is poorly described by a trapezoid.
    pub flagged: bool,
}

/// Least-squares side-slope angles of one side. The area model is
/// `W d + k d²` with `k = (cot α + cot β) / 2 >= 0`; only the sum of the
/// cotangents is identifiable, so both angles come out equal.
fn fit_side(table: &CrossSectionTable, side: Side, width: f64) -> Result<(SideSlopes, f64)> {
    let points: Vec<(f64, f64)> = table
        .samples()
        .iter()
        .filter_map(|s| match side {
            Side::Cut if s.offset < 0.0 => Some((-s.offset, s.cut_area)),
            Side::Fill if s.offset > 0.0 => Some((s.offset, s.fill_area)),
            _ => None,
        })
        .collect();
    if points.is_empty() {
        return Err(Error::DegenerateFit(format!(
            "no {} samples to fit angles to",
            side.label().to_lowercase()
        )));
    }
    let num: f64 = points.iter().map(|&(d, a)| (a - width * d) * d * d).sum();
    let den: f64 = points.iter().map(|&(d, _)| d.powi(4)).sum();
    let k = (num / den).max(0.0);
    let angle = if k == 0.0 { FRAC_PI_2 } else { (1.0 / k).atan() };

    let predict = |d: f64| width * d + k * d * d;
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|p| (p.1 - predict(p.0)).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok((
        SideSlopes {
            alpha: angle,
            beta: angle,
        },
        r2,
    ))
}

/// Baseline trapezoid for one table: the road width is taken as known and
/// the side-slope angles of each side are fitted to the sampled areas.
/// Vertical walls clamp to `π/2`.
pub fn angle_baseline_fit(table: &CrossSectionTable, width: f64, length: f64) -> Result<AngleFit> {
    if !(width.is_finite() && width >= 0.0 && length.is_finite() && length > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "width {width} and length {length} must be finite, length positive"
        )));
    }
    let (cut, r_squared_cut) = fit_side(table, Side::Cut, width)?;
    let (fill, r_squared_fill) = fit_side(table, Side::Fill, width)?;
    Ok(AngleFit {
        geometry: TrapezoidGeometry {
            width,
            length,
            cut,
            fill,
        },
        r_squared_cut,
        r_squared_fill,
        flagged: r_squared_cut.min(r_squared_fill) < LOW_R_SQUARED,
    })
}
