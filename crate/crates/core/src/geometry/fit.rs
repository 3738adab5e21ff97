use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::cross_section::{AreaCurve, Side};
use crate::error::{Error, Result};

/// Minimum number of offsets sampled per side when fitting a table.
pub const FIT_SAMPLES: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Linear,
    Quadratic,
}

/// Which fits `fit_side` may return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Linear,
    Quadratic,
    #[default]
    Auto,
}

impl std::str::FromStr for FitMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(FitMode::Linear),
            "quadratic" => Ok(FitMode::Quadratic),
            "auto" => Ok(FitMode::Auto),
            other => Err(format!(
                "unknown fit mode {other:?} (linear|quadratic|auto)"
            )),
        }
    }
}

/// Least-squares volume model. Linear: `chi[0]·u + chi[1]`. Quadratic:
/// `chi[0]·u² + chi[1]·u + chi[2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedVolumeModel {
    pub kind: FitKind,
    pub chi: Vec<f64>,
    pub r_squared: f64,
    pub side: Side,
    pub domain: (f64, f64),
}

impl FittedVolumeModel {
    pub fn evaluate(&self, u: f64) -> f64 {
        let (q, l, c) = self.terms();
        (q * u + l) * u + c
    }

    /// `(quadratic, linear, constant)` coefficients.
    pub fn terms(&self) -> (f64, f64, f64) {
        match self.kind {
            FitKind::Linear => (0.0, self.chi[0], self.chi[1]),
            FitKind::Quadratic => (self.chi[0], self.chi[1], self.chi[2]),
        }
    }

    pub fn constant_mut(&mut self) -> &mut f64 {
        match self.kind {
            FitKind::Linear => &mut self.chi[1],
            FitKind::Quadratic => &mut self.chi[2],
        }
    }

    /// Largest value of the bound over the offsets of the opposite side,
    /// where it must stay non-positive.
    pub fn opposite_side_peak(&self, opposite: (f64, f64)) -> f64 {
        // convex or linear: the maximum sits at an endpoint
        self.evaluate(opposite.0).max(self.evaluate(opposite.1))
    }
}

fn distinct_count(samples: &[(f64, f64)]) -> usize {
    let mut xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}

fn domain(samples: &[(f64, f64)]) -> (f64, f64) {
    samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.0), hi.max(s.0))
        })
}

fn r_squared(samples: &[(f64, f64)], predict: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let ss_tot: f64 = samples.iter().map(|s| (s.1 - mean).powi(2)).sum();
    let ss_res: f64 = samples.iter().map(|s| (s.1 - predict(s.0)).powi(2)).sum();
    if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    }
}

fn side_of(samples: &[(f64, f64)]) -> Side {
    if samples.iter().map(|s| s.0).sum::<f64>() < 0.0 {
        Side::Cut
    } else {
        Side::Fill
    }
}

/// Least-squares line through `(u, volume)` samples.
pub fn fit_linear(samples: &[(f64, f64)]) -> Result<FittedVolumeModel> {
    if distinct_count(samples) < 2 {
        return Err(Error::DegenerateFit(
            "linear fit needs at least 2 distinct offsets".into(),
        ));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(FittedVolumeModel {
        kind: FitKind::Linear,
        chi: vec![slope, intercept],
        r_squared: r_squared(samples, |u| slope * u + intercept),
        side: side_of(samples),
        domain: domain(samples),
    })
}

/// Least-squares parabola through `(u, volume)` samples, solved by SVD on a
/// centered and scaled design matrix.
pub fn fit_quadratic(samples: &[(f64, f64)]) -> Result<FittedVolumeModel> {
    if distinct_count(samples) < 3 {
        return Err(Error::DegenerateFit(
            "quadratic fit needs at least 3 distinct offsets".into(),
        ));
    }
    let (lo, hi) = domain(samples);
    let c = 0.5 * (lo + hi);
    let s = (0.5 * (hi - lo)).max(f64::MIN_POSITIVE);
    let n = samples.len();
    let x = DMatrix::from_fn(n, 3, |r, k| ((samples[r].0 - c) / s).powi(k as i32));
    let y = DVector::from_iterator(n, samples.iter().map(|p| p.1));
    let b = x
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::DegenerateFit(e.to_string()))?;
    // expand b0 + b1 t + b2 t² with t = (u - c)/s
    let q = b[2] / (s * s);
    let l = b[1] / s - 2.0 * b[2] * c / (s * s);
    let k = b[0] - b[1] * c / s + b[2] * c * c / (s * s);
    Ok(FittedVolumeModel {
        kind: FitKind::Quadratic,
        chi: vec![q, l, k],
        r_squared: r_squared(samples, |u| (q * u + l) * u + k),
        side: side_of(samples),
        domain: (lo, hi),
    })
}

/// Fits both models and keeps the quadratic only when it explains strictly
/// more variance and opens upward; ties and concave parabolas fall back to
/// the line.
pub fn select_volume_model(samples: &[(f64, f64)], side: Side) -> Result<FittedVolumeModel> {
    let mut linear = fit_linear(samples)?;
    linear.side = side;
    if distinct_count(samples) < 3 {
        return Ok(linear);
    }
    let mut quad = fit_quadratic(samples)?;
    quad.side = side;
    let gain = quad.r_squared - linear.r_squared;
    if gain > 1e-12 && quad.chi[0] >= 0.0 {
        Ok(quad)
    } else {
        Ok(linear)
    }
}

/// Volume samples `(u, L·area(u))` on a uniform grid over one side.
pub fn sample_side(
    curve: &impl AreaCurve,
    length: f64,
    side: Side,
    depth: f64,
    count: usize,
) -> Vec<(f64, f64)> {
    let count = count.max(FIT_SAMPLES);
    (0..count)
        .map(|k| {
            let d = depth * k as f64 / (count - 1) as f64;
            (side.offset(d), length * curve.area(side, d))
        })
        .collect()
}

/// Fits one side of a cross-section and makes the resulting bound safe to
/// emit unconditionally: non-positive at `u = 0` and on the whole opposite
/// side. A quadratic that cannot be made safe is replaced by the line.
pub fn fit_side(
    curve: &impl AreaCurve,
    length: f64,
    side: Side,
    offset_bounds: (f64, f64),
    mode: FitMode,
) -> Result<FittedVolumeModel> {
    let (u_lo, u_hi) = offset_bounds;
    let (depth, opposite) = match side {
        Side::Cut => (-u_lo, (0.0, u_hi)),
        Side::Fill => (u_hi, (u_lo, 0.0)),
    };
    let samples = sample_side(curve, length, side, depth, FIT_SAMPLES);
    let mut linear = fit_linear(&samples)?;
    linear.side = side;
    let candidate = match mode {
        FitMode::Linear => linear.clone(),
        FitMode::Quadratic => {
            let mut q = fit_quadratic(&samples)?;
            q.side = side;
            if q.chi[0] >= 0.0 {
                q
            } else {
                linear.clone()
            }
        }
        FitMode::Auto => select_volume_model(&samples, side)?,
    };
    let mut model = make_sign_safe(candidate);
    if model.opposite_side_peak(opposite) > 0.0 {
        model = make_sign_safe(linear);
    }
    if model.opposite_side_peak(opposite) > 0.0 {
        return Err(Error::Convexity(format!(
            "{} fit stays positive on the opposite side",
            side.label()
        )));
    }
    warn_if_non_monotone(&model, &samples);
    Ok(model)
}

fn make_sign_safe(mut model: FittedVolumeModel) -> FittedVolumeModel {
    let c = model.constant_mut();
    if *c > 0.0 {
        *c = 0.0;
    }
    model
}

fn warn_if_non_monotone(model: &FittedVolumeModel, samples: &[(f64, f64)]) {
    let mut sorted: Vec<f64> = samples.iter().map(|s| s.0).collect();
    sorted.sort_by(f64::total_cmp);
    let values: Vec<f64> = sorted.iter().map(|&u| model.evaluate(u)).collect();
    let ok = values.windows(2).all(|w| match model.side {
        Side::Cut => w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0),
        Side::Fill => w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0),
    });
    if !ok {
        warn!(
            "{} volume fit is not monotone over its samples (R² = {:.4})",
            model.side.label(),
            model.r_squared
        );
    }
}
