use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-road fit errors on cut and fill areas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub mape_cut: f64,
    pub mape_fill: f64,
    pub rmse_cut: f64,
    pub rmse_fill: f64,
}

fn check_shapes(actual: &[Vec<f64>], predicted: &[Vec<f64>]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::Dimension {
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    for (a, p) in actual.iter().zip(predicted) {
        if a.len() != p.len() {
            return Err(Error::Dimension {
                expected: a.len(),
                got: p.len(),
            });
        }
    }
    Ok(())
}

/// Mean over sections of the mean absolute percentage error over offsets.
/// Offsets with zero actual area are skipped, as are sections left empty.
pub fn mape(actual: &[Vec<f64>], predicted: &[Vec<f64>]) -> Result<f64> {
    check_shapes(actual, predicted)?;
    let per_section: Vec<f64> = actual
        .iter()
        .zip(predicted)
        .filter_map(|(a, p)| {
            let terms: Vec<f64> = a
                .iter()
                .zip(p)
                .filter(|(x, _)| **x != 0.0)
                .map(|(x, y)| (x - y).abs() / x.abs() * 100.0)
                .collect();
            (!terms.is_empty()).then(|| terms.iter().sum::<f64>() / terms.len() as f64)
        })
        .collect();
    if per_section.is_empty() {
        return Err(Error::UndefinedMetric("MAPE over no non-zero areas".into()));
    }
    Ok(per_section.iter().sum::<f64>() / per_section.len() as f64)
}

/// Mean over sections of the root mean squared error over offsets.
pub fn rmse(actual: &[Vec<f64>], predicted: &[Vec<f64>]) -> Result<f64> {
    check_shapes(actual, predicted)?;
    let per_section: Vec<f64> = actual
        .iter()
        .zip(predicted)
        .filter(|(a, _)| !a.is_empty())
        .map(|(a, p)| {
            let mse = a.iter().zip(p).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64;
            mse.sqrt()
        })
        .collect();
    if per_section.is_empty() {
        return Err(Error::UndefinedMetric("RMSE over no samples".into()));
    }
    Ok(per_section.iter().sum::<f64>() / per_section.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mape_examples() {
        let a = vec![vec![100.0, 50.0]];
        assert_eq!(mape(&a, &a).unwrap(), 0.0);
        assert_eq!(mape(&[vec![100.0]], &[vec![90.0]]).unwrap(), 10.0);
        // per-section means 4% and 8%
        let actual = vec![vec![100.0, 100.0], vec![50.0]];
        let pred = vec![vec![96.0, 104.0], vec![46.0]];
        assert!((mape(&actual, &pred).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn mape_skips_zero_rows() {
        let v = mape(&[vec![0.0, 100.0]], &[vec![5.0, 90.0]]).unwrap();
        assert_eq!(v, 10.0);
        assert!(matches!(
            mape(&[vec![0.0]], &[vec![1.0]]),
            Err(Error::UndefinedMetric(_))
        ));
        assert!(matches!(mape(&[], &[]), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn rmse_examples() {
        let a = vec![vec![1.0, 2.0]];
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let r = rmse(&[vec![0.0, 0.0]], &[vec![3.0, 4.0]]).unwrap();
        assert!((r - 12.5f64.sqrt()).abs() < 1e-12);
        let r = rmse(&[vec![0.0], vec![0.0]], &[vec![1.0], vec![3.0]]).unwrap();
        assert_eq!(r, 2.0);
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            rmse(&[vec![1.0]], &[vec![1.0, 2.0]]),
            Err(Error::Dimension { .. })
        ));
    }
}
