use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::instance::{Family, ModelInstance};
use crate::error::{Error, Result};
use crate::network::{PitKind, RoadNetwork};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyResidual {
    pub family: Family,
    pub rows: usize,
    pub max_residual: f64,
    pub worst: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub tolerance: f64,
    pub families: Vec<FamilyResidual>,
    pub integrality_gap: f64,
    /// Names of rows, quadratics or variables violated beyond tolerance.
    pub violations: Vec<String>,
}

impl ResidualReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.families
            .iter()
            .map(|f| f.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn family(&self, family: Family) -> Option<&FamilyResidual> {
        self.families.iter().find(|f| f.family == family)
    }
}

/// Measures how far `x` is from satisfying every row, quadratic and bound
/// of `instance`, grouped by family.
pub fn validate_solution(
    instance: &ModelInstance,
    x: &[f64],
    tolerance: f64,
) -> Result<ResidualReport> {
    if x.len() != instance.var_count() {
        return Err(Error::Dimension {
            expected: instance.var_count(),
            got: x.len(),
        });
    }
    let mut acc: BTreeMap<Family, FamilyResidual> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut record = |family: Family, name: &str, r: f64, violations: &mut Vec<String>| {
        let entry = acc.entry(family).or_insert(FamilyResidual {
            family,
            rows: 0,
            max_residual: 0.0,
            worst: None,
        });
        entry.rows += 1;
        if r > entry.max_residual || r.is_nan() {
            entry.max_residual = r;
            entry.worst = Some(name.to_string());
        }
        if r > tolerance || r.is_nan() {
            violations.push(name.to_string());
        }
    };
    for c in &instance.constraints {
        record(c.family, &c.name, c.violation(x), &mut violations);
    }
    for q in &instance.quadratics {
        record(Family::VolumeFit, &q.name, q.violation(x), &mut violations);
    }
    let mut integrality_gap: f64 = 0.0;
    for (k, v) in instance.catalog.iter().enumerate() {
        let r = (v.lower - x[k]).max(x[k] - v.upper).max(0.0);
        record(Family::Bounds, &v.name, r, &mut violations);
        if v.integer {
            integrality_gap = integrality_gap.max((x[k] - x[k].round()).abs());
        }
    }
    if integrality_gap > tolerance {
        violations.push("integrality".into());
    }
    Ok(ResidualReport {
        tolerance,
        families: acc.into_values().collect(),
        integrality_gap,
        violations,
    })
}

/// Per-material earth balance of a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialBalance {
    pub material: String,
    pub cut: f64,
    pub borrow: f64,
    pub fill: f64,
    pub waste: f64,
}

impl MaterialBalance {
    /// `|cut + borrow - fill - waste|` relative to the volume moved.
    pub fn relative_imbalance(&self) -> f64 {
        let moved = (self.cut + self.borrow)
            .max(self.fill + self.waste)
            .max(1.0);
        (self.cut + self.borrow - self.fill - self.waste).abs() / moved
    }
}

pub fn material_balance(
    net: &RoadNetwork,
    instance: &ModelInstance,
    x: &[f64],
) -> Result<Vec<MaterialBalance>> {
    let vars = instance
        .vars
        .as_ref()
        .ok_or_else(|| Error::Emission("instance carries no variable map".into()))?;
    let sum = |ids: &[usize]| ids.iter().map(|&k| x[k]).sum::<f64>();
    Ok(net
        .materials
        .iter()
        .enumerate()
        .map(|(m, mat)| {
            let mut b = MaterialBalance {
                material: mat.id.clone(),
                cut: 0.0,
                borrow: 0.0,
                fill: 0.0,
                waste: 0.0,
            };
            for (i, road) in net.roads.iter().enumerate() {
                for j in 0..road.sections.len() {
                    b.cut += sum(&vars.cut[i][j][m]);
                    b.fill += sum(&vars.fill[i][j][m]);
                }
            }
            for e in 0..net.intersections.len() {
                b.cut += sum(&vars.junction_cut[e][m]);
                b.fill += sum(&vars.junction_fill[e][m]);
            }
            for (k, pit) in net.pits.iter().enumerate() {
                let moved = sum(&vars.pit_plus[k][m]) + sum(&vars.pit_minus[k][m]);
                match pit.kind {
                    PitKind::Borrow => b.borrow += moved,
                    PitKind::Waste => b.waste += moved,
                }
            }
            b
        })
        .collect())
}
